"""
Geodesic normal chart of a hypersurface.

``Phi(r, x) = exp_{iota(x)}(r N(x))`` is built as a jet in the n + 1
variables ``(r, x)``, r first, by Picard iteration of the geodesic equation.
Slicing its jets in r gives the definition-based expansion data: the metric
family h_r, the volume ratio v(r, x), J along the normal geodesics and the
first r-derivatives of the Laplacian and divergence of h_r.
"""
from functools import cached_property

import numpy as np

from . import ambient, jets
from .exceptions import InconsistencyError
from .logging import log

R_AXIS = 0


class FermiChart(object):
    def __init__(self, hypersurface):
        self.hs = hypersurface
        self.n = hypersurface.n
        self.order = hypersurface.order

    @cached_property
    def geodesics(self):
        """Phi^a(r, x) as a jet of shape (m,) in the variables (r, x)."""
        hs = self.hs
        start = hs.iota.insert_axis(R_AXIS, 0) + hs.normal.insert_axis(R_AXIS, 1)
        christoffel = hs.ambient.christoffel
        if not np.any(christoffel.coeffs):
            log.debug("flat ambient chart, normal geodesics are straight lines")
            return start
        gamma = start
        # every pass fixes at least one more degree in r
        for _ in range(self.order):
            substitution = jets.Substitution(gamma)
            velocity = gamma.partial(R_AXIS)
            half = jets.einsum("abc,c->ab", substitution(christoffel), velocity)
            acceleration = -jets.einsum("ab,b->a", half, velocity)
            correction = acceleration.antiderivative(R_AXIS).antiderivative(R_AXIS)
            gamma = start + correction.truncate(self.order)
        log.debug("normal geodesics built by {} Picard passes".format(self.order))
        return gamma

    @cached_property
    def substitution(self):
        return jets.Substitution(self.geodesics)

    @cached_property
    def jacobian(self):
        """d Phi^a / d y^A for y = (r, x), shape (m, n + 1)."""
        return jets.stack(
            [self.geodesics.partial(axis) for axis in range(self.n + 1)], axis=1
        )

    @cached_property
    def metric(self):
        """The background metric in the chart (r, x)."""
        g = self.substitution(self.hs.ambient.metric)
        lowered = jets.einsum("ab,bj->aj", g, self.jacobian)
        return jets.einsum("ai,aj->ij", self.jacobian, lowered)

    @cached_property
    def curvature(self):
        return ambient.Curvature(self.metric)

    def gauss_lemma_residual(self):
        """Largest coefficient of G_rr - 1 and G_ri; zero in a geodesic normal chart."""
        radial = np.abs((self.metric[0, 0] - 1.0).coeffs).max()
        mixed = np.abs(self.metric[0, 1:].coeffs).max()
        return max(radial, mixed)

    def check_gauss_lemma(self, tolerance=1e-8):
        residual = self.gauss_lemma_residual()
        if residual > tolerance:
            raise InconsistencyError("Gauss lemma G_rr = 1, G_ri = 0", 0.0, 0.0, residual)
        return residual

    @property
    def h_r(self):
        return self.metric[1:, 1:]

    def h_coefficient(self, k):
        """h_(k): the coefficient of r^k in h_r, as a jet in x."""
        return self.h_r.coefficient_slice(R_AXIS, k)

    @cached_property
    def volume(self):
        """v(r, x) = dvol(h_r) / dvol(h)."""
        h0 = self.h_coefficient(0).insert_axis(R_AXIS, 0)
        return jets.sqrt(jets.det(self.h_r) / jets.det(h0))

    def volume_coefficient(self, k):
        return self.volume.coefficient_slice(R_AXIS, k)

    @cached_property
    def jbar(self):
        """J of the background along the normal geodesics."""
        return self.substitution(self.hs.ambient.scal) / (2.0 * self.n)

    def jbar_coefficient(self, k):
        return self.jbar.coefficient_slice(R_AXIS, k)

    @cached_property
    def radius(self):
        """The coordinate r as a jet."""
        batch = self.hs.points.shape[0]
        coeffs = np.zeros((batch, jets.ncoeff(self.n + 1, self.order)))
        coeffs[:, 1 + R_AXIS] = 1.0
        return jets.Jet(coeffs, self.n + 1, self.order)

    def gradient_norm(self, scalar):
        d = scalar.gradient()
        return jets.einsum("a,a->", jets.einsum("ab,b->a", self.curvature.inverse, d), d)

    def laplacian(self, scalar):
        hessian = ambient.covariant_derivative(
            scalar.gradient(), self.curvature.christoffel
        )
        return jets.einsum("ab,ab->", hessian, self.curvature.inverse)

    def divergence(self, one_form):
        nabla = ambient.covariant_derivative(one_form, self.curvature.christoffel)
        return jets.einsum("ab,ab->", nabla, self.curvature.inverse)

    def delta_prime(self, scalar):
        """d/dr at r = 0 of the Laplacian of h_r applied to a function of x.

        For u independent of r the full Laplacian of the chart metric equals
        the Laplacian of h_r because G_rr = 1 and G_ri = 0.
        """
        lifted = self.laplacian(scalar.insert_axis(R_AXIS))
        return lifted.coefficient_slice(R_AXIS, 1)

    def divergence_prime(self, one_form):
        """d/dr at r = 0 of the divergence of h_r applied to a 1-form on M."""
        lifted = one_form.insert_axis(R_AXIS)
        components = [lifted[0] * 0.0] + [lifted[i] for i in range(self.n)]
        return self.divergence(jets.stack(components)).coefficient_slice(R_AXIS, 1)

    def trace_volume_residual(self, through=3):
        """Largest mismatch of v'/v = tr(h_r^-1 h_r') / 2 over the r^0 .. r^k coefficients."""
        lhs = self.volume.partial(R_AXIS) / self.volume
        inverse = jets.inverse(self.h_r)
        rhs = jets.einsum("ij,ij->", inverse, self.h_r.partial(R_AXIS)) * 0.5
        difference = lhs - rhs
        return max(
            np.abs(difference.coefficient_slice(R_AXIS, k).value).max()
            for k in range(through + 1)
        )


def fermi_chart(geometry):
    """The geodesic normal chart of ``geometry``, built once per geometry."""
    if "fermi" not in geometry.cache:
        with log.timed("geodesic normal chart"):
            chart = FermiChart(geometry.hypersurface)
            chart.geodesics
        geometry.cache["fermi"] = chart
    return geometry.cache["fermi"]
