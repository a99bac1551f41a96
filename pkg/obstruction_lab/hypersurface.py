"""
Intrinsic and extrinsic geometry of a hypersurface M^n in (X^{n+1}, g).

:class:`Hypersurface` holds jets in the chart of M: the embedding, the unit
normal, the induced metric h, the second fundamental form L and every
ambient tensor pulled back along the embedding. :class:`SurfaceStack` reads
off point values in an h-orthonormal frame, so contractions there are plain
sums. :class:`Geometry` bundles both stacks for one batch of chart points.
"""
import itertools
from functools import cached_property

import numpy as np

from . import ambient, jets
from .exceptions import ContractViolation, EmbeddingError
from .expressions import ScalarField
from .logging import log

_LETTERS = "abcdfghijkl"


class Embedding(object):
    """An embedding given by ``n + 1`` component fields of the n chart variables."""

    def __init__(self, maps, normal_orientation=1):
        self.maps = list(maps)
        self.chart_dim = self.maps[0].arity
        self.ambient_dim = len(self.maps)
        if self.ambient_dim != self.chart_dim + 1:
            raise ContractViolation(
                "embedding",
                "{} components for a {}-dimensional chart".format(
                    self.ambient_dim, self.chart_dim
                ),
            )
        if normal_orientation not in (1, -1):
            raise ContractViolation("embedding", "normal_orientation must be +1 or -1")
        self.normal_orientation = normal_orientation

    @classmethod
    def from_expressions(cls, sources, chart_dim, parameters=None, normal_orientation=1):
        maps = [ScalarField(source, chart_dim, parameters) for source in sources]
        return cls(maps, normal_orientation)

    @classmethod
    def graph(cls, height, chart_dim, parameters=None, normal_orientation=1):
        """The graph ``x_{n+1} = height(x_1 .. x_n)``."""
        sources = ["x{}".format(i + 1) for i in range(chart_dim)] + [height]
        return cls.from_expressions(sources, chart_dim, parameters, normal_orientation)

    def flipped(self):
        return Embedding(self.maps, -self.normal_orientation)

    def lift(self, points, order):
        """Jet of the embedding, shape (n + 1, B)."""
        xs = jets.variables(points, order)
        zero = xs[0] * 0.0
        components = []
        for field in self.maps:
            value = field.evaluate(xs)
            if not isinstance(value, jets.Jet):
                value = zero + value
            components.append(value)
        return jets.stack(components)


def _permutation_sign(permutation):
    inversions = sum(
        1
        for i, j in itertools.combinations(range(len(permutation)), 2)
        if permutation[i] > permutation[j]
    )
    return -1.0 if inversions % 2 else 1.0


class Hypersurface(object):
    """Jets of an embedded hypersurface at a batch of chart points."""

    def __init__(self, embedding, metric, points, order):
        if metric.dim != embedding.ambient_dim:
            raise ContractViolation(
                "hypersurface",
                "metric of dimension {} for an embedding into dimension {}".format(
                    metric.dim, embedding.ambient_dim
                ),
            )
        self.embedding = embedding
        self.metric_field = metric
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.n = embedding.chart_dim
        self.order = order
        self.orientation = embedding.normal_orientation

    @cached_property
    def iota(self):
        return self.embedding.lift(self.points, self.order)

    @cached_property
    def ambient(self):
        """Ambient curvature jets around the image points."""
        return ambient.curvature_from_metric(
            self.metric_field, self.iota.value.T, self.iota.order
        )

    @cached_property
    def substitution(self):
        return jets.Substitution(self.iota)

    def pull(self, tensor):
        """Compose an ambient-chart jet with the embedding."""
        return self.substitution(tensor)

    @cached_property
    def tangent(self):
        """d iota^a / dx^i with shape (m, n)."""
        return jets.stack([self.iota.partial(i) for i in range(self.n)], axis=1)

    @cached_property
    def second_derivatives(self):
        return self.tangent.gradient().transpose(1, 2, 0)

    @cached_property
    def ambient_metric(self):
        return self.pull(self.ambient.metric)

    @cached_property
    def metric(self):
        """Induced metric h_ij."""
        lowered = jets.einsum("ab,bj->aj", self.ambient_metric, self.tangent)
        h = jets.einsum("ai,aj->ij", self.tangent, lowered)
        for index, matrix in enumerate(np.moveaxis(h.value, -1, 0)):
            try:
                np.linalg.cholesky(matrix)
            except np.linalg.LinAlgError:
                raise EmbeddingError(
                    "Jacobian of the embedding is rank deficient",
                    tuple(self.points[index]),
                )
        return h

    @cached_property
    def intrinsic(self):
        return ambient.Curvature(self.metric)

    @property
    def h_inv(self):
        return self.intrinsic.inverse

    @property
    def christoffel(self):
        return self.intrinsic.christoffel

    @cached_property
    def conormal(self):
        """n_a = det[d_1 iota, .., d_n iota, e_a]; annihilates every tangent vector."""
        m = self.n + 1
        components = [None] * m
        for permutation in itertools.permutations(range(m)):
            term = self.tangent[permutation[0], 0]
            for i in range(1, self.n):
                term = term * self.tangent[permutation[i], i]
            term = term * _permutation_sign(permutation)
            a = permutation[self.n]
            components[a] = term if components[a] is None else components[a] + term
        return jets.stack(components)

    @cached_property
    def normal(self):
        """Unit normal N^a with det[Jacobian | N] of sign -normal_orientation."""
        inverse = self.pull(self.ambient.inverse)
        raised = jets.einsum("ab,b->a", inverse, self.conormal)
        length2 = jets.einsum("a,a->", raised, self.conormal)
        if np.any(length2.value <= 1e-28):
            raise EmbeddingError("normal is not normalizable")
        return raised * (-self.orientation) / jets.sqrt(length2)

    @cached_property
    def normal_flat(self):
        return jets.einsum("ab,b->a", self.ambient_metric, self.normal)

    @cached_property
    def second_fundamental_form(self):
        """L_ij = -g(nabla_i d_j iota, N)."""
        gamma = self.pull(self.ambient.christoffel)
        half = jets.einsum("bcd,dj->bcj", gamma, self.tangent)
        acceleration = self.second_derivatives + jets.einsum(
            "bcj,ci->bij", half, self.tangent
        )
        return -jets.einsum("b,bij->ij", self.normal_flat, acceleration)

    @property
    def L(self):
        return self.second_fundamental_form

    @cached_property
    def H(self):
        return self.trace(self.L) / float(self.n)

    @cached_property
    def lo(self):
        return self.L - self.H * self.metric

    @cached_property
    def lo2(self):
        return self.product(self.lo, self.lo)

    @cached_property
    def lo2_tf(self):
        return self.lo2 - self.trace(self.lo2) * self.metric / float(self.n)

    @cached_property
    def frame(self):
        """Columns N, d_1 iota, .., d_n iota as a jet of shape (m, m)."""
        columns = [self.normal] + [self.tangent[:, i] for i in range(self.n)]
        return jets.stack(columns, axis=1)

    def framed(self, tensor):
        """Pull back an ambient covariant tensor with the frame inserted in each slot."""
        return ambient.project(self.pull(tensor), self.frame)

    @cached_property
    def basis(self):
        """h-orthonormal frame at the points, shape (n, n, B) indexed [coordinate, frame]."""
        values = np.moveaxis(self.metric.value, -1, 0)
        lower = np.linalg.cholesky(values)
        return np.moveaxis(np.swapaxes(np.linalg.inv(lower), -1, -2), 0, -1)

    @cached_property
    def adapted_basis(self):
        """Orthonormal ambient frame (m, m, B): the normal, then tangents."""
        tangents = np.einsum("aib,icb->acb", self.tangent.value, self.basis)
        return np.concatenate([self.normal.value[:, None, :], tangents], axis=1)

    def to_frame(self, values, rank):
        return ambient.to_frame(values, self.basis, rank)

    def to_coordinates(self, values, rank):
        """Inverse of :meth:`to_frame` for covariant tensors."""
        inverse = np.moveaxis(np.linalg.inv(np.moveaxis(self.basis, -1, 0)), 0, -1)
        return ambient.to_frame(values, inverse, rank)

    # tangential operators on jets

    def nabla(self, tensor):
        return ambient.covariant_derivative(tensor, self.christoffel)

    def hessian(self, scalar):
        return self.nabla(scalar.gradient())

    def laplacian(self, scalar):
        return self.trace(self.hessian(scalar))

    def trace(self, tensor, first=0, second=1):
        rank = len(tensor.shape)
        letters = _LETTERS[:rank]
        out = "".join(c for k, c in enumerate(letters) if k not in (first, second))
        return jets.einsum(
            "{},{}{}->{}".format(letters, letters[first], letters[second], out),
            tensor,
            self.h_inv,
        )

    def divergence(self, tensor):
        """delta(t)_{...} = h^{jk} nabla_j t_{k...}."""
        return self.trace(self.nabla(tensor), 0, 1)

    def double_divergence(self, tensor):
        return self.divergence(self.divergence(tensor))

    def product(self, a, b):
        """(a b)_ij = a_ik h^{kl} b_lj."""
        return jets.einsum("ik,kj->ij", jets.einsum("ik,kl->il", a, self.h_inv), b)

    def pairing(self, a, b):
        """Full contraction of two covariant tensors of rank 1 or 2."""
        if len(a.shape) == 1:
            return jets.einsum("i,i->", jets.einsum("i,ij->j", a, self.h_inv), b)
        return self.trace(self.product(a, b))

    @cached_property
    def schouten(self):
        if self.n < 3:
            raise ContractViolation("intrinsic Schouten tensor", "requires n = 3")
        return self.intrinsic.schouten

    def lop(self, b):
        """LOP(b) = delta delta(b) + (P, b) for a trace-free symmetric 2-tensor jet."""
        if self.n != 3:
            raise ContractViolation("lop", "requires n = 3")
        trace = self.trace(b).value
        if np.any(np.abs(trace) > 1e-10 * (1.0 + np.abs(b.value).max())):
            raise ContractViolation(
                "lop", "argument is not trace-free (trace {:.3e})".format(
                    float(np.abs(trace).max())
                )
            )
        return self.double_divergence(b) + self.pairing(self.schouten, b)

    # pulled-back ambient fields

    @cached_property
    def weyl_framed(self):
        return self.framed(self.ambient.weyl)

    @cached_property
    def riemann_framed(self):
        return self.framed(self.ambient.riemann)

    @cached_property
    def ricci_framed(self):
        return self.framed(self.ambient.ricci)

    @cached_property
    def schouten_framed(self):
        return self.framed(self.ambient.schouten)

    @cached_property
    def scal_bar(self):
        return self.pull(self.ambient.scal)

    @cached_property
    def W_hat(self):
        """W(N, d_i, d_j, N) as a symmetric 2-tensor on M."""
        return self.weyl_framed[0, 1:, 1:, 0]

    @cached_property
    def W0(self):
        return self.weyl_framed[1:, 1:, 1:, 0]

    @cached_property
    def ric0(self):
        return self.ricci_framed[1:, 0]

    @cached_property
    def fialkov(self):
        """F = iota*P - P + H lo + H^2 h / 2."""
        pbar = self.schouten_framed[1:, 1:]
        return pbar - self.schouten + self.H * self.lo + 0.5 * self.H * self.H * self.metric

    @cached_property
    def fialkov_tf(self):
        return self.fialkov - self.trace(self.fialkov) * self.metric / float(self.n)


def tangential_ops(hypersurface, tensor):
    """Point values of the tangential derivatives of a scalar, 1-form or 2-tensor jet."""
    hs = hypersurface
    rank = len(tensor.shape)
    if rank == 0:
        hessian = hs.hessian(tensor)
        return {
            "gradient": hs.to_frame(tensor.gradient().value, 1),
            "hessian": hs.to_frame(hessian.value, 2),
            "laplacian": hs.trace(hessian).value,
        }
    nabla = hs.nabla(tensor)
    result = {
        "nabla": hs.to_frame(nabla.value, rank + 1),
        "divergence": hs.to_frame(hs.trace(nabla, 0, 1).value, rank - 1),
    }
    if rank == 2:
        result["double_divergence"] = hs.double_divergence(tensor).value
    return result


def _trace(values):
    return np.einsum("ii...->...", values)


def _matmul(a, b):
    return np.einsum("ik...,kj...->ij...", a, b)


class SurfaceStack(object):
    """Point values of the hypersurface quantities in an h-orthonormal frame.

    Tensor attributes carry the batch axis last; scalars are arrays of shape (B,).
    """

    def __init__(self, hypersurface):
        self.hs = hypersurface
        self.n = hypersurface.n

    def _frame(self, jet):
        return self.hs.to_frame(jet.value, len(jet.shape))

    @property
    def h(self):
        return np.broadcast_to(np.eye(self.n)[..., None], (self.n, self.n, self.batch))

    @property
    def batch(self):
        return self.hs.points.shape[0]

    @cached_property
    def L(self):
        return self._frame(self.hs.L)

    @cached_property
    def H(self):
        return _trace(self.L) / self.n

    @cached_property
    def lo(self):
        return self.L - self.H * np.eye(self.n)[..., None]

    @cached_property
    def lo2(self):
        return _matmul(self.lo, self.lo)

    @cached_property
    def norm_lo2(self):
        return _trace(self.lo2)

    @cached_property
    def lo2_tf(self):
        return self.lo2 - self.norm_lo2 / self.n * np.eye(self.n)[..., None]

    @cached_property
    def tr_lo3(self):
        return _trace(_matmul(self.lo2, self.lo))

    @cached_property
    def tr_lo4(self):
        return _trace(_matmul(self.lo2, self.lo2))

    @cached_property
    def L2(self):
        return _matmul(self.L, self.L)

    @cached_property
    def norm_L2(self):
        return _trace(self.L2)

    @cached_property
    def tr_L3(self):
        return _trace(_matmul(self.L2, self.L))

    @cached_property
    def tr_L4(self):
        return _trace(_matmul(self.L2, self.L2))

    # intrinsic curvature

    @cached_property
    def riemann(self):
        return self._frame(self.hs.intrinsic.riemann)

    @cached_property
    def ricci(self):
        return self._frame(self.hs.intrinsic.ricci)

    @cached_property
    def scal(self):
        return self.hs.intrinsic.scal.value

    @cached_property
    def J(self):
        return self.scal / (2.0 * (self.n - 1))

    @cached_property
    def P(self):
        return self._frame(self.hs.schouten)

    @cached_property
    def K(self):
        if self.n != 2:
            raise ContractViolation("Gauss curvature", "requires n = 2")
        return 0.5 * self.scal

    # derivatives of the mean curvature and of the second fundamental form

    @cached_property
    def dH(self):
        return self._frame(self.hs.H.gradient())

    @cached_property
    def hessH(self):
        return self._frame(self.hs.hessian(self.hs.H))

    @cached_property
    def lapH(self):
        return _trace(self.hessH)

    @cached_property
    def _nabla_L(self):
        return self.hs.nabla(self.hs.L)

    @cached_property
    def grad_L(self):
        return self._frame(self._nabla_L)

    @cached_property
    def grad2_L(self):
        return self._frame(self.hs.nabla(self._nabla_L))

    @cached_property
    def lap_L(self):
        return np.einsum("kkij...->ij...", self.grad2_L)

    @cached_property
    def div_L(self):
        return np.einsum("kki...->i...", self.grad_L)

    @cached_property
    def _nabla_lo(self):
        return self.hs.nabla(self.hs.lo)

    @cached_property
    def grad_lo(self):
        return self._frame(self._nabla_lo)

    @cached_property
    def grad2_lo(self):
        return self._frame(self.hs.nabla(self._nabla_lo))

    @cached_property
    def div_lo(self):
        return np.einsum("kki...->i...", self.grad_lo)

    @cached_property
    def norm_grad_lo(self):
        return np.einsum("kij...,kij...->...", self.grad_lo, self.grad_lo)

    @cached_property
    def grad_div_lo(self):
        """nabla_j delta(lo)_i stored as [j, i]."""
        return np.einsum("jkki...->ji...", self.grad2_lo)

    @cached_property
    def lap_lo(self):
        return np.einsum("kkij...->ij...", self.grad2_lo)

    @cached_property
    def divdiv_lo(self):
        return np.einsum("jkkj...->...", self.grad2_lo)

    @cached_property
    def divdiv_lo2(self):
        return self.hs.double_divergence(self.hs.lo2).value

    @cached_property
    def lap_normL2(self):
        return self.hs.laplacian(self.hs.trace(self.hs.product(self.hs.L, self.hs.L))).value

    @cached_property
    def norm_grad_L(self):
        return np.einsum("kij...,kij...->...", self.grad_L, self.grad_L)

    @cached_property
    def lap_normlo2(self):
        return self.hs.laplacian(self.hs.trace(self.hs.lo2)).value

    @cached_property
    def kappa1(self):
        """(nabla^i nabla^j lo^k_i - nabla^j nabla^i lo^k_i) lo_kj."""
        g = self.grad2_lo
        commutator = np.einsum("ijki...->jk...", g) - np.einsum("jiki...->jk...", g)
        return np.einsum("jk...,kj...->...", commutator, self.lo)

    @cached_property
    def kappa2(self):
        first = np.einsum("ij...,ij...->...", self.lo, self.lap_lo)
        second = np.einsum("ij...,ji...->...", self.lo, self.grad_div_lo)
        return first - 1.5 * second

    @cached_property
    def fialkov(self):
        return self._frame(self.hs.fialkov)

    # tangential derivatives of pulled-back ambient fields

    @cached_property
    def grad_W0(self):
        """nabla_l of (X, Y, Z) -> W(X, Y, Z, N), stored as [l, k, i, j]."""
        return self._frame(self.hs.nabla(self.hs.W0))

    @cached_property
    def div_W_0(self):
        """nabla^k W_kij0."""
        return np.einsum("kkij...->ij...", self.grad_W0)

    @cached_property
    def grad_R0(self):
        return self._frame(self.hs.nabla(self.hs.riemann_framed[1:, 1:, 1:, 0]))

    @cached_property
    def grad_ric0(self):
        """nabla_i (Ric_0)_j stored as [i, j]."""
        return self._frame(self.hs.nabla(self.hs.ric0))

    @cached_property
    def div_ric0(self):
        return _trace(self.grad_ric0)

    @cached_property
    def grad_p0(self):
        return self._frame(self.hs.nabla(self.hs.schouten_framed[1:, 0]))

    @cached_property
    def div_p0(self):
        return _trace(self.grad_p0)

    @cached_property
    def lap_p00(self):
        return self.hs.laplacian(self.hs.schouten_framed[0, 0]).value

    @cached_property
    def lap_scal_bar(self):
        return self.hs.laplacian(self.hs.scal_bar).value

    @cached_property
    def lap_jbar(self):
        return self.lap_scal_bar / (2.0 * self.n)

    @cached_property
    def lap_J(self):
        return self.hs.laplacian(self.hs.intrinsic.jbar).value

    @cached_property
    def lap_H2(self):
        return self.hs.laplacian(self.hs.H * self.hs.H).value

    @cached_property
    def div_H_ric0(self):
        return self.hs.divergence(self.hs.H * self.hs.ric0).value

    def _div_contracted_ric0(self, tensor):
        """delta of the 1-form (T Ric)_0 with components T_i^k Ric_k0."""
        one_form = jets.einsum(
            "k,ki->i", self.hs.ric0, jets.einsum("kl,li->ki", self.hs.h_inv, tensor)
        )
        return self.hs.divergence(one_form).value

    @cached_property
    def div_L_ric0(self):
        return self._div_contracted_ric0(self.hs.L)

    @cached_property
    def div_lo_ric0(self):
        return self._div_contracted_ric0(self.hs.lo)

    @cached_property
    def divdiv_ric_bar(self):
        return self.hs.double_divergence(self.hs.ricci_framed[1:, 1:]).value

    @cached_property
    def divdiv_W(self):
        return self.hs.double_divergence(self.hs.W_hat).value

    @cached_property
    def divdiv_Hlo(self):
        return self.hs.double_divergence(self.hs.H * self.hs.lo).value

    @cached_property
    def div_d0_ric0(self):
        """delta of the 1-form X -> (nabla_N Ric)(X, N)."""
        one_form = self.hs.framed(self.hs.ambient.nabla_ricci)[0, 1:, 0]
        return self.hs.divergence(one_form).value

    @cached_property
    def lop_lo2_tf(self):
        return self.hs.lop(self.hs.lo2_tf).value

    @cached_property
    def lop_W(self):
        return self.hs.lop(self.hs.W_hat).value

    @cached_property
    def fialkov_tf(self):
        return self._frame(self.hs.fialkov_tf)

    @cached_property
    def lop_fialkov(self):
        """LOP of the trace-free part of the Fialkov tensor."""
        return self.hs.lop(self.hs.fialkov_tf).value

    def codazzi_residual(self, ambient_stack):
        """nabla_j L_ik - nabla_i L_jk - R_ijk0, largest component per point."""
        g = self.grad_L
        residual = (
            np.swapaxes(g, 0, 1) - g - ambient_stack.riemann[1:, 1:, 1:, 0]
        )
        return np.abs(residual).reshape(-1, self.batch).max(axis=0)


def fialkov(surface, ambient_stack):
    """The Fialkov tensor and the residual of its form lo^2 - |lo|^2 h / 4 + W."""
    if surface.n != 3:
        raise ContractViolation("fialkov", "requires n = 3")
    other = (
        surface.lo2
        - 0.25 * surface.norm_lo2 * np.eye(3)[..., None]
        + ambient_stack.W_hat
    )
    residual = np.abs(surface.fialkov - other).reshape(-1, surface.batch).max(axis=0)
    return surface.fialkov, residual


class Geometry(object):
    """Both stacks of one hypersurface at a batch of points, plus scenario context."""

    def __init__(self, hypersurface, tags=(), scenario_id=None):
        self.hypersurface = hypersurface
        self.surface = SurfaceStack(hypersurface)
        self.tags = frozenset(tags)
        self.scenario_id = scenario_id
        self.n = hypersurface.n
        self.cache = {}

    @cached_property
    def ambient(self):
        return ambient.AmbientStack(
            self.hypersurface.ambient, self.hypersurface.adapted_basis
        )

    @property
    def points(self):
        return self.hypersurface.points

    @property
    def batch(self):
        return self.hypersurface.points.shape[0]


def build_surface_stack(embedding, metric, points, order, tags=(), scenario_id=None):
    """Geometry of ``embedding`` in ``(X, metric)`` at the chart ``points``."""
    if order < 4:
        raise ContractViolation("build_surface_stack", "jet order must be >= 4")
    log.debug(
        "building hypersurface stacks at {} point(s), order {}".format(
            np.atleast_2d(points).shape[0], order
        )
    )
    hypersurface = Hypersurface(embedding, metric, points, order)
    return Geometry(hypersurface, tags, scenario_id)
