"""
Normal expansion of the background metric, the volume ratio and the
singular Yamabe defining density.

Closed forms are written in the adapted orthonormal frame from the two
stacks. The geodesic normal chart in :mod:`obstruction_lab.fermi` supplies an
independent definition-based path; :func:`sc_remainder_oracle` reads the
obstruction off the first coefficient of ``S(g, sigma_F) - 1`` that the
defining density cannot remove.
"""
import numpy as np

from .exceptions import (
    ContractViolation,
    InconsistencyError,
    PoleError,
    SeriesConsistencyError,
)
from .fermi import R_AXIS, fermi_chart
from .logging import log
from .utils import matmul, norm2, pair, trace


def h_coefficients(surface, ambient):
    """h_(1), h_(2), h_(3) in the adapted frame, and the trace of h_(4)."""
    L, G = surface.L, ambient.G_normal
    h1 = 2.0 * L
    h2 = surface.L2 - G
    LG = matmul(L, G)
    h3 = (-ambient.d0_R_0ij0 - 2.0 * (LG + np.swapaxes(LG, 0, 1))) / 3.0
    tr_h4 = (
        -ambient.d0d0_ric00
        - 6.0 * pair(L, ambient.d0_R_0ij0)
        - 4.0 * pair(surface.L2, G)
        + 4.0 * norm2(G)
    ) / 12.0
    return h1, h2, h3, tr_h4


def volume_from_traces(h1, h2, h3, tr_h4):
    """v_1 .. v_4 from the Taylor coefficients of h_r (orthonormal frame)."""
    t1, t2, t3 = trace(h1), trace(h2), trace(h3)
    h11 = matmul(h1, h1)
    t11, t12, t13 = trace(h11), pair(h1, h2), pair(h1, h3)
    t22, t111 = pair(h2, h2), pair(h11, h1)
    t112, t1111 = pair(h11, h2), pair(h11, h11)
    v1 = t1 / 2.0
    v2 = (t1 * t1 + 4.0 * t2 - 2.0 * t11) / 8.0
    v3 = (
        t1 ** 3 + 12.0 * t1 * t2 + 24.0 * t3 - 6.0 * t1 * t11 - 24.0 * t12 + 8.0 * t111
    ) / 48.0
    v4 = (
        t1 ** 4
        + 24.0 * t1 * t1 * t2
        + 48.0 * t2 * t2
        + 96.0 * t1 * t3
        + 192.0 * tr_h4
        - 12.0 * t1 * t1 * t11
        - 48.0 * t2 * t11
        + 12.0 * t11 * t11
        - 96.0 * t1 * t12
        - 192.0 * t13
        - 96.0 * t22
        + 32.0 * t1 * t111
        + 192.0 * t112
        - 48.0 * t1111
    ) / 384.0
    return [np.ones_like(v1), v1, v2, v3, v4]


def _newton(l1, l2, l3, l4):
    """Elementary symmetric functions from the power sums of L."""
    s2 = (l1 * l1 - l2) / 2.0
    s3 = l1 ** 3 / 6.0 - l1 * l2 / 2.0 + l3 / 3.0
    s4 = (l1 ** 4 - 6.0 * l1 * l1 * l2 + 3.0 * l2 * l2 + 8.0 * l1 * l3 - 6.0 * l4) / 24.0
    return s2, s3, s4


def volume_newton(surface):
    """v_k = sigma_k(L), exact when the background is flat."""
    l1 = trace(surface.L)
    s2, s3, s4 = _newton(l1, surface.norm_L2, surface.tr_L3, surface.tr_L4)
    return [np.ones_like(l1), l1, s2, s3, s4]


def volume_closed(surface, ambient):
    """v_1 .. v_4 in closed form."""
    n = surface.n
    H, L, G = surface.H, surface.L, ambient.G_normal
    R, D1, D2 = ambient.ric00, ambient.d0_ric00, ambient.d0d0_ric00
    E = pair(L, ambient.d0_R_0ij0)
    norm_lo2 = surface.norm_lo2
    v1 = n * H
    v2 = (-R - norm_lo2 + n * (n - 1) * H * H) / 2.0
    v3 = (
        -D1
        + 2.0 * pair(surface.lo, G)
        - (3.0 * n - 2.0) * H * R
        + 2.0 * surface.tr_lo3
        - 3.0 * (n - 2.0) * H * norm_lo2
        + n * (n - 1.0) * (n - 2.0) * H ** 3
    ) / 6.0
    norm_L2 = surface.norm_L2
    l1 = n * H
    sigma4 = _newton(l1, norm_L2, surface.tr_L3, surface.tr_L4)[2]
    v4 = (
        24.0 * sigma4
        - 6.0 * l1 * l1 * R
        + 6.0 * norm_L2 * R
        + 3.0 * R * R
        - 4.0 * l1 * D1
        + 8.0 * l1 * pair(L, G)
        - D2
        + 2.0 * E
        - 8.0 * pair(surface.L2, G)
        - 2.0 * norm2(G)
    ) / 24.0
    return [np.ones_like(v1), v1, v2, v3, v4]


def _relative_gap(first, second):
    return float(
        (np.abs(first - second) / (1.0 + np.maximum(np.abs(first), np.abs(second)))).max()
    )


def volume_coefficients(surface, ambient, tolerance=1e-8):
    """Closed-form v_1 .. v_4, cross-checked against the trace relations."""
    h1, h2, h3, tr_h4 = h_coefficients(surface, ambient)
    from_traces = volume_from_traces(h1, h2, h3, tr_h4)
    closed = volume_closed(surface, ambient)
    for k in range(1, 5):
        gap = _relative_gap(closed[k], from_traces[k])
        if gap > tolerance:
            raise InconsistencyError(
                "v_{}".format(k), closed[k].tolist(), from_traces[k].tolist(), gap
            )
    return closed, from_traces


def sigma4_residue(v, jbar, jbar_p, lap_sigma2):
    """Residue of sigma_4 at n = 2."""
    return (
        0.75 * v[3]
        + v[1] * v[1] * v[1] / 32.0
        - v[1] * v[2] / 8.0
        + 0.25 * v[1] * jbar
        + 0.25 * jbar_p
        + 0.25 * lap_sigma2
    )


def sigma_coefficients(v, jbar, jbar_p, lap_sigma2, n, upto=4):
    """sigma_2 .. sigma_upto of the normal expansion of the defining density.

    Works on frame arrays and on jets alike. ``v`` is indexable by k; ``jbar``
    and ``jbar_p`` are J of the background and its normal derivative on M;
    ``lap_sigma2`` is the Laplacian of sigma_2 and is only read for sigma_4.
    """
    sigma = {2: v[1] / (2.0 * n)}
    if upto >= 3:
        if n == 1:
            raise PoleError("sigma_3", n)
        sigma[3] = (
            2.0 * v[2] / (3.0 * (n - 1)) - v[1] * v[1] / (3.0 * n) + jbar / (3.0 * (n - 1))
        )
    if upto >= 4:
        if n == 2:
            raise PoleError("sigma_4", n, sigma4_residue(v, jbar, jbar_p, lap_sigma2))
        sigma[4] = (
            3.0 * v[3] / (4.0 * (n - 2))
            - (9.0 * n * n - 20.0 * n + 7.0) / (12.0 * n * (n - 1) * (n - 2)) * v[1] * v[2]
            + (6.0 * n * n - 11.0 * n + 1.0) / (24.0 * n * n * (n - 2)) * v[1] * v[1] * v[1]
            + (2.0 * n - 1.0) / (6.0 * n * (n - 1) * (n - 2)) * v[1] * jbar
            + jbar_p / (4.0 * (n - 2))
            + lap_sigma2 / (4.0 * (n - 2))
        )
    return sigma


def sigma_flat(surface):
    """sigma_2, sigma_3 and (n != 2) sigma_4 for a flat background."""
    n = surface.n
    sigma = {2: surface.H / 2.0, 3: -surface.norm_lo2 / (3.0 * (n - 1))}
    if n != 2:
        sigma[4] = (
            6.0 * surface.tr_lo3
            + (7.0 * n - 11.0) / (n - 1.0) * surface.H * surface.norm_lo2
            + 3.0 * surface.lapH
        ) / (24.0 * (n - 2))
    return sigma


def residue_sigma4(geometry):
    """The residue of sigma_4 at n = 2; a multiple of the obstruction B_2."""
    if geometry.n != 2:
        raise ContractViolation("residue_sigma4", "requires n = 2")
    data = expansion_data(geometry)
    surface, ambient = geometry.surface, geometry.ambient
    return sigma4_residue(data.v, ambient.jbar, ambient.jbar_p, 0.5 * surface.lapH)


def delta_prime(geometry, scalar):
    """First r-derivative of the Laplacian of h_r applied to ``scalar``, closed form."""
    hs, surface = geometry.hypersurface, geometry.surface
    hessian = hs.to_frame(hs.hessian(scalar).value, 2)
    gradient = hs.to_frame(scalar.gradient().value, 1)
    return (
        -2.0 * pair(surface.L, hessian)
        - 2.0 * pair(surface.div_L, gradient)
        + surface.n * pair(surface.dH, gradient)
    )


def divergence_prime(geometry, one_form):
    """First r-derivative of the divergence of h_r applied to ``one_form``, closed form."""
    hs, surface = geometry.hypersurface, geometry.surface
    nabla = hs.to_frame(hs.nabla(one_form).value, 2)
    values = hs.to_frame(one_form.value, 1)
    return (
        -2.0 * pair(surface.L, nabla)
        - 2.0 * pair(surface.div_L, values)
        + surface.n * pair(surface.dH, values)
    )


class ExpansionData(object):
    """Everything the normal expansion produces for one geometry."""

    def __init__(self, n, h, tr_h4, v, v_trace, sigma, jbar, jbar_p, jbar_pp):
        self.n = n
        self.h = h
        self.tr_h4 = tr_h4
        self.v = v
        self.v_trace = v_trace
        self.sigma = sigma
        self.jbar = jbar
        self.jbar_p = jbar_p
        self.jbar_pp = jbar_pp
        self.sc_remainder = None
        self.residue = None

    def as_dict(self):
        result = {
            "h_trace": [trace(h) for h in self.h] + [self.tr_h4],
            "v": self.v[1:],
            "v_trace": self.v_trace[1:],
            "sigma": {str(k): value for k, value in sorted(self.sigma.items())},
            "jbar": [self.jbar, self.jbar_p, self.jbar_pp],
        }
        if self.sc_remainder is not None:
            result["sc_remainder"] = self.sc_remainder
        if self.residue is not None:
            result["residue_sigma4"] = self.residue
        return result


def expansion_data(geometry, tolerance=1e-8):
    """Closed-form expansion data of ``geometry``, computed once and cached."""
    if "expansion" in geometry.cache:
        return geometry.cache["expansion"]
    surface, ambient, n = geometry.surface, geometry.ambient, geometry.n
    with log.timed("normal expansion"):
        h1, h2, h3, tr_h4 = h_coefficients(surface, ambient)
        v, v_trace = volume_coefficients(surface, ambient, tolerance)
        sigma = sigma_coefficients(
            v, ambient.jbar, ambient.jbar_p, 0.5 * surface.lapH, n, upto=min(4, n + 1)
        )
    data = ExpansionData(
        n, [h1, h2, h3], tr_h4, v, v_trace, sigma,
        ambient.jbar, ambient.jbar_p, ambient.jbar_pp,
    )
    if n == 2:
        data.residue = sigma4_residue(v, ambient.jbar, ambient.jbar_p, 0.5 * surface.lapH)
    geometry.cache["expansion"] = data
    return data


def fermi_sigma(geometry):
    """sigma_2 .. sigma_{n+1} as jets on M, from the geodesic normal chart."""
    chart = fermi_chart(geometry)
    n = geometry.n
    v = [None] + [chart.volume_coefficient(k) for k in range(1, n + 1)]
    jbar = chart.jbar_coefficient(0)
    jbar_p = chart.jbar_coefficient(1) if n >= 3 else None
    sigma2 = v[1] / (2.0 * n)
    lap_sigma2 = geometry.hypersurface.laplacian(sigma2) if n >= 3 else None
    return sigma_coefficients(v, jbar, jbar_p, lap_sigma2, n, upto=n + 1)


def sc_remainder_oracle(geometry, tolerance=1e-8):
    """The coefficient of r^{n+1} in S(g, sigma_F), built from the definition.

    sigma_F = r + sigma_2 r^2 + .. + sigma_{n+1} r^{n+1} in the geodesic normal
    chart. The coefficients of r^0 .. r^n of S - 1 must vanish; the next one
    is the oracle value of the obstruction.
    """
    chart = fermi_chart(geometry)
    chart.check_gauss_lemma()
    n = geometry.n
    sigma = fermi_sigma(geometry)
    density = chart.radius
    for k in range(2, n + 2):
        density = density + sigma[k].insert_axis(R_AXIS, k)
    correction = chart.laplacian(density) + density * chart.jbar
    S = chart.gradient_norm(density) - (2.0 / (n + 1)) * density * correction
    remainder = S.coefficient_slice(R_AXIS, n + 1).value
    scale = 1.0 + np.abs(remainder).max()
    for k in range(n + 1):
        coefficient = S.coefficient_slice(R_AXIS, k).value - (1.0 if k == 0 else 0.0)
        worst = float(np.abs(coefficient).max())
        log.debug("S - 1, coefficient of r^{}: {:.3e}".format(k, worst))
        if worst > tolerance * scale:
            raise SeriesConsistencyError(k, worst)
    if "expansion" in geometry.cache:
        geometry.cache["expansion"].sc_remainder = remainder
    return remainder
