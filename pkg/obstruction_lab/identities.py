"""
Catalog of the identities behind the obstruction formulas, each checked
numerically on a geometry.

Every entry evaluates both sides of one identity (sometimes several
displays at once) from the stacks and reports the residual normalised by
the largest participating term. Entries whose terms all vanish report
``vacuous``; entries whose scope does not match the scenario report
``skipped`` with the reason.
"""
from collections import OrderedDict, namedtuple

import numpy as np

from . import obstruction
from .ambient import kulkarni_nomizu
from .exceptions import ObstructionLabError
from .expansion import (
    delta_prime,
    divergence_prime,
    expansion_data,
    fermi_sigma,
    volume_newton,
)
from .fermi import fermi_chart
from .functional import willmore_residual
from .logging import log
from .utils import norm2, pair, trace, worst

Balance = namedtuple("Balance", "lhs rhs terms")

PASS, FAIL, VACUOUS, SKIPPED, INFO = "pass", "fail", "vacuous", "skipped", "info"
VACUOUS_BELOW = 1e-13

CATALOG = OrderedDict()


def balance(lhs, rhs, *terms):
    return Balance(lhs, rhs, terms)


class Identity(object):
    def __init__(self, identity_id, formula, scope, evaluate, informational=False):
        self.identity_id = identity_id
        self.formula = formula
        self.scope = frozenset(scope)
        self.evaluate = evaluate
        self.informational = informational

    def scope_mismatch(self, geometry):
        """Why the identity does not apply, or None."""
        for requirement in sorted(self.scope):
            if requirement in ("n2", "n3"):
                if geometry.n != int(requirement[1]):
                    return "requires n = {}".format(requirement[1])
            elif requirement not in geometry.tags:
                return "requires a {} background".format(requirement.replace("_", " "))
        return None


def identity(identity_id, formula, scope=(), informational=False):
    def register(fn):
        CATALOG[identity_id] = Identity(identity_id, formula, scope, fn, informational)
        return fn

    return register


class IdentityResult(object):
    def __init__(self, identity_id, scenario_id, point, raw, normalized, status, reason=None):
        self.identity_id = identity_id
        self.scenario_id = scenario_id
        self.point = point
        self.raw = raw
        self.normalized = normalized
        self.status = status
        self.reason = reason

    def as_dict(self):
        return {
            "identity": self.identity_id,
            "scenario": self.scenario_id,
            "point": self.point,
            "raw_residual": self.raw,
            "normalized_residual": self.normalized,
            "status": self.status,
            "reason": self.reason,
        }


def _measure(balances, batch):
    raw = np.zeros(batch)
    normalized = np.zeros(batch)
    magnitude = np.zeros(batch)
    for item in balances:
        lhs = np.asarray(item.lhs, dtype=float)
        rhs = np.broadcast_to(np.asarray(item.rhs, dtype=float), lhs.shape)
        difference = worst(lhs - rhs, batch)
        scale = np.maximum(worst(lhs, batch), worst(rhs, batch))
        for term in item.terms:
            scale = np.maximum(scale, worst(term, batch))
        raw = np.maximum(raw, difference)
        normalized = np.maximum(normalized, difference / (1.0 + scale))
        magnitude = np.maximum(magnitude, scale)
    return raw, normalized, magnitude


def run_identity(identity_id, geometry, tolerance=1e-8):
    """Per-point results of one catalog entry on ``geometry``."""
    entry = CATALOG[identity_id]
    points = geometry.points.tolist()
    reason = entry.scope_mismatch(geometry)
    if reason is not None:
        return [
            IdentityResult(identity_id, geometry.scenario_id, point, None, None, SKIPPED, reason)
            for point in points
        ]
    with log.timed(identity_id):
        balances = entry.evaluate(geometry)
    raw, normalized, magnitude = _measure(balances, geometry.batch)
    results = []
    for index, point in enumerate(points):
        if entry.informational:
            status = INFO
        elif magnitude[index] < VACUOUS_BELOW:
            status = VACUOUS
        elif normalized[index] <= tolerance:
            status = PASS
        else:
            status = FAIL
        results.append(
            IdentityResult(
                identity_id,
                geometry.scenario_id,
                point,
                float(raw[index]),
                float(normalized[index]),
                status,
            )
        )
    return results


class IdentityReport(object):
    def __init__(self, results, tolerance):
        self.results = results
        self.tolerance = tolerance

    def count(self, status):
        return sum(1 for result in self.results if result.status == status)

    @property
    def failed(self):
        return [result for result in self.results if result.status == FAIL]

    @property
    def passed(self):
        return not self.failed

    def summary(self):
        return OrderedDict(
            (status, self.count(status)) for status in (PASS, FAIL, VACUOUS, SKIPPED, INFO)
        )

    def as_dict(self):
        return {
            "tolerance": self.tolerance,
            "summary": self.summary(),
            "results": [result.as_dict() for result in self.results],
            "passed": self.passed,
        }


def run_suite(geometries, identity_ids=None, tolerance=1e-8):
    """Run the catalog (or a selection) over every geometry.

    An entry that cannot be evaluated on a geometry is recorded as failed
    with the error message, and the suite carries on.
    """
    identity_ids = list(identity_ids or CATALOG)
    results = []
    for geometry in geometries:
        for identity_id in identity_ids:
            try:
                results.extend(run_identity(identity_id, geometry, tolerance))
            except ObstructionLabError as error:
                log.warning("{} on {}: {}".format(identity_id, geometry.scenario_id, error))
                results.extend(
                    IdentityResult(
                        identity_id, geometry.scenario_id, point, None, None, FAIL, str(error)
                    )
                    for point in geometry.points.tolist()
                )
    return IdentityReport(results, tolerance)


def _eye(geometry):
    return np.eye(geometry.n)[..., None]


def _pbar(a):
    return a.schouten[1:, 1:]


def _ric_tan(a):
    return a.ricci[1:, 1:]


def _nabla_weyl_tan(a):
    """nabla-bar_k W_ikj0 over tangential frame indices, stored [k, i, k', j]."""
    return a.nabla_weyl[1:, 1:, 1:, 1:, 0]


# second fundamental form and its derivatives


@identity("codazzi", "nabla_j L_ik - nabla_i L_jk = R_ijk0")
def _codazzi(g):
    s, a = g.surface, g.ambient
    return [balance(np.swapaxes(s.grad_L, 0, 1) - s.grad_L, a.riemann[1:, 1:, 1:, 0], s.grad_L)]


@identity(
    "cm_tracefree",
    "nabla_i lo_kj - nabla_k lo_ij - (delta(lo)_k h_ij - delta(lo)_i h_kj) / (n-1) = W_kij0",
)
def _cm_tracefree(g):
    s, a = g.surface, g.ambient
    n, eye = g.n, _eye(g)
    gl, div = s.grad_lo, s.div_lo
    lhs = (
        np.einsum("ikj...->kij...", gl)
        - gl
        - (np.einsum("k...,ij...->kij...", div, eye) - np.einsum("i...,kj...->kij...", div, eye))
        / (n - 1.0)
    )
    return [balance(lhs, a.W0, gl)]


@identity("id_basic", "dd(lo^2) = 2 lo_jk nabla^j delta(lo)^k + |nabla lo|^2 + |delta lo|^2/2 "
          "- |W_0|^2/2 + kappa_1", scope=("n3",))
def _id_basic(g):
    s, a = g.surface, g.ambient
    first = 2.0 * np.einsum("jk...,jk...->...", s.lo, s.grad_div_lo)
    rhs = first + s.norm_grad_lo + 0.5 * norm2(s.div_lo) - 0.5 * norm2(a.W0) + s.kappa1
    return [balance(s.divdiv_lo2, rhs, first, s.norm_grad_lo, s.kappa1)]


@identity("kappa1", "kappa_1 = 3 (lo^2, P) + J |lo|^2", scope=("n3",))
def _kappa1(g):
    s = g.surface
    return [balance(s.kappa1, 3.0 * pair(s.lo2, s.P) + s.J * s.norm_lo2)]


@identity("kappa1_flat", "kappa_1 = 3H tr(L^3) - |L|^4", scope=("n3", "flat"))
def _kappa1_flat(g):
    s = g.surface
    return [balance(s.kappa1, 3.0 * s.H * s.tr_L3 - s.norm_L2 ** 2, s.tr_L3)]


@identity("diff_simple", "kappa_1 - kappa_2 = lo^ij nabla^k W_kij0", scope=("n3",))
def _diff_simple(g):
    s = g.surface
    return [balance(s.kappa1 - s.kappa2, pair(s.lo, s.div_W_0), s.kappa1, s.kappa2)]


@identity("laplace_L", "(lo, Delta lo) = 3(lo, Hess H) + kappa_1 + 3(lo, nabla P_0) "
          "- lo^ij nabla^k W_kij0", scope=("n3",))
def _laplace_L(g):
    s = g.surface
    rhs = (
        3.0 * pair(s.lo, s.hessH)
        + 3.0 * pair(s.lo2, s.P)
        + s.J * s.norm_lo2
        + 3.0 * pair(s.lo, s.grad_p0)
        - pair(s.lo, s.div_W_0)
    )
    return [balance(pair(s.lo, s.lap_lo), rhs, s.hessH)]


@identity("pre_simons", "nabla_k nabla_l L_ij = nabla_i nabla_j L_kl - nabla_i R_kjl0 "
          "- nabla_k R_lij0 + R_ki^m_l L_mj + R_ki^m_j L_lm")
def _pre_simons(g):
    s = g.surface
    g2, gR0, R, L = s.grad2_L, s.grad_R0, s.riemann, s.L
    rhs = (
        np.einsum("ijkl...->klij...", g2)
        - np.einsum("ikjl...->klij...", gR0)
        - gR0
        + np.einsum("kiml...,mj...->klij...", R, L)
        + np.einsum("kimj...,lm...->klij...", R, L)
    )
    return [balance(g2, rhs, gR0)]


@identity("pre_simons_trace", "Delta L_ij = n Hess_ij(H) - nabla^k R_kij0 + nabla_i(Ric_0)_j "
          "+ R_ik^k_m L_j^m - R_kijm L^km")
def _pre_simons_trace(g):
    s = g.surface
    R, L = s.riemann, s.L
    rhs = (
        g.n * s.hessH
        - np.einsum("kkij...->ij...", s.grad_R0)
        + s.grad_ric0
        + np.einsum("ikkm...,jm...->ij...", R, L)
        - np.einsum("kijm...,km...->ij...", R, L)
    )
    return [balance(s.lap_L, rhs, s.hessH, s.grad_ric0)]


def _simons_rhs(g, curved=True):
    s, a = g.surface, g.ambient
    L, L2 = s.L, s.L2
    quadratic = (
        np.einsum("ij...,kl...->ijkl...", L, L2)
        - np.einsum("kl...,ij...->ijkl...", L, L2)
        + np.einsum("il...,jk...->ijkl...", L, L2)
        - np.einsum("jk...,il...->ijkl...", L, L2)
    )
    rhs = np.einsum("klij...->ijkl...", s.grad2_L) + quadratic
    if not curved:
        return rhs
    Rt, G = a.riemann[1:, 1:, 1:, 1:], a.G_normal
    Nt = a.nabla_riemann[1:, 1:, 1:, 1:, 0]
    return (
        rhs
        - np.einsum("im...,jklm...->ijkl...", L, Rt)
        - np.einsum("jm...,iklm...->ijkl...", L, Rt)
        + np.einsum("km...,lijm...->ijkl...", L, Rt)
        + np.einsum("lm...,kijm...->ijkl...", L, Rt)
        + np.einsum("ij...,kl...->ijkl...", L, G)
        - np.einsum("kl...,ij...->ijkl...", L, G)
        + np.einsum("ikjl...->ijkl...", Nt)
        + np.einsum("klij...->ijkl...", Nt)
    )


@identity("simons_full", "nabla_i nabla_j L_kl = nabla_k nabla_l L_ij + quadratic L terms "
          "+ curvature terms")
def _simons_full(g):
    return [balance(g.surface.grad2_L, _simons_rhs(g), g.surface.grad2_L)]


@identity("simons_trace", "Delta L = n Hess H + nH L^2 - |L|^2 L + curvature terms")
def _simons_trace(g):
    s, a = g.surface, g.ambient
    L, n = s.L, g.n
    Rt, G = a.riemann[1:, 1:, 1:, 1:], a.G_normal
    Nt = a.nabla_riemann[1:, 1:, 1:, 1:, 0]
    rhs = (
        n * s.hessH
        + n * s.H * s.L2
        - s.norm_L2 * L
        + np.einsum("sj...,ikks...->ij...", L, Rt)
        + np.einsum("is...,jkks...->ij...", L, Rt)
        - 2.0 * np.einsum("rs...,rijs...->ij...", L, Rt)
        + n * s.H * G
        - L * a.ric00
        + np.einsum("kikj...->ij...", Nt)
        + np.einsum("ijkk...->ij...", Nt)
    )
    return [balance(s.lap_L, rhs, s.hessH, s.L2)]


@identity("simons_flat", "flat Simons identities for nabla nabla L, Delta L and Delta |L|^2 / 2",
          scope=("flat",))
def _simons_flat(g):
    s, n = g.surface, g.n
    return [
        balance(s.grad2_L, _simons_rhs(g, curved=False), s.grad2_L),
        balance(s.lap_L, n * s.hessH + n * s.H * s.L2 - s.norm_L2 * s.L, s.hessH),
        balance(
            0.5 * s.lap_normL2,
            n * pair(s.L, s.hessH) + s.norm_grad_L + n * s.H * s.tr_L3 - s.norm_L2 ** 2,
            s.norm_grad_L,
        ),
    ]


# divergences of lo and lo^2


def _new3a(g, weyl_sign):
    s, a = g.surface, g.ambient
    rhs = (
        2.0 / 3.0 * pair(s.lo, s.lap_lo)
        + s.norm_grad_lo / 3.0
        + 0.5 * norm2(s.div_lo)
        - 2.0 / 3.0 * s.J * s.norm_lo2
        + 4.0 / 3.0 * pair(s.lo, s.div_W_0)
        + weyl_sign * 0.5 * norm2(a.W0)
    )
    return [balance(s.lop_lo2_tf, rhs, s.norm_grad_lo, s.divdiv_lo2)]


@identity("new3a", "LOP(lo^2 tf) = 2/3 (lo, Delta lo) + 1/3 |nabla lo|^2 + 1/2 |delta lo|^2 "
          "- 2/3 J |lo|^2 + 4/3 lo^ij nabla^k W_kij0 - 1/2 |W_0|^2", scope=("n3",))
def _new3a_main(g):
    return _new3a(g, -1.0)


@identity("new3a_alt", "as new3a with + 1/2 |W_0|^2", scope=("n3",), informational=True)
def _new3a_alt(g):
    return _new3a(g, 1.0)


@identity("diff_key", "Delta |lo|^2 - 2 dd(lo^2) = -2(lo, Hess H) - 2(lo, nabla P_0) - |delta lo|^2 "
          "- 2 lo^ij nabla^k W_kij0 + |W_0|^2", scope=("n3",))
def _diff_key(g):
    s, a = g.surface, g.ambient
    rhs = (
        -2.0 * pair(s.lo, s.hessH)
        - 2.0 * pair(s.lo, s.grad_p0)
        - norm2(s.div_lo)
        - 2.0 * pair(s.lo, s.div_W_0)
        + norm2(a.W0)
    )
    return [balance(s.lap_normlo2 - 2.0 * s.divdiv_lo2, rhs, s.lap_normlo2, s.divdiv_lo2)]


@identity("basic_div", "Delta |lo|^2 / 2 - dd(lo^2) = -(lo, Hess H) - 2 |dH|^2",
          scope=("n3", "flat"))
def _basic_div(g):
    s = g.surface
    return [
        balance(
            0.5 * s.lap_normlo2 - s.divdiv_lo2,
            -pair(s.lo, s.hessH) - 2.0 * norm2(s.dH),
            s.lap_normlo2,
            s.divdiv_lo2,
        )
    ]


@identity("dd_flat", "dd(H lo) = (lo, Hess H) + 4 |dH|^2 + 2 H Delta H", scope=("n3", "flat"))
def _dd_flat(g):
    s = g.surface
    rhs = pair(s.lo, s.hessH) + 4.0 * norm2(s.dH) + 2.0 * s.H * s.lapH
    return [balance(s.divdiv_Hlo, rhs, s.lapH)]


@identity("surprise_flat", "Delta |lo|^2 - 2 dd(lo^2) + 2 dd(H lo) - 2 Delta H^2 = 0",
          scope=("n3", "flat"))
def _surprise_flat(g):
    s = g.surface
    lhs = s.lap_normlo2 - 2.0 * s.divdiv_lo2 + 2.0 * s.divdiv_Hlo - 2.0 * s.lap_H2
    return [balance(lhs, np.zeros_like(lhs), s.lap_normlo2, s.divdiv_lo2, s.lap_H2)]


@identity("deldel2", "dd(H lo) = (lo, Hess H) + 2(dH, delta lo) + H dd(lo)")
def _deldel2(g):
    s = g.surface
    rhs = pair(s.lo, s.hessH) + 2.0 * pair(s.dH, s.div_lo) + s.H * s.divdiv_lo
    return [balance(s.divdiv_Hlo, rhs, s.hessH)]


@identity("trace_id", "|lo|^4 = 2 tr(lo^4)", scope=("n3",))
def _trace_id(g):
    s = g.surface
    return [balance(s.norm_lo2 ** 2, 2.0 * s.tr_lo4)]


# background curvature along the hypersurface


@identity("gauss_ambient", "scal-bar - scal = 2 Ric_00 + |L|^2 - n^2 H^2")
def _gauss_ambient(g):
    s, a = g.surface, g.ambient
    rhs = 2.0 * a.ric00 + s.norm_L2 - g.n ** 2 * s.H * s.H
    return [balance(a.scal - s.scal, rhs, a.scal, s.scal)]


@identity("gauss_J", "J-bar - P_00 - J = |lo|^2 / 4 - 3/2 H^2", scope=("n3",))
def _gauss_J(g):
    s, a = g.surface, g.ambient
    return [balance(a.jbar - a.p00 - s.J, 0.25 * s.norm_lo2 - 1.5 * s.H * s.H, a.jbar, s.J)]


@identity("g_decomposition", "G_ij = P_ij + P_00 h_ij + W_0ij0")
def _g_decomposition(g):
    a = g.ambient
    rhs = _pbar(a) + a.p00 * _eye(g) + a.W_hat
    return [balance(a.G_normal, rhs, _pbar(a))]


@identity("kn_intrinsic", "R + P (KN) h = 0 on a three-manifold", scope=("n3",))
def _kn_intrinsic(g):
    s = g.surface
    return [balance(s.riemann + kulkarni_nomizu(s.P, s.h), np.zeros_like(s.riemann), s.riemann)]


@identity("fialkov", "F = iota*P - P + H lo + H^2 h / 2 = lo^2 - |lo|^2 h / 4 + W", scope=("n3",))
def _fialkov(g):
    s, a = g.surface, g.ambient
    rhs = s.lo2 - 0.25 * s.norm_lo2 * _eye(g) + a.W_hat
    return [balance(s.fialkov, rhs, s.lo2)]


@identity("bianchi_contracted", "2 nabla^a Ric_ab = d scal_b")
def _bianchi_contracted(g):
    a = g.ambient
    lhs = 2.0 * np.einsum("aab...->b...", a.nabla_ricci)
    return [balance(lhs, a.d_scal, a.d_scal)]


@identity("bianchi_r0", "nabla_0 Ric_00 - scal' / 2 = -delta(Ric_0) - nH Ric_00 + (L, Ric)")
def _bianchi_r0(g):
    s, a = g.surface, g.ambient
    rhs = -s.div_ric0 - g.n * s.H * a.ric00 + pair(s.L, _ric_tan(a))
    return [balance(a.d0_ric00 - 0.5 * a.scal_p, rhs, a.d0_ric00, a.scal_p)]


@identity("nabla2G", "nabla_0^2 G_00 in tangential and first normal derivatives", scope=("n3",))
def _nabla2G(g):
    s, a = g.surface, g.ambient
    H, R, ric = s.H, a.ric00, _ric_tan(a)
    rhs = (
        -4.0 * H * a.d0_ric00
        + H * a.scal_p
        + 2.0 * pair(s.lo, s.grad_ric0)
        - s.div_d0_ric0
        + pair(s.lo, a.nabla_ricci[0, 1:, 1:])
        + H * s.div_ric0
        - 2.0 * pair(s.dH, a.ric0)
        + 2.0 * pair(s.div_lo, a.ric0)
        - s.div_lo_ric0
        + s.norm_L2 * R
        - pair(s.L2, ric)
        + R * R
        - pair(a.G_normal, ric)
    )
    return [balance(a.d0d0_ric00 - 0.5 * a.scal_pp, rhs, a.d0d0_ric00, s.div_d0_ric0)]


@identity("del_nabla", "delta(nabla_0 Ric_0) = Delta scal / 2 - n delta(H Ric_0) "
          "- delta((L Ric)_0) - dd(Ric)")
def _del_nabla(g):
    s = g.surface
    rhs = 0.5 * s.lap_scal_bar - g.n * s.div_H_ric0 - s.div_L_ric0 - s.divdiv_ric_bar
    return [balance(s.div_d0_ric0, rhs, s.lap_scal_bar, s.divdiv_ric_bar)]


@identity("deldel", "dd(Ric) = 2 Delta J + Delta J-bar - Delta H^2 - 2 dd(H lo) + 2 dd(lo^2) "
          "- Delta |lo|^2 / 2 + 2 dd(W)", scope=("n3",))
def _deldel(g):
    s = g.surface
    rhs = (
        2.0 * s.lap_J
        + s.lap_jbar
        - s.lap_H2
        - 2.0 * s.divdiv_Hlo
        + 2.0 * s.divdiv_lo2
        - 0.5 * s.lap_normlo2
        + 2.0 * s.divdiv_W
    )
    return [balance(s.divdiv_ric_bar, rhs, s.lap_J, s.divdiv_lo2)]


@identity("surprise", "delta(nabla_0 Ric_0) = 2 Delta P_00 + Delta |lo|^2 - 2 Delta H^2 "
          "- 3 delta(H Ric_0) - delta((L Ric)_0) + 2 dd(H lo) - 2 dd(lo^2) - 2 dd(W)",
          scope=("n3",))
def _surprise(g):
    s = g.surface
    rhs = (
        2.0 * s.lap_p00
        + s.lap_normlo2
        - 2.0 * s.lap_H2
        - 3.0 * s.div_H_ric0
        - s.div_L_ric0
        + 2.0 * s.divdiv_Hlo
        - 2.0 * s.divdiv_lo2
        - 2.0 * s.divdiv_W
    )
    return [balance(s.div_d0_ric0, rhs, s.lap_normlo2, s.divdiv_lo2)]


@identity("surp2_einstein", "-2 lo^ij nabla^k W_kij0 + |W_0|^2 - 2 dd(W) = 0",
          scope=("n3", "einstein"))
def _surp2_einstein(g):
    s, a = g.surface, g.ambient
    lhs = -2.0 * pair(s.lo, s.div_W_0) + norm2(a.W0) - 2.0 * s.divdiv_W
    return [balance(lhs, np.zeros_like(lhs), s.divdiv_W, norm2(a.W0))]


@identity("van_term", "-Ric_00^2 - (G, Ric) + 2|G|^2 + 2 Ric_00 J = 2(P, W) + 2|W|^2",
          scope=("n3",))
def _van_term(g):
    a = g.ambient
    G, R = a.G_normal, a.ric00
    lhs = -R * R - pair(G, _ric_tan(a)) + 2.0 * norm2(G) + 2.0 * R * a.jbar
    rhs = 2.0 * pair(_pbar(a), a.W_hat) + 2.0 * norm2(a.W_hat)
    return [balance(lhs, rhs, norm2(G), R * R)]


@identity("help2", "|L|^2 Ric_00 - (L^2, Ric) and (L, Ric) through lo", scope=("n3",))
def _help2(g):
    s, a = g.surface, g.ambient
    H, R, ric = s.H, a.ric00, _ric_tan(a)
    first = (
        s.norm_lo2 * R
        - pair(s.lo2, ric)
        - 2.0 * H * pair(s.lo, ric)
        + 4.0 * H * H * R
        - 6.0 * H * H * a.jbar
    )
    second = pair(s.lo, ric) + 6.0 * H * a.jbar - H * R
    return [
        balance(s.norm_L2 * R - pair(s.L2, ric), first, s.norm_L2 * R),
        balance(pair(s.L, ric), second, pair(s.L, ric)),
    ]


@identity("fh", "6(lo^2, P) - 2|lo|^2 J = 6H tr lo^3 - |lo|^4 + 6(lo^2, P-bar) "
          "- 2|lo|^2 J-bar + 2|lo|^2 P_00 - 6(lo^2, W)", scope=("n3",))
def _fh(g):
    s, a = g.surface, g.ambient
    lhs = 6.0 * pair(s.lo2, s.P) - 2.0 * s.norm_lo2 * s.J
    rhs = (
        6.0 * s.H * s.tr_lo3
        - s.norm_lo2 ** 2
        + 6.0 * pair(s.lo2, _pbar(a))
        - 2.0 * s.norm_lo2 * a.jbar
        + 2.0 * s.norm_lo2 * a.p00
        - 6.0 * pair(s.lo2, a.W_hat)
    )
    return [balance(lhs, rhs, s.tr_lo3)]


@identity("hl1", "(lo, nabla_0 Ric) + 2 lo^ij nabla_0 W_0ij0 = 2 lo^ij nabla_0 R_0ij0, "
          "(lo, Ric) + 2(lo, W) = 2(lo, G)", scope=("n3",))
def _hl1(g):
    s, a = g.surface, g.ambient
    return [
        balance(
            pair(s.lo, a.nabla_ricci[0, 1:, 1:]) + 2.0 * pair(s.lo, a.d0_W_0ij0),
            2.0 * pair(s.lo, a.d0_R_0ij0),
            pair(s.lo, a.d0_R_0ij0),
        ),
        balance(
            pair(s.lo, _ric_tan(a)) + 2.0 * pair(s.lo, a.W_hat),
            2.0 * pair(s.lo, a.G_normal),
            pair(s.lo, a.G_normal),
        ),
    ]


@identity("lw_t", "lo^ij nabla-bar^k W_ikj0 = lo^ij nabla^k W_ikj0 + (lo^2, W) - nH (lo, W) "
          "+ lo^ij lo^kl W_kijl")
def _lw_t(g):
    s, a = g.surface, g.ambient
    lhs = np.einsum("ij...,kikj...->...", s.lo, _nabla_weyl_tan(a))
    intrinsic = np.einsum("ij...,kikj...->...", s.lo, s.grad_W0)
    rhs = (
        intrinsic
        + pair(s.lo2, a.W_hat)
        - g.n * s.H * pair(s.lo, a.W_hat)
        + obstruction.weyl_quadratic(s, a)
    )
    return [balance(lhs, rhs, intrinsic)]


@identity("bach_deco", "(lo, B) = lo^ij nabla_0 W_0ij0 + 2H(lo, W) - 2 lo^ij nabla^k W_jki0 "
          "- (lo^2, W) - lo^ij lo^kl W_kijl", scope=("n3",))
def _bach_deco(g):
    s, a = g.surface, g.ambient
    bach = obstruction.bach_tensor(g)
    rhs = (
        pair(s.lo, a.d0_W_0ij0)
        + 2.0 * s.H * pair(s.lo, a.W_hat)
        - 2.0 * pair(s.lo, obstruction.weyl_divergence(s))
        - pair(s.lo2, a.W_hat)
        - obstruction.weyl_quadratic(s, a)
    )
    return [balance(pair(s.lo, bach), rhs, pair(s.lo, a.cotton0))]


@identity("weyl_contraction", "lo^ab lo^cd W_cabd = 2 (lo^2, W) in a four-dimensional background",
          scope=("n3",))
def _weyl_contraction(g):
    # tangential W is fixed by W_0ij0 once the ambient Weyl tensor is trace-free
    s, a = g.surface, g.ambient
    return [balance(obstruction.weyl_quadratic(s, a), 2.0 * pair(s.lo2, a.W_hat))]


@identity("star_equiv","star = 2 LOP(W) - 2 lo^ij nabla_0 W_0ij0 - 4 lo^ij nabla^k W_kij0 "
          "- 4H(lo, W) + 16(lo^2, W) + 4|W|^2 + 2|W_0|^2", scope=("n3",))
def _star_equiv(g):
    s, a = g.surface, g.ambient
    rhs = (
        2.0 * s.lop_W
        - 2.0 * pair(s.lo, a.d0_W_0ij0)
        - 4.0 * pair(s.lo, s.div_W_0)
        - 4.0 * s.H * pair(s.lo, a.W_hat)
        + 16.0 * pair(s.lo2, a.W_hat)
        + 4.0 * norm2(a.W_hat)
        + 2.0 * norm2(a.W0)
    )
    return [balance(obstruction.star_terms(g), rhs, s.lop_W)]


# normal expansion


@identity("h_coefficients", "h_(1) = 2L, h_(2) = L^2 - G, h_(3) = (-nabla_0 R_0ij0 - 2(LG + GL)) / 3")
def _h_coefficients(g):
    chart, data = fermi_chart(g), expansion_data(g)
    hs = g.hypersurface
    return [
        balance(hs.to_frame(chart.h_coefficient(k).value, 2), data.h[k - 1], data.h[k - 1])
        for k in (1, 2, 3)
    ]


@identity("trace_h4", "tr h_(4) = (-nabla_0^2 Ric_00 - 6(L, nabla_0 R_0..0) - 4(L^2, G) "
          "+ 4|G|^2) / 12")
def _trace_h4(g):
    chart, data = fermi_chart(g), expansion_data(g)
    chart_trace = trace(g.hypersurface.to_frame(chart.h_coefficient(4).value, 2))
    return [balance(chart_trace, data.tr_h4, data.tr_h4)]


@identity("volume_chart", "v_k from the closed forms = v_k from the geodesic normal chart")
def _volume_chart(g):
    chart, data = fermi_chart(g), expansion_data(g)
    return [
        balance(chart.volume_coefficient(k).value, data.v[k], data.v[k]) for k in range(1, 5)
    ]


@identity("volume_flat", "v_k = sigma_k(L)", scope=("flat",))
def _volume_flat(g):
    data, newton = expansion_data(g), volume_newton(g.surface)
    return [balance(data.v[k], newton[k], newton[k]) for k in range(1, 5)]


@identity("trace_vol", "v'/v = tr(h_r^-1 h_r') / 2 and the Gauss lemma")
def _trace_vol(g):
    chart = fermi_chart(g)
    ones = np.ones(g.batch)
    return [
        balance(np.full(g.batch, chart.trace_volume_residual()), 0.0, ones),
        balance(np.full(g.batch, chart.gauss_lemma_residual()), 0.0, ones),
    ]


@identity("jbar_normal", "J-bar' and J-bar'' along the normal geodesic")
def _jbar_normal(g):
    chart, a = fermi_chart(g), g.ambient
    first = chart.jbar_coefficient(1).value
    second = 2.0 * chart.jbar_coefficient(2).value
    return [balance(a.jbar_p, first, a.jbar), balance(a.jbar_pp, second, a.jbar)]


@identity("delta_prime", "Delta'(u) = -2(L, Hess u) - 2(delta L, du) + n(dH, du), same for delta'")
def _delta_prime(g):
    chart, hs = fermi_chart(g), g.hypersurface
    one_form = hs.divergence(hs.lo)
    return [
        balance(delta_prime(g, hs.H), chart.delta_prime(hs.H).value, g.surface.hessH),
        balance(
            divergence_prime(g, one_form),
            chart.divergence_prime(one_form).value,
            g.surface.div_lo,
        ),
    ]


@identity("last_line", "-Delta sigma_3 / 2 - v_1 Delta sigma_2 / 3 - Delta' sigma_2 / 2 "
          "+ |d sigma_2|^2 in closed form", scope=("n3",))
def _last_line(g):
    s, a = g.surface, g.ambient
    chart, hs = fermi_chart(g), g.hypersurface
    sigma = fermi_sigma(g)
    v1 = chart.volume_coefficient(1).value
    d_sigma2 = hs.to_frame(sigma[2].gradient().value, 1)
    lhs = (
        -0.5 * hs.laplacian(sigma[3]).value
        - v1 * hs.laplacian(sigma[2]).value / 3.0
        - 0.5 * chart.delta_prime(sigma[2]).value
        + norm2(d_sigma2)
    )
    rhs = (
        s.lap_normlo2 / 12.0
        + 0.5 * pair(s.lo, s.hessH)
        + s.lap_p00 / 6.0
        + 0.5 * pair(s.dH, a.ric0)
        + norm2(s.dH)
    )
    return [balance(lhs, rhs, s.lap_normlo2)]


@identity("residue_n2", "residue of sigma_4 at n = 2 equals -3/8 B_2", scope=("n2",))
def _residue_n2(g):
    data = expansion_data(g)
    b2 = obstruction.compute(g, "b2_bianchi")
    return [balance(data.residue, -0.375 * b2, b2)]


@identity("willmore_b2", "B_2 = -(Delta H + 2H(H^2 - K)) / 3", scope=("n2", "flat"))
def _willmore_b2(g):
    willmore = willmore_residual(g)
    b2 = obstruction.compute(g, "b2_flat")
    return [balance(b2, -willmore / 3.0, willmore)]


@identity("umbilic", "6 B_3 = LOP(W) + 2|W|^2 + |W_0|^2 on an umbilic hypersurface",
          scope=("n3", "umbilic"))
def _umbilic(g):
    s, a = g.surface, g.ambient
    rhs = s.lop_W + 2.0 * norm2(a.W_hat) + norm2(a.W0)
    return [balance(6.0 * obstruction.compute(g, "b3_oracle"), rhs, s.lop_W)]


@identity("origin_cf", "3 LOP(lo^2 tf) = Delta|lo|^2 - |nabla lo|^2 + 3/2 |delta lo|^2 - 2J|lo|^2",
          scope=("n3", "conformally_flat"))
def _origin_cf(g):
    s = g.surface
    rhs = s.lap_normlo2 - s.norm_grad_lo + 1.5 * norm2(s.div_lo) - 2.0 * s.J * s.norm_lo2
    return [balance(3.0 * s.lop_lo2_tf, rhs, s.lap_normlo2, s.norm_grad_lo)]