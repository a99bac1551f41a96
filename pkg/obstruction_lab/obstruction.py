"""
The singular Yamabe obstruction of surfaces (B_2) and of hypersurfaces of
four-manifolds (B_3), by every route the library knows.

Each formula id names one closed form. They are evaluated from the stacks of
one :class:`~obstruction_lab.hypersurface.Geometry` and compared pairwise in
an :class:`ObstructionReport`. The ``*_oracle`` ids read the value off the
defining-density expansion instead.
"""
from collections import OrderedDict

import numpy as np

from .exceptions import ContractViolation
from .expansion import expansion_data, sc_remainder_oracle
from .hypersurface import build_surface_stack
from .logging import log
from .utils import norm2, pair, within

FORMULAS = OrderedDict()


class Formula(object):
    def __init__(self, formula_id, n, requires, evaluate, description, compare=True):
        self.formula_id = formula_id
        self.compare = compare
        self.n = n
        self.requires = frozenset(requires)
        self.evaluate = evaluate
        self.description = description

    def applies_to(self, geometry):
        return geometry.n == self.n and self.requires <= geometry.tags

    def check_scope(self, geometry):
        if geometry.n != self.n:
            raise ContractViolation(
                self.formula_id,
                "defined for n = {}, hypersurface has n = {}".format(self.n, geometry.n),
            )
        missing = self.requires - geometry.tags
        if missing:
            raise ContractViolation(
                self.formula_id,
                "scenario {} is not {}".format(
                    geometry.scenario_id, ", ".join(sorted(missing))
                ),
            )


def formula(formula_id, n, description, requires=(), compare=True):
    def register(fn):
        FORMULAS[formula_id] = Formula(formula_id, n, requires, fn, description, compare)
        return fn

    return register


def _tangential(tensor):
    return tensor[1:, 1:]


def _pbar(ambient):
    """The tangential block of the background Schouten tensor."""
    return _tangential(ambient.schouten)


def _flat_terms(s):
    """Delta |lo|^2 + 6 (lo, Hess H) + 6 H tr lo^3 + |lo|^4 + 12 |dH|^2."""
    return (
        s.lap_normlo2
        + 6.0 * pair(s.lo, s.hessH)
        + 6.0 * s.H * s.tr_lo3
        + s.norm_lo2 ** 2
        + 12.0 * norm2(s.dH)
    )


def weyl_quadratic(s, a):
    """lo^{ab} lo^{cd} W_cabd over tangential frame indices."""
    return np.einsum("ab...,cd...,cabd...->...", s.lo, s.lo, a.weyl[1:, 1:, 1:, 1:])


def weyl_divergence(s):
    """nabla^k W_jki0 as [j, i]; the Bach-type divergence of W_0."""
    return np.einsum("kjki...->ji...", s.grad_W0)


def bach_tensor(geometry):
    """B_ij = C_0(ij) - H W_ij + nabla^k W_0(ij)k on a hypersurface of a 4-manifold."""
    if geometry.n != 3:
        raise ContractViolation("bach_tensor", "requires n = 3")
    s, a = geometry.surface, geometry.ambient
    divergence = -np.einsum("kjki...->ij...", s.grad_W0)
    symmetric = 0.5 * (divergence + np.swapaxes(divergence, 0, 1))
    return a.cotton0 - s.H * a.W_hat + symmetric


def star_terms(geometry):
    """The curvature terms that complete 6 LOP(lo^2 tf) + 2 |lo|^4 to 12 B_3."""
    s, a = geometry.surface, geometry.ambient
    return (
        2.0 * s.lop_W
        + 4.0 * norm2(a.W_hat)
        + 2.0 * norm2(a.W0)
        - 2.0 * pair(s.lo, bach_tensor(geometry))
        + 14.0 * pair(s.lo2, a.W_hat)
        - 2.0 * weyl_quadratic(s, a)
    )


def lop(geometry, b):
    """LOP(b) = delta delta(b) + (P, b) at the points, for a trace-free symmetric jet b."""
    return geometry.hypersurface.lop(b).value


# B_2


@formula("b2_volume", 2, "-2v_3 - v_1^3/12 + v_1 v_2/3 - 2/3 (Delta sigma_2 + v_1 J + J')")
def b2_volume(geometry):
    data = expansion_data(geometry)
    v = data.v
    lap_sigma2 = 0.5 * geometry.surface.lapH
    return (
        -2.0 * v[3]
        - v[1] ** 3 / 12.0
        + v[1] * v[2] / 3.0
        - 2.0 / 3.0 * (lap_sigma2 + v[1] * data.jbar + data.jbar_p)
    )


@formula("b2_normal", 2, "normal derivatives of the background Ricci and scalar curvature")
def b2_normal(geometry):
    s, a = geometry.surface, geometry.ambient
    return (
        (a.d0_ric00 / 3.0 - a.scal_p / 6.0)
        - s.H * a.scal / 3.0
        + s.H * a.ric00
        - 2.0 / 3.0 * pair(s.lo, a.G_normal)
        - s.lapH / 3.0
        - s.H * s.norm_lo2 / 3.0
    )


@formula("b2_bianchi", 2, "-(Delta H + H |lo|^2 + delta(P_0) + (lo, P)) / 3")
def b2_bianchi(geometry):
    s, a = geometry.surface, geometry.ambient
    return -(s.lapH + s.H * s.norm_lo2 + s.div_p0 + pair(s.lo, _pbar(a))) / 3.0


@formula("b2_acf", 2, "-(delta delta(lo) + H |lo|^2 + (lo, P)) / 3")
def b2_acf(geometry):
    s, a = geometry.surface, geometry.ambient
    return -(s.divdiv_lo + s.H * s.norm_lo2 + pair(s.lo, _pbar(a))) / 3.0


@formula("b2_flat", 2, "-(H |lo|^2 + Delta H) / 3 - 2/3 tr lo^3", requires=("flat",))
def b2_flat(geometry):
    s = geometry.surface
    return -(s.H * s.norm_lo2 + s.lapH) / 3.0 - 2.0 / 3.0 * s.tr_lo3


@formula("b2_oracle", 2, "coefficient of r^3 in S(g, sigma_F)")
def b2_oracle(geometry):
    return sc_remainder_oracle(geometry)


# B_3


def _last_line(s, a):
    return (
        s.lap_normlo2 / 12.0
        + 0.5 * pair(s.lo, s.hessH)
        + s.lap_p00 / 6.0
        + 0.5 * pair(s.dH, a.ric0)
        + norm2(s.dH)
    )


@formula("b3_volume", 3, "volume coefficients, J'' and the closed last line")
def b3_volume(geometry):
    s, a = geometry.surface, geometry.ambient
    data = expansion_data(geometry)
    v, J = data.v, data.jbar
    return (
        -2.0 * v[4]
        + 0.5 * v[1] * v[3]
        + v[2] * v[2] / 3.0
        - 7.0 / 18.0 * v[1] * v[1] * v[2]
        + 2.0 / 27.0 * v[1] ** 4
        - J * v[2] / 3.0
        - 5.0 / 12.0 * data.jbar_p * v[1]
        - 0.25 * data.jbar_pp
        + _last_line(s, a)
    )


@formula("b3_inter1", 3, "normal derivatives of the background Ricci tensor")
def b3_inter1(geometry):
    s, a = geometry.surface, geometry.ambient
    H, R, J, G = s.H, a.ric00, a.jbar, a.G_normal
    normal = (
        (a.d0d0_ric00 - 0.5 * a.scal_pp)
        + 5.0 * H * (a.d0_ric00 - 0.5 * a.scal_p)
        + 2.0 * H * a.d0_ric00
        + 2.0 * norm2(G)
        - 2.0 * R * R
        + 2.0 * R * J
        + 8.0 * H * H * R
        - 12.0 * H * H * J
        + 6.0 * pair(s.dH, a.ric0)
        + 2.0 * s.lap_p00
    )
    mixed = (
        -2.0 * pair(s.lo, a.d0_R_0ij0)
        - 2.0 * H * pair(s.lo, G)
        + 8.0 * pair(s.lo2, G)
        - 4.0 * s.norm_lo2 * R
        + 2.0 * s.norm_lo2 * J
    )
    return (normal + mixed + _flat_terms(s)) / 12.0


@formula("b3_inter2", 3, "second normal derivatives eliminated by the Bianchi identity")
def b3_inter2(geometry):
    s, a = geometry.surface, geometry.ambient
    ric_tan = _tangential(a.ricci)
    derivatives = (
        -s.div_d0_ric0
        - 2.0 * s.div_H_ric0
        + 6.0 * pair(s.dH, a.ric0)
        + 2.0 * s.lap_p00
    )
    mixed = (
        pair(s.lo, a.nabla_ricci[0, 1:, 1:])
        - 2.0 * pair(s.lo, a.d0_R_0ij0)
        + 2.0 * pair(s.lo, s.grad_ric0)
        + 2.0 * pair(s.div_lo, a.ric0)
        - s.div_lo_ric0
        - 3.0 * s.norm_lo2 * a.ric00
        - pair(s.lo2, ric_tan)
        + s.H * pair(s.lo, ric_tan)
    )
    normal = (
        -2.0 * s.H * pair(s.lo, a.G_normal)
        + 8.0 * pair(s.lo2, a.G_normal)
        + 2.0 * s.norm_lo2 * a.jbar
    )
    weyl = 2.0 * pair(_pbar(a), a.W_hat) + 2.0 * norm2(a.W_hat)
    return (derivatives + mixed + normal + weyl + _flat_terms(s)) / 12.0


@formula("b3_main_prop", 3, "divergences of lo^2 and of W, with Ricci cross terms")
def b3_main_prop(geometry):
    s, a = geometry.surface, geometry.ambient
    W = a.W_hat
    return (
        2.0 * s.divdiv_lo2
        + 2.0 * norm2(s.div_lo)
        + 2.0 * pair(s.lo, s.grad_ric0)
        + s.norm_lo2 * a.ric00
        + 3.0 * pair(s.lo2, _tangential(a.ricci))
        - 6.0 * s.norm_lo2 * a.jbar
        + 2.0 * pair(_pbar(a), W)
        + 2.0 * norm2(W)
        + 2.0 * s.divdiv_W
        - 2.0 * pair(s.lo, a.d0_W_0ij0)
        - 2.0 * s.H * pair(s.lo, W)
        + 8.0 * pair(s.lo2, W)
        + 4.0 * pair(s.lo, s.hessH)
        + 6.0 * s.H * s.tr_lo3
        + s.norm_lo2 ** 2
    ) / 12.0


@formula("b3_final", 3, "(6 LOP(lo^2 tf) + 2|lo|^4 + 2 LOP(W) + Weyl terms) / 12")
def b3_final(geometry):
    s, a = geometry.surface, geometry.ambient
    W = a.W_hat
    return (
        6.0 * s.lop_lo2_tf
        + 2.0 * s.norm_lo2 ** 2
        + 2.0 * s.lop_W
        - 2.0 * pair(s.lo, a.d0_W_0ij0)
        - 4.0 * pair(s.lo, s.div_W_0)
        - 4.0 * s.H * pair(s.lo, W)
        + 16.0 * pair(s.lo2, W)
        + 4.0 * norm2(W)
        + 2.0 * norm2(a.W0)
    ) / 12.0


@formula("b3_flat", 3, "(Delta|lo|^2 + 6(lo, Hess H) + 6H tr lo^3 + |lo|^4 + 12|dH|^2) / 12",
         requires=("flat",))
def b3_flat(geometry):
    return _flat_terms(geometry.surface) / 12.0


@formula("b3_conformally_flat", 3, "(3 LOP(lo^2 tf) + |lo|^4) / 6",
         requires=("conformally_flat",))
def b3_conformally_flat(geometry):
    s = geometry.surface
    return (3.0 * s.lop_lo2_tf + s.norm_lo2 ** 2) / 6.0


@formula("b3_origin", 3,
         "(Delta|lo|^2 - |nabla lo|^2 + 3/2 |delta lo|^2 - 2J|lo|^2 + |lo|^4) / 6",
         requires=("conformally_flat",))
def b3_origin(geometry):
    s = geometry.surface
    return (
        s.lap_normlo2
        - s.norm_grad_lo
        + 1.5 * norm2(s.div_lo)
        - 2.0 * s.J * s.norm_lo2
        + s.norm_lo2 ** 2
    ) / 6.0


@formula("b3_einstein", 3, "flat terms plus normal Weyl terms", requires=("einstein",))
def b3_einstein(geometry):
    s, a = geometry.surface, geometry.ambient
    W = a.W_hat
    return (
        -2.0 * pair(s.lo, a.d0_W_0ij0)
        - 2.0 * s.H * pair(s.lo, W)
        + 8.0 * pair(s.lo2, W)
        + 2.0 * norm2(W)
        + _flat_terms(s)
    ) / 12.0


@formula("b3_gghw_arxiv", 3, "(6 LOP(lo^2 tf) + 2|lo|^4 + star terms) / 12")
def b3_gghw_arxiv(geometry):
    s = geometry.surface
    return (6.0 * s.lop_lo2_tf + 2.0 * s.norm_lo2 ** 2 + star_terms(geometry)) / 12.0


@formula("b3_gghw_published", 3, "LOP of lo^2 tf and of the trace-free Fialkov tensor",
         compare=False)
def b3_gghw_published(geometry):
    s, a = geometry.surface, geometry.ambient
    F, F_tf = s.fialkov, s.fialkov_tf
    return (
        4.0 * s.lop_lo2_tf
        + 2.0 * s.lop_fialkov
        - 2.0 * pair(s.lo, bach_tensor(geometry))
        + s.norm_lo2 ** 2
        + 4.0 * pair(F_tf, F)
        + 2.0 * pair(F_tf, s.lo2)
        + 2.0 * norm2(a.W0)
    ) / 12.0


@formula("b3_oracle", 3, "coefficient of r^4 in S(g, sigma_F)")
def b3_oracle(geometry):
    return sc_remainder_oracle(geometry)


def compute(geometry, formula_id):
    """Evaluate one formula id; scope is checked against the geometry's tags."""
    try:
        entry = FORMULAS[formula_id]
    except KeyError:
        raise ContractViolation(formula_id, "unknown formula id")
    entry.check_scope(geometry)
    key = ("formula", formula_id)
    if key not in geometry.cache:
        with log.timed(formula_id):
            geometry.cache[key] = np.asarray(entry.evaluate(geometry), dtype=float)
    return geometry.cache[key]


def compute_b2(geometry, formula_id="b2_bianchi"):
    if not formula_id.startswith("b2_"):
        raise ContractViolation(formula_id, "not a B_2 formula")
    return compute(geometry, formula_id)


def compute_b3(geometry, formula_id="b3_final"):
    if not formula_id.startswith("b3_"):
        raise ContractViolation(formula_id, "not a B_3 formula")
    return compute(geometry, formula_id)


def applicable_formulas(geometry):
    return [key for key, entry in FORMULAS.items() if entry.applies_to(geometry)]


def default_formula(n):
    return "b2_bianchi" if n == 2 else "b3_final"


# normal orientation flips B_2 and leaves B_3 unchanged
PARITY = {2: -1, 3: 1}


class ConformalCheck(object):
    def __init__(self, quantity, factor, weight, residual, scale):
        self.quantity = quantity
        self.factor = factor
        self.weight = weight
        self.residual = residual
        self.scale = scale

    def passed(self, tol_abs, tol_rel):
        return within(self.residual, self.scale, tol_abs, tol_rel)

    def as_dict(self):
        return {
            "quantity": self.quantity,
            "factor": self.factor,
            "weight": self.weight,
            "residual": self.residual,
        }


def rescaled_geometry(geometry, phi):
    """The same hypersurface and points in the background exp(2 phi) g."""
    hs = geometry.hypersurface
    tags = geometry.tags & {"conformally_flat", "umbilic", "closed"}
    return build_surface_stack(
        hs.embedding,
        hs.metric_field.conformal(phi),
        hs.points,
        hs.order,
        tags,
        geometry.scenario_id,
    )


def _factor_at_points(geometry, phi):
    return phi(geometry.hypersurface.iota.value.T)


def conformal_check(geometry, phi, formula_id=None):
    """exp((n + 1) phi) B[exp(2 phi) g] against B[g] at the same points."""
    formula_id = formula_id or default_formula(geometry.n)
    rescaled = rescaled_geometry(geometry, phi)
    weight = geometry.n + 1
    factor = np.exp(weight * _factor_at_points(geometry, phi))
    original = compute(geometry, formula_id)
    transformed = factor * compute(rescaled, formula_id)
    return ConformalCheck(
        formula_id,
        phi.source,
        weight,
        np.abs(transformed - original),
        1.0 + np.maximum(np.abs(original), np.abs(transformed)),
    )


def lop_conformal_check(geometry, phi):
    """exp(4 phi) LOP[h^] (b) against LOP[h] (b) for b = lo^2 tf and b = W."""
    rescaled = rescaled_geometry(geometry, phi)
    hs = geometry.hypersurface
    factor = np.exp(4.0 * _factor_at_points(geometry, phi))
    checks = []
    for name, b in (("lop_lo2_tf", hs.lo2_tf), ("lop_weyl", hs.W_hat)):
        original = lop(geometry, b)
        transformed = factor * lop(rescaled, b)
        checks.append(
            ConformalCheck(
                name,
                phi.source,
                4,
                np.abs(transformed - original),
                1.0 + np.maximum(np.abs(original), np.abs(transformed)),
            )
        )
    return checks


def bach_conformal_check(geometry, phi):
    """exp(phi) B^_ij against B_ij, both in the chart coordinates of M."""
    rescaled = rescaled_geometry(geometry, phi)
    factor = np.exp(_factor_at_points(geometry, phi))
    original = geometry.hypersurface.to_coordinates(bach_tensor(geometry), 2)
    transformed = factor * rescaled.hypersurface.to_coordinates(bach_tensor(rescaled), 2)
    batch = geometry.batch
    residual = np.abs(transformed - original).reshape(-1, batch).max(axis=0)
    scale = 1.0 + np.abs(original).reshape(-1, batch).max(axis=0)
    return ConformalCheck("bach", phi.source, 1, residual, scale)


def orientation_check(geometry, formula_id=None):
    """B computed with the opposite unit normal against PARITY[n] * B."""
    formula_id = formula_id or default_formula(geometry.n)
    hs = geometry.hypersurface
    flipped = build_surface_stack(
        hs.embedding.flipped(),
        hs.metric_field,
        hs.points,
        hs.order,
        geometry.tags,
        geometry.scenario_id,
    )
    original = compute(geometry, formula_id)
    other = PARITY[geometry.n] * compute(flipped, formula_id)
    return ConformalCheck(
        formula_id,
        "normal flip",
        PARITY[geometry.n],
        np.abs(other - original),
        1.0 + np.maximum(np.abs(original), np.abs(other)),
    )


class ObstructionReport(object):
    """Values of every requested formula and their pairwise residuals."""

    def __init__(self, geometry, values, tol_abs=1e-10, tol_rel=1e-7):
        self.scenario_id = geometry.scenario_id
        self.n = geometry.n
        self.points = geometry.points
        self.values = values
        self.tol_abs = tol_abs
        self.tol_rel = tol_rel
        self.bach = None
        self.lop_values = {}
        self.star = None
        self.conformal_checks = []

    @property
    def residual_matrix(self):
        matrix = OrderedDict()
        compared = [key for key in self.values if FORMULAS[key].compare]
        for first in compared:
            for second in compared:
                if first < second:
                    difference = np.abs(self.values[first] - self.values[second])
                    matrix[(first, second)] = difference
        return matrix

    def _scale(self, first, second):
        return 1.0 + np.maximum(np.abs(self.values[first]), np.abs(self.values[second]))

    def failures(self):
        failed = [
            "{} is not finite".format(key)
            for key, value in self.values.items()
            if not np.all(np.isfinite(value))
        ]
        for (first, second), difference in self.residual_matrix.items():
            if not within(difference, self._scale(first, second), self.tol_abs, self.tol_rel):
                failed.append(
                    "{} != {} (largest difference {:.3e})".format(
                        first, second, float(difference.max())
                    )
                )
        for check in self.conformal_checks:
            if not check.passed(self.tol_abs, self.tol_rel):
                failed.append(
                    "{} under {} (residual {:.3e})".format(
                        check.quantity, check.factor, float(np.max(check.residual))
                    )
                )
        return failed

    @property
    def passed(self):
        return not self.failures()

    def uncompared(self):
        """Largest distance of each reference-only formula from the default formula."""
        reference = self.values.get(default_formula(self.n))
        if reference is None:
            return {}
        return {
            key: float(np.abs(value - reference).max())
            for key, value in self.values.items()
            if not FORMULAS[key].compare
        }

    def as_dict(self):
        result = {
            "scenario": self.scenario_id,
            "n": self.n,
            "points": self.points,
            "values": dict(self.values),
            "residuals": {
                "{}|{}".format(*key): value.max()
                for key, value in self.residual_matrix.items()
            },
            "lop": self.lop_values,
            "uncompared": self.uncompared(),
            "conformal_checks": [check.as_dict() for check in self.conformal_checks],
            "passed": self.passed,
        }
        if self.bach is not None:
            result["bach"] = self.bach
        if self.star is not None:
            result["star"] = self.star
        return result


def build_report(
    geometry,
    formula_ids=None,
    conformal_factors=(),
    tol_abs=1e-10,
    tol_rel=1e-7,
    flip=False,
):
    """Evaluate the requested (default: every applicable) formula ids.

    Reference-only ids are reported next to the default formula but left
    out of the pairwise comparison.
    """
    formula_ids = list(formula_ids or applicable_formulas(geometry))
    values = OrderedDict()
    for formula_id in formula_ids:
        values[formula_id] = compute(geometry, formula_id)
        log.debug("{}: {}".format(formula_id, values[formula_id]))
    report = ObstructionReport(geometry, values, tol_abs, tol_rel)
    if geometry.n == 3:
        s = geometry.surface
        report.bach = bach_tensor(geometry)
        report.lop_values = {"lo2_tf": s.lop_lo2_tf, "weyl": s.lop_W}
        report.star = star_terms(geometry)
    for phi in conformal_factors:
        report.conformal_checks.append(
            conformal_check(geometry, phi, default_formula(geometry.n))
        )
        if geometry.n == 3:
            report.conformal_checks.extend(lop_conformal_check(geometry, phi))
            report.conformal_checks.append(bach_conformal_check(geometry, phi))
    if flip:
        report.conformal_checks.append(orientation_check(geometry))
    return report

