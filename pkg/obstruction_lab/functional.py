"""
Global integrals over closed hypersurfaces and their normal variations.

A :class:`ClosedScenario` is a periodic graph in a periodic background on
the torus chart ``[0, 2 pi)^(n + 1)``. Integrands are evaluated on a
tensor-product grid and summed with equal weights (the trapezoidal rule for
periodic data); the grid with every other node removed gives the error
estimate for free.

``iota_t(x) = exp_{iota(x)}(t u(x) N(x))`` is the sum over k of
``(t u)^k`` times the r^k slice of the geodesic normal chart, so the varied
hypersurface is again a jet in x and goes through the same stacks.
"""
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import jets
from .exceptions import ContractViolation, EmbeddingError, GeometryError, StepSizeError
from .fermi import R_AXIS, FermiChart
from .hypersurface import Hypersurface, build_surface_stack
from .logging import log
from .obstruction import ConformalCheck, compute, default_formula
from .scenarios import PERIOD, periodic_residual
from .utils import MIN_STACK_ORDER, chunks, norm2, pair, required_order, within, worker_count

DEFAULT_GRID = 32
DEFAULT_T_STEPS = (1e-3, 2e-3, 4e-3, 8e-3)
# relative to 1 + |6 int u B_3|
VARIATION_TOLERANCE = 1e-4
CHUNK = 512
# powers of t kept in iota_t; the rest is below round-off for |t| <= 1e-2
VARIATION_DEGREE = 4
# tags that describe the background alone and survive a deformation of M
_BACKGROUND_TAGS = frozenset(["flat", "conformally_flat", "einstein", "closed"])

INTEGRANDS = OrderedDict()


class Integrand(object):
    def __init__(self, integrand_id, n, order, evaluate, description):
        self.integrand_id = integrand_id
        self.n = n
        self.order = order
        self.evaluate = evaluate
        self.description = description

    def order_for(self, n):
        return self.order(n) if callable(self.order) else self.order


def integrand(integrand_id, description, n=None, order=MIN_STACK_ORDER):
    def register(fn):
        INTEGRANDS[integrand_id] = Integrand(integrand_id, n, order, fn, description)
        return fn

    return register


@integrand("w2", "|lo|^2", n=2)
def _w2(geometry, closed):
    return geometry.surface.norm_lo2


@integrand("w3", "tr lo^3 + (lo, W)", n=3)
def _w3(geometry, closed):
    s, a = geometry.surface, geometry.ambient
    return s.tr_lo3 + pair(s.lo, a.W_hat)


@integrand("tr_lo3", "tr lo^3", n=3)
def _tr_lo3(geometry, closed):
    return geometry.surface.tr_lo3


@integrand("lo_weyl", "(lo, W)", n=3)
def _lo_weyl(geometry, closed):
    return pair(geometry.surface.lo, geometry.ambient.W_hat)


@integrand("divergence_lo", "Delta |lo|^2 - 2 dd(lo^2), a total divergence", order=5)
def _divergence_lo(geometry, closed):
    s = geometry.surface
    return s.lap_normlo2 - 2.0 * s.divdiv_lo2


@integrand(
    "divergence_weyl",
    "-4 lo^ij nabla^k W_kij0 + 2 |W_0|^2, integrates to zero",
    n=3,
    order=5,
)
def _divergence_weyl(geometry, closed):
    s, a = geometry.surface, geometry.ambient
    return -4.0 * pair(s.lo, s.div_W_0) + 2.0 * norm2(a.W0)


@integrand("ub3", "u B_3", n=3, order=lambda n: required_order("obstruction", n))
def _ub3(geometry, closed):
    u = closed.u(geometry.points)
    return u * compute(geometry, default_formula(geometry.n))


TOTAL_DIVERGENCES = ("divergence_lo", "divergence_weyl")


class ClosedScenario(object):
    """A closed scenario together with its quadrature grid and variation direction."""

    def __init__(self, scenario, grid=DEFAULT_GRID, u=None, tolerance=1e-10):
        if not scenario.closed or scenario.height is None:
            raise ContractViolation(
                "closed scenario",
                "{} is not a periodic graph tagged closed".format(scenario.scenario_id),
            )
        residual = periodic_residual(scenario)
        if residual > tolerance:
            raise ContractViolation(
                "closed scenario",
                "data of {} is not 2 pi periodic (residual {!r})".format(
                    scenario.scenario_id, residual
                ),
            )
        if grid < 2 or grid % 2:
            raise ContractViolation("closed scenario", "grid must be even, got {}".format(grid))
        self.scenario = scenario
        self.grid = grid
        self.u = u if u is not None else scenario.variation
        if self.u is None:
            raise ContractViolation("closed scenario", "no variation direction u")
        self.n = scenario.n

    @property
    def scenario_id(self):
        return self.scenario.scenario_id

    @property
    def grid_points(self):
        """Nodes 2 pi k / N of the tensor grid, shape (N^n, n), C order."""
        axis = PERIOD * np.arange(self.grid) / self.grid
        mesh = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def weight(self):
        return (PERIOD / self.grid) ** self.n


class Quadrature(object):
    """A grid integral and its estimate from the grid with every other node."""

    def __init__(self, value, coarse):
        self.value = value
        self.coarse = coarse

    @property
    def error(self):
        return abs(self.value - self.coarse)

    def as_dict(self):
        return {"value": self.value, "coarse": self.coarse, "error": self.error}


class NormalFlow(object):
    """The r^k slices of the geodesic normal chart of ``embedding`` and the jet of ``u``.

    Neither depends on t, so both are built once per batch of points and
    shared by every step of the ladder.
    """

    def __init__(self, embedding, metric, u, degree=VARIATION_DEGREE):
        self.embedding = embedding
        self.metric = metric
        self.u = u
        self.degree = degree
        self._slices = {}
        self._lock = threading.Lock()

    def flipped(self):
        return NormalFlow(self.embedding.flipped(), self.metric, self.u, self.degree)

    def slices(self, points, order):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        key = (order, points.shape, points.tobytes())
        with self._lock:
            cached = self._slices.get(key)
        if cached is not None:
            return cached
        base = Hypersurface(self.embedding, self.metric, points, order + self.degree)
        geodesics = FermiChart(base).geodesics
        x = jets.variables(points, order)
        u = self.u.evaluate(x)
        if not isinstance(u, jets.Jet):
            u = x[0] * 0.0 + u
        cached = (
            [
                geodesics.coefficient_slice(R_AXIS, k).truncate(order)
                for k in range(self.degree + 1)
            ],
            u,
        )
        with self._lock:
            self._slices[key] = cached
        return cached

    def at(self, t):
        return VariedEmbedding(self, t)

    @property
    def cached_batches(self):
        return len(self._slices)


class VariedEmbedding(object):
    """The hypersurface pushed along its normal geodesics by ``t u``."""

    def __init__(self, flow, t):
        self.flow = flow
        self.t = float(t)
        self.chart_dim = flow.embedding.chart_dim
        self.ambient_dim = flow.embedding.ambient_dim
        self.normal_orientation = flow.embedding.normal_orientation

    def flipped(self):
        return VariedEmbedding(self.flow.flipped(), -self.t)

    def lift(self, points, order):
        slices, u = self.flow.slices(points, order)
        step = u * self.t
        # Horner in s = t u
        result = slices[-1]
        for coefficient in reversed(slices[:-1]):
            result = coefficient + step * result
        return result


def _density(geometry):
    """sqrt(det h) in the chart of M."""
    h = np.moveaxis(geometry.hypersurface.metric.value, -1, 0)
    return np.sqrt(np.linalg.det(h))


def _entries(integrand_ids, n):
    entries = []
    for integrand_id in integrand_ids:
        if integrand_id not in INTEGRANDS:
            raise ContractViolation(integrand_id, "unknown integrand")
        entry = INTEGRANDS[integrand_id]
        if entry.n is not None and entry.n != n:
            raise ContractViolation(
                integrand_id, "defined for n = {}, not n = {}".format(entry.n, n)
            )
        entries.append(entry)
    return entries


def grid_values(closed, integrand_ids, embedding=None, metric=None):
    """Integrand times density at every grid node, one (N,) * n array per id."""
    scenario = closed.scenario
    embedding = embedding or scenario.embedding
    metric = metric or scenario.metric
    entries = _entries(integrand_ids, closed.n)
    order = max(entry.order_for(closed.n) for entry in entries)
    tags = scenario.tags
    if metric is not scenario.metric:
        tags = tags & {"closed"}
    elif embedding is not scenario.embedding:
        tags = tags & _BACKGROUND_TAGS

    def evaluate(points):
        geometry = build_surface_stack(
            embedding, metric, points, order, tags, scenario.scenario_id
        )
        density = _density(geometry)
        return [entry.evaluate(geometry, closed) * density for entry in entries]

    batches = list(chunks(closed.grid_points, CHUNK))
    workers = min(worker_count(), len(batches))
    with log.timed("{} on a {}^{} grid".format(",".join(integrand_ids), closed.grid, closed.n)):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(evaluate, batches))
        else:
            results = [evaluate(batch) for batch in batches]
    shape = (closed.grid,) * closed.n
    return OrderedDict(
        (
            entry.integrand_id,
            np.concatenate([result[k] for result in results]).reshape(shape),
        )
        for k, entry in enumerate(entries)
    )


def _quadrature(values, closed):
    coarse_slice = (slice(None, None, 2),) * closed.n
    value = float(values.sum() * closed.weight)
    coarse = float(values[coarse_slice].sum() * closed.weight * 2 ** closed.n)
    return Quadrature(value, coarse)


def integrate_many(closed, integrand_ids, embedding=None, metric=None):
    values = grid_values(closed, integrand_ids, embedding, metric)
    return OrderedDict((key, _quadrature(v, closed)) for key, v in values.items())


def integrate(closed, integrand_id, embedding=None, metric=None):
    """Trapezoidal integral of ``integrand * dvol_h`` over the fundamental domain."""
    return integrate_many(closed, [integrand_id], embedding, metric)[integrand_id]


def total_divergence_checks(closed, tolerance=1e-8):
    """Integrals that vanish on any closed hypersurface."""
    ids = [key for key in TOTAL_DIVERGENCES if INTEGRANDS[key].n in (None, closed.n)]
    results = integrate_many(closed, ids)
    return OrderedDict(
        (key, {"value": q.value, "error": q.error, "passed": abs(q.value) < tolerance})
        for key, q in results.items()
    )


def _check_steps(t_steps):
    steps = sorted(float(t) for t in t_steps)
    if len(steps) < 2:
        raise ContractViolation("t steps", "need at least two step sizes")
    if steps[0] <= 0:
        raise ContractViolation("t steps", "step sizes must be positive")
    ratio = steps[1] / steps[0]
    for first, second in zip(steps, steps[1:]):
        if not np.isclose(second / first, ratio, rtol=1e-9):
            raise ContractViolation("t steps", "step sizes must form a geometric ladder")
    return steps, ratio


def richardson(derivatives, ratio, power=2):
    """Remove the t^power term from central differences at t and ratio * t.

    >>> richardson([1.25, 2.0], 2.0)
    [1.0]
    """
    factor = ratio ** power
    return [
        (factor * first - second) / (factor - 1.0)
        for first, second in zip(derivatives, derivatives[1:])
    ]


def observed_order(values, ratio, floor=1e-14):
    """Convergence order read off three successive approximations.

    >>> round(observed_order([1.0 + 1e-4, 1.0 + 4e-4, 1.0 + 1.6e-3], 2.0), 6)
    2.0
    """
    if len(values) < 3:
        return None
    near = abs(values[1] - values[0])
    far = abs(values[2] - values[1])
    if near < floor or far < floor:
        return None
    return float(np.log(far / near) / np.log(ratio))


def _varied(closed, flow, t, integrand_ids):
    try:
        return integrate_many(closed, integrand_ids, flow.at(t))
    except (EmbeddingError, GeometryError) as e:
        raise StepSizeError(t, "{}; try a smaller t".format(e))


class FunctionalReport(object):
    def __init__(self, closed, t_steps):
        self.scenario_id = closed.scenario_id
        self.n = closed.n
        self.grid = closed.grid
        self.energy = "W3" if closed.n == 3 else "W2"
        self.u = closed.u.source
        self.t_steps = list(t_steps)
        self.values = OrderedDict()
        self.quadrature_errors = OrderedDict()
        self.derivatives = []
        self.variation_fd = None
        self.rhs = None
        self.rhs_quadrature_error = None
        self.order_pre = None
        self.order_post = None
        self.extras = OrderedDict()
        self.total_divergences = OrderedDict()
        self.conformal_checks = []

    @property
    def residual(self):
        if self.rhs is None:
            return None
        return abs(self.variation_fd + self.rhs)

    def failures(self, tol_rel=VARIATION_TOLERANCE):
        failed = [
            "{} under {} (residual {:.3e})".format(
                check.quantity, check.factor, float(np.max(check.residual))
            )
            for check in self.conformal_checks
            if not check.passed(0.0, 1e-7)
        ]
        failed.extend(
            "integral of {} does not vanish ({:.3e})".format(key, item["value"])
            for key, item in self.total_divergences.items()
            if not item["passed"]
        )
        if self.residual is not None and self.residual >= tol_rel * (1.0 + abs(self.rhs)):
            failed.append(
                "-d/dt {} = {!r} but the variation formula gives {!r}".format(
                    self.energy, -self.variation_fd, self.rhs
                )
            )
        return failed

    def passed(self, tol_rel=VARIATION_TOLERANCE):
        return not self.failures(tol_rel)

    def as_dict(self):
        return {
            "scenario": self.scenario_id,
            "n": self.n,
            "grid": self.grid,
            "u": self.u,
            "t_steps": self.t_steps,
            "values": dict(self.values),
            "quadrature_errors": dict(self.quadrature_errors),
            "derivatives": self.derivatives,
            "variation_fd": self.variation_fd,
            "rhs": self.rhs,
            "rhs_quadrature_error": self.rhs_quadrature_error,
            "residual": self.residual,
            "order_pre": self.order_pre,
            "order_post": self.order_post,
            "extras": dict(self.extras),
            "total_divergences": dict(self.total_divergences),
            "conformal_checks": [check.as_dict() for check in self.conformal_checks],
            "passed": self.passed(),
        }


def normal_variation(closed, t_steps=DEFAULT_T_STEPS, conformal_factors=()):
    """Finite-difference d/dt of the energy along iota_t against 6 int u B_3 dvol.

    The Richardson value uses the two smallest steps; further steps of the
    ladder only feed the observed convergence orders.
    """
    steps, ratio = _check_steps(t_steps)
    energy = "w3" if closed.n == 3 else "w2"
    parts = ["tr_lo3", "lo_weyl"] if closed.n == 3 else []
    ids = [energy] + parts
    report = FunctionalReport(closed, steps)

    base = integrate_many(closed, ids)
    name = energy.upper()
    report.values[name] = base[energy].value
    report.quadrature_errors[name] = base[energy].error

    scenario = closed.scenario
    flow = NormalFlow(scenario.embedding, scenario.metric, closed.u)
    derivatives = OrderedDict((key, []) for key in ids)
    for t in steps:
        plus = _varied(closed, flow, t, ids)
        minus = _varied(closed, flow, -t, ids)
        for key in ids:
            derivatives[key].append((plus[key].value - minus[key].value) / (2.0 * t))
        log.debug("t = {!r}: d/dt {} ~ {!r}".format(t, name, derivatives[energy][-1]))

    raw = derivatives[energy]
    extrapolated = richardson(raw, ratio)
    report.derivatives = raw
    report.variation_fd = extrapolated[0]
    report.order_pre = observed_order(raw, ratio)
    report.order_post = observed_order(extrapolated, ratio)
    for key in parts:
        report.extras["var_" + key] = richardson(derivatives[key], ratio)[0]

    if closed.n == 3:
        rhs = integrate(closed, "ub3")
        report.rhs = 6.0 * rhs.value
        report.rhs_quadrature_error = 6.0 * rhs.error
    report.total_divergences = total_divergence_checks(closed)
    for phi in conformal_factors:
        report.conformal_checks.append(conformal_invariance(closed, phi))
    return report


def conformal_invariance(closed, phi):
    """The energy in exp(2 phi) g against the energy in g."""
    energy = "w3" if closed.n == 3 else "w2"
    original = integrate(closed, energy).value
    rescaled = integrate(closed, energy, metric=closed.scenario.metric.conformal(phi)).value
    return ConformalCheck(
        energy.upper(),
        phi.source,
        0,
        abs(rescaled - original),
        1.0 + max(abs(original), abs(rescaled)),
    )


# pointwise first variations at t = 0


class PointwiseVariation(object):
    def __init__(self, quantity, finite_difference, closed_form):
        self.quantity = quantity
        self.finite_difference = finite_difference
        self.closed_form = closed_form

    @property
    def residual(self):
        return float(np.max(np.abs(self.finite_difference - self.closed_form)))

    @property
    def scale(self):
        return 1.0 + float(np.max(np.abs(self.closed_form)))

    def passed(self, tolerance=1e-6):
        return within(self.residual, self.scale, 0.0, tolerance)

    def as_dict(self):
        return {"quantity": self.quantity, "residual": self.residual, "scale": self.scale}


def _snapshot(geometry):
    hs = geometry.hypersurface
    return {
        "h": hs.metric.value,
        "L": hs.L.value,
        "H": hs.H.value,
        "dvol": _density(geometry),
    }


def variation_pointwise(geometry, u, t_steps=(1e-3, 2e-3)):
    """Finite differences of h, L, H and dvol along iota_t against their closed forms."""
    steps, ratio = _check_steps(t_steps[:2])
    hs = geometry.hypersurface
    order = hs.order
    tags = geometry.tags & _BACKGROUND_TAGS

    flow = NormalFlow(hs.embedding, hs.metric_field, u)
    derivatives = {}
    for t in steps:
        snapshots = []
        for sign in (1.0, -1.0):
            varied = flow.at(sign * t)
            try:
                snapshots.append(
                    _snapshot(
                        build_surface_stack(varied, hs.metric_field, hs.points, order, tags)
                    )
                )
            except (EmbeddingError, GeometryError) as e:
                raise StepSizeError(sign * t, "{}; try a smaller t".format(e))
        for key in snapshots[0]:
            derivatives.setdefault(key, []).append(
                (snapshots[0][key] - snapshots[1][key]) / (2.0 * t)
            )
    fd = {key: richardson(values, ratio)[0] for key, values in derivatives.items()}

    u_jet = u.evaluate(jets.variables(hs.points, order))
    if not isinstance(u_jet, jets.Jet):
        u_jet = jets.variables(hs.points, order)[0] * 0.0 + u_jet
    s, a = geometry.surface, geometry.ambient
    uv = u_jet.value
    L = hs.L.value
    L2 = hs.product(hs.L, hs.L).value
    G = hs.to_coordinates(a.G_normal, 2)
    n = geometry.n
    return OrderedDict(
        [
            ("h", PointwiseVariation("var(h) = 2uL", fd["h"], 2.0 * uv * L)),
            (
                "L",
                PointwiseVariation(
                    "var(L) = -Hess(u) + uL^2 - uG",
                    fd["L"],
                    -hs.hessian(u_jet).value + uv * L2 - uv * G,
                ),
            ),
            (
                "H",
                PointwiseVariation(
                    "n var(H) = -Delta u - u|L|^2 - u Ric_00",
                    n * fd["H"],
                    -hs.laplacian(u_jet).value - uv * s.norm_L2 - uv * a.ric00,
                ),
            ),
            (
                "dvol",
                PointwiseVariation(
                    "var(dvol) = n u H dvol", fd["dvol"], n * uv * s.H * _density(geometry)
                ),
            ),
        ]
    )


def willmore_residual(geometry):
    """Delta H + 2H(H^2 - K) on a surface in flat space."""
    if geometry.n != 2:
        raise ContractViolation("willmore_residual", "requires n = 2")
    s = geometry.surface
    return s.lapH + 2.0 * s.H * (s.H * s.H - s.K)
