"""
Scenarios: a background metric, an embedded hypersurface, sample points and
the scope tags the formulas are allowed to rely on.

The built-in catalog is registered with :func:`catalog_entry`; anything else
is read from a JSON document with the same vocabulary::

    {
        "id": "my_graph",
        "ambient_dim": 4,
        "metric": {"catalog": "perturbed", "params": {"eps": 0.05}},
        "embedding": {"graph": "0.2 * x1^2 + 0.1 * x2 * x3"},
        "points": {"count": 5, "radius": 0.15},
        "conformal_factor": ["0.1 * (x1 + x2 * x4)"],
        "tags": []
    }

Declared tags are verified when the scenario is loaded; a tag that does not
hold raises :class:`~obstruction_lab.exceptions.ScopeError`.
"""
import io
import json
from collections import OrderedDict

import numpy as np

from .ambient import MetricField
from .exceptions import ContractViolation, ParseError, ScopeError
from .expressions import ScalarField
from .hypersurface import Embedding, build_surface_stack
from .logging import log
from .utils import MIN_STACK_ORDER, order_budget, worst

TAGS = ("flat", "conformally_flat", "einstein", "umbilic", "closed")
TAG_TOLERANCE = 1e-10
PERIOD = 2.0 * np.pi

CATALOG = OrderedDict()


class Scenario(object):
    """Everything needed to build a :class:`~obstruction_lab.hypersurface.Geometry`."""

    def __init__(
        self,
        scenario_id,
        metric,
        embedding,
        points,
        tags=(),
        params=None,
        conformal_factors=(),
        height=None,
        variation=None,
        description=None,
    ):
        self.scenario_id = scenario_id
        self.metric = metric
        self.embedding = embedding
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.tags = frozenset(tags)
        self.params = dict(params or {})
        self.conformal_factors = list(conformal_factors)
        self.height = height
        self.variation = variation
        self.description = description
        self.n = embedding.chart_dim
        self.ambient_dim = embedding.ambient_dim
        self._geometries = {}
        unknown = self.tags - set(TAGS)
        if unknown:
            raise ParseError("Unknown tag(s): {}".format(", ".join(sorted(unknown))))
        if self.points.shape[1] != self.n:
            raise ParseError(
                "Points have {} coordinates, the chart has {}".format(
                    self.points.shape[1], self.n
                )
            )

    def __repr__(self):
        return "Scenario({!r}, n={})".format(self.scenario_id, self.n)

    @property
    def closed(self):
        return "closed" in self.tags

    def geometry(self, order, points=None, orientation=1):
        """Stacks at ``points`` (default: the scenario's own sample, built once)."""
        key = (order, orientation)
        if points is None and key in self._geometries:
            return self._geometries[key]
        embedding = self.embedding
        if orientation == -1:
            embedding = embedding.flipped()
        geometry = build_surface_stack(
            embedding,
            self.metric,
            self.points if points is None else points,
            order,
            self.tags,
            self.scenario_id,
        )
        if points is None:
            self._geometries[key] = geometry
        return geometry

    def with_points(self, points):
        scenario = Scenario.__new__(Scenario)
        scenario.__dict__.update(self.__dict__)
        scenario.points = np.atleast_2d(np.asarray(points, dtype=float))
        scenario._geometries = {}
        return scenario

    def as_dict(self):
        return {
            "id": self.scenario_id,
            "n": self.n,
            "ambient_dim": self.ambient_dim,
            "params": self.params,
            "tags": sorted(self.tags),
            "orientation": self.embedding.normal_orientation,
            "embedding": [field.source for field in self.embedding.maps],
            "metric": {
                "{}{}".format(a + 1, b + 1): self.metric.components[a][b].source
                for a in range(self.ambient_dim)
                for b in range(a, self.ambient_dim)
            },
            "conformal_factors": [phi.source for phi in self.conformal_factors],
            "points": self.points,
        }


class CatalogEntry(object):
    def __init__(self, name, n, build, defaults, description):
        self.name = name
        self.n = n
        self.build = build
        self.defaults = defaults
        self.description = description

    def params(self, overrides):
        params = dict(self.defaults)
        for key, value in (overrides or {}).items():
            if key not in params:
                raise ParseError(
                    "Scenario {} has no parameter {!r} (known: {})".format(
                        self.name, key, ", ".join(sorted(params)) or "none"
                    )
                )
            params[key] = value
        return params


def catalog_entry(name, n, description, **defaults):
    def register(fn):
        CATALOG[name] = CatalogEntry(name, n, fn, defaults, description)
        return fn

    return register


def sample_points(n, count=5, radius=0.15, center=0.0, seed=20):
    """``count`` chart points; the first is the center, the rest pseudo-random.

    >>> sample_points(3, count=2).shape
    (2, 3)
    >>> sample_points(2, count=1).tolist()
    [[0.0, 0.0]]
    """
    if count < 1:
        raise ContractViolation("points", "need at least one point")
    state = np.random.RandomState(seed)
    points = np.full((count, n), float(center))
    points[1:] += radius * state.uniform(-1.0, 1.0, size=(count - 1, n))
    return points


def _numeric(params):
    return {
        key: float(value)
        for key, value in params.items()
        if isinstance(value, (int, float)) and not isinstance(value, bool)
    }


def _field(source, arity, params):
    return ScalarField(str(source), arity, _numeric(params))


# metrics


def euclidean_metric(dim, params=None):
    return MetricField.euclidean(dim)


def conformally_euclidean_metric(dim, params):
    return MetricField.euclidean(dim).conformal(_field(params["phi"], dim, params))


def round_sphere_metric(dim, params=None):
    """Round unit sphere through stereographic coordinates."""
    radius2 = " + ".join("x{}^2".format(i + 1) for i in range(dim))
    factor = "4 / (1 + {})^2".format(radius2)
    return MetricField.from_table(
        {"{0}{0}".format(a + 1): factor for a in range(dim)}, dim
    )


# polynomial perturbation tables Q, generic enough for a nonzero Weyl tensor
_Q4 = {
    "11": "x2 * x3 + x4^2",
    "12": "x3 * x4 - x1^2 / 2",
    "13": "x2 * x4 + x1 * x2 * x3",
    "14": "x1 * x3 - x2^2",
    "22": "x1 * x4 + x3^2",
    "23": "x1^2 - x2 * x4",
    "24": "x1 * x2 + x3^3",
    "33": "x1 * x2 - x4^2 + x1 * x4^2",
    "34": "x2^2 + x1 * x3",
    "44": "x1 * x3 + x2 * x3",
}
_Q3 = {
    "11": "x2 * x3 + x3^2",
    "12": "x3^2 - x1 * x2",
    "13": "x1 * x2 + x2^2",
    "22": "x1 * x3 - x3^2 / 2",
    "23": "x1^2 + x2 * x3",
    "33": "x1 * x2 + x1^2 * x3",
}


def perturbed_metric(dim, params):
    """delta + eps Q for the polynomial table Q of the dimension."""
    table = {4: _Q4, 3: _Q3}.get(dim)
    if table is None:
        raise ContractViolation("perturbed metric", "dimension {}".format(dim))
    components = {}
    for key, source in table.items():
        unit = "1 + " if key[0] == key[1] else ""
        components[key] = "{}eps * ({})".format(unit, source)
    return MetricField.from_table(components, dim, _numeric(params))


# hypersurface metric gamma(x) of the umbilic slice and its x4^2 correction
_SLICE_GAMMA = {
    "11": "x2 * x3",
    "12": "x3^2",
    "13": "x1 * x2",
    "22": "x1 * x3",
    "23": "x1^2",
    "33": "x1 * x2",
}
_SLICE_BEND = {
    "11": "x2",
    "12": "x3",
    "13": "x1",
    "22": "x3 + x1",
    "23": "x2",
    "33": "x1 - x2",
}


def umbilic_slice_metric(dim, params):
    """dx4^2 + (1 + lam x4)^2 gamma(x) + eps x4^2 q(x); the slice x4 = 0 is umbilic."""
    if dim != 4:
        raise ContractViolation("umbilic slice metric", "dimension {}".format(dim))
    components = {}
    for key, source in _SLICE_GAMMA.items():
        unit = "1 + " if key[0] == key[1] else ""
        components[key] = "(1 + lam * x4)^2 * ({}eps * ({})) + eps * x4^2 * ({})".format(
            unit, source, _SLICE_BEND[key]
        )
    return MetricField.from_table(components, dim, _numeric(params))


METRICS = {
    "euclidean": euclidean_metric,
    "conformal": conformally_euclidean_metric,
    "round_sphere": round_sphere_metric,
    "perturbed": perturbed_metric,
    "umbilic_slice": umbilic_slice_metric,
}


# embeddings


def graph(height, n, params, orientation=1):
    return Embedding.graph(str(height), n, _numeric(params), orientation)


def round_graph(n, radius_name, free_axes, params):
    """Upper cap of a round sphere (or cylinder) with the outward normal."""
    squares = " - ".join("x{}^2".format(i + 1) for i in free_axes)
    source = "sqrt({}^2 - {})".format(radius_name, squares)
    return graph(source, n, params, orientation=-1)


# catalog, n = 3


@catalog_entry("plane_r4", 3, "flat hyperplane x4 = 0 in R^4")
def plane_r4(name, params):
    return Scenario(
        name,
        euclidean_metric(4),
        graph("0", 3, params),
        sample_points(3),
        tags=("flat", "conformally_flat", "einstein", "umbilic"),
        params=params,
    )


@catalog_entry("sphere_s3", 3, "round sphere of radius rho in R^4", rho=1.0)
def sphere_s3(name, params):
    rho = float(params["rho"])
    return Scenario(
        name,
        euclidean_metric(4),
        round_graph(3, "rho", (0, 1, 2), params),
        sample_points(3, radius=0.3 * rho),
        tags=("flat", "conformally_flat", "einstein", "umbilic"),
        params=params,
    )


@catalog_entry("cylinder_s2xr", 3, "round cylinder S^2(a) x R in R^4", a=1.0)
def cylinder_s2xr(name, params):
    a = float(params["a"])
    return Scenario(
        name,
        euclidean_metric(4),
        round_graph(3, "a", (0, 1), params),
        sample_points(3, radius=0.3 * a),
        tags=("flat", "conformally_flat", "einstein"),
        params=params,
    )


@catalog_entry(
    "graph_flat",
    3,
    "graph x4 = F(x1, x2, x3) in R^4",
    F="0.3 * x1^2 + 0.2 * x2 * x3 - 0.1 * x3^2 + 0.1 * x1^3 - 0.15 * x1 * x2 * x3"
    " + 0.05 * sin(x2)",
)
def graph_flat(name, params):
    return Scenario(
        name,
        euclidean_metric(4),
        graph(params["F"], 3, params),
        sample_points(3),
        tags=("flat", "conformally_flat", "einstein"),
        params=params,
    )


@catalog_entry(
    "conf_flat",
    3,
    "graph in exp(2 phi) times the flat metric",
    phi="0.1 * x1 + 0.05 * x2 * x4 - 0.04 * x3^2",
    F="0.25 * x1^2 + 0.1 * x2 * x3 - 0.15 * x3^2 + 0.08 * x1 * x2 * x3",
)
def conf_flat(name, params):
    return Scenario(
        name,
        conformally_euclidean_metric(4, params),
        graph(params["F"], 3, params),
        sample_points(3),
        tags=("conformally_flat",),
        params=params,
    )


@catalog_entry(
    "s4_round",
    3,
    "graph in the round four-sphere (stereographic chart)",
    F="0.3 * x1^2 + 0.2 * x2 * x3 + 0.1 * x3^3",
)
def s4_round(name, params):
    return Scenario(
        name,
        round_sphere_metric(4),
        graph(params["F"], 3, params),
        sample_points(3),
        tags=("conformally_flat", "einstein"),
        params=params,
    )


@catalog_entry(
    "perturbed",
    3,
    "graph in delta + eps Q, generic Weyl curvature",
    eps=0.1,
    F="0.2 * x1^2 - 0.1 * x2^2 + 0.15 * x1 * x3 + 0.1 * x2 * x3^2 + 0.05 * x1^3",
    phi1="0.1 * (x1 + x2 * x4)",
    phi2="0.05 * (x3^2 - x1 * x4) + 0.02 * x2",
)
def perturbed(name, params):
    return Scenario(
        name,
        perturbed_metric(4, params),
        graph(params["F"], 3, params),
        sample_points(3),
        params=params,
        conformal_factors=[
            _field(params["phi1"], 4, params),
            _field(params["phi2"], 4, params),
        ],
    )


@catalog_entry(
    "umbilic_slice",
    3,
    "the umbilic slice x4 = 0 of a warped background with Weyl curvature",
    lam=0.3,
    eps=0.1,
)
def umbilic_slice(name, params):
    return Scenario(
        name,
        umbilic_slice_metric(4, params),
        graph("0", 3, params),
        sample_points(3),
        tags=("umbilic",),
        params=params,
    )


@catalog_entry(
    "torus_graph",
    3,
    "periodic graph in the flat four-torus",
    eps=0.05,
    F="eps * sin(x1) * sin(x2) * sin(x3)",
    u="cos(x1)",
)
def torus_graph(name, params):
    height = _field(params["F"], 3, params)
    return Scenario(
        name,
        euclidean_metric(4),
        graph(params["F"], 3, params),
        sample_points(3, radius=np.pi, center=np.pi),
        tags=("flat", "conformally_flat", "einstein", "closed"),
        params=params,
        height=height,
        variation=_field(params["u"], 3, params),
    )


_TORUS_METRIC = {
    "11": "1 + eps * sin(x2 + x4)",
    "22": "1 + eps * cos(x1 - x3)",
    "33": "1 + eps * sin(x1) * cos(x4)",
    "44": "1 + eps * cos(x2)",
    "12": "eps * sin(x3 + x4) / 2",
    "34": "eps * cos(x1 + x2) / 2",
}


@catalog_entry(
    "torus_curved",
    3,
    "periodic graph in a curved metric on the four-torus",
    eps=0.1,
    F="0.05 * sin(x1) * sin(x2) * sin(x3)",
    u="cos(x1)",
)
def torus_curved(name, params):
    return Scenario(
        name,
        MetricField.from_table(_TORUS_METRIC, 4, _numeric(params)),
        graph(params["F"], 3, params),
        sample_points(3, radius=np.pi, center=np.pi),
        tags=("closed",),
        params=params,
        height=_field(params["F"], 3, params),
        variation=_field(params["u"], 3, params),
    )


# catalog, n = 2


@catalog_entry("plane_r3", 2, "flat plane x3 = 0 in R^3")
def plane_r3(name, params):
    return Scenario(
        name,
        euclidean_metric(3),
        graph("0", 2, params),
        sample_points(2),
        tags=("flat", "conformally_flat", "einstein", "umbilic"),
        params=params,
    )


@catalog_entry("sphere_s2", 2, "round sphere of radius rho in R^3", rho=1.0)
def sphere_s2(name, params):
    rho = float(params["rho"])
    return Scenario(
        name,
        euclidean_metric(3),
        round_graph(2, "rho", (0, 1), params),
        sample_points(2, radius=0.3 * rho),
        tags=("flat", "conformally_flat", "einstein", "umbilic"),
        params=params,
    )


@catalog_entry("cylinder_s1xr", 2, "round cylinder S^1(a) x R in R^3", a=1.0)
def cylinder_s1xr(name, params):
    a = float(params["a"])
    return Scenario(
        name,
        euclidean_metric(3),
        round_graph(2, "a", (0,), params),
        sample_points(2, radius=0.3 * a),
        tags=("flat", "conformally_flat", "einstein"),
        params=params,
    )


@catalog_entry(
    "graph_flat_n2",
    2,
    "graph x3 = F(x1, x2) in R^3",
    F="0.3 * x1^2 + 0.2 * x1 * x2 - 0.1 * x2^2 + 0.1 * x1^3 - 0.05 * x1 * x2^2",
)
def graph_flat_n2(name, params):
    return Scenario(
        name,
        euclidean_metric(3),
        graph(params["F"], 2, params),
        sample_points(2),
        tags=("flat", "conformally_flat", "einstein"),
        params=params,
    )


@catalog_entry(
    "perturbed_n2",
    2,
    "graph in delta + eps Q on a three-manifold",
    eps=0.1,
    F="0.2 * x1^2 - 0.1 * x2^2 + 0.15 * x1 * x2 + 0.05 * x1^3",
    phi1="0.1 * (x1 + x2 * x3)",
    phi2="0.05 * (x3^2 - x1 * x2) + 0.02 * x2",
)
def perturbed_n2(name, params):
    return Scenario(
        name,
        perturbed_metric(3, params),
        graph(params["F"], 2, params),
        sample_points(2),
        params=params,
        conformal_factors=[
            _field(params["phi1"], 3, params),
            _field(params["phi2"], 3, params),
        ],
    )


@catalog_entry("revolution_n2", 2, "catenoid of neck radius c in R^3", c=1.0)
def revolution_n2(name, params):
    cosh = "c * (exp(x2) + exp(-x2)) / 2"
    sources = [
        "{} * cos(x1)".format(cosh),
        "{} * sin(x1)".format(cosh),
        "c * x2",
    ]
    return Scenario(
        name,
        euclidean_metric(3),
        Embedding.from_expressions(sources, 2, _numeric(params)),
        sample_points(2, radius=0.5),
        tags=("flat", "conformally_flat", "einstein"),
        params=params,
    )


def from_catalog(name, params=None):
    if name not in CATALOG:
        raise ParseError(
            "Unknown scenario {!r} (catalog: {})".format(name, ", ".join(CATALOG))
        )
    entry = CATALOG[name]
    return entry.build(name, entry.params(params))


# JSON documents


def _require(document, key, where):
    if key not in document:
        raise ParseError("{} is missing the {!r} entry".format(where, key))
    return document[key]


def _metric_from_document(spec, dim, params):
    if "components" in spec:
        try:
            return MetricField.from_table(spec["components"], dim, _numeric(params))
        except ValueError as e:
            raise ParseError("Bad metric table: {}".format(e))
    name = _require(spec, "catalog", "metric")
    if name not in METRICS:
        raise ParseError(
            "Unknown metric {!r} (known: {})".format(name, ", ".join(sorted(METRICS)))
        )
    merged = dict(params)
    merged.update(spec.get("params", {}))
    try:
        return METRICS[name](dim, merged)
    except KeyError as e:
        raise ParseError("metric {!r} needs parameter {}".format(name, e))


def _embedding_from_document(spec, n, params, orientation):
    if "graph" in spec:
        return graph(spec["graph"], n, params, orientation)
    components = _require(spec, "components", "embedding")
    if len(components) != n + 1:
        raise ParseError(
            "Embedding has {} components, expected {}".format(len(components), n + 1)
        )
    return Embedding.from_expressions(components, n, _numeric(params), orientation)


def _points_from_document(spec, n):
    if spec is None:
        return sample_points(n)
    if isinstance(spec, dict):
        return sample_points(
            n,
            count=int(spec.get("count", 5)),
            radius=float(spec.get("radius", 0.15)),
            center=float(spec.get("center", 0.0)),
        )
    points = np.atleast_2d(np.asarray(spec, dtype=float))
    if points.shape[1] != n:
        raise ParseError("Points must have {} coordinates".format(n))
    return points


def scenario_from_document(document, overrides=None):
    """Build a scenario from a parsed JSON document."""
    if not isinstance(document, dict):
        raise ParseError("A scenario document must be a JSON object")
    params = dict(document.get("params", {}))
    params.update(overrides or {})
    if "catalog" in document:
        scenario = from_catalog(document["catalog"], params)
        scenario.scenario_id = document.get("id", scenario.scenario_id)
        if "points" in document:
            scenario = scenario.with_points(
                _points_from_document(document["points"], scenario.n)
            )
        return scenario

    scenario_id = _require(document, "id", "scenario")
    dim = int(_require(document, "ambient_dim", "scenario"))
    if dim not in (3, 4):
        raise ParseError("ambient_dim must be 3 or 4, got {}".format(dim))
    n = dim - 1
    orientation = int(document.get("orientation", 1))
    metric = _metric_from_document(_require(document, "metric", "scenario"), dim, params)
    embedding_spec = _require(document, "embedding", "scenario")
    embedding = _embedding_from_document(embedding_spec, n, params, orientation)
    factors = document.get("conformal_factor") or []
    if not isinstance(factors, list):
        factors = [factors]
    height = None
    if "graph" in embedding_spec:
        height = _field(embedding_spec["graph"], n, params)
    variation = document.get("variation")
    return Scenario(
        scenario_id,
        metric,
        embedding,
        _points_from_document(document.get("points"), n),
        tags=document.get("tags", ()),
        params=params,
        conformal_factors=[_field(phi, dim, params) for phi in factors],
        height=height,
        variation=None if variation is None else _field(variation, n, params),
        description=document.get("description"),
    )


def read_document(path):
    with io.open(path, encoding="utf-8") as f:
        text = f.read()
    try:
        return json.loads(text)
    except ValueError as e:
        raise ParseError(
            "Invalid scenario JSON in {}: {}".format(path, e),
            position=getattr(e, "pos", None),
        )


def load_scenario(spec, overrides=None, verify=True):
    """A catalog id or the path of a JSON scenario document."""
    if spec in CATALOG:
        scenario = from_catalog(spec, overrides)
    elif spec.endswith(".json"):
        scenario = scenario_from_document(read_document(spec), overrides)
    else:
        raise ParseError(
            "Unknown scenario {!r}: neither a catalog id nor a .json file".format(spec)
        )
    log.debug("loaded scenario {} (n = {})".format(scenario.scenario_id, scenario.n))
    if verify:
        verify_tags(scenario)
    return scenario


# tag verification


class TagCheck(object):
    def __init__(self, tag, declared, residual):
        self.tag = tag
        self.declared = declared
        self.residual = residual

    @property
    def verified(self):
        return self.residual is not None and self.residual < TAG_TOLERANCE

    def as_dict(self):
        return {
            "tag": self.tag,
            "declared": self.declared,
            "residual": self.residual,
            "verified": self.verified,
        }


def _cotton_york(stack):
    """C_abc = nabla_c P_ab - nabla_b P_ac, the obstruction to flatness in dimension 3."""
    nabla_p = stack.nabla_schouten
    return np.transpose(nabla_p, (1, 2, 0, 3)) - np.transpose(nabla_p, (1, 0, 2, 3))


def periodic_residual(scenario):
    """Largest change of the height and metric components under a 2 pi shift."""
    fields = [scenario.height] if scenario.height is not None else []
    fields.extend(field for row in scenario.metric.components for field in row)
    residual = 0.0
    for field in fields:
        base = sample_points(field.arity, count=4, radius=np.pi, center=np.pi, seed=3)
        for axis in range(field.arity):
            shifted = base.copy()
            shifted[:, axis] += PERIOD
            residual = max(residual, float(np.max(np.abs(field(shifted) - field(base)))))
    return residual


def tag_residual(scenario, tag, geometry):
    """Largest violation of ``tag`` at the scenario's points."""
    batch = geometry.batch
    stack = geometry.ambient
    if tag == "flat":
        return float(worst(stack.riemann, batch).max())
    if tag == "conformally_flat":
        tensor = stack.weyl if stack.dim == 4 else _cotton_york(stack)
        return float(worst(tensor, batch).max())
    if tag == "einstein":
        trace_free = stack.ricci - stack.scal / stack.dim * np.eye(stack.dim)[..., None]
        return float(worst(trace_free, batch).max())
    if tag == "umbilic":
        return float(worst(geometry.surface.lo, batch).max())
    if tag == "closed":
        if scenario.height is None:
            return None
        return periodic_residual(scenario)
    raise ContractViolation("verify_tags", "unknown tag {!r}".format(tag))


def check_tags(scenario, order=MIN_STACK_ORDER):
    """A :class:`TagCheck` for every known tag, declared or not."""
    geometry = scenario.geometry(order)
    checks = OrderedDict()
    with log.timed("tag verification for {}".format(scenario.scenario_id)):
        for tag in TAGS:
            checks[tag] = TagCheck(
                tag, tag in scenario.tags, tag_residual(scenario, tag, geometry)
            )
    return checks


def verify_tags(scenario, order=MIN_STACK_ORDER):
    """Raise :class:`ScopeError` unless every declared tag holds."""
    checks = check_tags(scenario, order)
    for check in checks.values():
        if check.declared and not check.verified:
            raise ScopeError(
                "tag {}".format(check.tag),
                scenario.scenario_id,
                "declared but violated (residual {!r})".format(check.residual),
            )
    return checks


def validate_scenario(spec, overrides=None):
    """Parse, verify tags and report the jet orders the operator chains need.

    Returns a plain dict; the declared tags that fail raise :class:`ScopeError`.
    """
    scenario = load_scenario(spec, overrides, verify=False)
    checks = verify_tags(scenario)
    return OrderedDict(
        [
            ("scenario", scenario.as_dict()),
            ("tags", OrderedDict((tag, c.as_dict()) for tag, c in checks.items())),
            ("verified", sorted(t for t, c in checks.items() if c.verified)),
            ("rejected", sorted(t for t, c in checks.items() if not c.verified)),
            ("orders", order_budget(scenario.n)),
        ]
    )


def catalog_scenarios(n=None):
    """Every catalog scenario, optionally only those with hypersurface dimension ``n``."""
    for name, entry in CATALOG.items():
        if n is None or entry.n == n:
            yield from_catalog(name)


