"""
Curvature of the background manifold (X, g).

Raw curvature lives in :class:`Curvature` as jets in the ambient chart,
computed lazily from the metric jet. :class:`AmbientStack` projects their
values at the hypersurface points onto the adapted orthonormal frame
``e_0 = N, e_1 .. e_n`` tangent to M; frame index 0 is the normal insertion.
"""
import itertools
from functools import cached_property

import numpy as np

from . import jets
from .exceptions import ContractViolation, GeometryError
from .expressions import Binary, Call, Number, ScalarField, constant
from .logging import log

_LETTERS = "abcdfghijkl"


class MetricField(object):
    """Riemannian metric given by a symmetric table of component fields."""

    def __init__(self, components):
        self.components = components
        self.dim = len(components)
        for a, row in enumerate(components):
            if len(row) != self.dim:
                raise ValueError("metric table must be square")
            for b in range(a):
                if row[b] is not components[b][a]:
                    raise ValueError("metric table must be symmetric")

    @classmethod
    def from_table(cls, table, dim, parameters=None):
        """Build from ``{"ab": expression}`` entries, missing entries default to delta.

        Keys use one-based indices; ``"12"`` and ``"21"`` name the same entry.
        """
        fields = [[None] * dim for _ in range(dim)]
        for key, source in (table or {}).items():
            a, b = int(key[0]) - 1, int(key[1]) - 1
            if not (0 <= a < dim and 0 <= b < dim):
                raise ValueError("metric component {!r} out of range".format(key))
            field = ScalarField(source, dim, parameters)
            fields[a][b] = fields[b][a] = field
        for a in range(dim):
            for b in range(a, dim):
                if fields[a][b] is None:
                    fields[a][b] = fields[b][a] = constant(float(a == b), dim)
        return cls(fields)

    @classmethod
    def euclidean(cls, dim):
        return cls.from_table({}, dim)

    def conformal(self, phi):
        """The metric ``exp(2 phi) g`` for an ambient scalar field ``phi``."""
        factor = ScalarField.from_tree(
            _exp_twice(phi), self.dim, "exp(2 * ({}))".format(phi.source)
        )
        fields = [[None] * self.dim for _ in range(self.dim)]
        for a in range(self.dim):
            for b in range(a, self.dim):
                fields[a][b] = fields[b][a] = self.components[a][b].scaled(factor)
        return MetricField(fields)

    def lift(self, base_point, order):
        """Metric jet of shape (dim, dim, B) at the rows of ``base_point``."""
        base_point = np.atleast_2d(base_point)
        xs = jets.variables(base_point, order)
        zero = xs[0] * 0.0
        rows = []
        for a in range(self.dim):
            row = []
            for b in range(self.dim):
                value = self.components[a][b].evaluate(xs)
                if not isinstance(value, jets.Jet):
                    value = zero + value
                row.append(value)
            rows.append(jets.stack(row))
        metric = jets.stack(rows)
        _check_positive(metric.value, base_point)
        return metric

    def __call__(self, point):
        point = np.asarray(point, dtype=float)
        return np.array([[c(point) for c in row] for row in self.components])


def _exp_twice(phi):
    doubled = Binary("2 * ({})".format(phi.source), "*", Number("2", 2.0), phi.tree)
    return Call("exp({})".format(doubled), "exp", doubled)


def _check_positive(values, base_point):
    matrices = np.moveaxis(values, -1, 0)
    for index, matrix in enumerate(matrices):
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise GeometryError(
                "metric is not positive definite", tuple(base_point[index])
            )


def christoffel_symbols(metric, inverse):
    """Gamma^a_bc of a metric jet, upper index first."""
    d = metric.gradient()
    lowered = (d.transpose(1, 0, 2) + d.transpose(1, 2, 0) - d) * 0.5
    return jets.einsum("ad,dbc->abc", inverse, lowered)


def riemann_tensor(christoffel, metric):
    """Fully lowered R_ijkl = g(R(d_i, d_j) d_k, d_l)."""
    dgamma = christoffel.gradient().transpose(0, 2, 3, 1)
    quadratic = jets.einsum("mjk,lim->ijkl", christoffel, christoffel)
    raised = (
        dgamma
        - dgamma.transpose(1, 0, 2, 3)
        + quadratic
        - quadratic.transpose(1, 0, 2, 3)
    )
    return jets.einsum("ijkm,ml->ijkl", raised, metric)


def covariant_derivative(tensor, christoffel):
    """Covariant derivative of a covariant tensor jet, derivative index first."""
    rank = len(tensor.shape)
    result = tensor.gradient()
    letters = _LETTERS[:rank]
    for slot in range(rank):
        inner = letters[:slot] + "m" + letters[slot + 1 :]
        term = jets.einsum(
            "me{},{}->e{}".format(letters[slot], inner, letters), christoffel, tensor
        )
        result = result - term
    return result


def kulkarni_nomizu(p, g):
    """(P KN g)_ijkl = P_ik g_jl - P_jk g_il + P_jl g_ik - P_il g_jk, on arrays."""
    return (
        np.einsum("ik...,jl...->ijkl...", p, g)
        - np.einsum("jk...,il...->ijkl...", p, g)
        + np.einsum("jl...,ik...->ijkl...", p, g)
        - np.einsum("il...,jk...->ijkl...", p, g)
    )


def _kn_jets(p, g):
    first = jets.einsum("ik,jl->ijkl", p, g)
    second = jets.einsum("jk,il->ijkl", p, g)
    return first - second + first.transpose(1, 0, 3, 2) - second.transpose(1, 0, 3, 2)


class Curvature(object):
    """Curvature jets of one metric jet; attributes are computed on first use.

    Shared by the ambient metric and the induced metric of the hypersurface.
    """

    def __init__(self, metric):
        self.metric = metric
        self.dim = metric.shape[0]

    @cached_property
    def inverse(self):
        return jets.inverse(self.metric)

    @cached_property
    def christoffel(self):
        return christoffel_symbols(self.metric, self.inverse)

    @cached_property
    def riemann(self):
        return riemann_tensor(self.christoffel, self.metric)

    @cached_property
    def ricci(self):
        return jets.einsum("il,ijkl->jk", self.inverse, self.riemann)

    @cached_property
    def scal(self):
        return jets.einsum("jk,jk->", self.inverse, self.ricci)

    @cached_property
    def jbar(self):
        return self.scal / (2.0 * (self.dim - 1))

    @cached_property
    def schouten(self):
        if self.dim < 3:
            raise ContractViolation("schouten", "dimension {}".format(self.dim))
        return (self.ricci - self.jbar * self.metric) / (self.dim - 2.0)

    @cached_property
    def weyl(self):
        return self.riemann + _kn_jets(self.schouten, self.metric)

    @cached_property
    def nabla_riemann(self):
        return covariant_derivative(self.riemann, self.christoffel)

    @cached_property
    def nabla_ricci(self):
        return covariant_derivative(self.ricci, self.christoffel)

    @cached_property
    def d_scal(self):
        return self.scal.gradient()

    @cached_property
    def nabla_schouten(self):
        djbar = self.d_scal / (2.0 * (self.dim - 1))
        metric = self.metric.truncate(djbar.order)
        gradient = jets.einsum("e,ab->eab", djbar, metric)
        return (self.nabla_ricci - gradient) / (self.dim - 2.0)

    @cached_property
    def nabla_weyl(self):
        correction = jets.stack(
            [_kn_jets(self.nabla_schouten[e], self.metric) for e in range(self.dim)]
        )
        return self.nabla_riemann + correction

    @cached_property
    def nabla2_ricci(self):
        return covariant_derivative(self.nabla_ricci, self.christoffel)

    @cached_property
    def hess_scal(self):
        return covariant_derivative(self.d_scal, self.christoffel)

    @cached_property
    def cotton(self):
        """C_bcd = g^{ea} (nabla_e W)_{bcda}; defined for dimension 4."""
        if self.dim != 4:
            raise ContractViolation("cotton", "ambient dimension must be 4")
        return jets.einsum("ea,ebcda->bcd", self.inverse, self.nabla_weyl)


def curvature_from_metric(metric, point, order):
    """Raw curvature jets of ``metric`` around the rows of ``point`` (shape (B, m))."""
    if order < 2:
        raise ContractViolation("curvature_from_metric", "jet order must be >= 2")
    log.debug("lifting ambient metric at order {}".format(order))
    return Curvature(metric.lift(point, order))


def to_frame(values, basis, rank):
    """Project the first ``rank`` slots of an array onto ``basis`` (shape (m, m, B))."""
    for slot in range(rank):
        moved = np.moveaxis(values, slot, 0)
        moved = np.einsum("i...b,iab->a...b", moved, basis)
        values = np.moveaxis(moved, 0, slot)
    return values


def project(tensor, frame):
    """Insert the columns of a frame jet into every slot of a covariant tensor jet."""
    rank = len(tensor.shape)
    letters = _LETTERS[:rank]
    result = tensor
    for slot in range(rank):
        out = letters[:slot] + "z" + letters[slot + 1 :]
        result = jets.einsum(
            "{},{}z->{}".format(letters, letters[slot], out), result, frame
        )
    return result


class AmbientStack(object):
    """Ambient curvature at hypersurface points in the adapted orthonormal frame.

    ``frame`` has shape (m, m, B); column 0 is the unit normal. Every attribute
    is an array with the batch axis last.
    """

    def __init__(self, raw, frame):
        self.raw = raw
        self.frame = frame
        self.dim = raw.dim
        self.n = raw.dim - 1

    def _framed(self, tensor):
        return to_frame(tensor.value, self.frame, len(tensor.shape))

    @cached_property
    def riemann(self):
        return self._framed(self.raw.riemann)

    @cached_property
    def ricci(self):
        return self._framed(self.raw.ricci)

    @cached_property
    def scal(self):
        return self.raw.scal.value

    @cached_property
    def jbar(self):
        return self.scal / (2.0 * self.n)

    @cached_property
    def schouten(self):
        return self._framed(self.raw.schouten)

    @cached_property
    def weyl(self):
        return self._framed(self.raw.weyl)

    @cached_property
    def einstein(self):
        identity = np.eye(self.dim)[..., None]
        return self.ricci - 0.5 * self.scal * identity

    @property
    def G_normal(self):
        return self.riemann[0, 1:, 1:, 0]

    @property
    def W_hat(self):
        return self.weyl[0, 1:, 1:, 0]

    @property
    def W0(self):
        return self.weyl[1:, 1:, 1:, 0]

    @property
    def ric0(self):
        return self.ricci[1:, 0]

    @property
    def p0(self):
        return self.schouten[1:, 0]

    @property
    def p00(self):
        return self.schouten[0, 0]

    @property
    def ric00(self):
        return self.ricci[0, 0]

    @cached_property
    def nabla_riemann(self):
        return self._framed(self.raw.nabla_riemann)

    @cached_property
    def nabla_weyl(self):
        return self._framed(self.raw.nabla_weyl)

    @cached_property
    def nabla_ricci(self):
        return self._framed(self.raw.nabla_ricci)

    @cached_property
    def nabla_schouten(self):
        return self._framed(self.raw.nabla_schouten)

    @cached_property
    def d0_ric00(self):
        return self.nabla_ricci[0, 0, 0]

    @cached_property
    def d0d0_ric00(self):
        return self._framed(self.raw.nabla2_ricci)[0, 0, 0, 0]

    @cached_property
    def d_scal(self):
        return self._framed(self.raw.d_scal)

    @property
    def scal_p(self):
        return self.d_scal[0]

    @cached_property
    def scal_pp(self):
        return self._framed(self.raw.hess_scal)[0, 0]

    @property
    def jbar_p(self):
        return self.scal_p / (2.0 * self.n)

    @property
    def jbar_pp(self):
        return self.scal_pp / (2.0 * self.n)

    @property
    def d0_R_0ij0(self):
        return self.nabla_riemann[0, 0, 1:, 1:, 0]

    @property
    def d0_W_0ij0(self):
        return self.nabla_weyl[0, 0, 1:, 1:, 0]

    @cached_property
    def cotton0(self):
        return cotton_hypersurface(self)


def _symmetrized(values):
    return 0.5 * (values + np.swapaxes(values, 0, 1))


def cotton_hypersurface(stack):
    """C_0(ij) with the derivative index summed over the whole adapted frame."""
    if stack.dim != 4:
        raise ContractViolation("cotton_hypersurface", "ambient dimension must be 4")
    c = np.einsum("aija...->ij...", stack.nabla_weyl[:, 0, 1:, 1:, :])
    return _symmetrized(c)


def cotton_from_ambient(stack):
    """C_0(ij) from the ambient-chart Cotton tensor, projected afterwards."""
    c = to_frame(stack.raw.cotton.value, stack.frame, 3)
    return _symmetrized(c[0, 1:, 1:])


def symmetry_residuals(riemann):
    """Largest violation of the algebraic curvature symmetries (arrays, batch last)."""
    pair = np.abs(riemann + np.swapaxes(riemann, 0, 1)).max()
    last = np.abs(riemann + np.swapaxes(riemann, 2, 3)).max()
    swap = np.abs(riemann - np.transpose(riemann, (2, 3, 0, 1, 4))).max()
    bianchi = np.abs(
        riemann
        + np.transpose(riemann, (1, 2, 0, 3, 4))
        + np.transpose(riemann, (2, 0, 1, 3, 4))
    ).max()
    return {"antisymmetry": max(pair, last), "pair": swap, "bianchi": bianchi}


def weyl_traces(weyl):
    """Largest trace of W over every pair of slots (orthonormal frame)."""
    traces = []
    for first, second in itertools.combinations(range(4), 2):
        traces.append(np.abs(np.trace(weyl, axis1=first, axis2=second)).max())
    return max(traces)
