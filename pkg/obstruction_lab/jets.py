"""
Truncated multivariate Taylor jets.

A :class:`Jet` holds the Taylor coefficients ``d^alpha f / alpha!`` of a
function at a base point, for every multi-index ``alpha`` of total degree at
most ``order``. Coefficients live in the last axis of ``coeffs`` in
graded-lexicographic order. The axis before it is the batch axis (one entry
per base point) and any leading axes are tensor axes, so a field of 4x4
matrices evaluated at B points has ``coeffs.shape == (4, 4, B, ncoeff)``.

All arithmetic truncates: combining jets of different orders yields a jet of
the smaller order.
"""
import itertools
import math
from functools import lru_cache

import numpy as np
from scipy import sparse

from .exceptions import InsufficientOrderError, SingularJetError


def ncoeff(arity, order):
    """Number of multi-indices of the given arity with total degree <= order.

    >>> ncoeff(4, 6)
    210
    >>> ncoeff(3, 6)
    84
    """
    return math.comb(arity + order, order)


@lru_cache(maxsize=None)
def multi_indices(arity, order):
    """Graded-lexicographic multi-indices of total degree <= order.

    >>> multi_indices(2, 2).tolist()
    [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
    """
    rows = []
    for degree in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(arity), degree):
            alpha = [0] * arity
            for axis in combo:
                alpha[axis] += 1
            rows.append(alpha)
    table = np.array(rows, dtype=int).reshape(-1, arity)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _lookup(arity, order):
    return {tuple(alpha): i for i, alpha in enumerate(multi_indices(arity, order))}


@lru_cache(maxsize=None)
def _product_table(arity, order):
    alphas = multi_indices(arity, order)
    degrees = alphas.sum(axis=1)
    lookup = _lookup(arity, order)
    left, right, target = [], [], []
    for i, a in enumerate(alphas):
        for j in np.nonzero(degrees <= order - degrees[i])[0]:
            left.append(i)
            right.append(j)
            target.append(lookup[tuple(a + alphas[j])])
    npairs = len(target)
    summation = sparse.csr_matrix(
        (np.ones(npairs), (target, np.arange(npairs))), shape=(len(alphas), npairs)
    )
    return np.array(left), np.array(right), summation


@lru_cache(maxsize=None)
def _partial_table(arity, order, axis):
    lookup = _lookup(arity, order)
    alphas = multi_indices(arity, order - 1)
    step = np.eye(arity, dtype=int)[axis]
    source = np.array([lookup[tuple(alpha + step)] for alpha in alphas], dtype=int)
    return source, (alphas[:, axis] + 1).astype(float)


@lru_cache(maxsize=None)
def _antiderivative_table(arity, order, axis):
    lookup = _lookup(arity, order)
    targets = multi_indices(arity, order + 1)
    step = np.eye(arity, dtype=int)[axis]
    source = np.full(len(targets), -1, dtype=int)
    factors = np.zeros(len(targets))
    for i, gamma in enumerate(targets):
        if gamma[axis] > 0:
            source[i] = lookup[tuple(gamma - step)]
            factors[i] = 1.0 / gamma[axis]
    return source, factors


@lru_cache(maxsize=None)
def _slice_table(arity, order, axis, power):
    lookup = _lookup(arity, order)
    betas = multi_indices(arity - 1, order - power)
    return np.array(
        [lookup[tuple(np.insert(beta, axis, power))] for beta in betas], dtype=int
    )


def _collect(terms, summation):
    shape = terms.shape[:-1]
    flat = terms.reshape(-1, terms.shape[-1])
    out = np.asarray(summation.dot(flat.T)).T
    return out.reshape(shape + (summation.shape[0],))


class Jet(object):
    # Let ``ndarray * jet`` fall through to Jet.__rmul__.
    __array_ufunc__ = None

    def __init__(self, coeffs, arity, order, base_point=None):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim < 2 or coeffs.shape[-1] != ncoeff(arity, order):
            raise ValueError(
                "coefficient array of shape {} does not fit arity {} order {}".format(
                    coeffs.shape, arity, order
                )
            )
        self.coeffs = coeffs
        self.arity = arity
        self.order = order
        self.base_point = base_point

    def __repr__(self):
        return "Jet(shape={}, batch={}, arity={}, order={})".format(
            self.shape, self.batch, self.arity, self.order
        )

    @classmethod
    def constant(cls, value, arity, order):
        """Jet of a locally constant function; ``value`` carries the batch axis last."""
        value = np.atleast_1d(np.asarray(value, dtype=float))
        coeffs = np.zeros(value.shape + (ncoeff(arity, order),))
        coeffs[..., 0] = value
        return cls(coeffs, arity, order)

    @property
    def shape(self):
        return self.coeffs.shape[:-2]

    @property
    def batch(self):
        return self.coeffs.shape[-2]

    @property
    def value(self):
        return self.coeffs[..., 0]

    def __getitem__(self, index):
        coeffs = self.coeffs[index]
        if coeffs.ndim < 2:
            raise IndexError("indexing may only address tensor axes")
        return Jet(coeffs, self.arity, self.order, self.base_point)

    def __len__(self):
        return self.coeffs.shape[0]

    def _new(self, coeffs, order=None):
        return Jet(
            coeffs, self.arity, self.order if order is None else order, self.base_point
        )

    def truncate(self, order):
        if order > self.order:
            raise InsufficientOrderError("truncate", self.order)
        if order == self.order:
            return self
        return self._new(self.coeffs[..., : ncoeff(self.arity, order)], order)

    def _aligned(self, other):
        if other.arity != self.arity:
            raise ValueError(
                "cannot combine jets of arity {} and {}".format(self.arity, other.arity)
            )
        order = min(self.order, other.order)
        return self.truncate(order), other.truncate(order)

    def _shifted(self, constant):
        constant = np.asarray(constant, dtype=float)
        shape = np.broadcast_shapes(self.coeffs.shape[:-1], constant.shape)
        coeffs = np.broadcast_to(self.coeffs, shape + self.coeffs.shape[-1:]).copy()
        coeffs[..., 0] += constant
        return self._new(coeffs)

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._aligned(other)
            return a._new(a.coeffs + b.coeffs)
        return self._shifted(other)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self._aligned(other)
            left, right, summation = _product_table(a.arity, a.order)
            terms = a.coeffs[..., left] * b.coeffs[..., right]
            return a._new(_collect(terms, summation))
        other = np.asarray(other, dtype=float)
        return self._new(self.coeffs * other[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise SingularJetError("division", 0.0)
        return self._new(self.coeffs / other[..., None])

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            return exp(exponent * log(self))
        if float(exponent).is_integer() and exponent >= 0:
            return self._integer_power(int(exponent))
        return power(self, float(exponent))

    def _integer_power(self, exponent):
        result = None
        base = self
        while exponent:
            if exponent & 1:
                result = base if result is None else result * base
            exponent >>= 1
            if exponent:
                base = base * base
        if result is None:
            return self._new(np.zeros_like(self.coeffs))._shifted(1.0)
        return result

    def reciprocal(self):
        return power(self, -1.0)

    def partial(self, axis):
        """Derivative along one chart axis; the order drops by one."""
        if self.order < 1:
            raise InsufficientOrderError("partial derivative d/dx{}".format(axis))
        source, factors = _partial_table(self.arity, self.order, axis)
        return self._new(self.coeffs[..., source] * factors, self.order - 1)

    def gradient(self):
        """Stack of all first partials, derivative index first."""
        return stack([self.partial(axis) for axis in range(self.arity)])

    def antiderivative(self, axis):
        """Primitive vanishing on the hyperplane ``x[axis] = 0``; order grows by one."""
        source, factors = _antiderivative_table(self.arity, self.order, axis)
        padded = np.concatenate(
            [self.coeffs, np.zeros(self.coeffs.shape[:-1] + (1,))], axis=-1
        )
        return self._new(padded[..., source] * factors, self.order + 1)

    def coefficient_slice(self, axis, power):
        """Coefficient of ``x[axis] ** power`` as a jet in the remaining variables."""
        if power > self.order:
            raise InsufficientOrderError(
                "coefficient of x{}^{}".format(axis, power), self.order
            )
        source = _slice_table(self.arity, self.order, axis, power)
        return Jet(self.coeffs[..., source], self.arity - 1, self.order - power)

    def insert_axis(self, axis, power=0, order=None):
        """Embed ``f(x) * y**power`` as a jet with a new variable ``y`` at ``axis``.

        The result is only known through degree ``self.order + power``.
        """
        order = self.order + power if order is None else min(order, self.order + power)
        arity = self.arity + 1
        result = np.zeros(self.coeffs.shape[:-1] + (ncoeff(arity, order),))
        if power <= order:
            target = _slice_table(arity, order, axis, power)
            result[..., target] = self.coeffs[..., : len(target)]
        return Jet(result, arity, order)

    def transpose(self, *axes):
        """Permute tensor axes."""
        rank = len(self.shape)
        axes = axes or tuple(reversed(range(rank)))
        return self._new(np.transpose(self.coeffs, tuple(axes) + (rank, rank + 1)))

    @property
    def T(self):
        return self.transpose()


def stack(jets, axis=0):
    order = min(jet.order for jet in jets)
    arity = jets[0].arity
    coeffs = [jet.truncate(order).coeffs for jet in jets]
    batch = max(c.shape[-2] for c in coeffs)
    coeffs = [np.broadcast_to(c, c.shape[:-2] + (batch, c.shape[-1])) for c in coeffs]
    return Jet(np.stack(coeffs, axis=axis), arity, order)


def total(jets):
    """Sum of an iterable of jets (or numbers)."""
    result = 0.0
    for jet in jets:
        result = jet + result
    return result


def einsum(subscripts, *operands):
    """Tensor contraction of one or two jets, e.g. ``einsum("ij,jk->ik", a, b)``.

    Subscripts name tensor axes only; batch and coefficient axes are implicit.
    """
    inputs, output = subscripts.replace(" ", "").split("->")
    inputs = inputs.split(",")
    if len(inputs) != len(operands):
        raise ValueError("subscripts do not match {} operands".format(len(operands)))
    if len(operands) == 1:
        (jet,) = operands
        coeffs = np.einsum("{}...->{}...".format(inputs[0], output), jet.coeffs)
        return jet._new(coeffs)
    if len(operands) != 2:
        raise ValueError("einsum contracts at most two jets at a time")
    a, b = operands
    a, b = a._aligned(b)
    left, right, summation = _product_table(a.arity, a.order)
    terms = np.einsum(
        "{}...,{}...->{}...".format(inputs[0], inputs[1], output),
        a.coeffs[..., left],
        b.coeffs[..., right],
    )
    return a._new(_collect(terms, summation))


def _univariate(jet, derivatives):
    """Compose with an analytic function given ``f^(k)(c) / k!`` at the constant c."""
    shifted = jet - jet.value
    result = None
    for k in range(jet.order, -1, -1):
        if result is None:
            result = shifted * 0.0 + derivatives(k)
        else:
            result = result * shifted + derivatives(k)
    return result


def exp(jet):
    c = np.exp(jet.value)
    return _univariate(jet, lambda k: c / math.factorial(k))


def log(jet):
    c = jet.value
    if np.any(c <= 0):
        raise SingularJetError("log", float(np.min(c)))

    def derivatives(k):
        if k == 0:
            return np.log(c)
        return (-1.0) ** (k + 1) / (k * c ** k)

    return _univariate(jet, derivatives)


def generalized_binomials(exponent, order):
    """binom(exponent, k) for k = 0 .. order, valid for any real exponent.

    >>> generalized_binomials(-1.0, 3)
    [1.0, -1.0, 1.0, -1.0]
    >>> generalized_binomials(0.5, 2)
    [1.0, 0.5, -0.125]
    """
    coefficients = [1.0]
    for k in range(1, order + 1):
        coefficients.append(coefficients[-1] * (exponent - k + 1) / k)
    return coefficients


def power(jet, exponent):
    c = jet.value
    if float(exponent).is_integer() and exponent >= 0:
        return jet._integer_power(int(exponent))
    if np.any(c == 0) or (np.any(c < 0) and not float(exponent).is_integer()):
        raise SingularJetError("power {!r}".format(exponent), float(np.min(c)))
    binomials = generalized_binomials(exponent, jet.order)
    return _univariate(jet, lambda k: binomials[k] * c ** (exponent - k))


def sqrt(jet):
    return power(jet, 0.5)


def sin(jet):
    c = jet.value
    return _univariate(jet, lambda k: np.sin(c + k * np.pi / 2) / math.factorial(k))


def cos(jet):
    c = jet.value
    return _univariate(jet, lambda k: np.cos(c + k * np.pi / 2) / math.factorial(k))


UNIVARIATE = {"exp": exp, "log": log, "sqrt": sqrt, "sin": sin, "cos": cos}


def jet_arith(a, b, op):
    """Dispatch one of the elementary jet operations by name."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose_univariate":
        if b == "inverse":
            return a.reciprocal()
        return UNIVARIATE[b](a)
    raise ValueError("unknown jet operation {!r}".format(op))


def variables(base_point, order):
    """Coordinate jets ``x_i`` around each row of ``base_point`` (shape (B, m))."""
    base_point = np.atleast_2d(np.asarray(base_point, dtype=float))
    batch, arity = base_point.shape
    jets = []
    for axis in range(arity):
        coeffs = np.zeros((batch, ncoeff(arity, order)))
        coeffs[:, 0] = base_point[:, axis]
        if order >= 1:
            coeffs[:, 1 + axis] = 1.0
        jets.append(Jet(coeffs, arity, order, base_point))
    return jets


def lift(field, base_point, order):
    """Jet of ``field`` at ``base_point``: coefficient alpha is d^alpha f / alpha!."""
    return field.evaluate(variables(base_point, order))


def inverse(matrix):
    """Inverse of a square-matrix jet via a Neumann series around its value."""
    value = np.moveaxis(matrix.value, -1, 0)
    try:
        inverse_value = np.linalg.inv(value)
    except np.linalg.LinAlgError:
        raise SingularJetError("matrix inverse", 0.0)
    base = Jet.constant(np.moveaxis(inverse_value, 0, -1), matrix.arity, matrix.order)
    step = -einsum("ij,jk->ik", base, matrix - matrix.value)
    result = base
    term = base
    for _ in range(matrix.order):
        term = einsum("ij,jk->ik", step, term)
        result = result + term
    return result


def det(matrix):
    """Determinant by cofactor expansion along the first row."""
    size = matrix.shape[0]
    if size == 1:
        return matrix[0, 0]
    if size == 2:
        return matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]
    result = None
    rows = list(range(1, size))
    for col in range(size):
        cols = [c for c in range(size) if c != col]
        minor = Jet(matrix.coeffs[np.ix_(rows, cols)], matrix.arity, matrix.order)
        term = matrix[0, col] * det(minor)
        if col % 2:
            term = -term
        result = term if result is None else result + term
    return result


class Substitution(object):
    """Composition ``F(p + y(x))`` for inner jets ``y`` with vanishing constant term.

    The monomials ``y^alpha`` are built once, each from a predecessor of lower
    degree, so every outer jet composed through the same substitution costs a
    single matrix product.
    """

    def __init__(self, inner, order=None):
        shifted = inner - inner.value
        self.outer_arity = inner.shape[0]
        self.arity = inner.arity
        self.order = inner.order if order is None else min(order, inner.order)
        shifted = shifted.truncate(self.order)
        alphas = multi_indices(self.outer_arity, self.order)
        lookup = _lookup(self.outer_arity, self.order)
        one = Jet.constant(np.ones(inner.batch), self.arity, self.order)
        monomials = [one]
        for alpha in alphas[1:]:
            axis = int(np.nonzero(alpha)[0][0])
            previous = alpha.copy()
            previous[axis] -= 1
            monomials.append(monomials[lookup[tuple(previous)]] * shifted[axis])
        self.matrix = np.stack([m.coeffs for m in monomials], axis=-2)

    def __call__(self, outer):
        if outer.arity != self.outer_arity:
            raise ValueError(
                "outer jet has arity {}, substitution expects {}".format(
                    outer.arity, self.outer_arity
                )
            )
        order = min(outer.order, self.order)
        outer_size = ncoeff(self.outer_arity, order)
        inner_size = ncoeff(self.arity, order)
        coeffs = np.einsum(
            "...bf,bfk->...bk",
            outer.coeffs[..., :outer_size],
            self.matrix[:, :outer_size, :inner_size],
        )
        return Jet(coeffs, self.arity, order)
