# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

import os

import numpy as np

from . import click
from .exceptions import ContractViolation

THREADS_ENV = "OBSTRUCTION_LAB_THREADS"

# jet order each command needs on an n-dimensional hypersurface
_ORDER_OFFSETS = {
    "stacks": 0,
    "expansion": 3,
    "obstruction": 3,
    "identities": 3,
    "variation": 3,
    "all": 3,
    "validate": 0,
}
MIN_STACK_ORDER = 4


def required_order(command, n):
    """Smallest jet order that lets ``command`` finish without exhausting a chain.

    >>> required_order("obstruction", 3)
    6
    >>> required_order("stacks", 2)
    4
    """
    return max(MIN_STACK_ORDER, n + _ORDER_OFFSETS.get(command, 3))


def order_budget(n):
    """Jet order consumed by each operator chain, and what each command needs.

    >>> order_budget(3)["commands"]["obstruction"]
    6
    """
    return {
        "operators": {
            "L, H, intrinsic and ambient curvature": 2,
            "nabla L, nabla W, nabla Ric, Cotton": 3,
            "Hess H, Delta |lo|^2, LOP, nabla_0^2 Ric_00": 4,
            "geodesic normal chart to r^(n+1)": n + 2,
            "B_n formulas and S(g, sigma_F) coefficients": n + 3,
        },
        "commands": {
            command: required_order(command, n)
            for command in sorted(_ORDER_OFFSETS)
        },
    }


def pair(a, b):
    """Full contraction of two frame tensors of equal rank, batch axis last.

    >>> pair(np.eye(2)[..., None], np.eye(2)[..., None]).tolist()
    [2.0]
    """
    letters = "ijklm"[: np.ndim(a) - 1]
    return np.einsum("{0}...,{0}...->...".format(letters), a, b)


def norm2(a):
    """|a|^2 in an orthonormal frame."""
    return pair(a, a)


def matmul(a, b):
    """Matrix product of frame 2-tensors.

    >>> matmul(np.eye(2), 2 * np.eye(2)).tolist()
    [[2.0, 0.0], [0.0, 2.0]]
    """
    return np.einsum("ik...,kj...->ij...", a, b)


def trace(a):
    return np.einsum("ii...->...", a)


def worst(values, batch):
    """Largest absolute component per point.

    >>> worst(np.array([[1.0, -3.0], [2.0, 0.5]]), 2).tolist()
    [2.0, 3.0]
    """
    return np.abs(np.asarray(values)).reshape(-1, batch).max(axis=0)


def within(residual, scale, tol_abs=1e-10, tol_rel=1e-7):
    """True when ``residual <= tol_abs + tol_rel * scale`` everywhere.

    >>> within(1e-12, 5.0)
    True
    >>> within(1e-3, 1.0)
    False
    """
    residual = np.asarray(residual, dtype=float)
    return bool(np.all(residual <= tol_abs + tol_rel * np.asarray(scale, dtype=float)))


def to_builtin(value):
    """Turn numpy containers into plain lists and floats for JSON.

    >>> to_builtin({"a": np.arange(2.0), "b": (np.float64(1.5), 2)})
    {'a': [0.0, 1.0], 'b': [1.5, 2]}
    """
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def format_real(value):
    """
    >>> format_real(0.5)
    '5.000000e-01'
    >>> format_real(None)
    '-'
    """
    if value is None:
        return "-"
    return "{:.6e}".format(float(value))


def worker_count():
    """Worker threads for grid quadrature, from the environment."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        raise ContractViolation(THREADS_ENV, "expected an integer, got {!r}".format(raw))
    if count < 1:
        raise ContractViolation(THREADS_ENV, "must be at least 1")
    return count


def chunks(items, size):
    """
    >>> list(chunks(list(range(5)), 2))
    [[0, 1], [2, 3], [4]]
    """
    for start in range(0, len(items), size):
        yield items[start : start + size]


class RunConfig(object):
    """Options shared by every command, in one place."""

    def __init__(
        self,
        scenario,
        params=None,
        jet_order=None,
        tol_abs=1e-10,
        tol_rel=1e-7,
        json_path=None,
        points=None,
        orientation=1,
        formulas=(),
        identities=(),
        t_steps=(),
        grid=None,
        dry_run=False,
    ):
        self.scenario = scenario
        self.params = dict(params or {})
        self.jet_order = jet_order
        self.tol_abs = tol_abs
        self.tol_rel = tol_rel
        self.json_path = json_path
        self.points = points
        self.orientation = orientation
        self.formulas = tuple(formulas)
        self.identities = tuple(identities)
        self.t_steps = tuple(t_steps)
        self.grid = grid
        self.dry_run = dry_run

    def order_for(self, command, n):
        """The jet order to run ``command`` with; too small an explicit order is refused."""
        needed = required_order(command, n)
        if self.jet_order is None:
            return needed
        if self.jet_order < needed:
            raise click.BadParameter(
                "{} needs at least order {} for n = {}, got {}".format(
                    command, needed, n, self.jet_order
                ),
                param_hint="--jet-order",
            )
        return self.jet_order

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "params": self.params,
            "jet_order": self.jet_order,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "orientation": self.orientation,
            "formulas": list(self.formulas),
            "identities": list(self.identities),
            "t_steps": list(self.t_steps),
            "grid": self.grid,
        }
