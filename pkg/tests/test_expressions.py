import numpy as np
import pytest
from pytest import raises

from obstruction_lab import jets
from obstruction_lab.exceptions import EvaluationError, ParseError
from obstruction_lab.expressions import ScalarField, constant, parse


@pytest.mark.parametrize(
    "source, expected",
    [
        ("1 + 2 * 3", 7.0),
        ("2 ^ 3 ^ 2", 512.0),
        ("2 ** 3", 8.0),
        ("-2 ^ 2", -4.0),
        ("(1 + 2) / 4", 0.75),
        ("sqrt(16) + cos(0)", 5.0),
        ("exp(log(3))", 3.0),
        ("2 * pi", 2.0 * np.pi),
        ("1e-1 + .5", 0.6),
    ],
)
def test_constant_expressions(source, expected):
    assert float(parse(source).evaluate([])) == pytest.approx(expected)


def test_parameters_are_bound_at_parse_time():
    field = ScalarField("a * x1 + b", 2, {"a": 2.0, "b": -1.0})
    assert field([[3.0, 0.0]]).tolist() == [5.0]


def test_field_on_points():
    field = ScalarField("x1 * x2 + x3^2", 3)
    points = np.array([[1.0, 2.0, 3.0], [0.0, 1.0, -1.0]])
    assert field(points).tolist() == [11.0, 1.0]


def test_constant_field_broadcasts():
    field = constant(2.5, 2)
    assert field.is_constant
    assert field(np.zeros((3, 2))).tolist() == [2.5, 2.5, 2.5]


def test_field_on_jets():
    field = ScalarField("sin(x1) * x2", 2)
    x = jets.variables(np.array([[0.5, 2.0]]), 3)
    result = field.evaluate(x)
    assert result.value[0] == pytest.approx(np.sin(0.5) * 2.0)
    assert result.partial(0).value[0] == pytest.approx(np.cos(0.5) * 2.0)
    assert result.partial(1).value[0] == pytest.approx(np.sin(0.5))


def test_scaled():
    field = ScalarField("x1 + 1", 1).scaled(ScalarField("2 * x1", 1))
    assert field([[3.0]]).tolist() == [24.0]


@pytest.mark.parametrize(
    "source, position",
    [
        ("x1 + * x2", 5),
        ("x1 + (x2", 8),
        ("foo(x1)", 0),
        ("x1 $ x2", 3),
        ("x5", 0),
        ("x1 x2", 3),
    ],
)
def test_parse_errors_carry_the_position(source, position):
    with raises(ParseError) as excinfo:
        parse(source, arity=4 if source != "x5" else 3)
    assert excinfo.value.position == position
    assert excinfo.value.exit_code == 2
    # the message points at the offending character
    lines = str(excinfo.value).splitlines()
    assert lines[1].strip() == source
    assert lines[2].index("^") == 2 + position


@pytest.mark.parametrize(
    "source, point",
    [("1 / x1", [0.0]), ("log(x1)", [-1.0]), ("sqrt(x1)", [-1.0]), ("x1 ^ 0.5", [-2.0])],
)
def test_evaluation_errors(source, point):
    with raises(EvaluationError):
        ScalarField(source, 1)([point])


def test_singular_jet_becomes_evaluation_error():
    x = jets.variables(np.array([[0.0]]), 2)
    with raises(EvaluationError):
        ScalarField("log(x1)", 1).evaluate(x)
