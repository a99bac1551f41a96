"""
Closed-form scalar fields parsed from a small infix grammar.

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := ("-" | "+") factor | power
    power   := atom (("^" | "**") factor)?
    atom    := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

Names are the chart variables ``x1 .. xm``, the constant ``pi``, the
functions sin, cos, exp, log, sqrt and any scenario parameter bound at parse
time. Fields evaluate on floats, numpy arrays and jets alike.
"""
import re

import numpy as np

from . import jets
from .exceptions import EvaluationError, ParseError, SingularJetError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _is_jet(value):
    return isinstance(value, jets.Jet)


class Node(object):
    def __init__(self, text):
        self.text = text

    def __str__(self):
        return self.text

    def evaluate(self, variables):
        raise NotImplementedError

    @property
    def is_constant(self):
        return False


class Number(Node):
    def __init__(self, text, value):
        super(Number, self).__init__(text)
        self.value = value

    def evaluate(self, variables):
        return self.value

    @property
    def is_constant(self):
        return True


class Variable(Node):
    def __init__(self, text, index):
        super(Variable, self).__init__(text)
        self.index = index

    def evaluate(self, variables):
        return variables[self.index]


class Negate(Node):
    def __init__(self, text, operand):
        super(Negate, self).__init__(text)
        self.operand = operand

    def evaluate(self, variables):
        return -self.operand.evaluate(variables)

    @property
    def is_constant(self):
        return self.operand.is_constant


class Binary(Node):
    def __init__(self, text, op, left, right):
        super(Binary, self).__init__(text)
        self.op = op
        self.left = left
        self.right = right

    @property
    def is_constant(self):
        return self.left.is_constant and self.right.is_constant

    def evaluate(self, variables):
        left = self.left.evaluate(variables)
        right = self.right.evaluate(variables)
        try:
            if self.op == "+":
                return left + right
            if self.op == "-":
                return left - right
            if self.op == "*":
                return left * right
            if self.op == "/":
                if not _is_jet(right) and np.any(np.asarray(right) == 0):
                    raise EvaluationError(self.text, "division by zero")
                return left / right
            return self._power(left, right)
        except SingularJetError as e:
            raise EvaluationError(self.text, str(e))

    def _power(self, base, exponent):
        if _is_jet(base) or _is_jet(exponent):
            if not _is_jet(base):
                base = exponent * 0.0 + base
            return base ** exponent
        base = np.asarray(base, dtype=float)
        if np.any(base < 0) and not float(np.asarray(exponent)).is_integer():
            raise EvaluationError(self.text, "negative base with fractional exponent")
        if np.any(base == 0) and np.any(np.asarray(exponent) < 0):
            raise EvaluationError(self.text, "division by zero")
        return base ** exponent


class Call(Node):
    def __init__(self, text, name, argument):
        super(Call, self).__init__(text)
        self.name = name
        self.argument = argument

    @property
    def is_constant(self):
        return self.argument.is_constant

    def evaluate(self, variables):
        argument = self.argument.evaluate(variables)
        if _is_jet(argument):
            try:
                return jets.UNIVARIATE[self.name](argument)
            except SingularJetError as e:
                raise EvaluationError(self.text, str(e))
        argument = np.asarray(argument, dtype=float)
        if self.name == "log" and np.any(argument <= 0):
            raise EvaluationError(self.text, "log of a non-positive value")
        if self.name == "sqrt" and np.any(argument < 0):
            raise EvaluationError(self.text, "sqrt of a negative value")
        return getattr(np, self.name)(argument)


class _Parser(object):
    def __init__(self, source, arity, parameters):
        self.source = source
        self.arity = arity
        self.parameters = parameters
        self.tokens = list(self._tokenize())
        self.index = 0

    def _tokenize(self):
        position = 0
        source = self.source
        while position < len(source):
            if source[position:].strip() == "":
                break
            match = _TOKEN.match(source, position)
            if match is None or match.end() == position:
                stripped = len(source) - len(source[position:].lstrip())
                raise ParseError("Unexpected character", source, stripped)
            kind = match.lastgroup
            start = match.start(kind)
            yield kind, match.group(kind), start
            position = match.end()
        yield "end", "", len(source)

    def _peek(self):
        return self.tokens[self.index]

    def _advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _expect(self, text):
        kind, value, position = self._advance()
        if value != text or kind == "end":
            raise ParseError("Expected {!r}".format(text), self.source, position)

    def _text(self, start):
        end = self.tokens[self.index - 1]
        return self.source[start : end[2] + len(end[1])].strip()

    def parse(self):
        node = self._expression()
        kind, value, position = self._peek()
        if kind != "end":
            raise ParseError("Unexpected token {!r}".format(value), self.source, position)
        return node

    def _expression(self):
        start = self._peek()[2]
        node = self._term()
        while self._peek()[1] in ("+", "-") and self._peek()[0] == "op":
            op = self._advance()[1]
            right = self._term()
            node = Binary(self._text(start), op, node, right)
        return node

    def _term(self):
        start = self._peek()[2]
        node = self._factor()
        while self._peek()[1] in ("*", "/") and self._peek()[0] == "op":
            op = self._advance()[1]
            right = self._factor()
            node = Binary(self._text(start), op, node, right)
        return node

    def _factor(self):
        kind, value, start = self._peek()
        if kind == "op" and value in ("-", "+"):
            self._advance()
            operand = self._factor()
            if value == "+":
                return operand
            return Negate(self._text(start), operand)
        return self._power()

    def _power(self):
        start = self._peek()[2]
        node = self._atom()
        if self._peek()[1] in ("^", "**") and self._peek()[0] == "op":
            self._advance()
            exponent = self._factor()
            node = Binary(self._text(start), "^", node, exponent)
        return node

    def _atom(self):
        kind, value, position = self._advance()
        if kind == "number":
            return Number(value, float(value))
        if kind == "name":
            return self._name(value, position)
        if kind == "op" and value == "(":
            node = self._expression()
            self._expect(")")
            return node
        if kind == "end":
            raise ParseError("Unexpected end of expression", self.source, position)
        raise ParseError("Unexpected token {!r}".format(value), self.source, position)

    def _name(self, name, position):
        if name in FUNCTIONS:
            self._expect("(")
            argument = self._expression()
            self._expect(")")
            return Call(self._text(position), name, argument)
        if name == "pi":
            return Number(name, np.pi)
        if name in self.parameters:
            return Number(name, float(self.parameters[name]))
        match = re.match(r"^x([1-9])$", name)
        if match:
            index = int(match.group(1)) - 1
            if index >= self.arity:
                raise ParseError(
                    "Variable {} exceeds chart dimension {}".format(name, self.arity),
                    self.source,
                    position,
                )
            return Variable(name, index)
        raise ParseError("Unknown name {!r}".format(name), self.source, position)


def parse(source, arity=4, parameters=None):
    """Parse ``source`` into an expression tree.

    >>> str(parse("eps * sin(x1)", parameters={"eps": 0.5}))
    'eps * sin(x1)'
    >>> float(parse("2 ^ 3").evaluate([]))
    8.0
    """
    if not isinstance(source, str):
        source = repr(float(source))
    return _Parser(source, arity, parameters or {}).parse()


class ScalarField(object):
    """An analytic function of ``arity`` chart variables."""

    def __init__(self, source, arity, parameters=None):
        self.source = source
        self.arity = arity
        self.tree = parse(source, arity, parameters)

    @classmethod
    def from_tree(cls, tree, arity, source=None):
        field = cls.__new__(cls)
        field.source = source if source is not None else str(tree)
        field.arity = arity
        field.tree = tree
        return field

    def __repr__(self):
        return "ScalarField({!r}, arity={})".format(self.source, self.arity)

    @property
    def is_constant(self):
        return self.tree.is_constant

    def evaluate(self, variables):
        return self.tree.evaluate(variables)

    def __call__(self, point):
        point = np.asarray(point, dtype=float)
        value = self.tree.evaluate([point[..., i] for i in range(self.arity)])
        return np.broadcast_to(np.asarray(value, dtype=float), point.shape[:-1]) * 1.0

    def scaled(self, factor):
        """``factor * self`` where ``factor`` is another field on the same chart."""
        tree = Binary(
            "({}) * ({})".format(factor.source, self.source),
            "*",
            factor.tree,
            self.tree,
        )
        return ScalarField.from_tree(tree, self.arity)


def constant(value, arity):
    return ScalarField(repr(float(value)), arity)
