class ObstructionLabError(Exception):
    exit_code = 1


class ParseError(ObstructionLabError):
    exit_code = 2

    def __init__(self, message, source=None, position=None):
        self.message = message
        self.source = source
        self.position = position

    def __str__(self):
        if self.source is None or self.position is None:
            return self.message
        lines = [
            "{} at position {}".format(self.message, self.position),
            "  {}".format(self.source),
            "  {}^".format(" " * self.position),
        ]
        return "\n".join(lines)


class ScopeError(ObstructionLabError):
    exit_code = 3

    def __init__(self, what, scenario_id, reason):
        self.what = what
        self.scenario_id = scenario_id
        self.reason = reason

    def __str__(self):
        return "{} does not apply to scenario {}: {}".format(
            self.what, self.scenario_id, self.reason
        )


class ContractViolation(ObstructionLabError):
    exit_code = 3

    def __init__(self, operation, reason):
        self.operation = operation
        self.reason = reason

    def __str__(self):
        return "{}: {}".format(self.operation, self.reason)


class SingularJetError(ObstructionLabError):
    def __init__(self, function, value):
        self.function = function
        self.value = value

    def __str__(self):
        return "Cannot apply {} to a jet with constant term {!r}".format(
            self.function, self.value
        )


class InsufficientOrderError(ObstructionLabError):
    def __init__(self, chain, order=0):
        self.chain = chain
        self.order = order

    def __str__(self):
        return (
            "Jet order exhausted while evaluating {} (remaining order {}); "
            "raise --jet-order".format(self.chain, self.order)
        )


class EvaluationError(ObstructionLabError):
    def __init__(self, subexpression, reason):
        self.subexpression = subexpression
        self.reason = reason

    def __str__(self):
        return "Cannot evaluate {}: {}".format(self.subexpression, self.reason)


class GeometryError(ObstructionLabError):
    def __init__(self, reason, point=None):
        self.reason = reason
        self.point = point

    def __str__(self):
        if self.point is None:
            return self.reason
        return "{} at {}".format(self.reason, self.point)


class EmbeddingError(GeometryError):
    pass


class StepSizeError(GeometryError):
    def __init__(self, t, reason):
        super(StepSizeError, self).__init__(reason)
        self.t = t

    def __str__(self):
        return "{} for t = {!r}; try smaller --t-steps".format(self.reason, self.t)


class InconsistencyError(ObstructionLabError):
    def __init__(self, quantity, first, second, residual):
        self.quantity = quantity
        self.first = first
        self.second = second
        self.residual = residual

    def __str__(self):
        return "Internal inconsistency in {}: {!r} != {!r} (residual {:.3e})".format(
            self.quantity, self.first, self.second, self.residual
        )


class SeriesConsistencyError(ObstructionLabError):
    def __init__(self, order, coefficient):
        self.order = order
        self.coefficient = coefficient

    def __str__(self):
        return (
            "Coefficient of r^{} in S(g, sigma_F) - 1 does not vanish: {!r}".format(
                self.order, self.coefficient
            )
        )


class PoleError(ObstructionLabError):
    exit_code = 3

    def __init__(self, coefficient, n, residue=None):
        self.coefficient = coefficient
        self.n = n
        self.residue = residue

    def __str__(self):
        message = "{} has a pole in dimension n = {}".format(self.coefficient, self.n)
        if self.residue is not None:
            message += " (residue {!r})".format(self.residue)
        return message


class NumericalCheckError(ObstructionLabError):
    def __init__(self, failures):
        self.failures = failures

    def __str__(self):
        lines = ["{} check(s) failed:".format(len(self.failures))]
        lines.extend("  {}".format(failure) for failure in self.failures)
        return "\n".join(lines)
