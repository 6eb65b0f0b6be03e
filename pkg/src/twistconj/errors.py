"""Exception hierarchy."""


class TwistConjError(Exception):
    """Base class for every error raised by the package."""


class InvalidGroup(TwistConjError):
    pass


class NotAssociative(InvalidGroup):
    def __init__(self, a, b, c):
        self.triple = (a, b, c)
        super().__init__(f"multiplication is not associative at ({a}, {b}, {c})")


class NoIdentity(InvalidGroup):
    def __init__(self):
        super().__init__("table has no two-sided identity element")


class NoInverse(InvalidGroup):
    def __init__(self, x):
        self.element = x
        super().__init__(f"element {x} has no two-sided inverse")


class NotAPermutation(TwistConjError):
    pass


class NotMultiplicative(TwistConjError):
    def __init__(self, x, y):
        self.pair = (x, y)
        super().__init__(f"map is not multiplicative at ({x}, {y})")


class NotBijective(TwistConjError):
    pass


class BudgetExceededError(TwistConjError):
    """A configured enumeration or rewriting cap was hit."""


class ClosureBudgetExceeded(BudgetExceededError):
    pass


class CollectionBudgetExceeded(BudgetExceededError):
    pass


class NotInvariantSubgroup(TwistConjError):
    pass


class NotATransversal(TwistConjError):
    pass


class BurnsideMismatch(TwistConjError):
    """R(phi) differs from the fixed-class count; a bug or a falsified surrogate."""


class InfiniteReidemeister(TwistConjError):
    pass


class SquareDoesNotCommute(TwistConjError):
    pass


class PresentationSyntaxError(TwistConjError):
    def __init__(self, message, line=None, col=None, path=None):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if self.line is not None:
            where.append(str(self.line))
            if self.col is not None:
                where.append(str(self.col))
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message

    def with_path(self, path):
        return type(self)(self.message, self.line, self.col, path)


class BadGeneratorIndexOrder(PresentationSyntaxError):
    pass


class InconsistentPresentation(TwistConjError):
    pass


class EqualityUndecidable(TwistConjError):
    pass


class DegreeCapReached(TwistConjError):
    pass
