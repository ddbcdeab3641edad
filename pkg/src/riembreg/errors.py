"""Exception types shared across the package."""


class DomainError(ValueError):
    """A coordinate left the open domain of a generator (or its embedded range).

    Carries the index of the first offending coordinate so callers (notably
    the CLI) can point at the bad row/column instead of clamping silently.
    """

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index


class NumericalError(RuntimeError):
    """An iterative procedure produced non-finite or degenerate numbers."""
