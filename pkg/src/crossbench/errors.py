"""Exception types shared across the workbench."""


class InputError(ValueError):
    """A precondition on the arguments of an operation does not hold."""


class CapExceeded(RuntimeError):
    """An exhaustive enumeration grew beyond its configured cap."""


class DepthBudgetExhausted(RuntimeError):
    """The requirement sweep of ``ext2`` needs more depth than it was given."""

    def __init__(self, requirement, message=None):
        self.requirement = requirement
        super().__init__(message or f"depth budget exhausted at requirement {requirement!r}")


class FragmentTooLarge(CapExceeded):
    """A bounded fragment of a Gamma space has more elements than the cap."""


class TableExhausted(InputError):
    """An approximation table has no row at the index the diagonalizer needs."""

    def __init__(self, index, needed_row):
        self.index = index
        self.needed_row = needed_row
        super().__init__(f"table exhausted: table {index} has no row {needed_row}")
