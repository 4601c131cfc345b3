"""Exception hierarchy.  Each class carries the CLI exit code it maps to."""


class GpwbError(Exception):
    exit_code = 3


class InputError(GpwbError, ValueError):
    """Malformed input, unknown ids, or a violated precondition."""

    exit_code = 3


class HypothesisError(InputError):
    """An operation's mathematical hypothesis does not hold for this input."""


class BudgetExceeded(GpwbError, RuntimeError):
    """A configured cap (table size, ball size, path count, ...) was hit."""

    exit_code = 2


class VerificationFailure(GpwbError, AssertionError):
    """A checker found a counterexample to a statement it verifies."""

    exit_code = 1
