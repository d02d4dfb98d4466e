"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid or out-of-range argument (maps to CLI exit code 2)."""


class InfeasiblePlanError(RuntimeError):
    """No walk count within budget meets the requested error target (CLI exit 3)."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its stated tolerance."""
