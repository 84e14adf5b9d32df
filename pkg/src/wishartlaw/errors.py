"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
these rather than bare ValueError/RuntimeError for contract violations.
"""


class ParameterError(ValueError):
    """A parameter violates an operation's precondition (exit code 2)."""


class MalformedWordError(ParameterError):
    """A raw word is not an alternating closed word of odd length."""


class GuardLimitError(RuntimeError):
    """A combinatorial request exceeds the configured resource guard (exit code 3)."""


class NumericError(RuntimeError):
    """A numerical routine produced non-finite or inconsistent output (exit code 4)."""
