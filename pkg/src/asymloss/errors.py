"""Exception hierarchy.

Three families matter to callers: configuration problems (CLI exit 2),
data/schema problems (exit 3), and violations of the loss-positivity
assumptions that make the weighting scheme invalid (exit 4).
"""


class AsymLossError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AsymLossError):
    """Invalid or inconsistent configuration."""


class DataError(AsymLossError):
    """Malformed, empty, or mismatched data."""


class SchemaError(DataError):
    """Missing/unknown columns or malformed serialized documents."""


class ParseError(DataError):
    """Unparseable row; carries the offending row index."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class DimensionMismatch(DataError):
    """Feature vector width does not match the model dictionary."""


class EmptyData(DataError):
    """Operation requires at least one row."""


class SingleClass(DataError):
    """AUC needs at least one sample of each label."""


class OracleMismatch(DataError):
    """Finite-support oracle incompatible with the model or dataset."""


class SupportTooLarge(DataError):
    """Brute-force enumeration capped at 20 support points."""


class UnknownCrimeType(DataError):
    """Crime category absent from the cost-benefit tables."""


class NegativeDuration(DataError):
    """Detention duration must be >= 0."""


class AssumptionViolation(AsymLossError):
    """Net losses from wrong decisions must exceed those of correct ones.

    Raised when a loss quartet would produce negative weights, which makes
    the convexification invalid. Carries the offending row indices.
    """

    def __init__(self, message: str, rows: list[int] | None = None):
        super().__init__(message)
        self.rows = rows or []


class DegenerateLoss(AssumptionViolation):
    """Threshold denominator (sum of net losses) is <= 0 at some x."""


class DomainError(AsymLossError):
    """Argument outside the open interval required by a closed form."""


class NonFiniteObjective(AsymLossError):
    """Training objective or gradient became NaN/inf (overflow guard)."""
