"""Exception hierarchy.

ValidationError subclasses report malformed or inconsistent input (CLI exit 2).
InvariantViolation subclasses report a broken mathematical invariant (exit 3).
"""


class ValidationError(ValueError):
    code = "validation"


class InvariantViolation(RuntimeError):
    code = "invariant"


class AmbientMismatch(ValidationError):
    code = "ambient_mismatch"


class DimensionMismatch(ValidationError):
    code = "dimension_mismatch"


class GridMismatch(ValidationError):
    code = "grid_mismatch"


class BadBar(ValidationError):
    code = "bad_bar"


class IncompatibleMorphism(ValidationError):
    code = "incompatible_morphism"


class NotExact(ValidationError):
    code = "not_exact"


class TargetNotPModule(ValidationError):
    code = "target_not_pmodule"


class RangeError(ValidationError):
    code = "range"


class NotSubinterval(ValidationError):
    code = "not_subinterval"


class OverlapMismatch(ValidationError):
    code = "overlap_mismatch"


class GluingFailure(ValidationError):
    code = "gluing_failure"


class Infeasible(ValidationError):
    code = "infeasible"


class TooLarge(ValidationError):
    code = "too_large"


class Misaligned(ValidationError):
    code = "misaligned"


class DimTooHigh(ValidationError):
    code = "dim_too_high"


class NotSubcomplex(ValidationError):
    code = "not_subcomplex"


class DegenerateLine(ValidationError):
    code = "degenerate_line"


class OrderViolation(ValidationError):
    code = "order_violation"


class NotCommutative(ValidationError):
    code = "not_commutative"


class ExactnessViolation(InvariantViolation):
    code = "exactness_violation"


class DecompositionMismatch(InvariantViolation):
    code = "decomposition_mismatch"
