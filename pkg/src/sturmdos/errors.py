"""Exception taxonomy shared by every module.

Each exception carries a stable ``code`` string (used in CLI error JSON) and
an ``exit_code`` category: 2 for validation errors, 3 for computation errors,
4 for resource guards.
"""


class SturmError(Exception):
    code = "ERROR"
    exit_code = 3

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class ValidationError(SturmError, ValueError):
    code = "VALIDATION"
    exit_code = 2


class InvalidCoupling(ValidationError):
    code = "INVALID_COUPLING"


class WrongTailKind(ValidationError):
    code = "WRONG_TAIL_KIND"


class UnknownWord(ValidationError, KeyError):
    code = "UNKNOWN_WORD"

    def __str__(self):
        return Exception.__str__(self)


class BoundaryDegenerate(SturmError):
    code = "BOUNDARY_DEGENERATE"


class CountMismatch(SturmError):
    code = "COUNT_MISMATCH"


class PrecisionExhausted(SturmError):
    code = "PRECISION_EXHAUSTED"


class UncertifiedEigenvalue(SturmError):
    code = "UNCERTIFIED_EIGENVALUE"


class Undetermined(SturmError):
    code = "UNDETERMINED"


class DepthExceeded(SturmError):
    code = "DEPTH_EXCEEDED"


class CapExceeded(SturmError):
    code = "CAP_EXCEEDED"
    exit_code = 4


class SizeExceeded(SturmError):
    code = "SIZE_EXCEEDED"
    exit_code = 4
