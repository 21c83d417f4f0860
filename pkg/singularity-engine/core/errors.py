# =====================================================
# Lab error taxonomy
# Every failure an operation can report has its own class
# =====================================================


class LabError(Exception):
    """Base class for every error raised by the singularity engine."""


# ---------------- GEOMETRY ----------------

class PointOutsideDomain(LabError, ValueError):
    pass


class OutsideFlowRegion(LabError, ValueError):
    pass


class LevelTooDeep(LabError, ValueError):
    pass


# ---------------- KERNELS / GRIDS ----------------

class CoincidentPoints(LabError, ValueError):
    pass


class NonIntegrableInput(LabError, ValueError):
    pass


class GridValidationError(LabError, ValueError):
    pass


class OutOfGrid(LabError, ValueError):
    pass


# ---------------- EXPONENTS / PROFILES ----------------

class QOutOfRange(LabError, ValueError):
    pass


class ExponentOutOfRange(LabError, ValueError):
    pass


class OriginEvaluation(LabError, ValueError):
    pass


# ---------------- SOLVERS ----------------

class NonConvergence(LabError, RuntimeError):
    pass


class MonotonicityViolation(LabError, RuntimeError):
    pass


class DensityNotBoundedBelow(LabError, ValueError):
    pass


class SupercriticalData(LabError, ValueError):
    pass


class LawValidationError(LabError, ValueError):
    pass


# ---------------- TRACE / LAB ----------------

class EmptyAnnulus(LabError, ValueError):
    pass


# ---------------- CONFIG / REGISTRY ----------------

class ConfigError(LabError, ValueError):
    pass


class SpecValidation(LabError, ValueError):
    pass
