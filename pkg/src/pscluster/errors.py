"""Exception types shared across the package."""


class DataFormatError(ValueError):
    """Raised when an input file or array violates its format contract."""


class ModelFormatError(ValueError):
    """Raised on model-file version, checksum, or container problems."""


class EigensolverError(RuntimeError):
    """Raised when the symmetric eigensolver fails to converge."""


class TrainingDivergedError(RuntimeError):
    """Raised when a training loss becomes non-finite."""


class AllocationBudgetExceeded(RuntimeError):
    """Raised by the allocation guard when a phase exceeds its byte budget."""

    def __init__(self, peak_bytes: int, threshold_bytes: int):
        self.peak_bytes = peak_bytes
        self.threshold_bytes = threshold_bytes
        super().__init__(
            f"allocation high-water {peak_bytes} B exceeded budget {threshold_bytes} B"
        )
