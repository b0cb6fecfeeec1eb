"""Exception hierarchy. The CLI maps these onto exit codes."""


class PatchMiError(Exception):
    """Base class for all library errors."""


class IngestError(PatchMiError):
    """Input could not be read or decoded (CLI exit code 1)."""


class ConfigError(PatchMiError):
    """Invalid option, or an option that does not fit the input (CLI exit code 2)."""


class NumericalError(PatchMiError):
    """Numerical failure during scoring (CLI exit code 3)."""


class ZeroVarianceError(NumericalError):
    """Patch population with zero trace: every sample is identical (constant frames)."""
