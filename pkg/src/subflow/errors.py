"""Exception types shared across the package."""


class SubflowError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SubflowError, ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedModelError(SubflowError, ValueError):
    """Model data outside what the symbolic machinery supports."""


class NotBracketGeneratingError(SubflowError, RuntimeError):
    """Horizontal distribution fails to bracket-generate the tangent space."""

    def __init__(self, message, max_depth, ranks):
        super().__init__(message)
        self.max_depth = max_depth
        self.ranks = ranks


class SpectralCapError(SubflowError, RuntimeError):
    """Grid too large for dense spectral work."""


class TubeExitError(DomainError):
    """A map value left the tubular neighbourhood of the embedded target."""

    def __init__(self, message, defect=None, iteration=None):
        super().__init__(message)
        self.defect = defect
        self.iteration = iteration


class ChartExitError(DomainError):
    """A map value left the coordinate chart of the intrinsic target."""


class ConfigError(SubflowError, ValueError):
    """Invalid run configuration; carries the full list of violations."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
