"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """Configuration file is malformed, has unknown keys, or fails validation."""


class NotVisibleError(RuntimeError):
    """The requested link has no line of sight at the requested time."""


class NoPathError(RuntimeError):
    """Endpoints are visible to the network but no admissible sync chain exists."""


class NoSyncSignalError(RuntimeError):
    """Cross-correlation histograms contain no statistically significant peak."""
