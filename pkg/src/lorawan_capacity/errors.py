"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the range where a model is defined."""


class CoverageError(DomainError):
    """The requested cell radius cannot be served by any spreading factor."""

    def __init__(self, radius_km: float, max_range_km: float):
        self.radius_km = radius_km
        self.max_range_km = max_range_km
        super().__init__(
            f"annulus {max_range_km:.4f} km < d <= {radius_km:.4f} km is not covered by SF12"
        )


class LedgerError(RuntimeError):
    """A transmission was recorded while its sub-band was still blocked."""


class ConfigError(ValueError):
    """A scenario file is malformed or contains unknown keys."""
