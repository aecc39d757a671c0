"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid grid, parameter, or run configuration."""


class DomainError(ValueError):
    """Operation requested outside its mathematical domain."""


class ContractError(ValueError):
    """Caller violated a documented precondition."""


class IntegrationError(RuntimeError):
    """Time integration failed; carries the time reached."""

    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached


class FitError(ValueError):
    """Power-law fit rejected its input."""
