"""Exception types shared across the package."""


class ContractError(ValueError):
    """An input violates a documented precondition (shape, range, ...)."""


class ConfigError(ValueError):
    """An experiment configuration is invalid or cannot be read."""


class UnsupportedConfigurationError(ContractError):
    """A valid-looking input that the requested algorithm does not support."""


class SingularChannelError(ArithmeticError):
    """The stacked effective channel is (numerically) rank deficient."""


class NumericalError(ArithmeticError):
    """A linear-algebra routine failed; message carries diagnostics."""


class SearchSpaceTooLargeError(ContractError):
    """Exhaustive enumeration was requested beyond the hard cap."""
