"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Argument outside an operation's domain (bad shape, zero vector, ...)."""


class BoundDomainError(InvalidInputError):
    """A closed-form bound was evaluated outside its validity region."""


class NotSolvableError(ArithmeticError):
    """Decoding matrix does not have full column rank."""


class ResourceLimitError(RuntimeError):
    """Requested computation exceeds a hard resource guard."""


class ConfigError(InvalidInputError):
    """Malformed experiment configuration."""


class NumericError(ArithmeticError):
    """A computation produced a value that cannot be reported."""
