"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed caller input: out-of-range vertex, self-loop, bad probability."""


class DerivationError(ValueError):
    """Parameter derivation is undefined for the given (n, p, s) regime."""


class ConfigError(ValueError):
    """Experiment configuration file is invalid."""


class BudgetError(RuntimeError):
    """Estimated enumeration work exceeds the configured budget."""
