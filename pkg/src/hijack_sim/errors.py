"""Shared exception types."""


class ConfigError(ValueError):
    """An invalid parameter, config file, or incomplete results table.

    The CLI maps this to exit code 2; anything else that escapes is a
    runtime error (exit code 3).
    """
