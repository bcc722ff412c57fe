"""Exception types shared across the toolkit.

The CLI maps each class to a process exit code.
"""


class HandlocError(Exception):
    exit_code = 1


class InputValidationError(HandlocError, ValueError):
    exit_code = 2


class ConfigError(HandlocError, ValueError):
    exit_code = 4
