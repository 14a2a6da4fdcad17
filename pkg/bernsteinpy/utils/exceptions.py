# -*- coding: utf-8 -*-
from typing import Optional


class BernsteinPyError(Exception):
    def __init__(self, value):
        self._value = value

    def __str__(self):
        return repr(self._value)


class InvalidFileError(BernsteinPyError):
    """The config file cannot be read or decoded."""

    def __init__(self, value, line: Optional[int] = None):
        super().__init__(value if line is None else f"line {line}: {value}")
        self.line = line


class InvalidConfigError(BernsteinPyError):
    """A config entry is unknown or violates a model constraint."""

    def __init__(self, value, key_path: str = "", line: Optional[int] = None):
        location = key_path if line is None else f"{key_path} (line {line})"
        super().__init__(f"{location}: {value}" if location else value)
        self.message = value
        self.key_path = key_path
        self.line = line


class ContractViolationError(BernsteinPyError, ValueError):
    pass


class EnumerationTooLargeError(BernsteinPyError):
    pass


class ExplosionGuardError(BernsteinPyError):
    pass


class AbsorbedStateError(BernsteinPyError):
    pass


class AssumptionViolationError(BernsteinPyError):
    pass


class InvariantViolationError(BernsteinPyError):
    pass
