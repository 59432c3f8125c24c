# Copyright (c) 2026 The temporal-encoder authors.
#
# Licensed under the Apache License, Version 2.0.

"""Exception types raised by the temporal encoder library."""


class TemporalEncoderError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(TemporalEncoderError):
    """Input values violate a documented contract."""

    exit_code = 2


class ScaleLimitError(ValidationError):
    """A method was asked to run above the size it supports."""


class GraphIOError(TemporalEncoderError):
    """A file could not be read, parsed or written."""

    exit_code = 3

    def __init__(self, message, path=None, row=None):
        location = ''
        if path is not None:
            location = f'{path}'
            if row is not None:
                location += f', row {row}'
            location += ': '
        super().__init__(location + message)
        self.path = path
        self.row = row


class ConvergenceError(TemporalEncoderError):
    """An iterative numerical method stopped before reaching its tolerance."""

    exit_code = 4

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
