# -*- coding: utf-8 -*-
"""Exceptions raised by the sketching library and its command-line front end."""

import typing


class SketchError(Exception):
    """Base class for every error raised by this project."""


class DomainError(SketchError, ValueError):
    """An input lies outside the domain of an operation."""


class SampleSizeOverflow(DomainError):
    """The sample size needed for a requested accuracy does not fit in an int64."""


class ConvergenceError(SketchError, ArithmeticError):
    """Power iteration did not settle within its iteration budget.

    Attributes:
        iterations: Number of iterations performed.
        gap: Relative change of the Rayleigh quotient at the last iterate.
    """

    def __init__(self, iterations: int, gap: float):
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(last relative gap {gap:.3e})"
        )
        self.iterations = iterations
        self.gap = gap


class MatrixParseError(SketchError):
    """A matrix file could not be parsed.

    Attributes:
        path: The offending file.
        line: 1-based line number, or None when the whole file is at fault.
    """

    def __init__(self, path: str, line: typing.Optional[int], message: str):
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line
