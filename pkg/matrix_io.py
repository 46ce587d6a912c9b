# -*- coding: utf-8 -*-
"""Plain-text matrix files.

The first line holds "rows cols"; each of the following `rows` lines holds
`cols` whitespace-separated decimals. Values are written at 17 significant
digits, so a save/load round trip is exact.
"""

import typing

import numpy as np

import matcore
from errors import DomainError, MatrixParseError
from matcore import DenseMatrix


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(value), ".17g")


def parse_matrix(lines: typing.Iterable[str], path: str = "<string>") -> DenseMatrix:
    """Parses the text format from an iterable of lines.

    Blank lines are skipped.

    Raises:
        MatrixParseError: with the 1-based line number of the first bad line.
    """
    numbered = ((number, line.split()) for number, line in enumerate(lines, start=1))
    content = [(number, fields) for number, fields in numbered if fields]
    if not content:
        raise MatrixParseError(path, None, "empty file")

    header_line, header = content[0]
    if len(header) != 2:
        raise MatrixParseError(path, header_line, "header must read 'rows cols'")
    try:
        rows, cols = (int(field) for field in header)
    except ValueError as err:
        raise MatrixParseError(path, header_line, f"bad header: {err}") from err
    if rows < 1 or cols < 1:
        raise MatrixParseError(path, header_line, f"bad shape {rows} x {cols}")

    body = content[1:]
    if len(body) != rows:
        raise MatrixParseError(path, None, f"expected {rows} rows, found {len(body)}")
    values = np.empty((rows, cols))
    for row, (number, fields) in enumerate(body):
        if len(fields) != cols:
            raise MatrixParseError(path, number, f"expected {cols} values, found {len(fields)}")
        try:
            values[row] = [float(field) for field in fields]
        except ValueError as err:
            raise MatrixParseError(path, number, str(err)) from err
        if not np.all(np.isfinite(values[row])):
            raise MatrixParseError(path, number, "values must be finite")
    try:
        return matcore.dense(values)
    except DomainError as err:
        raise MatrixParseError(path, None, str(err)) from err


def load_matrix(path: str) -> DenseMatrix:
    """Reads a matrix file.

    Raises:
        OSError: if the file cannot be opened.
        MatrixParseError: if its content is malformed.
    """
    with open(path, "r", encoding="utf-8") as stream:
        return parse_matrix(stream, path=path)


def format_matrix(matrix: DenseMatrix) -> str:
    rows, cols = matrix.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(format_float(value) for value in row) for row in matrix)
    return "\n".join(lines) + "\n"


def save_matrix(path: str, matrix: DenseMatrix) -> None:
    """Writes a matrix in the text format."""
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(format_matrix(matrix))
