"""Tests for matrix_io.py"""
# pylint: disable=no-self-use

import numpy as np
import pytest  # type: ignore

import matrix_io
from errors import MatrixParseError
import test.fixtures as fixtures  # pylint: disable=wrong-import-order


class TestLoadMatrix:
    """tests for function load_matrix"""

    def test_scalar(self, tmp_path):
        path = tmp_path / "scalar.txt"
        path.write_text("1 1\n3.5\n")
        np.testing.assert_array_equal(matrix_io.load_matrix(str(path)), [[3.5]])

    def test_identity(self, tmp_path):
        path = tmp_path / "identity.txt"
        path.write_text("2 2\n1 0\n0 1\n")
        np.testing.assert_array_equal(matrix_io.load_matrix(str(path)), np.eye(2))

    def test_round_trip(self, tmp_path):
        """save then load gives identical entries"""
        matrix = fixtures.random_matrix(7, 5, seed=3)
        path = str(tmp_path / "random.txt")
        matrix_io.save_matrix(path, matrix)
        np.testing.assert_array_equal(matrix_io.load_matrix(path), matrix)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            matrix_io.load_matrix(str(tmp_path / "absent.txt"))


class TestParseMatrix:
    """tests for function parse_matrix"""

    @pytest.mark.parametrize(
        ["text", "line"],
        [
            ("2\n1 2\n", 1),
            ("a b\n1\n", 1),
            ("1 2\n1 x\n", 2),
            ("2 2\n1 2\n3\n", 3),
            ("1 1\nnan\n", 2),
            ("0 3\n", 1),
        ],
    )
    def test_line_numbers(self, text, line):
        with pytest.raises(MatrixParseError) as info:
            matrix_io.parse_matrix(text.splitlines(), path="m.txt")
        assert info.value.line == line
        assert str(info.value).startswith(f"m.txt:{line}:")

    @pytest.mark.parametrize("text", ["", "2 2\n1 2\n", "1 1\n1\n2\n"])
    def test_count_mismatch(self, text):
        with pytest.raises(MatrixParseError) as info:
            matrix_io.parse_matrix(text.splitlines())
        assert info.value.line is None

    def test_blank_lines_skipped(self):
        matrix = matrix_io.parse_matrix(["", "1 2", "", "  4 5  "])
        np.testing.assert_array_equal(matrix, [[4.0, 5.0]])


def test_format_float():
    """function format_float keeps 17 significant digits"""
    assert matrix_io.format_float(0.1) == "0.10000000000000001"
    assert float(matrix_io.format_float(1 / 3)) == 1 / 3
