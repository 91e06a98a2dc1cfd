import numpy as np
import pytest

from locsolve.mmio import MatrixMarketError, read_grid, read_matrix_market, read_vector, write_grid, write_matrix_market, write_vector
from locsolve.problems import diagonally_dominant
from locsolve.sparse import SparseMatrix


def test_roundtrip_example(tmp_path, example):
    A = example[0]
    write_matrix_market(A, tmp_path / "a.mtx")
    assert read_matrix_market(tmp_path / "a.mtx").same(A)


def test_roundtrip_random_full_precision(tmp_path, gen):
    A = diagonally_dominant(40, gen)
    p = tmp_path / "r.mtx"
    write_matrix_market(A, p)
    B = read_matrix_market(p)
    assert B.same(A)
    write_matrix_market(B, tmp_path / "r2.mtx")
    assert read_matrix_market(tmp_path / "r2.mtx").same(A)


def test_one_by_one(tmp_path):
    p = tmp_path / "one.mtx"
    p.write_text("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 5\n")
    A = read_matrix_market(p)
    assert A.n == 1 and A.nnz == 1 and A.values[0] == 5.0


def test_symmetric_expansion(tmp_path):
    p = tmp_path / "sym.mtx"
    p.write_text(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "% lower triangle only\n"
        "3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 4.0\n"
    )
    dense = np.zeros((3, 3))
    for i, j, v in [(0, 0, 2.0), (1, 0, -1.0), (2, 2, 4.0)]:
        dense[i, j] = dense[j, i] = v
    A = read_matrix_market(p)
    np.testing.assert_array_equal(A.to_dense(), dense)
    assert A.nnz == 4


def test_explicit_zero_survives(tmp_path):
    A = SparseMatrix.from_coo(2, [0, 0, 1], [0, 1, 1], [1.0, 0.0, 1.0])
    write_matrix_market(A, tmp_path / "z.mtx")
    assert read_matrix_market(tmp_path / "z.mtx").nnz == 3


@pytest.mark.parametrize(
    "text",
    [
        "%%NotMarket matrix coordinate real general\n1 1 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 nan\n",
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
        "%%MatrixMarket matrix array real general\n1 1\n1\n",
    ],
    ids=["header", "rectangular", "out-of-range", "nan", "complex", "array"],
)
def test_malformed(tmp_path, text):
    p = tmp_path / "bad.mtx"
    p.write_text(text)
    with pytest.raises(MatrixMarketError):
        read_matrix_market(p)


@pytest.mark.parametrize("fmt", ["mm", "txt"])
def test_vector_roundtrip(tmp_path, gen, fmt):
    v = gen.normal(size=11)
    p = tmp_path / f"v.{fmt}"
    write_vector(v, p, fmt=fmt)
    assert np.array_equal(read_vector(p, 11), v)


def test_vector_length_checked(tmp_path):
    p = tmp_path / "v.txt"
    write_vector([1.0, 2.0], p, fmt="txt")
    with pytest.raises(MatrixMarketError):
        read_vector(p, 3)


def test_grid_layout(tmp_path):
    field = np.arange(6, dtype=float)
    write_grid(field, 3, 2, tmp_path / "g.txt")
    np.testing.assert_array_equal(read_grid(tmp_path / "g.txt"), [[0, 1, 2], [3, 4, 5]])
