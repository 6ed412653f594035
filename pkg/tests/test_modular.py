import numpy as np
import pytest

from gl2reality.modular import charpoly, column_basis, hessenberg, inv_mod, nullspace, roots, rref


def test_inv_mod_zero():
    with pytest.raises(ZeroDivisionError):
        inv_mod(14, 7)


def test_rref_rank():
    M = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    R, pivots = rref(M, 11)
    assert pivots == [0, 1]
    assert R[2].tolist() == [0, 0, 0]


def test_nullspace():
    M = np.array([[1, 2, 3], [0, 1, 1]])
    basis = nullspace(M, 13)
    assert basis.shape == (3, 1)
    assert not (M @ basis % 13).any()


def test_column_basis():
    V = np.array([[1, 2], [2, 4], [3, 6]])
    basis, pivots = column_basis(V, 7)
    assert basis.shape == (3, 1)
    assert basis[pivots[0], 0] == 1


@pytest.mark.parametrize("seed", range(5))
def test_hessenberg_keeps_charpoly(seed):
    m = 101
    rng = np.random.default_rng(seed)
    M = rng.integers(0, m, size=(6, 6))
    H = hessenberg(M, m)
    assert not np.tril(H, -2).any()
    assert charpoly(H, m).tolist() == charpoly(M, m).tolist()


def test_charpoly_of_diagonal():
    m = 31
    p = charpoly(np.diag([2, 5, 7]), m)
    assert sorted(roots(p, m)) == [2, 5, 7]
    assert p[-1] == 1


def test_charpoly_cayley_hamilton():
    m = 17
    M = np.array([[1, 2, 0], [3, 4, 5], [0, 6, 7]])
    p = charpoly(M, m)
    total = np.zeros_like(M)
    power = np.eye(3, dtype=np.int64)
    for c in p.tolist():
        total = (total + c * power) % m
        power = power @ M % m
    assert not total.any()
