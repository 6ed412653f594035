"""
Linear algebra over the prime field F_m on int64 arrays.

Entries are kept reduced to [0, m).  Products of two reduced entries summed
over a few hundred terms stay far below 2**63 for the moduli used here.
"""
from typing import List, Tuple

import numpy as np


def inv_mod(a: int, m: int) -> int:
    """
    Examples:

    >>> inv_mod(3, 7)
    5
    """
    a = int(a) % m
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse modulo {m}")
    return pow(a, m - 2, m)


def rref(M: np.ndarray, m: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form and pivot columns.

    Examples:

    >>> R, pivots = rref(np.array([[2, 4], [1, 2]]), 7)
    >>> R.tolist(), pivots
    ([[1, 2], [0, 0]], [0])
    """
    A = np.array(M, dtype=np.int64) % m
    rows, cols = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.flatnonzero(A[r:, c])
        if nonzero.size == 0:
            continue
        p = r + int(nonzero[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = A[r] * inv_mod(A[r, c], m) % m
        factors = A[:, c].copy()
        factors[r] = 0
        A = (A - np.outer(factors, A[r])) % m
        pivots.append(c)
        r += 1
    return A, pivots


def nullspace(M: np.ndarray, m: int) -> np.ndarray:
    """basis of {v : M v = 0} as the columns of the returned array"""
    R, pivots = rref(M, m)
    n = R.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for row, p in enumerate(pivots):
            basis[p, k] = (-R[row, f]) % m
    return basis


def column_basis(V: np.ndarray, m: int) -> Tuple[np.ndarray, List[int]]:
    """
    Basis of the column space of V, normalized so that its rows at the
    returned pivot positions form the identity.
    """
    R, pivots = rref(V.T, m)
    return R[: len(pivots)].T.copy(), pivots


def hessenberg(M: np.ndarray, m: int) -> np.ndarray:
    """upper Hessenberg matrix similar to M"""
    H = np.array(M, dtype=np.int64) % m
    n = H.shape[0]
    for k in range(n - 2):
        nonzero = np.flatnonzero(H[k + 1 :, k])
        if nonzero.size == 0:
            continue
        i = k + 1 + int(nonzero[0])
        if i != k + 1:
            H[[i, k + 1]] = H[[k + 1, i]]
            H[:, [i, k + 1]] = H[:, [k + 1, i]]
        u = H[k + 2 :, k] * inv_mod(H[k + 1, k], m) % m
        if not u.any():
            continue
        H[k + 2 :] = (H[k + 2 :] - np.outer(u, H[k + 1])) % m
        H[:, k + 1] = (H[:, k + 1] + H[:, k + 2 :] @ u) % m
    return H


def charpoly(M: np.ndarray, m: int) -> np.ndarray:
    """
    Characteristic polynomial det(x I - M), coefficients lowest degree first.

    Examples:

    >>> charpoly(np.array([[0, 1], [1, 0]]), 7).tolist()
    [6, 0, 1]
    """
    H = hessenberg(M, m)
    n = H.shape[0]
    polys = [np.ones(1, dtype=np.int64)]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        p = np.zeros(k + 1, dtype=np.int64)
        p[1:] = prev
        p[:k] = (p[:k] - H[k - 1, k - 1] * prev) % m
        t = 1
        for i in range(1, k):
            t = t * int(H[k - i, k - i - 1]) % m
            if t == 0:
                break
            coefficient = t * int(H[k - i - 1, k - 1]) % m
            if coefficient:
                lower = polys[k - i - 1]
                p[: len(lower)] = (p[: len(lower)] - coefficient * lower) % m
        polys.append(p % m)
    return polys[n]


def roots(poly: np.ndarray, m: int) -> List[int]:
    """
    All roots in F_m by evaluation at every point.

    Examples:

    >>> roots(np.array([6, 0, 1]), 7)
    [1, 6]
    """
    x = np.arange(m, dtype=np.int64)
    value = np.zeros(m, dtype=np.int64)
    for c in poly[::-1].tolist():
        value = (value * x + c) % m
    return np.flatnonzero(value == 0).tolist()
