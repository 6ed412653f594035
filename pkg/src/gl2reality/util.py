import math
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

import numpy as np


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured budget."""

    def __init__(self, what: str, required: int, budget: int):
        self.what = what
        self.required = required
        self.budget = budget
        super().__init__(
            f"Refusing to enumerate {what}: needs a budget of at least {required},"
            f" configured budget is {budget}."
        )


class Falsification(RuntimeError):
    """A counting formula or classification statement did not hold."""

    def __init__(self, claim: str, expected, computed, detail: str = ""):
        self.claim = claim
        self.expected = expected
        self.computed = computed
        self.detail = detail
        message = f"{claim}: expected {expected}, computed {computed}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class NotInvertibleError(ArithmeticError):
    pass


class UnionFind:
    """
    Disjoint sets over 0..n-1.  The root of every set is its least member.

    Examples:

    >>> uf = UnionFind(5)
    >>> uf.union(3, 1); uf.union(4, 3)
    >>> [uf.find(i) for i in range(5)]
    [0, 1, 2, 1, 1]
    """

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx

    def union_pairs(self, left: np.ndarray, right: np.ndarray) -> None:
        for x, y in zip(left.tolist(), right.tolist()):
            if x != y:
                self.union(x, y)

    def roots(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))], dtype=np.int64)


def is_prime(n: int) -> bool:
    """trial division, good enough for moduli of a few million

    Examples:

    >>> [n for n in range(20) if is_prime(n)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def admissible_primes(exponent: int, lower: int):
    """primes m with m = 1 mod exponent and m > lower, in increasing order

    Examples:

    >>> gen = admissible_primes(24, 14)
    >>> next(gen), next(gen)
    (73, 97)
    """
    m = (lower // exponent + 1) * exponent + 1
    while True:
        if m > lower and is_prime(m):
            yield m
        m += exponent


def geometric_sum(q: int, n: int) -> int:
    """sum of q**i for 0 <= i < n

    Examples:

    >>> geometric_sum(3, 2)
    4
    >>> geometric_sum(5, 0)
    0
    """
    return sum(q**i for i in range(n))


def lcm(values: Iterable[int]) -> int:
    """
    Examples:

    >>> lcm([4, 6, 9])
    36
    """
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def to_digits(code: int, base: int, length: int) -> Tuple[int, ...]:
    """little-endian digits of a canonical code

    Examples:

    >>> to_digits(7, 3, 2)
    (1, 2)
    >>> to_digits(0, 5, 3)
    (0, 0, 0)
    """
    digits = []
    for _ in range(length):
        code, d = divmod(code, base)
        digits.append(d)
    return tuple(digits)


def from_digits(digits: Sequence[int], base: int) -> int:
    """
    Examples:

    >>> from_digits((1, 2), 3)
    7
    """
    return sum(d * base**k for k, d in enumerate(digits))


def digit_matrix(codes: np.ndarray, base: int, length: int) -> np.ndarray:
    """vectorized `to_digits`, one row per code"""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.shape[0], length), dtype=np.int64)
    rest = codes.copy()
    for k in range(length):
        out[:, k] = rest % base
        rest //= base
    return out


def primitive_root(m: int) -> int:
    """least generator of the multiplicative group of the prime field F_m

    Examples:

    >>> primitive_root(73)
    5
    """
    phi = m - 1
    factors = _prime_factors(phi)
    for g in range(2, m):
        if all(pow(g, phi // r, m) != 1 for r in factors):
            return g
    raise ValueError(f"{m} is not prime")


def _prime_factors(n: int) -> List[int]:
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors
