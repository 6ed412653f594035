import numpy as np
import pytest

from gl2reality.util import (
    BudgetExceeded,
    Falsification,
    UnionFind,
    admissible_primes,
    digit_matrix,
    from_digits,
    is_prime,
    to_digits,
)


def test_union_find_roots_are_least_members():
    uf = UnionFind(6)
    uf.union_pairs(np.array([5, 4, 2]), np.array([3, 5, 0]))
    assert uf.roots().tolist() == [0, 1, 0, 3, 3, 3]


def test_budget_exceeded_names_the_budget():
    e = BudgetExceeded("GU2(Z/9)", 7776, 1000)
    assert e.required == 7776
    assert "7776" in str(e) and "1000" in str(e)


def test_falsification_carries_values():
    e = Falsification("involution-count", 56, 55, "GU2 at q=3")
    assert (e.claim, e.expected, e.computed) == ("involution-count", 56, 55)
    assert str(e) == "involution-count: expected 56, computed 55 (GU2 at q=3)"


@pytest.mark.parametrize("exponent,lower", [(24, 14), (72, 200), (8, 3)])
def test_admissible_primes(exponent, lower):
    gen = admissible_primes(exponent, lower)
    for _ in range(3):
        m = next(gen)
        assert is_prime(m)
        assert m > lower
        assert m % exponent == 1


def test_digits_agree():
    codes = np.arange(27)
    rows = digit_matrix(codes, 3, 3)
    assert [tuple(r) for r in rows.tolist()] == [to_digits(c, 3, 3) for c in codes.tolist()]
    assert all(from_digits(to_digits(c, 3, 3), 3) == c for c in codes.tolist())
