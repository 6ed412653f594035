import numpy as np
import pytest

from gl2reality.matgroups import DEFAULT_BUDGET
from gl2reality.rings import (
    ArithOp,
    Family,
    GaloisOp,
    RElem,
    galois_tools,
    make_ring,
    ring_arith,
    table_entries,
)
from gl2reality.util import BudgetExceeded, NotInvertibleError


@pytest.fixture(scope="module")
def z9():
    return make_ring(Family.MIXED, 3, 1, 2)


@pytest.fixture(scope="module")
def o9():
    return make_ring(Family.MIXED, 3, 1, 2, extended=True)


def test_sizes(z9, o9):
    assert z9.size == 9
    assert o9.size == 81
    assert make_ring("equal", 3, 2, 1).size == 9


def test_epsilon_of_residue_field():
    assert make_ring("mixed", 3, 1, 1).epsilon_sq == 2


def test_make_ring_is_shared():
    assert make_ring("mixed", 5, 1, 1) is make_ring(Family.MIXED, 5, 1, 1, False)


@pytest.mark.parametrize(
    "family,p,f,ell",
    [("mixed", 2, 1, 1), ("mixed", 9, 1, 1), ("mixed", 3, 2, 1), ("mixed", 3, 1, 0)],
)
def test_invalid_rings(family, p, f, ell):
    with pytest.raises(ValueError):
        make_ring(family, p, f, ell)


def test_tables_beyond_budget_are_refused():
    with pytest.raises(BudgetExceeded) as e:
        make_ring("mixed", 3, 1, 8, budget=DEFAULT_BUDGET)
    assert e.value.required == table_entries(3, 1, 8) == 6561**2
    with pytest.raises(BudgetExceeded):
        make_ring("equal", 3, 2, 2, extended=True, budget=DEFAULT_BUDGET)


def test_large_ring_within_budget():
    ring = make_ring("mixed", 53, 1, 2, budget=DEFAULT_BUDGET)
    assert ring.size == 2809
    assert ring(2) * ring(2).inv() == 1
    assert ring(53).valuation() == 1
    assert not ring(53).is_unit()


def test_arithmetic_in_z9(z9):
    two, six, seven = RElem(z9, 2), RElem(z9, 6), RElem(z9, 7)
    assert ring_arith(ArithOp.INV, two) == 5
    assert ring_arith(ArithOp.VALUATION, six) == 1
    assert ring_arith(ArithOp.VALUATION, RElem(z9, 0)) == 2
    assert ring_arith(ArithOp.PROJECT, seven, 1).code == 1
    assert ring_arith(ArithOp.MUL, two, 5) == 1
    with pytest.raises(NotInvertibleError):
        six.inv()


def test_units_and_valuations(z9):
    for u in z9.units.tolist():
        assert z9.mul[u, z9.inv[u]] == z9.one
    x, y = np.meshgrid(np.arange(9), np.arange(9))
    expected = np.minimum(z9.val[x] + z9.val[y], 2)
    assert (z9.val[z9.mul[x, y]] == expected).all()


def test_serre_lift_then_project(o9):
    small = o9.at_level(1)
    for code in range(small.size):
        z = RElem(small, code)
        assert z.serre_lift(2).project(1) == z


def test_conjugation(o9):
    eps = RElem(o9, o9.epsilon)
    assert galois_tools(GaloisOp.CONJ, eps) == -eps
    codes = np.arange(o9.size)
    assert (o9.conj[o9.conj] == codes).all()
    x, y = np.meshgrid(codes, codes)
    assert (o9.conj[o9.mul[x, y]] == o9.mul[o9.conj[x], o9.conj[y]]).all()


def test_norm_is_multiplicative(o9):
    x, y = np.meshgrid(np.arange(o9.size), np.arange(o9.size))
    base = o9.base
    assert (o9.norm[o9.mul[x, y]] == base.mul[o9.norm[x], o9.norm[y]]).all()


def test_norm_one_kernel(o9):
    kernel = galois_tools(GaloisOp.NORM_ONE_KERNEL, RElem(o9, o9.one))
    assert len(kernel) == 12
    assert (o9.norm_fibre_sizes() == 12).all()


@pytest.mark.parametrize("p,ell", [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_is_square_matches_squaring(p, ell):
    ring = make_ring("mixed", p, 1, ell)
    squares = set(ring.mul[ring.units, ring.units].tolist())
    for u in ring.units.tolist():
        assert bool(ring.square_mask[u]) == (u in squares)


def test_sqrt(z9):
    four = RElem(z9, 4)
    assert galois_tools(GaloisOp.IS_SQUARE, four)
    root = galois_tools(GaloisOp.SQRT, four)
    assert root * root == four
    assert RElem(z9, 2).sqrt() is None


def test_equal_characteristic_field():
    f9 = make_ring("equal", 3, 2, 1)
    assert len(f9.units) == 8
    assert not f9.square_mask[f9.epsilon_sq]
