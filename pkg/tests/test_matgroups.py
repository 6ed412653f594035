import numpy as np
import pytest

from gl2reality.matgroups import (
    Algebra,
    Kind,
    LieMode,
    Mat2,
    MatOp,
    Mode,
    batch_det,
    batch_mul,
    batch_star,
    congruence_subgroup,
    enumerate_group,
    group_members,
    is_lie_member,
    lie_members,
    mat_ops,
)
from gl2reality.rings import RElem, make_ring
from gl2reality.util import BudgetExceeded


@pytest.fixture(scope="module")
def gu2_level2():
    return enumerate_group(make_ring("mixed", 3, 1, 2), Kind.GU2)


@pytest.fixture(scope="module")
def f9():
    return make_ring("mixed", 3, 1, 1, extended=True)


@pytest.mark.parametrize(
    "p,ell,kind,order",
    [
        (3, 1, Kind.GL2, 48),
        (3, 1, Kind.GU2, 96),
        (5, 1, Kind.GL2, 480),
        (5, 1, Kind.GU2, 720),
        (3, 2, Kind.GL2, 3888),
    ],
)
def test_enumerated_orders(p, ell, kind, order):
    base = make_ring("mixed", p, 1, ell)
    assert group_members(base, kind, Mode.ORDER) == order
    handle = group_members(base, kind, Mode.ENUMERATE)
    assert handle.order == order


def test_gu2_level2_order(gu2_level2):
    assert gu2_level2.order == 7776


def test_column_solve_matches_full_scan():
    base = make_ring("mixed", 3, 1, 1)
    columns = enumerate_group(base, Kind.GU2, method="columns")
    scan = enumerate_group(base, Kind.GU2, method="scan")
    assert (columns.codes == scan.codes).all()


def test_budget_refusal():
    base = make_ring("mixed", 3, 1, 2)
    with pytest.raises(BudgetExceeded) as info:
        enumerate_group(base, Kind.GU2, budget=1000)
    assert info.value.required == 7776


def test_star_examples(f9):
    identity, W = Mat2.identity(f9), Mat2.swap(f9)
    assert mat_ops(MatOp.STAR, identity) == identity
    assert W.star() * W == identity
    x = RElem(f9, f9.units[3])
    D = Mat2.of(f9, [[x, 0], [0, x.inv().conj()]])
    assert D.star() * D == identity


def test_unitary_membership(f9):
    eps = RElem(f9, f9.epsilon)
    assert group_members(f9.base, Kind.GU2, Mode.MEMBERSHIP, Mat2.of(f9, [[1, 0], [eps, 1]]))
    assert group_members(f9.base, Kind.GU2, Mode.MEMBERSHIP, Mat2.swap(f9))
    assert not group_members(f9.base, Kind.GU2, Mode.MEMBERSHIP, Mat2.of(f9, [[1, 1], [0, 1]]))


def test_star_is_an_anti_involution(gu2_level2):
    ring = gu2_level2.ring
    rng = np.random.default_rng(1)
    X = rng.integers(0, ring.size, size=(500, 4))
    Y = rng.integers(0, ring.size, size=(500, 4))
    assert (batch_star(ring, batch_star(ring, X)) == X).all()
    left = batch_star(ring, batch_mul(ring, X, Y))
    right = batch_mul(ring, batch_star(ring, Y), batch_star(ring, X))
    assert (left == right).all()


def test_closure(gu2_level2):
    rng = np.random.default_rng(2)
    i = rng.integers(0, gu2_level2.order, size=10000)
    j = rng.integers(0, gu2_level2.order, size=10000)
    products = batch_mul(gu2_level2.ring, gu2_level2.elements[i], gu2_level2.elements[j])
    assert gu2_level2.contains(products).all()
    assert (gu2_level2.inverse[gu2_level2.inverse] == np.arange(gu2_level2.order)).all()


def test_determinant_has_norm_one(gu2_level2):
    ring = gu2_level2.ring
    assert (ring.norm[batch_det(ring, gu2_level2.elements)] == 1).all()


def test_lie_algebras(f9):
    base = f9.base
    assert len(lie_members(base, Algebra.GL2, LieMode.ENUMERATE)) == 81
    gu = lie_members(base, Algebra.GU2, LieMode.ENUMERATE)
    assert len(gu) == 81
    eps = RElem(f9, f9.epsilon)
    sigma = RElem(f9, f9.from_int(2))
    assert is_lie_member(Mat2.of(f9, [[0, eps * sigma], [eps, 0]]), Algebra.GU2)
    assert not is_lie_member(Mat2.identity(f9), Algebra.GU2)


def test_congruence_subgroup(gu2_level2):
    kernel = congruence_subgroup(gu2_level2, 1)
    assert len(kernel) == 81
    # normal: stable under conjugation by every generator
    inside = np.zeros(gu2_level2.order, dtype=bool)
    inside[kernel] = True
    for s in gu2_level2.generators:
        assert inside[gu2_level2.conjugation_action(s)[kernel]].all()
