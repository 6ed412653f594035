import dataclasses

import numpy as np
import pytest

from gl2reality.census import centralizer_formula, regular_degrees
from gl2reality.chartab import (
    centralizer,
    centralizer_and_za,
    character_table,
    check_orthogonality,
    class_structure,
    degrees_by_type,
    fs_indicators,
    lie_duality,
    restriction_typing,
    self_dual_census,
    symplectic_split,
    tangibility_census,
)
from gl2reality.classify import Algebra, OrbitType, type_representative
from gl2reality.matgroups import Kind, Mat2, enumerate_group
from gl2reality.rings import make_ring
from gl2reality.util import Falsification


def _table(kind, p, ell):
    handle = enumerate_group(make_ring("mixed", p, 1, ell), kind)
    return fs_indicators(character_table(class_structure(handle)))


@pytest.fixture(scope="module")
def gl2_table():
    return _table(Kind.GL2, 3, 1)


@pytest.fixture(scope="module")
def gu2_table():
    return _table(Kind.GU2, 3, 1)


def test_class_structure(gl2_table):
    classes = gl2_table.classes
    assert classes.count == 8
    assert classes.involution_count == 14
    assert classes.real_classes == 6
    assert classes.exponent == 24
    assert int(classes.sizes.sum()) == 48


def test_gl2_degrees(gl2_table):
    assert sorted(gl2_table.degrees.tolist()) == [1, 1, 2, 2, 2, 3, 3, 4]
    assert (gl2_table.modulus - 1) % gl2_table.classes.exponent == 0


def test_gl2_indicators(gl2_table):
    assert int((gl2_table.indicators * gl2_table.degrees).sum()) == 14
    census = self_dual_census(gl2_table)
    assert census.real_characters == 6
    assert (census.orthogonal_degree_sum, census.symplectic_degree_sum) == (14, 0)


def test_gu2_indicators(gu2_table):
    assert gu2_table.count == gu2_table.classes.count
    assert int((gu2_table.indicators * gu2_table.degrees).sum()) == 8
    census = self_dual_census(gu2_table)
    assert (census.orthogonal_degree_sum, census.symplectic_degree_sum) == (10, 2)


def test_complex_values(gl2_table):
    values = gl2_table.complex_values()
    identity = gl2_table.classes.identity_class
    assert np.allclose(values[:, identity], gl2_table.degrees)
    sizes = gl2_table.classes.sizes
    gram = (values * sizes) @ values.conj().T
    assert np.allclose(gram, 48 * np.eye(8))
    assert np.allclose(values[gl2_table.real_valued].imag, 0)


def test_zeta(gl2_table):
    m = gl2_table.modulus
    z = gl2_table.zeta(8)
    assert pow(z, 8, m) == 1 and pow(z, 4, m) != 1


def test_as_dict(gl2_table):
    d = gl2_table.as_dict()
    assert d["modulus"] == gl2_table.modulus
    assert len(d["classes"]) == len(d["characters"]) == 8
    assert sorted(c["indicator"] for c in d["characters"]) == [0, 0] + [1] * 6
    assert all(c["type"] is None for c in d["characters"])


def test_orthogonality_check_catches_bad_degrees(gl2_table):
    degrees = gl2_table.degrees.copy()
    degrees[0] += 1
    with pytest.raises(Falsification) as e:
        check_orthogonality(dataclasses.replace(gl2_table, degrees=degrees))
    assert e.value.claim == "character-degree-squares"


def test_level_one_has_no_restriction_typing(gl2_table):
    with pytest.raises(ValueError):
        lie_duality(gl2_table.classes.handle, 1)
    with pytest.raises(ValueError):
        restriction_typing(gl2_table)
    with pytest.raises(ValueError):
        tangibility_census(gl2_table)


@pytest.mark.parametrize("kind", [Kind.GL2, Kind.GU2])
@pytest.mark.parametrize("ell", [1, 2])
@pytest.mark.parametrize("kind_type", [OrbitType.SS, OrbitType.SNS, OrbitType.CUS])
def test_centralizer_order(kind, ell, kind_type):
    base = make_ring("mixed", 3, 1, ell)
    A = type_representative(base, Algebra(kind.value), kind_type)
    data = centralizer_and_za(A, kind)
    assert data.type == kind_type
    assert data.centralizer_order == data.formula == centralizer_formula(3, ell, kind, kind_type)


@pytest.mark.parametrize("kind", [Kind.GL2, Kind.GU2])
def test_za_index(kind):
    base = make_ring("mixed", 5, 1, 1)
    indices = {
        t: centralizer_and_za(type_representative(base, Algebra(kind.value), t), kind).za_index
        for t in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS)
    }
    assert indices == {OrbitType.SS: 1, OrbitType.SNS: 2, OrbitType.CUS: 1}


@pytest.mark.parametrize(
    "kind,orders",
    [
        (Kind.GL2, {"ss": 36, "sns": 54, "cus": 72}),
        (Kind.GU2, {"ss": 72, "sns": 108, "cus": 144}),
    ],
)
def test_level_two_centralizers_and_za(kind, orders):
    base = make_ring("mixed", 3, 1, 2)
    found, index = {}, {}
    for t in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS):
        data = centralizer_and_za(type_representative(base, Algebra(kind.value), t), kind, 2)
        found[t.value] = data.centralizer_order
        index[t.value] = data.za_index
    assert found == orders
    assert index == {"ss": 1, "sns": 2, "cus": 1}


@pytest.mark.parametrize("kind", [Kind.GL2, Kind.GU2])
def test_za_compares_at_floor_half_level(kind):
    level3 = make_ring("mixed", 3, 1, 3)
    level1 = level3.at_level(1)
    for t in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS):
        A = type_representative(level3, Algebra(kind.value), t)
        full = centralizer_and_za(A, kind, 3)
        reduced = centralizer_and_za(A.project(1), kind, 3)
        assert np.array_equal(full.za, reduced.za)
        assert full.za_index == (2 if t == OrbitType.SNS else 1)
    with pytest.raises(ValueError):
        centralizer_and_za(type_representative(level1, Algebra(kind.value), OrbitType.SS), kind, 4)


def test_centralizer_commutes():
    base = make_ring("mixed", 3, 1, 2)
    A = type_representative(base, Algebra.GL2, OrbitType.CUS)
    for codes in centralizer(A, Kind.GL2).tolist():
        C = Mat2.from_codes(base, codes)
        assert C * A == A * C


def test_non_regular_centralizer_rejected():
    base = make_ring("mixed", 3, 1, 1)
    with pytest.raises(ValueError):
        centralizer_and_za(Mat2.identity(base), Kind.GL2)


@pytest.mark.slow
def test_gl2_level_two_characters():
    table = _table(Kind.GL2, 3, 2)
    assert table.count == 78
    restriction_typing(table)
    by_type = degrees_by_type(table)
    assert {t: by_type[t] for t in ("ss", "sns", "cus")} == {
        t: [d] for t, d in regular_degrees(3, 2).items()
    }
    tangible = tangibility_census(table)
    assert tangible.counts == {"ss": 2, "sns": 6, "cus": 4}
    assert tangible.nonregular_self_dual == 6
    assert all(r.tangible == bool(table.real_valued[r.character]) for r in tangible.records)


@pytest.mark.slow
def test_gu2_level_two_characters():
    table = _table(Kind.GU2, 3, 2)
    census = self_dual_census(table)
    assert (census.orthogonal_degree_sum, census.symplectic_degree_sum) == (82, 26)
    restriction_typing(table)
    assert symplectic_split(table) == {"nonregular": 2, "regular": 24}
    tangible = tangibility_census(table)
    assert tangible.counts == {"ss": 2, "sns": 6, "cus": 4}
    assert tangible.nonregular_self_dual == 6
