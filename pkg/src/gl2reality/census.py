"""
Conjugacy class censuses: brute force over an enumerated group, and the
closed-form counts the brute-force side is checked against.
"""
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .classify import (
    GU2Classifier,
    OrbitType,
    element_type,
    gl2_canonical_form,
    gl2_form_count,
    gl2_real_forms,
    is_regular,
)
from .matgroups import GroupHandle, Kind, Mat2, group_order
from .reality import InvolutionCensus, class_reality, involution_census, involution_formula
from .util import Falsification, geometric_sum

logger = logging.getLogger(__name__)


class Source(str, Enum):
    BRUTEFORCE = "bruteforce"
    FORMULA = "formula"


@dataclass(frozen=True)
class ConjClass:
    representative: int
    size: int
    label: str
    real: bool
    strongly_real: bool
    regular: bool
    type: OrbitType
    # GU2: row of the real-class table, GL2: family a-d of the real canonical form
    row: Optional[str] = None


@dataclass
class TypeRow:
    regular: int = 0
    nonregular: int = 0
    strongly_real: int = 0


@dataclass
class ClassCensus:
    source: Source
    kind: Kind
    q: int
    ell: int
    classes: Optional[int]
    real: int
    strongly_real: int
    real_regular: int
    real_nonregular: int
    type_rows: Dict[str, TypeRow] = field(default_factory=dict)
    extras: Dict[str, object] = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["source"] = self.source.value
        d["kind"] = self.kind.value
        d["type_rows"] = {k: asdict(v) for k, v in sorted(self.type_rows.items())}
        return d


# --- brute force ---------------------------------------------------------------


def gu2_table_row(rep, handle: GroupHandle) -> str:
    """
    Row of the real-class table a GU2 representative belongs to:
    1 central (A), 2 diagonal (B), 3 the class of W, 4 the other type C
    classes, 5 type D.
    """
    if rep.tag == "A":
        return "1"
    if rep.tag == "B":
        return "2"
    if rep.tag == "C":
        # [[0, eps], [eps, 0]] is reached before W for some q, so compare classes
        W = handle.index(Mat2.swap(handle.ring))
        labels = handle.conjugacy_labels()
        return "3" if labels[W] == labels[handle.index(rep.matrix)] else "4"
    return "5"


def conjugacy_partition(
    handle: GroupHandle,
    involutions: Optional[InvolutionCensus] = None,
    classifier: Optional[GU2Classifier] = None,
) -> List[ConjClass]:
    """
    One ConjClass per conjugacy class, in canonical order of the
    representatives (least member of each class).
    """
    if involutions is None:
        involutions = involution_census(handle)
    labels = handle.conjugacy_labels()
    reps, sizes = np.unique(labels, return_counts=True)
    verdicts = class_reality(handle, involutions)

    real_forms = {}
    if handle.kind == Kind.GL2:
        real_forms = {form: family for family, form in gl2_real_forms(handle.ring)}
    elif classifier is None:
        classifier = GU2Classifier(handle)

    classes = []
    for rep, size in zip(reps.tolist(), sizes.tolist()):
        g = handle.element(rep)
        verdict = verdicts[rep]
        row = None
        if handle.kind == Kind.GL2:
            form = gl2_canonical_form(g)
            label = form.label
            if verdict.real:
                row = real_forms.get(form)
        else:
            class_rep = classifier.reps[rep]
            label = class_rep.label
            if verdict.real:
                row = gu2_table_row(class_rep, handle)
        classes.append(
            ConjClass(
                representative=rep,
                size=size,
                label=label,
                real=verdict.real,
                strongly_real=verdict.strongly_real,
                regular=is_regular(g),
                type=element_type(g),
                row=row,
            )
        )

    total = sum(c.size for c in classes)
    assert total == handle.order, f"class sizes add up to {total}, not {handle.order}"
    logger.info(f"{handle!r}: {len(classes)} classes, {sum(c.real for c in classes)} real")
    return classes


def real_class_census(handle: GroupHandle, classes: List[ConjClass]) -> ClassCensus:
    real = [c for c in classes if c.real]
    census = ClassCensus(
        source=Source.BRUTEFORCE,
        kind=handle.kind,
        q=handle.q,
        ell=handle.ell,
        classes=len(classes),
        real=len(real),
        strongly_real=sum(c.strongly_real for c in classes),
        real_regular=sum(c.regular for c in real),
        real_nonregular=sum(not c.regular for c in real),
    )
    for c in real:
        if c.row is None:
            raise Falsification(
                "real-class-table-exhaustive",
                "a row for every real class",
                f"no row for {c.label}",
                f"representative {handle.element(c.representative)!r}",
            )
        row = census.type_rows.setdefault(c.row, TypeRow())
        if c.regular:
            row.regular += 1
        else:
            row.nonregular += 1
        row.strongly_real += int(c.strongly_real)

    assert census.real == census.real_regular + census.real_nonregular
    assert census.strongly_real <= census.real, "strongly real class that is not real"
    return census


def real_not_strongly_real_rows(classes: List[ConjClass]) -> Tuple[set, set]:
    """
    (labels of real classes that are not strongly real, labels of real classes
    in row 5); these coincide for GU2.
    """
    loose = {c.label for c in classes if c.real and not c.strongly_real}
    row5 = {c.label for c in classes if c.real and c.row == "5"}
    return loose, row5


# --- closed forms ----------------------------------------------------------------


def real_class_formula(q: int, ell: int) -> int:
    """
    1 + q^l + 2 (1 + q + ... + q^(l-1))

    Examples:

    >>> real_class_formula(3, 1), real_class_formula(3, 2), real_class_formula(5, 2)
    (6, 18, 38)
    """
    return 1 + q**ell + 2 * geometric_sum(q, ell)


def gu2_table_rows(q: int, ell: int) -> Dict[str, TypeRow]:
    """
    Per-row counts of real regular, real non-regular and strongly real GU2
    classes.

    Examples:

    >>> rows = gu2_table_rows(3, 2)
    >>> [(r.regular, r.nonregular, r.strongly_real) for r in rows.values()]
    [(0, 2, 2), (0, 2, 2), (1, 0, 1), (3, 2, 5), (6, 2, 0)]
    """
    top = q ** (ell - 1)
    return {
        "1": TypeRow(0, 2, 2),
        "2": TypeRow((q - 3) * top // 2, top - 1, (q - 1) * top // 2 - 1),
        "3": TypeRow(1, 0, 1),
        "4": TypeRow((q - 1) * top // 2, top - 1, (q + 1) * top // 2 - 1),
        "5": TypeRow(2 * top, 2 * geometric_sum(q, ell - 1), 0),
    }


def gl2_family_rows(q: int, ell: int) -> Dict[str, TypeRow]:
    """real GL2 canonical forms by family a-d"""
    nonregular = geometric_sum(q, ell)
    return {
        "a": TypeRow(1, 0, 1),
        "b": TypeRow(q**ell, 0, q**ell),
        "c": TypeRow(0, nonregular, nonregular),
        "d": TypeRow(0, nonregular, nonregular),
    }


def centralizer_formula(q: int, ell: int, kind: Kind, kind_type: OrbitType) -> int:
    """
    Order of the centralizer in G(o_l) of a regular element of gl_2 / gu_2
    of the given type.  With d = -1 for GL2 and d = +1 for GU2:

      ss   (q - 1)(q + d) q^(2l-2)
      sns  (q + d) q^(2l-1)
      cus  (q + 1)(q + d) q^(2l-2)

    Examples:

    >>> [centralizer_formula(3, 2, Kind.GL2, t) for t in ("ss", "sns", "cus")]
    [36, 54, 72]
    >>> [centralizer_formula(3, 2, Kind.GU2, t) for t in ("ss", "sns", "cus")]
    [72, 108, 144]
    """
    sign = -1 if Kind(kind) == Kind.GL2 else 1
    kind_type = OrbitType(kind_type)
    if kind_type == OrbitType.SS:
        return (q - 1) * (q + sign) * q ** (2 * ell - 2)
    if kind_type == OrbitType.SNS:
        return (q + sign) * q ** (2 * ell - 1)
    if kind_type == OrbitType.CUS:
        return (q + 1) * (q + sign) * q ** (2 * ell - 2)
    raise ValueError(f"non-regular elements have no fixed centralizer order: {kind_type}")


def tangible_formula(q: int, ell: int) -> Dict[str, int]:
    """
    Number of tangible characters of each regular type (l >= 2).

    Examples:

    >>> tangible_formula(3, 2)
    {'ss': 2, 'sns': 6, 'cus': 4}
    """
    return {
        OrbitType.SS.value: q ** (ell - 2) * (q - 1) ** 2 // 2,
        OrbitType.SNS.value: 2 * q ** (ell - 1),
        OrbitType.CUS.value: q ** (ell - 2) * (q * q - 1) // 2,
    }


def nonregular_self_dual_formula(q: int, ell: int) -> int:
    """1 + q^(l-1) + 2 (1 + ... + q^(l-2)), the real classes of G(o_{l-1})"""
    return 1 + q ** (ell - 1) + 2 * geometric_sum(q, ell - 1)


def orthogonal_symplectic_formula(q: int, ell: int, kind: Kind) -> Tuple[int, int]:
    """
    Degree sums (a, b) over the orthogonal and symplectic characters.

    Examples:

    >>> orthogonal_symplectic_formula(3, 2, Kind.GU2)
    (82, 26)
    >>> orthogonal_symplectic_formula(3, 2, Kind.GL2)
    (110, 0)
    """
    if Kind(kind) == Kind.GL2:
        return involution_formula(q, ell, kind), 0
    return q ** (2 * ell) + 1, q ** (2 * ell - 1) - 1


def regular_degrees(q: int, ell: int) -> Dict[str, int]:
    """GL2 regular character degrees by type (l >= 2)"""
    return {
        OrbitType.SS.value: (q + 1) * q ** (ell - 1),
        OrbitType.SNS.value: (q * q - 1) * q ** (ell - 2),
        OrbitType.CUS.value: (q - 1) * q ** (ell - 1),
    }


def formula_report(q: int, ell: int, kind: Kind) -> ClassCensus:
    """every closed-form count for (q, l, kind), pure integer arithmetic"""
    kind = Kind(kind)
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q must be an odd prime power, got {q}")
    if ell < 1:
        raise ValueError(f"truncation level must be at least 1, got {ell}")

    total = real_class_formula(q, ell)
    regular = q**ell + 1
    census = ClassCensus(
        source=Source.FORMULA,
        kind=kind,
        q=q,
        ell=ell,
        classes=gl2_form_count(q, ell) if kind == Kind.GL2 else None,
        real=total,
        strongly_real=total if kind == Kind.GL2 else regular,
        real_regular=regular,
        real_nonregular=2 * geometric_sum(q, ell),
        type_rows=gl2_family_rows(q, ell) if kind == Kind.GL2 else gu2_table_rows(q, ell),
    )

    orth, symp = orthogonal_symplectic_formula(q, ell, kind)
    extras = {
        "order": group_order(q, ell, kind),
        "involutions": involution_formula(q, ell, kind),
        "orthogonal_degree_sum": orth,
        "symplectic_degree_sum": symp,
        "centralizer_orders": {
            t.value: centralizer_formula(q, ell, kind, t)
            for t in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS)
        },
    }
    if ell >= 2:
        extras["tangible"] = tangible_formula(q, ell)
        extras["nonregular_self_dual"] = nonregular_self_dual_formula(q, ell)
        if kind == Kind.GL2:
            extras["regular_degrees"] = regular_degrees(q, ell)
        else:
            extras["regular_symplectic_degree_sum"] = symp - (q ** (2 * ell - 3) - 1)
    census.extras = extras
    return census


def census_mismatches(computed: ClassCensus, expected: ClassCensus) -> List[Tuple[str, object, object]]:
    """
    (field, expected, computed) for every count that differs, in field order.
    Fields the expected side leaves unset (None) are skipped.
    """
    mismatches = []
    for name in ("classes", "real", "strongly_real", "real_regular", "real_nonregular"):
        want, got = getattr(expected, name), getattr(computed, name)
        if want is not None and want != got:
            mismatches.append((name, want, got))
    for row in sorted(set(expected.type_rows) | set(computed.type_rows)):
        want = expected.type_rows.get(row, TypeRow())
        got = computed.type_rows.get(row, TypeRow())
        if want != got:
            mismatches.append((f"type_rows.{row}", asdict(want), asdict(got)))
    return mismatches


def compare_census(computed: ClassCensus, expected: ClassCensus) -> None:
    """raise a Falsification naming the first differing field"""
    mismatches = census_mismatches(computed, expected)
    if mismatches:
        name, want, got = mismatches[0]
        raise Falsification(
            f"census-{name}",
            want,
            got,
            f"{len(mismatches)} differing field(s) at q={computed.q}, l={computed.ell}",
        )


def formula_identities(report: ClassCensus) -> Dict[str, bool]:
    """
    Consistency of the closed forms of one formula_report with each other.

    Examples:

    >>> all(formula_identities(formula_report(9, 4, Kind.GU2)).values())
    True
    """
    q, ell = report.q, report.ell
    rows = list(report.type_rows.values())
    extras = report.extras
    orth, symp = extras["orthogonal_degree_sum"], extras["symplectic_degree_sum"]
    checks = {
        "rows-total": sum(r.regular + r.nonregular for r in rows) == report.real,
        "rows-regular": sum(r.regular for r in rows) == report.real_regular,
        "rows-strongly-real": sum(r.strongly_real for r in rows) == report.strongly_real,
        "regular-split": report.real_regular + report.real_nonregular == report.real,
        "fs-aggregate": orth - symp == extras["involutions"],
    }
    if report.kind == Kind.GU2:
        checks["symplectic-growth"] = orth + symp == (q + 1) * q ** (2 * ell - 1)
    if ell >= 2:
        tangible = sum(extras["tangible"].values())
        checks["tangible-total"] = tangible + extras["nonregular_self_dual"] == report.real
        if report.kind == Kind.GU2:
            checks["regular-symplectic"] = extras["regular_symplectic_degree_sum"] == q ** (
                2 * ell - 3
            ) * (q * q - 1)
    return checks
