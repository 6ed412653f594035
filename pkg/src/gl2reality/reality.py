"""
Reality and strong reality of group elements.

An element g is real if h g h^-1 = g^-1 for some h, and strongly real if h can
be taken with h^2 = 1.  The identity counts as an involution throughout, so
every g with g^2 = 1 is strongly real.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .classify import GU2Classifier, gl2_canonical_form
from .matgroups import (
    GroupHandle,
    Kind,
    Mat2,
    batch_det,
    batch_inv,
    batch_mul,
    batch_tr,
    is_member,
    pack,
)
from .rings import RElem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RealityVerdict:
    is_real: bool
    is_strongly_real: bool
    witness_conjugator: Optional[int]
    witness_involution: Optional[int]
    criterion_real: bool
    criterion_strongly_real: bool


@dataclass(frozen=True)
class InvolutionCensus:
    count: int
    indices: np.ndarray


def involution_formula(q: int, ell: int, kind: Kind) -> int:
    """
    (q - d) q^(2l-1) + 2 with d = -1 for GL2 and +1 for GU2

    Examples:

    >>> involution_formula(3, 1, Kind.GL2), involution_formula(3, 2, Kind.GL2)
    (14, 110)
    >>> involution_formula(3, 1, Kind.GU2), involution_formula(3, 2, Kind.GU2)
    (8, 56)
    """
    sign = -1 if Kind(kind) == Kind.GL2 else 1
    return (q - sign) * q ** (2 * ell - 1) + 2


def involution_census(handle: GroupHandle) -> InvolutionCensus:
    squares = batch_mul(handle.ring, handle.elements, handle.elements)
    ring = handle.ring
    one = np.array([ring.one, 0, 0, ring.one])
    indices = np.flatnonzero((squares == one).all(axis=1))
    return InvolutionCensus(len(indices), indices)


def involution_breakdown(handle: GroupHandle, involutions: InvolutionCensus) -> Dict[int, int]:
    """number of involutions per conjugacy class (keyed by class label)"""
    labels = handle.conjugacy_labels()[involutions.indices]
    classes, counts = np.unique(labels, return_counts=True)
    return dict(zip(classes.tolist(), counts.tolist()))


def _first_conjugator(handle: GroupHandle, g: int, H: np.ndarray, H_inv: np.ndarray):
    """first row h of H with h g h^-1 = g^-1, or None"""
    ring = handle.ring
    conj = batch_mul(ring, batch_mul(ring, H, handle.elements[[g]]), H_inv)
    hits = np.flatnonzero(pack(ring, conj) == handle.codes[handle.inverse[g]])
    return int(hits[0]) if hits.size else None


def is_real(handle: GroupHandle, g: int) -> Tuple[bool, Optional[int]]:
    """scan the group in canonical order for h with h g h^-1 = g^-1"""
    H_inv = handle.elements[handle.inverse]
    hit = _first_conjugator(handle, g, handle.elements, H_inv)
    return hit is not None, hit


def is_strongly_real(
    handle: GroupHandle, g: int, involutions: InvolutionCensus
) -> Tuple[bool, Optional[int]]:
    T = handle.elements[involutions.indices]
    hit = _first_conjugator(handle, g, T, T)
    if hit is None:
        return False, None
    return True, int(involutions.indices[hit])


def reality_criteria(
    g: Mat2, kind: Kind, classifier: Optional[GU2Classifier] = None
) -> Tuple[bool, bool]:
    """
    det(g) in {1, -1} and tr(g) = tr(g^-1); for GU2 strong reality further
    excludes the classes of tag D, which needs a classifier.
    """
    det = g.det()
    real = (det == 1 or det == -1) and g.tr() == g.inv().tr()
    if Kind(kind) == Kind.GL2:
        return real, real
    if classifier is None:
        raise ValueError("the GU2 strong reality criterion needs a GU2Classifier")
    return real, real and classifier.classify(g).tag != "D"


def criteria_masks(
    handle: GroupHandle, classifier: Optional[GU2Classifier] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """`reality_criteria` for every element at once"""
    ring = handle.ring
    X = handle.elements
    det = batch_det(ring, X)
    plus_one, minus_one = ring.one, ring.neg[ring.one]
    real = ((det == plus_one) | (det == minus_one)) & (
        batch_tr(ring, X) == batch_tr(ring, batch_inv(ring, X))
    )
    if handle.kind == Kind.GL2:
        return real, real.copy()
    if classifier is None:
        raise ValueError("the GU2 strong reality criterion needs a GU2Classifier")
    labels = handle.conjugacy_labels()
    tag_d = {label for label, rep in classifier.reps.items() if rep.tag == "D"}
    not_d = ~np.isin(labels, list(tag_d))
    return real, real & not_d


@dataclass(frozen=True)
class ClassReality:
    real: bool
    strongly_real: bool
    witness_conjugator: Optional[int]
    witness_involution: Optional[int]


def class_reality(
    handle: GroupHandle, involutions: InvolutionCensus
) -> Dict[int, ClassReality]:
    """oracle verdict on every class representative (least element of the class)"""
    labels = handle.conjugacy_labels()
    result = {}
    for rep in np.unique(labels).tolist():
        real, h = is_real(handle, rep)
        strong, tau = is_strongly_real(handle, rep, involutions) if real else (False, None)
        result[rep] = ClassReality(real, strong, h, tau)
    return result


def verdict(
    handle: GroupHandle,
    g: int,
    involutions: InvolutionCensus,
    classifier: Optional[GU2Classifier] = None,
) -> RealityVerdict:
    real, h = is_real(handle, g)
    strong, tau = is_strongly_real(handle, g, involutions)
    crit_real, crit_strong = reality_criteria(handle.element(g), handle.kind, classifier)
    return RealityVerdict(real, strong, h, tau, crit_real, crit_strong)


@dataclass(frozen=True)
class RealitySweep:
    real: np.ndarray
    strongly_real: np.ndarray
    criterion_real: np.ndarray
    criterion_strongly_real: np.ndarray
    product_set: np.ndarray

    @property
    def real_mismatches(self) -> int:
        return int((self.real != self.criterion_real).sum())

    @property
    def strong_mismatches(self) -> int:
        return int((self.strongly_real != self.criterion_strongly_real).sum())

    @property
    def product_mismatches(self) -> int:
        return int((self.strongly_real != self.product_set).sum())

    @property
    def real_not_strong(self) -> int:
        return int((self.real & ~self.strongly_real).sum())


def reality_sweep(
    handle: GroupHandle,
    involutions: InvolutionCensus,
    per_class: Dict[int, ClassReality],
    classifier: Optional[GU2Classifier] = None,
) -> RealitySweep:
    """
    Oracle flags for every element (from the class verdicts), the closed-form
    criteria for every element, and the products of two involutions.
    """
    labels = handle.conjugacy_labels()
    # g is real iff g^-1 lies in the class of g
    real = labels[handle.inverse] == labels
    lookup = {label: info.strongly_real for label, info in per_class.items()}
    strong = np.array([lookup[label] for label in labels.tolist()])
    class_real = np.array([per_class[label].real for label in labels.tolist()])
    assert (real == class_real).all(), "reality is not constant on classes"
    crit_real, crit_strong = criteria_masks(handle, classifier)
    return RealitySweep(
        real, strong, crit_real, crit_strong, strongly_real_set(handle, involutions)
    )


def strongly_real_set(handle: GroupHandle, involutions: InvolutionCensus) -> np.ndarray:
    """mask of all products t1 t2 of two involutions"""
    T = handle.elements[involutions.indices]
    k = len(T)
    left = np.repeat(T, k, axis=0)
    right = np.tile(T, (k, 1))
    products = handle.index_of(batch_mul(handle.ring, left, right))
    mask = np.zeros(handle.order, dtype=bool)
    mask[products] = True
    return mask


def _witness_candidates(g: Mat2, kind: Kind) -> Iterator[Mat2]:
    ring = g.ring
    yield Mat2.identity(ring)
    yield Mat2.swap(ring)
    if Kind(kind) == Kind.GL2:
        # [[1, b], [0, -1]], trying b = beta of the canonical form first
        form = gl2_canonical_form(g)
        codes = list(range(ring.size))
        if form.beta is not None:
            codes.insert(0, form.beta)
        for b in codes:
            yield Mat2.of(ring, [[1, RElem(ring, b)], [0, -1]])
        return

    base = ring.base
    eps = RElem(ring, ring.epsilon)
    minus_one = base.neg[1]
    for z in np.flatnonzero(ring.norm == minus_one).tolist():
        u, v = divmod(z, base.size)
        U, V = RElem(ring, ring.embed(u)), RElem(ring, ring.embed(v))
        yield Mat2.of(ring, [[V * eps, U], [-U, -V * eps]])
    for w in np.flatnonzero(ring.norm == minus_one).tolist():
        omega = RElem(ring, w)
        yield Mat2.of(ring, [[omega, 0], [0, -omega]])


def explicit_witness(g: Mat2, kind: Kind) -> Optional[Mat2]:
    """
    Conjugator h with h g h^-1 = g^-1 taken from the families used in the
    reality arguments: W, [[1, b], [0, -1]], [[v eps, u], [-u, -v eps]] with
    N(u + v eps) = -1, and diag(w, -w) with w w° = -1.  Returns None if no
    member of these families works.
    """
    target = g.inv()
    for h in _witness_candidates(g, kind):
        if not is_member(h, kind):
            continue
        if h * g * h.inv() == target:
            return h
    return None
