"""
Conjugacy class labels.

GL2 classes are labelled by canonical forms

    M(d, i, alpha, beta) = d*I + pi^i * [[0, alpha], [1, beta]]

with 0 <= i <= l, d given by its digits below i and alpha, beta in o_{l-i}.
GU2 classes are labelled by the first parameter tuple of type A, B, C or D
that lands in the class.  Lie algebra elements get one of the four orbit types
nreg, sns, ss and cus through their reduction mod pi.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Set, Tuple

import numpy as np

from .matgroups import (
    Algebra,
    GroupHandle,
    Kind,
    Mat2,
    batch_inv,
    batch_mul,
    pack,
)
from .rings import Ring, RElem
from .util import Falsification

logger = logging.getLogger(__name__)


class OrbitType(str, Enum):
    NREG = "nreg"
    SNS = "sns"
    SS = "ss"
    CUS = "cus"


# --- regularity and the type map ----------------------------------------------


def is_regular(X: Mat2) -> bool:
    """non-scalar mod pi, i.e. characteristic polynomial = minimal polynomial"""
    return not X.project(1).is_scalar()


def _discriminant(X: Mat2) -> RElem:
    """(tr^2 - 4 det) / 4"""
    t, d = X.tr(), X.det()
    return (t * t - 4 * d) * X.ring(4).inv()


def orbit_type(X: Mat2, algebra: Optional[Algebra] = None) -> OrbitType:
    """
    Type of the reduction mod pi.  For elements of gu_2 the discriminant lies
    in the base ring and squareness is decided there; otherwise it is decided
    in the ring of the entries.
    """
    residue = X.project(1)
    if residue.is_scalar():
        return OrbitType.NREG
    delta = _discriminant(residue)
    if delta == 0:
        return OrbitType.SNS
    if algebra is not None and Algebra(algebra) == Algebra.GU2:
        x, y = divmod(delta.code, residue.ring.base_size)
        assert y == 0, "gu_2 discriminant must lie in the base ring"
        square = bool(residue.ring.base.square_mask[x])
    else:
        square = delta.is_square()
    return OrbitType.SS if square else OrbitType.CUS


def element_type(g: Mat2) -> OrbitType:
    return orbit_type(g)


# --- adjoint orbit representatives --------------------------------------------

SHAPES = {
    OrbitType.NREG: "a",
    OrbitType.SNS: "b",
    OrbitType.SS: "c",
    OrbitType.CUS: "d",
}


@dataclass(frozen=True)
class AdjointRep:
    shape: str
    params: Tuple[Tuple[str, int], ...]
    matrix: Mat2


def adjoint_rep_and_type(
    X: Mat2, algebra: Algebra, handle: Optional[GroupHandle] = None
) -> Tuple[AdjointRep, OrbitType]:
    """
    Representative of the adjoint orbit of X in the shape listed for its type:

      nreg  x I + pi C
      sns   x I + [[0, pi beta], [1, 0]]       (gu_2: [[x, eps pi beta], [eps, x]])
      ss    diag(x - r, x + r)                 (gu_2: r replaced by r eps^2)
      cus   x I + [[0, sigma], [1, 0]]         (gu_2: [[x, eps sigma], [eps, x]])

    With a handle for G(o_m) the representative is certified to lie in the
    orbit of X.
    """
    algebra = Algebra(algebra)
    ring = X.ring
    kind_type = orbit_type(X, algebra)
    x = X.tr() * ring(2).inv()
    delta = _discriminant(X)

    if kind_type == OrbitType.NREG:
        # X = x I + pi C already; record the residue scalar x
        scalar = X.a11.project(1).serre_lift(ring.ell)
        params = (("x", scalar.code),)
        rep = X
    elif algebra == Algebra.GL2:
        if kind_type == OrbitType.SS:
            r = delta.sqrt()
            rep = Mat2.of(ring, [[x - r, 0], [0, x + r]])
            params = (("x", x.code), ("r", r.code))
        else:
            rep = Mat2.of(ring, [[x, delta], [1, x]])
            name = "pi*beta" if kind_type == OrbitType.SNS else "sigma"
            params = (("x", x.code), (name, delta.code))
    else:
        eps = RElem(ring, ring.epsilon)
        eps_sq_inv = (eps * eps).inv()
        if kind_type == OrbitType.SS:
            base_delta = RElem(ring.base, delta.code // ring.base_size)
            r = RElem(ring, ring.embed(base_delta.sqrt().code)) * eps_sq_inv
            rep = Mat2.of(ring, [[x - r * eps * eps, 0], [0, x + r * eps * eps]])
            params = (("x", x.code), ("r", r.code))
        else:
            coefficient = delta * eps_sq_inv
            rep = Mat2.of(ring, [[x, eps * coefficient], [eps, x]])
            name = "pi*beta" if kind_type == OrbitType.SNS else "sigma"
            params = (("x", x.code), (name, coefficient.code))

    if handle is not None:
        assert same_adjoint_orbit(handle, X, rep), f"{rep!r} is not conjugate to {X!r}"
    return AdjointRep(SHAPES[kind_type], params, rep), kind_type


def adjoint_orbit(handle: GroupHandle, X: Mat2) -> np.ndarray:
    """packed codes of g X g^-1 over all g in the handle, reduced to X's level"""
    G = handle.elements
    level = X.ring.ell
    ring = X.ring
    if level < handle.ell:
        G = handle.ring.project_codes(G, level).astype(np.int64)
    if ring is not handle.ring.at_level(level):
        raise ValueError(f"{X!r} does not match {handle!r}")
    G_inv = batch_inv(ring, G)
    conj = batch_mul(ring, batch_mul(ring, G, np.array([X.entries])), G_inv)
    return np.unique(pack(ring, conj))


def same_adjoint_orbit(handle: GroupHandle, X: Mat2, Y: Mat2) -> bool:
    return Y.packed() in set(adjoint_orbit(handle, X).tolist())


def type_representative(base: Ring, algebra: Algebra, kind_type: OrbitType) -> Mat2:
    """simple regular element of the given type over the level of `base`"""
    algebra, kind_type = Algebra(algebra), OrbitType(kind_type)
    if kind_type == OrbitType.NREG:
        raise ValueError("non-regular elements have no single representative")
    if algebra == Algebra.GL2:
        ring = base
        shapes = {
            OrbitType.SS: [[-1, 0], [0, 1]],
            OrbitType.SNS: [[0, 0], [1, 0]],
            OrbitType.CUS: [[0, RElem(ring, ring.epsilon_sq)], [1, 0]],
        }
        return Mat2.of(ring, shapes[kind_type])
    ring = base.extension
    eps = RElem(ring, ring.epsilon)
    shapes = {
        OrbitType.SS: [[-eps * eps, 0], [0, eps * eps]],
        OrbitType.SNS: [[0, 0], [eps, 0]],
        OrbitType.CUS: [[0, eps], [eps, 0]],
    }
    return Mat2.of(ring, shapes[kind_type])


# --- GL2 canonical forms -----------------------------------------------------


@dataclass(frozen=True)
class GL2CanonicalForm:
    i: int
    d: int
    alpha: Optional[int]
    beta: Optional[int]
    ell: int

    @property
    def regular(self) -> bool:
        return self.i == 0

    @property
    def label(self) -> str:
        if self.i == self.ell:
            return f"M({self.d},{self.i},-,-)"
        return f"M({self.d},{self.i},{self.alpha},{self.beta})"

    def matrix(self, ring: Ring) -> Mat2:
        if ring.extended or ring.ell != self.ell:
            raise ValueError(f"{self.label} lives over o_{self.ell}, got {ring.name}")
        if self.i == self.ell:
            return Mat2.from_codes(ring, [self.d, 0, 0, self.d])
        alpha = int(ring.shift_up(self.alpha, self.i))
        beta = int(ring.shift_up(self.beta, self.i))
        pi_i = int(ring.shift_up(1, self.i))
        return Mat2.from_codes(
            ring, [self.d, alpha, pi_i, int(ring.add[self.d, beta])]
        )


def gl2_canonical_form(A: Mat2) -> GL2CanonicalForm:
    return gl2_canonical_form_with_conjugator(A)[0]


def gl2_canonical_form_with_conjugator(A: Mat2) -> Tuple[GL2CanonicalForm, Mat2]:
    """
    The canonical form of A together with P such that P^-1 A P is the form's
    matrix.
    """
    ring = A.ring
    if ring.extended:
        raise ValueError(f"GL2 canonical forms need the base ring, got {ring.name}")
    ell = ring.ell
    a11, a12, a21, a22 = A.entries
    i = int(
        min(ring.val[a12], ring.val[a21], ring.val[ring.add[a11, ring.neg[a22]]])
    )
    identity = Mat2.identity(ring)
    if i == ell:
        return GL2CanonicalForm(ell, a11, None, None, ell), identity

    d = int(ring.project_codes(a11, i)) if i > 0 else 0
    shifted = A - identity * RElem(ring, d)
    small = ring.at_level(ell - i)
    B = Mat2.from_codes(small, ring.shift_down(list(shifted.entries), i))
    form = GL2CanonicalForm(i, d, (-B.det()).code, B.tr().code, ell)

    B_lift = B.serre_lift(ell)
    for v in ((1, 0), (0, 1), (1, 1)):
        v_col = Mat2.of(ring, [[v[0], 0], [v[1], 0]])
        image = B_lift * v_col
        P = Mat2.of(ring, [[v[0], image.a11], [v[1], image.a21]])
        if P.det().is_unit():
            break
    else:
        raise AssertionError(f"{B!r} is non-scalar mod pi but not cyclic")

    assert P.inv() * A * P == form.matrix(ring), f"conjugator check failed for {A!r}"
    return form, P


def gl2_form_count(q: int, ell: int) -> int:
    """
    Number of canonical forms in GL_2(o_l).

    Examples:

    >>> gl2_form_count(3, 1), gl2_form_count(3, 2)
    (8, 78)
    """
    total = (q**ell - q ** (ell - 1)) * q**ell
    total += sum((q**i - q ** (i - 1)) * q ** (2 * (ell - i)) for i in range(1, ell))
    return total + q**ell - q ** (ell - 1)


def gl2_forms(ring: Ring) -> Iterator[GL2CanonicalForm]:
    """every canonical form of an invertible matrix, without touching the group"""
    ell, q = ring.ell, ring.q
    for alpha in ring.units.tolist():
        for beta in range(ring.size):
            yield GL2CanonicalForm(0, 0, alpha, beta, ell)
    for i in range(1, ell):
        size = q ** (ell - i)
        for d in range(q**i):
            if d % q == 0:
                continue
            for alpha in range(size):
                for beta in range(size):
                    yield GL2CanonicalForm(i, d, alpha, beta, ell)
    for d in ring.units.tolist():
        yield GL2CanonicalForm(ell, d, None, None, ell)


def _real_form_matrix(ring: Ring, sign: int, i: int, alpha: int) -> Mat2:
    """sign * I + pi^i * [[0, alpha], [1, sign * pi^i * alpha]] over o_l"""
    s = ring(sign)
    pi_i = RElem(ring, int(ring.shift_up(1, i)))
    pi_alpha = RElem(ring, int(ring.shift_up(alpha, i)))
    pi_2i_alpha = RElem(ring, int(ring.shift_up(alpha, 2 * i)))
    return Mat2.of(ring, [[s, pi_alpha], [pi_i, s + s * pi_2i_alpha]])


def gl2_real_forms(ring: Ring) -> List[Tuple[str, GL2CanonicalForm]]:
    """
    Canonical forms of the real classes of GL_2(o_l), by family:

      a  M(0, 0, 1, 0)
      b  M(0, 0, -1, beta)
      c  I + pi^i [[0, alpha], [1, pi^i alpha]]       1 <= i <= l
      d  -I + pi^i [[0, alpha], [1, -pi^i alpha]]     1 <= i <= l

    with alpha in o_{l-i}.  Families c and d are listed by the canonical form
    of the matrix shown, whose scalar part is +-1 cut down to level i.
    """
    ell = ring.ell
    minus_one = int(ring.neg[1])
    forms = [("a", GL2CanonicalForm(0, 0, 1, 0, ell))]
    forms += [
        ("b", GL2CanonicalForm(0, 0, minus_one, beta, ell)) for beta in range(ring.size)
    ]
    for family, sign in (("c", 1), ("d", -1)):
        for i in range(1, ell + 1):
            alphas = range(ring.at_level(ell - i).size) if i < ell else [0]
            forms += [
                (family, gl2_canonical_form(_real_form_matrix(ring, sign, i, alpha)))
                for alpha in alphas
            ]
    return forms


# --- GU2 representatives -----------------------------------------------------


@dataclass(frozen=True)
class GU2ClassRep:
    tag: str
    params: Tuple[int, ...]
    matrix: Mat2 = field(compare=False)

    @property
    def label(self) -> str:
        return f"{self.tag}{self.params}"


def _gu2_candidates(ring: Ring) -> Tuple[List[Tuple[str, Tuple[int, ...]]], np.ndarray]:
    """all parameter tuples of tags A-D satisfying their equations, in priority order"""
    base = ring.base
    add, mul, conj, inv, norm = ring.add, ring.mul, ring.conj, ring.inv, ring.norm
    units = ring.units
    tuples: List[Tuple[str, Tuple[int, ...]]] = []
    mats = []

    # A: x x° = 1
    x = units[norm[units] == 1]
    tuples += [("A", (c,)) for c in x.tolist()]
    mats.append(np.stack([x, 0 * x, 0 * x, x], axis=1))

    # B: x x° != 1, diag(x, (x^-1)°)
    x = units[norm[units] != 1]
    tuples += [("B", (c,)) for c in x.tolist()]
    mats.append(np.stack([x, 0 * x, 0 * x, conj[inv[x]]], axis=1))

    # C: y != 0, x x° + y y° = 1, x y° + x° y = 0
    codes = np.arange(ring.size)
    x, y = [g.ravel() for g in np.meshgrid(codes, codes[1:], indexing="ij")]
    keep = (base.add[norm[x], norm[y]] == 1) & (
        add[mul[x, conj[y]], mul[conj[x], y]] == 0
    )
    x, y = x[keep], y[keep]
    tuples += [("C", (a, b)) for a, b in zip(x.tolist(), y.tolist())]
    mats.append(np.stack([x, y, y, x], axis=1))

    # D: x x° + pi^(2i+1) beta y y° = 1, pi^i (x y° + x° y) = 0
    ell = ring.ell
    ux, uy = [g.ravel() for g in np.meshgrid(units, units, indexing="ij")]
    for i in range(ell):
        beta_count = base.q ** (ell - i - 1)
        trace_part = ring.shift_up(add[mul[ux, conj[uy]], mul[conj[ux], uy]], i)
        for beta in range(beta_count):
            coefficient = int(base.shift_up(beta, 2 * i + 1))
            lhs = base.add[norm[ux], base.mul[coefficient, norm[uy]]]
            keep = (lhs == 1) & (trace_part == 0)
            x, y = ux[keep], uy[keep]
            upper = mul[ring.embed(int(base.shift_up(beta, i + 1))), y]
            lower = ring.shift_up(y, i)
            tuples += [("D", (i, beta, a, b)) for a, b in zip(x.tolist(), y.tolist())]
            mats.append(np.stack([x, upper, lower, x], axis=1))

    return tuples, np.concatenate(mats).astype(np.int64)


class GU2Classifier:
    """
    Representatives of every conjugacy class of an enumerated GU2, one per class:
    the first tuple of tags A, B, C, D (in that order) that lies in the class.
    """

    def __init__(self, handle: GroupHandle):
        if handle.kind != Kind.GU2:
            raise ValueError(f"GU2 classification needs a GU2 handle, got {handle!r}")
        self.handle = handle
        labels = handle.conjugacy_labels()
        tuples, mats = _gu2_candidates(handle.ring)
        inside = handle.contains(mats)
        if not inside.all():
            logger.debug(f"dropping {int((~inside).sum())} tuples outside the group")
        positions = np.flatnonzero(inside)
        classes = labels[handle.index_of(mats[positions])]

        self.tags: Dict[int, Set[str]] = {}
        self.reps: Dict[int, GU2ClassRep] = {}
        for pos, label in zip(positions.tolist(), classes.tolist()):
            tag, params = tuples[pos]
            self.tags.setdefault(label, set()).add(tag)
            if label not in self.reps:
                self.reps[label] = GU2ClassRep(
                    tag, params, Mat2.from_codes(handle.ring, mats[pos])
                )

        all_classes = set(np.unique(labels).tolist())
        missing = all_classes - set(self.reps)
        if missing:
            raise Falsification(
                "gu2-class-exhaustive",
                len(all_classes),
                len(self.reps),
                f"classes without a tag A-D representative, e.g. {handle.element(min(missing))!r}",
            )
        shared = sum(1 for tags in self.tags.values() if len(tags) > 1)
        logger.info(
            f"GU2 representatives: {len(self.reps)} classes, {shared} reached by more than one tag"
        )

    @classmethod
    def from_reps(
        cls, handle: GroupHandle, reps: Dict[int, GU2ClassRep], tags: Dict[int, Set[str]]
    ) -> "GU2Classifier":
        """classifier over a representative list computed earlier, e.g. a cached one"""
        classifier = cls.__new__(cls)
        classifier.handle = handle
        classifier.reps = reps
        classifier.tags = tags
        return classifier

    def classify_index(self, g: int) -> GU2ClassRep:
        return self.reps[int(self.handle.conjugacy_labels()[g])]

    def classify(self, A: Mat2) -> GU2ClassRep:
        try:
            g = self.handle.index(A)
        except KeyError:
            raise ValueError(f"{A!r} is not an element of {self.handle!r}")
        return self.classify_index(g)

    def tag_of_class(self, label: int) -> str:
        return self.reps[label].tag


def gu2_classify(A: Mat2, classifier: GU2Classifier) -> GU2ClassRep:
    return classifier.classify(A)
