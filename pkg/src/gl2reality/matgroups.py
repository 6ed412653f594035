"""
2x2 matrices over o_l / O_l, the star involution, and enumerated realizations
of GL_2(o_l) and GU_2(o_l) together with the Lie algebras gl_2 and gu_2.

Matrices are stored as rows of four ring codes (a11, a12, a21, a22).  A whole
group is an (N, 4) array sorted by the packed code
``((a11 * n + a12) * n + a21) * n + a22``, which is the canonical order every
index, class label and cache file refers to.
"""
import logging
from dataclasses import dataclass
from enum import Enum, IntEnum, auto
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from .rings import Ring, RElem
from .util import BudgetExceeded, NotInvertibleError, UnionFind

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
DEFAULT_SEED = 0x5EED


class Kind(str, Enum):
    GL2 = "gl2"
    GU2 = "gu2"


class Algebra(str, Enum):
    GL2 = "gl2"
    GU2 = "gu2"


def entry_ring(base: Ring, kind: Union[Kind, Algebra]) -> Ring:
    """ring the matrix entries live in: o_l for GL2, O_l for GU2"""
    return base.extension if kind.value == "gu2" else base


# --- vectorized matrix arithmetic on (N, 4) code arrays ----------------------


def batch_add(ring: Ring, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return ring.add[X, Y].astype(np.int64)


def batch_mul(ring: Ring, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    add, mul = ring.add, ring.mul
    a = add[mul[X[:, 0], Y[:, 0]], mul[X[:, 1], Y[:, 2]]]
    b = add[mul[X[:, 0], Y[:, 1]], mul[X[:, 1], Y[:, 3]]]
    c = add[mul[X[:, 2], Y[:, 0]], mul[X[:, 3], Y[:, 2]]]
    d = add[mul[X[:, 2], Y[:, 1]], mul[X[:, 3], Y[:, 3]]]
    return np.stack([a, b, c, d], axis=1).astype(np.int64)


def batch_det(ring: Ring, X: np.ndarray) -> np.ndarray:
    mul = ring.mul
    return ring.add[mul[X[:, 0], X[:, 3]], ring.neg[mul[X[:, 1], X[:, 2]]]].astype(
        np.int64
    )


def batch_tr(ring: Ring, X: np.ndarray) -> np.ndarray:
    return ring.add[X[:, 0], X[:, 3]].astype(np.int64)


def batch_scale(ring: Ring, s, X: np.ndarray) -> np.ndarray:
    s = np.asarray(s).reshape(-1, 1)
    return ring.mul[s, X].astype(np.int64)


def batch_inv(ring: Ring, X: np.ndarray) -> np.ndarray:
    """inverse via the adjugate; raises if some determinant is not a unit"""
    det_inv = ring.inv[batch_det(ring, X)]
    if (det_inv < 0).any():
        raise NotInvertibleError("matrix with non-unit determinant has no inverse")
    neg = ring.neg
    adj = np.stack([X[:, 3], neg[X[:, 1]], neg[X[:, 2]], X[:, 0]], axis=1)
    return batch_scale(ring, det_inv, adj)


def batch_star(ring: Ring, X: np.ndarray) -> np.ndarray:
    """[[a, b], [c, d]] -> [[d°, b°], [c°, a°]]"""
    if not ring.extended:
        raise ValueError(f"star needs the quadratic extension, got {ring.name}")
    conj = ring.conj
    return np.stack(
        [conj[X[:, 3]], conj[X[:, 1]], conj[X[:, 2]], conj[X[:, 0]]], axis=1
    ).astype(np.int64)


def batch_project(ring: Ring, X: np.ndarray, i: int) -> np.ndarray:
    return ring.project_codes(X, i).astype(np.int64)


def pack(ring: Ring, X: np.ndarray) -> np.ndarray:
    n = ring.size
    X = np.asarray(X, dtype=np.int64)
    return ((X[:, 0] * n + X[:, 1]) * n + X[:, 2]) * n + X[:, 3]


def unpack(ring: Ring, codes: np.ndarray) -> np.ndarray:
    n = ring.size
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.shape[0], 4), dtype=np.int64)
    for k in range(3, -1, -1):
        codes, out[:, k] = np.divmod(codes, n)
    return out


def identity_codes(ring: Ring) -> np.ndarray:
    return np.array([[ring.one, 0, 0, ring.one]], dtype=np.int64)


# --- single matrices ---------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    ring: Ring
    entries: tuple

    @classmethod
    def of(cls, ring: Ring, rows: Sequence[Sequence[Union[int, RElem]]]) -> "Mat2":
        """build from [[a, b], [c, d]] with ring elements or integers (k -> k*1)"""
        (a, b), (c, d) = rows
        return cls(ring, tuple(ring(v).code for v in (a, b, c, d)))

    @classmethod
    def from_codes(cls, ring: Ring, codes: Iterable[int]) -> "Mat2":
        return cls(ring, tuple(int(c) for c in codes))

    @classmethod
    def identity(cls, ring: Ring) -> "Mat2":
        return cls.of(ring, [[1, 0], [0, 1]])

    @classmethod
    def swap(cls, ring: Ring) -> "Mat2":
        """W = [[0, 1], [1, 0]]"""
        return cls.of(ring, [[0, 1], [1, 0]])

    def _batch(self) -> np.ndarray:
        return np.array([self.entries], dtype=np.int64)

    def _wrap(self, X: np.ndarray) -> "Mat2":
        return Mat2.from_codes(self.ring, X[0])

    def __getitem__(self, ij) -> RElem:
        i, j = ij
        return RElem(self.ring, self.entries[2 * i + j])

    @property
    def a11(self) -> RElem:
        return self[0, 0]

    @property
    def a12(self) -> RElem:
        return self[0, 1]

    @property
    def a21(self) -> RElem:
        return self[1, 0]

    @property
    def a22(self) -> RElem:
        return self[1, 1]

    def _check(self, other: "Mat2"):
        if other.ring is not self.ring:
            raise ValueError(
                f"matrices live over different rings: {self.ring.name}, {other.ring.name}"
            )

    def __mul__(self, other):
        if isinstance(other, Mat2):
            self._check(other)
            return self._wrap(batch_mul(self.ring, self._batch(), other._batch()))
        scalar = self.ring(other)
        return self._wrap(batch_scale(self.ring, [scalar.code], self._batch()))

    def __rmul__(self, other):
        return self * other

    def __add__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        return self._wrap(batch_add(self.ring, self._batch(), other._batch()))

    def __neg__(self) -> "Mat2":
        return Mat2.from_codes(self.ring, self.ring.neg[list(self.entries)])

    def __sub__(self, other: "Mat2") -> "Mat2":
        return self + (-other)

    def __pow__(self, k: int) -> "Mat2":
        result = Mat2.identity(self.ring)
        base = self if k >= 0 else self.inv()
        for _ in range(abs(k)):
            result = result * base
        return result

    def det(self) -> RElem:
        return RElem(self.ring, batch_det(self.ring, self._batch())[0])

    def tr(self) -> RElem:
        return RElem(self.ring, batch_tr(self.ring, self._batch())[0])

    def inv(self) -> "Mat2":
        return self._wrap(batch_inv(self.ring, self._batch()))

    def star(self) -> "Mat2":
        return self._wrap(batch_star(self.ring, self._batch()))

    def is_scalar(self) -> bool:
        a, b, c, d = self.entries
        return b == 0 and c == 0 and a == d

    def project(self, i: int) -> "Mat2":
        return Mat2(
            self.ring.at_level(i),
            tuple(int(c) for c in self.ring.project_codes(list(self.entries), i)),
        )

    def serre_lift(self, ell: int) -> "Mat2":
        return Mat2(
            self.ring.at_level(ell),
            tuple(int(c) for c in self.ring.lift_codes(list(self.entries), ell)),
        )

    def packed(self) -> int:
        return int(pack(self.ring, self._batch())[0])

    def __repr__(self):
        a, b, c, d = self.entries
        return f"Mat2([[{a}, {b}], [{c}, {d}]] over {self.ring.name})"


class MatOp(IntEnum):
    MUL: int = auto()
    INV: int = auto()
    DET: int = auto()
    TR: int = auto()
    STAR: int = auto()
    SCALAR_MUL: int = auto()
    ADD: int = auto()


def mat_ops(op: MatOp, A: Mat2, B: Union[Mat2, RElem, int, None] = None):
    if op == MatOp.MUL:
        return A * B
    if op == MatOp.INV:
        return A.inv()
    if op == MatOp.DET:
        return A.det()
    if op == MatOp.TR:
        return A.tr()
    if op == MatOp.STAR:
        return A.star()
    if op == MatOp.SCALAR_MUL:
        return A * B
    if op == MatOp.ADD:
        return A + B
    raise ValueError(f"unknown matrix operation supplied. Got {op}")


# --- membership and enumeration ---------------------------------------------


def group_order(q: int, ell: int, kind: Kind) -> int:
    """
    Examples:

    >>> group_order(3, 1, Kind.GL2), group_order(3, 2, Kind.GL2)
    (48, 3888)
    >>> group_order(3, 1, Kind.GU2), group_order(3, 2, Kind.GU2)
    (96, 7776)
    """
    kind = Kind(kind)
    if kind == Kind.GL2:
        return q ** (4 * ell - 3) * (q - 1) * (q * q - 1)
    return q ** (4 * ell - 3) * (q - 1) * (q + 1) ** 2


def membership_mask(ring: Ring, kind: Kind, X: np.ndarray) -> np.ndarray:
    unit_det = ring.inv[batch_det(ring, X)] >= 0
    if Kind(kind) == Kind.GL2:
        return unit_det
    unitary = (batch_mul(ring, batch_star(ring, X), X) == identity_codes(ring)).all(
        axis=1
    )
    return unit_det & unitary


def is_member(A: Mat2, kind: Kind) -> bool:
    if Kind(kind) == Kind.GU2 and not A.ring.extended:
        return False
    return bool(membership_mask(A.ring, kind, np.array([A.entries]))[0])


def _scan(ring: Ring, kind: Kind) -> np.ndarray:
    """filter every matrix over the ring, one a11 value at a time"""
    n = ring.size
    rest = np.stack(np.meshgrid(*[np.arange(n)] * 3, indexing="ij"), axis=-1).reshape(
        -1, 3
    )
    chunks = []
    for a in range(n):
        X = np.concatenate([np.full((rest.shape[0], 1), a), rest], axis=1)
        chunks.append(X[membership_mask(ring, kind, X)])
    return np.concatenate(chunks)


def _unitary_by_columns(ring: Ring) -> np.ndarray:
    """
    Solve A*A = I column first: pick (a, c) with a°c + c°a = 0, then the second
    column from a°d + c°b = 1 and b°d + d°b = 0.
    """
    n = ring.size
    add, mul, neg, inv, conj = ring.add, ring.mul, ring.neg, ring.inv, ring.conj
    codes = np.arange(n)
    a, c = [g.ravel() for g in np.meshgrid(codes, codes, indexing="ij")]
    isotropic = add[mul[conj[a], c], mul[conj[c], a]] == 0
    unimodular = (inv[a] >= 0) | (inv[c] >= 0)
    a, c = a[isotropic & unimodular], c[isotropic & unimodular]
    logger.debug(f"{a.shape[0]} admissible first columns over {ring.name}")

    one = ring.one
    solutions = []
    for a0, c0 in zip(a.tolist(), c.tolist()):
        free = codes
        if inv[a0] >= 0:
            b = free
            rhs = add[one, neg[mul[conj[c0], b]]]
            d = mul[inv[conj[a0]], rhs]
        else:
            d = free
            rhs = add[one, neg[mul[conj[a0], d]]]
            b = mul[inv[conj[c0]], rhs]
        keep = add[mul[conj[b], d], mul[conj[d], b]] == 0
        m = int(keep.sum())
        solutions.append(
            np.stack(
                [np.full(m, a0), b[keep], np.full(m, c0), d[keep]], axis=1
            ).astype(np.int64)
        )
    X = np.concatenate(solutions)
    assert membership_mask(ring, Kind.GU2, X).all(), "column solve left the group"
    return X


class GroupHandle:
    """
    An enumerated GL2 or GU2, elements in canonical order.  Elements are
    addressed by their index; `inverse`, `multiply` and `conjugation_action`
    all work on index arrays.
    """

    def __init__(
        self,
        base: Ring,
        kind: Kind,
        elements: np.ndarray,
        seed: int = DEFAULT_SEED,
    ):
        self.base = base
        self.kind = Kind(kind)
        self.ring = entry_ring(base, self.kind)
        codes = pack(self.ring, elements)
        order = np.argsort(codes)
        self.codes = codes[order]
        self.elements = np.asarray(elements, dtype=np.int64)[order]
        if (np.diff(self.codes) == 0).any():
            raise ValueError("group elements must be distinct")
        self.order = len(self.codes)
        self.identity = int(self.index_of(identity_codes(self.ring))[0])
        self.inverse = self.index_of(batch_inv(self.ring, self.elements))
        self.seed = seed
        self._generators: Optional[List[int]] = None
        self._class_labels: Optional[np.ndarray] = None

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def ell(self) -> int:
        return self.base.ell

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"<GroupHandle {self.kind.value.upper()}({self.base.name}), order {self.order}>"

    def index_of(self, X: np.ndarray) -> np.ndarray:
        """positions of the given matrices; raises KeyError for non-members"""
        codes = pack(self.ring, X)
        idx = np.searchsorted(self.codes, codes)
        idx = np.minimum(idx, self.order - 1)
        if not (self.codes[idx] == codes).all():
            raise KeyError("matrix is not an element of the group")
        return idx

    def contains(self, X: np.ndarray) -> np.ndarray:
        codes = pack(self.ring, X)
        idx = np.minimum(np.searchsorted(self.codes, codes), self.order - 1)
        return self.codes[idx] == codes

    def element(self, i: int) -> Mat2:
        return Mat2.from_codes(self.ring, self.elements[i])

    def index(self, A: Mat2) -> int:
        return int(self.index_of(np.array([A.entries]))[0])

    def multiply(self, i, j) -> np.ndarray:
        X = self.elements[np.atleast_1d(i)]
        Y = self.elements[np.atleast_1d(j)]
        return self.index_of(batch_mul(self.ring, X, Y))

    def conjugation_action(self, s: int) -> np.ndarray:
        """permutation g -> s g s^-1 of all element indices"""
        S = self.elements[[s]]
        S_inv = self.elements[[self.inverse[s]]]
        return self.index_of(
            batch_mul(self.ring, batch_mul(self.ring, S, self.elements), S_inv)
        )

    @property
    def generators(self) -> List[int]:
        if self._generators is None:
            self._generators = find_generators(self, self.seed)
        return self._generators

    def conjugacy_labels(self) -> np.ndarray:
        """for each element the least index of its conjugacy class"""
        if self._class_labels is None:
            uf = UnionFind(self.order)
            everything = np.arange(self.order)
            for s in self.generators:
                uf.union_pairs(everything, self.conjugation_action(s))
            self._class_labels = uf.roots()
            logger.info(
                f"{self!r}: {len(np.unique(self._class_labels))} conjugacy classes"
            )
        return self._class_labels

    def subgroup_closure(self, gens: Sequence[int]) -> np.ndarray:
        """boolean mask of the subgroup generated by the given indices"""
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        frontier = np.array([self.identity])
        while frontier.size:
            found = []
            for g in gens:
                products = self.multiply(frontier, np.full(frontier.shape, g))
                fresh = np.unique(products[~mask[products]])
                mask[fresh] = True
                found.append(fresh)
            frontier = np.unique(np.concatenate(found))
        return mask


def find_generators(handle: GroupHandle, seed: int = DEFAULT_SEED) -> List[int]:
    """greedy generating set: add random elements outside the current closure"""
    rng = np.random.default_rng(seed)
    gens: List[int] = []
    inside = np.zeros(handle.order, dtype=bool)
    inside[handle.identity] = True
    for candidate in rng.permutation(handle.order).tolist():
        if inside[candidate]:
            continue
        gens.append(candidate)
        inside = handle.subgroup_closure(gens)
        if inside.all():
            break
    logger.debug(f"{handle!r} generated by {len(gens)} elements")
    return gens


def enumerate_group(
    base: Ring,
    kind: Kind,
    budget: int = DEFAULT_BUDGET,
    method: str = "columns",
    seed: int = DEFAULT_SEED,
) -> GroupHandle:
    kind = Kind(kind)
    if base.extended:
        raise ValueError(f"pass the base ring, got {base.name}")
    expected = group_order(base.q, base.ell, kind)
    if expected > budget:
        raise BudgetExceeded(f"{kind.value.upper()}({base.name})", expected, budget)

    ring = entry_ring(base, kind)
    if kind == Kind.GU2 and method == "columns":
        elements = _unitary_by_columns(ring)
    elif method in ("columns", "scan"):
        elements = _scan(ring, kind)
    else:
        raise ValueError(f"unknown enumeration method: {method}")

    handle = GroupHandle(base, kind, elements, seed=seed)
    logger.info(f"Enumerated {handle!r}")
    assert handle.order == expected, f"enumerated {handle.order}, formula {expected}"
    return handle


class Mode(IntEnum):
    MEMBERSHIP: int = auto()
    ENUMERATE: int = auto()
    ORDER: int = auto()


def group_members(
    base: Ring,
    kind: Kind,
    mode: Mode,
    A: Optional[Mat2] = None,
    budget: int = DEFAULT_BUDGET,
):
    if mode == Mode.MEMBERSHIP:
        return is_member(A, kind)
    if mode == Mode.ENUMERATE:
        return enumerate_group(base, kind, budget)
    if mode == Mode.ORDER:
        return group_order(base.q, base.ell, kind)
    raise ValueError(f"unknown mode supplied. Got {mode}")


# --- Lie algebras and congruence subgroups -----------------------------------


def is_lie_member(A: Mat2, algebra: Algebra) -> bool:
    if Algebra(algebra) == Algebra.GL2:
        return not A.ring.extended
    if not A.ring.extended:
        return False
    return (A + A.star()).entries == (0, 0, 0, 0)


def enumerate_lie(base: Ring, algebra: Algebra, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """gl_2(o_m) or gu_2(o_m) over the level of `base`, canonical order"""
    algebra = Algebra(algebra)
    size = base.size**4
    if size > budget:
        raise BudgetExceeded(f"{algebra.value}({base.name})", size, budget)
    if algebra == Algebra.GL2:
        grids = np.meshgrid(*[np.arange(base.size)] * 4, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    ring = base.extension
    # A + A* = 0 means d = -a° and b, c in eps*o_m
    # codes below |o_m| are exactly the elements 0 + y*eps
    skew = np.arange(base.size)
    a, b, c = [
        g.ravel() for g in np.meshgrid(np.arange(ring.size), skew, skew, indexing="ij")
    ]
    d = ring.neg[ring.conj[a]]
    X = np.stack([a, b, c, d], axis=1).astype(np.int64)
    return X[np.argsort(pack(ring, X))]


class LieMode(IntEnum):
    MEMBERSHIP: int = auto()
    ENUMERATE: int = auto()


def lie_members(
    base: Ring,
    algebra: Algebra,
    mode: LieMode,
    A: Optional[Mat2] = None,
    budget: int = DEFAULT_BUDGET,
):
    if mode == LieMode.MEMBERSHIP:
        return is_lie_member(A, algebra)
    if mode == LieMode.ENUMERATE:
        return enumerate_lie(base, algebra, budget)
    raise ValueError(f"unknown mode supplied. Got {mode}")


def congruence_subgroup(handle: GroupHandle, i: int) -> np.ndarray:
    """indices of K^i, the kernel of reduction mod pi^i"""
    if not 1 <= i <= handle.ell:
        raise ValueError(f"K^{i} is not defined at level {handle.ell}")
    if i == handle.ell:
        return np.array([handle.identity])
    reduced = batch_project(handle.ring, handle.elements, i)
    one = handle.ring.at_level(i).one
    return np.flatnonzero((reduced == np.array([one, 0, 0, one])).all(axis=1))


def lie_coordinates(handle: GroupHandle, indices: np.ndarray, i: int) -> np.ndarray:
    """X with g = I + pi^i X, as codes over the level l - i ring"""
    ring = handle.ring
    X = handle.elements[indices]
    minus_one = ring.neg[ring.one]
    shifted = batch_add(ring, X, np.array([[minus_one, 0, 0, minus_one]]))
    return ring.shift_down(shifted, i).astype(np.int64)
