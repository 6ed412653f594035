"""
Character tables of enumerated groups by the modular class-sum method.

The class sums C_1 .. C_k span the centre of the group algebra, and
C_i C_j = sum_k a_ijk C_k.  Over F_m with m = 1 mod exponent(G) every
irreducible character gives a common eigenvector w = (|c_k| chi(c_k) / chi(1))_k
of the matrices (a_ijk)_jk; splitting F_m^k into these eigenlines with random
combinations of the class matrices recovers the whole table.

On top of the table live the Frobenius-Schur indicators, the restriction of
characters to the abelian congruence subgroups K^i (which fixes the orbit
type of a character) and the tangibility conditions on regular characters.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from .census import (
    centralizer_formula,
    nonregular_self_dual_formula,
    orthogonal_symplectic_formula,
    tangible_formula,
)
from .classify import OrbitType, is_regular, orbit_type
from .matgroups import (
    DEFAULT_SEED,
    Algebra,
    GroupHandle,
    Kind,
    Mat2,
    batch_det,
    batch_inv,
    batch_mul,
    congruence_subgroup,
    entry_ring,
    enumerate_lie,
    lie_coordinates,
    membership_mask,
    pack,
)
from .modular import charpoly, column_basis, inv_mod, nullspace, roots
from .rings import Ring
from .util import Falsification, UnionFind, admissible_primes, lcm, primitive_root

logger = logging.getLogger(__name__)

MAX_SPLIT_ATTEMPTS = 12
MAX_MODULI = 3


class SplittingFailed(RuntimeError):
    pass


# --- class structure -------------------------------------------------------------


@dataclass
class ClassData:
    handle: GroupHandle
    class_of: np.ndarray
    reps: np.ndarray
    sizes: np.ndarray
    # powers[c, j] = class of rep_c ** j for j below the largest element order
    powers: np.ndarray
    orders: np.ndarray
    coefficients: np.ndarray

    @property
    def count(self) -> int:
        return len(self.reps)

    @property
    def identity_class(self) -> int:
        return int(self.class_of[self.handle.identity])

    @property
    def exponent(self) -> int:
        return lcm(self.orders.tolist())

    def power_map(self, j: int) -> np.ndarray:
        return self.powers[np.arange(self.count), j % self.orders]

    @property
    def inverse_map(self) -> np.ndarray:
        return self.power_map(-1)

    @property
    def square_map(self) -> np.ndarray:
        return self.power_map(2)

    @property
    def involution_count(self) -> int:
        """number of g with g^2 = 1, identity included"""
        return int(self.sizes[self.square_map == self.identity_class].sum())

    @property
    def real_classes(self) -> int:
        return int((self.inverse_map == np.arange(self.count)).sum())


def class_coefficients(handle: GroupHandle, class_of: np.ndarray, reps: np.ndarray) -> np.ndarray:
    """a[i, j, k] = #{(x, y) in c_i x c_j : x y = rep_k}"""
    k = len(reps)
    inverses = handle.elements[handle.inverse]
    coefficients = np.zeros((k, k, k), dtype=np.int64)
    for c, z in enumerate(reps.tolist()):
        y = handle.index_of(batch_mul(handle.ring, inverses, handle.elements[[z]]))
        pairs = class_of * k + class_of[y]
        coefficients[:, :, c] = np.bincount(pairs, minlength=k * k).reshape(k, k)
    return coefficients


def class_structure(handle: GroupHandle) -> ClassData:
    labels = handle.conjugacy_labels()
    reps, class_of, sizes = np.unique(labels, return_inverse=True, return_counts=True)
    k = len(reps)

    columns = [np.full(k, class_of[handle.identity])]
    orders = np.zeros(k, dtype=np.int64)
    current = reps.copy()
    j = 1
    while (orders == 0).any():
        columns.append(class_of[current])
        orders[(orders == 0) & (current == handle.identity)] = j
        current = handle.multiply(current, reps)
        j += 1

    data = ClassData(
        handle=handle,
        class_of=class_of,
        reps=reps,
        sizes=sizes,
        powers=np.stack(columns, axis=1),
        orders=orders,
        coefficients=class_coefficients(handle, class_of, reps),
    )
    # every pair (x, y) with x y = z is counted once for each z
    assert (data.coefficients.sum(axis=(0, 1)) == handle.order).all()
    logger.info(f"{handle!r}: {k} classes, exponent {data.exponent}")
    return data


# --- the table ---------------------------------------------------------------------


@dataclass(frozen=True)
class Restriction:
    """restriction of a character to K^i, given by one orbit of ψ_A"""

    character: int
    datum: Mat2
    orbit_size: int
    multiplicity: int
    type: OrbitType


@dataclass
class CharTable:
    classes: ClassData
    modulus: int
    values: np.ndarray
    degrees: np.ndarray
    indicators: Optional[np.ndarray] = None
    restrictions: Optional[List[Restriction]] = None

    @property
    def count(self) -> int:
        return len(self.degrees)

    @cached_property
    def root(self) -> int:
        return primitive_root(self.modulus)

    @property
    def real_valued(self) -> np.ndarray:
        return (self.values == self.values[:, self.classes.inverse_map]).all(axis=1)

    @property
    def types(self) -> Optional[List[OrbitType]]:
        if self.restrictions is None:
            return None
        return [r.type for r in self.restrictions]

    def zeta(self, n: int) -> int:
        """primitive n-th root of unity in F_m"""
        if (self.modulus - 1) % n:
            raise ValueError(f"F_{self.modulus} has no primitive {n}-th root of unity")
        return pow(self.root, (self.modulus - 1) // n, self.modulus)

    def root_powers(self, exponents: np.ndarray, order: int) -> np.ndarray:
        """zeta_order ** exponents in F_m"""
        exponents = np.asarray(exponents, dtype=np.int64) % order
        g = math.gcd(order, *np.unique(exponents).tolist())
        n = order // g
        zeta = self.zeta(n)
        table = np.array([pow(zeta, j, self.modulus) for j in range(n)], dtype=np.int64)
        return table[exponents // g]

    def cyclotomic(self, c: int) -> np.ndarray:
        """
        Eigenvalue multiplicities of every character on class c: row chi holds
        mu with chi(g) = sum_k mu[k] exp(2 pi i k / o), o the order of g.
        """
        m = self.modulus
        o = int(self.classes.orders[c])
        j = np.arange(o)
        fourier = self.root_powers(-np.outer(j, j), o)
        on_powers = self.values[:, self.classes.powers[c, :o]]
        mu = (on_powers @ fourier.T) % m * inv_mod(o, m) % m
        assert (mu.sum(axis=1) == self.degrees).all(), f"bad eigenvalue count on class {c}"
        return mu

    def complex_values(self) -> np.ndarray:
        out = np.zeros(self.values.shape, dtype=complex)
        for c in range(self.classes.count):
            mu = self.cyclotomic(c)
            o = mu.shape[1]
            out[:, c] = mu @ np.exp(2j * np.pi * np.arange(o) / o)
        return out

    def as_dict(self) -> dict:
        lifts = self.complex_values()
        return {
            "modulus": self.modulus,
            "classes": [
                {
                    "representative": int(r),
                    "size": int(s),
                    "order": int(o),
                }
                for r, s, o in zip(self.classes.reps, self.classes.sizes, self.classes.orders)
            ],
            "characters": [
                {
                    "degree": int(self.degrees[chi]),
                    "indicator": None if self.indicators is None else int(self.indicators[chi]),
                    "real_valued": bool(self.real_valued[chi]),
                    "type": None if self.types is None else self.types[chi].value,
                    "residues": self.values[chi].tolist(),
                    "values": [
                        [round(float(z.real), 6) + 0.0, round(float(z.imag), 6) + 0.0]
                        for z in lifts[chi]
                    ],
                }
                for chi in range(self.count)
            ],
        }


def _eigenspaces(R: np.ndarray, m: int) -> List[np.ndarray]:
    size = R.shape[0]
    spaces = []
    for value in roots(charpoly(R, m), m):
        shifted = (R - value * np.eye(size, dtype=np.int64)) % m
        spaces.append(nullspace(shifted, m))
    return spaces


def _eigenlines(classes: ClassData, m: int, rng: np.random.Generator) -> List[np.ndarray]:
    k = classes.count
    a = classes.coefficients % m
    pending = [np.eye(k, dtype=np.int64)]
    lines = []
    while pending:
        V = pending.pop()
        if V.shape[1] == 1:
            lines.append(V[:, 0])
            continue
        V, pivots = column_basis(V, m)
        for _ in range(MAX_SPLIT_ATTEMPTS):
            weights = rng.integers(0, m, size=k)
            T = np.tensordot(weights, a, axes=(0, 0)) % m
            R = (T @ V % m)[pivots]
            spaces = _eigenspaces(R, m)
            if sum(s.shape[1] for s in spaces) != V.shape[1]:
                raise SplittingFailed(f"class matrices are not diagonalizable over F_{m}")
            if len(spaces) > 1:
                break
        else:
            raise SplittingFailed(
                f"no splitting of a {V.shape[1]}-dimensional eigenspace over F_{m}"
            )
        pending.extend(V @ s % m for s in spaces)
    return lines


def _degree(value: int, order: int, m: int) -> int:
    """the divisor d of |G| with d^2 = value mod m"""
    for d in range(1, math.isqrt(order) + 1):
        if order % d == 0 and d * d % m == value:
            return d
    raise SplittingFailed(f"no character degree squares to {value} mod {m}")


def _table_mod(classes: ClassData, m: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    order = classes.handle.order
    conj = classes.inverse_map
    one = classes.identity_class
    inv_sizes = np.array([inv_mod(s, m) for s in classes.sizes.tolist()], dtype=np.int64)

    rows, degrees = [], []
    for line in _eigenlines(classes, m, rng):
        w = line * inv_mod(line[one], m) % m
        norm = int((w * w[conj] % m * inv_sizes % m).sum() % m)
        d = _degree(order * inv_mod(norm, m) % m, order, m)
        rows.append(w * d % m * inv_sizes % m)
        degrees.append(d)

    ranked = sorted(range(len(rows)), key=lambda r: (degrees[r], rows[r].tolist()))
    return np.array([rows[r] for r in ranked]), np.array([degrees[r] for r in ranked])


def check_orthogonality(table: CharTable) -> None:
    classes, m = table.classes, table.modulus
    order = classes.handle.order
    X = table.values
    X_bar = X[:, classes.inverse_map]
    sizes = classes.sizes % m

    squares = int((table.degrees**2).sum())
    if squares != order:
        raise Falsification("character-degree-squares", order, squares)
    rows = ((X * sizes) % m) @ X_bar.T % m
    if not (rows == order % m * np.eye(table.count, dtype=np.int64)).all():
        raise Falsification("character-row-orthogonality", "|G| delta", "mismatch", f"mod {m}")
    columns = X.T @ X_bar % m
    centralizers = np.array(
        [order // s % m for s in classes.sizes.tolist()], dtype=np.int64
    )
    if not (columns == np.diag(centralizers)).all():
        raise Falsification(
            "character-column-orthogonality", "|C_G(g)| delta", "mismatch", f"mod {m}"
        )


def character_table(classes: ClassData, seed: int = DEFAULT_SEED) -> CharTable:
    order = classes.handle.order
    lower = 2 * (math.isqrt(order - 1) + 1)
    rng = np.random.default_rng(seed)
    for _, m in zip(range(MAX_MODULI), admissible_primes(classes.exponent, lower)):
        try:
            values, degrees = _table_mod(classes, m, rng)
        except SplittingFailed as e:
            logger.warning(f"Modulus {m} failed ({e}), trying the next one")
            continue
        table = CharTable(classes, m, values, degrees)
        if table.count != classes.count:
            raise Falsification("character-count", classes.count, table.count)
        check_orthogonality(table)
        logger.info(
            f"{classes.handle!r}: {table.count} characters over F_{m}, "
            f"largest degree {int(degrees.max())}"
        )
        return table
    raise RuntimeError(f"Character table computation failed for {MAX_MODULI} moduli")


# --- Frobenius-Schur indicators ---------------------------------------------------


def fs_indicators(table: CharTable) -> CharTable:
    classes, m = table.classes, table.modulus
    order = classes.handle.order
    sizes = classes.sizes % m
    raw = (table.values[:, classes.square_map] * sizes % m).sum(axis=1) % m
    raw = raw * inv_mod(order, m) % m
    lookup = {0: 0, 1: 1, m - 1: -1}
    if not set(raw.tolist()) <= set(lookup):
        raise Falsification("fs-indicator-range", "{-1, 0, 1}", sorted(set(raw.tolist())))
    table.indicators = np.array([lookup[v] for v in raw.tolist()], dtype=np.int64)

    aggregate = int((table.indicators * table.degrees).sum())
    if aggregate != classes.involution_count:
        raise Falsification("fs-aggregate", classes.involution_count, aggregate)
    if not ((table.indicators != 0) == table.real_valued).all():
        raise Falsification(
            "fs-real-valued", "indicator 0 exactly on non-real characters", "mismatch"
        )
    return table


@dataclass(frozen=True)
class SelfDualCensus:
    real_characters: int
    orthogonal_degree_sum: int
    symplectic_degree_sum: int


def self_dual_census(table: CharTable) -> SelfDualCensus:
    if table.indicators is None:
        fs_indicators(table)
    handle = table.classes.handle
    census = SelfDualCensus(
        real_characters=int(table.real_valued.sum()),
        orthogonal_degree_sum=int(table.degrees[table.indicators == 1].sum()),
        symplectic_degree_sum=int(table.degrees[table.indicators == -1].sum()),
    )
    if census.real_characters != table.classes.real_classes:
        raise Falsification(
            "real-character-count", table.classes.real_classes, census.real_characters
        )
    expected = orthogonal_symplectic_formula(handle.q, handle.ell, handle.kind)
    computed = (census.orthogonal_degree_sum, census.symplectic_degree_sum)
    if computed != expected:
        raise Falsification("orthogonal-symplectic-degrees", expected, computed)
    return census


def symplectic_split(table: CharTable) -> Dict[str, int]:
    """degree sum of the symplectic characters, non-regular and regular"""
    if table.indicators is None or table.types is None:
        raise ValueError("symplectic split needs indicators and restriction types")
    symplectic = table.indicators == -1
    nonregular = np.array([t == OrbitType.NREG for t in table.types])
    return {
        "nonregular": int(table.degrees[symplectic & nonregular].sum()),
        "regular": int(table.degrees[symplectic & ~nonregular].sum()),
    }


def degrees_by_type(table: CharTable) -> Dict[str, List[int]]:
    if table.types is None:
        raise ValueError("degrees by type need restriction types")
    found: Dict[str, set] = {}
    for t, d in zip(table.types, table.degrees.tolist()):
        found.setdefault(t.value, set()).add(d)
    return {t: sorted(ds) for t, ds in sorted(found.items())}


# --- restriction to congruence subgroups ------------------------------------------


@dataclass
class LieDuality:
    """
    K^i = I + pi^i g(o_{l-i}) for 2i >= l, with its characters
    psi_A(I + pi^i X) = psi(pi^i tr(A X)) for A in g(o_{l-i}).
    """

    level: int
    ring: Ring
    algebra: Algebra
    lie: np.ndarray
    codes: np.ndarray
    orbit_labels: np.ndarray
    kernel: np.ndarray
    pairing: np.ndarray

    def index(self, A: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.codes, pack(self.ring, A))

    def matrix(self, index: int) -> Mat2:
        return Mat2.from_codes(self.ring, self.lie[index])


def lie_duality(handle: GroupHandle, i: int) -> LieDuality:
    if not 2 * i >= handle.ell or i >= handle.ell:
        raise ValueError(f"K^{i} of {handle!r} is not an abelian congruence subgroup")
    level = handle.ell - i
    algebra = Algebra(handle.kind.value)
    small = handle.base.at_level(level)
    ring = entry_ring(small, algebra)
    lie = enumerate_lie(small, algebra)
    codes = pack(ring, lie)

    kernel = congruence_subgroup(handle, i)
    X = lie_coordinates(handle, kernel, i)
    assert len(kernel) == len(lie), f"|K^{i}| = {len(kernel)} but |g| = {len(lie)}"

    add, mul = ring.add, ring.mul
    A, B = lie[:, None, :], X[None, :, :]
    trace = add[
        add[mul[A[..., 0], B[..., 0]], mul[A[..., 1], B[..., 2]]],
        add[mul[A[..., 2], B[..., 1]], mul[A[..., 3], B[..., 3]]],
    ]
    pairing = ring.psi[trace].astype(np.int64)

    uf = UnionFind(len(lie))
    everything = np.arange(len(lie))
    for s in handle.generators:
        S = handle.elements[[s]]
        if level < handle.ell:
            S = handle.ring.project_codes(S, level).astype(np.int64)
        image = batch_mul(ring, batch_mul(ring, S, lie), batch_inv(ring, S))
        uf.union_pairs(everything, np.searchsorted(codes, pack(ring, image)))
    return LieDuality(level, ring, algebra, lie, codes, uf.roots(), kernel, pairing)


def restriction_multiplicities(table: CharTable, duality: LieDuality) -> np.ndarray:
    """<chi|K, psi_A> for every character chi and every A"""
    m = table.modulus
    on_kernel = table.values[:, table.classes.class_of[duality.kernel]]
    psi_bar = table.root_powers(-duality.pairing, duality.ring.psi_order)
    return on_kernel @ psi_bar.T % m * inv_mod(len(duality.kernel), m) % m


def restrict(table: CharTable, duality: LieDuality) -> List[Restriction]:
    mult = restriction_multiplicities(table, duality)
    records = []
    for chi in range(table.count):
        support = np.flatnonzero(mult[chi])
        if support.size == 0 or int(mult[chi].sum()) != int(table.degrees[chi]):
            raise Falsification(
                "restriction-decomposition",
                int(table.degrees[chi]),
                int(mult[chi].sum()),
                f"character {chi} on K^{table.classes.handle.ell - duality.level}",
            )
        orbits = np.unique(duality.orbit_labels[support])
        if len(orbits) != 1 or len(support) != int(
            (duality.orbit_labels == orbits[0]).sum()
        ):
            raise Falsification(
                "restriction-single-orbit", 1, len(orbits), f"character {chi}"
            )
        datum = duality.matrix(int(orbits[0]))
        records.append(
            Restriction(
                character=chi,
                datum=datum,
                orbit_size=len(support),
                multiplicity=int(mult[chi, support[0]]),
                type=orbit_type(datum, duality.algebra),
            )
        )
    return records


def restriction_typing(table: CharTable) -> List[OrbitType]:
    """type of every character through its restriction to K^(l-1)"""
    handle = table.classes.handle
    if handle.ell < 2:
        raise ValueError(f"restriction typing needs level >= 2, got {handle!r}")
    table.restrictions = restrict(table, lie_duality(handle, handle.ell - 1))
    counts = {t.value: table.types.count(t) for t in OrbitType}
    logger.info(f"Character types: {counts}")
    return table.types


# --- centralizers and Z_A -------------------------------------------------------------


@dataclass(frozen=True)
class CentralizerData:
    type: OrbitType
    centralizer_order: int
    formula: int
    center_order: int
    za: np.ndarray

    @property
    def za_index(self) -> int:
        return self.center_order // len(self.za)


def centralizer(A: Mat2, kind: Kind) -> np.ndarray:
    """{x I + y A} intersected with G at the level of A, for regular A"""
    ring = A.ring
    add, mul = ring.add, ring.mul
    a11, a12, a21, a22 = A.entries
    x, y = [g.ravel() for g in np.meshgrid(np.arange(ring.size), np.arange(ring.size))]
    M = np.stack(
        [add[x, mul[y, a11]], mul[y, a12], mul[y, a21], add[x, mul[y, a22]]], axis=1
    ).astype(np.int64)
    return M[membership_mask(ring, kind, M)]


def za_level(ell: int) -> int:
    """
    Level at which Z_A compares determinants.

    >>> [za_level(ell) for ell in (1, 2, 3, 4)]
    [1, 1, 1, 2]
    """
    return max(ell // 2, 1)


def centralizer_and_za(A: Mat2, kind: Kind, ell: Optional[int] = None) -> CentralizerData:
    """
    Centralizer order of A in G(o_m) (m the level of A), and the group
    Z_A of scalars of G(o_l) whose reduction to level floor(l/2) is the
    determinant of an element centralizing A there.  At l = 1 the
    reduction level is 1.
    """
    kind = Kind(kind)
    if not is_regular(A):
        raise ValueError(f"{A!r} is not regular")
    ring = A.ring
    level = ring.ell
    ell = level if ell is None else ell
    lower = za_level(ell)
    if lower > level:
        raise ValueError(f"Z_A at level {ell} needs A over level {lower}, got {level}")
    kind_type = orbit_type(A, Algebra(kind.value))
    order = len(centralizer(A, kind))

    small = A.project(lower) if lower < level else A
    dets = np.unique(batch_det(small.ring, centralizer(small, kind)))
    big = ring.at_level(ell)
    scalars = big.units
    if kind == Kind.GU2:
        scalars = scalars[big.norm[scalars] == 1]
    za = scalars[np.isin(big.project_codes(scalars, lower), dets)]
    return CentralizerData(
        type=kind_type,
        centralizer_order=order,
        formula=centralizer_formula(ring.q, level, kind, kind_type),
        center_order=len(scalars),
        za=za,
    )


# --- tangibility ---------------------------------------------------------------------


@dataclass(frozen=True)
class TangibleRecord:
    character: int
    datum: Mat2
    t1: bool
    t2: bool
    type: OrbitType

    @property
    def tangible(self) -> bool:
        return self.t1 and self.t2


@dataclass
class TangibilityCensus:
    records: List[TangibleRecord]
    counts: Dict[str, int] = field(default_factory=dict)
    nonregular_self_dual: int = 0


def tangibility_census(table: CharTable) -> TangibilityCensus:
    handle = table.classes.handle
    ell, m = handle.ell, table.modulus
    if ell < 2 or ell % 2:
        raise ValueError(f"tangibility is checked at even levels >= 2, got {handle!r}")
    if table.types is None:
        restriction_typing(table)
    duality = lie_duality(handle, ell // 2)
    data = restrict(table, duality)
    real = table.real_valued

    records = []
    for chi, restriction in enumerate(data):
        if table.types[chi] == OrbitType.NREG:
            continue
        A = restriction.datum
        a = int(duality.index(np.array([A.entries]))[0])
        minus_a = int(duality.index(np.array([(-A).entries]))[0])
        t1 = duality.orbit_labels[a] == duality.orbit_labels[minus_a]

        za = centralizer_and_za(A, handle.kind, ell).za
        zeros = np.zeros_like(za)
        scalars = handle.index_of(np.stack([za, zeros, zeros, za], axis=1))
        t2 = int(table.values[chi, table.classes.class_of[scalars]].sum() % m) != 0

        record = TangibleRecord(chi, A, bool(t1), bool(t2), table.types[chi])
        if record.tangible != bool(real[chi]):
            raise Falsification(
                "tangible-self-dual",
                bool(real[chi]),
                record.tangible,
                f"character {chi} of degree {int(table.degrees[chi])}, type "
                f"{record.type.value}, datum {A!r}, T1={record.t1}, T2={record.t2}",
            )
        records.append(record)

    census = TangibilityCensus(records)
    for t in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS):
        census.counts[t.value] = sum(r.tangible and r.type == t for r in records)
    expected = tangible_formula(handle.q, ell)
    if census.counts != expected:
        raise Falsification("tangible-counts", expected, census.counts)

    # real non-regular characters are the real characters trivial on K^(l-1)
    nonregular_real = {
        chi for chi, t in enumerate(table.types) if t == OrbitType.NREG and real[chi]
    }
    trivial_real = {
        r.character
        for r in table.restrictions
        if real[r.character] and not any(r.datum.entries)
    }
    if nonregular_real != trivial_real:
        raise Falsification(
            "nonregular-real-pullback", sorted(trivial_real), sorted(nonregular_real)
        )
    census.nonregular_self_dual = len(nonregular_real)
    expected_nonregular = nonregular_self_dual_formula(handle.q, ell)
    if census.nonregular_self_dual != expected_nonregular:
        raise Falsification(
            "nonregular-self-dual", expected_nonregular, census.nonregular_self_dual
        )
    return census
