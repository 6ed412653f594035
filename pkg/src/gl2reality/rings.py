"""
Truncated discrete valuation rings o_l and their unramified quadratic
extensions O_l = o_l[eps], realized as lookup tables over canonical codes.

A base element is the integer ``sum(d_k * q**k)`` of its pi-adic digits
``d_0 .. d_{l-1}``.  In mixed characteristic (o_l = Z/p^l) that is the integer
itself; in equal characteristic (o_l = F_q[t]/(t^l)) every digit is an F_q code
``sum(a_j * p**j)`` in the polynomial basis modulo the least irreducible of
degree f.  An extension element x + y*eps has code ``x * |o_l| + y``.
"""
import logging
from dataclasses import dataclass
from enum import Enum, IntEnum, auto
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from .util import BudgetExceeded, NotInvertibleError, digit_matrix, is_prime, to_digits

logger = logging.getLogger(__name__)


class Family(str, Enum):
    MIXED = "mixed"
    EQUAL = "equal"


@dataclass(frozen=True)
class RingDescriptor:
    family: Family
    p: int
    f: int
    ell: int
    extended: bool
    epsilon_sq: int

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def size(self) -> int:
        base = self.q**self.ell
        return base * base if self.extended else base

    def header(self) -> dict:
        return {
            "family": self.family.value,
            "p": self.p,
            "f": self.f,
            "ell": self.ell,
            "extended": self.extended,
            "epsilonSq": list(to_digits(self.epsilon_sq, self.q, self.ell)),
        }


def _residue_field(p: int, f: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """add, mul and absolute trace tables of F_q, q = p**f"""
    q = p**f
    codes = np.arange(q)
    if f == 1:
        add = (codes[:, None] + codes[None, :]) % p
        mul = (codes[:, None] * codes[None, :]) % p
        return add, mul, codes.copy()

    coeffs = digit_matrix(codes, p, f)
    add_coeffs = (coeffs[:, None, :] + coeffs[None, :, :]) % p
    add = (add_coeffs * p ** np.arange(f)).sum(axis=2)

    product = np.zeros((q, q, 2 * f - 1), dtype=np.int64)
    for i in range(f):
        for j in range(f):
            product[:, :, i + j] += coeffs[:, None, i] * coeffs[None, :, j]

    for tail in range(p**f):
        modulus = to_digits(tail, p, f)
        reduced = product.copy()
        for k in range(2 * f - 2, f - 1, -1):
            lead = reduced[:, :, k] % p
            for j, c in enumerate(modulus):
                reduced[:, :, k - f + j] -= lead * c
            reduced[:, :, k] = 0
        mul = ((reduced[:, :, :f] % p) * p ** np.arange(f)).sum(axis=2)
        if not (mul[1:, 1:] == 0).any():
            logger.debug(f"F_{q} realized modulo x^{f} + {modulus} (low-to-high)")
            break
    else:
        raise AssertionError(f"no irreducible polynomial of degree {f} over F_{p}")

    # Tr(a) = a + a^p + ... + a^(p^(f-1))
    frobenius = codes.copy()
    for _ in range(p - 1):
        frobenius = mul[frobenius, codes]
    trace = np.zeros(q, dtype=np.int64)
    power = codes.copy()
    for _ in range(f):
        trace = add[trace, power]
        power = frobenius[power]
    assert (trace < p).all(), "trace must land in the prime field"
    return add, mul, trace


def _base_tables(family: Family, p: int, f: int, ell: int):
    q = p**f
    n = q**ell
    codes = np.arange(n, dtype=np.int64)
    if family == Family.MIXED:
        add = (codes[:, None] + codes[None, :]) % n
        mul = (codes[:, None] * codes[None, :]) % n
        psi = codes.copy()
        return add.astype(np.int32), mul.astype(np.int32), psi

    add_f, mul_f, trace = _residue_field(p, f)
    digits = digit_matrix(codes, q, ell)
    add = np.zeros((n, n), dtype=np.int64)
    mul = np.zeros((n, n), dtype=np.int64)
    for k in range(ell):
        add += add_f[digits[:, None, k], digits[None, :, k]] * q**k
        acc = np.zeros((n, n), dtype=np.int64)
        for i in range(k + 1):
            acc = add_f[acc, mul_f[digits[:, None, i], digits[None, :, k - i]]]
        mul += acc * q**k
    # psi'(x) = zeta_p ** Tr(top digit), written as an exponent of zeta_{p^ell}
    psi = trace[digits[:, ell - 1]] * p ** (ell - 1)
    return add.astype(np.int32), mul.astype(np.int32), psi


class Ring:
    """o_l or O_l with full lookup tables; elements are plain integer codes."""

    def __init__(self, family: Family, p: int, f: int, ell: int, extended: bool):
        self.family = family
        self.p = p
        self.f = f
        self.ell = ell
        self.extended = extended
        self.q = p**f
        self.base_size = self.q**ell
        self.size = self.base_size**2 if extended else self.base_size
        self.psi_order = p**ell

        if extended:
            base = make_ring(family, p, f, ell, False)
            self.base = base
            self._build_extension(base)
        else:
            self.base = self
            self.add, self.mul, self.psi = _base_tables(family, p, f, ell)
            self.one = 1
            self.epsilon_sq = None

        self.zero = 0
        self.neg = np.argmax(self.add == self.zero, axis=1)
        is_one = self.mul == self.one
        self.inv = np.where(is_one.any(axis=1), np.argmax(is_one, axis=1), -1)
        self.units = np.flatnonzero(self.inv >= 0)

        if not extended:
            digits = digit_matrix(np.arange(self.size), self.q, ell)
            nonzero = digits != 0
            self.val = np.where(nonzero.any(axis=1), np.argmax(nonzero, axis=1), ell)
            self.epsilon_sq = self._least_nonsquare_unit()

        residue = self.project_codes(np.arange(self.size), 1)
        unit_squares = self.mul[self.units, self.units]
        residue_squares = np.unique(self.project_codes(unit_squares, 1))
        self.square_mask = (self.inv >= 0) & np.isin(residue, residue_squares)

        self.descriptor = RingDescriptor(
            family, p, f, ell, extended, int(self.base.epsilon_sq)
        )
        logger.debug(f"Built tables for {self.name} ({self.size} elements)")

    def _build_extension(self, base: "Ring"):
        nb = base.size
        codes = np.arange(nb * nb, dtype=np.int64)
        x, y = codes // nb, codes % nb
        x1, x2 = x[:, None], x[None, :]
        y1, y2 = y[:, None], y[None, :]
        add_b, mul_b = base.add, base.mul
        eps_sq = int(base.epsilon_sq)

        self.add = (add_b[x1, x2].astype(np.int64) * nb + add_b[y1, y2]).astype(
            np.int32
        )
        real = add_b[mul_b[x1, x2], mul_b[eps_sq, mul_b[y1, y2]]]
        imag = add_b[mul_b[x1, y2], mul_b[y1, x2]]
        self.mul = (real.astype(np.int64) * nb + imag).astype(np.int32)
        del real, imag

        self.one = nb
        self.epsilon = 1
        self.epsilon_sq = eps_sq
        self.val = np.minimum(base.val[x], base.val[y])
        self.conj = x * nb + base.neg[y]
        product = self.mul[codes, self.conj]
        assert (product % nb == 0).all(), "norm must land in the base ring"
        self.norm = product // nb
        self.psi = (base.psi[x] + base.psi[y]) % self.psi_order

    def _least_nonsquare_unit(self) -> int:
        squares = np.unique(self.mul[self.units, self.units])
        nonsquares = np.setdiff1d(self.units, squares)
        return int(nonsquares[0])

    @property
    def name(self) -> str:
        if self.family == Family.MIXED:
            base = f"Z/{self.p ** self.ell}"
        else:
            base = f"F_{self.q}[t]/(t^{self.ell})"
        return f"{base}[eps]" if self.extended else base

    def __repr__(self):
        return f"<Ring {self.name}>"

    def at_level(self, ell: int) -> "Ring":
        return make_ring(self.family, self.p, self.f, ell, self.extended)

    @property
    def extension(self) -> "Ring":
        return make_ring(self.family, self.p, self.f, self.ell, True)

    def __call__(self, value: Union[int, "RElem"]) -> "RElem":
        if isinstance(value, RElem):
            if value.ring is not self:
                raise ValueError(f"{value!r} does not live in {self.name}")
            return value
        return RElem(self, self.from_int(value))

    def from_int(self, k: int) -> int:
        """code of k * 1"""
        if self.family == Family.MIXED:
            code = k % self.base_size
        else:
            code = k % self.p
        return self.embed(code) if self.extended else code

    def embed(self, base_code):
        """base ring code(s) -> extension code(s)"""
        assert self.extended
        return base_code * self.base_size

    def components(self, codes):
        """(x, y) base codes of z = x + y*eps"""
        assert self.extended
        return np.divmod(codes, self.base_size)

    def is_unit(self, codes) -> np.ndarray:
        return self.inv[codes] >= 0

    def residue_codes(self) -> np.ndarray:
        """canonical representatives whose digits beyond the first vanish"""
        if not self.extended:
            return np.arange(self.q)
        x, y = np.meshgrid(np.arange(self.q), np.arange(self.q), indexing="ij")
        return (x * self.base_size + y).ravel()

    def project_codes(self, codes, i: int):
        """reduction rho_{l,i} of codes to level i"""
        if not 1 <= i <= self.ell:
            raise ValueError(f"cannot project {self.name} to level {i}")
        m = self.q**i
        if not self.extended:
            return np.asarray(codes) % m
        x, y = self.components(np.asarray(codes))
        return (x % m) * m + y % m

    def lift_codes(self, codes, ell: int):
        """zero-extension (Serre) lift of codes at this level to level `ell`"""
        if ell < self.ell:
            raise ValueError(f"cannot lift {self.name} to lower level {ell}")
        if not self.extended:
            return np.asarray(codes)
        x, y = self.components(np.asarray(codes))
        return x * self.q**ell + y

    def shift_up(self, codes, i: int):
        """pi**i * x, same ring"""
        keep = self.q ** (self.ell - i)
        shift = self.q**i
        if i >= self.ell:
            return np.zeros_like(np.asarray(codes))
        if not self.extended:
            return (np.asarray(codes) % keep) * shift
        x, y = self.components(np.asarray(codes))
        return ((x % keep) * shift) * self.base_size + (y % keep) * shift

    def shift_down(self, codes, i: int):
        """x / pi**i as codes of the level l-i ring; needs valuation(x) >= i"""
        if not 0 <= i < self.ell:
            raise ValueError(f"cannot divide by pi^{i} in {self.name}")
        codes = np.asarray(codes)
        assert (self.val[codes] >= i).all(), "division by pi^i needs valuation >= i"
        shift = self.q**i
        if not self.extended:
            return codes // shift
        x, y = self.components(codes)
        return (x // shift) * self.q ** (self.ell - i) + y // shift

    def sqrt_code(self, code: int) -> Optional[int]:
        """square root by residue search plus Newton iteration, None if there is none"""
        if not self.square_mask[code]:
            return None
        target = self.project_codes(code, 1)
        reps = self.residue_codes()
        candidates = reps[
            self.is_unit(reps) & (self.project_codes(self.mul[reps, reps], 1) == target)
        ]
        root = int(candidates[0])
        two = self.from_int(2)
        for _ in range(self.ell + 1):
            error = int(self.add[self.mul[root, root], self.neg[code]])
            if error == self.zero:
                return root
            step = self.mul[error, self.inv[self.mul[two, root]]]
            root = int(self.add[root, self.neg[step]])
        raise AssertionError(f"Newton iteration did not converge for {code}")

    def norm_one_kernel(self) -> np.ndarray:
        if not self.extended:
            raise ValueError(f"{self.name} has no Galois conjugation")
        return np.flatnonzero(self.norm == 1)

    def norm_fibre_sizes(self) -> np.ndarray:
        """number of units of O_l over each unit of o_l under the norm"""
        if not self.extended:
            raise ValueError(f"{self.name} has no Galois conjugation")
        counts = np.bincount(self.norm[self.units], minlength=self.base_size)
        return counts[self.base.units]


def table_entries(p: int, f: int, ell: int, extended: bool = False) -> int:
    """
    Entries of one (size x size) arithmetic table.

    >>> table_entries(3, 1, 2), table_entries(3, 1, 2, extended=True)
    (81, 6561)
    """
    size = (p**f) ** (ell * (2 if extended else 1))
    return size * size


def make_ring(
    family: Union[Family, str],
    p: int,
    f: int,
    ell: int,
    extended: bool = False,
    budget: Optional[int] = None,
) -> Ring:
    """
    Shared, immutable ring for the given parameters.  Repeated calls return
    the same object, so rings can be compared by identity.

    With a budget, rings whose tables hold more entries than the budget are
    refused with BudgetExceeded before anything is built.
    """
    if budget is not None and int(ell) >= 1:
        required = table_entries(int(p), int(f), int(ell), bool(extended))
        if required > budget:
            kind = "extension" if extended else "ring"
            what = f"the tables of the {Family(family).value} {kind} with q = {p**f}, l = {ell}"
            raise BudgetExceeded(what, required, budget)
    return _make_ring(Family(family).value, int(p), int(f), int(ell), bool(extended))


@lru_cache(maxsize=None)
def _make_ring(family: str, p: int, f: int, ell: int, extended: bool) -> Ring:
    family = Family(family)
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if f < 1:
        raise ValueError(f"f must be positive, got {f}")
    if family == Family.MIXED and f != 1:
        raise ValueError(f"mixed characteristic needs f = 1, got f = {f}")
    if ell < 1:
        raise ValueError(f"truncation level must be at least 1, got {ell}")
    return Ring(family, p, f, ell, extended)


class RElem:
    __slots__ = ("ring", "code")

    def __init__(self, ring: Ring, code: int):
        self.ring = ring
        self.code = int(code)

    def _other(self, other) -> int:
        if isinstance(other, RElem):
            if other.ring is not self.ring:
                raise ValueError(
                    f"operands live in different rings: {self.ring.name}, {other.ring.name}"
                )
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.ring.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        code = self._other(other)
        if code is NotImplemented:
            return code
        return RElem(self.ring, self.ring.add[self.code, code])

    __radd__ = __add__

    def __neg__(self):
        return RElem(self.ring, self.ring.neg[self.code])

    def __sub__(self, other):
        code = self._other(other)
        if code is NotImplemented:
            return code
        return RElem(self.ring, self.ring.add[self.code, self.ring.neg[code]])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        code = self._other(other)
        if code is NotImplemented:
            return code
        return RElem(self.ring, self.ring.mul[self.code, code])

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, RElem):
            return self.ring is other.ring and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.ring.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.descriptor, self.code))

    def __repr__(self):
        return f"RElem({self.code} in {self.ring.name})"

    def is_unit(self) -> bool:
        return bool(self.ring.inv[self.code] >= 0)

    def inv(self) -> "RElem":
        code = int(self.ring.inv[self.code])
        if code < 0:
            raise NotInvertibleError(f"{self!r} is not a unit")
        return RElem(self.ring, code)

    def valuation(self) -> int:
        return int(self.ring.val[self.code])

    def project(self, i: int) -> "RElem":
        return RElem(self.ring.at_level(i), self.ring.project_codes(self.code, i))

    def serre_lift(self, ell: int) -> "RElem":
        return RElem(self.ring.at_level(ell), self.ring.lift_codes(self.code, ell))

    def conj(self) -> "RElem":
        if not self.ring.extended:
            raise ValueError(f"{self.ring.name} has no Galois conjugation")
        return RElem(self.ring, self.ring.conj[self.code])

    def norm(self) -> "RElem":
        """z * conj(z), as an element of the base ring"""
        if not self.ring.extended:
            raise ValueError(f"{self.ring.name} has no Galois conjugation")
        return RElem(self.ring.base, self.ring.norm[self.code])

    def is_square(self) -> bool:
        return bool(self.ring.square_mask[self.code])

    def sqrt(self) -> Optional["RElem"]:
        code = self.ring.sqrt_code(self.code)
        return None if code is None else RElem(self.ring, code)

    def digits(self) -> Tuple[int, ...]:
        """pi-adic digits; for x + y*eps the digits of x followed by those of y"""
        ring = self.ring
        if not ring.extended:
            return to_digits(self.code, ring.q, ring.ell)
        x, y = divmod(self.code, ring.base_size)
        return to_digits(x, ring.q, ring.ell) + to_digits(y, ring.q, ring.ell)


class ArithOp(IntEnum):
    ADD: int = auto()
    NEG: int = auto()
    MUL: int = auto()
    INV: int = auto()
    VALUATION: int = auto()
    PROJECT: int = auto()
    SERRE_LIFT: int = auto()


class GaloisOp(IntEnum):
    CONJ: int = auto()
    NORM: int = auto()
    NORM_ONE_KERNEL: int = auto()
    IS_SQUARE: int = auto()
    SQRT: int = auto()


def ring_arith(op: ArithOp, a: RElem, b: Union[RElem, int, None] = None):
    if op == ArithOp.ADD:
        return a + b
    if op == ArithOp.NEG:
        return -a
    if op == ArithOp.MUL:
        return a * b
    if op == ArithOp.INV:
        return a.inv()
    if op == ArithOp.VALUATION:
        return a.valuation()
    if op == ArithOp.PROJECT:
        return a.project(b)
    if op == ArithOp.SERRE_LIFT:
        return a.serre_lift(b)
    raise ValueError(f"unknown arithmetic operation supplied. Got {op}")


def galois_tools(op: GaloisOp, z: RElem):
    if op == GaloisOp.CONJ:
        return z.conj()
    if op == GaloisOp.NORM:
        return z.norm()
    if op == GaloisOp.NORM_ONE_KERNEL:
        return [RElem(z.ring, c) for c in z.ring.norm_one_kernel()]
    if op == GaloisOp.IS_SQUARE:
        return z.is_square()
    if op == GaloisOp.SQRT:
        return z.sqrt()
    raise ValueError(f"unknown Galois operation supplied. Got {op}")
