import contextlib
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum, IntEnum, auto
from typing import Any, Dict, List, Optional

import numpy as np

from .matgroups import DEFAULT_BUDGET, DEFAULT_SEED, Kind
from .rings import Family
from .util import Falsification

logger = logging.getLogger(__name__)


class Command(IntEnum):
    CENSUS: int = auto()
    INVOLUTIONS: int = auto()
    CHARTAB: int = auto()
    CLASSIFY: int = auto()
    VERIFY_ALL: int = auto()
    FORMULA: int = auto()
    REALFORMS: int = auto()

    @property
    def cli_name(self) -> str:
        return self.name.lower().replace("_", "-")


def command_from_name(name: str) -> Command:
    for command in Command:
        if command.cli_name == name:
            return command
    raise ValueError(f"unknown command supplied. Got {name}")


COMMAND_NAMES = [c.cli_name for c in Command]


class OutputFormat(IntEnum):
    JSON: int = auto()
    CSV: int = auto()


@dataclass(frozen=True)
class RunConfig:
    kind: Kind
    p: int
    f: int = 1
    ell: int = 1
    family: Family = Family.MIXED
    command: Command = Command.CENSUS
    output_format: OutputFormat = OutputFormat.JSON
    cache_dir: Optional[str] = None
    budget: int = DEFAULT_BUDGET
    seed: int = DEFAULT_SEED
    output: Optional[str] = None
    use_cache: bool = True
    timing: bool = False
    acceptance: bool = False

    @property
    def q(self) -> int:
        return self.p**self.f

    def as_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["family"] = self.family.value
        d["command"] = self.command.cli_name
        d["output_format"] = self.output_format.name.lower()
        return d

    def cache_key(self) -> str:
        """hash of everything that determines the enumerated group"""
        relevant = {
            k: v
            for k, v in self.as_dict().items()
            if k in ("kind", "p", "f", "ell", "family", "seed")
        }
        return hashlib.sha256(json.dumps(relevant, sort_keys=True).encode()).hexdigest()[:16]


STATEMENTS: Dict[str, str] = {
    "group-order": "|G| = q^(4l-3)(q-1)(q^2-1) for GL2 and q^(4l-3)(q-1)(q+1)^2 for GU2",
    "involution-count": "(q - d) q^(2l-1) + 2 solutions of g^2 = 1, d = -1 for GL2, +1 for GU2",
    "involution-classes": "the involutions are I, -I and one class of size (q - d) q^(2l-1)",
    "class-count": "GL2 canonical forms are in bijection with conjugacy classes",
    "real-class-count": "1 + q^l + 2(1 + q + ... + q^(l-1)) real classes",
    "strongly-real-count": "GL2: all real classes strongly real; GU2: q^l + 1 strongly real classes",
    "real-regular-count": "q^l + 1 real regular classes",
    "real-nonregular-count": "2(1 + q + ... + q^(l-1)) real non-regular classes",
    "real-class-rows": "real classes per canonical family (GL2) or representative row (GU2)",
    "real-class-table-exhaustive": "every real class falls in a row of the real class table",
    "real-form-count": "the symbolic list of real canonical forms has one entry per real class",
    "real-criterion": "g is real iff det(g) = +-1 and tr(g) = tr(g^-1)",
    "strongly-real-criterion": "strongly real iff real, and for GU2 not of type D",
    "strongly-real-products": "the strongly real elements are the products of two involutions",
    "gl2-real-is-strongly-real": "every real element of GL2 is strongly real",
    "gu2-real-not-strongly-real": "the real GU2 classes that are not strongly real are the type D rows",
    "real-form-witness": "every real canonical form is inverted by an explicit involution",
    "canonical-form-idempotent": "the canonical form of M(d,i,alpha,beta) is itself",
    "canonical-form-invariant": "the canonical form is constant on conjugacy classes",
    "canonical-form-separates": "distinct conjugacy classes have distinct canonical forms",
    "gu2-class-exhaustive": "every GU2 element is conjugate to a representative of type A-D",
    "norm-one-kernel": "the norm-one units of O_l number q^l + q^(l-1)",
    "character-count": "one irreducible character per conjugacy class",
    "character-row-orthogonality": "distinct irreducible characters are orthogonal",
    "character-column-orthogonality": "columns of the table are orthogonal with norms |C_G(g)|",
    "character-degree-squares": "the squared degrees add up to the group order",
    "fs-aggregate": "sum of indicator * degree over all characters equals the involution count",
    "fs-indicator-range": "every Frobenius-Schur indicator is 1, 0 or -1",
    "fs-real-valued": "the indicator vanishes exactly on the characters that are not real valued",
    "restriction-decomposition": "the restriction to K^i decomposes into characters psi_A of total degree chi(1)",
    "restriction-single-orbit": "the characters psi_A in a restriction form a single adjoint orbit",
    "real-character-count": "as many real-valued characters as real classes",
    "orthogonal-symplectic-degrees": "degree sums (q^2l + 1, q^(2l-1) - 1) for GU2, (involutions, 0) for GL2",
    "regular-degrees": "GL2 regular degrees (q+1)q^(l-1), (q^2-1)q^(l-2), (q-1)q^(l-1) for ss, sns, cus",
    "regular-symplectic": "non-regular symplectic degrees of GU2 add up to q^(2l-3) - 1",
    "symplectic-growth": "orthogonal plus symplectic degree sums equal (q+1) q^(2l-1) for GU2",
    "centralizer-order": "regular centralizers of order (q-1)(q+d)q^(2m-2), (q+d)q^(2m-1), (q+1)(q+d)q^(2m-2)",
    "za-index": "Z_A is all of the centre for ss and cus, of index two for sns",
    "tangible-counts": "tangible characters: q^(l-2)(q-1)^2/2 ss, 2q^(l-1) sns, q^(l-2)(q^2-1)/2 cus",
    "nonregular-self-dual": "1 + q^(l-1) + 2(1 + ... + q^(l-2)) self-dual non-regular characters",
    "nonregular-real-pullback": "the real non-regular characters are the real characters trivial on K^(l-1)",
    "tangible-self-dual": "a regular character is self-dual iff it is tangible",
    "formula-regression": "closed forms agree with each other on the regression grid",
}


@dataclass
class Claim:
    id: str
    statement: str
    expected: Any
    computed: Any
    # statement identifier; `id` may carry a prefix, this never does
    ref: str = ""

    @property
    def passed(self) -> bool:
        return self.expected == self.computed

    def as_dict(self) -> dict:
        d = asdict(self)
        d["paperRef"] = d.pop("ref") or self.id
        d["pass"] = self.passed
        return d


@dataclass
class ClaimLog:
    """Collects checked statements; failures are logged at ERROR."""

    prefix: str = ""
    claims: List[Claim] = field(default_factory=list)

    def check(self, claim_id: str, expected, computed) -> bool:
        claim = Claim(
            claim_id,
            STATEMENTS.get(claim_id, ""),
            to_plain(expected),
            to_plain(computed),
            ref=claim_id,
        )
        self.claims.append(claim)
        line = f"{self.prefix}{claim_id}: expected {claim.expected}, computed {claim.computed}"
        if claim.passed:
            logger.info(f"PASS {line}")
        else:
            logger.error(f"FAIL {line}")
        return claim.passed

    @contextlib.contextmanager
    def guard(self, section: str):
        """record a raised Falsification as a failed claim and leave the section"""
        try:
            yield
        except Falsification as e:
            if e.detail:
                logger.error(f"{self.prefix}{section}: {e.detail}")
            self.check(e.claim, e.expected, e.computed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def failures(self) -> List[Claim]:
        return [c for c in self.claims if not c.passed]


def to_plain(value):
    """JSON-friendly copy of numpy scalars, tuples, sets and dicts"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(to_plain(k)): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, np.ndarray)):
        items = sorted(value) if isinstance(value, set) else value
        return [to_plain(v) for v in items]
    if isinstance(value, np.generic):
        return value.item()
    return value


CLAIMS: Dict[Command, List[str]] = {
    Command.INVOLUTIONS: ["involution-count", "involution-classes"],
    Command.CENSUS: [
        "class-count",
        "real-class-count",
        "strongly-real-count",
        "real-regular-count",
        "real-nonregular-count",
        "real-class-rows",
        "real-form-count",
        "gu2-real-not-strongly-real",
    ],
    Command.CLASSIFY: [
        "canonical-form-idempotent",
        "canonical-form-invariant",
        "canonical-form-separates",
        "gu2-class-exhaustive",
        "norm-one-kernel",
    ],
    Command.CHARTAB: [
        "character-count",
        "fs-aggregate",
        "real-character-count",
        "orthogonal-symplectic-degrees",
        "regular-degrees",
        "regular-symplectic",
        "symplectic-growth",
        "tangible-counts",
        "nonregular-self-dual",
    ],
    Command.REALFORMS: ["real-form-witness"],
    Command.FORMULA: ["formula-regression"],
}
CLAIMS[Command.VERIFY_ALL] = (
    ["group-order"]
    + CLAIMS[Command.INVOLUTIONS]
    + CLAIMS[Command.CENSUS]
    + [
        "real-criterion",
        "strongly-real-criterion",
        "strongly-real-products",
        "gl2-real-is-strongly-real",
    ]
    + CLAIMS[Command.REALFORMS]
    + CLAIMS[Command.CLASSIFY]
    + ["centralizer-order", "za-index"]
    + CLAIMS[Command.CHARTAB]
    + CLAIMS[Command.FORMULA]
)
