"""
On-disk cache of enumerated groups and the data computed from them.

Every entry is one ``.npz`` file with a JSON header describing the ring, the
group kind and checksums of the first and last group element, followed by
arrays whose meaning depends on the entry:

  group    packed element codes in canonical order
  chartab  modulus, class representatives, values mod m, degrees, indicators
  gu2reps  class labels, tags, parameters and matrices of the GU2 representatives

Anything that does not match is rebuilt.
"""
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Dict, Optional, Set, Tuple

import numpy as np

from .chartab import CharTable, ClassData, character_table, check_orthogonality
from .classify import GU2Classifier, GU2ClassRep
from .matgroups import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    GroupHandle,
    Kind,
    Mat2,
    enumerate_group,
    group_order,
    unpack,
)
from .rings import Ring
from .util import BudgetExceeded, Falsification

logger = logging.getLogger(__name__)

FORMAT_VERSION = 2

TAGS = "ABCD"


def _checksum(code: int) -> str:
    return hashlib.sha256(str(int(code)).encode()).hexdigest()


def _array_checksum(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values, dtype=np.int64).tobytes()).hexdigest()


def cache_header(
    base: Ring, kind: Kind, codes: np.ndarray, seed: int, content: str = "group"
) -> dict:
    return {
        "content": content,
        "descriptor": base.descriptor.header(),
        "kind": Kind(kind).value,
        "order": int(len(codes)),
        "format-version": FORMAT_VERSION,
        "first": _checksum(codes[0]),
        "last": _checksum(codes[-1]),
        "seed": seed,
    }


def cache_path(cache_dir: os.PathLike, key: str, content: str = "group") -> Path:
    return Path(cache_dir) / f"{content}-{key}.npz"


def _write(path: os.PathLike, header: dict, **arrays) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        np.savez(f, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    os.replace(tmp, path)
    return path


def _read(path: os.PathLike) -> Optional[Tuple[dict, Dict[str, np.ndarray]]]:
    path = Path(path)
    if not path.exists():
        return None
    try:
        with np.load(path) as data:
            arrays = {name: data[name] for name in data.files if name != "header"}
            header = json.loads(str(data["header"]))
    except Exception as e:
        logger.warning(f"Unreadable cache file {path} ({e}), rebuilding")
        return None
    return header, arrays


def _matches(path: os.PathLike, header: dict, expected: dict) -> bool:
    if header == expected:
        return True
    stale = sorted(k for k in expected if header.get(k) != expected[k])
    logger.warning(f"Cache file {path} does not match ({', '.join(stale)}), rebuilding")
    return False


# --- groups ------------------------------------------------------------------------


def store(path: os.PathLike, handle: GroupHandle) -> None:
    header = cache_header(handle.base, handle.kind, handle.codes, handle.seed)
    path = _write(path, header, codes=handle.codes)
    logger.info(f"Cached {handle!r} in {path}")


def load(path: os.PathLike, base: Ring, kind: Kind, seed: int = DEFAULT_SEED) -> Optional[GroupHandle]:
    """the cached group, or None if the file is missing, unreadable or stale"""
    entry = _read(path)
    if entry is None:
        return None
    header, arrays = entry
    codes = arrays.get("codes")
    if codes is None:
        logger.warning(f"Cache file {path} holds no group, rebuilding")
        return None

    expected_order = group_order(base.q, base.ell, kind)
    if len(codes) != expected_order:
        logger.warning(f"Cache file {path} holds {len(codes)} elements, expected {expected_order}; rebuilding")
        return None
    if not _matches(path, header, cache_header(base, kind, codes, seed)):
        return None

    ring = base.extension if Kind(kind) == Kind.GU2 else base
    handle = GroupHandle(base, kind, unpack(ring, codes), seed=seed)
    if not (handle.codes == codes).all():
        logger.warning(f"Cache file {path} is not in canonical order, rebuilding")
        return None
    logger.info(f"Loaded {handle!r} from {path}")
    return handle


def cached_group(
    base: Ring,
    kind: Kind,
    cache_dir: Optional[os.PathLike],
    key: str,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
) -> GroupHandle:
    """enumerate the group, going through the cache when a directory is given"""
    required = group_order(base.q, base.ell, kind)
    if required > budget:
        raise BudgetExceeded(f"{Kind(kind).value.upper()}({base.name})", required, budget)
    if cache_dir is None:
        return enumerate_group(base, kind, budget, seed=seed)
    path = cache_path(cache_dir, key)
    handle = load(path, base, kind, seed)
    if handle is not None:
        return handle
    handle = enumerate_group(base, kind, budget, seed=seed)
    try:
        store(path, handle)
    except OSError as e:
        logger.warning(f"Could not write cache file {path}: {e}")
    return handle


# --- character tables --------------------------------------------------------------


def _chartab_header(classes: ClassData) -> dict:
    handle = classes.handle
    header = cache_header(handle.base, handle.kind, handle.codes, handle.seed, "chartab")
    header["classes"] = classes.count
    header["class-reps"] = _array_checksum(classes.reps)
    return header


def save_chartab(path: os.PathLike, table: CharTable) -> None:
    indicators = table.indicators if table.indicators is not None else np.zeros(0, np.int64)
    path = _write(
        path,
        _chartab_header(table.classes),
        modulus=np.array(table.modulus),
        reps=table.classes.reps,
        values=table.values,
        degrees=table.degrees,
        indicators=indicators,
    )
    logger.info(f"Cached the character table of {table.classes.handle!r} in {path}")


def load_chartab(path: os.PathLike, classes: ClassData) -> Optional[CharTable]:
    """the cached table over the given classes, or None if missing or stale"""
    entry = _read(path)
    if entry is None:
        return None
    header, arrays = entry
    if not _matches(path, header, _chartab_header(classes)):
        return None
    n = classes.count
    try:
        values, degrees = arrays["values"], arrays["degrees"]
        if values.shape != (n, n) or degrees.shape != (n,):
            raise ValueError(f"table of shape {values.shape} for {n} classes")
        if not np.array_equal(arrays["reps"], classes.reps):
            raise ValueError("class order differs")
        table = CharTable(
            classes, int(arrays["modulus"]), values.astype(np.int64), degrees.astype(np.int64)
        )
        check_orthogonality(table)
    except (KeyError, ValueError, Falsification) as e:
        logger.warning(f"Cache file {path} holds no valid character table ({e}), rebuilding")
        return None
    indicators = arrays.get("indicators")
    if indicators is not None and len(indicators) == n:
        table.indicators = indicators.astype(np.int64)
    logger.info(f"Loaded the character table of {classes.handle!r} from {path}")
    return table


def cached_chartab(
    classes: ClassData,
    cache_dir: Optional[os.PathLike],
    key: str,
    seed: int = DEFAULT_SEED,
) -> CharTable:
    if cache_dir is None:
        return character_table(classes, seed)
    path = cache_path(cache_dir, key, "chartab")
    table = load_chartab(path, classes)
    if table is not None:
        return table
    table = character_table(classes, seed)
    try:
        save_chartab(path, table)
    except OSError as e:
        logger.warning(f"Could not write cache file {path}: {e}")
    return table


# --- GU2 representative lists --------------------------------------------------------


def _gu2_reps_header(handle: GroupHandle) -> dict:
    return cache_header(handle.base, handle.kind, handle.codes, handle.seed, "gu2reps")


def save_gu2_reps(path: os.PathLike, classifier: GU2Classifier) -> None:
    labels = sorted(classifier.reps)
    reps = [classifier.reps[label] for label in labels]
    params = np.full((len(reps), 4), -1, dtype=np.int64)
    for row, rep in enumerate(reps):
        params[row, : len(rep.params)] = rep.params
    seen = [sum(1 << TAGS.index(t) for t in classifier.tags[label]) for label in labels]
    path = _write(
        path,
        _gu2_reps_header(classifier.handle),
        labels=np.array(labels, dtype=np.int64),
        tags=np.array([TAGS.index(rep.tag) for rep in reps], dtype=np.int64),
        params=params,
        matrices=np.array([rep.matrix.entries for rep in reps], dtype=np.int64),
        seen=np.array(seen, dtype=np.int64),
    )
    logger.info(f"Cached {len(reps)} GU2 representatives in {path}")


def load_gu2_reps(path: os.PathLike, handle: GroupHandle) -> Optional[GU2Classifier]:
    """the cached classifier, or None if missing, stale or not one rep per class"""
    entry = _read(path)
    if entry is None:
        return None
    header, arrays = entry
    if not _matches(path, header, _gu2_reps_header(handle)):
        return None
    try:
        labels, matrices = arrays["labels"], arrays["matrices"]
        class_labels = handle.conjugacy_labels()
        if not handle.contains(matrices).all():
            raise ValueError("representative outside the group")
        if not np.array_equal(class_labels[handle.index_of(matrices)], labels):
            raise ValueError("representative in the wrong class")
        if len(labels) != len(np.unique(class_labels)):
            raise ValueError(f"{len(labels)} representatives")
        reps: Dict[int, GU2ClassRep] = {}
        tags: Dict[int, Set[str]] = {}
        for label, tag, params, codes, seen in zip(
            labels.tolist(),
            arrays["tags"].tolist(),
            arrays["params"].tolist(),
            matrices.tolist(),
            arrays["seen"].tolist(),
        ):
            reps[label] = GU2ClassRep(
                TAGS[tag], tuple(p for p in params if p >= 0), Mat2.from_codes(handle.ring, codes)
            )
            tags[label] = {t for k, t in enumerate(TAGS) if seen >> k & 1}
    except (KeyError, ValueError, IndexError) as e:
        logger.warning(f"Cache file {path} holds no valid representative list ({e}), rebuilding")
        return None
    logger.info(f"Loaded {len(reps)} GU2 representatives from {path}")
    return GU2Classifier.from_reps(handle, reps, tags)


def cached_gu2_reps(handle: GroupHandle, cache_dir: Optional[os.PathLike], key: str) -> GU2Classifier:
    if cache_dir is None:
        return GU2Classifier(handle)
    path = cache_path(cache_dir, key, "gu2reps")
    classifier = load_gu2_reps(path, handle)
    if classifier is not None:
        return classifier
    classifier = GU2Classifier(handle)
    try:
        save_gu2_reps(path, classifier)
    except OSError as e:
        logger.warning(f"Could not write cache file {path}: {e}")
    return classifier
