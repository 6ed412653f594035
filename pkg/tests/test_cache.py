import dataclasses
import logging

import numpy as np
import pytest

from gl2reality.cache import (
    cache_path,
    cached_chartab,
    cached_group,
    cached_gu2_reps,
    load,
    load_chartab,
    load_gu2_reps,
    save_chartab,
    save_gu2_reps,
    store,
)
from gl2reality.chartab import class_structure
from gl2reality.classify import GU2Classifier
from gl2reality.matgroups import Kind, enumerate_group
from gl2reality.rings import make_ring
from gl2reality.util import BudgetExceeded


@pytest.fixture
def base():
    return make_ring("mixed", 3, 1, 1)


@pytest.mark.parametrize("kind", [Kind.GL2, Kind.GU2])
def test_store_and_load(tmp_path, base, kind):
    handle = enumerate_group(base, kind)
    path = cache_path(tmp_path, "abc")
    store(path, handle)
    assert path.exists()
    assert not path.with_name(path.name + ".tmp").exists()
    loaded = load(path, base, kind)
    assert loaded is not None
    assert (loaded.codes == handle.codes).all()
    assert loaded.identity == handle.identity


def test_missing_file(tmp_path, base):
    assert load(tmp_path / "nothing.npz", base, Kind.GL2) is None


def test_corrupt_file_is_rebuilt(tmp_path, base, caplog):
    path = cache_path(tmp_path, "key")
    path.write_bytes(b"not an npz file")
    with caplog.at_level(logging.WARNING):
        handle = cached_group(base, Kind.GL2, tmp_path, "key")
    assert "Unreadable cache file" in caplog.text
    assert handle.order == 48
    assert load(path, base, Kind.GL2) is not None


def test_header_mismatch(tmp_path, base, caplog):
    path = cache_path(tmp_path, "key")
    store(path, enumerate_group(base, Kind.GL2))
    with caplog.at_level(logging.WARNING):
        assert load(path, base, Kind.GL2, seed=1) is None
    assert "seed" in caplog.text


def test_wrong_size(tmp_path, base, caplog):
    path = cache_path(tmp_path, "key")
    store(path, enumerate_group(base, Kind.GL2))
    with caplog.at_level(logging.WARNING):
        assert load(path, base, Kind.GU2) is None
    assert "expected 96" in caplog.text


def test_cache_hit_skips_enumeration(tmp_path, base, mocker):
    cached_group(base, Kind.GL2, tmp_path, "key")
    enumerate_spy = mocker.patch("gl2reality.cache.enumerate_group")
    handle = cached_group(base, Kind.GL2, tmp_path, "key")
    enumerate_spy.assert_not_called()
    assert handle.order == 48


def test_no_cache_dir(base, mocker):
    store_spy = mocker.patch("gl2reality.cache.store")
    assert cached_group(base, Kind.GL2, None, "key").order == 48
    store_spy.assert_not_called()


def test_budget_checked_before_enumeration(tmp_path, base, mocker):
    enumerate_spy = mocker.patch("gl2reality.cache.enumerate_group")
    with pytest.raises(BudgetExceeded):
        cached_group(base, Kind.GU2, tmp_path, "key", budget=50)
    enumerate_spy.assert_not_called()


def test_unwritable_cache_dir(tmp_path, base, caplog):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with caplog.at_level(logging.WARNING):
        handle = cached_group(base, Kind.GL2, blocker, "key")
    assert handle.order == 48
    assert "Could not write cache file" in caplog.text


@pytest.mark.parametrize("kind", [Kind.GL2, Kind.GU2])
def test_chartab_is_cached(tmp_path, base, kind, mocker):
    classes = class_structure(enumerate_group(base, kind))
    table = cached_chartab(classes, tmp_path, "key")
    assert cache_path(tmp_path, "key", "chartab").exists()
    compute_spy = mocker.patch("gl2reality.cache.character_table")
    loaded = cached_chartab(classes, tmp_path, "key")
    compute_spy.assert_not_called()
    assert loaded.modulus == table.modulus
    assert np.array_equal(loaded.values, table.values)
    assert np.array_equal(loaded.degrees, table.degrees)


def test_chartab_for_other_seed_is_stale(tmp_path, base, caplog):
    classes = class_structure(enumerate_group(base, Kind.GL2))
    path = cache_path(tmp_path, "key", "chartab")
    save_chartab(path, cached_chartab(classes, None, "key"))
    reseeded = class_structure(enumerate_group(base, Kind.GL2, seed=1))
    with caplog.at_level(logging.WARNING):
        assert load_chartab(path, reseeded) is None
    assert "seed" in caplog.text


def test_chartab_with_broken_values_is_rebuilt(tmp_path, base, caplog):
    classes = class_structure(enumerate_group(base, Kind.GL2))
    table = cached_chartab(classes, None, "key")
    values = table.values.copy()
    values[[0, 1]] = values[[1, 1]]
    path = cache_path(tmp_path, "key", "chartab")
    save_chartab(path, dataclasses.replace(table, values=values))
    with caplog.at_level(logging.WARNING):
        assert load_chartab(path, classes) is None
    assert "no valid character table" in caplog.text
    rebuilt = cached_chartab(classes, tmp_path, "key")
    assert np.array_equal(rebuilt.values, table.values)


def test_gu2_reps_are_cached(tmp_path, base, caplog):
    handle = enumerate_group(base, Kind.GU2)
    first = cached_gu2_reps(handle, tmp_path, "key")
    assert cache_path(tmp_path, "key", "gu2reps").exists()
    with caplog.at_level(logging.INFO):
        loaded = cached_gu2_reps(handle, tmp_path, "key")
    assert f"Loaded {len(first.reps)} GU2 representatives" in caplog.text
    assert loaded.reps == first.reps
    assert loaded.tags == first.tags
    assert all(loaded.reps[c].matrix == first.reps[c].matrix for c in first.reps)
    g = handle.order - 1
    assert loaded.classify_index(g) == first.classify_index(g)


def test_gu2_reps_in_wrong_class_are_rebuilt(tmp_path, base, caplog):
    handle = enumerate_group(base, Kind.GU2)
    classifier = GU2Classifier(handle)
    a, b = sorted(classifier.reps)[:2]
    swapped = dict(classifier.reps)
    swapped[a], swapped[b] = classifier.reps[b], classifier.reps[a]
    path = cache_path(tmp_path, "key", "gu2reps")
    save_gu2_reps(path, GU2Classifier.from_reps(handle, swapped, classifier.tags))
    with caplog.at_level(logging.WARNING):
        assert load_gu2_reps(path, handle) is None
    assert "representative in the wrong class" in caplog.text


def test_gu2_reps_without_cache_dir(base, mocker):
    save_spy = mocker.patch("gl2reality.cache.save_gu2_reps")
    classifier = cached_gu2_reps(enumerate_group(base, Kind.GU2), None, "key")
    assert classifier.reps
    save_spy.assert_not_called()
