import logging

import numpy as np
import pytest

from gl2reality.cmdutil import (
    CLAIMS,
    STATEMENTS,
    ClaimLog,
    Command,
    OutputFormat,
    RunConfig,
    command_from_name,
    to_plain,
)
from gl2reality.matgroups import Kind
from gl2reality.rings import Family
from gl2reality.util import Falsification


@pytest.fixture
def minimal_config():
    return RunConfig(kind=Kind.GU2, p=3, ell=2)


@pytest.mark.parametrize("command", list(Command))
def test_command_names_round_trip(command):
    assert command_from_name(command.cli_name) == command


def test_unknown_command():
    with pytest.raises(ValueError, match="unknown command supplied"):
        command_from_name("publish")


def test_verify_all_name():
    assert Command.VERIFY_ALL.cli_name == "verify-all"


def test_config_as_dict(minimal_config):
    d = minimal_config.as_dict()
    assert d["kind"] == "gu2"
    assert d["family"] == "mixed"
    assert d["command"] == "census"
    assert d["output_format"] == "json"
    assert minimal_config.q == 3


def test_cache_key_ignores_output_settings(minimal_config):
    other = RunConfig(
        kind=Kind.GU2,
        p=3,
        ell=2,
        command=Command.CHARTAB,
        output_format=OutputFormat.CSV,
        output="somewhere.csv",
        timing=True,
    )
    assert other.cache_key() == minimal_config.cache_key()


@pytest.mark.parametrize(
    "change",
    [{"kind": Kind.GL2}, {"p": 5}, {"ell": 1}, {"seed": 1}, {"family": Family.EQUAL}],
)
def test_cache_key_tracks_group(minimal_config, change):
    args = {"kind": Kind.GU2, "p": 3, "ell": 2, **change}
    assert RunConfig(**args).cache_key() != minimal_config.cache_key()


def test_every_claim_has_a_statement():
    for ids in CLAIMS.values():
        for claim_id in ids:
            assert STATEMENTS[claim_id]


def test_claim_log(caplog):
    log = ClaimLog(prefix="gl2-q3-l1/")
    with caplog.at_level(logging.INFO):
        assert log.check("group-order", 48, np.int64(48))
        assert not log.check("real-class-count", 6, 7)
    assert not log.passed
    assert [c.id for c in log.failures()] == ["real-class-count"]
    assert "FAIL gl2-q3-l1/real-class-count: expected 6, computed 7" in caplog.text
    d = log.claims[0].as_dict()
    assert d == {
        "id": "group-order",
        "statement": STATEMENTS["group-order"],
        "expected": 48,
        "computed": 48,
        "paperRef": "group-order",
        "pass": True,
    }
    assert type(d["computed"]) is int


def test_reference_survives_prefixed_id():
    log = ClaimLog()
    log.check("fs-aggregate", 14, 14)
    claim = log.claims[0]
    claim.id = f"gu2-q3-l2/{claim.id}"
    d = claim.as_dict()
    assert (d["id"], d["paperRef"]) == ("gu2-q3-l2/fs-aggregate", "fs-aggregate")


def test_guard_records_falsification(caplog):
    log = ClaimLog()
    with caplog.at_level(logging.ERROR):
        with log.guard("indicators"):
            raise Falsification("fs-aggregate", 14, 12, "bad indicators")
    assert [(c.id, c.expected, c.computed) for c in log.claims] == [("fs-aggregate", 14, 12)]
    assert "indicators: bad indicators" in caplog.text


def test_guard_lets_other_errors_through():
    log = ClaimLog()
    with pytest.raises(KeyError):
        with log.guard("section"):
            raise KeyError("boom")
    assert log.claims == []


def test_to_plain():
    value = {
        Kind.GL2: (np.int64(3), {2, 1}),
        "mask": np.array([True, False]),
        "nested": [np.float64(0.5)],
    }
    assert to_plain(value) == {"gl2": [3, [1, 2]], "mask": [True, False], "nested": [0.5]}
