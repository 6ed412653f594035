import csv
import json
import logging
from textwrap import dedent

import pytest

from gl2reality.cmdutil import ClaimLog, Command, OutputFormat, RunConfig
from gl2reality.core import (
    Session,
    default_output,
    load_config_file,
    main,
    parse_cmdline_args,
    parse_run_config,
    run_centralizers,
    run_realforms,
)
from gl2reality.matgroups import Kind
from gl2reality.rings import Family


def config_from(mocker, *argv):
    mocker.patch("sys.argv", ["gl2reality", *argv])
    return parse_run_config(parse_cmdline_args())


def run_main(mocker, *argv):
    mocker.patch("sys.argv", ["gl2reality", *argv])
    with pytest.raises(SystemExit) as e:
        main()
    return e.value.code


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        dedent(
            """\
            run-config:
              kind: gu2
              p: 5
              command: chartab
              seed: 7
            """
        )
    )
    return path


def test_defaults(mocker, tmp_path):
    config = config_from(mocker, "--kind", "gl2", "--p", "3", "--cache-dir", str(tmp_path))
    assert config.kind == Kind.GL2
    assert (config.f, config.ell, config.family) == (1, 1, Family.MIXED)
    assert config.command == Command.CENSUS
    assert config.output_format == OutputFormat.JSON
    assert config.cache_dir == str(tmp_path)
    assert config.use_cache and not config.timing


def test_equal_characteristic_default(mocker):
    config = config_from(mocker, "--kind", "gl2", "--p", "3", "--f", "2")
    assert config.family == Family.EQUAL
    assert config.q == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["--p", "3"],
        ["--kind", "gl2"],
        ["--kind", "gl2", "--p", "4"],
        ["--kind", "gl2", "--p", "2"],
        ["--kind", "gl2", "--p", "3", "--ell", "0"],
        ["--kind", "gl2", "--p", "3", "--f", "2", "--family", "mixed"],
        ["--kind", "gl2", "--p", "3", "--budget", "0"],
    ],
)
def test_invalid_settings(mocker, argv):
    with pytest.raises(ValueError):
        config_from(mocker, *argv)


def test_budget_from_environment(mocker, monkeypatch):
    monkeypatch.setenv("GL2REALITY_BUDGET", "1000")
    config = config_from(mocker, "--kind", "gu2", "--p", "3")
    assert config.budget == 1000


def test_config_file(mocker, config_file):
    config = config_from(mocker, "--config", str(config_file), "--seed", "9")
    assert (config.kind, config.p, config.command) == (Kind.GU2, 5, Command.CHARTAB)
    assert config.seed == 9


def test_config_file_unknown_key(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("run-config:\n  kind: gl2\n  channel: test-forge\n")
    with pytest.raises(ValueError, match="channel"):
        load_config_file(path)


def test_config_file_without_section(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("kind: gl2\n")
    with pytest.raises(ValueError, match="run-config"):
        load_config_file(path)


def test_acceptance_defaults(mocker):
    config = config_from(mocker, "--acceptance")
    assert config.acceptance
    assert (config.kind, config.p) == (Kind.GL2, 3)


def test_default_output(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = RunConfig(kind=Kind.GU2, p=3, ell=2, command=Command.VERIFY_ALL)
    assert default_output(config) == str(tmp_path / "verify-all_gu2_q3_l2.json")


def test_census_report(mocker, tmp_path):
    out = tmp_path / "census.json"
    argv = ["--kind", "gu2", "--p", "3", "--cache-dir", str(tmp_path / "cache"), "-o", str(out)]
    assert run_main(mocker, *argv) == 0
    report = json.loads(out.read_text())
    assert report["config"]["kind"] == "gu2"
    assert report["timing"] is None
    assert all(claim["pass"] for claim in report["claims"])
    census = report["data"]["census"]
    assert (census["real"], census["strongly_real"]) == (6, 4)
    assert len(census["class_list"]) == census["classes"]

    first = out.read_bytes()
    assert run_main(mocker, *argv) == 0
    assert out.read_bytes() == first


def test_csv_report(mocker, tmp_path):
    out = tmp_path / "census.csv"
    code = run_main(
        mocker, "--kind", "gl2", "--p", "3", "--no-cache", "--format", "csv", "-o", str(out)
    )
    assert code == 0
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 8
    assert sum(row["real"] == "True" for row in rows) == 6


@pytest.mark.parametrize("kind", ["gl2", "gu2"])
def test_verify_all(mocker, tmp_path, kind):
    out = tmp_path / "verify.json"
    code = run_main(
        mocker,
        *("--kind", kind, "--p", "3", "--command", "verify-all", "--no-cache", "--timing"),
        *("-o", str(out)),
    )
    report = json.loads(out.read_text())
    assert [c["id"] for c in report["claims"] if not c["pass"]] == []
    assert code == 0
    assert set(report["timing"]) >= {"group", "census", "chartab", "formula"}


@pytest.mark.parametrize(
    "kind,orders",
    [
        (Kind.GL2, {"ss": 36, "sns": 54, "cus": 72}),
        (Kind.GU2, {"ss": 72, "sns": 108, "cus": 144}),
    ],
)
def test_centralizer_section_at_level_two(kind, orders):
    log = ClaimLog()
    data = run_centralizers(Session(RunConfig(kind=kind, p=3, ell=2, use_cache=False)), log)
    assert log.passed
    assert (data["level"], data["za_level"]) == (2, 1)
    assert data["centralizer_orders"] == orders
    assert data["za_index"] == {"ss": 1, "sns": 2, "cus": 1}


@pytest.mark.parametrize("ell,count", [(2, 18), (3, 54)])
def test_gl2_realforms_section(ell, count):
    log = ClaimLog()
    data = run_realforms(Session(RunConfig(kind=Kind.GL2, p=3, ell=ell, use_cache=False)), log)
    assert log.passed
    assert data["witnessed"] == len(data["forms"]) == count


def test_gl2_level_two_census(mocker, tmp_path):
    out = tmp_path / "census.json"
    code = run_main(
        mocker, *("--kind", "gl2", "--p", "3", "--ell", "2", "--no-cache", "-o", str(out))
    )
    report = json.loads(out.read_text())
    assert [c["id"] for c in report["claims"] if not c["pass"]] == []
    assert code == 0
    assert report["data"]["census"]["real"] == 18


def test_failed_claim_exits_with_one(mocker, tmp_path):
    mocker.patch("gl2reality.core.involution_formula", return_value=15)
    out = tmp_path / "involutions.json"
    code = run_main(
        mocker,
        *("--kind", "gl2", "--p", "3", "--command", "involutions", "--no-cache", "-o", str(out)),
    )
    assert code == 1
    report = json.loads(out.read_text())
    failed = [c for c in report["claims"] if not c["pass"]]
    assert [(c["id"], c["expected"], c["computed"]) for c in failed] == [
        ("involution-count", 15, 14)
    ]


def test_budget_exceeded_exits_with_two(mocker, tmp_path):
    out = tmp_path / "census.json"
    code = run_main(
        mocker, "--kind", "gl2", "--p", "3", "--budget", "10", "--no-cache", "-o", str(out)
    )
    assert code == 2
    assert "Refusing to enumerate" in json.loads(out.read_text())["data"]["error"]


def test_ring_tables_beyond_budget_exit_with_two(mocker, tmp_path):
    out = tmp_path / "classify.json"
    code = run_main(
        mocker,
        *("--kind", "gl2", "--p", "3", "--ell", "8", "--command", "classify", "--no-cache"),
        *("-o", str(out)),
    )
    assert code == 2
    assert "tables of the mixed ring" in json.loads(out.read_text())["data"]["error"]


def test_invalid_configuration_exits(mocker):
    code = run_main(mocker, "--kind", "gl2", "--p", "9")
    assert code.startswith("Invalid configuration")


def test_list_claims(mocker, caplog):
    caplog.set_level(logging.INFO)
    assert run_main(mocker, "--list-claims", "--command", "involutions") == 0
    assert "involution-count" in caplog.text
    assert "involution-classes" in caplog.text


@pytest.mark.slow
def test_acceptance(mocker, tmp_path):
    out = tmp_path / "acceptance.json"
    code = run_main(mocker, "--acceptance", "--no-cache", "-o", str(out))
    report = json.loads(out.read_text())
    assert [c["id"] for c in report["claims"] if not c["pass"]] == []
    assert code == 0
    assert sorted(report["data"]) == sorted(
        f"{kind}-q{q}-l{ell}" for kind in ("gl2", "gu2") for q, ell in [(3, 1), (3, 2), (5, 1)]
    )
    assert report["claims"][0]["id"].startswith("gl2-q3-l1/")
    assert all(c["id"].endswith("/" + c["paperRef"]) for c in report["claims"])
