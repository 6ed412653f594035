#!/usr/bin/env python
# PYTHON_ARGCOMPLETE_OK
import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
import time
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

from ruamel.yaml import YAML

from . import __version__
from .cache import cached_chartab, cached_group, cached_gu2_reps
from .census import (
    conjugacy_partition,
    formula_identities,
    formula_report,
    nonregular_self_dual_formula,
    orthogonal_symplectic_formula,
    real_class_census,
    real_not_strongly_real_rows,
    regular_degrees,
    tangible_formula,
)
from .chartab import (
    centralizer_and_za,
    class_structure,
    degrees_by_type,
    fs_indicators,
    restriction_typing,
    self_dual_census,
    symplectic_split,
    tangibility_census,
    za_level,
)
from .classify import (
    GU2Classifier,
    OrbitType,
    gl2_canonical_form,
    gl2_real_forms,
    type_representative,
)
from .cmdutil import (
    CLAIMS,
    COMMAND_NAMES,
    STATEMENTS,
    ClaimLog,
    Command,
    OutputFormat,
    RunConfig,
    command_from_name,
    to_plain,
)
from .matgroups import DEFAULT_BUDGET, DEFAULT_SEED, Algebra, Kind, Mat2, group_order
from .reality import (
    class_reality,
    explicit_witness,
    involution_breakdown,
    involution_census,
    involution_formula,
    reality_sweep,
)
from .rings import Family, make_ring
from .util import BudgetExceeded, is_prime

logger = logging.getLogger()
logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.INFO)

try:
    import argcomplete
    from argcomplete.completers import ChoicesCompleter, FilesCompleter

    ENABLE_TAB_COMPLETION = True
except Exception as e:
    # See --help text for instructions.
    ENABLE_TAB_COMPLETION = False
    logger.debug(f"Tab completion not available: {e}")


DEFAULT_CACHE_DIR = os.path.join("~", ".cache", "gl2reality")

RUN_CONFIG_KEYS = (
    "kind",
    "p",
    "f",
    "ell",
    "family",
    "command",
    "format",
    "cache-dir",
    "budget",
    "seed",
    "output",
    "no-cache",
    "timing",
    "acceptance",
)

# (q, l) points of the acceptance run, every one for both GL2 and GU2
ACCEPTANCE_GRID = [(3, 1), (3, 2), (5, 1)]
CHARTAB_LIMIT = 10000
FORMULA_GRID = [(q, ell) for q in (3, 5, 7, 9) for ell in (1, 2, 3, 4)]

# expected index of Z_A in the centre, by type
ZA_INDEX = {OrbitType.SS.value: 1, OrbitType.SNS.value: 2, OrbitType.CUS.value: 1}


def parse_cmdline_args():
    """
    Parse the user's command-lines, with support for tab-completion.
    """
    parser = argparse.ArgumentParser(
        description=(
            "Enumerate GL_2 and GU_2 over truncated valuation rings, count their\n"
            "real and strongly real classes, compute character tables and check\n"
            "the counting formulas against the brute-force results."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--kind", choices=[k.value for k in Kind], help="gl2 or gu2")
    parser.add_argument("--p", type=int, help="odd residue characteristic")
    parser.add_argument("--f", type=int, help="residue field degree, q = p^f (Default: 1)")
    parser.add_argument("--ell", type=int, help="truncation level (Default: 1)")
    parser.add_argument(
        "--family",
        choices=[f.value for f in Family],
        help="mixed (Z/p^l) or equal (F_q[t]/t^l) characteristic (Default: mixed for f=1)",
    )
    command_arg = parser.add_argument(
        "--command", choices=COMMAND_NAMES, help="What to run (Default: census)"
    )
    parser.add_argument("--format", choices=["json", "csv"], help="Report format (Default: json)")
    parser.add_argument(
        "--cache-dir",
        default=os.environ.get("GL2REALITY_CACHE_DIR"),
        help=f"Directory for enumerated groups (Default: $GL2REALITY_CACHE_DIR or {DEFAULT_CACHE_DIR})",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=os.environ.get("GL2REALITY_BUDGET"),
        help=f"Largest group order to enumerate (Default: $GL2REALITY_BUDGET or {DEFAULT_BUDGET})",
    )
    parser.add_argument("--seed", type=int, help=f"Random seed (Default: {DEFAULT_SEED})")
    parser.add_argument(
        "--output",
        "-o",
        help="Report path (Default: <command>_<kind>_q<q>_l<ell>.<format> in the working directory)",
    )
    config_arg = parser.add_argument(
        "--config", help="YAML file whose 'run-config' section supplies defaults"
    )
    parser.add_argument(
        "--no-cache", action="store_true", default=None, help="Neither read nor write the group cache"
    )
    parser.add_argument(
        "--timing", action="store_true", default=None, help="Record run times in the report"
    )
    parser.add_argument(
        "--acceptance",
        action="store_true",
        default=None,
        help="Run verify-all over q in {3, 5}, l in {1, 2} for both kinds",
    )
    parser.add_argument(
        "--list-claims",
        action="store_true",
        help="List the claims the selected command checks, then exit",
    )

    if ENABLE_TAB_COMPLETION:
        command_arg.completer = ChoicesCompleter(COMMAND_NAMES)
        config_arg.completer = FilesCompleter((".yml", ".yaml"), directories=False)
        argcomplete.autocomplete(parser)

    args = parser.parse_args()
    return args


def load_config_file(path) -> dict:
    yaml = YAML(typ="safe")
    with open(path, "r") as f:
        contents = yaml.load(f)
    if not isinstance(contents, dict) or "run-config" not in contents:
        raise ValueError(f"{path} has no 'run-config' section")
    section = contents["run-config"] or {}
    unknown = set(section) - set(RUN_CONFIG_KEYS)
    if unknown:
        raise ValueError(
            f"unknown keys in the run-config section of {path}: {', '.join(sorted(unknown))}"
        )
    return section


def parse_run_config(args) -> RunConfig:
    """
    Merge the command line over the config file.  Every invalid value raises
    ValueError naming the setting.
    """
    settings = load_config_file(args.config) if args.config else {}
    for key in RUN_CONFIG_KEYS:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            settings[key] = value

    if settings.get("acceptance"):
        # the grid fixes kind and q; these only fill the report header
        settings.setdefault("kind", Kind.GL2.value)
        settings.setdefault("p", 3)
    if "kind" not in settings:
        raise ValueError("kind is required (gl2 or gu2)")
    if "p" not in settings:
        raise ValueError("p is required")
    try:
        kind = Kind(settings["kind"])
    except ValueError:
        raise ValueError(f"kind must be gl2 or gu2, got {settings['kind']}")

    p, f, ell = int(settings["p"]), int(settings.get("f", 1)), int(settings.get("ell", 1))
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if f < 1:
        raise ValueError(f"f must be positive, got {f}")
    if ell < 1:
        raise ValueError(f"ell must be at least 1, got {ell}")
    family = Family(settings.get("family", Family.MIXED if f == 1 else Family.EQUAL))
    if family == Family.MIXED and f != 1:
        raise ValueError(f"mixed characteristic needs f = 1, got f = {f}")

    output_format = str(settings.get("format", "json"))
    if output_format.upper() not in OutputFormat.__members__:
        raise ValueError(f"format must be json or csv, got {output_format}")
    budget = int(settings.get("budget", DEFAULT_BUDGET))
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")

    cache_dir = settings.get("cache-dir") or DEFAULT_CACHE_DIR
    return RunConfig(
        kind=kind,
        p=p,
        f=f,
        ell=ell,
        family=family,
        command=command_from_name(str(settings.get("command", "census"))),
        output_format=OutputFormat[output_format.upper()],
        cache_dir=os.path.abspath(os.path.expanduser(cache_dir)),
        budget=budget,
        seed=int(settings.get("seed", DEFAULT_SEED)),
        output=settings.get("output"),
        use_cache=not settings.get("no-cache", False),
        timing=bool(settings.get("timing", False)),
        acceptance=bool(settings.get("acceptance", False)),
    )


class Session:
    """Everything computed for one RunConfig, built on first use."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.kind = config.kind

    @cached_property
    def base(self):
        config = self.config
        params = (config.family, config.p, config.f, config.ell)
        base = make_ring(*params, budget=config.budget)
        if self.kind == Kind.GU2:
            make_ring(*params, extended=True, budget=config.budget)
        return base

    @property
    def cache_dir(self) -> Optional[str]:
        return self.config.cache_dir if self.config.use_cache else None

    @cached_property
    def handle(self):
        config = self.config
        return cached_group(
            self.base, self.kind, self.cache_dir, config.cache_key(), config.budget, config.seed
        )

    @cached_property
    def involutions(self):
        return involution_census(self.handle)

    @cached_property
    def classifier(self) -> Optional[GU2Classifier]:
        if self.kind != Kind.GU2:
            return None
        return cached_gu2_reps(self.handle, self.cache_dir, self.config.cache_key())

    @cached_property
    def classes(self):
        return conjugacy_partition(self.handle, self.involutions, self.classifier)

    @cached_property
    def census(self):
        return real_class_census(self.handle, self.classes)

    @cached_property
    def class_data(self):
        return class_structure(self.handle)

    @cached_property
    def table(self):
        return cached_chartab(
            self.class_data, self.cache_dir, self.config.cache_key(), self.config.seed
        )


# --- command runners: each checks its claims and returns report data -----------------


def run_group_order(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    expected = group_order(handle.q, handle.ell, handle.kind)
    log.check("group-order", expected, handle.order)
    return {"order": handle.order, "generators": len(handle.generators)}


def run_involutions(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    q, ell, kind = handle.q, handle.ell, handle.kind
    involutions = session.involutions
    formula = involution_formula(q, ell, kind)
    log.check("involution-count", formula, involutions.count)

    breakdown = involution_breakdown(handle, involutions)
    labels = handle.conjugacy_labels()
    identity = Mat2.identity(handle.ring)
    central = {int(labels[handle.index(identity)]), int(labels[handle.index(-identity)])}
    sign = -1 if kind == Kind.GL2 else 1
    log.check(
        "involution-classes",
        {"central": 2, "other": (q - sign) * q ** (2 * ell - 1), "other_classes": 1},
        {
            "central": sum(n for label, n in breakdown.items() if label in central),
            "other": sum(n for label, n in breakdown.items() if label not in central),
            "other_classes": len(set(breakdown) - central),
        },
    )
    return {"count": involutions.count, "formula": formula, "by_class": breakdown}


def run_census(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    census = session.census
    expected = formula_report(handle.q, handle.ell, handle.kind)
    if handle.kind == Kind.GL2:
        log.check("class-count", expected.classes, census.classes)
    log.check("real-class-count", expected.real, census.real)
    log.check("strongly-real-count", expected.strongly_real, census.strongly_real)
    log.check("real-regular-count", expected.real_regular, census.real_regular)
    log.check("real-nonregular-count", expected.real_nonregular, census.real_nonregular)
    log.check(
        "real-class-rows",
        {row: dataclasses.asdict(r) for row, r in expected.type_rows.items()},
        {row: dataclasses.asdict(r) for row, r in census.type_rows.items()},
    )
    if handle.kind == Kind.GL2:
        log.check("real-form-count", census.real, len(gl2_real_forms(handle.ring)))
    else:
        loose, row5 = real_not_strongly_real_rows(session.classes)
        log.check("gu2-real-not-strongly-real", row5, loose)

    data = census.as_dict()
    data["class_list"] = [dataclasses.asdict(c) for c in session.classes]
    return data


def run_reality(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    verdicts = class_reality(handle, session.involutions)
    sweep = reality_sweep(handle, session.involutions, verdicts, session.classifier)
    log.check("real-criterion", 0, sweep.real_mismatches)
    log.check("strongly-real-criterion", 0, sweep.strong_mismatches)
    log.check("strongly-real-products", 0, sweep.product_mismatches)
    if handle.kind == Kind.GL2:
        log.check("gl2-real-is-strongly-real", 0, sweep.real_not_strong)
    return {
        "real_elements": int(sweep.real.sum()),
        "strongly_real_elements": int(sweep.strongly_real.sum()),
        "real_not_strongly_real_elements": sweep.real_not_strong,
    }


def run_realforms(session: Session, log: ClaimLog) -> dict:
    """explicit inverting involutions for the real canonical forms (GL2)"""
    if session.kind == Kind.GU2:
        # no canonical form list for GU2; try the witness families on each real class
        found, entries = 0, []
        for c in session.classes:
            if not c.real:
                continue
            rep = session.classifier.reps[c.representative]
            h = explicit_witness(rep.matrix, Kind.GU2)
            found += h is not None
            entries.append({"label": c.label, "witness": None if h is None else list(h.entries)})
        logger.info(f"Explicit witnesses for {found} of {len(entries)} real GU2 classes")
        return {"forms": entries, "witnessed": found}

    base = session.base
    entries, witnessed = [], 0
    for family, form in gl2_real_forms(base):
        g = form.matrix(base)
        h = explicit_witness(g, Kind.GL2)
        involution = h is not None and h * h == Mat2.identity(base)
        witnessed += involution
        entries.append(
            {
                "family": family,
                "label": form.label,
                "witness": None if h is None else list(h.entries),
            }
        )
    log.check("real-form-witness", len(entries), witnessed)
    return {"forms": entries, "witnessed": witnessed}


def run_classify(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    q, ell = handle.q, handle.ell
    kernel = handle.base.extension.norm_one_kernel()
    data = {"norm_one_kernel": len(kernel)}

    if handle.kind == Kind.GU2:
        classifier = session.classifier
        classes = len(set(handle.conjugacy_labels().tolist()))
        log.check("gu2-class-exhaustive", classes, len(classifier.reps))
        tags: Dict[str, int] = {}
        for rep in classifier.reps.values():
            tags[rep.tag] = tags.get(rep.tag, 0) + 1
        data["tags"] = dict(sorted(tags.items()))
        data["representatives"] = sorted(rep.label for rep in classifier.reps.values())
    else:
        labels = handle.conjugacy_labels().tolist()
        by_class: Dict[int, set] = {}
        for g, label in enumerate(labels):
            by_class.setdefault(label, set()).add(gl2_canonical_form(handle.element(g)))
        forms = set().union(*by_class.values())
        log.check(
            "canonical-form-idempotent",
            len(forms),
            sum(gl2_canonical_form(form.matrix(handle.ring)) == form for form in forms),
        )
        log.check(
            "canonical-form-invariant",
            len(by_class),
            sum(len(found) == 1 for found in by_class.values()),
        )
        log.check("canonical-form-separates", len(by_class), len(forms))
        data["forms"] = sorted(form.label for form in forms)

    log.check("norm-one-kernel", q**ell + q ** (ell - 1), len(kernel))
    return data


def run_centralizers(session: Session, log: ClaimLog) -> dict:
    """centralizer orders in G(o_l) and Z_A for one regular representative of each type"""
    config = session.config
    expected, computed, index = {}, {}, {}
    for kind_type in (OrbitType.SS, OrbitType.SNS, OrbitType.CUS):
        A = type_representative(session.base, Algebra(config.kind.value), kind_type)
        data = centralizer_and_za(A, config.kind, config.ell)
        expected[kind_type.value] = data.formula
        computed[kind_type.value] = data.centralizer_order
        index[kind_type.value] = data.za_index
    log.check("centralizer-order", expected, computed)
    log.check("za-index", ZA_INDEX, index)
    return {
        "level": config.ell,
        "za_level": za_level(config.ell),
        "centralizer_orders": computed,
        "za_index": index,
    }


def run_chartab(session: Session, log: ClaimLog) -> dict:
    handle = session.handle
    q, ell, kind = handle.q, handle.ell, handle.kind
    classes = session.class_data
    table = session.table
    log.check("character-count", classes.count, table.count)

    data = {}
    with log.guard("indicators"):
        fs_indicators(table)
        log.check(
            "fs-aggregate", classes.involution_count, int((table.indicators * table.degrees).sum())
        )
        census = self_dual_census(table)
        log.check("real-character-count", classes.real_classes, census.real_characters)
        log.check(
            "orthogonal-symplectic-degrees",
            orthogonal_symplectic_formula(q, ell, kind),
            (census.orthogonal_degree_sum, census.symplectic_degree_sum),
        )
        if kind == Kind.GU2:
            log.check(
                "symplectic-growth",
                (q + 1) * q ** (2 * ell - 1),
                census.orthogonal_degree_sum + census.symplectic_degree_sum,
            )
        data["self_dual"] = dataclasses.asdict(census)

    if ell >= 2:
        with log.guard("restriction"):
            restriction_typing(table)
            by_type = degrees_by_type(table)
            data["degrees_by_type"] = by_type
            if kind == Kind.GL2:
                log.check(
                    "regular-degrees",
                    {t: [d] for t, d in regular_degrees(q, ell).items()},
                    {t: ds for t, ds in by_type.items() if t != OrbitType.NREG.value},
                )
            elif table.indicators is not None:
                split = symplectic_split(table)
                log.check("regular-symplectic", q ** (2 * ell - 3) - 1, split["nonregular"])
                data["symplectic_split"] = split

    if ell >= 2 and ell % 2 == 0:
        with log.guard("tangibility"):
            tangible = tangibility_census(table)
            log.check("tangible-counts", tangible_formula(q, ell), tangible.counts)
            log.check(
                "nonregular-self-dual",
                nonregular_self_dual_formula(q, ell),
                tangible.nonregular_self_dual,
            )
            data["tangible"] = tangible.counts

    data.update(table.as_dict())
    return data


def run_formula(session: Session, log: ClaimLog) -> dict:
    """closed forms at the configured (q, l) and the regression over FORMULA_GRID"""
    config = session.config
    report = formula_report(config.q, config.ell, config.kind)
    broken = []
    for q, ell in FORMULA_GRID:
        for kind in Kind:
            checks = formula_identities(formula_report(q, ell, kind))
            broken += [f"{kind.value} q={q} l={ell}: {name}" for name, ok in checks.items() if not ok]
    log.check("formula-regression", [], broken)
    data = report.as_dict()
    data["identities"] = formula_identities(report)
    return data


Runner = Callable[[Session, ClaimLog], dict]

COMMAND_SECTIONS: Dict[Command, List[Tuple[str, Runner]]] = {
    Command.CENSUS: [("census", run_census)],
    Command.INVOLUTIONS: [("involutions", run_involutions)],
    Command.CHARTAB: [("chartab", run_chartab)],
    Command.CLASSIFY: [("classify", run_classify)],
    Command.FORMULA: [("formula", run_formula)],
    Command.REALFORMS: [("realforms", run_realforms)],
}


def verify_all_sections(config: RunConfig) -> List[Tuple[str, Runner]]:
    sections = [
        ("group", run_group_order),
        ("involutions", run_involutions),
        ("census", run_census),
        ("reality", run_reality),
        ("realforms", run_realforms),
        ("classify", run_classify),
        ("centralizers", run_centralizers),
    ]
    order = group_order(config.q, config.ell, config.kind)
    if order <= CHARTAB_LIMIT:
        sections.append(("chartab", run_chartab))
    else:
        logger.info(f"Skipping the character table, group order {order} > {CHARTAB_LIMIT}")
    sections.append(("formula", run_formula))
    return sections


def run_sections(config: RunConfig, log: ClaimLog) -> Tuple[dict, dict, int]:
    """(data, timing, status) of one configuration; status 2 on budget or IO errors"""
    if config.command == Command.VERIFY_ALL:
        sections = verify_all_sections(config)
    else:
        sections = COMMAND_SECTIONS[config.command]

    session = Session(config)
    data, timing = {}, {}
    try:
        for name, runner in sections:
            start = time.perf_counter()
            with log.guard(name):
                data[name] = runner(session, log)
            timing[name] = round(time.perf_counter() - start, 3)
    except (BudgetExceeded, OSError) as e:
        logger.error(str(e))
        data["error"] = str(e)
        return data, timing, 2
    return data, timing, 0 if log.passed else 1


def run(config: RunConfig) -> Tuple[dict, int]:
    log = ClaimLog()
    data, timing, status = run_sections(config, log)
    return make_report(config, log, data, timing), status


def run_acceptance(config: RunConfig) -> Tuple[dict, int]:
    """verify-all over ACCEPTANCE_GRID for both kinds"""
    log = ClaimLog()
    data, timing, status = {}, {}, 0
    for q, ell in ACCEPTANCE_GRID:
        for kind in Kind:
            point = dataclasses.replace(
                config,
                kind=kind,
                p=q,
                f=1,
                ell=ell,
                family=Family.MIXED,
                command=Command.VERIFY_ALL,
                acceptance=False,
            )
            name = f"{kind.value}-q{q}-l{ell}"
            log.prefix = f"[{name}] "
            first = len(log.claims)
            data[name], timing[name], point_status = run_sections(point, log)
            for claim in log.claims[first:]:
                claim.id = f"{name}/{claim.id}"
            status = max(status, point_status)
    return make_report(config, log, data, timing), status


def make_report(config: RunConfig, log: ClaimLog, data: dict, timing: dict) -> dict:
    return {
        "version": __version__,
        "config": config.as_dict(),
        "claims": [claim.as_dict() for claim in log.claims],
        "data": to_plain(data),
        "timing": timing if config.timing else None,
    }


def default_output(config: RunConfig) -> str:
    command = "acceptance" if config.acceptance else config.command.cli_name
    suffix = config.output_format.name.lower()
    return os.path.abspath(f"{command}_{config.kind.value}_q{config.q}_l{config.ell}.{suffix}")


def csv_rows(report: dict) -> List[dict]:
    """one row per class or character where the report has them, else per claim"""
    for section in report["data"].values():
        if not isinstance(section, dict):
            continue
        if "class_list" in section:
            return section["class_list"]
        if "characters" in section:
            return [
                {k: v for k, v in chi.items() if k not in ("residues", "values")}
                for chi in section["characters"]
            ]
    return report["claims"]


def write_result(result_file_name, report: dict, output_format: OutputFormat):
    with open(result_file_name, "w", newline="") as f:
        if output_format == OutputFormat.CSV:
            rows = csv_rows(report)
            fields = sorted({key for row in rows for key in row})
            writer = csv.DictWriter(f, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
        else:
            json.dump(report, f, sort_keys=True, indent=2)
            f.write("\n")


def print_claim_list(command: Command):
    max_name = max(len(claim_id) for claim_id in CLAIMS[command])
    for claim_id in CLAIMS[command]:
        logger.info(f"{claim_id: <{max_name}} : {STATEMENTS[claim_id]}")


def main():
    args = parse_cmdline_args()

    if args.list_claims:
        print_claim_list(command_from_name(args.command or "verify-all"))
        sys.exit(0)

    try:
        config = parse_run_config(args)
    except (ValueError, OSError) as e:
        sys.exit(f"Invalid configuration: {e}")

    if config.acceptance:
        report, status = run_acceptance(config)
    else:
        report, status = run(config)

    result_file = os.path.abspath(config.output) if config.output else default_output(config)
    try:
        write_result(result_file, report, config.output_format)
    except OSError as e:
        logger.error(f"Could not write {result_file}: {e}")
        sys.exit(2)

    failures = [c["id"] for c in report["claims"] if not c["pass"]]
    summary = {
        "command": report["config"]["command"],
        "claims": len(report["claims"]),
        "failed": failures,
        "exit-status": status,
    }
    yaml = YAML(typ="safe")
    yaml.default_flow_style = False
    print("--------")
    print(f"DONE, Result written to {result_file}")
    print("--------")
    print("Summary:")
    yaml.dump(summary, sys.stdout)
    sys.exit(status)
