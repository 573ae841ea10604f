"""Unified command-line entry point.

Subcommands: audit, normedness, envelope, expectation, check-kk,
check-levy, check-tail, check-mont, word-norm, batch, summary.  All
inputs and outputs are UTF-8 JSON; rationals travel as "p/q" strings.

Exit codes: 0 = everything satisfied / consistent, 1 = infrastructure
error (bad input, missing file), 2 = an inequality violated or a
property refuted.  A violated inequality is a bug signal, not a
discovery: the theorems are proved, so the ledger flags it loudly.

GROUPPROB_THREADS bounds batch worker count (default: hardware count).
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

from . import __version__
from .algebra import GroupError, audit_axioms
from .envelope import BanachEnvelope, EnvelopeError, FiniteDistribution
from .instances import SpecError, list_kinds, parse_group_spec
from .normedness import check_j_normed
from .rademacher import (LaminarFamily, RademacherScenario, check_kk,
                         check_levy, check_mont, check_tail_product)
from .rational import frac, frac_str
from .wordnorm import WordError, biinv_norm, parse_word

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


class CliError(Exception):
    pass


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")


def _load_json(path: str):
    try:
        return json.loads(_read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CliError(f"{path} is not valid JSON: {exc}")


def _load_group(path: str):
    try:
        return parse_group_spec(_read_bytes(path))
    except SpecError as exc:
        raise CliError(f"{path}: {exc}")


def _load_scenario(path: str) -> RademacherScenario:
    obj = _load_json(path)
    try:
        return RademacherScenario.from_json_dict(obj)
    except (KeyError, ValueError, GroupError) as exc:
        raise CliError(f"{path}: bad scenario: {exc}")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _parse_j(text: str) -> List[int]:
    """'2..16' or '2,3,5' -> list of exponents."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_grid(text: str) -> List:
    return [frac(part) for part in text.split(",") if part.strip()]


def thread_count() -> int:
    raw = os.environ.get("GROUPPROB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise CliError(f"GROUPPROB_THREADS={raw!r} is not an integer")
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# single-check commands


def _cmd_audit(args) -> int:
    instance = _load_group(args.group)
    report = audit_axioms(instance, args.samples, args.seed)
    _emit(report.to_json_dict())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _cmd_normedness(args) -> int:
    instance = _load_group(args.group)
    elements = [instance.element_from_json(e) for e in _load_json(args.elements)]
    verdict = check_j_normed(instance, _parse_j(args.j), elements)
    _emit(verdict.to_json_dict())
    return EXIT_OK if verdict.holds else EXIT_VIOLATION


def _cmd_envelope(args) -> int:
    if args.action != "trace":
        raise CliError(f"unknown envelope action {args.action!r}")
    instance = _load_group(args.group)
    element = instance.element_from_json(_load_json(args.element))
    env = BanachEnvelope(instance)
    _emit({"group": instance.spec_dict(), "stages": env.trace(element)})
    return EXIT_OK


def _cmd_expectation(args) -> int:
    instance = _load_group(args.group)
    dist = FiniteDistribution.from_json_dict(instance, _load_json(args.dist))
    env = BanachEnvelope(instance)
    value = env.expectation(dist)
    _emit({"group": instance.spec_dict(),
           "expectation": [frac_str(c) for c in value.payload],
           "norm": frac_str(env.banach_norm(value))})
    return EXIT_OK


def _cmd_check_kk(args) -> int:
    scenario = _load_scenario(args.scenario)
    report = check_kk(scenario, args.regime)
    _emit(report.to_json_dict())
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_check_levy(args) -> int:
    scenario = _load_scenario(args.scenario)
    family = LaminarFamily.from_json_dict(_load_json(args.family))
    report = check_levy(scenario, family, args.s, args.t)
    _emit(report.to_json_dict())
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_check_tail(args) -> int:
    scenario = _load_scenario(args.scenario)
    report = check_tail_product(scenario, args.s, args.t, args.u, args.v)
    _emit(report.to_json_dict())
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_check_mont(args) -> int:
    instance = _load_group(args.group)
    law = FiniteDistribution.from_json_dict(instance, _load_json(args.law))

    def element_arg(text: Optional[str]):
        if text is None:
            if not instance.has_identity:
                raise CliError("--z0/--z1 are required on identity-less instances")
            return instance.identity()
        return instance.element_from_json(json.loads(text))

    report = check_mont(instance, law, element_arg(args.z0), element_arg(args.z1),
                        args.n, _parse_grid(args.t_grid), mode=args.mode,
                        seed=args.seed, samples=args.samples)
    _emit(report.to_json_dict())
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def _cmd_word_norm(args) -> int:
    try:
        word = parse_word(args.word, rank=args.rank)
    except WordError as exc:
        raise CliError(str(exc))
    bounds = biinv_norm(word, conj_bound=args.conj_bound,
                        len_bound=args.len_bound, rank=args.rank)
    _emit(bounds.to_json_dict())
    return EXIT_OK


# ---------------------------------------------------------------------------
# batch runner and summaries


def _run_manifest_entry(entry: dict, base_dir: str) -> Tuple[Optional[bool], dict, str]:
    """Returns (satisfied, report_dict, digest)."""
    check = entry.get("check")
    if check is None:
        raise CliError("manifest entry missing 'check'")

    def path_of(key: str) -> str:
        if key not in entry:
            raise CliError(f"manifest entry for {check!r} missing {key!r}")
        return os.path.join(base_dir, entry[key])

    if check == "kk":
        path = path_of("path")
        scenario = _load_scenario(path)
        report = check_kk(scenario, entry.get("regime", "general"))
        return report.satisfied, report.to_json_dict(), _digest(path)
    if check == "levy":
        path = path_of("path")
        scenario = _load_scenario(path)
        family = LaminarFamily.from_json_dict(_load_json(path_of("family")))
        report = check_levy(scenario, family, entry.get("s", "1"), entry.get("t", "1"))
        return report.satisfied, report.to_json_dict(), _digest(path)
    if check == "tail":
        path = path_of("path")
        scenario = _load_scenario(path)
        report = check_tail_product(scenario, *(entry.get(k, "1") for k in "stuv"))
        return report.satisfied, report.to_json_dict(), _digest(path)
    if check == "mont":
        path = path_of("group")
        instance = _load_group(path)
        law = FiniteDistribution.from_json_dict(instance, _load_json(path_of("law")))
        z0 = instance.element_from_json(entry["z0"]) if "z0" in entry else instance.identity()
        z1 = instance.element_from_json(entry["z1"]) if "z1" in entry else instance.identity()
        report = check_mont(instance, law, z0, z1, int(entry.get("n", 4)),
                            [frac(t) for t in entry.get("t_grid", ["1"])],
                            mode=entry.get("mode", "exact"),
                            seed=int(entry.get("seed", 0)),
                            samples=int(entry.get("samples", 100_000)))
        return report.satisfied, report.to_json_dict(), _digest(path)
    if check == "normedness":
        path = path_of("group")
        instance = _load_group(path)
        elements = [instance.element_from_json(e)
                    for e in _load_json(path_of("elements"))]
        verdict = check_j_normed(instance, _parse_j(entry.get("j", "2..8")), elements)
        return verdict.holds, verdict.to_json_dict(), _digest(path)
    if check == "audit":
        path = path_of("group")
        instance = _load_group(path)
        report = audit_axioms(instance, int(entry.get("samples", 1000)),
                              int(entry.get("seed", 0)))
        return report.passed, report.to_json_dict(), _digest(path)
    raise CliError(f"unknown check {check!r}")


def _digest(path: str) -> str:
    return hashlib.sha256(_read_bytes(path)).hexdigest()


def run_batch(manifest: dict, base_dir: str) -> List[dict]:
    """Execute manifest scenarios concurrently; records keep manifest order."""
    entries = manifest.get("scenarios", [])
    if not isinstance(entries, list):
        raise CliError("manifest 'scenarios' must be a list")
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()

    def run_one(indexed):
        index, entry = indexed
        record = {
            "index": index,
            "id": entry.get("id", f"scenario-{index}"),
            "check": entry.get("check"),
            "timestamp": stamp,
            "version": __version__,
        }
        try:
            satisfied, report, digest = _run_manifest_entry(entry, base_dir)
            record.update(status="ok", satisfied=satisfied,
                          input_digest=digest, report=report)
        except (CliError, GroupError, EnvelopeError, SpecError, ValueError,
                KeyError) as exc:
            record.update(status="error", satisfied=None, error=str(exc))
        return record

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(run_one, enumerate(entries)))


def _cmd_batch(args) -> int:
    manifest = _load_json(args.manifest)
    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    records = run_batch(manifest, base_dir)
    out_dir = args.output or manifest.get("output_dir") or base_dir
    os.makedirs(out_dir, exist_ok=True)
    ledger_path = os.path.join(out_dir, "ledger.jsonl")
    with open(ledger_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    violations = sum(1 for r in records if r["satisfied"] is False)
    errors = sum(1 for r in records if r["status"] == "error")
    _emit({"ledger": ledger_path, "records": len(records),
           "violations": violations, "errors": errors})
    if violations:
        return EXIT_VIOLATION
    if errors:
        return EXIT_ERROR
    return EXIT_OK


SUMMARY_COLUMNS = ("id", "check", "inequality", "lhs", "rhs",
                   "constant_formula", "slack", "satisfied")


def summary_rows(records: List[dict]) -> List[dict]:
    rows = []
    for record in records:
        report = record.get("report", {})
        constant = report.get("constant") or {}
        rows.append({
            "id": record.get("id", ""),
            "check": record.get("check", ""),
            "inequality": report.get("inequality", ""),
            "lhs": report.get("lhs", ""),
            "rhs": report.get("rhs", ""),
            "constant_formula": constant.get("formula", ""),
            "slack": report.get("slack", ""),
            "satisfied": record.get("satisfied"),
        })
    rows.sort(key=lambda r: (str(r["id"]), str(r["check"])))
    return rows


def emit_summary(records: List[dict], fmt: str) -> str:
    """Deterministic, sorted summary of a ledger in json/csv/markdown form."""
    rows = summary_rows(records)
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True)
    if fmt == "csv":
        lines = [",".join(SUMMARY_COLUMNS)]
        for row in rows:
            lines.append(",".join(str(row[c]) for c in SUMMARY_COLUMNS))
        return "\n".join(lines)
    if fmt == "markdown-table":
        lines = ["| " + " | ".join(SUMMARY_COLUMNS) + " |",
                 "|" + "|".join("---" for _ in SUMMARY_COLUMNS) + "|"]
        for row in rows:
            lines.append("| " + " | ".join(str(row[c]) for c in SUMMARY_COLUMNS) + " |")
        return "\n".join(lines)
    raise CliError(f"unknown format {fmt!r}")


def _cmd_summary(args) -> int:
    records = []
    for line in _read_bytes(args.ledger).decode("utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    sys.stdout.write(emit_summary(records, args.format) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grouprob",
        description="exact inequality verification on abelian metric (semi)groups")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--list-kinds", action="store_true",
                        help="list supported group families and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("list-kinds", help="list supported group families")

    p = sub.add_parser("audit", help="seeded axiom audit of a group spec")
    p.add_argument("--group", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("normedness", help="check/refute J-normedness on elements")
    p.add_argument("--group", required=True)
    p.add_argument("--j", required=True, help="'2..16' or '2,3,5'")
    p.add_argument("--elements", required=True, help="JSON list of elements")
    p.set_defaults(func=_cmd_normedness)

    p = sub.add_parser("envelope", help="envelope-chain tools")
    p.add_argument("action", choices=["trace"])
    p.add_argument("--group", required=True)
    p.add_argument("--element", required=True, help="JSON file with one element")
    p.set_defaults(func=_cmd_envelope)

    p = sub.add_parser("expectation", help="Banach-space expectation of a law")
    p.add_argument("--group", required=True)
    p.add_argument("--dist", required=True)
    p.set_defaults(func=_cmd_expectation)

    p = sub.add_parser("check-kk", help="moment-comparison inequality")
    p.add_argument("--scenario", required=True)
    p.add_argument("--regime", required=True,
                   choices=["normed-sharp", "normed-general", "general"])
    p.set_defaults(func=_cmd_check_kk)

    p = sub.add_parser("check-levy", help="maximal inequality over a laminar family")
    p.add_argument("--scenario", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=_cmd_check_levy)

    p = sub.add_parser("check-tail", help="tail-product bound")
    p.add_argument("--scenario", required=True)
    for flag in ("--s", "--t", "--u", "--v"):
        p.add_argument(flag, required=True)
    p.set_defaults(func=_cmd_check_tail)

    p = sub.add_parser("check-mont", help="i.i.d. maximal inequality (c1=10, c2=3)")
    p.add_argument("--group", required=True)
    p.add_argument("--law", required=True)
    p.add_argument("--z0", help="inline element JSON (default: identity)")
    p.add_argument("--z1", help="inline element JSON (default: identity)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-grid", required=True, help="comma list of rationals")
    p.add_argument("--mode", choices=["exact", "sample"], default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=_cmd_check_mont)

    p = sub.add_parser("word-norm", help="certified bi-invariant word-norm bounds")
    p.add_argument("--word", required=True)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--conj-bound", type=int, default=4)
    p.add_argument("--len-bound", type=int, default=6)
    p.set_defaults(func=_cmd_word_norm)

    p = sub.add_parser("batch", help="run a manifest of scenarios to a ledger")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", help="ledger directory (default: manifest's)")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("summary", help="summarize a JSON-lines ledger")
    p.add_argument("--ledger", required=True)
    p.add_argument("--format", default="markdown-table",
                   choices=["json", "csv", "markdown-table"])
    p.set_defaults(func=_cmd_summary)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_kinds or args.command == "list-kinds":
        _emit(list_kinds())
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_ERROR
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (GroupError, EnvelopeError, SpecError, WordError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
