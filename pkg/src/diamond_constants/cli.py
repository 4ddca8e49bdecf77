"""Command-line driver: sample parameters, run checks, summarize reports.

Exit status is 0 when every check passes, 1 when any check fails or errors,
and 2 for usage or configuration problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .combinatorics import SubsetJ, all_subsets
from .params import ParamError, ParamSet, load_params, mutate, sample, validate
from .suite import SLUGS, TABLE_CASES, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ALIASES = {"t+t+s": "t-t-s", "mu-empty": "mu-empty-consistency"}


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def parse_range(text: str) -> list[int]:
    """'3', '1..4' or '1,3'."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad range {text!r}") from None
        if lo_i > hi_i:
            raise UsageError(f"empty range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return parse_int_list(text)


def parse_j_rho(text: str, f: int) -> list[SubsetJ]:
    """'every' (all proper subsets), 'empty', 'full' or indices like '0,2'."""
    if text == "every":
        return [R for R in all_subsets(f) if not R.is_full()]
    if text == "empty":
        return [SubsetJ.empty(f)]
    if text == "full":
        return [SubsetJ.full(f)]
    idx = parse_int_list(text)
    if any(not 0 <= j < f for j in idx):
        raise UsageError(f"--j-rho {text} has indices outside 0..{f - 1}")
    return [SubsetJ.of(idx, f)]


def build_param_sets(args) -> list[ParamSet]:
    if args.params_file:
        ps = [load_params(args.params_file)]
    else:
        ps = []
        for f in parse_range(args.f):
            if f < 1:
                raise UsageError("--f must be positive")
            for p in parse_int_list(args.p):
                for R in parse_j_rho(args.j_rho, f):
                    for k in range(args.trials):
                        params = sample(p, f, R, args.seed + k, args.e, args.mode)
                        if args.r:
                            r = tuple(parse_int_list(args.r))
                            if len(r) != f:
                                raise UsageError(f"--r needs {f} entries for f={f}")
                            params = replace(params, r=r)
                        ps.append(params)
    for params in ps:
        validate(params, args.mode).raise_if_invalid()
    return ps


def _add_param_options(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("parameters")
    g.add_argument("--p", default="29", help="prime(s), comma separated (default 29)")
    g.add_argument("--f", default="1..3", help="degree or range such as 1..4 (default 1..3)")
    g.add_argument("--e", type=int, default=None, help="coefficient field degree (default f)")
    g.add_argument("--j-rho", default="every",
                   help="'every' proper subset, 'empty', 'full' or indices like 0,2")
    g.add_argument("--r", default=None, help="explicit r vector, comma separated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trials", type=int, default=1, help="parameter sets per (p, f, J_rho)")
    g.add_argument("--mode", choices=("strict", "relaxed"), default="strict")
    g.add_argument("--params-file", default=None, help="JSON parameter profile")
    g.add_argument("--format", choices=("json", "text"), default="text")
    g.add_argument("--output", default=None, help="write the report here instead of stdout")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diamond-constants", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run checks")
    vsub = verify.add_subparsers(dest="target", required=True)
    lemma = vsub.add_parser("lemma", help="run the named checks")
    lemma.add_argument("slugs", nargs="+", metavar="SLUG",
                       help="one or more of: " + ", ".join(SLUGS))
    vsub.add_parser("theorem", help="compare both invariant families and canonical forms")
    vsub.add_parser("suite", help="run every check")
    for sp in vsub.choices.values():
        _add_param_options(sp)
        sp.add_argument("--samples", type=int, default=None,
                        help="random trials inside operator and conjugation checks")
        sp.add_argument("--precision", type=int, default=None, help="Witt length override")
        sp.add_argument("--mutate", choices=("d", "r", "table"), default=None,
                        help="perturb one input of the expected side (negative control)")
        sp.add_argument("--table-case", choices=TABLE_CASES, default="-X",
                        help="case flipped by --mutate table (default -X)")

    params = sub.add_parser("params", help="print sampled parameter sets")
    _add_param_options(params)

    report = sub.add_parser("report", help="summarize a saved JSON report")
    report.add_argument("path")
    report.add_argument("--format", choices=("json", "text"), default="text")
    report.add_argument("--output", default=None)
    return ap


def _slugs_for(args) -> list[str]:
    if args.target == "suite":
        return list(SLUGS)
    if args.target == "theorem":
        return ["theorem"]
    slugs = [ALIASES.get(s, s) for s in args.slugs]
    unknown = [s for s in slugs if s not in SLUGS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(SLUGS)}")
    return slugs


def _config(args) -> dict:
    skip = {"func"}
    return {k.replace("_", "-"): v for k, v in vars(args).items() if k not in skip}


def summarize(checks: list[dict]) -> tuple[str, bool]:
    counts: dict[str, dict[str, int]] = {}
    for c in checks:
        counts.setdefault(c["slug"], {}).setdefault(c["status"], 0)
        counts[c["slug"]][c["status"]] += 1
    lines = []
    width = max((len(s) for s in counts), default=0)
    for slug, n in counts.items():
        parts = " ".join(f"{k}={n[k]}" for k in ("pass", "fail", "skip", "error") if n.get(k))
        lines.append(f"{slug:<{width}}  {parts}")
    bad = [c for c in checks if c["status"] in ("fail", "error")]
    for c in bad:
        pr = c["params"]
        where = f"p={pr['p']} f={pr['f']} J_rho={pr['J_rho']} hash={pr['hash']}"
        sub = "" if c["subset"] is None else f" J={c['subset']}"
        detail = json.dumps(c["details"], sort_keys=True)
        if len(detail) > 400:
            detail = detail[:400] + "..."
        lines.append(f"{c['status'].upper()} {c['slug']} {where}{sub}: {detail}")
    for c in checks:
        if c["slug"] == "theorem" and c["status"] != "skip":
            lines.append(f"invariants at hash={c['params']['hash']}:")
            for row in c["details"].get("rows", []):
                mark = "ok" if row["ok"] else "MISMATCH"
                J = "" if row["J"] is None else f" J={row['J']}"
                lines.append(f"  {row['family']}{J}: nu={row['nu']} gamma={row['gamma']} {mark}")
    if not checks:
        lines.append("no applicable checks for this configuration")
    lines.append("OK" if not bad else f"{len(bad)} check(s) did not pass")
    return "\n".join(lines), not bad


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def cmd_verify(args) -> int:
    slugs = _slugs_for(args)
    param_sets = build_param_sets(args)
    mutate_oracle = None
    if args.mutate in ("d", "r"):
        kind = args.mutate
        mutate_oracle = lambda ps: mutate(ps, kind)  # noqa: E731
    perturb = args.table_case if args.mutate == "table" else None
    records = run_checks(slugs, param_sets, mutate_oracle, perturb,
                         args.seed, args.samples, args.precision)
    checks = [r.to_json() for r in records]
    text, ok = summarize(checks)
    if args.format == "json":
        report = {"tool-version": __version__, "config": _config(args), "checks": checks}
        _emit(json.dumps(report, indent=2, sort_keys=True), args.output)
    else:
        _emit(text, args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_params(args) -> int:
    out = []
    for ps in build_param_sets(args):
        out.append({**ps.to_json(), "hash": ps.params_hash()})
    if args.format == "json":
        _emit(json.dumps(out, indent=2), args.output)
    else:
        _emit("\n".join(f"{d['hash']}  p={d['p']} f={d['f']} r={d['r']} J_rho={d['J_rho']}"
                        for d in out), args.output)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        data = json.loads(Path(args.path).read_text())
        checks = data["checks"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read report {args.path}: {exc}") from None
    text, ok = summarize(checks)
    if args.format == "json":
        statuses = {}
        for c in checks:
            statuses[c["status"]] = statuses.get(c["status"], 0) + 1
        _emit(json.dumps({"tool-version": data.get("tool-version"), "ok": ok,
                          "counts": statuses}, indent=2), args.output)
    else:
        _emit(text, args.output)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "params": cmd_params, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
