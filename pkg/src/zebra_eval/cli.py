"""Command-line entry point: ``zebra-eval {evaluate,profile,compare,simulate}``.

Exit codes: 0 success, 2 user error (bad flags, unreadable or invalid input),
1 internal failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import io as zio
from .calibration import pav_calibrate
from .metrics import zebra
from .profile import DEFAULT_GRID, PlotStyle, build_profile, emit_csv, emit_svg, parse_grid
from .simulate import ScoreSimSpec, simulate_scores
from .types import ZebraError

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

BASELINE_HELP = (
    "also report Cllr and EER as contrast metrics; both are ill suited to "
    "measuring privacy and are shown for comparison with earlier work only"
)


class UsageError(Exception):
    pass


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_many(paths: List[str]):
    return [zio.read_scores(p) for p in paths]


def cmd_evaluate(args) -> int:
    if args.format == "split-pair" and not args.nonmated:
        raise UsageError("--format split-pair needs --nonmated FILE")
    if args.format == "labeled-tsv" and args.nonmated:
        raise UsageError("--nonmated only applies to --format split-pair")
    scores = zio.read_scores(args.scores, args.format, args.nonmated, args.source_id)
    report = zebra(scores, baselines=args.baselines)
    sys.stdout.write(zio.write_report(report, "json" if args.json else "text"))
    return EXIT_OK


def cmd_profile(args) -> int:
    lo, hi, n = parse_grid(args.grid)
    score_sets = _load_many(args.scores)
    profiles = []
    reports = {}
    for scores in score_sets:
        cal = pav_calibrate(scores)
        profiles.append((scores.source_id, build_profile(cal, lo, hi, n)))
        reports[scores.source_id] = zebra(scores)
    _write(args.csv, emit_csv(profiles))
    if args.svg:
        _write(args.svg, emit_svg(profiles, PlotStyle(title=args.title), reports))
    return EXIT_OK


def rank_reports(reports):
    return sorted(reports, key=lambda r: (r.d_ece, r.log10_l, r.source_id))


def cmd_compare(args) -> int:
    if len(args.scores) < 2:
        raise UsageError("compare needs at least two --scores files")
    ranked = rank_reports([zebra(s) for s in _load_many(args.scores)])
    if args.json:
        rows = [dict(rank=i, **zio.report_to_dict(r)) for i, r in enumerate(ranked, 1)]
        sys.stdout.write(json.dumps(rows, indent=2, ensure_ascii=False) + "\n")
        return EXIT_OK
    lines = ["rank\tsource_id\td_ece\tlog10_l\ttag"]
    for i, r in enumerate(ranked, 1):
        lines.append(f"{i}\t{r.source_id}\t{r.d_ece:.4f}\t{r.log10_l:.4f}\t{r.tag}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = ScoreSimSpec(
        args.mu_mated, args.mu_nonmated, args.sigma, args.n_mated, args.n_nonmated, args.seed
    )
    _write(args.out, zio.write_labeled_tsv(simulate_scores(spec)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zebra-eval",
        description="Expected and worst-case privacy disclosure from mated/non-mated scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="print the (D_ECE, log10(l), tag) tuple for one system")
    p.add_argument("--scores", required=True, metavar="FILE",
                   help="labeled-tsv file, or the mated file for split-pair")
    p.add_argument("--format", choices=zio.FORMATS, default="labeled-tsv")
    p.add_argument("--nonmated", metavar="FILE", help="non-mated file for split-pair")
    p.add_argument("--source-id", help="system name (default: file comment or path)")
    p.add_argument("--baselines", action="store_true", help=BASELINE_HELP)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("profile", help="write ECE profiles as CSV and optionally SVG")
    p.add_argument("--scores", required=True, action="append", metavar="FILE",
                   help="labeled-tsv file; repeat to overlay systems")
    p.add_argument("--csv", required=True, metavar="OUT")
    p.add_argument("--svg", metavar="OUT")
    p.add_argument("--grid", default="{:g}:{:g}:{}".format(*DEFAULT_GRID),
                   help="prior log10-odds grid lo:hi:n (use --grid=-4:4:201 for negative lo)")
    p.add_argument("--title", default="ECE profiles")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="rank systems by expected disclosure (lowest first)")
    p.add_argument("--scores", required=True, action="append", metavar="FILE", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="write a synthetic two-Gaussian labeled-tsv file")
    p.add_argument("--mu-mated", type=float, required=True)
    p.add_argument("--mu-nonmated", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n-mated", type=int, required=True)
    p.add_argument("--n-nonmated", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "compare":
        args.scores = [p for group in args.scores for p in group]
    try:
        return args.func(args)
    except (UsageError, ZebraError, ValueError) as exc:
        print(f"zebra-eval {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        name = exc.filename or ""
        print(f"zebra-eval {args.command}: cannot access {name}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"zebra-eval {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
