"""Command-line interface.

Subcommands: run (seeded batch), classify (one relator), counts
(subgroup class counts), bs-scan (Baumslag-Solitar candidates), descend
(repeated-torsion descent).  Exit codes: 0 completed, 2 a node budget
was exhausted somewhere, 1 error.

SURFSUB_NODE_BUDGET and SURFSUB_PARALLELISM override the corresponding
defaults when the flags are not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import harness, report
from .classify import (
    ClassifyOptions,
    bs_candidate_scan,
    descend_on_repeated_torsion,
)
from .abelian import IntMatrix, invariants
from .harness import ExperimentConfig, classify_one, run_experiment
from .lowindex import (
    DEFAULT_NODE_BUDGET,
    BudgetExhausted,
    class_counts,
    low_index_subgroups,
)
from .presentations import format_presentation, one_relator, parse_presentation
from .words import cyclic_reduce, exponent_sums, word_from_text

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else fallback


def _add_budget_arg(sub):
    sub.add_argument(
        "--node-budget",
        type=int,
        default=None,
        help="cap on table-cell assignments per enumeration "
        "(default %d, env SURFSUB_NODE_BUDGET)" % DEFAULT_NODE_BUDGET,
    )


def _resolve_budget(args) -> int:
    if args.node_budget is not None:
        return args.node_budget
    return _env_int("SURFSUB_NODE_BUDGET", DEFAULT_NODE_BUDGET)


def _filter_args(sub):
    sub.add_argument("--no-occurrence-filter", action="store_true")
    sub.add_argument("--no-rank-reduction", action="store_true")
    sub.add_argument("--no-primitivity-filter", action="store_true")
    sub.add_argument("--no-fingerprint", action="store_true")
    sub.add_argument("--no-bs-scan", action="store_true")


def _options_from(args, budget: int) -> ClassifyOptions:
    return ClassifyOptions(
        occurrence_filter=not args.no_occurrence_filter,
        rank_reduction=not args.no_rank_reduction,
        primitivity_filter=not args.no_primitivity_filter,
        fingerprint=not args.no_fingerprint,
        bs_scan=not args.no_bs_scan,
        node_budget=budget,
        min_repeats=args.min_repeats,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfsub",
        description="surface subgroup detection in doubles of free groups",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="classify a batch of random relators")
    p_run.add_argument("--rank", type=int, default=3)
    p_run.add_argument("--trials", type=int, required=True)
    p_run.add_argument("--raw-length", type=int, default=None)
    p_run.add_argument("--max-index", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--parallelism", type=int, default=None,
                       help="worker processes (env SURFSUB_PARALLELISM)")
    p_run.add_argument("--min-repeats", type=int, default=3)
    p_run.add_argument("--output", required=True,
                       help="directory for records.jsonl, summary.json, csv, figures")
    p_run.add_argument("--no-figures", action="store_true")
    _add_budget_arg(p_run)
    _filter_args(p_run)

    p_cls = subs.add_parser("classify", help="classify one relator")
    p_cls.add_argument("word", help="relator text, e.g. bACBaBBABAc")
    p_cls.add_argument("--rank", type=int, default=None)
    p_cls.add_argument("--max-index", type=int, default=None)
    p_cls.add_argument("--min-repeats", type=int, default=3)
    _add_budget_arg(p_cls)
    _filter_args(p_cls)

    p_cnt = subs.add_parser("counts", help="subgroup class counts of a presentation")
    p_cnt.add_argument("presentation", help='e.g. "rank=2; relators=" for F2')
    p_cnt.add_argument("--up-to", type=int, required=True)
    _add_budget_arg(p_cnt)

    p_bs = subs.add_parser("bs-scan", help="Baumslag-Solitar candidates for a relator")
    p_bs.add_argument("word")
    p_bs.add_argument("--rank", type=int, default=3)
    p_bs.add_argument("--up-to", type=int, default=6)
    _add_budget_arg(p_bs)

    p_desc = subs.add_parser("descend", help="repeated-torsion descent at one index")
    p_desc.add_argument("presentation")
    p_desc.add_argument("--index", type=int, required=True)
    p_desc.add_argument("--min-repeats", type=int, default=3)
    _add_budget_arg(p_desc)

    return parser


def cmd_run(args) -> int:
    budget = _resolve_budget(args)
    parallelism = args.parallelism
    if parallelism is None:
        parallelism = _env_int("SURFSUB_PARALLELISM", 1)
    cfg = ExperimentConfig(
        rank=args.rank,
        trials=args.trials,
        raw_length=args.raw_length,
        max_index=args.max_index,
        seed=args.seed,
        occurrence_filter=not args.no_occurrence_filter,
        rank_reduction=not args.no_rank_reduction,
        primitivity_filter=not args.no_primitivity_filter,
        fingerprint=not args.no_fingerprint,
        bs_scan=not args.no_bs_scan,
        node_budget=budget,
        min_repeats=args.min_repeats,
        parallelism=parallelism,
        output=args.output,
    )

    done = 0

    def progress(rec):
        nonlocal done
        done += 1
        kind = rec["verdict"]["kind"]
        print(f"[{done}] ordinal {rec['ordinal']}: {rec['relator'] or '<trivial>'} -> {kind}")

    summary, records = run_experiment(cfg, progress=progress)
    report.records_to_csv(records, os.path.join(args.output, report.CSV_NAME))
    if not args.no_figures:
        for p in report.render_figures(records, cfg.rank, args.output):
            print(f"wrote {p}")
    print(
        f"trials={summary.trials} resolved={summary.resolved} "
        f"unresolved={summary.unresolved} fraction={summary.resolved_fraction:.3f}"
    )
    if any(harness.record_hit_budget(r) for r in records):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_classify(args) -> int:
    budget = _resolve_budget(args)
    record = classify_one(
        args.word, args.rank, args.max_index, _options_from(args, budget)
    )
    print(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    if harness.record_hit_budget(record.to_dict()):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_counts(args) -> int:
    budget = _resolve_budget(args)
    p = parse_presentation(args.presentation)
    vec = class_counts(p, args.up_to, budget)
    print(" ".join(str(c) for c in vec.counts))
    return EXIT_OK


def cmd_bs_scan(args) -> int:
    budget = _resolve_budget(args)
    w = cyclic_reduce(word_from_text(args.word, args.rank))
    if not w:
        print("trivial relator; nothing to scan", file=sys.stderr)
        return EXIT_ERROR
    p = one_relator(args.rank, w)
    g_inv = invariants(
        IntMatrix.from_rows([exponent_sums(w, args.rank)], args.rank), args.rank
    )
    counts = class_counts(p, args.up_to, budget)
    result = bs_candidate_scan(g_inv, counts, args.rank, args.up_to, budget)
    if result.note:
        print(f"note: {result.note}")
    if result.candidates:
        print(" ".join(f"BS({n},{m})" for n, m in result.candidates))
    else:
        print("no surviving candidates")
    return EXIT_OK


def cmd_descend(args) -> int:
    budget = _resolve_budget(args)
    p = parse_presentation(args.presentation)
    tables = low_index_subgroups(p, args.index, budget)
    q = descend_on_repeated_torsion(p, tables, args.min_repeats)
    if q is None:
        print("no subgroup with repeated torsion found")
    else:
        print(format_presentation(q))
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "classify": cmd_classify,
    "counts": cmd_counts,
    "bs-scan": cmd_bs_scan,
    "descend": cmd_descend,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses its own exit codes; fold usage errors into 1
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return _COMMANDS[args.command](args)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
