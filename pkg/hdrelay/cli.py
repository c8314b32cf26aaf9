from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .appendix import appendix_checks
from .batch import process_sweep
from .capacity import capacity_single_relay
from .codec import SingleRelayCode, TimingCode, TwoSourceCode, format_codebooks
from .counting import BudgetVector, max_w0, optimal_budgets
from .errors import CascadeError, ConfigError
from .networks import butterfly_report, load_tree, tree_multicast_capacity, wireless_tree
from .pipeline import run_pipeline, verify_exhaustive
from .presets import PRESETS, apply_preset
from .region import two_source_region_curves
from .render import save_region_png
from .report import (
    Table,
    build_appendix_table,
    build_butterfly_table,
    build_codebook_table,
    build_capacity_table,
    build_counting_table,
    build_region_table,
    build_single_relay_table,
    build_transcript_table,
    build_tree_table,
    build_verification_table,
    save_table,
    write_table,
)
from .settings import CODES, RunConfig, load_run_config

logger = logging.getLogger(__name__)

# Outcome of a command: the table to write and whether every requested check passed.
Outcome = tuple[Table, bool]


def _say(*parts: object) -> None:
    """Human-readable notes go to stderr; stdout carries only the table."""
    print(*parts, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON file with RunConfig fields")
    common.add_argument("--preset", choices=list(PRESETS), default=None, help="Apply a predefined run")
    common.add_argument("--format", dest="output_format", choices=["csv", "json"], default=argparse.SUPPRESS,
                        help="Output format (default: csv)")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="Write the table here instead of stdout")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="Solver tolerance (default 1e-9)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for solver detail")

    p = argparse.ArgumentParser(
        prog="hdrelay",
        description="Half-duplex relay cascades: capacities, rate regions and timing codes",
    )
    sub = p.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    cap = sub.add_parser("capacity", parents=[common], help="Capacity table over m and q")
    cap.add_argument("--m", dest="m_list", type=int, nargs="+", default=S, help="Cascade lengths m (nodes 0..m)")
    cap.add_argument("--q", dest="q_list", type=int, nargs="+", default=S, help="Transmission alphabet sizes")

    reg = sub.add_parser("region", parents=[common], help="Two-source rate region curves (q=2)")
    reg.add_argument("--step", type=float, default=S, help="Sampling step on R0 (default 0.01)")
    reg.add_argument("--png", type=Path, default=S, help="Also draw the curves into this PNG")

    tree = sub.add_parser("tree", parents=[common], help="Multicast capacity of a broadcast tree")
    tree.add_argument("--tree", dest="tree_path", type=Path, default=S,
                      help="JSON tree ({'q':..,'edges':[[a,b],..]}); default: built-in wireless tree")
    tree.add_argument("--q", type=int, default=S, help="Alphabet size (default: the tree's, else 1)")

    bfly = sub.add_parser("butterfly", parents=[common], help="Network coding vs timing on the butterfly")
    bfly.add_argument("--q", type=int, default=S, help="Alphabet size (default 1, bit pipes)")

    sim = sub.add_parser("simulate", parents=[common], help="Run a timing code through the cascade")
    sim.add_argument("--code", choices=list(CODES), default=S, help="Built-in code (default table1)")
    sim.add_argument("--n", type=int, default=S, help="Block length (single_relay)")
    sim.add_argument("--n1", type=int, default=S, help="Relay transmissions per block (single_relay)")
    sim.add_argument("--q", type=int, default=S, help="Alphabet size (single_relay, default 2)")
    sim.add_argument("--blocks", type=int, default=S, help="Number of blocks B")
    sim.add_argument("--messages", type=int, nargs="+", default=S, help="Source messages w0, one per block")
    sim.add_argument("--seed", type=int, default=S, help="Seed for random messages")
    sim.add_argument("--exhaustive", action="store_true", default=S, help="Check every message sequence")
    sim.add_argument("--codebooks", action="store_true", default=S,
                     help="Export the code's codebooks instead of running it")
    sim.add_argument("--sequence-cap", dest="sequence_cap", type=int, default=S,
                     help="Stop exhaustive checks after this many sequences")

    cnt = sub.add_parser("counting", parents=[common], help="Largest message sets for a finite block length")
    cnt.add_argument("--m", dest="m_list", type=int, nargs="+", default=S, help="Cascade lengths m")
    cnt.add_argument("--q", dest="q_list", type=int, nargs="+", default=S, help="Alphabet sizes")
    cnt.add_argument("--n", type=int, default=S, help="Block length (required)")
    cnt.add_argument("--n1", type=int, default=S, help="Fix the relay budget (m=2 only)")

    sr = sub.add_parser("single-relay", parents=[common], help="Single relay fixed point")
    sr.add_argument("--q", dest="q_list", type=int, nargs="+", default=S, help="Alphabet sizes")
    sr.add_argument("--no-silence-detection", dest="no_silence_detection", action="store_true", default=S,
                    help="Source may not stay quiet while the relay listens")

    app = sub.add_parser("appendix", parents=[common], help="Numerical checks of the infinite-cascade limit")
    app.add_argument("--q-max", dest="q_max", type=int, default=S, help="Largest q to check (default 100)")

    return p


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "preset", "verbose")}
    config = RunConfig(command=args.command)
    if args.config:
        config = load_run_config(args.config, config)
    if args.preset:
        try:
            config = apply_preset(args.preset, config)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    if config.command != args.command:
        raise ConfigError(f"configuration is for {config.command!r}, command line asks for {args.command!r}")
    return config.updated(overrides).validate()


def cmd_capacity(config: RunConfig) -> Outcome:
    rows, summary = process_sweep(
        config.m_list,
        config.q_list,
        tol=config.tol,
        progress_callback=lambda i, n: logger.info("solving %d/%d", i, n),
    )
    _say("\n=== Capacity Sweep ===")
    _say("Pairs  :", summary.total)
    _say("Solved :", summary.solved)
    _say("Failed :", summary.failed)
    for r in rows:
        if not r.solved:
            _say(f"  m={r.m} q={r.q}: {r.error}")
    return build_capacity_table(rows, summary), summary.complete


def cmd_region(config: RunConfig) -> Outcome:
    curves = two_source_region_curves(config.step)
    if config.png:
        save_region_png(curves, config.png)
        _say("PNG written:", config.png)
    return build_region_table(curves), True


def cmd_tree(config: RunConfig) -> Outcome:
    if config.tree_path:
        tree = load_tree(config.tree_path)
        if config.q is not None:
            tree = tree.__class__(graph=tree.graph, q=config.q)
    else:
        tree = wireless_tree(q=config.q or 1)
    result = tree_multicast_capacity(tree, tol=config.tol)
    _say(f"Longest path {' -> '.join(str(v) for v in result.path)}: {result.depth - 1} relay(s)")
    return build_tree_table(result), True


def cmd_butterfly(config: RunConfig) -> Outcome:
    report = butterfly_report(q=config.q or 1, tol=config.tol)
    _say(f"Network coding: {report.nc_pairs_ok}/{report.nc_pairs_total} bit pairs decoded at both sinks")
    for note in report.notes:
        _say("Note:", note)
    return build_butterfly_table(report), report.nc_verified


def _build_code(config: RunConfig) -> TimingCode:
    if config.code == "table1":
        return SingleRelayCode(4, 1, 2)
    if config.code == "table2":
        return TwoSourceCode()
    if config.n is None or config.n1 is None:
        raise ConfigError("single_relay needs n and n1")
    return SingleRelayCode(config.n, config.n1, 2 if config.q is None else config.q)


def cmd_simulate(config: RunConfig) -> Outcome:
    code = _build_code(config)
    if config.codebooks:
        books = code.codebooks()
        _say(format_codebooks(books))
        return build_codebook_table(books), True
    if config.exhaustive:
        summary = verify_exhaustive(code, config.blocks, cap=config.sequence_cap)
        _say("\n=== Exhaustive Check ===")
        _say("Code       :", code.name)
        _say("Sequences  :", summary.sequences, "(capped)" if summary.truncated else "")
        _say("Errors     :", summary.decode_errors)
        _say("Collisions :", summary.collisions)
        return build_verification_table(code.name, config.blocks, summary), summary.passed

    rng = np.random.default_rng(config.seed)
    messages: dict[int, list[int]] = {}
    for v, size in zip(code.spec.sources, code.sizes):
        if v == 0 and config.messages is not None:
            messages[v] = list(config.messages)
        else:
            messages[v] = [int(w) for w in rng.integers(0, size, config.blocks)]
    result = run_pipeline(code, messages, config.blocks)
    _say(f"{code.name}: {len(result.sink_decodes)} block(s) decoded at the sink, no errors")
    return build_transcript_table(result), True


def cmd_counting(config: RunConfig) -> Outcome:
    n = config.n
    if n is None:
        raise ConfigError("counting needs n")
    records = []
    for q in config.q_list:
        for m in config.m_list:
            if config.n1 is not None:
                if m != 2:
                    raise ConfigError("a fixed n1 only applies to m=2")
                bv = BudgetVector(n=n, budgets=(config.n1,))
                size = max_w0(bv, q)
            else:
                bv, size = optimal_budgets(m, n, q)
            records.append({"m": m, "q": q, "n": n, "budgets": bv.budgets, "max_w0": size,
                            "rate": math.log2(size) / n})
    return build_counting_table(records), True


def cmd_single_relay(config: RunConfig) -> Outcome:
    records = []
    for q in config.q_list:
        r = capacity_single_relay(q, no_silence_detection=config.no_silence_detection)
        records.append({"q": q, "no_silence_detection": config.no_silence_detection,
                        "capacity": r.value, "p1": r.profile.listen(1)})
    return build_single_relay_table(records), True


def cmd_appendix(config: RunConfig) -> Outcome:
    report = appendix_checks(config.q_max, m_values=config.m_list, tol=config.tol)
    _say(f"Appendix checks: {len(report.outcomes) - len(report.failures)}/{len(report.outcomes)} passed")
    for o in report.failures:
        _say(f"  FAILED {o.name} q={o.q} m={o.m}: {o.detail}")
    return build_appendix_table(report), report.passed


COMMAND_HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "capacity": cmd_capacity,
    "region": cmd_region,
    "tree": cmd_tree,
    "butterfly": cmd_butterfly,
    "simulate": cmd_simulate,
    "counting": cmd_counting,
    "single-relay": cmd_single_relay,
    "appendix": cmd_appendix,
}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = _resolve_config(args)
        table, ok = COMMAND_HANDLERS[config.command](config)
        if config.out:
            save_table(table, config.output_format, config.out)
            _say("Report written:", config.out)
        else:
            write_table(table, config.output_format, sys.stdout)
    except CascadeError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    return 0 if ok else 1
