from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence, TextIO

from .appendix import AppendixReport
from .batch import SweepSummary
from .codec import Codebook
from .networks import ButterflyReport, TreeResult
from .pipeline import PipelineResult, VerificationSummary
from .region import RegionCurves
from .results import CapacityRow


@dataclass(frozen=True)
class Table:
    """
    A report in two shapes: flat CSV rows (already formatted) and a JSON document.

    With `lines` set, the JSON form is written as one object per line.
    """
    fieldnames: tuple[str, ...]
    rows: List[dict]
    data: Any
    lines: bool = False
    summary: dict = field(default_factory=dict)


def _f4(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.4f}"


def _f6(x: float) -> str:
    return f"{x:.6f}"


def build_capacity_table(rows: Sequence[CapacityRow], summary: SweepSummary) -> Table:
    fieldnames = ("m", "q", "capacity", "time_sharing_rate", "capacity_infinite")
    flat = [
        {
            "m": r.m,
            "q": r.q,
            "capacity": _f4(r.capacity),
            "time_sharing_rate": _f4(r.time_sharing_rate),
            "capacity_infinite": _f4(r.capacity_infinite),
        }
        for r in rows
    ]
    data = {
        "summary": {"total": summary.total, "solved": summary.solved, "failed": summary.failed},
        "rows": [
            {
                "m": r.m,
                "q": r.q,
                "capacity": r.capacity,
                "time_sharing_rate": r.time_sharing_rate,
                "capacity_infinite": r.capacity_infinite,
                "profile": list(r.profile),
                "residual": r.residual,
                "iterations": r.iterations,
                "error": r.error,
            }
            for r in rows
        ],
    }
    return Table(fieldnames=fieldnames, rows=flat, data=data, summary=data["summary"])


def build_region_table(curves: RegionCurves) -> Table:
    tagged = curves.tagged() + [("star", *curves.star), ("circle", *curves.circle)]
    flat = [{"region_tag": tag, "R0": _f6(a), "R1": _f6(b)} for tag, a, b in tagged]
    data = {
        "cutset": [list(p) for p in curves.cutset],
        "achievable": [list(p) for p in curves.achievable],
        "achievable_point": list(curves.star),
        "timing": [list(p) for p in curves.timing],
        "star": list(curves.star),
        "circle": list(curves.circle),
    }
    return Table(fieldnames=("region_tag", "R0", "R1"), rows=flat, data=data)


def build_tree_table(result: TreeResult) -> Table:
    flat = [{"depth": result.depth, "relays": result.depth - 1, "q": result.q, "capacity": _f4(result.capacity)}]
    return Table(fieldnames=("depth", "relays", "q", "capacity"), rows=flat, data=result.to_dict())


def build_butterfly_table(report: ButterflyReport) -> Table:
    flat = [
        {"quantity": "nc_rate", "value": _f4(report.nc_rate)},
        {"quantity": "nc_pairs_ok", "value": f"{report.nc_pairs_ok}/{report.nc_pairs_total}"},
        {"quantity": "per_path_rate", "value": _f4(report.per_path_rate)},
        {"quantity": "timing_rate", "value": _f4(report.timing_rate)},
        {"quantity": "unused_links", "value": " ".join(f"{a}-{b}" for a, b in report.unused_links)},
    ]
    return Table(fieldnames=("quantity", "value"), rows=flat, data=report.to_dict())


def _decoded_text(decoded: Optional[dict]) -> str:
    if not decoded:
        return ""
    return " ".join(f"{k}={v}" for k, v in sorted(decoded.items()))


def build_transcript_table(result: PipelineResult) -> Table:
    records = [e.to_dict() for e in result.transcript]
    flat = [
        {"block": e.block, "node": e.node, "word": str(e.word), "decoded": _decoded_text(e.decoded)}
        for e in result.transcript
    ]
    return Table(fieldnames=("block", "node", "word", "decoded"), rows=flat, data=records, lines=True)


def build_codebook_table(codebooks: Sequence[Codebook]) -> Table:
    records = [
        {"node": cb.node, "context": e.context, "message": e.message, "word": e.word, "colors": list(e.colors)}
        for cb in codebooks
        for e in cb.entries
    ]
    flat = [{**r, "colors": " ".join(r["colors"])} for r in records]
    return Table(fieldnames=("node", "context", "message", "word", "colors"), rows=flat, data=records)


def build_verification_table(code_name: str, blocks: int, summary: VerificationSummary) -> Table:
    data = {"code": code_name, "blocks": blocks, **summary.to_dict()}
    return Table(fieldnames=tuple(data), rows=[dict(data)], data=data, summary=data)


def build_counting_table(records: Sequence[dict]) -> Table:
    fieldnames = ("m", "q", "n", "budgets", "max_w0", "rate")
    flat = [
        {
            "m": r["m"],
            "q": r["q"],
            "n": r["n"],
            "budgets": " ".join(str(b) for b in r["budgets"]),
            "max_w0": str(r["max_w0"]),
            "rate": _f4(r["rate"]),
        }
        for r in records
    ]
    # |W_0| can exceed any float; JSON keeps it as a decimal string
    data = [{**r, "budgets": list(r["budgets"]), "max_w0": str(r["max_w0"])} for r in records]
    return Table(fieldnames=fieldnames, rows=flat, data=data)


def build_single_relay_table(records: Sequence[dict]) -> Table:
    fieldnames = ("q", "no_silence_detection", "capacity", "p1")
    flat = [{**r, "capacity": _f4(r["capacity"]), "p1": _f4(r["p1"])} for r in records]
    return Table(fieldnames=fieldnames, rows=flat, data=list(records))


def build_appendix_table(report: AppendixReport) -> Table:
    records = [o.to_dict() for o in report.outcomes]
    flat = [{**r, "m": "" if r["m"] is None else r["m"]} for r in records]
    summary = {"passed": report.passed, "checks": len(records), "failures": len(report.failures)}
    return Table(fieldnames=("check", "passed", "q", "m", "detail"), rows=flat,
                 data={"summary": summary, "checks": records}, summary=summary)


def write_table(table: Table, fmt: str, stream: TextIO) -> None:
    if fmt == "csv":
        writer = csv.DictWriter(stream, fieldnames=list(table.fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in table.rows:
            writer.writerow(row)
        return
    if table.lines:
        for record in table.data:
            stream.write(json.dumps(record, ensure_ascii=False) + "\n")
        return
    json.dump(table.data, stream, indent=2, ensure_ascii=False)
    stream.write("\n")


def save_table(table: Table, fmt: str, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", encoding="utf-8", newline="") as f:
        write_table(table, fmt, f)
