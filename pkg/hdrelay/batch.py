from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

from .capacity import DEFAULT_TOL, capacity_infinite, solve_capacity, time_sharing_rate
from .errors import CascadeError
from .results import CapacityRow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSummary:
    total: int
    solved: int
    failed: int

    @property
    def complete(self) -> bool:
        return self.failed == 0 and self.solved == self.total


def iter_pairs(m_list: Sequence[int], q_list: Sequence[int]) -> Iterable[tuple[int, int]]:
    """(m, q) pairs, q-major like the published tables; duplicates dropped, order kept."""
    seen = set()
    for q in q_list:
        for m in m_list:
            if (m, q) in seen:
                continue
            seen.add((m, q))
            yield m, q


def solve_row(m: int, q: int, tol: float = DEFAULT_TOL) -> CapacityRow:
    ts = time_sharing_rate(q)
    inf = capacity_infinite(q)
    try:
        r = solve_capacity(m, q, tol=tol)
    except CascadeError as e:
        logger.warning("capacity sweep: m=%d q=%d failed: %s", m, q, e)
        return CapacityRow(m=m, q=q, capacity=None, time_sharing_rate=ts, capacity_infinite=inf,
                           error=f"{type(e).__name__}: {e}")
    return CapacityRow(
        m=m,
        q=q,
        capacity=r.value,
        time_sharing_rate=ts,
        capacity_infinite=inf,
        profile=r.profile.p,
        residual=r.residual,
        iterations=r.iterations,
    )


def process_sweep(
    m_list: Sequence[int],
    q_list: Sequence[int],
    tol: float = DEFAULT_TOL,
    progress_callback: Optional[Callable[[int, int], None]] = None,
    cancel_event: Optional[threading.Event] = None,
) -> tuple[List[CapacityRow], SweepSummary]:
    rows: List[CapacityRow] = []
    pairs = list(iter_pairs(m_list, q_list))
    total = len(pairs)

    for idx, (m, q) in enumerate(pairs, start=1):
        if cancel_event and cancel_event.is_set():
            logger.info("capacity sweep cancelled after %d of %d", idx - 1, total)
            break

        if progress_callback:
            progress_callback(idx, total)

        row = solve_row(m, q, tol)
        rows.append(row)
        logger.info("capacity sweep %d/%d: m=%d q=%d -> %s", idx, total, m, q,
                    f"{row.capacity:.6f}" if row.solved else "failed")

    solved = sum(1 for r in rows if r.solved)
    summary = SweepSummary(total=total, solved=solved, failed=len(rows) - solved)
    return rows, summary
