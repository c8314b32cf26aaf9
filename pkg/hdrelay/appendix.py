from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .capacity import capacity_infinite, first_hop_at_stationary, solve_capacity

logger = logging.getLogger(__name__)

DEFAULT_M_VALUES = (2, 3, 4, 5, 11, 21, 41, 101)
LIMIT_GAP = 1e-3
SLACK = 1e-12


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    q: int
    m: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "q": self.q, "m": self.m, "detail": self.detail}


@dataclass(frozen=True)
class AppendixReport:
    outcomes: tuple[CheckOutcome, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def failures(self) -> tuple[CheckOutcome, ...]:
        return tuple(o for o in self.outcomes if not o.passed)


def stationary_inequality(q: int) -> tuple[float, float]:
    """
    Both sides of (q+1)^{p*} >= (1 + sqrt(4q+1))/2, i.e. the first hop at the stationary
    listen fraction is no bottleneck.
    """
    return 2.0 ** first_hop_at_stationary(q), (1.0 + math.sqrt(4 * q + 1)) / 2.0


def appendix_checks(q_max: int, m_values: Sequence[int] = DEFAULT_M_VALUES, tol: float = 1e-9) -> AppendixReport:
    """
    Numerical counterparts of the infinite-cascade argument:

    monotone   C_{m-1}(q) is non-increasing along m_values
    last_hop   the last relay's listen fraction settles: |p_{m-1}(m) - p_m(m+1)| < 1e-3 at the largest m
    stationary the first hop never limits the stationary profile (q = 1..q_max)
    limit      |C_{m-1}(q) - C_inf(q)| < 1e-3 at the largest m
    """
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    ms = sorted(set(int(m) for m in m_values))
    outcomes: list[CheckOutcome] = []

    for q in range(1, q_max + 1):
        results = {m: solve_capacity(m, q, tol=tol) for m in ms}
        values = [results[m].value for m in ms]
        for (m_a, c_a), (m_b, c_b) in zip(zip(ms, values), zip(ms[1:], values[1:])):
            ok = c_b <= c_a + SLACK
            outcomes.append(CheckOutcome("monotone", ok, q, m_b, f"C({m_a})={c_a:.6f} C({m_b})={c_b:.6f}"))

        m_last = ms[-1]
        if m_last >= 2:
            here = results[m_last].profile
            there = solve_capacity(m_last + 1, q, tol=tol).profile
            diff = abs(here.listen(m_last - 1) - there.listen(m_last))
            outcomes.append(CheckOutcome("last_hop", diff < LIMIT_GAP, q, m_last, f"|dp|={diff:.2e}"))

        gap = abs(values[-1] - capacity_infinite(q))
        outcomes.append(CheckOutcome("limit", gap < LIMIT_GAP, q, m_last, f"gap={gap:.2e}"))

    for q in range(1, q_max + 1):
        lhs, rhs = stationary_inequality(q)
        outcomes.append(CheckOutcome("stationary", lhs >= rhs - SLACK, q, None, f"{lhs:.6f} >= {rhs:.6f}"))

    report = AppendixReport(outcomes=tuple(outcomes))
    for o in report.failures:
        logger.warning("appendix check %s failed for q=%d m=%s: %s", o.name, o.q, o.m, o.detail)
    return report
