from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class CapacityRow:
    """
    One (m, q) entry of a capacity sweep.

    capacity is None when the solver failed; `error` then says why.
    """
    m: int
    q: int
    capacity: Optional[float]
    time_sharing_rate: float
    capacity_infinite: float
    profile: tuple[float, ...] = ()
    residual: Optional[float] = None
    iterations: int = 0
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.capacity is not None

    @property
    def gap_to_infinite(self) -> Optional[float]:
        if self.capacity is None:
            return None
        return self.capacity - self.capacity_infinite
