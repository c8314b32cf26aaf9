"""Half-duplex relay cascades: capacities, rate regions and timing codes."""

from .capacity import capacity_infinite, capacity_single_relay, solve_capacity
from .errors import CascadeError
from .model import QUIET, CascadeSpec, Word, simulate_cascade

__all__ = [
    "QUIET",
    "CascadeError",
    "CascadeSpec",
    "Word",
    "capacity_infinite",
    "capacity_single_relay",
    "simulate_cascade",
    "solve_capacity",
]
