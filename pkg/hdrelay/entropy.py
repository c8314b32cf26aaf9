from __future__ import annotations

import math

import numpy as np
from scipy.special import entr

from .errors import DomainError

LN2 = math.log(2.0)

# Rounding slack accepted at the edges of [0, 1].
EDGE_SLACK = 1e-15
# Slack on the pair-pmf constraint p_next >= 1 - p_i.
PROFILE_SLACK = 1e-12


def binary_entropy(x):
    """H2(x) in bits, with 0*log 0 = 0. Works on scalars and arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -EDGE_SLACK) or np.any(arr > 1.0 + EDGE_SLACK):
        raise DomainError(f"binary entropy argument outside [0, 1]: {x}")
    arr = np.clip(arr, 0.0, 1.0)
    h = (entr(arr) + entr(1.0 - arr)) / LN2
    if h.ndim == 0:
        return float(h)
    return h


def h_first_hop(p_1: float, q: int) -> float:
    """H(Y_1|X_1) = p_1 log2(q+1)."""
    if not -EDGE_SLACK <= p_1 <= 1.0 + EDGE_SLACK:
        raise DomainError(f"p_1 must lie in [0, 1], got {p_1}")
    return p_1 * math.log2(q + 1)


def h_hop(p_i: float, p_next: float, q: int) -> float:
    """
    H(Y_{i+1}|X_{i+1}) = (1-p_i) log2 q + p_{i+1} H2((1-p_i)/p_{i+1}).

    Requires p_next >= 1 - p_i (the (N,N) entry of the pair pmf is non-negative).
    """
    tx = 1.0 - p_i
    if p_next < tx - PROFILE_SLACK:
        raise DomainError(f"p_next={p_next} < 1 - p_i={tx}")
    if tx <= 0.0:
        return 0.0
    ratio = min(1.0, tx / p_next)
    return tx * math.log2(q) + p_next * binary_entropy(ratio)


def h_stationary(p: float, q: int) -> float:
    """
    Per-hop entropy when two neighbouring relays share the listen fraction p,
    -(1-p) log((1-p)/(qp)) - (2p-1) log((2p-1)/p), defined for p in [1/2, 1].
    """
    if not 0.5 - PROFILE_SLACK <= p <= 1.0 + EDGE_SLACK:
        raise DomainError(f"stationary listen fraction must lie in [1/2, 1], got {p}")
    return h_hop(p, p, q)


def h_source_only(p_1: float, q: int) -> float:
    """H(Y_1|X_1) when the source never idles while relay 1 listens: p_1 log2 q."""
    return p_1 * math.log2(q)
