from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.stats import entropy

from .entropy import PROFILE_SLACK, h_first_hop, h_hop, h_source_only
from .errors import (
    BracketError,
    ConvergenceError,
    InvalidProfileError,
    UnsupportedInstanceError,
)

logger = logging.getLogger(__name__)

# Bisection tolerance on the rate C, and the inner tolerance on listen fractions.
DEFAULT_TOL = 1e-9
ROOT_TOL = 1e-12
MAX_ITER = 200


@dataclass(frozen=True)
class ListenProfile:
    """
    Listen fractions (p_1, ..., p_m), p_i = Pr{X_i = N}. The sink always listens,
    so p_m = 1. Neighbours cannot both transmit: p_i + p_{i+1} >= 1.
    """

    p: tuple[float, ...]
    q: int

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.p)
        if not p:
            raise InvalidProfileError("a profile has at least the sink entry p_m = 1")
        if self.q < 1:
            raise InvalidProfileError(f"q must be >= 1, got {self.q}")
        if abs(p[-1] - 1.0) > PROFILE_SLACK:
            raise InvalidProfileError(f"the sink always listens: p_m must be 1, got {p[-1]}")
        for i, v in enumerate(p, start=1):
            if not -PROFILE_SLACK <= v <= 1.0 + PROFILE_SLACK:
                raise InvalidProfileError(f"p_{i}={v} outside [0, 1]")
        for i in range(len(p) - 1):
            if p[i] + p[i + 1] < 1.0 - PROFILE_SLACK:
                raise InvalidProfileError(
                    f"p_{i + 1} + p_{i + 2} = {p[i] + p[i + 1]} < 1 (adjacent relays would collide)"
                )
        p = tuple(min(1.0, max(0.0, v)) for v in p[:-1]) + (1.0,)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_relays(cls, relay_p: Sequence[float], q: int) -> "ListenProfile":
        return cls(p=tuple(relay_p) + (1.0,), q=q)

    @property
    def m(self) -> int:
        return len(self.p)

    def listen(self, i: int) -> float:
        """p_i for 1 <= i <= m."""
        return self.p[i - 1]

    def transmit(self, i: int) -> float:
        """1 - p_i; node 0 and the sink are not relays, transmit(m) = 0."""
        return 1.0 - self.p[i - 1]

    def hop_entropies(self) -> tuple[float, ...]:
        """(H(Y_1|X_1), ..., H(Y_m|X_m)) under the optimal pair pmfs."""
        hs = [h_first_hop(self.p[0], self.q)]
        for i in range(1, self.m):
            hs.append(h_hop(self.p[i - 1], self.p[i], self.q))
        return tuple(hs)

    def to_dict(self) -> dict:
        return {"q": self.q, "p": list(self.p)}


@dataclass(frozen=True, eq=False)
class PairPmf:
    """
    Joint pmf of (X_{i-1}, X_i). Rows index X_{i-1}, columns X_i; index k < q is the
    transmission k and index q is N.
    """

    matrix: np.ndarray
    index: int
    q: int

    @property
    def quiet(self) -> int:
        return self.q

    def prev_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def self_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def listen_probability(self) -> float:
        """Pr{X_i = N}."""
        return float(self.matrix[:, self.quiet].sum())

    def conditional_output_entropy(self) -> float:
        """H(Y_i|X_i), summed over the whole (q+1)^2 table."""
        size = self.q + 1
        joint = np.zeros((size, size))  # (y, x_i)
        for a in range(size):
            for b in range(size):
                y = a if b == self.quiet else b
                joint[y, b] += self.matrix[a, b]
        x_marg = joint.sum(axis=0)
        return float(entropy(joint.ravel(), base=2) - entropy(x_marg, base=2))

    def permuted(self, perm: Sequence[int]) -> "PairPmf":
        """Relabel the q transmission symbols on both axes; N stays in place."""
        order = list(perm) + [self.quiet]
        if sorted(order[:-1]) != list(range(self.q)):
            raise ValueError(f"not a permutation of 0..{self.q - 1}: {perm}")
        return PairPmf(matrix=self.matrix[np.ix_(order, order)], index=self.index, q=self.q)


def pair_pmf(profile: ListenProfile, i: int) -> PairPmf:
    """Optimal p_{X_{i-1} X_i}: the first-hop layout for i = 1, the relay layout otherwise."""
    q = profile.q
    if not 1 <= i <= profile.m:
        raise InvalidProfileError(f"hop index {i} outside 1..{profile.m}")
    N = q
    mat = np.zeros((q + 1, q + 1))
    p_i = profile.listen(i)
    mat[N, :q] = (1.0 - p_i) / q
    if i == 1:
        mat[:, N] = p_i / (q + 1)
    else:
        tx_prev = profile.transmit(i - 1)
        mat[:q, N] = tx_prev / q
        nn = p_i - tx_prev
        if nn < -PROFILE_SLACK:
            raise InvalidProfileError(f"negative (N,N) mass {nn} at hop {i}")
        mat[N, N] = max(0.0, nn)
    return PairPmf(matrix=mat, index=i, q=q)


@dataclass(frozen=True)
class CapacityResult:
    value: float
    profile: ListenProfile
    residual: float
    iterations: int

    def hop_gap(self) -> float:
        """max_i |H(Y_i|X_i) - value| at the returned profile."""
        return max(abs(h - self.value) for h in self.profile.hop_entropies())

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "profile": list(self.profile.p),
            "residual": self.residual,
            "iterations": self.iterations,
        }


def _propagate(rate: float, m: int, q: int, root_tol: float) -> Optional[list[float]]:
    """
    Listen fractions p_1..p_{m-1} making every hop but the last carry exactly `rate`.
    Returns None when some relay would have to listen more than all the time.
    """
    p = [min(1.0, rate / math.log2(q + 1))]
    for _ in range(1, m - 1):
        p_i = p[-1]
        lo = 1.0 - p_i

        def f(x: float, p_i: float = p_i) -> float:
            return h_hop(p_i, x, q) - rate

        if f(lo) >= 0.0:
            # hop i carries more than `rate` even at the smallest allowed listen fraction
            level = logging.WARNING if rate > 0.0 else logging.DEBUG
            logger.log(level, "hop %d exceeds rate %.6g by %.3g at p_%d = 1 - p_%d; profile is not equal-rate",
                       len(p) + 1, rate, f(lo), len(p) + 1, len(p))
            p.append(lo)
            continue
        if f(1.0) < 0.0:
            return None
        p.append(brentq(f, lo, 1.0, xtol=root_tol))
    return p


def _residual(rate: float, m: int, q: int, root_tol: float) -> tuple[float, Optional[list[float]]]:
    p = _propagate(rate, m, q, root_tol)
    if p is None:
        return -math.inf, None
    return h_hop(p[-1], 1.0, q) - rate, p


def solve_capacity(m: int, q: int, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER,
                   root_tol: float = ROOT_TOL) -> CapacityResult:
    """
    C_{m-1}(q) = max over profiles of min_i H(Y_i|X_i).

    Bisection on the candidate rate C: the first hop fixes p_1 = C/log2(q+1), each
    following hop is solved for the next listen fraction, and the last hop's surplus
    g(C) = H(Y_m|X_m) - C decides the direction. Stops once |g(C)| <= tol.
    """
    if m < 1 or q < 1:
        raise ValueError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    top = math.log2(q + 1)
    if m == 1:
        return CapacityResult(value=top, profile=ListenProfile(p=(1.0,), q=q), residual=0.0, iterations=0)

    g_lo, p_lo = _residual(0.0, m, q, root_tol)
    g_hi, _ = _residual(top, m, q, root_tol)
    if g_lo < 0.0 or g_hi > 0.0:
        raise BracketError(f"residual does not bracket a root for m={m}, q={q}: g(0)={g_lo}, g(top)={g_hi}")
    logger.debug("solve_capacity m=%d q=%d bracket g(0)=%.6g g(%.6g)=%.6g", m, q, g_lo, top, g_hi)

    lo, hi = 0.0, top
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        g, p = _residual(mid, m, q, root_tol)
        if p is not None and abs(g) <= tol:
            logger.debug("solve_capacity m=%d q=%d converged C=%.12f after %d steps (residual %.3g)",
                         m, q, mid, it, abs(g))
            return CapacityResult(
                value=mid,
                profile=ListenProfile.from_relays(p, q),
                residual=abs(g),
                iterations=it,
            )
        if g > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * top:
            break
    raise ConvergenceError(
        f"no rate with |g(C)| <= {tol} found for m={m}, q={q} (bracket [{lo}, {hi}]); tolerance too tight?"
    )


def capacity_single_relay(q: int, no_silence_detection: bool = False) -> CapacityResult:
    """
    Single relay fixed point p log2(q+1) = H(X_1). With no_silence_detection the
    source never idles while the relay listens, so the left side becomes p log2 q.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if no_silence_detection and q == 1:
        raise UnsupportedInstanceError("without silence detection a unary source carries nothing (q=1)")
    left: Callable[[float, int], float] = h_source_only if no_silence_detection else h_first_hop

    def f(p: float) -> float:
        return left(p, q) - h_hop(p, 1.0, q)

    # H(X_1) peaks at p = 1/(q+1); the non-trivial crossing lies to its right.
    p, info = brentq(f, 1.0 / (q + 1), 1.0, xtol=ROOT_TOL, full_output=True)
    if not info.converged:
        raise ConvergenceError(f"single relay fixed point did not converge for q={q}")
    return CapacityResult(
        value=left(p, q),
        profile=ListenProfile(p=(p, 1.0), q=q),
        residual=abs(f(p)),
        iterations=info.iterations,
    )


@lru_cache(maxsize=None)
def single_relay_value(q: int) -> float:
    return capacity_single_relay(q).value


def capacity_infinite(q: int) -> float:
    """C_inf(q) = log2((1 + sqrt(4q+1)) / 2)."""
    return math.log2((1.0 + math.sqrt(4 * q + 1)) / 2.0)


def listen_fraction_infinite(q: int) -> float:
    """p* = (1 + 1/sqrt(4q+1)) / 2, the listen fraction that attains C_inf(q)."""
    return 0.5 * (1.0 + 1.0 / math.sqrt(4 * q + 1))


def duty_cycle_infinite(q: int) -> float:
    """Percentage of time each relay transmits in the infinite cascade."""
    return 50.0 * (1.0 - 1.0 / math.sqrt(4 * q + 1))


def first_hop_at_stationary(q: int) -> float:
    """H(X_0|X_1) evaluated at p*."""
    return h_first_hop(listen_fraction_infinite(q), q)


def time_sharing_rate(q: int) -> float:
    """Best rate of a fixed transmit/listen schedule: log2 sqrt(q+1)."""
    return math.log2(math.sqrt(q + 1))
