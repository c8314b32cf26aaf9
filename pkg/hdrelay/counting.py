from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy.special import comb

from .capacity import ListenProfile, solve_capacity
from .entropy import h_first_hop, h_hop
from .errors import BudgetError, DomainError, InvalidProfileError
from .model import CascadeSpec

logger = logging.getLogger(__name__)

# Above this many budget vectors, optimal_budgets rounds the continuous optimum instead.
EXHAUSTIVE_CAP = 200_000


def binom(n: int, k: int) -> int:
    return int(comb(n, k, exact=True))


@dataclass(frozen=True)
class BudgetVector:
    """
    Block length n and transmit-symbol counts (n_1, ..., n_{m-1}) of the relays.
    The sink never transmits (n_m = 0).
    """

    n: int
    budgets: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        b = tuple(int(v) for v in self.budgets)
        object.__setattr__(self, "budgets", b)
        if self.n < 1:
            raise BudgetError(f"block length must be >= 1, got {self.n}")
        for i, v in enumerate(b, start=1):
            if not 0 <= v < self.n:
                raise BudgetError(f"n_{i}={v} outside [0, {self.n})")
        for i in range(len(b) - 1):
            if b[i] + b[i + 1] > self.n:
                raise BudgetError(f"n_{i + 1} + n_{i + 2} = {b[i] + b[i + 1]} exceeds n = {self.n}")

    @property
    def m(self) -> int:
        return len(self.budgets) + 1

    def budget(self, i: int) -> int:
        """n_i for 1 <= i <= m; n_m = 0."""
        if i == self.m:
            return 0
        if not 1 <= i < self.m:
            raise BudgetError(f"relay index {i} outside 1..{self.m - 1}")
        return self.budgets[i - 1]


@dataclass(frozen=True)
class MessageSetSizes:
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s < 1 for s in self.sizes):
            raise BudgetError(f"message sets must be non-empty: {self.sizes}")

    def rates(self, n: int) -> tuple[float, ...]:
        return tuple(math.log2(s) / n for s in self.sizes)


def sequences_available(i: int, bv: BudgetVector, q: int) -> int:
    """q^{n_i} * C(n - n_{i+1}, n_i): distinct words relay i can emit."""
    if not 1 <= i <= bv.m - 1:
        raise BudgetError(f"relay index {i} outside 1..{bv.m - 1}")
    n_i = bv.budget(i)
    return q ** n_i * binom(bv.n - bv.budget(i + 1), n_i)


def max_w0(bv: BudgetVector, q: int) -> int:
    """Largest source message set: the bottleneck among the source and every relay."""
    first = bv.budget(1) if bv.m > 1 else 0
    candidates = [(q + 1) ** (bv.n - first)]
    candidates.extend(sequences_available(i, bv, q) for i in range(1, bv.m))
    return min(candidates)


def max_w_relay(v: int, prior_sizes: MessageSetSizes, bv: BudgetVector, q: int) -> int:
    """
    Largest own message set of relay source v given the upstream sets
    |W_0|, ..., |W_{alpha(v)-1}|. When upstream traffic is present the relay's slot
    pattern is fixed by it, which caps the set at q^{n_v}. The floor and the cap both apply.
    """
    if not 1 <= v <= bv.m - 1:
        raise BudgetError(f"relay source {v} outside 1..{bv.m - 1}")
    prior = math.prod(prior_sizes.sizes)
    if prior < 1:
        raise BudgetError("upstream message sets multiply to zero")
    bottleneck = min(sequences_available(i, bv, q) for i in range(v, bv.m))
    size = bottleneck // prior
    if prior > 1:
        size = min(size, q ** bv.budget(v))
    return size


def message_set_sizes(spec: CascadeSpec, bv: BudgetVector) -> MessageSetSizes:
    """Greedy |W_0|, |W_1|, ... along the sources, each as large as the earlier ones allow."""
    if spec.m != bv.m:
        raise BudgetError(f"budget vector is for m={bv.m}, cascade has m={spec.m}")
    sizes = [max_w0(bv, spec.q)]
    for v in spec.sources[1:]:
        sizes.append(max_w_relay(v, MessageSetSizes(tuple(sizes)), bv, spec.q))
    return MessageSetSizes(tuple(sizes))


def binom_entropy_limit(n: int, k: int) -> float:
    """n^{-1} log2 C(n, k); tends to H2(k/n) as n grows with k/n fixed."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"need n >= 1 and 0 <= k <= n, got n={n}, k={k}")
    return math.log2(binom(n, k)) / n


def counting_rate(bv: BudgetVector, q: int) -> float:
    return math.log2(max_w0(bv, q)) / bv.n


@dataclass(frozen=True)
class RateBounds:
    """Asymptotic right-hand sides per source: sum-rate bound and (relay sources) own-rate cap."""

    sources: tuple[int, ...]
    sum_bounds: tuple[float, ...]
    caps: tuple[Optional[float], ...]


def asymptotic_rate_bounds(profile: ListenProfile, sources: Sequence[int] = (0,)) -> RateBounds:
    """
    Counting bounds for n -> infinity: the source term p_1 log2(q+1) and the relay terms
    (1-p_i) log2 q + p_{i+1} H2((1-p_i)/p_{i+1}).
    """
    q = profile.q
    m = profile.m
    relay_terms = []
    for i in range(1, m):
        try:
            relay_terms.append(h_hop(profile.listen(i), profile.listen(i + 1), q))
        except DomainError as e:
            raise InvalidProfileError(str(e)) from e
    spec = CascadeSpec(m=m, q=q, sources=tuple(sources))
    sums: list[float] = []
    caps: list[Optional[float]] = []
    for v in spec.sources:
        terms = relay_terms[v - 1:] if v > 0 else relay_terms
        if v == 0:
            terms = [h_first_hop(profile.listen(1), q)] + list(terms)
        sums.append(min(terms) if terms else math.inf)
        caps.append(None if v == 0 else profile.transmit(v) * math.log2(q))
    return RateBounds(sources=spec.sources, sum_bounds=tuple(sums), caps=tuple(caps))


def _repair(budgets: list[int], n: int) -> list[int]:
    for i in range(len(budgets) - 1):
        over = budgets[i] + budgets[i + 1] - n
        if over > 0:
            budgets[i + 1] -= over
    return [max(0, min(n - 1, b)) for b in budgets]


def optimal_budgets(m: int, n: int, q: int, exhaustive_cap: int = EXHAUSTIVE_CAP) -> tuple[BudgetVector, int]:
    """
    Budget vector maximizing |W_0| for block length n. Ties go to the larger |W_0|,
    then to the lexicographically smaller budgets.
    """
    if m < 1 or n < 1 or q < 1:
        raise ValueError(f"need m, n, q >= 1, got m={m}, n={n}, q={q}")
    if m == 1:
        bv = BudgetVector(n=n)
        return bv, max_w0(bv, q)

    relays = m - 1
    if n ** relays <= exhaustive_cap:
        best: Optional[tuple[int, tuple[int, ...]]] = None
        for combo in itertools.product(range(n), repeat=relays):
            if any(combo[i] + combo[i + 1] > n for i in range(relays - 1)):
                continue
            size = max_w0(BudgetVector(n=n, budgets=combo), q)
            key = (-size, combo)
            if best is None or key < best:
                best = key
        assert best is not None
        return BudgetVector(n=n, budgets=best[1]), -best[0]

    logger.debug("optimal_budgets m=%d n=%d: %d vectors, rounding the continuous optimum", m, n, n ** relays)
    profile = solve_capacity(m, q).profile
    rounded = _repair([round((1.0 - profile.listen(i)) * n) for i in range(1, m)], n)
    bv = BudgetVector(n=n, budgets=tuple(rounded))
    return bv, max_w0(bv, q)


def optimal_finite_rate(m: int, n: int, q: int) -> float:
    bv, size = optimal_budgets(m, n, q)
    return math.log2(size) / n
