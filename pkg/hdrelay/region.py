from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .capacity import ROOT_TOL, ListenProfile, single_relay_value
from .entropy import binary_entropy, h_hop
from .errors import (
    ConvergenceError,
    DomainError,
    EnumerationLimitError,
    InvalidSpecError,
    UnsupportedInstanceError,
)
from .model import CascadeSpec

logger = logging.getLogger(__name__)

RATE_TOL = 1e-9
PARETO_TOL = 1e-9
# Accepted overshoot of R_0 past C_1(2) on the explicit two-source boundary.
BOUNDARY_SLACK = 1e-4
DEFAULT_GRID_CAP = 250_000
MAX_SAMPLED_SOURCES = 3

LOG3 = math.log2(3.0)


@dataclass(frozen=True)
class RateVector:
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        r = tuple(float(v) for v in self.rates)
        if not r:
            raise InvalidSpecError("a rate vector has at least one entry")
        if any(v < 0 or math.isnan(v) for v in r):
            raise InvalidSpecError(f"rates must be >= 0, got {r}")
        object.__setattr__(self, "rates", r)

    def __len__(self) -> int:
        return len(self.rates)

    def __getitem__(self, k: int) -> float:
        return self.rates[k]


class RegionKind(enum.Enum):
    CUT_SET = "cutset"
    ACHIEVABLE_PART = "achievable"
    TIMING_REGION = "timing"


def _check_dimension(spec: CascadeSpec, rv: RateVector) -> None:
    if len(rv) != len(spec.sources):
        raise InvalidSpecError(f"rate vector has {len(rv)} entries, cascade has {len(spec.sources)} sources")


def _check_profile(spec: CascadeSpec, profile: ListenProfile) -> None:
    if profile.m != spec.m or profile.q != spec.q:
        raise InvalidSpecError(
            f"profile is for m={profile.m}, q={profile.q}; cascade has m={spec.m}, q={spec.q}"
        )


def is_two_source_instance(spec: CascadeSpec) -> bool:
    return spec.m == 2 and spec.q == 2 and spec.sources == (0, 1)


def sum_bounds(spec: CascadeSpec, profile: ListenProfile) -> tuple[float, ...]:
    """Per source v: min_{v+1 <= i <= m} H(Y_i|X_i)."""
    hops = profile.hop_entropies()
    return tuple(min(hops[v:]) for v in spec.sources)


def relay_caps(spec: CascadeSpec, profile: ListenProfile) -> tuple[float, ...]:
    """Per source v: (1 - p_v) log2 q; the source itself (v = 0) is uncapped."""
    return tuple(math.inf if v == 0 else profile.transmit(v) * math.log2(spec.q) for v in spec.sources)


def membership(spec: CascadeSpec, profile: Optional[ListenProfile], rv: RateVector, kind: RegionKind) -> bool:
    """
    Is rv inside the region at this profile?

    CUT_SET checks every prefix sum R_0 + ... + R_alpha(v) against its bound.
    ACHIEVABLE_PART also caps R_alpha(v) at (1-p_v) log2 q unless every upstream rate is
    exactly zero; the zero test is exact because rates are inputs, not computed values.
    TIMING_REGION is the hull over all profiles and exists only for the two-source
    instance (m=2, sources {0,1}, q=2); the profile is ignored there.
    """
    _check_dimension(spec, rv)
    if kind is RegionKind.TIMING_REGION:
        if not is_two_source_instance(spec):
            raise UnsupportedInstanceError("the timing region is only available for m=2, sources {0,1}, q=2")
        return timing_region_contains(rv)
    if profile is None:
        raise InvalidSpecError(f"{kind.value} membership needs a listen profile")
    _check_profile(spec, profile)

    bounds = sum_bounds(spec, profile)
    caps = relay_caps(spec, profile)
    prefix = 0.0
    for k in range(len(rv)):
        upstream = prefix
        prefix += rv[k]
        if prefix > bounds[k] + RATE_TOL:
            return False
        if kind is RegionKind.ACHIEVABLE_PART and k > 0 and upstream != 0.0 and rv[k] > caps[k] + RATE_TOL:
            return False
    return True


def _check_two_source_q(q: int) -> None:
    if q != 2:
        raise UnsupportedInstanceError(f"explicit two-source formulas exist for q=2 only, got q={q}")


def two_source_cutset_boundary(r0: float, q: int = 2) -> float:
    """Largest R_1 with (R_0, R_1) in the cut-set region of the two-source single-relay cascade."""
    _check_two_source_q(q)
    c1 = single_relay_value(2)
    if not 0.0 <= r0 <= c1 + BOUNDARY_SLACK:
        raise DomainError(f"R_0 must lie in [0, {c1:.4f}], got {r0}")
    if r0 <= LOG3 / 3.0:
        return LOG3 - r0
    x = min(1.0, r0 / LOG3)
    return max(0.0, binary_entropy(x) + 1.0 - x - r0)


@dataclass(frozen=True)
class Threshold:
    p1: float
    r0_min: float
    r1_max: float


def two_source_achievable_threshold(q: int = 2) -> Threshold:
    """Listen fraction where the relay's own-rate cap meets the cut-set boundary: p log2 3 = H2(p)."""
    _check_two_source_q(q)

    def f(p: float) -> float:
        return p * LOG3 - binary_entropy(p)

    p, info = brentq(f, 0.5, 1.0, xtol=ROOT_TOL, full_output=True)
    if not info.converged:
        raise ConvergenceError("two-source threshold did not converge")
    return Threshold(p1=p, r0_min=p * LOG3, r1_max=1.0 - p)


def timing_upper_boundary(r0: float) -> float:
    """Upper edge of the timing region: hull segment up to the threshold, then the cut-set curve."""
    th = two_source_achievable_threshold()
    if r0 <= th.r0_min:
        return LOG3 + (th.r1_max - LOG3) * r0 / th.r0_min
    return two_source_cutset_boundary(r0)


def achievable_part_contains(rv: RateVector) -> bool:
    """Membership in the union over profiles of the achievable part (two-source, q=2)."""
    if len(rv) != 2:
        raise InvalidSpecError(f"two-source rate vector expected, got {len(rv)} entries")
    r0, r1 = rv.rates
    if r0 == 0.0:
        return r1 <= LOG3 + RATE_TOL
    lo = r0 / LOG3
    if lo > 1.0 + RATE_TOL:
        return False
    lo = min(lo, 1.0)

    def best_r1(p: float) -> float:
        return min(1.0 - p, h_hop(p, 1.0, 2) - r0)

    candidates = [lo, 1.0]
    if lo < 1.0 / 3.0:
        candidates.append(1.0 / 3.0)
        res = minimize_scalar(lambda p: -best_r1(p), bounds=(lo, 1.0), method="bounded",
                              options={"xatol": 1e-12})
        candidates.append(float(res.x))
    return max(best_r1(p) for p in candidates) >= r1 - RATE_TOL


def timing_region_contains(rv: RateVector) -> bool:
    if len(rv) != 2:
        raise InvalidSpecError(f"two-source rate vector expected, got {len(rv)} entries")
    r0, r1 = rv.rates
    if r0 > single_relay_value(2) + RATE_TOL:
        return False
    return r1 <= timing_upper_boundary(min(r0, single_relay_value(2))) + RATE_TOL


Point = tuple[float, float]


@dataclass(frozen=True)
class RegionCurves:
    """
    `achievable` is the cut-set tail from the circle on; together with the isolated
    `star` it makes up the achievable part. `timing` adds the straight segment from the
    star down to the circle in front of that tail.
    """

    cutset: tuple[Point, ...]
    achievable: tuple[Point, ...]
    timing: tuple[Point, ...]
    star: Point
    circle: Point

    def tagged(self) -> list[tuple[str, float, float]]:
        rows = [("cutset", a, b) for a, b in self.cutset]
        rows += [("achievable", a, b) for a, b in self.achievable]
        rows.append(("achievable_point", *self.star))
        rows += [("timing", a, b) for a, b in self.timing]
        return rows


def _grid(lo: float, hi: float, step: float) -> list[float]:
    pts = list(np.arange(lo, hi, step))
    if not pts or hi - pts[-1] > 1e-12:
        pts.append(hi)
    return [float(x) for x in pts]


def two_source_region_curves(step: float = 0.01) -> RegionCurves:
    """
    Sampled boundaries of the cut-set region, the achievable part (the cut-set curve past
    the threshold plus the isolated point (0, log2 3)) and the timing region (the
    achievable part joined to that point by a straight segment).
    """
    if not 0.0 < step <= 0.1:
        raise DomainError(f"step must lie in (0, 0.1], got {step}")
    c1 = single_relay_value(2)
    th = two_source_achievable_threshold()
    star = (0.0, LOG3)
    circle = (th.r0_min, th.r1_max)

    cutset = tuple((r0, two_source_cutset_boundary(r0)) for r0 in _grid(0.0, c1, step))
    tail = tuple((r0, two_source_cutset_boundary(r0)) for r0 in _grid(th.r0_min, c1, step))
    tail = (circle,) + tail[1:]
    segment = tuple((r0, timing_upper_boundary(r0)) for r0 in _grid(0.0, th.r0_min, step)[:-1])
    return RegionCurves(
        cutset=cutset,
        achievable=tail,
        timing=segment + tail,
        star=star,
        circle=circle,
    )


def profile_grid(m: int, q: int, step: float, cap: int = DEFAULT_GRID_CAP) -> list[ListenProfile]:
    """Every profile with relay listen fractions on the grid {0, step, ..., 1}."""
    if m < 1:
        raise InvalidSpecError(f"m must be >= 1, got {m}")
    if not 0.0 < step <= 1.0:
        raise DomainError(f"step must lie in (0, 1], got {step}")
    values = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    total = len(values) ** (m - 1)
    if total > cap:
        raise EnumerationLimitError(f"{total} grid profiles exceed the cap of {cap}")
    profiles = []
    for combo in itertools.product(values, repeat=m - 1):
        full = combo + (1.0,)
        if all(full[i] + full[i + 1] >= 1.0 - 1e-12 for i in range(m - 1)):
            profiles.append(ListenProfile(p=full, q=q))
    return profiles


def pareto_frontier(points: Iterable[Sequence[float]], tol: float = PARETO_TOL) -> list[tuple[float, ...]]:
    """Non-dominated points (maximization in every coordinate), sorted, duplicates dropped."""
    pts = sorted({tuple(float(v) for v in p) for p in points}, reverse=True)
    if not pts:
        return []
    arr = np.array(pts)
    keep: list[tuple[float, ...]] = []
    for k, cand in enumerate(arr):
        ge = np.all(arr >= cand - tol, axis=1)
        gt = np.any(arr > cand + tol, axis=1)
        dominated = ge & gt
        dominated[k] = False
        if dominated.any():
            continue
        if any(np.all(np.abs(np.array(kept) - cand) <= tol) for kept in keep):
            continue
        keep.append(tuple(cand))
    return sorted(keep)


def _polytope_vertices(bounds: Sequence[float], caps: Sequence[float]) -> set[tuple[float, ...]]:
    """
    Maximal corners of {R >= 0 : prefix sums within bounds, R_k <= caps[k] once anything upstream is positive}.

    Every subset of coordinates pinned to zero and every order of the rest is filled greedily.
    """
    k = len(bounds)
    out: set[tuple[float, ...]] = set()
    for zeros in itertools.product((False, True), repeat=k):
        free = [j for j in range(k) if not zeros[j]]
        for order in itertools.permutations(free):
            r = [0.0] * k
            for i in order:
                upper = min(bounds[j] - (sum(r[: j + 1]) - r[i]) for j in range(i, k))
                if i > 0 and sum(r[:i]) > 0:
                    upper = min(upper, caps[i])
                # a positive R_i would switch on the caps of downstream sources
                if any(r[j] > caps[j] + RATE_TOL and sum(r[:j]) - r[i] == 0 for j in range(i + 1, k)):
                    upper = 0.0
                r[i] = max(0.0, upper)
            out.add(tuple(r))
    return out


def general_region_sample(
    spec: CascadeSpec,
    profiles: Optional[Sequence[ListenProfile]] = None,
    step: float = 0.01,
    kind: RegionKind = RegionKind.ACHIEVABLE_PART,
    cap: int = DEFAULT_GRID_CAP,
) -> list[tuple[float, ...]]:
    """Pareto frontier of the per-profile rate polytopes over a grid of listen profiles."""
    if len(spec.sources) > MAX_SAMPLED_SOURCES:
        raise UnsupportedInstanceError(f"region sampling supports up to {MAX_SAMPLED_SOURCES} sources")
    if kind is RegionKind.TIMING_REGION:
        raise UnsupportedInstanceError("sample CUT_SET or ACHIEVABLE_PART; the timing region is their hull")
    if profiles is None:
        profiles = profile_grid(spec.m, spec.q, step, cap)
    vertices: set[tuple[float, ...]] = set()
    for profile in profiles:
        _check_profile(spec, profile)
        bounds = sum_bounds(spec, profile)
        caps = relay_caps(spec, profile) if kind is RegionKind.ACHIEVABLE_PART else (math.inf,) * len(bounds)
        vertices |= _polytope_vertices(bounds, caps)
    frontier = pareto_frontier(vertices)
    logger.info("region sample m=%d q=%d sources=%s: %d profiles, %d vertices, %d on the frontier",
                spec.m, spec.q, spec.sources, len(profiles), len(vertices), len(frontier))
    return frontier
