from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np
from scipy.stats import entropy

from .capacity import ListenProfile, PairPmf, pair_pmf
from .errors import EnumerationLimitError, InvalidSpecError

logger = logging.getLogger(__name__)

MAX_ENUM_M = 12
DOMINANCE_SLACK = 1e-12

Coupling = Literal["markov", "northwest"]


def _northwest(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """North-west corner coupling of two pmfs: a on rows, b on columns."""
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    k = np.zeros((len(a), len(b)))
    r = c = 0
    while r < len(a) and c < len(b):
        mass = min(a[r], b[c])
        k[r, c] = mass
        a[r] -= mass
        b[c] -= mass
        if a[r] <= 1e-15:
            r += 1
        else:
            c += 1
    return k


@dataclass(frozen=True, eq=False)
class StructuredJoint:
    """
    Joint pmf of (X_0, ..., X_m) whose adjacent pairs are the optimal pair pmfs of a profile.

    Symbols are table indices: k < q transmits k, q is N. `support` maps full input
    tuples (x_0, ..., x_m) to their probability; zero-mass tuples are omitted.
    """

    profile: ListenProfile
    support: Mapping[tuple[int, ...], float]
    coupling: str = "markov"
    pairs: tuple[PairPmf, ...] = field(default=(), repr=False)

    @property
    def m(self) -> int:
        return self.profile.m

    @property
    def q(self) -> int:
        return self.profile.q

    @classmethod
    def from_profile(cls, profile: ListenProfile, coupling: Coupling = "markov") -> "StructuredJoint":
        """
        Sample the chain from the sink side: X_m = N, then X_{i-1} given what lies downstream.

        "markov" draws X_{i-1} from p(x_{i-1}|x_i) alone. "northwest" couples X_{i-1} with
        X_{i+1} whenever X_i = N; both reproduce every adjacent pair exactly.
        """
        if coupling not in ("markov", "northwest"):
            raise ValueError(f"unknown coupling {coupling!r}")
        m, q = profile.m, profile.q
        if m > MAX_ENUM_M:
            raise EnumerationLimitError(f"joint enumeration is limited to m <= {MAX_ENUM_M}, got m={m}")
        N = q
        pairs = tuple(pair_pmf(profile, i) for i in range(1, m + 1))

        def conditional(i: int, x_i: int) -> np.ndarray:
            col = pairs[i - 1].matrix[:, x_i]
            total = col.sum()
            return col / total if total > 0 else col

        # states are stored sink-first: (x_m, x_{m-1}, ...)
        states: dict[tuple[int, ...], float] = {(N,): 1.0}
        for i in range(m, 0, -1):
            nxt: dict[tuple[int, ...], float] = defaultdict(float)
            coupled = None
            if coupling == "northwest" and i < m and profile.listen(i) > 0:
                p_i = profile.listen(i)
                above = pairs[i].matrix[N, :] / p_i
                below = pairs[i - 1].matrix[:, N] / p_i
                coupled = _northwest(above, below)
            for state, prob in states.items():
                x_i = state[-1]
                if coupled is not None and x_i == N:
                    row = coupled[state[-2]]
                    total = row.sum()
                    cond = row / total if total > 0 else row
                else:
                    cond = conditional(i, x_i)
                for x_prev, c in enumerate(cond):
                    if c > 0:
                        nxt[state + (x_prev,)] += prob * c
            states = dict(nxt)
        support = {tuple(reversed(s)): p for s, p in states.items()}
        logger.debug("joint for m=%d q=%d (%s): %d support points", m, q, coupling, len(support))
        return cls(profile=profile, support=support, coupling=coupling, pairs=pairs)

    def pair_marginal(self, i: int) -> np.ndarray:
        """Recovered p(x_{i-1}, x_i)."""
        mat = np.zeros((self.q + 1, self.q + 1))
        for x, p in self.support.items():
            mat[x[i - 1], x[i]] += p
        return mat

    def output(self, x: tuple[int, ...], i: int) -> int:
        """Y_i for the input tuple x (index form)."""
        return x[i - 1] if x[i] == self.q else x[i]


@dataclass(frozen=True)
class CutsetResult:
    value: float
    cut: tuple[int, ...]
    cut_values: Mapping[tuple[int, ...], float]
    dominated: bool

    def chain_value(self, i: int, m: int) -> float:
        return self.cut_values[tuple(range(i, m))]


def cut_entropy(joint: StructuredJoint, cut: tuple[int, ...]) -> float:
    """H(Y_S, Y_m | X_S) by exhaustive summation over the support."""
    m = joint.m
    full: dict[tuple, float] = defaultdict(float)
    given: dict[tuple, float] = defaultdict(float)
    for x, p in joint.support.items():
        xs = tuple(x[i] for i in cut)
        ys = tuple(joint.output(x, i) for i in cut) + (joint.output(x, m),)
        full[xs + ys] += p
        given[xs] += p
    return float(entropy(list(full.values()), base=2) - entropy(list(given.values()), base=2))


def cutset_min_entropy(joint: StructuredJoint, v: int = 0) -> CutsetResult:
    """
    Minimum of H(Y_S, Y_m | X_S) over every S within {v+1, ..., m-1}.

    Also checks that each non-empty S is dominated by the chain cut {min S, ..., m-1}.
    """
    m = joint.m
    if not 0 <= v <= m - 1:
        raise InvalidSpecError(f"source node {v} outside 0..{m - 1}")
    nodes = range(v + 1, m)
    values: dict[tuple[int, ...], float] = {}
    for k in range(len(nodes) + 1):
        for cut in itertools.combinations(nodes, k):
            values[cut] = cut_entropy(joint, cut)

    dominated = all(
        values[cut] >= values[tuple(range(cut[0], m))] - DOMINANCE_SLACK
        for cut in values
        if cut
    )
    best = min(values, key=lambda c: (values[c], len(c), c))
    if not dominated:
        logger.warning("chain-cut dominance fails for the %s joint (m=%d)", joint.coupling, m)
    return CutsetResult(value=values[best], cut=best, cut_values=values, dominated=dominated)
