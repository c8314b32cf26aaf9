from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Mapping, Optional, Sequence

import networkx as nx

from .capacity import DEFAULT_TOL, solve_capacity
from .errors import TreeSpecError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TreeSpec:
    """A rooted broadcast tree of half-duplex nodes; every edge is a noise-free q-ary link."""

    graph: nx.DiGraph
    q: int = 1

    def __post_init__(self) -> None:
        if self.q < 1:
            raise TreeSpecError(f"q must be >= 1, got {self.q}")
        if self.graph.number_of_edges() == 0:
            raise TreeSpecError("a tree needs at least one edge")
        if not nx.is_arborescence(self.graph):
            raise TreeSpecError("graph is not a rooted tree (connected, acyclic, one root, in-degree <= 1)")

    @classmethod
    def from_adjacency(cls, adjacency: Mapping[Hashable, Sequence[Hashable]], q: int = 1) -> "TreeSpec":
        g = nx.DiGraph()
        for parent, children in adjacency.items():
            for child in children:
                g.add_edge(parent, child)
        return cls(graph=g, q=q)

    @classmethod
    def from_dict(cls, data: Mapping) -> "TreeSpec":
        """{"q": 1, "edges": [[1, 2], ...]} or {"q": 1, "adjacency": {"1": [2, 3], ...}}."""
        q = int(data.get("q", 1))
        if "edges" in data:
            g = nx.DiGraph()
            try:
                g.add_edges_from((_node(a), _node(b)) for a, b in data["edges"])
            except (TypeError, ValueError) as e:
                raise TreeSpecError(f"malformed edge list: {e}") from None
            return cls(graph=g, q=q)
        if "adjacency" in data:
            adjacency = {_node(k): [_node(c) for c in v] for k, v in data["adjacency"].items()}
            return cls.from_adjacency(adjacency, q=q)
        raise TreeSpecError("tree description needs 'edges' or 'adjacency'")

    @property
    def root(self) -> Hashable:
        return next(v for v, d in self.graph.in_degree() if d == 0)

    def longest_path(self) -> list[Hashable]:
        return nx.dag_longest_path(self.graph)

    @property
    def depth(self) -> int:
        """Edges from the root to the deepest leaf."""
        return nx.dag_longest_path_length(self.graph)


def _node(value) -> Hashable:
    if isinstance(value, str) and value.lstrip("-").isdigit():
        return int(value)
    return value


def load_tree(path: Path) -> TreeSpec:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise TreeSpecError(f"cannot read tree from {path}: {e}") from None
    return TreeSpec.from_dict(data)


# Binary-ish broadcast tree: root 1, deepest leaves 7 and 8 behind two relays.
WIRELESS_TREE = {1: [2, 3], 2: [4, 5], 3: [6], 4: [7], 6: [8]}


def wireless_tree(q: int = 1) -> TreeSpec:
    return TreeSpec.from_adjacency(WIRELESS_TREE, q=q)


@dataclass(frozen=True)
class TreeResult:
    depth: int
    path: tuple[Hashable, ...]
    capacity: float
    q: int

    def to_dict(self) -> dict:
        return {"depth": self.depth, "relays": self.depth - 1, "path": list(self.path), "q": self.q,
                "capacity": self.capacity}


def tree_multicast_capacity(tree: TreeSpec, tol: float = DEFAULT_TOL) -> TreeResult:
    """Multicast capacity of the tree: the capacity of the cascade along its longest root-leaf path."""
    path = tuple(tree.longest_path())
    value = solve_capacity(tree.depth, tree.q, tol=tol).value
    logger.info("tree depth %d (path %s): capacity %.4f", tree.depth, path, value)
    return TreeResult(depth=tree.depth, path=path, capacity=value, q=tree.q)


# Butterfly: sources 1 and 2, relay 3, sinks 4 and 5, plus direct links 1->4 and 2->5.
BUTTERFLY_EDGES = ((1, 3), (1, 4), (2, 3), (2, 5), (3, 4), (3, 5))
BUTTERFLY_SOURCES = (1, 2)
BUTTERFLY_RELAY = 3
BUTTERFLY_SINKS = (4, 5)

ERASED = "E"


def butterfly_graph() -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_edges_from(BUTTERFLY_EDGES)
    return g


def broadcast_slot(graph: nx.DiGraph, sent: Mapping[Hashable, int]) -> dict[Hashable, object]:
    """
    One slot of broadcast bit pipes under the collision model.

    A listening node hears the bit of its only transmitting in-neighbour, an erasure when
    two or more in-neighbours transmit, and nothing (None) otherwise. Transmitters hear nothing.
    """
    heard: dict[Hashable, object] = {}
    for v in graph.nodes:
        if v in sent:
            heard[v] = None
            continue
        active = [u for u in graph.predecessors(v) if u in sent]
        if len(active) == 1:
            heard[v] = sent[active[0]]
        elif len(active) > 1:
            heard[v] = ERASED
        else:
            heard[v] = None
    return heard


def run_network_coding(graph: nx.DiGraph, u1: int, u2: int) -> dict[Hashable, tuple[int, int] | None]:
    """
    Three-slot schedule: source 1 sends u1, source 2 sends u2, the relay sends u1 xor u2.
    Returns what each sink reconstructs (None if it cannot).
    """
    s1, s2 = BUTTERFLY_SOURCES
    relay = BUTTERFLY_RELAY
    slot1 = broadcast_slot(graph, {s1: u1})
    slot2 = broadcast_slot(graph, {s2: u2})
    got1, got2 = slot1[relay], slot2[relay]
    if got1 in (None, ERASED) or got2 in (None, ERASED):
        return {t: None for t in BUTTERFLY_SINKS}
    slot3 = broadcast_slot(graph, {relay: int(got1) ^ int(got2)})

    out: dict[Hashable, tuple[int, int] | None] = {}
    for t in BUTTERFLY_SINKS:
        direct = [x for x in (slot1[t], slot2[t]) if x not in (None, ERASED)]
        mixed = slot3[t]
        if len(direct) != 1 or mixed in (None, ERASED):
            out[t] = None
            continue
        known = int(direct[0])
        other = known ^ int(mixed)
        out[t] = (known, other) if slot1[t] not in (None, ERASED) else (other, known)
    return out


@dataclass(frozen=True)
class ButterflyReport:
    nc_rate: float
    nc_pairs_ok: int
    nc_pairs_total: int
    timing_paths: tuple[tuple[Hashable, ...], ...]
    per_path_rate: float
    timing_rate: float
    unused_links: tuple[tuple[Hashable, Hashable], ...]
    notes: tuple[str, ...]

    @property
    def nc_verified(self) -> bool:
        return self.nc_pairs_ok == self.nc_pairs_total

    def to_dict(self) -> dict:
        return {
            "nc_rate": self.nc_rate,
            "nc_pairs_ok": self.nc_pairs_ok,
            "nc_pairs_total": self.nc_pairs_total,
            "nc_verified": self.nc_verified,
            "timing_paths": [list(p) for p in self.timing_paths],
            "per_path_rate": self.per_path_rate,
            "timing_rate": self.timing_rate,
            "unused_links": [list(e) for e in self.unused_links],
            "notes": list(self.notes),
        }


def butterfly_report(q: int = 1, tol: float = DEFAULT_TOL) -> ButterflyReport:
    """
    Compare network coding with timing on the butterfly.

    Each source reaches both sinks through the relay, so its traffic is a two-hop cascade
    broadcast by the relay. Time-sharing the two sources keeps that cascade's rate as the
    multicast rate.
    """
    g = butterfly_graph()
    ok = 0
    for u1 in (0, 1):
        for u2 in (0, 1):
            got = run_network_coding(g, u1, u2)
            if all(got[t] == (u1, u2) for t in BUTTERFLY_SINKS):
                ok += 1
            else:
                logger.warning("network coding fails for (u1, u2) = (%d, %d): %s", u1, u2, got)

    relayed = nx.DiGraph()
    relayed.add_edges_from((u, v) for u, v in g.edges if BUTTERFLY_RELAY in (u, v))
    paths = tuple(
        tuple(p)
        for s in BUTTERFLY_SOURCES
        for t in BUTTERFLY_SINKS
        for p in nx.all_simple_paths(relayed, s, t)
    )
    hops = {len(p) - 1 for p in paths}
    rate = min(solve_capacity(h, q, tol=tol).value for h in hops)
    used = {(p[i], p[i + 1]) for p in paths for i in range(len(p) - 1)}
    unused = tuple(e for e in BUTTERFLY_EDGES if e not in used)
    notes = (
        "timing reaches the rate without the direct links " + ", ".join(f"({a},{b})" for a, b in unused),
        "the multicast capacity may be larger; it is not computed here",
    )
    return ButterflyReport(
        nc_rate=2.0 / 3.0,
        nc_pairs_ok=ok,
        nc_pairs_total=4,
        timing_paths=paths,
        per_path_rate=rate,
        timing_rate=rate,
        unused_links=unused,
        notes=notes,
    )
