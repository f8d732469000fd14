"""Network graphs, benchmark grids, and all-pairs shortest paths.

A :class:`Topology` is an undirected graph with a fixed node count and an
up/down flag per link.  Instances are immutable: flipping a link state
returns a new topology, so tables and simulations can safely share them.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from importlib import resources

Edge = tuple[int, int]

#: Names accepted by the harness for the two checked-in benchmark grids.
BUILTIN_TOPOLOGIES = ("grid-original", "grid-modified")


def _normalize(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Topology:
    """Undirected graph over nodes ``0..node_count-1`` with per-link state."""

    __slots__ = ("node_count", "edges", "down", "_adjacency")

    def __init__(self, node_count: int, edges, down=()):
        if node_count <= 0:
            raise ValueError("node_count must be positive")
        normalized = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop edge {u}-{v}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge {u}-{v} endpoint out of range 0..{node_count - 1}")
            e = _normalize(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e[0]}-{e[1]}")
            seen.add(e)
            normalized.append(e)
        self.node_count = node_count
        self.edges = frozenset(normalized)
        self.down = frozenset(_normalize(u, v) for u, v in down)
        unknown = self.down - self.edges
        if unknown:
            raise ValueError(f"down state for unknown edges {sorted(unknown)}")
        adjacency = [[] for _ in range(node_count)]
        for u, v in self.edges:
            if (u, v) not in self.down:
                adjacency[u].append(v)
                adjacency[v].append(u)
        self._adjacency = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)

    def neighbors(self, node: int) -> tuple[int, ...]:
        """Nodes joined to ``node`` by an up link, ascending."""
        return self._adjacency[node]

    def is_up(self, u: int, v: int) -> bool:
        e = _normalize(u, v)
        if e not in self.edges:
            raise ValueError(f"unknown edge {u}-{v}")
        return e not in self.down

    def up_edges(self) -> frozenset:
        return self.edges - self.down

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return (self.node_count == other.node_count
                and self.edges == other.edges
                and self.down == other.down)

    def __hash__(self):
        return hash((self.node_count, self.edges, self.down))

    def __repr__(self):
        return (f"Topology(nodes={self.node_count}, edges={len(self.edges)}, "
                f"down={len(self.down)})")


def set_link_state(topology: Topology, edge: Edge, state: str) -> Topology:
    """Return a copy of ``topology`` with one link forced up or down."""
    if state not in ("up", "down"):
        raise ValueError(f"state must be 'up' or 'down', got {state!r}")
    e = _normalize(*edge)
    if e not in topology.edges:
        raise ValueError(f"unknown edge {edge[0]}-{edge[1]}")
    down = set(topology.down)
    if state == "down":
        down.add(e)
    else:
        down.discard(e)
    return Topology(topology.node_count, topology.edges, down)


def load_topology(text: str) -> Topology:
    """Parse the line-oriented topology format.

    Comment lines start with ``#``; the first payload line is ``nodes N``
    and every following payload line is ``edge U V``.  All links start up.
    """
    node_count = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if node_count is None:
            if len(fields) != 2 or fields[0] != "nodes":
                raise ValueError(f"line {lineno}: expected 'nodes N', got {line!r}")
            try:
                node_count = int(fields[1])
            except ValueError:
                raise ValueError(f"line {lineno}: node count {fields[1]!r} is not an integer")
            if node_count <= 0:
                raise ValueError(f"line {lineno}: node count must be positive")
        else:
            if len(fields) != 3 or fields[0] != "edge":
                raise ValueError(f"line {lineno}: expected 'edge U V', got {line!r}")
            try:
                u, v = int(fields[1]), int(fields[2])
            except ValueError:
                raise ValueError(f"line {lineno}: edge endpoints must be integers: {line!r}")
            edges.append((u, v))
    if node_count is None:
        raise ValueError("missing 'nodes N' line")
    return Topology(node_count, edges)


def load_topology_file(path) -> Topology:
    with open(path, "r", encoding="utf-8") as fh:
        return load_topology(fh.read())


def _load_builtin(name: str) -> Topology:
    text = resources.files("routebench.data").joinpath(name).read_text(encoding="utf-8")
    return load_topology(text)


def build_grid_original() -> Topology:
    """The 36-node irregular grid with bridge links 20-21 and 32-33."""
    return _load_builtin("grid-6x6-original.txt")


def build_grid_modified() -> Topology:
    """The irregular grid with link 32-33 moved to 20-27."""
    return _load_builtin("grid-6x6-modified.txt")


def builtin_topology(name: str) -> Topology:
    if name == "grid-original":
        return build_grid_original()
    if name == "grid-modified":
        return build_grid_modified()
    raise ValueError(f"unknown builtin topology {name!r} (have {', '.join(BUILTIN_TOPOLOGIES)})")


@dataclass(frozen=True)
class DistanceTable:
    """All-pairs shortest-path costs and deterministic first hops.

    ``dist[u][v]`` is the cost of the cheapest path over up links
    (``math.inf`` when unreachable) and ``next_hop[u][v]`` the first hop of
    one such path, ties broken toward the lowest neighbor index.
    """

    dist: tuple
    next_hop: tuple

    def path(self, src: int, dst: int) -> list[int] | None:
        """Node sequence from src to dst following next_hop, or None."""
        if self.dist[src][dst] == math.inf:
            return None
        path = [src]
        node = src
        while node != dst:
            node = self.next_hop[node][dst]
            path.append(node)
        return path


def shortest_paths(topology: Topology, weights=None) -> DistanceTable:
    """All-pairs shortest paths over up links.

    ``weights`` maps a normalized edge to a positive finite cost; omitted
    edges and ``weights=None`` mean unit cost.  Disconnection is reported
    as infinite cost, never as an error.
    """
    n = topology.node_count
    cost = {}
    for e in topology.up_edges():
        w = 1.0 if weights is None else float(weights.get(e, 1.0))
        if not (w > 0.0 and math.isfinite(w)):
            raise ValueError(f"weight for edge {e[0]}-{e[1]} must be positive and finite")
        cost[e] = w

    adjacency = [[(v, cost[_normalize(u, v)]) for v in topology.neighbors(u)]
                 for u in range(n)]

    dist = [[math.inf] * n for _ in range(n)]
    for src in range(n):
        row = dist[src]
        row[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > row[u]:
                continue
            for v, w in adjacency[u]:
                nd = d + w
                if nd < row[v]:
                    row[v] = nd
                    heapq.heappush(heap, (nd, v))

    next_hop = [[None] * n for _ in range(n)]
    for src in range(n):
        row = dist[src]
        for dst in range(n):
            if dst == src or row[dst] == math.inf:
                continue
            # argmin of (first-edge cost + remaining distance); strict < keeps
            # the lowest neighbor index on ties
            best, best_cost = None, math.inf
            for v, w in adjacency[src]:
                c = w + dist[v][dst]
                if c < best_cost:
                    best, best_cost = v, c
            next_hop[src][dst] = best

    return DistanceTable(dist=tuple(tuple(r) for r in dist),
                         next_hop=tuple(tuple(r) for r in next_hop))
