"""Routing tables for the comparison algorithms.

Three non-GAPS ways of picking a next hop: a static shortest-path table, a
queue-aware shortest-path table meant to be recomputed as load shifts, and
Q-routing's per-node estimates of remaining delivery time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .topology import Topology, shortest_paths


@dataclass(frozen=True)
class StaticRoutingTable:
    """Deterministic next hop per (node, destination); None if unreachable."""

    next_hop: tuple

    def hop(self, node: int, dest: int):
        return self.next_hop[node][dest]


def best_policy(topology: Topology) -> StaticRoutingTable:
    """Shortest-path routing with every link counted as one unit of cost."""
    return StaticRoutingTable(shortest_paths(topology).next_hop)


def bestload_recompute(topology: Topology, queue_lengths) -> StaticRoutingTable:
    """Shortest paths where moving into node ``v`` costs ``1 + queue_lengths[v]``.

    The hop costs are directed (they depend on the head node), so this runs
    its own all-pairs min-plus pass instead of reusing the undirected
    shortest-path helper.  With all queues empty the result equals
    :func:`best_policy`.
    """
    n = topology.node_count
    if len(queue_lengths) != n:
        raise ValueError("queue_lengths must cover every node")

    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v in topology.up_edges():
        dist[u, v] = 1.0 + queue_lengths[v]
        dist[v, u] = 1.0 + queue_lengths[u]
    for k in range(n):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)

    next_hop = []
    for u in range(n):
        nbrs = topology.neighbors(u)
        if not nbrs:
            next_hop.append((None,) * n)
            continue
        # rows in ascending neighbor order, so argmin's first-match rule
        # breaks ties toward the lowest neighbor index
        cand = np.stack([(1.0 + queue_lengths[v]) + dist[v] for v in nbrs])
        choice = np.argmin(cand, axis=0)
        row = [None if (d == u or not math.isfinite(dist[u, d])) else nbrs[choice[d]]
               for d in range(n)]
        next_hop.append(tuple(row))
    return StaticRoutingTable(tuple(next_hop))


class QTable:
    """Estimated remaining delivery time through each neighbor.

    ``value(x, d, a)`` estimates how long a packet bound for ``d`` still
    travels after node ``x`` sends it down its ``a``-th link.  Estimates start
    at zero (optimistic, so every link gets tried) and move toward observed
    ``queue time + transmission + best remaining`` samples.
    """

    __slots__ = ("links", "q", "learning_rate")

    def __init__(self, topology: Topology, learning_rate: float = 0.5):
        if not 0.0 < learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")
        n = topology.node_count
        self.links = tuple(topology.neighbors(u) for u in range(n))
        self.q = [[[0.0] * len(self.links[x]) for _ in range(n)] for x in range(n)]
        self.learning_rate = learning_rate

    def select(self, x: int, dest: int, available) -> int:
        """Action index minimizing the estimate; ties go to the lowest index."""
        if not available:
            raise ValueError("available action set is empty")
        row = self.q[x][dest]
        best = available[0]
        best_q = row[best]
        for a in available:
            if row[a] < best_q:
                best, best_q = a, row[a]
        return best

    def best_remaining(self, y: int, dest: int, available) -> float:
        """Smallest onward estimate from ``y``; zero at the destination."""
        if y == dest:
            return 0.0
        row = self.q[y][dest]
        return min(row[a] for a in available) if available else 0.0

    def update(self, x: int, dest: int, action: int, queue_time: float,
               transmission_cost: float, best_remaining: float) -> None:
        """Move the estimate toward one observed delivery-time sample."""
        sample = queue_time + transmission_cost + best_remaining
        if not math.isfinite(sample):
            raise ValueError("q-routing update inputs must be finite")
        row = self.q[x][dest]
        row[action] += self.learning_rate * (sample - row[action])


def qrouting_select(table: QTable, x: int, dest: int, neighbors) -> int:
    """Neighbor-id spelling of :meth:`QTable.select`."""
    links = table.links[x]
    actions = tuple(links.index(y) for y in neighbors)
    return links[table.select(x, dest, actions)]


def qrouting_update(table: QTable, x: int, dest: int, y: int, queue_time: float,
                    transmission_cost: float, best_remaining: float) -> None:
    """Neighbor-id spelling of :meth:`QTable.update`."""
    table.update(x, dest, table.links[x].index(y), queue_time,
                 transmission_cost, best_remaining)
