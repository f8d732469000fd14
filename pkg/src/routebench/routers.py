"""Adapters that drive a :class:`~routebench.simulation.Simulator`.

Each router turns one routing algorithm into the small interface the
simulation loop expects: ``select`` picks an outgoing action for the packet
being serviced, and the optional hooks receive acknowledgments, per-hop
service notifications, or delivery ticks.  A router instance belongs to
exactly one simulation.
"""

from __future__ import annotations

from .baselines import QTable, best_policy, bestload_recompute
from .gaps import init_epsilon_greedy, init_random
from .topology import Topology, shortest_paths


class RouterBase:
    """No-op hooks; the simulator feature-detects via the class flags."""

    needs_trajectory = False
    learns_hops = False
    wants_rewards = False
    wants_delivery_ticks = False

    def bind(self, sim) -> None:
        self.sim = sim

    def select(self, node: int, dest: int, actions) -> int:
        raise NotImplementedError


def _action_table(links, table):
    """next-hop node ids -> action indices, one row per node."""
    rows = []
    for node, nbrs in enumerate(links):
        hop_row = table.next_hop[node]
        rows.append(tuple(-1 if hop is None else nbrs.index(hop)
                          for hop in hop_row))
    return tuple(rows)


class BestRouter(RouterBase):
    """Static unit-cost shortest paths, fixed for the whole run."""

    def __init__(self, topology: Topology):
        self._links = tuple(topology.neighbors(u) for u in range(topology.node_count))
        self._actions = _action_table(self._links, best_policy(topology))

    def select(self, node, dest, actions):
        return self._actions[node][dest]


class BestloadRouter(RouterBase):
    """Queue-aware shortest paths, recomputed after every 50 deliveries.

    The recomputation sees the current queue length of every node (this
    router is an omniscient oracle, not a distributed protocol).
    """

    wants_delivery_ticks = True

    def __init__(self, topology: Topology, recompute_every: int = 50):
        if recompute_every <= 0:
            raise ValueError("recompute_every must be positive")
        self.topology = topology
        self.recompute_every = recompute_every
        self.deliveries_since_recompute = 0
        self.recompute_count = 0
        self._links = tuple(topology.neighbors(u) for u in range(topology.node_count))
        self._actions = _action_table(
            self._links, bestload_recompute(topology, [0] * topology.node_count))

    def select(self, node, dest, actions):
        return self._actions[node][dest]

    def on_delivered(self):
        self.deliveries_since_recompute += 1
        if self.deliveries_since_recompute >= self.recompute_every:
            self.deliveries_since_recompute = 0
            self.recompute_count += 1
            table = bestload_recompute(self.topology, self.sim.queue_lengths())
            self._actions = _action_table(self._links, table)


class QRouter(RouterBase):
    """Q-routing: greedy over learned remaining-delivery-time estimates.

    When a node services a packet, the previous hop is told how long the
    packet sat in this queue and what this node now believes about the rest
    of the trip; the acknowledgment is instantaneous and free.
    """

    learns_hops = True

    def __init__(self, topology: Topology, learning_rate: float = 0.5):
        self.table = QTable(topology, learning_rate)
        links = self.table.links
        self._all_actions = tuple(tuple(range(len(nbrs))) for nbrs in links)
        self._action_of = tuple({y: i for i, y in enumerate(nbrs)} for nbrs in links)

    def select(self, node, dest, actions):
        return self.table.select(node, dest, actions)

    def on_hop_serviced(self, sender, node, dest, queue_time):
        remaining = self.table.best_remaining(node, dest, self._all_actions[node])
        self.table.update(sender, dest, self._action_of[sender][node],
                          queue_time, 1.0, remaining)


class GapsRouter(RouterBase):
    """Per-node softmax policies updated from acknowledgment rewards."""

    needs_trajectory = True
    wants_rewards = True

    def __init__(self, tables):
        self.tables = list(tables)
        self._all_actions = tuple(
            None if t is None else tuple(range(t.actions)) for t in self.tables)

    @classmethod
    def epsilon_greedy(cls, topology: Topology, *, epsilon: float = 0.01,
                       temperature: float = 1.0, learning_rate: float = 0.01,
                       discount: float = 1.0) -> "GapsRouter":
        """Start near shortest-path routing with epsilon worth of exploration."""
        table = shortest_paths(topology)
        tables = []
        for node in range(topology.node_count):
            links = topology.neighbors(node)
            if not links:
                tables.append(None)
                continue
            tables.append(init_epsilon_greedy(
                table, node, links, epsilon, temperature=temperature,
                learning_rate=learning_rate, discount=discount))
        return cls(tables)

    @classmethod
    def random(cls, topology: Topology, rng, scale: float, *,
               temperature: float = 1.0, learning_rate: float = 0.01,
               discount: float = 1.0) -> "GapsRouter":
        """Parameters drawn uniformly from ``[-scale, +scale]``."""
        n = topology.node_count
        tables = []
        for node in range(n):
            links = topology.neighbors(node)
            if not links:
                tables.append(None)
                continue
            tables.append(init_random(
                n, len(links), rng, scale, temperature=temperature,
                learning_rate=learning_rate, discount=discount))
        return cls(tables)

    def bind(self, sim):
        super().bind(sim)
        self._rng = sim.rng

    def select(self, node, dest, actions):
        return self.tables[node].sample_action(dest, actions, self._rng)

    def on_terminal(self, packet, reward, elapsed, delivered):
        self.distribute_reward(packet.decisions, packet.dest, reward, elapsed)

    def distribute_reward(self, decisions, dest, reward, elapsed):
        """Apply one packet's reward at every node that forwarded it.

        Returns ``(node, accumulator)`` pairs, one per distinct node, each
        accumulator summing the gradient terms of that node's logged
        decisions (a node revisited by the packet contributes all of its
        decisions to a single update).
        """
        by_node = {}
        for node, action in decisions:
            by_node.setdefault(node, []).append(action)
        updates = []
        for node, actions_taken in by_node.items():
            table = self.tables[node]
            available = self._all_actions[node]
            acc = table.accumulate((dest, a, available) for a in actions_taken)
            table.apply_update(acc, reward, elapsed)
            updates.append((node, acc))
        return updates


ALGORITHMS = ("gaps", "best", "bestload", "qrouting")


def make_router(algorithm: str, topology: Topology, rng=None, *,
                alpha: float = 0.01, temperature: float = 1.0,
                gamma: float = 1.0, epsilon: float = 0.01,
                alpha_q: float = 0.5, init: str = "epsilon-greedy",
                init_scale: float = 1.0):
    """Build the router for one benchmark cell."""
    if algorithm == "best":
        return BestRouter(topology)
    if algorithm == "bestload":
        return BestloadRouter(topology)
    if algorithm == "qrouting":
        return QRouter(topology, alpha_q)
    if algorithm == "gaps":
        if init == "epsilon-greedy":
            return GapsRouter.epsilon_greedy(
                topology, epsilon=epsilon, temperature=temperature,
                learning_rate=alpha, discount=gamma)
        if init == "random":
            if rng is None:
                raise ValueError("random initialization needs an rng")
            return GapsRouter.random(
                topology, rng, init_scale, temperature=temperature,
                learning_rate=alpha, discount=gamma)
        raise ValueError(f"unknown init mode {init!r}")
    raise ValueError(f"unknown algorithm {algorithm!r} (have {', '.join(ALGORITHMS)})")
