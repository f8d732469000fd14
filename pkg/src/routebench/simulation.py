"""Discrete-time packet routing simulation.

Timing convention (everything below counts in whole steps):

* Per step, every node with a nonempty queue services exactly its head
  packet, using the queue contents from the step's start.  Queue delay and
  transmission each cost one time unit.
* A packet serviced at its destination is delivered there and then;
  delivery is only recognized after the packet has passed through the
  destination's queue.
* A forwarded packet spends the next step in flight and joins the
  neighbor's queue tail at that step's end, so it becomes servable two
  steps after it was sent.  On a two-node graph a packet injected at time 0
  is therefore delivered at time 3: queue delay at the origin, one
  transmission, queue delay at the destination.
* A packet whose hop count would exceed the node count is discarded at
  forward time with a penalty reward instead of being transmitted.

Rewards are per-packet and terminal: ``-(elapsed + loop revisits)`` for a
delivery, ``-(elapsed + 2 * (node_count + 1) + loop revisits)`` for a
hop-limit discard, so discarding a packet is always strictly worse than
having delivered it at the same moment, no matter how congested the
network is.  Acknowledgments carrying the rewards back to the nodes that
handled the packet are instantaneous and consume no network capacity.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology

DELIVERED = "delivered"
DISCARDED = "discarded"


@dataclass(frozen=True)
class RewardEvent:
    """Terminal outcome of one packet: its reward and lifetime."""

    packet_id: int
    terminal: str
    reward: float
    elapsed: int


@dataclass
class Metrics:
    """Lifetime counters plus aggregates for the measurement window.

    ``injected`` counts every generated packet; ``delivered``, ``discarded``
    and ``dropped`` partition the ones that left the system (hop-limit and
    unreachable-destination removals both count as discarded, full-queue
    losses as dropped).  The ``measured_*`` fields cover only events
    completing after the configured warmup.
    """

    injected: int = 0
    delivered: int = 0
    discarded: int = 0
    dropped: int = 0
    measured_delivered: int = 0
    measured_discarded: int = 0
    measured_dropped: int = 0
    measured_delivery_time: int = 0

    @property
    def avg_delivery_time(self) -> float:
        if self.measured_delivered == 0:
            return math.nan
        return self.measured_delivery_time / self.measured_delivered


class Packet:
    """A routed unit and its bookkeeping.

    ``trace`` holds the most recently visited nodes (bounded); arriving at a
    node already in it adds one unit of loop penalty to the final reward.
    ``decisions`` logs ``(node, action)`` per forwarding choice when the
    router learns from acknowledgments.
    """

    __slots__ = ("id", "origin", "dest", "created_at", "last_service_at",
                 "hops", "trace", "loop_penalty", "decisions", "prev")

    def __init__(self, packet_id: int, origin: int, dest: int, created_at: int,
                 trace_capacity: int):
        self.id = packet_id
        self.origin = origin
        self.dest = dest
        self.created_at = created_at
        self.last_service_at = created_at
        self.hops = 0
        self.trace = deque((origin,), maxlen=trace_capacity)
        self.loop_penalty = 0
        self.decisions = []
        self.prev = -1


class Simulator:
    """One network, one router, one seeded random stream.

    Strictly sequential: no method may be called concurrently on the same
    instance.  Distinct instances share nothing mutable (topologies are
    immutable) and can run in parallel.  Identical topology, router state,
    seed and call sequence reproduce the run bit for bit.
    """

    def __init__(self, topology: Topology, router, rng, load: float | None = None, *,
                 queue_capacity: int = 1000, trace_capacity: int = 8,
                 measure_after: int = 0):
        if queue_capacity <= 0:
            raise ValueError("queue_capacity must be positive")
        n = topology.node_count
        self.topology = topology
        self.router = router
        self.rng = rng
        self.load = load
        self.queue_capacity = queue_capacity
        self.trace_capacity = trace_capacity
        self.measure_after = measure_after
        self.n = n
        self.links = tuple(topology.neighbors(u) for u in range(n))
        self.actions = tuple(tuple(range(len(self.links[u]))) for u in range(n))
        self.queues = [deque() for _ in range(n)]
        self.clock = 0
        self.metrics = Metrics()
        self.on_delivery = None  # optional callable(Packet), for diagnostics
        self._flying = []
        self._landing = []
        self._next_id = 0
        self._component = self._label_components()
        self._discard_penalty = 2 * (n + 1)
        router.bind(self)
        self._needs_trajectory = getattr(router, "needs_trajectory", False)
        self._learns_hops = getattr(router, "learns_hops", False)
        self._wants_rewards = getattr(router, "wants_rewards", False)
        self._wants_delivery_ticks = getattr(router, "wants_delivery_ticks", False)

    def _label_components(self):
        label = [-1] * self.n
        for start in range(self.n):
            if label[start] >= 0:
                continue
            label[start] = start
            frontier = [start]
            while frontier:
                u = frontier.pop()
                for v in self.links[u]:
                    if label[v] < 0:
                        label[v] = start
                        frontier.append(v)
        return label

    # -- packet sources ----------------------------------------------------

    def submit(self, origin: int, dest: int):
        """Hand one packet to the origin queue; returns it (or None if lost)."""
        if origin == dest:
            raise ValueError("packets are never destined to their origin")
        m = self.metrics
        m.injected += 1
        if self._component[origin] != self._component[dest]:
            # no route can ever exist; remove as hopeless on entry
            m.discarded += 1
            if self.clock > self.measure_after:
                m.measured_discarded += 1
            return None
        queue = self.queues[origin]
        if len(queue) >= self.queue_capacity:
            m.dropped += 1
            if self.clock > self.measure_after:
                m.measured_dropped += 1
            return None
        packet = Packet(self._next_id, origin, dest, self.clock, self.trace_capacity)
        self._next_id += 1
        queue.append(packet)
        return packet

    def inject_packets(self, load: float | None = None) -> int:
        """Create ``k ~ Poisson(load)`` packets with uniform origin/destination."""
        lam = self.load if load is None else load
        if lam is None or not lam > 0.0:
            raise ValueError("load must be positive")
        rng = self.rng
        n = self.n
        k = int(rng.poisson(lam))
        for _ in range(k):
            origin = int(rng.integers(n))
            dest = int(rng.integers(n - 1))
            if dest >= origin:
                dest += 1
            self.submit(origin, dest)
        return k

    # -- time --------------------------------------------------------------

    def step(self) -> list[RewardEvent]:
        """Advance one time unit; returns the reward events it produced."""
        t = self.clock
        n = self.n
        router = self.router
        queues = self.queues
        metrics = self.metrics
        measure_after = self.measure_after
        needs_trajectory = self._needs_trajectory
        learns_hops = self._learns_hops
        wants_rewards = self._wants_rewards
        flying = self._flying
        events = []

        for v in range(n):
            queue = queues[v]
            if not queue:
                continue
            packet = queue.popleft()
            dest = packet.dest
            if learns_hops and packet.prev >= 0:
                router.on_hop_serviced(packet.prev, v, dest,
                                       t - packet.last_service_at - 1)
            packet.last_service_at = t
            if dest == v:
                elapsed = t + 1 - packet.created_at
                reward = float(-(elapsed + packet.loop_penalty))
                events.append(RewardEvent(packet.id, DELIVERED, reward, elapsed))
                metrics.delivered += 1
                if t + 1 > measure_after:
                    metrics.measured_delivered += 1
                    metrics.measured_delivery_time += elapsed
                if wants_rewards:
                    router.on_terminal(packet, reward, elapsed, True)
                if self._wants_delivery_ticks:
                    router.on_delivered()
                if self.on_delivery is not None:
                    self.on_delivery(packet)
            else:
                action = router.select(v, dest, self.actions[v])
                packet.hops += 1
                if packet.hops > n:
                    elapsed = t + 1 - packet.created_at
                    reward = float(-(elapsed + self._discard_penalty
                                     + packet.loop_penalty))
                    events.append(RewardEvent(packet.id, DISCARDED, reward, elapsed))
                    metrics.discarded += 1
                    if t + 1 > measure_after:
                        metrics.measured_discarded += 1
                    if wants_rewards:
                        router.on_terminal(packet, reward, elapsed, False)
                else:
                    if needs_trajectory:
                        packet.decisions.append((v, action))
                    packet.prev = v
                    flying.append((packet, self.links[v][action]))

        # packets sent last step finish their transmission now and join the
        # target queue, servable from the next step on
        capacity = self.queue_capacity
        for packet, v in self._landing:
            queue = queues[v]
            if len(queue) >= capacity:
                metrics.dropped += 1
                if t + 1 > measure_after:
                    metrics.measured_dropped += 1
            else:
                if v in packet.trace:
                    packet.loop_penalty += 1
                packet.trace.append(v)
                queue.append(packet)
        self._landing = flying
        self._flying = []
        self.clock = t + 1
        return events

    def run(self, steps: int, measure_after: int = 0) -> Metrics:
        """Inject and step ``steps`` times; measure after ``measure_after``."""
        if steps <= measure_after:
            raise ValueError("steps must exceed measure_after")
        self.measure_after = measure_after
        for _ in range(steps):
            self.inject_packets()
            self.step()
        return self.metrics

    # -- accounting --------------------------------------------------------

    def queued_count(self) -> int:
        return sum(len(q) for q in self.queues)

    def queue_lengths(self) -> list[int]:
        return [len(q) for q in self.queues]

    @property
    def in_flight(self) -> int:
        return len(self._flying) + len(self._landing)

    def conservation_holds(self) -> bool:
        """Injected packets all accounted for at a step boundary."""
        m = self.metrics
        return m.injected == (m.delivered + m.discarded + m.dropped
                              + self.queued_count() + self.in_flight)


def simulation_rng(seed: int) -> np.random.Generator:
    """The random stream used by benchmark runs (one per simulation)."""
    return np.random.Generator(np.random.PCG64(seed))
