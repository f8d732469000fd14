"""Per-node softmax routing policies trained by stochastic gradient ascent.

Each node owns a :class:`PolicyTable`: one real parameter per
(destination, outgoing link) pair.  Action probabilities follow a Boltzmann
rule over the parameters, decisions are logged per packet, and when the
packet's acknowledgment comes back the logged decisions are turned into a
gradient step on the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# exp() underflows to 0.0 a little below -745; flooring the shifted exponent
# keeps every probability strictly positive for arbitrary finite parameters.
_EXP_FLOOR = -700.0


class PolicyTable:
    """Lookup-table policy for a single node.

    ``theta[dest][action]`` is the parameter for routing a packet bound for
    ``dest`` down the node's ``action``-th link.  ``temperature`` controls how
    sharply the softmax concentrates, ``learning_rate`` scales updates, and
    ``discount`` weights a packet's reward by ``discount ** elapsed_time``.
    Temperature and learning rate stay constant over the table's lifetime.
    """

    __slots__ = ("theta", "temperature", "learning_rate", "discount")

    def __init__(self, destinations: int, actions: int, *,
                 temperature: float = 1.0, learning_rate: float = 0.01,
                 discount: float = 1.0, theta=None):
        if destinations <= 0 or actions <= 0:
            raise ValueError("destinations and actions must be positive")
        if not temperature > 0.0:
            raise ValueError("temperature must be > 0")
        if not learning_rate > 0.0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 <= discount <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if theta is None:
            theta = [[0.0] * actions for _ in range(destinations)]
        else:
            theta = [list(map(float, row)) for row in theta]
            if len(theta) != destinations or any(len(r) != actions for r in theta):
                raise ValueError("theta shape does not match (destinations, actions)")
            if any(not math.isfinite(x) for row in theta for x in row):
                raise ValueError("theta entries must be finite")
        self.theta = theta
        self.temperature = float(temperature)
        self.learning_rate = float(learning_rate)
        self.discount = float(discount)

    @property
    def destinations(self) -> int:
        return len(self.theta)

    @property
    def actions(self) -> int:
        return len(self.theta[0])

    def action_probabilities(self, dest: int, available) -> list[float]:
        """Softmax probabilities over ``available``, in the given order.

        Stable for arbitrarily large parameter magnitudes (max-shifted
        exponents) and strictly positive everywhere.
        """
        if not available:
            raise ValueError("available action set is empty")
        row = self.theta[dest]
        xi = self.temperature
        scores = [row[a] / xi for a in available]
        m = max(scores)
        exps = [math.exp(max(s - m, _EXP_FLOOR)) for s in scores]
        total = sum(exps)
        return [e / total for e in exps]

    def sample_action(self, dest: int, available, rng) -> int:
        """Draw one action from the softmax, consuming one rng variate."""
        if not available:
            raise ValueError("available action set is empty")
        if len(available) == 1:
            return available[0]
        probs = self.action_probabilities(dest, available)
        r = rng.random()
        acc = 0.0
        for a, p in zip(available, probs):
            acc += p
            if r < acc:
                return a
        return available[-1]

    def grad_log_prob(self, dest: int, action: int, available) -> dict:
        """Gradient of ``ln`` selection probability w.r.t. the parameters.

        Sparse: only the row of the observed destination appears.  Within
        that row the taken action gets ``(1 - p(action)) / temperature`` and
        every other available action ``-p(other) / temperature``.
        """
        if action not in available:
            raise ValueError(f"action {action} not in available set {tuple(available)}")
        probs = self.action_probabilities(dest, available)
        xi = self.temperature
        grad = {}
        for a, p in zip(available, probs):
            grad[(dest, a)] = (1.0 - p) / xi if a == action else -p / xi
        return grad

    def accumulate(self, entries) -> dict:
        """Sum grad_log_prob over logged decisions ``(dest, action, available)``.

        The reward and discount factors are applied later by
        :meth:`apply_update`; repeated visits simply add their terms.
        """
        acc = {}
        for dest, action, available in entries:
            for coord, g in self.grad_log_prob(dest, action, available).items():
                acc[coord] = acc.get(coord, 0.0) + g
        return acc

    def apply_update(self, acc: dict, reward: float, elapsed: int) -> None:
        """Ascend: ``theta += learning_rate * discount**elapsed * reward * acc``."""
        if elapsed < 0:
            raise ValueError("elapsed time must be >= 0")
        if not math.isfinite(reward):
            raise ValueError("reward must be finite")
        scale = self.learning_rate * reward
        if self.discount != 1.0:
            scale *= self.discount ** elapsed
        theta = self.theta
        for (dest, action), g in acc.items():
            if not math.isfinite(g):
                raise ValueError("gradient accumulator must be finite")
            theta[dest][action] += scale * g


@dataclass
class TrajectoryRecord:
    """Time-ordered decision log for one packet at one or more nodes.

    Entries are ``(dest, action, available)`` in decision order; the entry
    index is the decision's position in the packet's history.
    """

    packet_id: int
    entries: list = field(default_factory=list)

    def add(self, dest: int, action: int, available) -> None:
        if action not in available:
            raise ValueError(f"action {action} not in available set {tuple(available)}")
        self.entries.append((dest, action, tuple(available)))

    def __len__(self) -> int:
        return len(self.entries)


def accumulate(record: TrajectoryRecord, policy: PolicyTable) -> dict:
    """Module-level spelling of :meth:`PolicyTable.accumulate`."""
    return policy.accumulate(record.entries)


def init_random(destinations: int, actions: int, rng, scale: float, *,
                temperature: float = 1.0, learning_rate: float = 0.01,
                discount: float = 1.0) -> PolicyTable:
    """Table with parameters drawn i.i.d. uniform on ``[-scale, +scale]``."""
    if not scale > 0.0:
        raise ValueError("scale must be > 0")
    theta = [[rng.uniform(-scale, scale) for _ in range(actions)]
             for _ in range(destinations)]
    return PolicyTable(destinations, actions, temperature=temperature,
                       learning_rate=learning_rate, discount=discount, theta=theta)


def init_epsilon_greedy(table, node: int, links, epsilon: float, *,
                        available=None, temperature: float = 1.0,
                        learning_rate: float = 0.01, discount: float = 1.0) -> PolicyTable:
    """Table that routes the shortest-path way with probability ``1 - epsilon``.

    ``links`` lists the node's neighbors in action order; ``available``
    restricts the split to the currently usable action indices (defaults to
    all).  Solving the softmax form for a two-level row gives

        theta_greedy - theta_other = temperature * ln((1 - eps) * (k - 1) / eps)

    for ``k`` available links, which reproduces exactly ``1 - epsilon`` on
    the shortest-path hop and ``epsilon / (k - 1)`` on each other link.
    Destinations with no shortest path (and the node itself) get uniform
    rows.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    links = list(links)
    if available is None:
        available = range(len(links))
    available = tuple(available)
    n = len(table.dist)
    policy = PolicyTable(n, len(links), temperature=temperature,
                         learning_rate=learning_rate, discount=discount)
    k = len(available)
    if k < 2:
        return policy
    offset = temperature * math.log((1.0 - epsilon) * (k - 1) / epsilon)
    hops = table.next_hop[node]
    for dest in range(n):
        if dest == node or hops[dest] is None:
            continue
        greedy = links.index(hops[dest])
        policy.theta[dest][greedy] = offset
    return policy


def dump_policy(policy: PolicyTable, node: int) -> str:
    """Serialize to the plain-text checkpoint format.

    Header ``policy <node> <destinations> <links>``, then one row of decimal
    floats per destination.
    """
    lines = [f"policy {node} {policy.destinations} {policy.actions}"]
    for row in policy.theta:
        lines.append(" ".join(format(x, ".17g") for x in row))
    return "\n".join(lines) + "\n"


def parse_policy(text: str, *, temperature: float = 1.0,
                 learning_rate: float = 0.01, discount: float = 1.0):
    """Inverse of :func:`dump_policy`; returns ``(node, PolicyTable)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty policy text")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "policy":
        raise ValueError(f"bad policy header {lines[0]!r}")
    node, destinations, actions = (int(x) for x in header[1:])
    if len(lines) - 1 != destinations:
        raise ValueError(f"expected {destinations} rows, got {len(lines) - 1}")
    theta = []
    for ln in lines[1:]:
        row = [float(x) for x in ln.split()]
        if len(row) != actions:
            raise ValueError(f"expected {actions} columns, got {len(row)}")
        theta.append(row)
    return node, PolicyTable(destinations, actions, temperature=temperature,
                             learning_rate=learning_rate, discount=discount,
                             theta=theta)
