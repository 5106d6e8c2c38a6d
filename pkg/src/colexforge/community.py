"""Two-level map equation and a greedy optimizer for it.

Flow model: an undirected random walk without teleportation, so a node is
visited in proportion to its weighted degree and an edge is crossed (in each
direction) in proportion to its weight.  Nodes without edges carry no flow;
they are left out of the optimization and reported as singleton communities.

With ``q_i`` the exit flow of module ``i``, ``q`` their sum, ``p_a`` node
visit rates and ``p_i`` the summed visit rate of module ``i``::

    index  = plogp(q) - sum_i plogp(q_i)
    module = -sum_i plogp(q_i) - sum_a plogp(p_a) + sum_i plogp(q_i + p_i)

(base 2, ``plogp(x) = x log2 x``).
"""

from __future__ import annotations

import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from math import log2
from typing import Iterable, Mapping, Protocol

from colexforge.errors import UncoveredNode

logger = logging.getLogger(__name__)

MIN_IMPROVEMENT = 1e-10
DEFAULT_TRIALS = 8


def plogp(x: float) -> float:
    return x * log2(x) if x > 0 else 0.0


class _HasWeightedEdges(Protocol):
    nodes: Mapping[str, object]

    def weighted_edges(self) -> Iterable[tuple[str, str, float]]: ...


@dataclass(frozen=True)
class WeightedGraph:
    """Plain undirected weighted graph; the optimizer's working view of a network."""

    nodes: tuple[str, ...]
    weights: dict[tuple[str, str], float]

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, float]], nodes: Iterable[str] = ()) -> "WeightedGraph":
        weights: dict[tuple[str, str], float] = {}
        node_set = set(nodes)
        for a, b, w in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if w <= 0:
                raise ValueError(f"non-positive weight on {a!r}-{b!r}")
            key = (a, b) if a < b else (b, a)
            weights[key] = weights.get(key, 0.0) + float(w)
            node_set.update(key)
        return cls(tuple(sorted(node_set)), weights)

    def weighted_edges(self) -> Iterable[tuple[str, str, float]]:
        for (a, b) in sorted(self.weights):
            yield a, b, self.weights[(a, b)]

    def strengths(self) -> dict[str, float]:
        out = dict.fromkeys(self.nodes, 0.0)
        for (a, b), w in self.weights.items():
            out[a] += w
            out[b] += w
        return out


def as_graph(network: WeightedGraph | _HasWeightedEdges) -> WeightedGraph:
    if isinstance(network, WeightedGraph):
        return network
    return WeightedGraph.from_edges(network.weighted_edges(), network.nodes)


@dataclass(frozen=True)
class Partition:
    assignment: dict[str, int] = field(default_factory=dict)
    num_communities: int = 0

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[str]]) -> "Partition":
        """Canonical partition: communities numbered by their smallest member."""
        blocks = sorted((sorted(g) for g in groups if g), key=lambda g: g[0])
        assignment = {node: i for i, block in enumerate(blocks) for node in block}
        return cls(assignment, len(blocks))

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, object]) -> "Partition":
        groups: dict[object, list[str]] = defaultdict(list)
        for node, label in assignment.items():
            groups[label].append(node)
        return cls.from_groups(groups.values())

    def groups(self) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.num_communities)]
        for node in sorted(self.assignment):
            out[self.assignment[node]].append(node)
        return out


@dataclass(frozen=True)
class CodelengthBreakdown:
    total_bits: float
    index_bits: float
    module_bits: float


def map_equation(network, partition: Partition | Mapping[str, object]) -> CodelengthBreakdown:
    """Codelength of ``partition`` on ``network`` in bits per step."""
    graph = as_graph(network)
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    strength = graph.strengths()
    total = sum(strength.values())
    if total == 0:
        return CodelengthBreakdown(0.0, 0.0, 0.0)
    for node, s in strength.items():
        if s > 0 and node not in assignment:
            raise UncoveredNode(f"node {node!r} has edges but no community")

    exit_w: dict[object, float] = defaultdict(float)
    flow: dict[object, float] = defaultdict(float)
    node_term = 0.0
    for node, s in strength.items():
        if s > 0:
            p = s / total
            flow[assignment[node]] += p
            node_term += plogp(p)
    for (a, b), w in graph.weights.items():
        ma, mb = assignment[a], assignment[b]
        if ma != mb:
            exit_w[ma] += w / total
            exit_w[mb] += w / total

    q = sum(exit_w.values())
    sum_plogp_q = sum(plogp(x) for x in exit_w.values())
    index_bits = plogp(q) - sum_plogp_q
    module_bits = -sum_plogp_q - node_term + sum(plogp(exit_w[m] + f) for m, f in flow.items())
    return CodelengthBreakdown(index_bits + module_bits, index_bits, module_bits)


class _Level:
    """Graph of super-nodes in flow units, plus the module state of a search."""

    def __init__(self, flow: list[float], adj: list[dict[int, float]]) -> None:
        self.flow = flow
        self.adj = adj
        self.out = [sum(nbrs.values()) for nbrs in adj]

    def __len__(self) -> int:
        return len(self.flow)


def _level_from_assignment(base: _Level, assignment: list[int]) -> tuple[_Level, list[int]]:
    """Collapse ``base`` so that every module becomes one super-node."""
    relabel: dict[int, int] = {}
    for m in assignment:
        relabel.setdefault(m, len(relabel))
    dense = [relabel[m] for m in assignment]
    n = len(relabel)
    flow = [0.0] * n
    adj: list[dict[int, float]] = [defaultdict(float) for _ in range(n)]
    for i, m in enumerate(dense):
        flow[m] += base.flow[i]
        for j, w in base.adj[i].items():
            mj = dense[j]
            if mj != m:
                adj[m][mj] += w
    return _Level(flow, [dict(a) for a in adj]), dense


class _Search:
    """Greedy single-node moves on one level, tracking module exit and flow."""

    def __init__(self, level: _Level, module_of: list[int]) -> None:
        self.level = level
        self.module_of = list(module_of)
        n = len(level)
        self.mod_flow = [0.0] * n
        self.mod_exit = [0.0] * n
        self.mod_size = [0] * n
        for i, m in enumerate(self.module_of):
            self.mod_flow[m] += level.flow[i]
            self.mod_size[m] += 1
            self.mod_exit[m] += level.out[i]
        for i, m in enumerate(self.module_of):
            for j, w in level.adj[i].items():
                if self.module_of[j] == m:
                    self.mod_exit[m] -= w  # counted once from each side
        self.sum_exit = sum(self.mod_exit)
        self.empty = [m for m in range(n) if self.mod_size[m] == 0]

    def module_terms(self) -> float:
        return (
            plogp(self.sum_exit)
            - 2 * sum(plogp(x) for x in self.mod_exit)
            + sum(plogp(x + f) for x, f in zip(self.mod_exit, self.mod_flow))
        )

    def _delta(self, node: int, a: int, b: int, w_a: float, w_b: float) -> tuple[float, float, float]:
        lv = self.level
        p, out = lv.flow[node], lv.out[node]
        ea, fa = self.mod_exit[a], self.mod_flow[a]
        eb, fb = self.mod_exit[b], self.mod_flow[b]
        ea2 = max(ea - out + 2 * w_a, 0.0)
        eb2 = max(eb + out - 2 * w_b, 0.0)
        fa2, fb2 = fa - p, fb + p
        s2 = self.sum_exit - ea - eb + ea2 + eb2
        delta = (
            plogp(s2) - plogp(self.sum_exit)
            - 2 * (plogp(ea2) + plogp(eb2) - plogp(ea) - plogp(eb))
            + plogp(ea2 + fa2) + plogp(eb2 + fb2) - plogp(ea + fa) - plogp(eb + fb)
        )
        return delta, ea2, eb2

    def sweep(self, rng: random.Random) -> int:
        lv = self.level
        order = list(range(len(lv)))
        rng.shuffle(order)
        moves = 0
        for node in order:
            a = self.module_of[node]
            links: dict[int, float] = defaultdict(float)
            for j, w in lv.adj[node].items():
                links[self.module_of[j]] += w
            w_a = links.pop(a, 0.0)
            candidates = sorted(links)
            if self.mod_size[a] > 1 and self.empty:
                candidates.append(self.empty[-1])
            best = None
            for b in candidates:
                delta, ea2, eb2 = self._delta(node, a, b, w_a, links.get(b, 0.0))
                if best is None or delta < best[0]:
                    best = (delta, b, ea2, eb2)
            if best is None or best[0] >= -MIN_IMPROVEMENT:
                continue
            _, b, ea2, eb2 = best
            if self.mod_size[b] == 0:
                self.empty.pop()
            self.sum_exit += ea2 + eb2 - self.mod_exit[a] - self.mod_exit[b]
            self.mod_exit[a], self.mod_exit[b] = ea2, eb2
            p = lv.flow[node]
            self.mod_flow[a] -= p
            self.mod_flow[b] += p
            self.mod_size[a] -= 1
            self.mod_size[b] += 1
            if self.mod_size[a] == 0:
                self.mod_flow[a] = 0.0
                self.mod_exit[a] = 0.0
                self.empty.append(a)
            self.module_of[node] = b
            moves += 1
        return moves


def _optimize(base: _Level, node_term: float, rng: random.Random, trace: list[float]) -> list[int]:
    """One trial: aggregation passes alternating with node-level fine tuning."""

    def codelength(assignment: list[int]) -> float:
        return _Search(base, assignment).module_terms() - node_term

    assignment = list(range(len(base)))
    current = codelength(assignment)
    trace.append(current)
    while True:
        # coarse: merge modules of the current partition as super-nodes
        while True:
            level, dense = _level_from_assignment(base, assignment)
            search = _Search(level, list(range(len(level))))
            moved = 0
            while search.sweep(rng):
                moved += 1
                trace.append(codelength([search.module_of[m] for m in dense]))
            if not moved:
                break
            assignment = [search.module_of[m] for m in dense]
        # fine: let single nodes leave their module
        search = _Search(base, assignment)
        moved = 0
        while search.sweep(rng):
            moved += 1
            trace.append(codelength(search.module_of))
        assignment = search.module_of
        new = codelength(assignment)
        if not moved or new > current - MIN_IMPROVEMENT:
            return assignment
        current = new


def _components(n: int, adj: list[dict[int, float]]) -> list[int]:
    label = [-1] * n
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = start
        stack = [start]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if label[j] < 0:
                    label[j] = start
                    stack.append(j)
    return label


def detect_communities(
    network,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    trace: list[list[float]] | None = None,
) -> tuple[Partition, CodelengthBreakdown]:
    """Search for the partition with the shortest codelength.

    Runs ``trials`` independent greedy searches whose node visiting order
    comes from ``random.Random(seed)`` and keeps the best.  When ``trace`` is
    given, it receives one list of codelengths per trial, recorded after
    every sweep.
    """
    graph = as_graph(network)
    strength = graph.strengths()
    total = sum(strength.values())
    active = [n for n in graph.nodes if strength[n] > 0]
    isolated = [n for n in graph.nodes if strength[n] == 0]
    if not active:
        partition = Partition.from_groups([n] for n in isolated)
        return partition, CodelengthBreakdown(0.0, 0.0, 0.0)

    pos = {n: i for i, n in enumerate(active)}
    adj: list[dict[int, float]] = [dict() for _ in active]
    for (a, b), w in graph.weights.items():
        adj[pos[a]][pos[b]] = w / total
        adj[pos[b]][pos[a]] = w / total
    base = _Level([strength[n] / total for n in active], adj)
    node_term = sum(plogp(f) for f in base.flow)

    rng = random.Random(seed)
    best_assignment, best_length = None, None
    for _ in range(max(1, trials)):
        trial_trace: list[float] = []
        assignment = _optimize(base, node_term, random.Random(rng.random()), trial_trace)
        length = trial_trace[-1]
        if trace is not None:
            trace.append(trial_trace)
        if best_length is None or length < best_length - MIN_IMPROVEMENT:
            best_assignment, best_length = assignment, length

    # greedy merging cannot reach the trivial solution when every partial
    # merge costs bits, so compare against it explicitly
    components = _components(len(active), adj)
    trivial = _Search(base, components).module_terms() - node_term
    if trivial < best_length - MIN_IMPROVEMENT:
        best_assignment = components

    groups: dict[int, list[str]] = defaultdict(list)
    for node, m in zip(active, best_assignment):
        groups[m].append(node)
    partition = Partition.from_groups(list(groups.values()) + [[n] for n in isolated])
    breakdown = map_equation(graph, partition)
    logger.info(
        "communities: %d modules over %d nodes, %.6f bits",
        len(groups), len(active), breakdown.total_bits,
    )
    return partition, breakdown


def community_stats(partition: Partition, network) -> tuple[int, float]:
    """(number of communities, mean community size), ignoring isolated nodes."""
    graph = as_graph(network)
    strength = graph.strengths()
    active = [n for n in graph.nodes if strength[n] > 0]
    if not active:
        return 0, 0.0
    communities = {partition.assignment[n] for n in active}
    return len(communities), len(active) / len(communities)
