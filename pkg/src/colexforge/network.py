"""Family-weighted colexification network."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

from colexforge.colexify import ColexStore, Pair, pair_key
from colexforge.errors import UnknownConcept

DEFAULT_MIN_FAMILIES = 3


@dataclass(frozen=True)
class ColexEdge:
    concept_a: str
    concept_b: str
    varieties: frozenset[str]
    families: frozenset[str]
    word_count: int

    def __post_init__(self) -> None:
        if not self.concept_a < self.concept_b:
            raise ValueError(f"edge endpoints not canonical: {self.concept_a!r}, {self.concept_b!r}")

    @property
    def key(self) -> Pair:
        return (self.concept_a, self.concept_b)

    @property
    def weight(self) -> int:
        return len(self.families)


@dataclass(frozen=True)
class NodeInfo:
    varieties: int = 0
    families: int = 0


@dataclass(frozen=True)
class ColexNetwork:
    nodes: dict[str, NodeInfo] = field(default_factory=dict)
    edges: dict[Pair, ColexEdge] = field(default_factory=dict)
    threshold: int = DEFAULT_MIN_FAMILIES
    communities: dict[str, int] | None = None

    def sorted_edges(self) -> list[ColexEdge]:
        return [self.edges[k] for k in sorted(self.edges)]

    def weighted_edges(self) -> Iterator[tuple[str, str, float]]:
        for edge in self.sorted_edges():
            yield edge.concept_a, edge.concept_b, edge.weight

    def neighbors(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def edge(self, a: str, b: str) -> ColexEdge | None:
        return self.edges.get(pair_key(a, b))

    def colexified(self) -> set[str]:
        """Nodes taking part in at least one edge."""
        return {c for pair in self.edges for c in pair}

    def with_communities(self, assignment: Mapping[str, int] | None) -> "ColexNetwork":
        return replace(self, communities=None if assignment is None else dict(assignment))


def build_network(store: ColexStore, min_families: int = DEFAULT_MIN_FAMILIES) -> ColexNetwork:
    """Keep the concept pairs attested in at least ``min_families`` families.

    Every concept of the store's inventory becomes a node, isolated or not.
    """
    nodes = {cid: NodeInfo(*cov) for cid, cov in store.coverage.items()}
    edges = {}
    for (a, b), record in store.index.items():
        if len(record.families) < min_families:
            continue
        for c in (a, b):
            nodes.setdefault(c, NodeInfo())
        edges[(a, b)] = ColexEdge(
            concept_a=a,
            concept_b=b,
            varieties=frozenset(record.varieties),
            families=frozenset(record.families),
            word_count=record.words,
        )
    return ColexNetwork(nodes, edges, min_families)


def _check(network: ColexNetwork, concept: str) -> None:
    if concept not in network.nodes:
        raise UnknownConcept(f"{concept!r} is not a node of the network")


def degree(network: ColexNetwork, concept: str) -> int:
    _check(network, concept)
    return sum(1 for pair in network.edges if concept in pair)


def weighted_degree(network: ColexNetwork, concept: str) -> int:
    _check(network, concept)
    return sum(e.weight for pair, e in network.edges.items() if concept in pair)


def degrees(network: ColexNetwork) -> dict[str, int]:
    out = dict.fromkeys(network.nodes, 0)
    for a, b in network.edges:
        out[a] += 1
        out[b] += 1
    return out


def weighted_degrees(network: ColexNetwork) -> dict[str, int]:
    out = dict.fromkeys(network.nodes, 0)
    for (a, b), edge in network.edges.items():
        out[a] += edge.weight
        out[b] += edge.weight
    return out


def average_degree(network: ColexNetwork) -> float:
    """Mean degree over colexified nodes; isolated nodes are not counted."""
    n = len(network.colexified())
    return 2 * len(network.edges) / n if n else 0.0


def average_weighted_degree(network: ColexNetwork) -> float:
    n = len(network.colexified())
    return 2 * sum(e.weight for e in network.edges.values()) / n if n else 0.0


def from_edges(edges: Iterable[ColexEdge], nodes: Mapping[str, NodeInfo] | None = None,
               threshold: int = 1) -> ColexNetwork:
    """Assemble a network from ready-made edges (used by readers and tests)."""
    node_map = dict(nodes or {})
    edge_map = {}
    for edge in edges:
        for c in edge.key:
            node_map.setdefault(c, NodeInfo())
        edge_map[edge.key] = edge
    return ColexNetwork(node_map, edge_map, threshold)
