"""
Orbital - Models

Target distributions: weighted clause models, explicit potential tables and
independent-set (hard-core) models on graphs, plus the benchmark graph
families and exact enumeration of their distributions.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import ContractError, ScaleGuardError
from .perm import PermGroup, Permutation, State, act_on_state, identity, letter_names
from .symmetry import (
    WeightedClauseSet,
    automorphism_generators,
    build_colored_graph,
    graph_to_colored,
    is_clause_set_symmetry,
    restrict_to_variables,
)

logger = logging.getLogger(__name__)

RAW_ENUMERATION_LIMIT = 24
TABLE_SYMMETRY_LIMIT = 8
WEIGHT_SYMMETRY_LIMIT = 16
INDEPENDENT_SET_GUARD = 5 * 10**6
NORMALIZATION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with neighbor lists."""

    vertex_count: int
    adjacency: Tuple[Tuple[int, ...], ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.names:
            object.__setattr__(self, "names", tuple(letter_names(self.vertex_count)))

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[Tuple[int, int]],
        names: Optional[Sequence[str]] = None,
    ) -> "Graph":
        neighbors: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise ContractError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ContractError(f"edge ({u}, {v}) outside {vertex_count} vertices")
            neighbors[u].add(v)
            neighbors[v].add(u)
        adjacency = tuple(tuple(sorted(n)) for n in neighbors)
        return cls(vertex_count, adjacency, tuple(names) if names else ())

    @classmethod
    def from_networkx(cls, g: nx.Graph, names: Optional[Sequence[str]] = None) -> "Graph":
        """Convert a networkx graph whose nodes are 0..n-1."""
        return cls.from_edges(g.number_of_nodes(), g.edges(), names)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges())
        return g

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in self.adjacency[u] if u < v]

    def get_neighbors(self, vertex: int) -> Tuple[int, ...]:
        return self.adjacency[vertex]

    @property
    def max_degree(self) -> int:
        return max((len(n) for n in self.adjacency), default=0)

    def is_symmetry(self, perm: Permutation) -> bool:
        """True iff perm maps edges onto edges."""
        if perm.size != self.vertex_count:
            return False
        images = perm.images
        return all(images[v] in self.adjacency[images[u]] for u, v in self.edges())


def _require_k(k: int) -> None:
    if k < 2:
        raise ContractError(f"k must be at least 2, got {k}")


def grid_graph(k: int) -> Graph:
    """The k x k grid, vertices numbered row-major."""
    _require_k(k)
    g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(k, k), ordering="sorted")
    return Graph.from_networkx(g)


def connected_cliques(k: int) -> Graph:
    """
    k+1 cliques of size k-1, numbered block-wise, each joined by one edge
    from its lowest vertex to a hub vertex numbered last.
    """
    _require_k(k)
    size = k - 1
    g = nx.disjoint_union_all([nx.complete_graph(size) for _ in range(k + 1)])
    hub = (k + 1) * size
    g.add_node(hub)
    g.add_edges_from((block * size, hub) for block in range(k + 1))
    return Graph.from_networkx(g)


def complete_graph_model(k: int) -> Graph:
    """The complete graph on k^2 vertices."""
    _require_k(k)
    return Graph.from_networkx(nx.complete_graph(k * k))


TOPOLOGIES = {
    "grid": grid_graph,
    "cliques": connected_cliques,
    "complete": complete_graph_model,
}


def is_independent_set(g: Graph, x: State) -> bool:
    return not any(x[u] and x[v] for u, v in g.edges())


class Model:
    """
    Base class for target distributions over {0,1}^n.
    Subclasses define the unnormalized weight of a state.
    """

    variable_count: int
    names: Tuple[str, ...]

    def weight(self, x: State) -> float:
        raise NotImplementedError

    def in_support(self, x: State) -> bool:
        return self.weight(x) > 0

    def is_symmetry(self, perm: Permutation) -> bool:
        raise NotImplementedError


class ClauseModel(Model):
    """Markov-logic style model: exp(sum of satisfied soft weights), hard clauses as constraints."""

    def __init__(self, clause_set: WeightedClauseSet):
        self.clause_set = clause_set
        self.variable_count = clause_set.variable_count
        self.names = clause_set.variable_names

    def weight(self, x: State) -> float:
        return unnormalized_weight(self, x)

    def is_symmetry(self, perm: Permutation) -> bool:
        """
        True iff perm leaves the weight invariant. A clause-set symmetry is
        accepted directly; otherwise, up to WEIGHT_SYMMETRY_LIMIT variables,
        every state is checked.
        """
        if perm.size != self.variable_count:
            return False
        if is_clause_set_symmetry(self.clause_set, perm):
            return True
        if self.variable_count > WEIGHT_SYMMETRY_LIMIT:
            return False
        return all(
            math.isclose(self.weight(act_on_state(perm, x)), self.weight(x), rel_tol=1e-12)
            for x in all_states(self.variable_count)
        )

    def has_support(self) -> bool:
        """Exhaustive check that some state satisfies all hard clauses and evidence."""
        _require_raw_enumerable(self.variable_count)
        return any(self.weight(x) > 0 for x in all_states(self.variable_count))


class TableModel(Model):
    """Explicit potential table over {0,1}^n; missing states have weight 0."""

    def __init__(self, potential: Dict[State, float], names: Optional[Sequence[str]] = None):
        lengths = {len(x) for x in potential}
        if len(lengths) != 1:
            raise ContractError("potential table states must share one length")
        self.variable_count = lengths.pop()
        self.potential = {tuple(x): float(w) for x, w in potential.items()}
        self.names = tuple(names) if names else tuple(letter_names(self.variable_count))

    def weight(self, x: State) -> float:
        return self.potential.get(tuple(x), 0.0)

    def is_symmetry(self, perm: Permutation) -> bool:
        return all(
            self.weight(act_on_state(perm, x)) == self.weight(x)
            for x in all_states(self.variable_count)
        )


class IndependentSetModel(Model):
    """Hard-core model: pi(X) proportional to lambda^|X| on independent sets of a graph."""

    def __init__(self, graph: Graph, lam: float = 1.0):
        if lam <= 0:
            raise ContractError(f"lambda must be positive, got {lam}")
        self.graph = graph
        self.lam = float(lam)
        self.variable_count = graph.vertex_count
        self.names = graph.names

    def weight(self, x: State) -> float:
        if not is_independent_set(self.graph, x):
            return 0.0
        return self.lam ** sum(x)

    def is_symmetry(self, perm: Permutation) -> bool:
        return self.graph.is_symmetry(perm)


def unnormalized_weight(m: ClauseModel, x: State) -> float:
    """0 if a hard clause or the evidence is violated, else exp(sum of satisfied soft weights)."""
    s = m.clause_set
    if len(x) != s.variable_count:
        raise ContractError(f"state of length {len(x)} for {s.variable_count} variables")
    for variable, value in s.evidence.items():
        if bool(x[variable]) != value:
            return 0.0
    total = 0.0
    for clause in s.clauses:
        satisfied = clause.satisfied_by(x)
        if clause.is_hard:
            if not satisfied:
                return 0.0
        elif satisfied:
            total += clause.weight
    return math.exp(total)


def symmetric_pair_model() -> TableModel:
    """Two binary variables under one symmetric potential: pi = (0.01, 0.49, 0.49, 0.01)."""
    potential = {(0, 0): 1.0, (0, 1): 49.0, (1, 0): 49.0, (1, 1): 1.0}
    return TableModel(potential, names=("x1", "x2"))


@dataclass(frozen=True)
class ExactDistribution:
    """Normalized probabilities over an explicit support, aligned by index."""

    support: Tuple[State, ...]
    probabilities: Tuple[float, ...]
    partition_function: float = 1.0

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probabilities):
            raise ContractError("support and probabilities differ in length")
        if any(p < 0 for p in self.probabilities):
            raise ContractError("negative probability")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ContractError(f"probabilities sum to {total!r}")

    def as_dict(self) -> Dict[State, float]:
        return dict(zip(self.support, self.probabilities))

    def probability(self, x: State) -> float:
        return self.as_dict().get(tuple(x), 0.0)

    @property
    def variable_count(self) -> int:
        return len(self.support[0]) if self.support else 0


def all_states(n: int) -> Iterable[State]:
    return itertools.product((0, 1), repeat=n)


def _require_raw_enumerable(n: int) -> None:
    if n > RAW_ENUMERATION_LIMIT:
        raise ScaleGuardError("raw state enumeration variables", RAW_ENUMERATION_LIMIT, n)


def enumerate_independent_sets(g: Graph, guard: int = INDEPENDENT_SET_GUARD) -> List[State]:
    """All independent sets in lexicographic order, by include/exclude with pruning."""
    n = g.vertex_count
    x = [0] * n
    blocked = [0] * n
    found: List[State] = []

    def visit(v: int) -> None:
        if v == n:
            found.append(tuple(x))
            if len(found) > guard:
                raise ScaleGuardError("independent sets", guard, len(found))
            return
        visit(v + 1)
        if blocked[v]:
            return
        x[v] = 1
        for u in g.adjacency[v]:
            blocked[u] += 1
        visit(v + 1)
        x[v] = 0
        for u in g.adjacency[v]:
            blocked[u] -= 1

    visit(0)
    return found


def _normalize(states: Sequence[State], weights: Sequence[float]) -> ExactDistribution:
    z = math.fsum(weights)
    if z <= 0:
        raise ContractError("model has empty support")
    return ExactDistribution(tuple(states), tuple(w / z for w in weights), partition_function=z)


def enumerate_distribution(m: Model) -> ExactDistribution:
    """Exact normalized distribution of a model, support states in lexicographic order."""
    if isinstance(m, IndependentSetModel):
        states = enumerate_independent_sets(m.graph)
        weights = [m.lam ** sum(x) for x in states]
        logger.debug("enumerated %d independent sets", len(states))
        return _normalize(states, weights)

    _require_raw_enumerable(m.variable_count)
    states = []
    weights = []
    for x in all_states(m.variable_count):
        w = m.weight(x)
        if w > 0:
            states.append(x)
            weights.append(w)
    return _normalize(states, weights)


def symmetry_group(m: Model) -> PermGroup:
    """
    Symmetries of a model as a permutation group on its variables.

    Graph models use the automorphisms of the graph itself, clause models the
    projection of Aut(G(S)); table models are searched exhaustively.
    """
    if isinstance(m, IndependentSetModel):
        return automorphism_generators(graph_to_colored(m.graph))
    if isinstance(m, ClauseModel):
        colored = build_colored_graph(m.clause_set)
        return restrict_to_variables(automorphism_generators(colored), colored)

    n = m.variable_count
    if n > TABLE_SYMMETRY_LIMIT:
        raise ScaleGuardError("table model variables", TABLE_SYMMETRY_LIMIT, n)
    trivial = identity(n)
    generators = []
    for images in itertools.permutations(range(n)):
        p = Permutation(images)
        if p != trivial and m.is_symmetry(p):
            generators.append(p)
    return PermGroup(n, tuple(generators))
