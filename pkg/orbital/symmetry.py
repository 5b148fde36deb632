"""
Orbital - Symmetry Detection

Colored graph encoding of weighted clause sets, equitable color refinement,
and an individualization-refinement search for generators of the
color-preserving automorphism group. Graph automorphisms are projected back
to permutations of variables and features.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import ConsistencyError, ContractError, ScaleGuardError
from .perm import PermGroup, Permutation, UnionFind, point_orbits

logger = logging.getLogger(__name__)

HARD = math.inf
SEARCH_GUARD = 10**4
BRUTE_FORCE_GUARD = 10**7
CLAUSE_SET_GUARD = 10**6

Coloring = Tuple[int, ...]


@dataclass(frozen=True)
class Literal:
    variable: int
    negated: bool = False

    def __str__(self) -> str:
        return f"{'-' if self.negated else ''}{self.variable + 1}"


@dataclass(frozen=True)
class WeightedClause:
    """A disjunction of literals; weight HARD (infinity) marks an unweighted clause."""

    literals: Tuple[Literal, ...]
    weight: float = HARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "literals", tuple(self.literals))
        if len(set(self.literals)) != len(self.literals):
            raise ContractError(f"duplicate literal in clause {self}")

    @property
    def is_hard(self) -> bool:
        return math.isinf(self.weight)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return any(bool(x[lit.variable]) != lit.negated for lit in self.literals)

    def __str__(self) -> str:
        weight = "H" if self.is_hard else repr(self.weight)
        return f"{weight} " + " ".join(str(lit) for lit in self.literals)


@dataclass(frozen=True)
class WeightedClauseSet:
    """A multiset of partially weighted clauses with optional evidence."""

    variable_names: Tuple[str, ...]
    clauses: Tuple[WeightedClause, ...] = ()
    evidence: Mapping[int, bool] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "evidence", dict(self.evidence))
        n = len(self.variable_names)
        for clause in self.clauses:
            for lit in clause.literals:
                if not 0 <= lit.variable < n:
                    raise ContractError(f"literal {lit} outside {n} variables")
        for variable in self.evidence:
            if not 0 <= variable < n:
                raise ContractError(f"evidence on unknown variable {variable + 1}")

    @property
    def variable_count(self) -> int:
        return len(self.variable_names)

    def without_evidence(self) -> "WeightedClauseSet":
        return WeightedClauseSet(self.variable_names, self.clauses, {})


class VertexKind(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    CLAUSE = "clause"
    POINT = "point"


@dataclass(frozen=True)
class VertexRole:
    """Where a colored-graph vertex came from."""

    kind: VertexKind
    index: int
    evidence: Optional[bool] = None


@dataclass(frozen=True)
class ColoredGraph:
    """
    Vertex-colored simple undirected graph.

    Edges are stored as (u, v) pairs with u < v. Color ids are dense.
    ``labels`` name each vertex for printing.
    """

    vertex_count: int
    colors: Tuple[int, ...]
    edges: FrozenSet[Tuple[int, int]]
    provenance: Tuple[VertexRole, ...] = ()
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", tuple(self.colors))
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ContractError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ContractError(f"edge ({u}, {v}) outside {self.vertex_count} vertices")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if len(self.colors) != self.vertex_count:
            raise ContractError("one color per vertex required")
        if self.colors and sorted(set(self.colors)) != list(range(max(self.colors) + 1)):
            raise ContractError("color ids must be dense")
        if not self.provenance:
            roles = tuple(VertexRole(VertexKind.POINT, i) for i in range(self.vertex_count))
            object.__setattr__(self, "provenance", roles)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i + 1) for i in range(self.vertex_count)))

    @property
    def color_count(self) -> int:
        return len(set(self.colors))

    def adjacency(self) -> List[List[int]]:
        neighbors: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        return neighbors


def _dense(keys: Sequence) -> Coloring:
    """Renumber keys by their sorted order; equal keys share an id."""
    ranks = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return tuple(ranks[key] for key in keys)


def _literal_label(name: str, negated: bool) -> str:
    return f"~{name}" if negated else name


def build_colored_graph(s: WeightedClauseSet) -> ColoredGraph:
    """
    Encode S as G(S).

    Vertices 0..n-1 are the unnegated literals, n..2n-1 the negated ones,
    2n+i is clause i. Colors: 0 negated, 1 unnegated, one color per distinct
    finite weight (ascending), one for hard clauses, then one each for true
    and false evidence. Evidence recolors the unnegated literal vertex only.
    """
    n = s.variable_count
    finite = sorted({c.weight for c in s.clauses if not c.is_hard})
    next_color = 2
    weight_color: Dict[float, int] = {}
    for weight in finite:
        weight_color[weight] = next_color
        next_color += 1
    hard_color = next_color
    if any(c.is_hard for c in s.clauses):
        next_color += 1
    true_color = next_color
    if any(s.evidence.values()):
        next_color += 1
    false_color = next_color

    colors: List[int] = [1] * n + [0] * n
    roles: List[VertexRole] = [VertexRole(VertexKind.POSITIVE, i) for i in range(n)]
    roles += [VertexRole(VertexKind.NEGATIVE, i) for i in range(n)]
    labels = [_literal_label(name, False) for name in s.variable_names]
    labels += [_literal_label(name, True) for name in s.variable_names]
    for variable, value in s.evidence.items():
        colors[variable] = true_color if value else false_color
        roles[variable] = VertexRole(VertexKind.POSITIVE, variable, evidence=value)

    edges: Set[Tuple[int, int]] = {(i, n + i) for i in range(n)}
    for index, clause in enumerate(s.clauses):
        vertex = 2 * n + index
        colors.append(hard_color if clause.is_hard else weight_color[clause.weight])
        roles.append(VertexRole(VertexKind.CLAUSE, index))
        labels.append(f"f{index + 1}")
        for lit in clause.literals:
            edges.add((lit.variable + (n if lit.negated else 0), vertex))

    graph = ColoredGraph(
        vertex_count=len(colors),
        colors=_dense(colors),
        edges=frozenset(edges),
        provenance=tuple(roles),
        labels=tuple(f"v_{label}" for label in labels),
    )
    logger.debug(
        "colored graph: %d vertices, %d edges, %d colors",
        graph.vertex_count,
        len(graph.edges),
        graph.color_count,
    )
    return graph


def graph_to_colored(g) -> ColoredGraph:
    """Single-colored copy of a plain graph (anything with vertex_count, edges(), names)."""
    return ColoredGraph(
        vertex_count=g.vertex_count,
        colors=(0,) * g.vertex_count,
        edges=frozenset(g.edges()),
        labels=tuple(g.names),
    )


def refine_colors(graph: ColoredGraph, initial: Optional[Sequence[int]] = None) -> Coloring:
    """
    Coarsest equitable refinement of ``initial`` (default: the graph colors).

    A vertex's new color is the rank of (old color, sorted neighbor colors),
    so the numbering depends only on colors and is relabeling-invariant.
    """
    adjacency = graph.adjacency()
    colors = _dense(initial if initial is not None else graph.colors)
    count = len(set(colors))
    rounds = 0
    while True:
        rounds += 1
        signatures = [
            (colors[v], tuple(sorted(colors[u] for u in adjacency[v])))
            for v in range(graph.vertex_count)
        ]
        refined = _dense(signatures)
        refined_count = len(set(refined))
        if refined_count == count:
            logger.debug("refinement stable after %d rounds, %d cells", rounds, count)
            return refined
        colors, count = refined, refined_count


def is_equitable(graph: ColoredGraph, coloring: Sequence[int]) -> bool:
    adjacency = graph.adjacency()
    profile: Dict[int, Tuple[int, ...]] = {}
    for v in range(graph.vertex_count):
        neighbors = tuple(sorted(coloring[u] for u in adjacency[v]))
        if profile.setdefault(coloring[v], neighbors) != neighbors:
            return False
    return True


def _individualize(coloring: Coloring, vertex: int) -> Coloring:
    return _dense([(c, 0 if v == vertex else 1) for v, c in enumerate(coloring)])


def _cells(coloring: Coloring) -> Dict[int, List[int]]:
    cells: Dict[int, List[int]] = {}
    for v, c in enumerate(coloring):
        cells.setdefault(c, []).append(v)
    return cells


def _target_cell(coloring: Coloring) -> Optional[List[int]]:
    """Smallest non-singleton cell, ties broken by smallest color id."""
    best: Optional[List[int]] = None
    for color, members in sorted(_cells(coloring).items()):
        if len(members) > 1 and (best is None or len(members) < len(best)):
            best = members
    return best


@dataclass
class SearchResult:
    group: PermGroup
    order: int
    orbit_lengths: List[int]
    nodes: int = 0


class _Searcher:
    """State of one individualization-refinement search."""

    def __init__(self, graph: ColoredGraph):
        self.graph = graph
        self.adjacency = graph.adjacency()
        self.nodes = 0

    def refine(self, coloring: Sequence[int]) -> Coloring:
        self.nodes += 1
        return refine_colors(self.graph, coloring)

    def invariant(self, coloring: Coloring) -> Tuple:
        cells = _cells(coloring)
        return tuple(
            (color, len(members), tuple(sorted(coloring[u] for u in self.adjacency[members[0]])))
            for color, members in sorted(cells.items())
        )

    def leaf_map(self, base_leaf: Coloring, leaf: Coloring) -> Optional[Permutation]:
        at_color = [0] * len(leaf)
        for v, c in enumerate(leaf):
            at_color[c] = v
        images = tuple(at_color[c] for c in base_leaf)
        colors = self.graph.colors
        if any(colors[v] != colors[images[v]] for v in range(len(images))):
            return None
        edges = self.graph.edges
        for u, v in edges:
            a, b = images[u], images[v]
            if (min(a, b), max(a, b)) not in edges:
                return None
        return Permutation(images)

    def find_automorphism(
        self,
        parent: Coloring,
        vertex: int,
        depth: int,
        invariants: List[Tuple],
        base_leaf: Coloring,
    ) -> Optional[Permutation]:
        """Search the subtree below ``parent`` with ``vertex`` individualized."""
        stack = [(parent, vertex, depth)]
        while stack:
            above, chosen, level = stack.pop()
            coloring = self.refine(_individualize(above, chosen))
            if self.invariant(coloring) != invariants[level]:
                continue
            cell = _target_cell(coloring)
            if cell is None:
                found = self.leaf_map(base_leaf, coloring)
                if found is not None:
                    return found
                continue
            for w in reversed(cell):
                stack.append((coloring, w, level + 1))
        return None


def automorphism_search(graph: ColoredGraph, guard: int = SEARCH_GUARD) -> SearchResult:
    """
    Generators and order of the color-preserving automorphism group.

    Follows the first path of the search tree to a discrete leaf, then walks
    back up. At each level every vertex of the target cell not already known
    to share an orbit with the first-path choice gets a subtree search for a
    leaf equivalent to the first leaf. The group order is the product of the
    resulting orbit lengths.
    """
    if graph.vertex_count > guard:
        raise ScaleGuardError("automorphism search vertices", guard, graph.vertex_count)
    searcher = _Searcher(graph)

    path: List[Tuple[Coloring, List[int]]] = []
    coloring = searcher.refine(graph.colors)
    invariants = [searcher.invariant(coloring)]
    cell = _target_cell(coloring)
    while cell is not None:
        path.append((coloring, cell))
        coloring = searcher.refine(_individualize(coloring, cell[0]))
        invariants.append(searcher.invariant(coloring))
        cell = _target_cell(coloring)
    base_leaf = coloring

    generators: List[Permutation] = []
    orbit_lengths: List[int] = []
    for level in reversed(range(len(path))):
        node, cell = path[level]
        uf = UnionFind(graph.vertex_count)
        for g in generators:
            for point, image in enumerate(g.images):
                uf.union(point, image)
        base = cell[0]
        rejected: List[int] = []
        for v in cell[1:]:
            if uf.find(v) == uf.find(base):
                continue
            if any(uf.find(v) == uf.find(w) for w in rejected):
                continue
            found = searcher.find_automorphism(node, v, level + 1, invariants, base_leaf)
            if found is None:
                rejected.append(v)
                continue
            generators.append(found)
            for point, image in enumerate(found.images):
                uf.union(point, image)
        orbit_lengths.append(sum(1 for v in cell if uf.find(v) == uf.find(base)))

    order = 1
    for length in orbit_lengths:
        order *= length
    orbit_lengths.reverse()
    logger.info(
        "automorphism search: %d generators, order %d, %d tree nodes",
        len(generators),
        order,
        searcher.nodes,
    )
    return SearchResult(
        group=PermGroup(graph.vertex_count, tuple(generators)),
        order=order,
        orbit_lengths=orbit_lengths,
        nodes=searcher.nodes,
    )


def automorphism_generators(graph: ColoredGraph, guard: int = SEARCH_GUARD) -> PermGroup:
    return automorphism_search(graph, guard).group


def brute_force_automorphisms(
    graph: ColoredGraph, guard: int = BRUTE_FORCE_GUARD
) -> List[Permutation]:
    """Every color- and edge-preserving bijection, by backtracking within color classes."""
    classes = Counter(graph.colors)
    candidates = 1
    for size in classes.values():
        candidates *= math.factorial(size)
        if candidates > guard:
            raise ScaleGuardError("brute force candidate maps", guard, candidates)

    n = graph.vertex_count
    adjacency = [set(neighbors) for neighbors in graph.adjacency()]
    by_color: Dict[int, List[int]] = {}
    for v, c in enumerate(graph.colors):
        by_color.setdefault(c, []).append(v)

    found: List[Permutation] = []
    images = [-1] * n
    used = [False] * n

    def extend(v: int) -> None:
        if v == n:
            found.append(Permutation(tuple(images)))
            return
        for w in by_color[graph.colors[v]]:
            if used[w]:
                continue
            if any((u in adjacency[v]) != (images[u] in adjacency[w]) for u in range(v)):
                continue
            images[v] = w
            used[w] = True
            extend(v + 1)
            used[w] = False
        images[v] = -1

    extend(0)
    return sorted(found, key=lambda p: p.images)


def _positive_vertices(graph: ColoredGraph) -> Dict[int, int]:
    return {
        role.index: v
        for v, role in enumerate(graph.provenance)
        if role.kind in (VertexKind.POSITIVE, VertexKind.POINT)
    }


def restrict_to_variables(group: PermGroup, graph: ColoredGraph) -> PermGroup:
    """Project graph automorphisms onto variables via the unnegated literal vertices."""
    vertex_of = _positive_vertices(graph)
    variable_of = {v: i for i, v in vertex_of.items()}
    count = len(vertex_of)
    projected: List[Permutation] = []
    for g in group.generators:
        images = []
        for variable in range(count):
            image = g.images[vertex_of[variable]]
            if image not in variable_of:
                raise ConsistencyError(
                    f"automorphism maps literal vertex {vertex_of[variable]} to non-literal {image}"
                )
            images.append(variable_of[image])
        if len(set(images)) != count:
            raise ConsistencyError("projected permutation is not a bijection")
        p = Permutation(tuple(images))
        if not p.is_identity and p not in projected:
            projected.append(p)
    return PermGroup(count, tuple(projected))


@dataclass
class OrbitReport:
    variable_classes: List[Tuple[str, ...]]
    feature_classes: List[Tuple[str, ...]]

    @property
    def variable_orbit_count(self) -> int:
        return len(self.variable_classes)

    @property
    def feature_orbit_count(self) -> int:
        return len(self.feature_classes)


def orbit_report(group: PermGroup, graph: ColoredGraph) -> OrbitReport:
    """Orbit partition of variables and features, labeled by vertex provenance."""
    partition = point_orbits(group)
    variables: List[Tuple[str, ...]] = []
    features: List[Tuple[str, ...]] = []
    for members in partition.classes:
        kind = graph.provenance[members[0]].kind
        names = tuple(_short_label(graph.labels[v]) for v in members)
        if kind in (VertexKind.POSITIVE, VertexKind.POINT):
            variables.append(names)
        elif kind is VertexKind.CLAUSE:
            features.append(names)
    return OrbitReport(variable_classes=variables, feature_classes=features)


def _short_label(label: str) -> str:
    return label[2:] if label.startswith("v_") else label


def _clause_key(clause: WeightedClause, mapping: Sequence[int]) -> Tuple:
    literals = frozenset((mapping[lit.variable], lit.negated) for lit in clause.literals)
    return literals, clause.weight


def is_clause_set_symmetry(s: WeightedClauseSet, variable_perm: Permutation) -> bool:
    """True iff renaming variables by the permutation leaves S (and its evidence) unchanged."""
    mapping = variable_perm.images
    identity = list(range(s.variable_count))
    before = Counter(_clause_key(c, identity) for c in s.clauses)
    after = Counter(_clause_key(c, mapping) for c in s.clauses)
    if before != after:
        return False
    moved_evidence = {mapping[v]: value for v, value in s.evidence.items()}
    return moved_evidence == dict(s.evidence)


def clause_set_automorphisms(
    s: WeightedClauseSet, guard: int = CLAUSE_SET_GUARD
) -> List[Tuple[Permutation, Permutation]]:
    """
    Every (variable permutation, clause permutation) pair mapping S onto itself
    with clause i sent to a clause of equal literals and weight. Exhaustive.
    """
    n, m = s.variable_count, len(s.clauses)
    candidates = math.factorial(n) * math.factorial(m)
    if candidates > guard:
        raise ScaleGuardError("clause set permutations", guard, candidates)
    keys = [_clause_key(c, list(range(n))) for c in s.clauses]
    result = []
    for variable_images in itertools.permutations(range(n)):
        mapped = [_clause_key(c, variable_images) for c in s.clauses]
        if Counter(mapped) != Counter(keys):
            continue
        if {variable_images[v]: value for v, value in s.evidence.items()} != dict(s.evidence):
            continue
        for clause_images in itertools.permutations(range(m)):
            if all(mapped[i] == keys[clause_images[i]] for i in range(m)):
                result.append((Permutation(variable_images), Permutation(clause_images)))
    return result
