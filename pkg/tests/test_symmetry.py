"""
Tests for orbital.symmetry: colored graphs and automorphism search.
"""

import random
import unittest

from orbital.errors import ContractError, ScaleGuardError
from orbital.models import Graph, complete_graph_model, connected_cliques, grid_graph
from orbital.perm import (
    PermGroup,
    format_cycles,
    group_elements,
    parse_cycles,
    point_orbits,
    state_orbit_census,
)
from orbital.symmetry import (
    HARD,
    ColoredGraph,
    Literal,
    VertexKind,
    WeightedClause,
    WeightedClauseSet,
    automorphism_generators,
    automorphism_search,
    brute_force_automorphisms,
    build_colored_graph,
    clause_set_automorphisms,
    graph_to_colored,
    is_clause_set_symmetry,
    is_equitable,
    orbit_report,
    refine_colors,
    restrict_to_variables,
)


def example_clause_set(weights=(0.5, 0.5), evidence=None):
    """{(a or not c, w1), (b or not c, w2)} over a, b, c."""
    a, b, c = Literal(0), Literal(1), Literal(2, negated=True)
    return WeightedClauseSet(
        variable_names=("a", "b", "c"),
        clauses=(WeightedClause((a, c), weights[0]), WeightedClause((b, c), weights[1])),
        evidence=evidence or {},
    )


def random_colored_graph(rng, n, color_count, p):
    colors = [rng.randrange(color_count) for _ in range(n)]
    ranks = {c: i for i, c in enumerate(sorted(set(colors)))}
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
    return ColoredGraph(n, tuple(ranks[c] for c in colors), frozenset(edges))


def random_clause_set(rng):
    n = rng.randint(1, 4)
    clauses = []
    for _ in range(rng.randint(0, 4)):
        variables = rng.sample(range(n), rng.randint(1, min(2, n)))
        literals = tuple(Literal(v, rng.random() < 0.5) for v in variables)
        clauses.append(WeightedClause(literals, rng.choice([0.5, 1.0, HARD])))
    evidence = {}
    if rng.random() < 0.3:
        evidence[rng.randrange(n)] = rng.random() < 0.5
    names = tuple("abcd"[:n])
    return WeightedClauseSet(names, tuple(clauses), evidence)


def element_set(group):
    return {g.images for g in group_elements(group)}


class TestClauseSet(unittest.TestCase):
    def test_duplicate_literal_rejected(self):
        with self.assertRaises(ContractError):
            WeightedClause((Literal(0), Literal(0)), 1.0)

    def test_literal_outside_variables(self):
        with self.assertRaises(ContractError):
            WeightedClauseSet(("a",), (WeightedClause((Literal(3),), 1.0),))

    def test_evidence_on_unknown_variable(self):
        with self.assertRaises(ContractError):
            WeightedClauseSet(("a",), (), {4: True})

    def test_satisfied_by(self):
        clause = WeightedClause((Literal(0), Literal(2, negated=True)), 0.5)
        self.assertTrue(clause.satisfied_by((1, 0, 1)))
        self.assertTrue(clause.satisfied_by((0, 0, 0)))
        self.assertFalse(clause.satisfied_by((0, 1, 1)))


class TestBuildColoredGraph(unittest.TestCase):
    def test_example_layout(self):
        graph = build_colored_graph(example_clause_set())
        self.assertEqual(graph.vertex_count, 8)
        self.assertEqual(len(graph.edges), 7)
        self.assertEqual(graph.color_count, 3)
        self.assertEqual(
            graph.labels, ("v_a", "v_b", "v_c", "v_~a", "v_~b", "v_~c", "v_f1", "v_f2")
        )
        self.assertEqual(graph.colors, (1, 1, 1, 0, 0, 0, 2, 2))

    def test_clause_edges(self):
        graph = build_colored_graph(example_clause_set())
        self.assertIn((0, 6), graph.edges)
        self.assertIn((5, 6), graph.edges)
        self.assertIn((1, 7), graph.edges)
        self.assertIn((5, 7), graph.edges)

    def test_provenance(self):
        graph = build_colored_graph(example_clause_set())
        self.assertIs(graph.provenance[0].kind, VertexKind.POSITIVE)
        self.assertIs(graph.provenance[4].kind, VertexKind.NEGATIVE)
        self.assertEqual(graph.provenance[7].kind, VertexKind.CLAUSE)
        self.assertEqual(graph.provenance[7].index, 1)

    def test_empty_clause_set(self):
        graph = build_colored_graph(WeightedClauseSet(("a",)))
        self.assertEqual(graph.vertex_count, 2)
        self.assertEqual(len(graph.edges), 1)
        self.assertEqual(graph.color_count, 2)

    def test_distinct_weights_get_distinct_colors(self):
        graph = build_colored_graph(example_clause_set(weights=(0.5, 0.7)))
        self.assertNotEqual(graph.colors[6], graph.colors[7])
        self.assertEqual(graph.color_count, 4)

    def test_hard_clause_color(self):
        graph = build_colored_graph(example_clause_set(weights=(0.5, HARD)))
        self.assertEqual(graph.colors[6], 2)
        self.assertEqual(graph.colors[7], 3)

    def test_evidence_recolors_positive_literal(self):
        graph = build_colored_graph(example_clause_set(evidence={0: True}))
        self.assertNotEqual(graph.colors[0], graph.colors[1])
        self.assertEqual(graph.colors[3], graph.colors[4])
        self.assertTrue(graph.provenance[0].evidence)

    def test_without_evidence(self):
        s = example_clause_set(evidence={0: True})
        self.assertEqual(dict(s.without_evidence().evidence), {})


class TestColoredGraph(unittest.TestCase):
    def test_self_loop_rejected(self):
        with self.assertRaises(ContractError):
            ColoredGraph(2, (0, 0), frozenset({(1, 1)}))

    def test_edge_outside(self):
        with self.assertRaises(ContractError):
            ColoredGraph(2, (0, 0), frozenset({(0, 5)}))

    def test_sparse_colors_rejected(self):
        with self.assertRaises(ContractError):
            ColoredGraph(2, (0, 2), frozenset())

    def test_edges_normalized(self):
        graph = ColoredGraph(2, (0, 0), frozenset({(1, 0)}))
        self.assertEqual(graph.edges, frozenset({(0, 1)}))

    def test_grid_conversion(self):
        graph = graph_to_colored(grid_graph(3))
        self.assertEqual(graph.vertex_count, 9)
        self.assertEqual(len(graph.edges), 12)
        self.assertEqual(graph.color_count, 1)

    def test_complete_conversion(self):
        graph = graph_to_colored(complete_graph_model(3))
        self.assertEqual(len(graph.edges), 36)

    def test_empty_graph_conversion(self):
        graph = graph_to_colored(Graph.from_edges(3, []))
        self.assertEqual(graph.edges, frozenset())


class TestRefinement(unittest.TestCase):
    def test_path_ends_separate_from_middle(self):
        graph = ColoredGraph(3, (0, 0, 0), frozenset({(0, 1), (1, 2)}))
        coloring = refine_colors(graph)
        self.assertEqual(coloring[0], coloring[2])
        self.assertNotEqual(coloring[0], coloring[1])

    def test_complete_graph_stays_one_cell(self):
        graph = graph_to_colored(complete_graph_model(2))
        self.assertEqual(len(set(refine_colors(graph))), 1)

    def test_example_cells(self):
        graph = build_colored_graph(example_clause_set())
        coloring = refine_colors(graph)
        self.assertEqual(len(set(coloring)), 5)
        self.assertEqual(coloring[0], coloring[1])
        self.assertNotEqual(coloring[0], coloring[2])
        self.assertEqual(coloring[3], coloring[4])
        self.assertNotEqual(coloring[3], coloring[5])

    def test_output_is_equitable(self):
        rng = random.Random(3)
        for _ in range(50):
            graph = random_colored_graph(rng, rng.randint(1, 10), 2, 0.3)
            self.assertTrue(is_equitable(graph, refine_colors(graph)))

    def test_unrefined_coloring_not_equitable(self):
        graph = ColoredGraph(3, (0, 0, 0), frozenset({(0, 1), (1, 2)}))
        self.assertFalse(is_equitable(graph, (0, 0, 0)))

    def test_relabeling_invariance(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(2, 10)
            graph = random_colored_graph(rng, n, 3, 0.35)
            sigma = list(range(n))
            rng.shuffle(sigma)
            colors = [0] * n
            for v in range(n):
                colors[sigma[v]] = graph.colors[v]
            relabeled = ColoredGraph(
                n, tuple(colors), frozenset((sigma[u], sigma[v]) for u, v in graph.edges)
            )
            before, after = refine_colors(graph), refine_colors(relabeled)
            for v in range(n):
                self.assertEqual(before[v], after[sigma[v]])


class TestAutomorphismSearch(unittest.TestCase):
    def test_example_generator(self):
        graph = build_colored_graph(example_clause_set())
        result = automorphism_search(graph)
        self.assertEqual(result.order, 2)
        self.assertEqual(
            [format_cycles(g, graph.labels) for g in result.group.generators],
            ["(v_a v_b)(v_~a v_~b)(v_f1 v_f2)"],
        )

    def test_distinct_weights_trivial(self):
        graph = build_colored_graph(example_clause_set(weights=(0.5, 0.7)))
        self.assertTrue(automorphism_generators(graph).is_trivial)
        self.assertEqual(len(brute_force_automorphisms(graph)), 1)

    def test_grid_order(self):
        result = automorphism_search(graph_to_colored(grid_graph(3)))
        self.assertEqual(result.order, 8)
        self.assertEqual(len(element_set(result.group)), 8)

    def test_cliques_order(self):
        result = automorphism_search(graph_to_colored(connected_cliques(3)))
        self.assertEqual(result.order, 24)
        self.assertEqual(len(element_set(result.group)), 24)

    def test_complete_order(self):
        result = automorphism_search(graph_to_colored(complete_graph_model(3)))
        self.assertEqual(result.order, 362880)

    def test_generators_are_automorphisms(self):
        for model in (grid_graph(4), connected_cliques(4), complete_graph_model(3)):
            for g in automorphism_generators(graph_to_colored(model)).generators:
                self.assertTrue(model.is_symmetry(g))

    def test_guard(self):
        with self.assertRaises(ScaleGuardError):
            automorphism_search(graph_to_colored(grid_graph(3)), guard=4)

    def test_matches_brute_force_on_random_graphs(self):
        rng = random.Random(42)
        for _ in range(100):
            graph = random_colored_graph(rng, rng.randint(1, 7), rng.randint(1, 2), 0.4)
            expected = {p.images for p in brute_force_automorphisms(graph)}
            result = automorphism_search(graph)
            self.assertEqual(element_set(result.group), expected)
            self.assertEqual(result.order, len(expected))


class TestBruteForce(unittest.TestCase):
    def test_example(self):
        graph = build_colored_graph(example_clause_set())
        self.assertEqual(len(brute_force_automorphisms(graph)), 2)

    def test_single_edge(self):
        graph = ColoredGraph(2, (0, 0), frozenset({(0, 1)}))
        self.assertEqual(len(brute_force_automorphisms(graph)), 2)

    def test_rainbow_triangle(self):
        graph = ColoredGraph(3, (0, 1, 2), frozenset({(0, 1), (1, 2), (0, 2)}))
        self.assertEqual(len(brute_force_automorphisms(graph)), 1)

    def test_guard(self):
        graph = graph_to_colored(complete_graph_model(3))
        with self.assertRaises(ScaleGuardError):
            brute_force_automorphisms(graph, guard=1000)


class TestVariableGroup(unittest.TestCase):
    def test_example_projection(self):
        graph = build_colored_graph(example_clause_set())
        group = restrict_to_variables(automorphism_generators(graph), graph)
        self.assertEqual(group.domain_size, 3)
        self.assertEqual([format_cycles(g, ("a", "b", "c")) for g in group.generators], ["(a b)"])

    def test_trivial_projection(self):
        graph = build_colored_graph(example_clause_set())
        self.assertTrue(restrict_to_variables(PermGroup(8), graph).is_trivial)

    def test_evidence_breaks_symmetry(self):
        graph = build_colored_graph(example_clause_set(evidence={0: True}))
        self.assertTrue(restrict_to_variables(automorphism_generators(graph), graph).is_trivial)
        self.assertEqual(len(brute_force_automorphisms(graph)), 1)

    def test_symmetric_evidence_keeps_symmetry(self):
        graph = build_colored_graph(example_clause_set(evidence={0: True, 1: True}))
        group = restrict_to_variables(automorphism_generators(graph), graph)
        self.assertFalse(group.is_trivial)

    def test_clause_set_symmetry_check(self):
        s = example_clause_set()
        graph = build_colored_graph(s)
        for g in restrict_to_variables(automorphism_generators(graph), graph).generators:
            self.assertTrue(is_clause_set_symmetry(s, g))
        self.assertFalse(is_clause_set_symmetry(s, parse_cycles("(0 2)", 3)))

    def test_graph_and_clause_set_automorphisms_correspond(self):
        rng = random.Random(42)
        for _ in range(50):
            s = random_clause_set(rng)
            graph = build_colored_graph(s)
            group = restrict_to_variables(automorphism_generators(graph), graph)
            for g in group.generators:
                self.assertTrue(is_clause_set_symmetry(s, g))
            pairs = clause_set_automorphisms(s)
            self.assertEqual(len(pairs), len(brute_force_automorphisms(graph)))
            variable_images = {v.images for v, _ in pairs}
            self.assertEqual(element_set(group), variable_images)


class TestOrbitReport(unittest.TestCase):
    def test_example(self):
        graph = build_colored_graph(example_clause_set())
        report = orbit_report(automorphism_generators(graph), graph)
        self.assertEqual(report.variable_classes, [("a", "b"), ("c",)])
        self.assertEqual(report.feature_classes, [("f1", "f2")])
        self.assertEqual(report.variable_orbit_count, 2)
        self.assertEqual(report.feature_orbit_count, 1)

    def test_trivial_group(self):
        graph = build_colored_graph(example_clause_set())
        report = orbit_report(PermGroup(8), graph)
        self.assertEqual(report.variable_orbit_count, 3)
        self.assertEqual(report.feature_orbit_count, 2)

    def test_complete_graph_single_class(self):
        graph = graph_to_colored(complete_graph_model(3))
        report = orbit_report(automorphism_generators(graph), graph)
        self.assertEqual(report.variable_orbit_count, 1)
        self.assertEqual(len(report.variable_classes[0]), 9)

    def test_complete_graph_point_orbits(self):
        group = automorphism_generators(graph_to_colored(complete_graph_model(3)))
        self.assertEqual(point_orbits(group).classes, (tuple(range(9)),))


class TestModelStateOrbits(unittest.TestCase):
    def test_grid(self):
        group = automorphism_generators(graph_to_colored(grid_graph(3)))
        self.assertEqual(sum(state_orbit_census(group).values()), 102)

    def test_cliques(self):
        group = automorphism_generators(graph_to_colored(connected_cliques(3)))
        self.assertEqual(sum(state_orbit_census(group).values()), 70)

    def test_complete(self):
        group = automorphism_generators(graph_to_colored(complete_graph_model(3)))
        census = state_orbit_census(group)
        self.assertEqual(sum(census.values()), 10)
        self.assertEqual(set(census), {1, 9, 36, 84, 126})


if __name__ == "__main__":
    unittest.main()
