"""
Tests for orbital.formats: clause, graph, generator and table files.
"""

import os
import tempfile
import unittest

from orbital.errors import ContractError, ParseError
from orbital.formats.cgraph import format_cgraph, parse_cgraph, read_cgraph
from orbital.formats.edges import format_edges, parse_edges, read_edges
from orbital.formats.generators import format_generators, parse_generators, read_generators
from orbital.formats.loader import detect_format, load_input, load_model_file
from orbital.formats.tables import (
    bits_to_state,
    read_curves_csv,
    read_distribution_csv,
    read_trajectory,
    state_to_bits,
    write_curves_csv,
    write_distribution_csv,
    write_trajectory,
)
from orbital.formats.wcnf import format_wcnf, parse_wcnf, read_wcnf
from orbital.models import (
    ClauseModel,
    ExactDistribution,
    IndependentSetModel,
    enumerate_distribution,
    grid_graph,
    symmetric_pair_model,
)
from orbital.perm import format_cycles
from orbital.symmetry import HARD

EXAMPLE_WCNF = """c two clauses sharing not-c
p wcnf 3 2
0.5 1 -3 0
0.5 2 -3 0
"""

PATH_CGRAPH = """p cgraph 3 2
n 1 7
n 3 7
e 1 2
e 2 3
"""


def write(tmpdir, name, text):
    path = os.path.join(tmpdir, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


class TestWcnf(unittest.TestCase):
    def test_parse_example(self):
        s = parse_wcnf(EXAMPLE_WCNF)
        self.assertEqual(s.variable_names, ("a", "b", "c"))
        self.assertEqual(len(s.clauses), 2)
        first = s.clauses[0]
        self.assertEqual(first.weight, 0.5)
        literals = [(lit.variable, lit.negated) for lit in first.literals]
        self.assertEqual(literals, [(0, False), (2, True)])

    def test_hard_clause_and_evidence(self):
        s = parse_wcnf("p wcnf 2 1\nH 1 2 0\ne 2 0\n")
        self.assertEqual(s.clauses[0].weight, HARD)
        self.assertEqual(dict(s.evidence), {1: False})

    def test_format(self):
        expected = "p wcnf 3 2\n0.5 1 -3 0\n0.5 2 -3 0\n"
        self.assertEqual(format_wcnf(parse_wcnf(EXAMPLE_WCNF)), expected)

    def test_format_hard_and_evidence(self):
        text = "p wcnf 2 1\nH 1 -2 0\ne 1 1\n"
        self.assertEqual(format_wcnf(parse_wcnf(text)), text)

    def test_missing_terminator(self):
        with self.assertRaises(ParseError) as ctx:
            parse_wcnf("p wcnf 2 1\n1.0 1 2\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_literal_out_of_range(self):
        with self.assertRaises(ParseError) as ctx:
            parse_wcnf("p wcnf 2 1\n1.0 3 0\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_duplicate_literal(self):
        with self.assertRaises(ParseError) as ctx:
            parse_wcnf("c\np wcnf 2 1\n1.0 1 1 0\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_bad_weight(self):
        with self.assertRaises(ParseError):
            parse_wcnf("p wcnf 1 1\nheavy 1 0\n")
        with self.assertRaises(ParseError):
            parse_wcnf("p wcnf 1 1\ninf 1 0\n")

    def test_clause_count_mismatch(self):
        with self.assertRaises(ParseError):
            parse_wcnf("p wcnf 2 2\n1.0 1 0\n")

    def test_bad_evidence(self):
        with self.assertRaises(ParseError) as ctx:
            parse_wcnf("p wcnf 2 0\ne 1 2\n")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError):
            parse_wcnf("p wcnf 2 0\ne 5 1\n")

    def test_missing_header(self):
        with self.assertRaises(ParseError):
            parse_wcnf("c only a comment\n")
        with self.assertRaises(ParseError):
            parse_wcnf("1.0 1 0\n")

    def test_read_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            s = read_wcnf(write(tmpdir, "example.wcnf", EXAMPLE_WCNF))
            self.assertEqual(s.variable_count, 3)


class TestCgraph(unittest.TestCase):
    def test_parse(self):
        graph = parse_cgraph(PATH_CGRAPH)
        self.assertEqual(graph.vertex_count, 3)
        self.assertEqual(graph.colors, (1, 0, 1))
        self.assertEqual(graph.edges, frozenset({(0, 1), (1, 2)}))

    def test_unlisted_vertices_get_color_zero(self):
        graph = parse_cgraph("p cgraph 2 0\nn 2 0\n")
        self.assertEqual(graph.colors, (0, 0))

    def test_format(self):
        text = format_cgraph(parse_cgraph(PATH_CGRAPH))
        self.assertEqual(text, "p cgraph 3 2\nn 1 1\nn 2 0\nn 3 1\ne 1 2\ne 2 3\n")

    def test_self_loop(self):
        with self.assertRaises(ParseError) as ctx:
            parse_cgraph("p cgraph 2 1\ne 1 1\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_duplicate_edge(self):
        with self.assertRaises(ParseError) as ctx:
            parse_cgraph("p cgraph 2 2\ne 1 2\ne 2 1\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_vertex_out_of_range(self):
        with self.assertRaises(ParseError):
            parse_cgraph("p cgraph 2 1\ne 1 3\n")

    def test_unexpected_line(self):
        with self.assertRaises(ParseError):
            parse_cgraph("p cgraph 2 0\nx 1 2\n")

    def test_wrong_kind(self):
        with self.assertRaises(ParseError):
            parse_cgraph("p edge 2 0\n")

    def test_read_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            graph = read_cgraph(write(tmpdir, "path.cgraph", PATH_CGRAPH))
            self.assertEqual(len(graph.edges), 2)


class TestEdges(unittest.TestCase):
    def test_parse(self):
        g = parse_edges("p edge 3 2\ne 1 2\ne 2 3\n")
        self.assertEqual(g.edges(), [(0, 1), (1, 2)])
        self.assertEqual(g.names, ("a", "b", "c"))

    def test_format_grid(self):
        g = grid_graph(2)
        self.assertEqual(format_edges(g), "p edge 4 4\ne 1 2\ne 1 3\ne 2 4\ne 3 4\n")
        self.assertEqual(parse_edges(format_edges(g)), g)

    def test_edge_count_mismatch(self):
        with self.assertRaises(ParseError):
            parse_edges("p edge 3 2\ne 1 2\n")

    def test_malformed_edge(self):
        with self.assertRaises(ParseError) as ctx:
            parse_edges("p edge 3 1\ne 1\n")
        self.assertEqual(ctx.exception.line, 2)

    def test_read_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            g = read_edges(write(tmpdir, "triangle.edge", "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"))
            self.assertEqual(g.max_degree, 2)


class TestGenerators(unittest.TestCase):
    def test_parse_named(self):
        text = "# grid reflections\ndomain 3\nname 0 x\nname 1 y\nname 2 z\n(x z)\n"
        group, names = parse_generators(text)
        self.assertEqual(names, ["x", "y", "z"])
        self.assertEqual([g.images for g in group.generators], [(2, 1, 0)])

    def test_parse_numbers(self):
        group, names = parse_generators("domain 4\n(0 1)(2 3)\n(0 2)\n")
        self.assertIsNone(names)
        self.assertEqual(len(group.generators), 2)
        self.assertEqual(format_cycles(group.generators[0]), "(0 1)(2 3)")

    def test_format(self):
        group, names = parse_generators("domain 2\nname 0 p\nname 1 q\n(p q)\n")
        self.assertEqual(format_generators(group, names), "domain 2\nname 0 p\nname 1 q\n(p q)\n")

    def test_cycle_error_reports_line(self):
        with self.assertRaises(ParseError) as ctx:
            parse_generators("domain 3\n(0 1)\n(0 5)\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_missing_domain(self):
        with self.assertRaises(ParseError):
            parse_generators("(0 1)\n")
        with self.assertRaises(ParseError):
            parse_generators("# nothing\n")

    def test_name_before_domain(self):
        with self.assertRaises(ParseError):
            parse_generators("name 0 a\ndomain 2\n")

    def test_duplicate_names(self):
        with self.assertRaises(ParseError):
            parse_generators("domain 2\nname 0 a\nname 1 a\n")

    def test_read_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            group, _ = read_generators(write(tmpdir, "g.gens", "domain 2\n(0 1)\n"))
            self.assertEqual(group.domain_size, 2)


class TestTables(unittest.TestCase):
    def test_bits(self):
        self.assertEqual(state_to_bits((1, 0, 1)), "101")
        self.assertEqual(bits_to_state("0110"), (0, 1, 1, 0))

    def test_bad_bits(self):
        with self.assertRaises(ParseError):
            bits_to_state("01a")
        with self.assertRaises(ParseError):
            bits_to_state("")

    def test_distribution_csv(self):
        pi = enumerate_distribution(symmetric_pair_model())
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "pi.csv")
            write_distribution_csv(pi, path)
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], "state,probability")
            self.assertTrue(lines[2].startswith("01,"))
            expected = ExactDistribution(pi.support, pi.probabilities)
            self.assertEqual(read_distribution_csv(path), expected)

    def test_distribution_csv_bad_header(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write(tmpdir, "pi.csv", "x,p\n0,1.0\n")
            with self.assertRaises(ParseError):
                read_distribution_csv(path)

    def test_trajectory_thinning(self):
        states = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 0)]
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "trace.txt")
            written = write_trajectory(states, path, header="kernel=gibbs", thin=2)
            self.assertEqual(written, 2)
            with open(path, encoding="utf-8") as f:
                self.assertEqual(f.read(), "# kernel=gibbs\n01\n11\n")
            self.assertEqual(read_trajectory(path), [(0, 1), (1, 1)])

    def test_trajectory_invalid_thin(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            with self.assertRaises(ContractError):
                write_trajectory([], os.path.join(tmpdir, "t.txt"), thin=0)

    def test_curves_csv(self):
        class Curve:
            def rows(self):
                return [("orbital", "3", 10, 0.5, 0.25), ("orbital", "3", 20, 1.0, 0.125)]

        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "curves.csv")
            write_curves_csv([Curve()], path)
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], "kernel,seed,samples,wall_seconds,tv")
            self.assertEqual(lines[1], "orbital,3,10,0.500000,0.25")
            self.assertEqual(
                read_curves_csv(path),
                [("orbital", "3", 10, 0.5, 0.25), ("orbital", "3", 20, 1.0, 0.125)],
            )

    def test_curves_csv_malformed_row(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            text = "kernel,seed,samples,wall_seconds,tv\ngibbs,1,ten,0.1,0.5\n"
            path = write(tmpdir, "c.csv", text)
            with self.assertRaises(ParseError) as ctx:
                read_curves_csv(path)
            self.assertEqual(ctx.exception.line, 2)


class TestLoader(unittest.TestCase):
    def test_detect(self):
        self.assertEqual(detect_format(EXAMPLE_WCNF), "wcnf")
        self.assertEqual(detect_format(PATH_CGRAPH), "cgraph")
        self.assertEqual(detect_format("p edge 1 0\n"), "edge")

    def test_detect_unknown(self):
        with self.assertRaises(ParseError):
            detect_format("p dimacs 1 0\n")
        with self.assertRaises(ParseError):
            detect_format("")

    def test_load_clause_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            loaded = load_input(write(tmpdir, "s.wcnf", EXAMPLE_WCNF + "e 1 1\n"))
            self.assertEqual(loaded.kind, "wcnf")
            self.assertIsInstance(loaded.model(), ClauseModel)
            with_evidence = loaded.colored_graph()
            without = loaded.colored_graph(evidence=False)
            self.assertEqual(with_evidence.color_count, without.color_count + 1)

    def test_load_graph_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            model = load_model_file(write(tmpdir, "g.edges", "p edge 2 1\ne 1 2\n"), lam=2.0)
            self.assertIsInstance(model, IndependentSetModel)
            self.assertEqual(model.lam, 2.0)

    def test_colored_graph_has_no_model(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            loaded = load_input(write(tmpdir, "g.cgraph", PATH_CGRAPH))
            self.assertEqual(loaded.colored_graph().colors, (1, 0, 1))
            with self.assertRaises(ContractError):
                loaded.model()

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_input("/nonexistent/orbital/input.wcnf")


if __name__ == "__main__":
    unittest.main()
