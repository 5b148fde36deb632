"""
Orbital - Colored Graph Files

    p cgraph <vertices> <edges>
    n <vertex> <color>
    e <u> <v>

Vertices are 1-based. Colors are any non-negative integers and are
renumbered densely in increasing order; vertices without an ``n`` line get
color 0.
"""

from pathlib import Path
from typing import List, Set, Tuple, Union

from ..errors import ContractError, ParseError
from ..symmetry import ColoredGraph
from .records import read_header, to_int, vertex


def parse_cgraph(text: str) -> ColoredGraph:
    n, m, lines = read_header(text, "cgraph")
    raw_colors = [0] * n
    edges: List[Tuple[int, int]] = []
    seen: Set[Tuple[int, int]] = set()

    for number, tokens in lines:
        if tokens[0] == "n" and len(tokens) == 3:
            color = to_int(tokens[2], number, 3)
            if color < 0:
                raise ParseError(f"negative color {color}", line=number)
            raw_colors[vertex(tokens[1], n, number, 2)] = color
        elif tokens[0] == "e" and len(tokens) == 3:
            u, v = vertex(tokens[1], n, number, 2), vertex(tokens[2], n, number, 3)
            if u == v:
                raise ParseError(f"self-loop at vertex {u + 1}", line=number)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(f"duplicate edge {u + 1} {v + 1}", line=number)
            seen.add(key)
            edges.append(key)
        else:
            raise ParseError(f"unexpected line '{' '.join(tokens)}'", line=number)

    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    rank = {c: i for i, c in enumerate(sorted(set(raw_colors)))}
    try:
        return ColoredGraph(n, tuple(rank[c] for c in raw_colors), frozenset(edges))
    except ContractError as e:
        raise ParseError(str(e)) from None


def read_cgraph(path: Union[str, Path]) -> ColoredGraph:
    return parse_cgraph(Path(path).read_text(encoding="utf-8"))


def format_cgraph(graph: ColoredGraph) -> str:
    lines = [f"p cgraph {graph.vertex_count} {len(graph.edges)}"]
    lines.extend(f"n {v + 1} {color}" for v, color in enumerate(graph.colors))
    lines.extend(f"e {u + 1} {v + 1}" for u, v in sorted(graph.edges))
    return "\n".join(lines) + "\n"
