"""
Orbital - Graph Files

DIMACS-like ``p edge <vertices> <edges>`` header followed by ``e <u> <v>``
lines with 1-based vertices.
"""

from pathlib import Path
from typing import List, Set, Tuple, Union

from ..errors import ParseError
from ..models import Graph
from .records import read_header, vertex


def parse_edges(text: str) -> Graph:
    n, m, lines = read_header(text, "edge")
    edges: List[Tuple[int, int]] = []
    seen: Set[Tuple[int, int]] = set()
    for number, tokens in lines:
        if tokens[0] != "e" or len(tokens) != 3:
            raise ParseError(f"expected 'e <u> <v>', got '{' '.join(tokens)}'", line=number)
        u, v = vertex(tokens[1], n, number, 2), vertex(tokens[2], n, number, 3)
        if u == v:
            raise ParseError(f"self-loop at vertex {u + 1}", line=number)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {u + 1} {v + 1}", line=number)
        seen.add(key)
        edges.append(key)
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def read_edges(path: Union[str, Path]) -> Graph:
    return parse_edges(Path(path).read_text(encoding="utf-8"))


def format_edges(g: Graph) -> str:
    edges = g.edges()
    lines = [f"p edge {g.vertex_count} {len(edges)}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"
