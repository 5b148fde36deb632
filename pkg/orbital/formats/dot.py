"""
Orbital - DOT Exporter

Export a ColoredGraph to Graphviz DOT format, one fill color per color class.
"""

from ..symmetry import ColoredGraph, VertexKind

PALETTE = [
    "#EF9A9A",
    "#A5D6A7",
    "#FFF59D",
    "#90CAF9",
    "#CE93D8",
    "#FFCC80",
    "#80DEEA",
    "#BCAAA4",
]


def export_dot(graph: ColoredGraph, name: str = "G") -> str:
    """
    Export graph to Graphviz DOT format.

    Literal vertices are drawn as circles, clause vertices as boxes.

    Returns:
        DOT diagram string.
    """
    lines = [
        f'graph "{name}" {{',
        '    node [style=filled, fontname="Arial"];',
        "",
    ]

    for v in range(graph.vertex_count):
        color = PALETTE[graph.colors[v] % len(PALETTE)]
        shape = "box" if graph.provenance[v].kind is VertexKind.CLAUSE else "circle"
        label = graph.labels[v].replace("~", "¬")
        lines.append(
            f'    {v} [label="{label}", shape={shape}, fillcolor="{color}", '
            f'comment="color {graph.colors[v]}"];'
        )

    lines.append("")

    for u, v in sorted(graph.edges):
        lines.append(f"    {u} -- {v};")

    lines.append("}")

    return "\n".join(lines)


def save_dot(graph: ColoredGraph, file_path: str, name: str = "G") -> None:
    """Save graph as DOT file."""
    content = export_dot(graph, name)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(content)
