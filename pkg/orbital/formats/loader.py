"""
Orbital - Input Loader

Detects the input format from its ``p`` header line and dispatches to the
matching reader.

Supported formats:
- weighted clause sets (``p wcnf``)
- colored graphs (``p cgraph``)
- plain graphs (``p edge``)
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from ..errors import ContractError, ParseError
from ..models import ClauseModel, Graph, IndependentSetModel, Model
from ..symmetry import ColoredGraph, WeightedClauseSet, build_colored_graph, graph_to_colored
from .cgraph import parse_cgraph
from .edges import parse_edges
from .records import records
from .wcnf import parse_wcnf

logger = logging.getLogger(__name__)

FORMATS = ("wcnf", "cgraph", "edge")


def detect_format(text: str) -> str:
    for number, tokens in records(text):
        if tokens[0] == "p" and len(tokens) >= 2 and tokens[1] in FORMATS:
            return tokens[1]
        raise ParseError(
            "first line must be a 'p wcnf', 'p cgraph' or 'p edge' header", line=number
        )
    raise ParseError("empty input")


@dataclass
class LoadedInput:
    """A parsed input file; exactly one of the three payloads is set."""

    kind: str
    clause_set: Optional[WeightedClauseSet] = None
    colored: Optional[ColoredGraph] = None
    graph: Optional[Graph] = None

    def colored_graph(self, evidence: bool = True) -> ColoredGraph:
        """The colored graph whose automorphisms are the input's symmetries."""
        if self.clause_set is not None:
            s = self.clause_set if evidence else self.clause_set.without_evidence()
            return build_colored_graph(s)
        if self.graph is not None:
            return graph_to_colored(self.graph)
        assert self.colored is not None
        return self.colored

    def model(self, lam: float = 1.0) -> Model:
        if self.clause_set is not None:
            return ClauseModel(self.clause_set)
        if self.graph is not None:
            return IndependentSetModel(self.graph, lam)
        raise ContractError("a colored graph file defines no distribution to sample")


def load_input(path: Union[str, Path]) -> LoadedInput:
    text = Path(path).read_text(encoding="utf-8")
    kind = detect_format(text)
    logger.debug("%s: detected %s format", path, kind)
    if kind == "wcnf":
        return LoadedInput(kind, clause_set=parse_wcnf(text))
    if kind == "cgraph":
        return LoadedInput(kind, colored=parse_cgraph(text))
    return LoadedInput(kind, graph=parse_edges(text))


def load_model_file(path: Union[str, Path], lam: float = 1.0) -> Model:
    """Clause files become clause models, graph files independent-set models."""
    return load_input(path).model(lam)
