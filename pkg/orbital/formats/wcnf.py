"""
Orbital - Weighted Clause Files

Text format:

    c comment
    p wcnf <variables> <clauses>
    <weight|H> <+-literal> ... 0
    e <variable> <0|1>

Variables are 1-based; ``H`` marks a hard clause; ``e`` lines give evidence.
"""

import math
from pathlib import Path
from typing import Dict, List, Union

from ..errors import ContractError, ParseError
from ..perm import letter_names
from ..symmetry import Literal, WeightedClause, WeightedClauseSet
from .records import read_header, to_int


def _weight(token: str, line: int) -> float:
    if token == "H":
        return math.inf
    try:
        weight = float(token)
    except ValueError:
        raise ParseError(f"bad clause weight '{token}'", line=line) from None
    if not math.isfinite(weight):
        raise ParseError("soft clause weight must be finite (use H for hard)", line=line)
    return weight


def parse_wcnf(text: str) -> WeightedClauseSet:
    variable_count, clause_count, lines = read_header(text, "wcnf")
    clauses: List[WeightedClause] = []
    evidence: Dict[int, bool] = {}

    for number, tokens in lines:
        if tokens[0] == "p":
            raise ParseError("duplicate header", line=number)
        if tokens[0] == "e":
            if len(tokens) != 3 or tokens[2] not in ("0", "1"):
                raise ParseError("evidence line must be 'e <variable> <0|1>'", line=number)
            variable = to_int(tokens[1], number, 2)
            if not 1 <= variable <= variable_count:
                raise ParseError(f"evidence on unknown variable {variable}", line=number)
            evidence[variable - 1] = tokens[2] == "1"
            continue

        if tokens[-1] != "0":
            raise ParseError("clause must end with 0", line=number)
        weight = _weight(tokens[0], number)
        literals = []
        for field, token in enumerate(tokens[1:-1], start=2):
            value = to_int(token, number, field)
            if value == 0 or abs(value) > variable_count:
                raise ParseError(f"literal {value} outside 1..{variable_count}", line=number)
            literals.append(Literal(abs(value) - 1, value < 0))
        try:
            clauses.append(WeightedClause(tuple(literals), weight))
        except ContractError as e:
            raise ParseError(str(e), line=number) from None

    if len(clauses) != clause_count:
        raise ParseError(f"header declares {clause_count} clauses, found {len(clauses)}")
    return WeightedClauseSet(tuple(letter_names(variable_count)), tuple(clauses), evidence)


def read_wcnf(path: Union[str, Path]) -> WeightedClauseSet:
    return parse_wcnf(Path(path).read_text(encoding="utf-8"))


def format_wcnf(s: WeightedClauseSet) -> str:
    lines = [f"p wcnf {s.variable_count} {len(s.clauses)}"]
    for clause in s.clauses:
        lines.append(f"{clause} 0")
    for variable, value in sorted(s.evidence.items()):
        lines.append(f"e {variable + 1} {int(value)}")
    return "\n".join(lines) + "\n"
