"""
Orbital - Generating Set Files

    domain <n>
    name <index> <label>
    (a b)(c d)
    ...

Name indices are 0-based points. Without name lines, points in the cycle
lines are 0-based integers. Each remaining line is one generator.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import ParseError
from ..perm import PermGroup, Permutation, format_cycles, parse_cycles


def parse_generators(text: str) -> Tuple[PermGroup, Optional[List[str]]]:
    """Returns the group and the name table (None when no name lines are given)."""
    domain: Optional[int] = None
    names: Optional[List[str]] = None
    cycle_lines: List[Tuple[int, str]] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "domain":
            if domain is not None or len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError("expected a single 'domain <n>' line", line=number)
            domain = int(tokens[1])
        elif tokens[0] == "name":
            if domain is None:
                raise ParseError("'name' before 'domain'", line=number)
            if len(tokens) != 3 or not tokens[1].isdigit() or int(tokens[1]) >= domain:
                raise ParseError("expected 'name <index> <label>'", line=number)
            if names is None:
                names = [str(i) for i in range(domain)]
            names[int(tokens[1])] = tokens[2]
        else:
            if domain is None:
                raise ParseError("generator before 'domain'", line=number)
            cycle_lines.append((number, line))

    if domain is None:
        raise ParseError("missing 'domain <n>' line")
    if names is not None and len(set(names)) != len(names):
        raise ParseError("point names must be distinct")

    generators: List[Permutation] = []
    for number, line in cycle_lines:
        try:
            generators.append(parse_cycles(line, domain, names))
        except ParseError as e:
            raise ParseError(str(e), line=number) from None
    return PermGroup(domain, tuple(generators)), names


def read_generators(path: Union[str, Path]) -> Tuple[PermGroup, Optional[List[str]]]:
    return parse_generators(Path(path).read_text(encoding="utf-8"))


def format_generators(group: PermGroup, names: Optional[Sequence[str]] = None) -> str:
    lines = [f"domain {group.domain_size}"]
    if names is not None:
        lines.extend(f"name {i} {label}" for i, label in enumerate(names))
    lines.extend(format_cycles(g, names) for g in group.generators)
    return "\n".join(lines) + "\n"
