"""
Orbital - Line Records

Shared tokenizer for the DIMACS-style text formats: blank lines and
``c`` comment lines are skipped, every other line is split on whitespace.
"""

from typing import Iterator, List, Tuple

from ..errors import ParseError

Record = Tuple[int, List[str]]


def records(text: str) -> Iterator[Record]:
    """Yield (1-based line number, tokens) for every content line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        yield number, tokens


def read_header(text: str, kind: str) -> Tuple[int, int, Iterator[Record]]:
    """Consume the ``p <kind> <a> <b>`` line; returns both counts and the remaining records."""
    lines = records(text)
    for number, tokens in lines:
        if tokens[0] != "p":
            raise ParseError(f"expected 'p {kind}' header before data", line=number)
        if len(tokens) != 4 or tokens[1] != kind:
            raise ParseError(f"malformed header, expected 'p {kind} <count> <count>'", line=number)
        return to_int(tokens[2], number, 3), to_int(tokens[3], number, 4), lines
    raise ParseError(f"missing 'p {kind}' header")


def to_int(token: str, line: int, field: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(
            f"expected an integer in field {field}, got '{token}'", line=line
        ) from None


def vertex(token: str, count: int, line: int, field: int) -> int:
    """Convert a 1-based vertex token to a 0-based index."""
    value = to_int(token, line, field)
    if not 1 <= value <= count:
        raise ParseError(f"vertex {value} outside 1..{count}", line=line)
    return value - 1
