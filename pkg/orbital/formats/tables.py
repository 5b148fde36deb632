"""
Orbital - Tables

CSV and plain-text outputs:
- exact distributions as ``state,probability``
- TV curves as ``kernel,seed,samples,wall_seconds,tv``
- trajectories as one state bitstring per line after a ``#`` header

States are written as bitstrings with vertex 0 as the most significant
(leftmost) character.
"""

import csv
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from ..errors import ContractError, ParseError
from ..models import ExactDistribution
from ..perm import State

PathLike = Union[str, Path]

DISTRIBUTION_HEADER = ["state", "probability"]
CURVE_HEADER = ["kernel", "seed", "samples", "wall_seconds", "tv"]


def state_to_bits(x: State) -> str:
    return "".join(str(int(b)) for b in x)


def bits_to_state(bits: str, line: Optional[int] = None) -> State:
    if not bits or set(bits) - {"0", "1"}:
        raise ParseError(f"not a bitstring: '{bits}'", line=line)
    return tuple(int(b) for b in bits)


def write_distribution_csv(pi: ExactDistribution, path: PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(DISTRIBUTION_HEADER)
        for x, p in zip(pi.support, pi.probabilities):
            writer.writerow([state_to_bits(x), repr(p)])


def read_distribution_csv(path: PathLike) -> ExactDistribution:
    states: List[State] = []
    probabilities: List[float] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        if next(reader, None) != DISTRIBUTION_HEADER:
            raise ParseError("expected header 'state,probability'", line=1)
        for number, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ParseError("expected two columns", line=number)
            states.append(bits_to_state(row[0], number))
            try:
                probabilities.append(float(row[1]))
            except ValueError:
                raise ParseError(f"bad probability '{row[1]}'", line=number) from None
    return ExactDistribution(tuple(states), tuple(probabilities))


def write_curves_csv(curves: Iterable, path: PathLike) -> None:
    """Write every checkpoint row of the given curves (anything with ``rows()``)."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CURVE_HEADER)
        for curve in curves:
            for kernel, seed, samples, wall, tv in curve.rows():
                writer.writerow([kernel, seed, samples, f"{wall:.6f}", repr(tv)])


def read_curves_csv(path: PathLike) -> List[Tuple[str, str, int, float, float]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        if next(reader, None) != CURVE_HEADER:
            raise ParseError("expected header 'kernel,seed,samples,wall_seconds,tv'", line=1)
        for number, row in enumerate(reader, start=2):
            try:
                kernel, seed, samples, wall, tv = row
                rows.append((kernel, seed, int(samples), float(wall), float(tv)))
            except ValueError:
                raise ParseError("malformed curve row", line=number) from None
    return rows


def write_trajectory(
    states: Iterable[State], path: PathLike, header: str = "", thin: int = 1
) -> int:
    """Write every ``thin``-th state (the thin-th, 2*thin-th, ...); returns the count written."""
    if thin < 1:
        raise ContractError(f"thin must be positive, got {thin}")
    written = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# {header}\n" if header else "#\n")
        for step, x in enumerate(states, start=1):
            if step % thin == 0:
                f.write(state_to_bits(x) + "\n")
                written += 1
    return written


def read_trajectory(path: PathLike) -> List[State]:
    states = []
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if line and not line.startswith("#"):
                states.append(bits_to_state(line, number))
    return states
