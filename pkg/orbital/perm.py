"""
Orbital - Permutation Groups

Permutations of a finite domain {0..n-1}, groups given by generating sets,
orbits of points and of binary states, and random group elements drawn by
product replacement.

Composition is left to right: compose(p, q) maps i to q(p(i)).
A permutation g acts on a state x by carrying values with their points:
act_on_state(g, x) = y with y[g(v)] = x[v].
"""

import logging
import random
import string
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .errors import ContractError, ParseError, ScaleGuardError, SizeMismatchError

logger = logging.getLogger(__name__)

State = Tuple[int, ...]
Seed = Union[int, str]

DEFAULT_SEED = 42
ORBIT_GUARD = 10**6
GROUP_GUARD = 10**7
EXACT_SAMPLING_GUARD = 10**5
PRA_BURNIN = 60


def _gather(indices: Sequence[int], values: Sequence[int]) -> Tuple[int, ...]:
    """Return (values[i] for i in indices) as a tuple."""
    return tuple(map(values.__getitem__, indices))


def _invert(images: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(images)
    for point, image in enumerate(images):
        inverse[image] = point
    return tuple(inverse)


def _act(images: Sequence[int], x: State) -> State:
    y = [0] * len(images)
    for point, image in enumerate(images):
        y[image] = x[point]
    return tuple(y)


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0..n-1}; images[i] is the image of point i."""

    images: Tuple[int, ...]

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        """Build a permutation, checking that images is a bijection."""
        images = tuple(int(i) for i in images)
        n = len(images)
        if sorted(images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {images}")
        return cls(images)

    @property
    def size(self) -> int:
        return len(self.images)

    @property
    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest point."""
        seen = [False] * self.size
        result = []
        for start in range(self.size):
            if seen[start] or self.images[start] == start:
                continue
            cycle = []
            point = start
            while not seen[point]:
                seen[point] = True
                cycle.append(point)
                point = self.images[point]
            result.append(tuple(cycle))
        return result

    def moved_points(self) -> List[int]:
        return [i for i, image in enumerate(self.images) if i != image]


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(n)))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply p, then q."""
    if p.size != q.size:
        raise SizeMismatchError(f"cannot compose permutations of size {p.size} and {q.size}")
    return Permutation(_gather(p.images, q.images))


def inverse(p: Permutation) -> Permutation:
    return Permutation(_invert(p.images))


def letter_names(n: int) -> List[str]:
    """Point names a, b, c, ... for small domains, 1-based numbers otherwise."""
    if n <= len(string.ascii_lowercase):
        return list(string.ascii_lowercase[:n])
    return [str(i + 1) for i in range(n)]


def format_cycles(p: Permutation, names: Optional[Sequence[str]] = None) -> str:
    """Render p in cycle notation; the identity renders as "()"."""
    cycles = p.cycles()
    if not cycles:
        return "()"

    def label(point: int) -> str:
        return names[point] if names is not None else str(point)

    return "".join("(" + " ".join(label(i) for i in cycle) + ")" for cycle in cycles)


def parse_cycles(text: str, n: int, names: Optional[Sequence[str]] = None) -> Permutation:
    """
    Parse cycle notation such as "(a c)(d f)(g i)".

    Points are resolved through ``names`` when given, otherwise they must be
    0-based integers. Points not listed are fixed; the empty string and "()"
    both denote the identity. Positions in errors are 1-based columns.
    """
    lookup: Dict[str, int] = {}
    if names is not None:
        if len(names) != n:
            raise SizeMismatchError(f"name table has {len(names)} entries, domain has {n}")
        lookup = {name: i for i, name in enumerate(names)}

    images = list(range(n))
    used: Set[int] = set()
    cycle: Optional[List[int]] = None
    pos = 0

    def close(points: List[int]) -> None:
        for a, b in zip(points, points[1:] + points[:1]):
            images[a] = b

    while pos < len(text):
        char = text[pos]
        if char.isspace():
            pos += 1
            continue
        if char == "(":
            if cycle is not None:
                raise ParseError("nested '('", position=pos + 1)
            cycle = []
            pos += 1
            continue
        if char == ")":
            if cycle is None:
                raise ParseError("unmatched ')'", position=pos + 1)
            close(cycle)
            cycle = None
            pos += 1
            continue

        start = pos
        while pos < len(text) and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        token = text[start:pos]
        if cycle is None:
            raise ParseError(f"point '{token}' outside a cycle", position=start + 1)
        point = _resolve_point(token, n, lookup if names is not None else None, start + 1)
        if point in used:
            raise ParseError(f"point '{token}' repeated", position=start + 1)
        used.add(point)
        cycle.append(point)

    if cycle is not None:
        raise ParseError("unclosed '('", position=len(text) + 1)
    return Permutation(tuple(images))


def _resolve_point(token: str, n: int, lookup: Optional[Dict[str, int]], position: int) -> int:
    if lookup is not None:
        if token not in lookup:
            raise ParseError(f"unknown point '{token}'", position=position)
        return lookup[token]
    try:
        point = int(token)
    except ValueError:
        raise ParseError(f"unknown point '{token}'", position=position) from None
    if not 0 <= point < n:
        raise ParseError(f"point {point} outside domain of size {n}", position=position)
    return point


def act_on_state(g: Permutation, x: State) -> State:
    """Return y with y[g(v)] = x[v] for every point v."""
    if len(x) != g.size:
        raise SizeMismatchError(f"state of length {len(x)} for permutation of size {g.size}")
    return _act(g.images, x)


@dataclass(frozen=True)
class PermGroup:
    """
    A permutation group given by a generating set.

    An empty generator list is the trivial group. Generators are kept as
    given; they need not be irredundant.
    """

    domain_size: int
    generators: Tuple[Permutation, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.size != self.domain_size:
                raise SizeMismatchError(
                    f"generator of size {g.size} in group on {self.domain_size} points"
                )

    @property
    def is_trivial(self) -> bool:
        return all(g.is_identity for g in self.generators)

    def nontrivial_generators(self) -> List[Permutation]:
        return [g for g in self.generators if not g.is_identity]


@dataclass(frozen=True)
class OrbitPartition:
    """Disjoint point classes covering the domain, ordered by minimum member."""

    classes: Tuple[Tuple[int, ...], ...]

    def class_index(self) -> Dict[int, int]:
        return {point: i for i, members in enumerate(self.classes) for point in members}

    def same_orbit(self, a: int, b: int) -> bool:
        index = self.class_index()
        return index[a] == index[b]


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        return True


def partition_from_union_find(uf: UnionFind, size: int) -> OrbitPartition:
    buckets: Dict[int, List[int]] = {}
    for point in range(size):
        buckets.setdefault(uf.find(point), []).append(point)
    classes = sorted((tuple(members) for members in buckets.values()), key=lambda c: c[0])
    return OrbitPartition(tuple(classes))


def point_orbits(group: PermGroup) -> OrbitPartition:
    """Orbits of the points under the generated group."""
    uf = UnionFind(group.domain_size)
    for g in group.generators:
        for point, image in enumerate(g.images):
            uf.union(point, image)
    return partition_from_union_find(uf, group.domain_size)


def state_orbit_enumerate(group: PermGroup, x: State, guard: int = ORBIT_GUARD) -> Set[State]:
    """The orbit of x, by breadth-first closure under the generators."""
    if len(x) != group.domain_size:
        raise SizeMismatchError(
            f"state of length {len(x)} for group on {group.domain_size} points"
        )
    x = tuple(x)
    generators = [g.images for g in group.nontrivial_generators()]
    orbit = {x}
    queue = deque([x])
    while queue:
        current = queue.popleft()
        for images in generators:
            image = _act(images, current)
            if image not in orbit:
                orbit.add(image)
                if len(orbit) > guard:
                    raise ScaleGuardError("state orbit size", guard, len(orbit))
                queue.append(image)
    return orbit


def state_orbit_census(group: PermGroup, guard: int = ORBIT_GUARD) -> Dict[int, int]:
    """
    Partition {0,1}^n into orbits; returns {orbit size: number of orbits}.
    ``guard`` bounds the number of states.
    """
    n = group.domain_size
    if 2**n > guard:
        raise ScaleGuardError("state space size", guard, 2**n)
    seen: Set[State] = set()
    census: Dict[int, int] = {}
    for bits in range(2**n):
        x = tuple((bits >> (n - 1 - i)) & 1 for i in range(n))
        if x in seen:
            continue
        orbit = state_orbit_enumerate(group, x, guard)
        seen.update(orbit)
        census[len(orbit)] = census.get(len(orbit), 0) + 1
    return dict(sorted(census.items()))


def _element_closure(group: PermGroup, guard: int) -> Set[Tuple[int, ...]]:
    start = tuple(range(group.domain_size))
    generators = [g.images for g in group.nontrivial_generators()]
    elements = {start}
    queue = deque([start])
    while queue:
        element = queue.popleft()
        for images in generators:
            product = _gather(element, images)
            if product not in elements:
                elements.add(product)
                if len(elements) > guard:
                    raise ScaleGuardError("group order", guard, len(elements))
                queue.append(product)
    return elements


def group_elements(group: PermGroup, guard: int = GROUP_GUARD) -> List[Permutation]:
    """Every element of the group, sorted by image tuple."""
    return [Permutation(images) for images in sorted(_element_closure(group, guard))]


def group_order_oracle(group: PermGroup, guard: int = GROUP_GUARD) -> int:
    """|G| by exhaustive closure; only for small groups."""
    return len(_element_closure(group, guard))


def stabilizer_order(group: PermGroup, x: State, guard: int = GROUP_GUARD) -> int:
    x = tuple(x)
    return sum(1 for images in _element_closure(group, guard) if _act(images, x) == x)


def verify_orbit_stabilizer(group: PermGroup, x: State, guard: int = GROUP_GUARD) -> bool:
    """Check |G| = |x^G| * |G_x| with all three sizes enumerated."""
    elements = _element_closure(group, guard)
    x = tuple(x)
    stabilizer = sum(1 for images in elements if _act(images, x) == x)
    orbit = state_orbit_enumerate(group, x)
    return len(elements) == len(orbit) * stabilizer


class GroupSampler:
    """
    Base class for random group element sources.
    Subclasses draw elements of ``group``.
    """

    group: PermGroup

    def next_images(self) -> Tuple[int, ...]:
        raise NotImplementedError

    def next(self) -> Permutation:
        return Permutation(self.next_images())


def default_register_count(generator_count: int) -> int:
    return max(10, 2 * generator_count + 2)


class PRASampler(GroupSampler):
    """
    Product replacement sampler.

    Registers start as the generator list cycled to length r and are then
    mixed by ``burnin`` replacement steps. Each draw performs one step
    R_i <- R_i * R_j^(+-1) (or R_j^(+-1) * R_i) and returns R_i, or the
    accumulator when ``accumulator`` is set.
    """

    def __init__(
        self,
        group: PermGroup,
        registers: Optional[int] = None,
        burnin: int = PRA_BURNIN,
        seed: Seed = DEFAULT_SEED,
        accumulator: bool = False,
    ):
        self.group = group
        generators = [g.images for g in group.generators]
        count = registers if registers is not None else default_register_count(len(generators))
        if count < len(generators) + 2:
            raise ContractError(f"need at least {len(generators) + 2} registers, got {count}")
        self.rng = random.Random(seed)
        start = generators or [tuple(range(group.domain_size))]
        self.registers: List[Tuple[int, ...]] = [start[i % len(start)] for i in range(count)]
        self.accumulator: Optional[Tuple[int, ...]] = (
            tuple(range(group.domain_size)) if accumulator else None
        )
        for _ in range(burnin):
            self._replace()
        logger.debug(
            "product replacement ready: %d registers, %d burn-in steps, accumulator=%s",
            count,
            burnin,
            accumulator,
        )

    def _replace(self) -> Tuple[int, ...]:
        registers = self.registers
        count = len(registers)
        i = self.rng.randrange(count)
        j = self.rng.randrange(count - 1)
        if j >= i:
            j += 1
        other = registers[j]
        if self.rng.random() < 0.5:
            other = _invert(other)
        if self.rng.random() < 0.5:
            registers[i] = _gather(registers[i], other)
        else:
            registers[i] = _gather(other, registers[i])
        if self.accumulator is not None:
            self.accumulator = _gather(self.accumulator, registers[i])
            return self.accumulator
        return registers[i]

    def next_images(self) -> Tuple[int, ...]:
        return self._replace()

    def register_elements(self) -> List[Permutation]:
        return [Permutation(images) for images in self.registers]


class ExactGroupSampler(GroupSampler):
    """Exactly uniform draws from the enumerated element list."""

    def __init__(
        self, group: PermGroup, seed: Seed = DEFAULT_SEED, guard: int = EXACT_SAMPLING_GUARD
    ):
        self.group = group
        self.rng = random.Random(seed)
        self.elements = sorted(_element_closure(group, guard))

    def next_images(self) -> Tuple[int, ...]:
        return self.elements[self.rng.randrange(len(self.elements))]


def pra_init(
    group: PermGroup,
    r: Optional[int] = None,
    burnin: int = PRA_BURNIN,
    seed: Seed = DEFAULT_SEED,
) -> PRASampler:
    return PRASampler(group, registers=r, burnin=burnin, seed=seed)


def pra_next(sampler: PRASampler) -> Permutation:
    return sampler.next()


def uniform_orbit_sample(x: State, sampler: GroupSampler) -> State:
    """Move x to a (near-)uniform point of its orbit."""
    if len(x) != sampler.group.domain_size:
        raise SizeMismatchError(
            f"state of length {len(x)} for group on {sampler.group.domain_size} points"
        )
    return _act(sampler.next_images(), tuple(x))
