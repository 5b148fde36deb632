"""
Orbital - Markov Chains

Base kernels (Gibbs, insert/delete, insert/delete/drag), the orbital
wrapper that resamples each new state uniformly from its orbit, exact
transition matrices for small state spaces and the property checks run
against them.
"""

import logging
import math
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import ContractError, ScaleGuardError, SizeMismatchError
from .models import (
    ExactDistribution,
    Graph,
    IndependentSetModel,
    Model,
    enumerate_distribution,
    enumerate_independent_sets,
    is_independent_set,
)
from .perm import (
    DEFAULT_SEED,
    EXACT_SAMPLING_GUARD,
    ORBIT_GUARD,
    ExactGroupSampler,
    GroupSampler,
    PermGroup,
    PRASampler,
    Seed,
    State,
    act_on_state,
    state_orbit_enumerate,
    uniform_orbit_sample,
)

logger = logging.getLogger(__name__)

Q_DRAG = 0.5
MATRIX_GUARD = 10**4
START_ATTEMPTS = 10**5
TOLERANCE = 1e-12
UNBOUNDED = math.inf

ORBIT_SAMPLING = ("pra", "exact")

Row = Dict[State, float]


def _flip(x: State, v: int, value: int) -> State:
    return x[:v] + (value,) + x[v + 1 :]


class ChainKernel:
    """
    Base class for single-site kernels.

    A kernel owns its random source; ``step`` draws from it unless another
    generator is passed. ``transition_row`` gives the exact one-step
    distribution from a state.
    """

    kind = "base"

    def __init__(self, model: Model, seed: Seed = DEFAULT_SEED):
        self.model = model
        self.seed = seed
        self.rng = random.Random(seed)

    @property
    def variable_count(self) -> int:
        return self.model.variable_count

    def check_state(self, x: State) -> None:
        if len(x) != self.variable_count:
            raise SizeMismatchError(
                f"state of length {len(x)} for {self.variable_count} variables"
            )
        if not self.model.in_support(x):
            raise ContractError(f"state {format_state(x)} is outside the support")

    def step(self, x: State, rng: Optional[random.Random] = None) -> State:
        x = tuple(x)
        self.check_state(x)
        return self._step(x, rng or self.rng)

    def _step(self, x: State, rng: random.Random) -> State:
        raise NotImplementedError

    def transition_row(self, x: State) -> Row:
        raise NotImplementedError

    def state_space(self) -> List[State]:
        return list(enumerate_distribution(self.model).support)

    def stationary(self) -> ExactDistribution:
        return enumerate_distribution(self.model)

    def start_state(self, x: Optional[State] = None) -> State:
        raise NotImplementedError


class GibbsKernel(ChainKernel):
    """Pick a variable uniformly and resample it from its conditional."""

    kind = "gibbs"

    def _conditional_one(self, x: State, v: int) -> float:
        w0 = self.model.weight(_flip(x, v, 0))
        w1 = self.model.weight(_flip(x, v, 1))
        return w1 / (w0 + w1)

    def _step(self, x: State, rng: random.Random) -> State:
        v = rng.randrange(self.variable_count)
        p1 = self._conditional_one(x, v)
        return _flip(x, v, 1 if rng.random() < p1 else 0)

    def transition_row(self, x: State) -> Row:
        self.check_state(x)
        n = self.variable_count
        row: Row = {}
        for v in range(n):
            p1 = self._conditional_one(x, v)
            for value, p in ((0, 1.0 - p1), (1, p1)):
                if p > 0:
                    y = _flip(x, v, value)
                    row[y] = row.get(y, 0.0) + p / n
        return row

    def start_state(self, x: Optional[State] = None) -> State:
        """The given state if in support, else a rejection-sampled support state."""
        if x is not None:
            x = tuple(x)
            self.check_state(x)
            return x
        rng = random.Random(f"{self.seed}:start")
        n = self.variable_count
        for _ in range(START_ATTEMPTS):
            candidate = tuple(rng.randrange(2) for _ in range(n))
            if self.model.in_support(candidate):
                return candidate
        logger.debug("rejection sampling failed, falling back to enumeration")
        return enumerate_distribution(self.model).support[0]


class InsertDeleteKernel(ChainKernel):
    """Insert/delete chain on the independent sets of a graph."""

    kind = "insert_delete"

    def __init__(self, model: Model, seed: Seed = DEFAULT_SEED):
        if not isinstance(model, IndependentSetModel):
            raise ContractError(f"{self.kind} needs an independent-set model")
        super().__init__(model, seed)
        self.graph: Graph = model.graph
        self.lam = model.lam

    def check_state(self, x: State) -> None:
        if len(x) != self.variable_count:
            raise SizeMismatchError(
                f"state of length {len(x)} for {self.variable_count} vertices"
            )
        if not is_independent_set(self.graph, x):
            raise ContractError(f"state {format_state(x)} is not an independent set")

    def _occupied_neighbors(self, x: State, v: int) -> List[int]:
        return [u for u in self.graph.adjacency[v] if x[u]]

    def _move(self, x: State, v: int, u: float) -> State:
        if x[v]:
            return _flip(x, v, 0) if u < 1.0 / (1.0 + self.lam) else x
        if not self._occupied_neighbors(x, v) and u < self.lam / (1.0 + self.lam):
            return _flip(x, v, 1)
        return x

    def _step(self, x: State, rng: random.Random) -> State:
        v = rng.randrange(self.variable_count)
        return self._move(x, v, rng.random())

    def _site_moves(self, x: State, v: int) -> List[Tuple[State, float]]:
        if x[v]:
            return [(_flip(x, v, 0), 1.0 / (1.0 + self.lam))]
        if not self._occupied_neighbors(x, v):
            return [(_flip(x, v, 1), self.lam / (1.0 + self.lam))]
        return []

    def transition_row(self, x: State) -> Row:
        self.check_state(x)
        n = self.variable_count
        row: Row = {}
        hold = 0.0
        for v in range(n):
            moved = 0.0
            for y, p in self._site_moves(x, v):
                row[y] = row.get(y, 0.0) + p / n
                moved += p
            hold += (1.0 - moved) / n
        if hold > 0:
            row[x] = row.get(x, 0.0) + hold
        return row

    def state_space(self) -> List[State]:
        return enumerate_independent_sets(self.graph)

    def start_state(self, x: Optional[State] = None) -> State:
        """Chains on independent sets start at the empty set unless told otherwise."""
        if x is None:
            return (0,) * self.variable_count
        x = tuple(x)
        self.check_state(x)
        return x


class InsertDeleteDragKernel(InsertDeleteKernel):
    """
    Insert/delete plus a drag move: when v is free but has exactly one
    occupied neighbor u, move to (X + v) - u with probability q_drag.
    """

    kind = "insert_delete_drag"

    def __init__(self, model: Model, seed: Seed = DEFAULT_SEED, q_drag: float = Q_DRAG):
        super().__init__(model, seed)
        if not 0 < q_drag < 1:
            raise ContractError(f"q_drag must lie in (0, 1), got {q_drag}")
        self.q_drag = q_drag

    def _move(self, x: State, v: int, u: float) -> State:
        if not x[v]:
            occupied = self._occupied_neighbors(x, v)
            if len(occupied) == 1:
                return _flip(_flip(x, occupied[0], 0), v, 1) if u < self.q_drag else x
        return super()._move(x, v, u)

    def _site_moves(self, x: State, v: int) -> List[Tuple[State, float]]:
        if not x[v]:
            occupied = self._occupied_neighbors(x, v)
            if len(occupied) == 1:
                return [(_flip(_flip(x, occupied[0], 0), v, 1), self.q_drag)]
        return super()._site_moves(x, v)


KERNELS = {
    GibbsKernel.kind: GibbsKernel,
    InsertDeleteKernel.kind: InsertDeleteKernel,
    InsertDeleteDragKernel.kind: InsertDeleteDragKernel,
}


def make_kernel(kind: str, model: Model, seed: Seed = DEFAULT_SEED) -> ChainKernel:
    if kind not in KERNELS:
        raise ContractError(f"unknown kernel '{kind}' (choose from {', '.join(KERNELS)})")
    return KERNELS[kind](model, seed)


class OrbitalKernel:
    """
    Wraps a base kernel: every base step is followed by a uniform draw from
    the orbit of the new state under ``group``.

    Orbit draws use their own random source, so with the trivial group the
    trajectory matches the base kernel's exactly.
    """

    kind = "orbital"

    def __init__(
        self,
        base: ChainKernel,
        group: PermGroup,
        orbit_sampling: str = "pra",
        seed: Optional[Seed] = None,
    ):
        if group.domain_size != base.variable_count:
            raise SizeMismatchError(
                f"group on {group.domain_size} points for {base.variable_count} variables"
            )
        if orbit_sampling not in ORBIT_SAMPLING:
            raise ContractError(f"unknown orbit sampling '{orbit_sampling}'")
        for g in group.nontrivial_generators():
            if not base.model.is_symmetry(g):
                raise ContractError("group generator is not a symmetry of the model")
        self.base = base
        self.group = group
        self.orbit_sampling = orbit_sampling
        orbit_seed = f"{base.seed if seed is None else seed}:orbit"
        self.sampler: Optional[GroupSampler] = None
        if not group.is_trivial:
            if orbit_sampling == "exact":
                self.sampler = ExactGroupSampler(group, seed=orbit_seed, guard=EXACT_SAMPLING_GUARD)
            else:
                self.sampler = PRASampler(group, seed=orbit_seed)
        self._orbits: Dict[State, Tuple[State, ...]] = {}
        logger.debug(
            "orbital %s kernel: %d generators, %s orbit sampling",
            base.kind,
            len(group.generators),
            orbit_sampling,
        )

    @property
    def model(self) -> Model:
        return self.base.model

    @property
    def seed(self) -> Seed:
        return self.base.seed

    @property
    def variable_count(self) -> int:
        return self.base.variable_count

    def step(self, x: State, rng: Optional[random.Random] = None) -> State:
        y = self.base.step(x, rng)
        if self.sampler is None:
            return y
        return uniform_orbit_sample(y, self.sampler)

    def orbit(self, x: State) -> Tuple[State, ...]:
        """Cached BFS orbit of x, sorted."""
        x = tuple(x)
        if x not in self._orbits:
            members = tuple(sorted(state_orbit_enumerate(self.group, x, ORBIT_GUARD)))
            for member in members:
                self._orbits[member] = members
        return self._orbits[x]

    def transition_row(self, x: State) -> Row:
        """Exact orbital row: P(x, y) = sum over y' in orbit(y) of P'(x, y') / |orbit(y)|."""
        row: Row = {}
        for y_base, p in self.base.transition_row(x).items():
            members = self.orbit(y_base)
            share = p / len(members)
            for y in members:
                row[y] = row.get(y, 0.0) + share
        return row

    def state_space(self) -> List[State]:
        return self.base.state_space()

    def stationary(self) -> ExactDistribution:
        return self.base.stationary()

    def start_state(self, x: Optional[State] = None) -> State:
        return self.base.start_state(x)


def gibbs_step(kernel: GibbsKernel, x: State, rng: Optional[random.Random] = None) -> State:
    return kernel.step(x, rng)


def insert_delete_step(
    kernel: InsertDeleteKernel, x: State, rng: Optional[random.Random] = None
) -> State:
    return kernel.step(x, rng)


def insert_delete_drag_step(
    kernel: InsertDeleteDragKernel, x: State, rng: Optional[random.Random] = None
) -> State:
    return kernel.step(x, rng)


def orbital_step(kernel: OrbitalKernel, x: State, rng: Optional[random.Random] = None) -> State:
    return kernel.step(x, rng)


def run_chain(kernel, samples: int, start: Optional[State] = None) -> Iterator[State]:
    """Yield the states after each of ``samples`` steps from the kernel's start state."""
    x = kernel.start_state(start)
    for _ in range(samples):
        x = kernel.step(x)
        yield x


def format_state(x: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in x)


@dataclass
class TransitionMatrix:
    """Dense row-stochastic matrix over an explicit list of states."""

    states: Tuple[State, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        self.states = tuple(self.states)
        self.state_index: Dict[State, int] = {x: i for i, x in enumerate(self.states)}
        n = len(self.states)
        if self.entries.shape != (n, n):
            raise SizeMismatchError(f"matrix shape {self.entries.shape} for {n} states")
        if (self.entries < 0).any():
            raise ContractError("negative transition probability")
        if not np.allclose(self.entries.sum(axis=1), 1.0, rtol=0, atol=TOLERANCE):
            raise ContractError("transition rows do not sum to 1")

    @property
    def size(self) -> int:
        return len(self.states)

    def probability(self, x: State, y: State) -> float:
        return float(self.entries[self.state_index[tuple(x)], self.state_index[tuple(y)]])

    def row(self, x: State) -> np.ndarray:
        return self.entries[self.state_index[tuple(x)]]

    def stationary_vector(self, pi: ExactDistribution) -> np.ndarray:
        """pi aligned with this matrix's state order."""
        table = pi.as_dict()
        return np.array([table.get(x, 0.0) for x in self.states])

    def to_digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.size))
        rows, cols = np.nonzero(self.entries > 0)
        g.add_edges_from(zip(rows.tolist(), cols.tolist()))
        return g


def exact_transition_matrix(kernel, guard: int = MATRIX_GUARD) -> TransitionMatrix:
    """Exact matrix of a base or orbital kernel, rows in state-space order."""
    states = kernel.state_space()
    if len(states) > guard:
        raise ScaleGuardError("transition matrix states", guard, len(states))
    index = {x: i for i, x in enumerate(states)}
    entries = np.zeros((len(states), len(states)))
    for i, x in enumerate(states):
        for y, p in kernel.transition_row(x).items():
            if y not in index:
                raise ContractError(f"transition leaves the state space at {format_state(y)}")
            entries[i, index[y]] += p
    logger.debug("built %dx%d transition matrix", len(states), len(states))
    return TransitionMatrix(tuple(states), entries)


def check_equivariance(
    kernel,
    group: PermGroup,
    matrix: Optional[TransitionMatrix] = None,
    tolerance: float = TOLERANCE,
) -> bool:
    """True iff P(x, y) = P(x^g, y^g) for every generator g and all states."""
    if matrix is None:
        matrix = exact_transition_matrix(kernel)
    for g in group.nontrivial_generators():
        mapped = []
        for x in matrix.states:
            image = act_on_state(g, x)
            if image not in matrix.state_index:
                return False
            mapped.append(matrix.state_index[image])
        m = np.array(mapped)
        if not np.allclose(matrix.entries[np.ix_(m, m)], matrix.entries, rtol=0, atol=tolerance):
            return False
    return True


def is_irreducible(matrix: TransitionMatrix) -> bool:
    return nx.is_strongly_connected(matrix.to_digraph())


def is_aperiodic(matrix: TransitionMatrix) -> bool:
    if np.any(np.diag(matrix.entries) > 0):
        return True
    return nx.is_aperiodic(matrix.to_digraph())


def satisfies_detailed_balance(
    matrix: TransitionMatrix, pi: ExactDistribution, tolerance: float = TOLERANCE
) -> bool:
    """pi(x) P(x, y) = pi(y) P(y, x) entry-wise."""
    flows = matrix.stationary_vector(pi)[:, None] * matrix.entries
    return bool(np.allclose(flows, flows.T, rtol=0, atol=tolerance))


def is_stationary(
    matrix: TransitionMatrix, pi: ExactDistribution, tolerance: float = TOLERANCE
) -> bool:
    vector = matrix.stationary_vector(pi)
    return bool(np.allclose(vector @ matrix.entries, vector, rtol=0, atol=tolerance))


@dataclass
class RhoEstimate:
    """Fraction of valid (X, v, w) triples whose two extensions lie in different orbits."""

    value: float
    valid_triples: int
    separated_triples: int
    measure: str = "uniform over valid triples"


def estimate_rho(g: Graph, group: PermGroup) -> RhoEstimate:
    """
    Exhaustive rho over ordered triples (X, v, w) with {v, w} an edge,
    v, w outside X and both X + v and X + w independent.
    """
    if group.domain_size != g.vertex_count:
        raise SizeMismatchError(
            f"group on {group.domain_size} points for graph on {g.vertex_count} vertices"
        )
    representative: Dict[State, State] = {}

    def orbit_of(x: State) -> State:
        if x not in representative:
            members = state_orbit_enumerate(group, x, ORBIT_GUARD)
            smallest = min(members)
            for member in members:
                representative[member] = smallest
        return representative[x]

    edges = g.edges()
    valid = separated = 0
    for x in enumerate_independent_sets(g):
        free = [
            not x[v] and not any(x[u] for u in g.adjacency[v]) for v in range(g.vertex_count)
        ]
        for a, b in edges:
            if not (free[a] and free[b]):
                continue
            with_a = _flip(x, a, 1)
            with_b = _flip(x, b, 1)
            valid += 2
            if orbit_of(with_a) != orbit_of(with_b):
                separated += 2
    if valid == 0:
        raise ContractError("graph has no valid (X, v, w) triples")
    value = separated / valid
    logger.info("rho = %d/%d = %.6f", separated, valid, value)
    return RhoEstimate(value=value, valid_triples=valid, separated_triples=separated)


def orbital_lambda_threshold(rho: float, delta: int) -> float:
    """Largest lambda for which the orbital insert/delete chain is known to mix rapidly."""
    if not 0 <= rho <= 1:
        raise ContractError(f"rho must lie in [0, 1], got {rho}")
    if delta < 1:
        raise ContractError(f"maximum degree must be at least 1, got {delta}")
    slope = (2 * rho - 1) * delta
    if rho <= 0.5 or slope <= 1:
        return UNBOUNDED
    return 1.0 / (slope - 1)
