"""
Orbital - Evaluation

Convergence measurement for the chains:
- Total variation distance and empirical distributions
- Exact mixing times from matrix powers
- Exact marginals
- The TV-curve experiment harness and curve comparison
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import chisquare

from .chains import KERNELS, ORBIT_SAMPLING, OrbitalKernel, TransitionMatrix, make_kernel
from .errors import ContractError, NotConvergedError, ParseError, SizeMismatchError
from .formats.loader import load_model_file
from .formats.tables import write_curves_csv
from .models import (
    TOPOLOGIES,
    ExactDistribution,
    IndependentSetModel,
    Model,
    enumerate_distribution,
    symmetry_group,
)
from .perm import PermGroup, Seed, State

logger = logging.getLogger(__name__)

MIXING_CAP = 10**6
TV_THRESHOLD = 0.05
BASELINE_KERNEL = "insert_delete"
ORBITAL_KERNEL = "orbital"
MODEL_KINDS = tuple(TOPOLOGIES) + ("file",)

Distribution = Union[ExactDistribution, Mapping[State, float]]


def _as_table(d: Distribution) -> Mapping[State, float]:
    return d.as_dict() if isinstance(d, ExactDistribution) else d


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Half the L1 distance; states missing from either side count as 0."""
    p_table, q_table = _as_table(p), _as_table(q)
    lengths = {len(x) for x in p_table} | {len(x) for x in q_table}
    if len(lengths) > 1:
        raise SizeMismatchError(f"distributions over states of lengths {sorted(lengths)}")
    total = math.fsum(
        abs(p_table.get(x, 0.0) - q_table.get(x, 0.0)) for x in set(p_table) | set(q_table)
    )
    return min(1.0, 0.5 * total)


def empirical_distribution(
    samples: Sequence[State], universe: Union[ExactDistribution, Iterable[State]]
) -> Dict[State, float]:
    """Sample frequencies over the universe; unseen states get 0."""
    if not samples:
        raise ContractError("empty sample list")
    states = universe.support if isinstance(universe, ExactDistribution) else universe
    counts: Dict[State, float] = {tuple(x): 0.0 for x in states}
    for x in samples:
        x = tuple(x)
        if x not in counts:
            raise ContractError(f"sample {x} outside the universe")
        counts[x] += 1
    n = len(samples)
    return {x: c / n for x, c in counts.items()}


def _worst_distance(power: np.ndarray, target: np.ndarray) -> float:
    return float(0.5 * np.abs(power - target[None, :]).sum(axis=1).max())


def exact_mixing_time(
    matrix: TransitionMatrix, pi: ExactDistribution, eps: float, cap: int = MIXING_CAP
) -> int:
    """
    Smallest t with max_x TV(P^t(x, .), pi) <= eps, counting P^0 = I.

    The worst-case distance is non-increasing in t, so the horizon is
    doubled by squaring until it crosses eps and then bisected.
    """
    if not 0 < eps < 1:
        raise ContractError(f"eps must lie in (0, 1), got {eps}")
    target = matrix.stationary_vector(pi)
    entries = matrix.entries
    if _worst_distance(np.eye(matrix.size), target) <= eps:
        return 0

    low, high = 0, 1
    power = entries
    while _worst_distance(power, target) > eps:
        if high >= cap:
            raise NotConvergedError(cap, _worst_distance(power, target))
        low, high = high, high * 2
        power = power @ power

    while high - low > 1:
        middle = (low + high) // 2
        if _worst_distance(np.linalg.matrix_power(entries, middle), target) <= eps:
            high = middle
        else:
            low = middle
    logger.debug("mixing time %d at eps=%g", high, eps)
    return high


def exact_marginals(pi: ExactDistribution) -> List[float]:
    """P(x_v = 1) for every variable v."""
    if not pi.support:
        return []
    states = np.array(pi.support, dtype=float)
    return (np.array(pi.probabilities) @ states).tolist()


def uniformity_pvalue(samples: Iterable, categories: Sequence) -> float:
    """Chi-square goodness-of-fit p-value of the samples against uniform over categories."""
    index = {c: i for i, c in enumerate(categories)}
    observed = np.zeros(len(categories))
    for sample in samples:
        if sample not in index:
            raise ContractError(f"sample {sample} outside the categories")
        observed[index[sample]] += 1
    return float(chisquare(observed).pvalue)


def default_checkpoints(max_samples: int) -> Tuple[int, ...]:
    """1, 2, 5, 10, 20, 50, ... up to max_samples, always ending at max_samples."""
    points: List[int] = []
    decade = 1
    while decade <= max_samples:
        for factor in (1, 2, 5):
            if decade * factor <= max_samples:
                points.append(decade * factor)
        decade *= 10
    if not points or points[-1] != max_samples:
        points.append(max_samples)
    return tuple(points)


@dataclass
class ExperimentConfig:
    """One TV-curve experiment: a model, kernels to compare and seeds to repeat over."""

    model: str = "grid"
    k: int = 3
    graph: Optional[str] = None
    lam: float = 1.0
    kernels: Tuple[str, ...] = (BASELINE_KERNEL, "insert_delete_drag", ORBITAL_KERNEL)
    seeds: Tuple[int, ...] = (42,)
    max_samples: int = 10000
    checkpoints: Tuple[int, ...] = ()
    orbit_sampling: str = "pra"
    workers: int = 1

    def __post_init__(self) -> None:
        self.kernels = tuple(self.kernels)
        self.seeds = tuple(self.seeds)
        if self.model not in MODEL_KINDS:
            raise ContractError(f"unknown model '{self.model}'")
        if self.model == "file" and not self.graph:
            raise ContractError("model = file needs a graph path")
        if not self.seeds:
            raise ContractError("at least one seed is required")
        if self.max_samples < 1:
            raise ContractError("max_samples must be positive")
        for kernel in self.kernels:
            if kernel not in KERNELS and kernel != ORBITAL_KERNEL:
                raise ContractError(f"unknown kernel '{kernel}'")
        if self.orbit_sampling not in ORBIT_SAMPLING:
            raise ContractError(f"unknown orbit sampling '{self.orbit_sampling}'")
        if self.workers < 1:
            raise ContractError("workers must be positive")
        if not self.checkpoints:
            self.checkpoints = default_checkpoints(self.max_samples)
        self.checkpoints = tuple(self.checkpoints)
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ContractError("checkpoints must be strictly increasing")
        if self.checkpoints[0] < 1 or self.checkpoints[-1] > self.max_samples:
            raise ContractError("checkpoints must lie in 1..max_samples")


def _split_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


_CONFIG_KEYS = {
    "model": ("model", str),
    "k": ("k", int),
    "graph": ("graph", str),
    "lambda": ("lam", float),
    "kernels": ("kernels", lambda v: tuple(_split_list(v))),
    "seeds": ("seeds", lambda v: tuple(int(s) for s in _split_list(v))),
    "max_samples": ("max_samples", int),
    "checkpoints": ("checkpoints", lambda v: tuple(int(s) for s in _split_list(v))),
    "orbit_sampling": ("orbit_sampling", str),
    "workers": ("workers", int),
}


def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """
    Parse ``key = value`` lines (``#`` starts a comment).

    Keys: model, k, graph, lambda, kernels, seeds, max_samples, checkpoints,
    orbit_sampling, workers. A relative graph path resolves against base_dir.
    """
    values: Dict[str, object] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got '{line}'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown key '{key}'", line=number)
        attribute, convert = _CONFIG_KEYS[key]
        try:
            values[attribute] = convert(value)
        except ValueError:
            raise ParseError(f"bad value '{value}' for {key}", line=number) from None
    graph = values.get("graph")
    if isinstance(graph, str) and base_dir is not None and not Path(graph).is_absolute():
        values["graph"] = str(base_dir / graph)
    try:
        return ExperimentConfig(**values)  # type: ignore[arg-type]
    except ContractError as e:
        raise ParseError(str(e)) from None


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


@dataclass
class TVCurve:
    """TV to the exact distribution at each checkpoint of one chain run."""

    kernel: str
    seed: Seed
    sample_counts: List[int] = field(default_factory=list)
    tv_values: List[float] = field(default_factory=list)
    wall_times: List[float] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)

    def record(self, samples: int, tv: float, wall: float) -> None:
        if self.sample_counts and samples <= self.sample_counts[-1]:
            raise ContractError("sample counts must be strictly increasing")
        if not 0.0 <= tv <= 1.0:
            raise ContractError(f"tv {tv} outside [0, 1]")
        self.sample_counts.append(samples)
        self.tv_values.append(tv)
        self.wall_times.append(wall)

    def rows(self) -> List[Tuple[str, str, int, float, float]]:
        return [
            (self.kernel, str(self.seed), n, wall, tv)
            for n, wall, tv in zip(self.sample_counts, self.wall_times, self.tv_values)
        ]


def build_model(cfg: ExperimentConfig) -> Model:
    if cfg.model == "file":
        return load_model_file(str(cfg.graph), lam=cfg.lam)
    return IndependentSetModel(TOPOLOGIES[cfg.model](cfg.k), cfg.lam)


def build_chain(
    model: Model,
    kernel: str,
    seed: Seed,
    group: Optional[PermGroup] = None,
    orbit_sampling: str = "pra",
):
    """Base kernel by name; ``orbital`` wraps insert/delete (Gibbs for non-graph models)."""
    if kernel != ORBITAL_KERNEL:
        return make_kernel(kernel, model, seed)
    base_kind = BASELINE_KERNEL if isinstance(model, IndependentSetModel) else "gibbs"
    if group is None:
        group = symmetry_group(model)
    return OrbitalKernel(make_kernel(base_kind, model, seed), group, orbit_sampling)


def tv_curve(
    chain,
    pi: ExactDistribution,
    checkpoints: Sequence[int],
    metadata: Optional[Dict[str, str]] = None,
) -> TVCurve:
    """Run a chain from its start state and record TV of all samples so far at each checkpoint."""
    index = {x: i for i, x in enumerate(pi.support)}
    target = np.array(pi.probabilities)
    counts = np.zeros(len(pi.support))
    outside = 0
    curve = TVCurve(
        kernel=(metadata or {}).get("kernel", chain.kind),
        seed=chain.seed,
        metadata=dict(metadata or {}),
    )
    x = chain.start_state()
    started = time.perf_counter()
    taken = 0
    for checkpoint in checkpoints:
        while taken < checkpoint:
            x = chain.step(x)
            i = index.get(x)
            if i is None:
                outside += 1
            else:
                counts[i] += 1
            taken += 1
        tv = 0.5 * (float(np.abs(counts / taken - target).sum()) + outside / taken)
        curve.record(taken, min(1.0, tv), time.perf_counter() - started)
        logger.debug("%s seed %s: %d samples, tv %.4f", curve.kernel, curve.seed, taken, tv)
    return curve


def run_experiment(
    cfg: ExperimentConfig, out_path: Optional[Union[str, Path]] = None
) -> List[TVCurve]:
    """
    One TV curve per (kernel, seed), fanned out over ``cfg.workers`` threads
    and returned in (kernel, seed) configuration order. When out_path is
    given the curves are written as CSV, including the ones finished before
    a failure.
    """
    model = build_model(cfg)
    pi = enumerate_distribution(model)
    group = symmetry_group(model) if ORBITAL_KERNEL in cfg.kernels else None
    logger.info(
        "experiment: %s k=%d, %d states, kernels %s, seeds %s",
        cfg.model,
        cfg.k,
        len(pi.support),
        ",".join(cfg.kernels),
        ",".join(map(str, cfg.seeds)),
    )

    def job(kernel: str, seed: int) -> TVCurve:
        chain = build_chain(model, kernel, seed, group, cfg.orbit_sampling)
        metadata = {"kernel": kernel, "model": cfg.model, "lambda": str(cfg.lam)}
        if kernel == ORBITAL_KERNEL:
            metadata["orbit_sampling"] = cfg.orbit_sampling
        return tv_curve(chain, pi, cfg.checkpoints, metadata)

    jobs = [(kernel, seed) for kernel in cfg.kernels for seed in cfg.seeds]
    curves: List[TVCurve] = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(job, kernel, seed) for kernel, seed in jobs]
        try:
            for future in futures:
                curves.append(future.result())
        finally:
            if out_path is not None:
                write_curves_csv(curves, out_path)
    return curves


@dataclass
class KernelSummary:
    """Seed-averaged view of one kernel's curves."""

    kernel: str
    sample_counts: List[int]
    mean_tv: List[float]
    first_below: Optional[int]
    seconds_per_sample: float
    overhead: Optional[float] = None


@dataclass
class CurveComparison:
    threshold: float
    baseline: str
    summaries: List[KernelSummary] = field(default_factory=list)

    def summary(self, kernel: str) -> KernelSummary:
        for s in self.summaries:
            if s.kernel == kernel:
                return s
        raise KeyError(kernel)

    def dominates(self, kernel: str, other: str, from_samples: int = 0) -> bool:
        """True if kernel's mean TV is <= other's at every shared count >= from_samples."""
        a, b = self.summary(kernel), self.summary(other)
        shared = dict(zip(b.sample_counts, b.mean_tv))
        return all(
            tv <= shared[n]
            for n, tv in zip(a.sample_counts, a.mean_tv)
            if n >= from_samples and n in shared
        )


def compare_curves(
    curves: Sequence[TVCurve], threshold: float = TV_THRESHOLD, baseline: str = BASELINE_KERNEL
) -> CurveComparison:
    """Average TV per kernel over seeds at matched sample counts."""
    by_kernel: Dict[str, List[TVCurve]] = {}
    for curve in curves:
        by_kernel.setdefault(curve.kernel, []).append(curve)

    result = CurveComparison(threshold=threshold, baseline=baseline)
    for kernel, group in by_kernel.items():
        counts = sorted(set.intersection(*(set(c.sample_counts) for c in group)))
        mean_tv = [
            float(np.mean([c.tv_values[c.sample_counts.index(n)] for c in group])) for n in counts
        ]
        first_below = next((n for n, tv in zip(counts, mean_tv) if tv < threshold), None)
        per_sample = [c.wall_times[-1] / c.sample_counts[-1] for c in group if c.sample_counts]
        result.summaries.append(
            KernelSummary(
                kernel=kernel,
                sample_counts=counts,
                mean_tv=mean_tv,
                first_below=first_below,
                seconds_per_sample=float(np.mean(per_sample)) if per_sample else 0.0,
            )
        )

    if baseline in by_kernel:
        base_cost = result.summary(baseline).seconds_per_sample
        for s in result.summaries:
            if s.kernel != baseline and base_cost > 0:
                s.overhead = s.seconds_per_sample / base_cost - 1.0
    return result


def format_comparison(comparison: CurveComparison) -> str:
    """Human-readable report of a CurveComparison."""
    lines = [f"Mean TV by kernel (threshold {comparison.threshold:g})", ""]
    if not comparison.summaries:
        lines.append("No curves to compare.")
        return "\n".join(lines)

    for s in comparison.summaries:
        crossed = f"{s.first_below} samples" if s.first_below is not None else "never"
        lines.append(f"  {s.kernel}:")
        lines.append(f"    below threshold at: {crossed}")
        micros = s.seconds_per_sample * 1e6
        overhead = ""
        if s.overhead is not None:
            overhead = f" ({s.overhead:+.0%} vs {comparison.baseline})"
        lines.append(f"    cost: {micros:.1f} µs/sample{overhead}")
        for n, tv in zip(s.sample_counts, s.mean_tv):
            lines.append(f"    {n:>10}  {tv:.4f}")
        lines.append("")

    orbital = [s for s in comparison.summaries if s.kernel == ORBITAL_KERNEL]
    if orbital and any(s.kernel == comparison.baseline for s in comparison.summaries):
        if comparison.dominates(ORBITAL_KERNEL, comparison.baseline):
            lines.append(
                f"✓ {ORBITAL_KERNEL} at or below {comparison.baseline} at every checkpoint"
            )
        else:
            lines.append(f"⚠ {ORBITAL_KERNEL} above {comparison.baseline} at some checkpoint")
    return "\n".join(lines).rstrip() + "\n"
