"""
Orbital - CLI

Command-line interface for symmetry detection and orbital Markov chains.
"""

import argparse
import logging
import math
import sys
from typing import Dict, List

from .chains import (
    KERNELS,
    ORBIT_SAMPLING,
    OrbitalKernel,
    check_equivariance,
    estimate_rho,
    exact_transition_matrix,
    is_aperiodic,
    is_irreducible,
    is_stationary,
    make_kernel,
    orbital_lambda_threshold,
    run_chain,
    satisfies_detailed_balance,
)
from .errors import (
    ConsistencyError,
    ContractError,
    NotConvergedError,
    ParseError,
    ScaleGuardError,
    SizeMismatchError,
)
from .evaluation import (
    compare_curves,
    exact_marginals,
    exact_mixing_time,
    format_comparison,
    load_config,
    run_experiment,
)
from .formats.dot import save_dot
from .formats.generators import format_generators, read_generators
from .formats.loader import LoadedInput, load_input
from .formats.tables import write_distribution_csv, write_trajectory
from .models import (
    TOPOLOGIES,
    IndependentSetModel,
    Model,
    enumerate_distribution,
    symmetry_group,
)
from .perm import (
    DEFAULT_SEED,
    PermGroup,
    format_cycles,
    group_order_oracle,
    point_orbits,
    state_orbit_census,
)
from .symmetry import automorphism_search, orbit_report, restrict_to_variables

VERSION = "0.1.0"
ORACLE_ORDER_LIMIT = 10**5
STATE_ORBIT_LIMIT = 20

EXIT_PARSE = 2
EXIT_SCALE = 3
EXIT_CONTRACT = 4

FORMATS_HELP = """\
input formats (detected from the 'p' header line):

  weighted clauses        colored graph          plain graph
    c comment               p cgraph <n> <m>       p edge <n> <m>
    p wcnf <vars> <cls>     n <vertex> <color>     e <u> <v>
    <w|H> <+-lit>... 0      e <u> <v>
    e <var> <0|1>

  vertices and variables are 1-based; H marks a hard clause.

generators (aut --generators, sample/check --group):
  domain <n>    name <index> <label>    (a b)(c d)   one generator per line

experiment config (bench), 'key = value' per line, '#' comments:
  model = grid|cliques|complete|file    k = 5    graph = path.edge
  lambda = 1    kernels = insert_delete,insert_delete_drag,orbital
  seeds = 1,2,3    max_samples = 100000    checkpoints = 1000,10000
  orbit_sampling = pra|exact    workers = 4

outputs: trajectories are one bitstring per line (vertex 0 leftmost);
distributions are CSV 'state,probability'; curves are CSV
'kernel,seed,samples,wall_seconds,tv'.

default seed: %d. exit codes: 0 ok, 2 parse error, 3 scale guard,
4 contract or numerical failure.
""" % DEFAULT_SEED


def _fail(message: str, code: int) -> None:
    print(f"Error: {message}")
    sys.exit(code)


def _load(args) -> LoadedInput:
    if args.input and args.topology:
        _fail("give either an input file or --topology, not both", EXIT_PARSE)
    if args.topology:
        print(f"Building topology: {args.topology} (k={args.k})")
        return LoadedInput("edge", graph=TOPOLOGIES[args.topology](args.k))
    if not args.input:
        _fail("an input file or --topology is required", EXIT_PARSE)
    print(f"Reading input: {args.input}")
    return load_input(args.input)


def _model_group(args, model: Model) -> PermGroup:
    """The group from --group when given, else the detected symmetries of the model."""
    if not args.group:
        return symmetry_group(model)
    print(f"Reading generators: {args.group}")
    group, names = read_generators(args.group)
    if names is not None and tuple(names) != tuple(model.names):
        raise ContractError("generator names do not match the model variables")
    return group


def _format_classes(classes) -> str:
    return " ".join("{" + ", ".join(members) + "}" for members in classes)


def _format_census(census: Dict[int, int]) -> str:
    return ", ".join(f"{count}×{size}" for size, count in census.items())


def aut_command(args):
    """Find generators of the automorphism group and report orbits."""
    loaded = _load(args)
    colored = loaded.colored_graph()
    result = automorphism_search(colored)
    group = result.group

    print("\n✓ Automorphism search complete")
    print(f"  Vertices: {colored.vertex_count}")
    print(f"  Edges: {len(colored.edges)}")
    print(f"  Colors: {colored.color_count}")

    if group.is_trivial:
        print("  Group: trivial group")
    else:
        print(f"  Generators ({len(group.generators)}):")
        for g in group.generators:
            print(f"    {format_cycles(g, colored.labels)}")

    if result.order <= ORACLE_ORDER_LIMIT:
        oracle = group_order_oracle(group)
        if oracle != result.order:
            raise ConsistencyError(f"search order {result.order} but closure has {oracle} elements")
        print(f"  Order: {result.order} (oracle-verified)")
    else:
        print(f"  Order: {result.order} (generated-set only)")

    report = orbit_report(group, colored)
    print(f"\n  Variable orbits ({report.variable_orbit_count}): "
          f"{_format_classes(report.variable_classes)}")
    if report.feature_classes:
        print(f"  Feature orbits ({report.feature_orbit_count}): "
              f"{_format_classes(report.feature_classes)}")

    if args.no_evidence and loaded.clause_set is not None and loaded.clause_set.evidence:
        plain = loaded.colored_graph(evidence=False)
        plain_report = orbit_report(automorphism_search(plain).group, plain)
        print("\n  Without evidence:")
        print(f"    Variable orbits: {plain_report.variable_orbit_count}")
        print(f"    Feature orbits: {plain_report.feature_orbit_count}")

    if args.dot:
        save_dot(colored, args.dot)
        print(f"\n✓ DOT diagram saved to: {args.dot}")

    if args.generators:
        with open(args.generators, "w", encoding="utf-8") as f:
            f.write(format_generators(group, colored.labels))
        print(f"✓ Generators saved to: {args.generators}")


def orbits_command(args):
    """Orbit partition of points, optionally of all binary states."""
    loaded = _load(args)
    colored = loaded.colored_graph()
    group = automorphism_search(colored).group
    names: List[str] = list(colored.labels)
    if loaded.clause_set is not None:
        group = restrict_to_variables(group, colored)
        names = list(loaded.clause_set.variable_names)

    partition = point_orbits(group)
    classes = [tuple(names[v] for v in members) for members in partition.classes]
    print(f"\n✓ Point orbits ({len(classes)}): {_format_classes(classes)}")

    if args.states:
        if group.domain_size > STATE_ORBIT_LIMIT:
            raise ScaleGuardError("state orbit census points", STATE_ORBIT_LIMIT, group.domain_size)
        census = state_orbit_census(group)
        print(f"  State orbits of {{0,1}}^{group.domain_size}: {sum(census.values())}")
        print(f"  Orbit sizes: {_format_census(census)}")


def sample_command(args):
    """Run a chain and dump its trajectory."""
    loaded = _load(args)
    model = loaded.model(args.lam)
    chain = make_kernel(args.kernel, model, args.seed)
    if args.orbital:
        chain = OrbitalKernel(chain, _model_group(args, model), args.orbit_sampling)

    header = f"kernel={args.kernel} seed={args.seed} variables={model.variable_count}"
    written = write_trajectory(run_chain(chain, args.samples), args.out, header, args.thin)
    mode = f"orbital ({args.orbit_sampling}) " if args.orbital else ""
    print(f"\n✓ {written} states from {mode}{args.kernel} saved to: {args.out}")


def rho_command(args):
    """Exhaustive rho and the resulting lambda threshold."""
    loaded = _load(args)
    if loaded.graph is None:
        raise ContractError("rho needs a plain graph (p edge) or --topology")
    g = loaded.graph
    group = automorphism_search(loaded.colored_graph()).group
    estimate = estimate_rho(g, group)
    delta = g.max_degree
    threshold = orbital_lambda_threshold(estimate.value, delta)

    print("\n✓ rho computed")
    print(f"  rho: {estimate.value:.6f}")
    print(f"  Triples: {estimate.separated_triples} separated of {estimate.valid_triples} valid")
    print(f"  Measure: {estimate.measure}")
    print(f"  Max degree: {delta}")
    if math.isinf(threshold):
        print("  Lambda threshold (orbital): UNBOUNDED")
    else:
        print(f"  Lambda threshold (orbital): {threshold:.6f}")
    if delta > 1:
        print(f"  Lambda threshold (base chain): {1 / (delta - 1):.6f}")


def bench_command(args):
    """Run a TV-curve experiment from a config file."""
    print(f"Reading config: {args.config}")
    cfg = load_config(args.config)
    curves = run_experiment(cfg, args.out)
    print(f"\n✓ {len(curves)} curves saved to: {args.out}\n")
    print(format_comparison(compare_curves(curves)))


def _mixing(matrix, pi, eps) -> str:
    try:
        return str(exact_mixing_time(matrix, pi, eps))
    except NotConvergedError as e:
        return f"not converged ({e})"


def check_command(args):
    """Verify the orbital chain's properties on exact transition matrices."""
    loaded = _load(args)
    model = loaded.model(args.lam)
    base_kind = "insert_delete" if isinstance(model, IndependentSetModel) else "gibbs"
    base = make_kernel(base_kind, model, args.seed)
    group = _model_group(args, model)
    orbital = OrbitalKernel(base, group)

    pi = enumerate_distribution(model)
    base_matrix = exact_transition_matrix(base)
    orbital_matrix = exact_transition_matrix(orbital)

    checks = [
        ("base kernel equivariant", check_equivariance(base, group, base_matrix)),
        ("base detailed balance", satisfies_detailed_balance(base_matrix, pi)),
        ("orbital detailed balance", satisfies_detailed_balance(orbital_matrix, pi)),
        ("orbital stationary", is_stationary(orbital_matrix, pi)),
        ("orbital aperiodic", is_aperiodic(orbital_matrix)),
        ("orbital irreducible", is_irreducible(orbital_matrix)),
    ]
    print(f"\n  States: {base_matrix.size}, generators: {len(group.generators)}")
    for label, passed in checks:
        print(f"  {'✓' if passed else '⚠'} {label}")
    print(f"\n  Mixing time tau({args.eps:g}):")
    print(f"    {base_kind}: {_mixing(base_matrix, pi, args.eps)}")
    print(f"    orbital {base_kind}: {_mixing(orbital_matrix, pi, args.eps)}")

    if not all(passed for _, passed in checks):
        sys.exit(EXIT_CONTRACT)


def exact_command(args):
    """Export the exact distribution and marginals."""
    loaded = _load(args)
    model = loaded.model(args.lam)
    pi = enumerate_distribution(model)
    write_distribution_csv(pi, args.out)

    print(f"\n✓ Exact distribution saved to: {args.out}")
    print(f"  Support: {len(pi.support)} states")
    print(f"  Partition function: {pi.partition_function:.10g}")
    print("  Marginals:")
    for name, p in zip(model.names, exact_marginals(pi)):
        print(f"    {name}: {p:.6f}")


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="Input file (wcnf, cgraph or edge)")
    parser.add_argument(
        "--topology", "-T", choices=sorted(TOPOLOGIES), help="Built-in graph instead of a file"
    )
    parser.add_argument("--k", type=int, default=3, help="Topology size parameter (default: 3)")


def _add_lambda(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, help="Fugacity lambda (default: 1)"
    )


def _add_group(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--group", help="Generators file on the model variables (default: detect symmetries)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbital",
        description="Orbital - symmetry detection and orbital Markov chains",
        epilog=FORMATS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Log debug output to stderr")
    parser.add_argument("--version", "-v", action="version", version=f"orbital {VERSION}")
    subparsers = parser.add_subparsers(title="commands", dest="command")

    # Aut command
    aut_parser = subparsers.add_parser("aut", help="Automorphism group generators and order")
    _add_input(aut_parser)
    aut_parser.add_argument("--dot", help="Write the colored graph as Graphviz DOT")
    aut_parser.add_argument(
        "--no-evidence", action="store_true", help="Also report orbit counts with evidence ignored"
    )
    aut_parser.add_argument("--generators", help="Write the generating set as a generators file")
    aut_parser.set_defaults(func=aut_command)

    # Orbits command
    orbits_parser = subparsers.add_parser("orbits", help="Orbit partition of points and states")
    _add_input(orbits_parser)
    orbits_parser.add_argument(
        "--states",
        action="store_true",
        help=f"Census of {{0,1}}^n orbits (n <= {STATE_ORBIT_LIMIT})",
    )
    orbits_parser.set_defaults(func=orbits_command)

    # Sample command
    sample_parser = subparsers.add_parser("sample", help="Run a chain and dump its trajectory")
    _add_input(sample_parser)
    sample_parser.add_argument("--kernel", required=True, choices=sorted(KERNELS))
    sample_parser.add_argument("--orbital", action="store_true", help="Add orbit resampling")
    sample_parser.add_argument("--orbit-sampling", choices=ORBIT_SAMPLING, default="pra")
    _add_group(sample_parser)
    _add_lambda(sample_parser)
    sample_parser.add_argument("--samples", type=int, default=1000, help="Steps (default: 1000)")
    sample_parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sample_parser.add_argument("--thin", type=int, default=1, help="Keep every k-th state")
    sample_parser.add_argument("--out", "-o", default="trajectory.txt")
    sample_parser.set_defaults(func=sample_command)

    # Rho command
    rho_parser = subparsers.add_parser("rho", help="Exhaustive rho and lambda threshold")
    _add_input(rho_parser)
    rho_parser.set_defaults(func=rho_command)

    # Bench command
    bench_parser = subparsers.add_parser("bench", help="TV convergence curves from a config")
    bench_parser.add_argument("config", help="Experiment config file (key = value)")
    bench_parser.add_argument("--out", "-o", default="curves.csv")
    bench_parser.set_defaults(func=bench_command)

    # Check command
    check_parser = subparsers.add_parser("check", help="Exact-matrix checks of the orbital chain")
    _add_input(check_parser)
    _add_lambda(check_parser)
    check_parser.add_argument("--eps", type=float, default=0.1, help="TV threshold (default: 0.1)")
    check_parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_group(check_parser)
    check_parser.set_defaults(func=check_command)

    # Exact command
    exact_parser = subparsers.add_parser("exact", help="Export the exact distribution")
    _add_input(exact_parser)
    _add_lambda(exact_parser)
    exact_parser.add_argument("--out", "-o", default="distribution.csv")
    exact_parser.set_defaults(func=exact_command)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command is None:
        parser.print_help()
        sys.exit(0)

    try:
        args.func(args)
    except FileNotFoundError as e:
        _fail(f"File not found: {e.filename}", EXIT_PARSE)
    except ParseError as e:
        _fail(str(e), EXIT_PARSE)
    except ScaleGuardError as e:
        _fail(str(e), EXIT_SCALE)
    except (ContractError, ConsistencyError, NotConvergedError, SizeMismatchError) as e:
        _fail(str(e), EXIT_CONTRACT)


if __name__ == "__main__":
    main()
