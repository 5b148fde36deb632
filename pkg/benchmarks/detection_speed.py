import timeit


def benchmark_automorphism_search(topology, k, number=20):
    setup = f"""
from orbital.models import TOPOLOGIES
from orbital.symmetry import automorphism_search, graph_to_colored
graph = graph_to_colored(TOPOLOGIES["{topology}"]({k}))
"""
    return timeit.timeit("automorphism_search(graph)", setup=setup, number=number) / number


def benchmark_pra(number=100000):
    setup = """
from orbital.models import TOPOLOGIES
from orbital.perm import PRASampler
from orbital.symmetry import automorphism_generators, graph_to_colored
sampler = PRASampler(automorphism_generators(graph_to_colored(TOPOLOGIES["complete"](5))))
"""
    return timeit.timeit("sampler.next_images()", setup=setup, number=number) / number


if __name__ == "__main__":
    for topology, k in (("grid", 5), ("cliques", 5), ("complete", 5), ("grid", 10)):
        print(f"Search {topology} k={k}: {benchmark_automorphism_search(topology, k) * 1e3:.2f} ms")
    print(f"PRA draw on Sym(25): {benchmark_pra() * 1e6:.2f} μs")
