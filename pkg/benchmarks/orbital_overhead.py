# benchmarks/orbital_overhead.py
import timeit

SETUP = """
from orbital.chains import OrbitalKernel, make_kernel
from orbital.models import TOPOLOGIES, IndependentSetModel, symmetry_group
model = IndependentSetModel(TOPOLOGIES["{topology}"](5))
base = make_kernel("insert_delete", model, 42)
orbital = OrbitalKernel(make_kernel("insert_delete", model, 42), symmetry_group(model))
x = base.start_state()
"""
STEP = "x = {kernel}.step(x)"


def benchmark_step(topology, kernel, number=20000):
    setup = SETUP.format(topology=topology)
    return timeit.timeit(STEP.format(kernel=kernel), setup=setup, number=number) / number


if __name__ == "__main__":
    for topology in ("grid", "cliques", "complete"):
        base = benchmark_step(topology, "base")
        orbital = benchmark_step(topology, "orbital")
        print(
            f"{topology:>9}: insert_delete {base * 1e6:.2f} μs/step, "
            f"orbital {orbital * 1e6:.2f} μs/step ({orbital / base - 1:+.0%})"
        )
