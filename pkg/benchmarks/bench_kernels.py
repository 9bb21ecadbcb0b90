"""Compare the compiled evaluation kernel against the NumPy fallback.

Times raw system evaluation, Jacobian evaluation, and an end-to-end flow
integration driven through each backend.  Run from the repository root:

    python benchmarks/bench_kernels.py
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from stratlab import _pure
from stratlab._kernels import PolySystem
from stratlab.diffspace import SpaceDef
from stratlab.fields import Derivation, FlowParams, flow
from stratlab.polyalg import Polynomial

try:
    from stratlab import _speedups
except ImportError:
    _speedups = None


def random_system(rng, nvars, ncomp, nterms, max_deg):
    polys = []
    for _ in range(ncomp):
        terms = {}
        for _ in range(nterms):
            e = tuple(rng.randint(0, max_deg) for _ in range(nvars))
            terms[e] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        polys.append(Polynomial(nvars, terms))
    return polys


def time_eval(impl, system, points, repeats=3):
    out = np.empty(system.ncomp)
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for x in points:
            impl.eval_system(system.coeffs, system.exps, system.starts, x, out)
        best = min(best, time.perf_counter() - t0)
    return best


def time_jacobian(impl, system, points, repeats=3):
    out = np.empty((system.ncomp, system.nvars))
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for x in points:
            impl.eval_jacobian(system.coeffs, system.exps, system.starts, x, out)
        best = min(best, time.perf_counter() - t0)
    return best


def time_flow(backend_env, repeats=3):
    # fresh interpreter state is overkill; swap the module-level impl instead
    import stratlab._kernels as kernels

    old = kernels._impl
    kernels._impl = backend_env
    try:
        x, y = Polynomial.variables(2)
        circle = SpaceDef(
            2, ["x", "y"], equations=[x**2 + y**2 - 1], sample_points=[(1, 0)]
        )
        rot = Derivation([-y, x], name="rot")
        rot._system = None  # force re-pack under the selected backend
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            flow(circle, rot, (1, 0), 4 * math.pi, FlowParams(record=False))
            best = min(best, time.perf_counter() - t0)
        return best
    finally:
        kernels._impl = old


def main():
    rng = random.Random(42)
    npoints = 20000
    print(f"{'case':<38} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for nvars, ncomp, nterms, max_deg in [
        (2, 2, 4, 3),
        (4, 4, 8, 4),
        (6, 6, 16, 5),
    ]:
        system = PolySystem(random_system(rng, nvars, ncomp, nterms, max_deg))
        points = [np.array([rng.uniform(-2, 2) for _ in range(nvars)]) for _ in range(npoints)]
        t_pure = time_eval(_pure, system, points)
        label = f"eval n={nvars} m={ncomp} terms={nterms * ncomp}"
        if _speedups is None:
            print(f"{label:<38} {t_pure:>9.3f}s {'absent':>10}")
            continue
        t_fast = time_eval(_speedups, system, points)
        print(f"{label:<38} {t_pure:>9.3f}s {t_fast:>9.3f}s {t_pure / t_fast:>7.1f}x")
        t_pure_j = time_jacobian(_pure, system, points[: npoints // 4])
        t_fast_j = time_jacobian(_speedups, system, points[: npoints // 4])
        label_j = f"jacobian n={nvars} m={ncomp}"
        print(f"{label_j:<38} {t_pure_j:>9.3f}s {t_fast_j:>9.3f}s {t_pure_j / t_fast_j:>7.1f}x")
    if _speedups is not None:
        t_flow_pure = time_flow(_pure)
        t_flow_fast = time_flow(_speedups)
        label = "flow: two circle revolutions"
        print(
            f"{label:<38} {t_flow_pure:>9.3f}s {t_flow_fast:>9.3f}s "
            f"{t_flow_pure / t_flow_fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
