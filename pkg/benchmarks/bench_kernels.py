#!/usr/bin/env python3
"""Compare the compiled transportation kernel against the pure-Python twin.

Two views:
  * microbenchmark of the raw kernel on random transportation instances
    (the call that sits inside every search-node evaluation), and
  * an end-to-end curvature sweep timed under each backend.

Run:  python3 benchmarks/bench_kernels.py
"""

import os
import random
import statistics
import sys
import time

from hypercurv import kernels


def random_instance(rng, side, supply):
    ns = rng.randint(2, side)
    nt = rng.randint(2, side)
    supplies = [rng.randint(1, supply) for _ in range(ns)]
    total = sum(supplies)
    cuts = sorted(rng.randint(0, total) for _ in range(nt - 1))
    demands = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    costs = [rng.randint(0, 6) for _ in range(ns * nt)]
    return supplies, demands, costs, ns, nt


def bench_kernel(mod, instances, repeats=20):
    best = []
    for sup, dem, costs, ns, nt in instances:
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            mod.transport_value(list(sup), list(dem), list(costs), ns, nt)
            times.append(time.perf_counter() - t0)
        best.append(min(times))
    return statistics.mean(best)


def bench_sweep(backend_name):
    """Curvature sweep over the 3x3 grid hypergraph under one backend."""
    env = os.environ.copy()
    src = (
        "import time, hypercurv as hc\n"
        "from fractions import Fraction as F\n"
        "from hypercurv import kernels\n"
        "H = hc.generate('grid9')\n"
        "h = hc.ConcaveCost('log', a=1)\n"
        "t0 = time.perf_counter()\n"
        "for k in range(1, 8):\n"
        "    hc.orc_alpha_h(H, h, 'x', 'y', F(k, 8), max_states=8000)\n"
        "print(kernels.BACKEND, time.perf_counter() - t0)\n"
    )
    if backend_name == "python":
        env["HYPERCURV_PURE"] = "1"
    else:
        env.pop("HYPERCURV_PURE", None)
    import subprocess

    out = subprocess.run([sys.executable, "-c", src], env=env,
                         capture_output=True, text=True, check=True)
    used, secs = out.stdout.split()
    assert used == backend_name, f"expected {backend_name}, ran {used}"
    return float(secs)


def main():
    available = kernels.backends()
    print(f"available backends: {', '.join(available)}")
    rng = random.Random(17)
    small = [random_instance(rng, 6, 30) for _ in range(40)]
    large = [random_instance(rng, 12, 4000) for _ in range(20)]

    print("\nkernel microbenchmark (mean best-of-20 per solve)")
    print(f"{'instances':<22}" + "".join(f"{n:>12}" for n in available))
    for label, batch in [("small (<=6x6, D<=30)", small),
                         ("large (<=12x12, D<=4k)", large)]:
        row = [bench_kernel(mod, batch) for mod in available.values()]
        cells = "".join(f"{t * 1e6:>10.1f}us" for t in row)
        print(f"{label:<22}{cells}")
    if "c" in available:
        speedup = (bench_kernel(available["python"], large)
                   / bench_kernel(available["c"], large))
        print(f"compiled speedup on large instances: {speedup:.1f}x")

    print("\nend-to-end grid9 curvature sweep (7 idleness points)")
    for name in available:
        print(f"  {name:<8}{bench_sweep(name):8.2f}s")


if __name__ == "__main__":
    main()
