"""Time the numba kernels against the pure-Python/numpy fallback.

    python benchmarks/bench_kernels.py --n 4000 --repeat 3

Both backends run in this process; the backend is switched through
DISTCOLOR_BACKEND between calls. Results are checked for equality so a
speedup never hides a divergence.
"""

import argparse
import os
import time

import numpy as np

from distcolor import _accel
from distcolor.coloring import dsatur, greedy_color
from distcolor.experiments import lemma4_violations
from distcolor.geometry import RadiusSchedule, radius_for, sample_points
from distcolor.graph import build_graph, graph_power


def timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--l", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    r = radius_for(RadiusSchedule("conn", 2.0), args.n, 2)
    cloud = sample_points(args.n, "uniform-cube", 2, args.seed, r=r)
    g = build_graph(cloud)
    g_l = graph_power(g, args.l)
    cases = [
        ("build_graph", lambda: build_graph(cloud)),
        (f"graph_power l={args.l}", lambda: graph_power(g, args.l)),
        ("dsatur G^l", lambda: dsatur(g_l).colors),
        ("greedy smallest-last G^l", lambda: greedy_color(g_l).colors),
        (f"lemma4_violations l={args.l + 1}", lambda: lemma4_violations(cloud, g, args.l + 1)),
    ]

    saved = os.environ.get(_accel.ENV_VAR)
    print(f"n={args.n}  edges(G)={g.edge_count}  edges(G^{args.l})={g_l.edge_count}")
    print(f"{'kernel':<28}{'numba s':>10}{'numpy s':>10}{'speedup':>10}  equal")
    try:
        for name, fn in cases:
            os.environ[_accel.ENV_VAR] = "numba"
            fn()  # compile or load from cache
            t_fast, a = timed(fn, args.repeat)
            os.environ[_accel.ENV_VAR] = "numpy"
            t_slow, b = timed(fn, 1)
            print(f"{name:<28}{t_fast:>10.4f}{t_slow:>10.4f}{t_slow / t_fast:>9.1f}x  {same(a, b)}")
    finally:
        if saved is None:
            os.environ.pop(_accel.ENV_VAR, None)
        else:
            os.environ[_accel.ENV_VAR] = saved


if __name__ == "__main__":
    main()
