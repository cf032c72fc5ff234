"""Compare the compiled search kernel against the pure-Python fallback.

Runs the same workloads through both implementations and prints a table of
medians plus the speedup.  The two kernels share one contract, so node
counts must agree exactly; this doubles as an equivalence spot check.

Usage: python3 bench/benchmark.py [--repeat N]
"""

from __future__ import annotations

import argparse
import statistics
import time

from omnilat import _fallback
from omnilat.constructions import build_l_star, build_m_star
from omnilat.groups import group_by_name

try:
    from omnilat import _speed
except ImportError:  # extension not built: fallback only
    _speed = None


def flat(square) -> list[int]:
    return [s for row in square.grid for s in row]


def group_square(name):
    g = group_by_name(name)
    from omnilat.latin import LatinSquare

    return LatinSquare(tuple(tuple(r) for r in g.table))


def workloads():
    l8 = build_l_star(1, 0)
    m6 = build_m_star(1)
    m10 = build_m_star(2)
    q8 = group_square("Q8")
    z11 = group_square("Z11")
    d12 = group_square("D12")
    yield "order-8 full spectrum", [
        ("search", l8, ell, True, -1) for ell in range(4, 9)
    ]
    yield "order-10 half-length absence proof", [("search", m10, 5, True, -1)]
    yield "order-8 absence at length 5", [("search", q8, 5, True, -1)]
    yield "order-11 maximal at length 7", [("search", z11, 7, True, -1)]
    yield "order-12 maximal at length 8", [("search", d12, 8, True, 10**6)]
    yield "order-6 species canonical form", [("species", m6, None, None, None)]


def run_once(impl, jobs) -> int:
    nodes = 0
    for kind, square, ell, maximal, cap in jobs:
        if kind == "species":
            impl.species_min(square.n, flat(square))
        else:
            status, witness, n = impl.search(
                square.n, flat(square), ell, require_maximal=maximal, node_limit=cap
            )
            nodes += n
    return nodes


def bench(impl, jobs, repeat: int) -> tuple[float, int]:
    times = []
    nodes = 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        nodes = run_once(impl, jobs)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), nodes


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _speed is None:
        print("compiled kernel unavailable; timing the fallback only")
    header = f"{'workload':42s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, jobs in workloads():
        pure_t, pure_nodes = bench(_fallback, jobs, args.repeat)
        if _speed is None:
            print(f"{name:42s} {pure_t * 1e3:9.1f}ms {'-':>10s} {'-':>8s}")
            continue
        fast_t, fast_nodes = bench(_speed, jobs, args.repeat)
        if pure_nodes != fast_nodes:
            raise SystemExit(
                f"kernel disagreement on {name}: {pure_nodes} vs {fast_nodes} nodes"
            )
        print(
            f"{name:42s} {pure_t * 1e3:9.1f}ms {fast_t * 1e3:9.1f}ms "
            f"{pure_t / fast_t:7.1f}x"
        )


if __name__ == "__main__":
    main()
