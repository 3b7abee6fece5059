"""Compare the compiled and numpy fiber-matrix assembly kernels.

    python3 benchmarks/bench_kernels.py --repeat 5

Each case assembles the full default band-structure grid for one fixture.
"""

import argparse
import timeit

import numpy as np

from bandmass import _assemble_py
from bandmass.fixtures import load_fixture
from bandmass.floquet import _operands
from bandmass.spectrum import default_grid, torus_grid

try:
    from bandmass._assemble import assemble as compiled
except ImportError:
    compiled = None

CASES = ["lattice:3", "graphene", "stanene", "kagome"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--flavor", default="normalized", choices=["normalized", "combinatorial"])
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernel not built; only the numpy fallback is available")

    print(f"{'fixture':<10} {'points':>7} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8} {'max diff':>9}")
    for name in CASES:
        g = load_fixture(name)
        thetas = np.ascontiguousarray(torus_grid(g.dim, default_grid(g.dim)))
        ops = _operands(g, args.flavor)
        t_py = min(timeit.repeat(lambda: _assemble_py.assemble(thetas, *ops), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:<10} {len(thetas):>7} {1e3 * t_py:>10.2f} {'-':>10} {'-':>8} {'-':>9}")
            continue
        t_cy = min(timeit.repeat(lambda: compiled(thetas, *ops), number=1, repeat=args.repeat))
        diff = np.abs(compiled(thetas, *ops) - _assemble_py.assemble(thetas, *ops)).max()
        print(f"{name:<10} {len(thetas):>7} {1e3 * t_py:>10.2f} {1e3 * t_cy:>10.2f} {t_py / t_cy:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
