"""Time the compiled and pure-Python hypergeometric kernels on the same inputs.

    python3 benchmarks/bench_series.py [--repeat N]

Prints one line per (case, kernel) with the median call time and checks that
both kernels return bitwise-identical tuples.
"""

import argparse
import math
import statistics
import sys
import timeit

from tfdcs._backend import KERNELS
from tfdcs.specfun import MAX_TERMS, REL_TOL, ParamLists

CASES = [
    ("0F1 b=2 x=1", ParamLists((), (2.0,)), 1.0),
    ("0F1 b=2 x=400", ParamLists((), (2.0,)), 400.0),
    ("1F1 a=0.5 b=3 x=-30", ParamLists((0.5,), (3.0,)), -30.0),
    ("2F3 x=2e3", ParamLists((1.5, 2.5), (0.7, 3.0, 4.0)), 2000.0),
    ("0F2 x=9i", ParamLists((), (1.2, 3.3)), 9j),
]


def _args(params, x):
    x = complex(x)
    if x.imag == 0.0:
        sign = 1 if x.real > 0 else -1
        return (params._a_arr, params._b_arr, math.log(abs(x.real)), 0.0, sign, MAX_TERMS, REL_TOL)
    return (params._a_arr, params._b_arr, math.log(abs(x)), math.atan2(x.imag, x.real), 0, MAX_TERMS, REL_TOL)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--number", type=int, default=200)
    opts = ap.parse_args(argv)
    if "compiled" not in KERNELS:
        print("compiled kernel not built; only the fallback is timed", file=sys.stderr)
    mismatches = 0
    print(f"{'case':<24}{'kernel':<10}{'median us':>12}{'speedup':>10}")
    for label, params, x in CASES:
        args = _args(params, x)
        results = {name: fn(*args) for name, fn in KERNELS.items()}
        if len(set(results.values())) != 1:
            mismatches += 1
        times = {}
        for name, fn in KERNELS.items():
            runs = timeit.repeat(lambda: fn(*args), number=opts.number, repeat=opts.repeat)
            times[name] = statistics.median(runs) / opts.number * 1e6
        for name, us in times.items():
            speed = times["python"] / us
            print(f"{label:<24}{name:<10}{us:>12.2f}{speed:>9.1f}x")
    if mismatches:
        print(f"{mismatches} case(s) differ between kernels", file=sys.stderr)
        return 1
    print("kernels agree bitwise on all cases")
    return 0


if __name__ == "__main__":
    sys.exit(main())
