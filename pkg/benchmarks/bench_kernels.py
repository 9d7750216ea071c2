"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Each case runs the same inputs through both backends, checks that the
outputs agree, and prints the median time per call.
"""
import argparse
import statistics
import timeit

import numpy as np

from chanket import _kernels_py
from chanket.hilbert import SpaceRegistry

try:
    from chanket import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def cases(rng):
    for dims, keep in [((2, 2, 2), (0,)), ((2, 2, 4), (0, 1)), ((2,) * 6, (0, 2)), ((4, 4, 4), (1,))]:
        reg = SpaceRegistry.from_dims([f"s{k}" for k in range(len(dims))], list(dims))
        kept = [reg.labels[k] for k in keep]
        rest = [lab for lab in reg.labels if lab not in kept]
        keep_off, trace_off = reg.offsets(kept), reg.offsets(rest)
        n = reg.total
        mat = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        vec = rng.normal(size=n) + 1j * rng.normal(size=n)
        stride = int(np.prod(dims[1:]))
        tag = "x".join(map(str, dims))
        yield f"reduce_operator {tag}", "reduce_operator", (mat, keep_off, trace_off)
        yield f"reduce_cross    {tag}", "reduce_cross", (vec, vec, keep_off, trace_off)
        yield f"transpose       {tag}", "partial_transpose", (mat, stride, dims[0])


def median_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return statistics.median(t / loops for t in timer.repeat(repeat=max(3, repeat // 40), number=loops))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    if _kernels_c is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'case':<28}{'numpy (us)':>12}{'cython (us)':>13}{'speedup':>9}")
    for label, name, inputs in cases(rng):
        py = median_time(getattr(_kernels_py, name), inputs, args.repeat) * 1e6
        if _kernels_c is None:
            print(f"{label:<28}{py:>12.2f}")
            continue
        c_out = getattr(_kernels_c, name)(*inputs)
        assert np.allclose(c_out, getattr(_kernels_py, name)(*inputs), atol=1e-12)
        c = median_time(getattr(_kernels_c, name), inputs, args.repeat) * 1e6
        print(f"{label:<28}{py:>12.2f}{c:>13.2f}{py / c:>8.1f}x")


if __name__ == "__main__":
    main()
