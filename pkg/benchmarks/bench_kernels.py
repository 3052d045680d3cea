"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Reports the
best-of-N wall time per call for the raw kernels and for a full
``eval_g_0n`` evaluation, and the largest relative difference between the
two backends' results.
"""
import argparse
import contextlib
import timeit

import numpy as np

from gbias import _backend, meijer_kernel, specfun


@contextlib.contextmanager
def using(name):
    # the modules bind the backend at import; swap it for the duration
    saved = meijer_kernel.impl, specfun.impl
    meijer_kernel.impl = specfun.impl = _backend.get(name)
    try:
        yield _backend.get(name)
    finally:
        meijer_kernel.impl, specfun.impl = saved


def cases():
    rng = np.random.default_rng(0)
    z = rng.uniform(-20, 20, 4096) + 1j * rng.uniform(-60, 60, 4096)
    a3 = np.array([0.5, 1.3, 2.0])
    return {
        "loggamma_array(4096)": lambda m: m.loggamma_array(z),
        "loggamma_scalar": lambda m: m.loggamma_scalar(2.5 + 3.0j),
        "mb_sum(n=3, 2000 nodes)": lambda m: m.mb_sum(0.3, a3, 1.0, 0.05, 0.05, 2000, 0.0),
        "eval_g_0n(x=1, n=2)": lambda m: meijer_kernel.eval_g_0n(1.0, [0.0, 0.0]),
        "eval_g_0n(x=0.05, n=3)": lambda m: meijer_kernel.eval_g_0n(0.05, [0.5, 1.3, 2.0]),
    }


def bench(repeat):
    names = _backend.available()
    rows = []
    for label, fn in cases().items():
        times, results = {}, {}
        for name in names:
            with using(name) as mod:
                timer = timeit.Timer(lambda: fn(mod))
                loops, _ = timer.autorange()
                times[name] = min(timer.repeat(repeat, loops)) / loops
                results[name] = np.asarray(fn(mod))
        diff = 0.0
        if len(names) == 2:
            a, b = results["compiled"], results["python"]
            diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        rows.append((label, times, diff))
    return names, rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    names, rows = bench(args.repeat)
    head = f"{'kernel':<26}" + "".join(f"{n + ' (us)':>16}" for n in names)
    if len(names) == 2:
        head += f"{'speedup':>10}{'max rel diff':>14}"
    print(head)
    for label, times, diff in rows:
        line = f"{label:<26}" + "".join(f"{times[n] * 1e6:>16.1f}" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x{diff:>14.1e}"
        print(line)
    if len(names) == 1:
        print("compiled extension not built; only the python backend was timed")


if __name__ == "__main__":
    main()
