"""Time the compiled kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from feynlab import _kernels
from feynlab.sqprocess import desargues_spec, jump_structure, wick_rotate


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    herm = (a + a.conj().T) / 2
    js = jump_structure(wick_rotate(desargues_spec()))
    q = np.array([0.5, 1.0])
    return {
        "jacobi_eigh n=64": lambda k: np.sort(k.jacobi_eigh(herm)[0]),  # sweep orders differ
        "normals 2000x1024": lambda k: k.normals(7, 0, 2000, 1024),
        "markov_paths 1e5": lambda k: k.markov_paths(js.cumulative, js.exit_rate, 0, 1.0, 7, 0, 100_000, q)[0],
        "telegraph 1e5": lambda k: k.telegraph(1.0, 1.0, 7, 0, 100_000, np.array([0.5]))[0],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.compiled is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':22s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}  agree")
    for name, fn in cases().items():
        tp, rp = best_of(lambda: fn(_kernels.python), args.repeat)
        if _kernels.compiled is None:
            print(f"{name:22s} {tp:11.4f} {'-':>13s} {'-':>8s}")
            continue
        tc, rc = best_of(lambda: fn(_kernels.compiled), args.repeat)
        agree = np.allclose(rp, rc, rtol=1e-10, atol=1e-12)
        print(f"{name:22s} {tp:11.4f} {tc:13.4f} {tp / tc:7.1f}x  {agree}")


if __name__ == "__main__":
    main()
