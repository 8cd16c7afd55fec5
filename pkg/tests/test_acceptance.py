"""Acceptance gate: twelve end-to-end checks, each at its fixed tolerance.

Every check prints one ``criterion NN: PASS|FAIL  detail`` line.  Run with
``pytest tests/test_acceptance.py`` (lines are repeated in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import math
import os
import sys
import tempfile

import numpy as np
import pytest

from feynlab.cli import EXPERIMENTS, main
from feynlab.cylmeasure import CylinderSet, IntervalUnion, analyticity_residual, blowup_table, variation_prefactor
from feynlab.fock import RateTriple, TruncatedFock, amoeba_evolution, predator_prey_run
from feynlab.sqprocess import CylinderEvent, consistency_checks, desargues_spec, empirical_vs_exact, wick_rotate
from feynlab.telegraph import KacParams, sample_taus, telegraph_table
from feynlab.timeslice import Grid1D, SliceParams, gaussian_state, split_step_evolve, timeslice_matrix, \
    trotter_convergence
from feynlab.wick import SpectralGrid, delta_divergence_scan, wick_moments

SEED = 20240611
RESULTS: dict[int, tuple[bool, str]] = {}


def criterion_1():
    rows, slope = trotter_convergence((8, 16, 32, 64, 128, 256), 1.0, (-10.0, 10.0), 512)
    last = rows[-1][1]
    return slope <= -0.9 and last < 1e-2, f"slope {slope:.4f} (<= -0.9), error at n=256 {last:.3e} (< 1e-2)"


def criterion_2():
    g = Grid1D(-10.0, 10.0, 256)
    V = np.zeros(g.points)
    K1 = timeslice_matrix(V, SliceParams(t=1.0, n=1, lam=1.0), g)
    psi = gaussian_state(g, 0.5)
    u1 = split_step_evolve(psi, V, SliceParams(t=1.0, n=1)).values
    kern, split = [], []
    for n in (2, 4, 8):
        Kn = timeslice_matrix(V, SliceParams(t=1.0, n=n, lam=1.0), g)
        kern.append(np.linalg.norm(Kn - K1) / np.linalg.norm(K1))
        un = split_step_evolve(psi, V, SliceParams(t=1.0, n=n)).values
        split.append(g.norm(un - u1) / g.norm(u1))
    ok = max(kern) < 1e-8 and max(split) < 1e-12
    return ok, f"kernel {max(kern):.2e} (< 1e-8), split-step {max(split):.2e} (< 1e-12)"


def criterion_3():
    rows = blowup_table(1 + 1j, (8, 16, 32, 64), 1.0, 6.0)
    vals = [r[1] for r in rows]
    monotone = all(b >= a for a, b in zip(vals, vals[1:]))
    ratio = rows[-1][3]
    real = blowup_table(1.0, (64,), 1.0, 6.0)[0][3]
    pref = [variation_prefactor(1 + 1j, n) for n in (1, 2, 3)]
    target = [math.sqrt(2) ** ((n + 1) / 2) for n in (1, 2, 3)]
    pref_err = max(abs(p / pref[0] - q / target[0]) for p, q in zip(pref, target))
    ok = monotone and ratio >= 0.95 and abs(real - 1) < 0.01 and pref_err < 1e-12
    return ok, (f"monotone {monotone}, ratio at m=64 {ratio:.4f} (>= 0.95), real-scale ratio {real:.6f} "
                f"(within 1%), prefactor ratio error {pref_err:.1e} (< 1e-12)")


def criterion_4():
    g = Grid1D(-8.0, 8.0, 256)
    box = IntervalUnion(((-1.0, 1.5),))
    E = CylinderSet((0.3, 0.7), (box, box))
    res = analyticity_residual(E, gaussian_state(g, 0.3, 0.8), gaussian_state(g, -0.5, 1.2), 1.0,
                               1.5 + 0.5j, 0.25, 64)
    return res < 1e-6, f"normalised residual {res:.2e} (< 1e-6)"


def criterion_5():
    spec = desargues_spec()
    worst = {}
    for s in (spec, wick_rotate(spec)):
        for k, v in consistency_checks(s, 1.0).items():
            worst[k] = max(worst.get(k, 0.0), v)
    ok = spec.n == 20 and max(worst.values()) < 1e-12
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (< 1e-12, 20 states)"


def criterion_6():
    cmp = empirical_vs_exact(wick_rotate(desargues_spec()), CylinderEvent(), 0, 1.0, 100_000, SEED)
    z = float(np.abs(cmp.z_scores).max())
    return cmp.tv_distance < 0.01 and z < 4, f"TV {cmp.tv_distance:.4f} (< 0.01), max |z| {z:.2f} (< 4)"


def criterion_7():
    space = TruncatedFock(1, 60)
    psi = amoeba_evolution(1.0, space).values
    exact = np.array([math.exp(-1) / math.factorial(k) for k in range(61)])
    sup = float(np.abs(psi - exact).max())
    sums = [abs(amoeba_evolution(t, space).total - 1) for t in (0.5, 1.0, 2.0)]
    ok = sup < 1e-10 and max(sums) < 1e-10
    return ok, f"sup error {sup:.1e} (< 1e-10), worst |sum - 1| {max(sums):.1e} (< 1e-10)"


def criterion_8():
    res = predator_prey_run(RateTriple(0.3, 0.3, 0.3), 8, 0.5, (1, 1))
    dev = abs(res.total - 1)
    ok = dev <= 1e-6 and res.boundary_mass < 1e-8
    return ok, f"|total - 1| {dev:.2e} (<= 1e-6), boundary mass {res.boundary_mass:.2e} (< 1e-8)"


def criterion_9():
    p = KacParams(1.0, 1.0, 1.0)
    rows = telegraph_table(p, 100_000, SEED)
    worst = max(r[4] / max(3 * r[2], 2e-3) for r in rows)
    tau, _, _ = sample_taus(p, 100_000, SEED)
    m = float(tau.mean())
    se = float(tau.std(ddof=1) / math.sqrt(tau.size))
    target = (1 - math.exp(-2)) / 2
    bounded = bool(np.all(np.abs(tau) <= p.t))
    ok = len(rows) == 9 and worst < 1 and abs(m - target) <= 3 * se and bounded
    return ok, (f"worst |MC - FD| / bound {worst:.3f} (< 1), tau mean {m:.5f} vs {target:.5f} "
                f"({abs(m - target) / se:.2f} SE, <= 3), all |tau| <= t {bounded}")


def criterion_10():
    rows, c = wick_moments(SpectralGrid(32.0, 1024), 100_000, SEED, 4)
    z = max(abs(r[5]) for r in rows)
    return z < 4, f"max |z| {z:.2f} over m, n <= 4 (< 4), c(f) = {c:.5f}"


def criterion_11():
    # 8192 modes so the smallest box spans about 13 mesh cells
    _, slope = delta_divergence_scan([0.4, 0.2, 0.1, 0.05], SpectralGrid(32.0, 8192))
    return -0.7 <= slope <= -0.3, f"fitted slope {slope:.4f} (in [-0.7, -0.3])"


def criterion_12():
    bad = []
    with tempfile.TemporaryDirectory() as d:
        for name, exp in EXPERIMENTS.items():
            bodies = []
            for run in ("a", "b"):
                out = os.path.join(d, f"{name}.{run}.csv")
                args = [name, "--out", out] + (["--seed", str(SEED)] if exp.stochastic else [])
                with contextlib.redirect_stderr(io.StringIO()):
                    code = main(args)
                with open(out, "rb") as fh:
                    bodies.append((code, fh.read()))
            if bodies[0][0] != 0 or bodies[0] != bodies[1]:
                bad.append(name)
    n = len(EXPERIMENTS)
    return not bad, f"{n - len(bad)}/{n} subcommands byte-identical" + (f", differing: {bad}" if bad else "")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def evaluate(i):
    ok, detail = CRITERIA[i]()
    ok = bool(ok)
    RESULTS[i] = (ok, detail)
    print(f"criterion {i:02d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok, detail


@pytest.mark.parametrize("i", list(CRITERIA), ids=[f"criterion_{i:02d}" for i in CRITERIA])
def test_acceptance(i):
    ok, detail = evaluate(i)
    assert ok, detail


if __name__ == "__main__":
    sys.exit(0 if all([evaluate(i)[0] for i in CRITERIA]) else 1)
