"""Batch experiment runner.

    feynlab <experiment> [--param value ...] [--config FILE] [--seed U64]
                         [--out PATH] [--format csv|json] [--strict] [--threads K]

Parameters come from built-in defaults, then a flat ``key=value`` config
file, then command-line flags.  Each run writes its table to ``--out`` and a
sidecar ``<out>.manifest.json`` with the resolved configuration and metrics.

Exit codes: 0 success, 2 config error, 3 tolerance violation under
``--strict``, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .errors import BudgetError, FeynlabError, NumericError, PreconditionError, TruncationError

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_NUMERIC = 0, 2, 3, 4
GLOBAL_KEYS = ("seed", "out", "format", "strict", "threads")


class ConfigError(Exception):
    pass


# -- value parsers -------------------------------------------------------------

def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def _list_of(conv):
    def parse(text):
        if isinstance(text, (list, tuple)):
            return [conv(v) for v in text]
        items = [v for v in str(text).split(",") if v.strip()]
        return [conv(v.strip()) for v in items]

    return parse


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_seed(text) -> int:
    try:
        seed = int(str(text), 0)
    except ValueError:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {text!r}")
    return seed


def _optional_str(text):
    return None if text in (None, "", "none") else str(text)


# -- experiment registry ---------------------------------------------------------

@dataclass
class Param:
    parse: Callable
    default: object
    help: str = ""


@dataclass
class Result:
    columns: list
    rows: list
    metrics: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)


@dataclass
class Experiment:
    name: str
    run: Callable
    params: dict
    stochastic: bool
    help: str


EXPERIMENTS: dict[str, Experiment] = {}


def experiment(name, stochastic=False, **params):
    def wrap(fn):
        EXPERIMENTS[name] = Experiment(name, fn, params, stochastic, (fn.__doc__ or "").strip())
        return fn

    return wrap


F, I, C = float, int, parse_complex
FL, IL = _list_of(float), _list_of(int)


@experiment(
    "trotter-convergence",
    t=Param(F, 1.0, "evolution time"),
    x_min=Param(F, -10.0), x_max=Param(F, 10.0), points=Param(I, 512),
    ns=Param(IL, [8, 16, 32, 64, 128, 256], "step counts"),
    center=Param(F, 1.0, "initial Gaussian centre"),
    mass=Param(F, 1.0), hbar=Param(F, 1.0),
)
def _trotter(cfg, seed, threads):
    """Split-step error against the spectral reference in a harmonic well."""
    from .timeslice import trotter_convergence

    rows, slope = trotter_convergence(cfg["ns"], cfg["t"], (cfg["x_min"], cfg["x_max"]), cfg["points"],
                                      cfg["center"], cfg["mass"], cfg["hbar"])
    last = rows[-1][1]
    return Result(["n", "error_l2"], rows, {"fitted_slope": slope, "error_at_max_n": last},
                  {"slope_le_-0.9": slope <= -0.9, "final_error_lt_1e-2": last < 1e-2})


@experiment(
    "free-slice-identity",
    t=Param(F, 1.0), x_min=Param(F, -10.0), x_max=Param(F, 10.0), points=Param(I, 256),
    ns=Param(IL, [2, 4, 8]),
)
def _free_slice(cfg, seed, threads):
    """Slice-count independence of the free kernel (heat) and the free split-step (quantum)."""
    from .timeslice import Grid1D, SliceParams, gaussian_state, split_step_evolve, timeslice_matrix

    g = Grid1D(cfg["x_min"], cfg["x_max"], cfg["points"])
    V = np.zeros(g.points)
    K1 = timeslice_matrix(V, SliceParams(t=cfg["t"], n=1, lam=1.0), g)
    psi = gaussian_state(g, 0.5)
    u1 = split_step_evolve(psi, V, SliceParams(t=cfg["t"], n=1)).values
    rows = []
    for n in cfg["ns"]:
        Kn = timeslice_matrix(V, SliceParams(t=cfg["t"], n=n, lam=1.0), g)
        rows.append((int(n), "kernel_lambda_1", float(np.linalg.norm(Kn - K1) / np.linalg.norm(K1))))
        un = split_step_evolve(psi, V, SliceParams(t=cfg["t"], n=n)).values
        rows.append((int(n), "split_step_lambda_-i", g.norm(un - u1) / g.norm(u1)))
    kmax = max(r[2] for r in rows if r[1] == "kernel_lambda_1")
    smax = max(r[2] for r in rows if r[1] != "kernel_lambda_1")
    return Result(["n", "method", "relative_difference"], rows,
                  {"max_kernel_difference": kmax, "max_split_step_difference": smax},
                  {"kernel_lt_1e-8": kmax < 1e-8, "split_step_lt_1e-12": smax < 1e-12})


@experiment(
    "variation-blowup",
    **{"lambda": Param(C, 1 + 1j, "mass scale, e.g. 1+1i")},
    m=Param(IL, [8, 16, 32, 64], "cells per coordinate"),
    t=Param(F, 1.0), half_width=Param(F, 6.0), points=Param(I, 512), width=Param(F, 1.0),
)
def _blowup(cfg, seed, threads):
    """Brute-force partition variation vs the closed form, one intermediate time."""
    from .cylmeasure import blowup_table, variation_prefactor

    lam = cfg["lambda"]
    rows = blowup_table(lam, cfg["m"], cfg["t"], cfg["half_width"], cfg["points"], cfg["width"])
    vals = [r[1] for r in rows]
    monotone = all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
    ratio = rows[-1][3]
    pref = [variation_prefactor(lam, k) for k in (1, 2, 3)]
    metrics = {"final_ratio": ratio, "prefactors_n1_n2_n3": pref}
    checks = {"monotone_in_m": monotone}
    if abs(lam) > lam.real:
        checks["final_ratio_ge_0.95"] = ratio >= 0.95
    else:
        checks["within_1pct"] = abs(ratio - 1.0) < 0.01
    return Result(["m", "bruteforce", "closed_form", "ratio"], rows, metrics, checks)


@experiment(
    "analyticity-contour",
    center=Param(C, 1.5 + 0.5j), radius=Param(F, 0.25), nodes=Param(I, 64),
    t=Param(F, 1.0), x_min=Param(F, -8.0), x_max=Param(F, 8.0), points=Param(I, 256),
    times=Param(FL, [0.3, 0.7], "intermediate times"),
    interval=Param(FL, [-1.0, 1.5], "set imposed at every intermediate time"),
)
def _analyticity(cfg, seed, threads):
    """Contour-integral residual of a cylinder-set amplitude in the mass scale."""
    from .cylmeasure import CylinderSet, IntervalUnion, analyticity_residual
    from .timeslice import Grid1D, gaussian_state

    if len(cfg["interval"]) != 2:
        raise ConfigError("interval needs exactly two values lo,hi")
    g = Grid1D(cfg["x_min"], cfg["x_max"], cfg["points"])
    phi = gaussian_state(g, 0.3, 0.8)
    psi = gaussian_state(g, -0.5, 1.2)
    box = IntervalUnion((tuple(cfg["interval"]),))
    E = CylinderSet(tuple(cfg["times"]), tuple(box for _ in cfg["times"]))
    rows = [(k, analyticity_residual(E, phi, psi, cfg["t"], cfg["center"], cfg["radius"], k))
            for k in (cfg["nodes"], 2 * cfg["nodes"])]
    return Result(["nodes", "residual"], rows,
                  {"residual": rows[0][1], "cylinder_set": E.to_json()},
                  {"residual_lt_1e-6": rows[0][1] < 1e-6,
                   "refinement_agrees_1e-8": abs(rows[0][1] - rows[1][1]) < 1e-8})


def _graph_spec(cfg):
    from .sqprocess import EvolutionSpec, graph_hamiltonian, kneser_bipartite, load_edge_list

    if cfg.get("graph"):
        A = load_edge_list(cfg["graph"])
    else:
        nk = cfg["kneser"]
        if len(nk) != 2:
            raise ConfigError("kneser needs two values n,k")
        A, _ = kneser_bipartite(*nk)
    degree = int(A.sum(axis=1).max())
    return EvolutionSpec(graph_hamiltonian(A, degree))


@experiment(
    "sq-walk", stochastic=True,
    graph=Param(_optional_str, None, "edge-list file of 0-indexed 'u v' lines"),
    kneser=Param(IL, [5, 2], "n,k of the inclusion graph used when no file is given"),
    x0=Param(I, 0), t=Param(F, 1.0), paths=Param(I, 100_000),
)
def _sq_walk(cfg, seed, threads):
    """Wick-rotated graph walk: empirical law of the endpoint vs the matrix exponential."""
    from .sqprocess import CylinderEvent, empirical_vs_exact, wick_rotate

    spec = wick_rotate(_graph_spec(cfg))
    cmp = empirical_vs_exact(spec, CylinderEvent(), cfg["x0"], cfg["t"], cfg["paths"], seed, threads)
    rows = [(j, float(e), float(x), float(s)) for j, (e, x, s) in
            enumerate(zip(cmp.empirical, cmp.exact, cmp.stderr))]
    zmax = float(np.abs(cmp.z_scores).max())
    return Result(["state", "empirical", "exact", "stderr"], rows,
                  {"tv_distance": cmp.tv_distance, "max_abs_z": zmax},
                  {"tv_lt_0.01": cmp.tv_distance < 0.01, "z_lt_4": zmax < 4})


@experiment(
    "sq-consistency",
    graph=Param(_optional_str, None), kneser=Param(IL, [5, 2]), t=Param(F, 1.0),
)
def _sq_consistency(cfg, seed, threads):
    """Operator identities of the cylinder-event product in both clock modes."""
    from .sqprocess import consistency_checks, wick_rotate

    spec = _graph_spec(cfg)
    rows = []
    for s in (spec, wick_rotate(spec)):
        for name, val in consistency_checks(s, cfg["t"]).items():
            rows.append((s.mode, name, val))
    worst = max(r[2] for r in rows)
    return Result(["mode", "check", "max_abs_diff"], rows, {"max_abs_diff": worst},
                  {"all_lt_1e-12": worst < 1e-12})


@experiment(
    "telegraph", stochastic=True,
    a=Param(F, 1.0, "switching intensity"), v=Param(F, 1.0, "wave speed"), t=Param(F, 1.0),
    paths=Param(I, 100_000), x_min=Param(F, -8.0), x_max=Param(F, 8.0), points=Param(I, 1024),
    checkpoints=Param(FL, [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]),
)
def _telegraph(cfg, seed, threads):
    """Poisson-switching Monte Carlo vs finite differences for the damped wave equation."""
    from .stats import mean_stderr
    from .telegraph import KacParams, sample_taus, telegraph_table
    from .timeslice import Grid1D

    p = KacParams(cfg["a"], cfg["v"], cfg["t"])
    g = Grid1D(cfg["x_min"], cfg["x_max"], cfg["points"])
    rows = telegraph_table(p, cfg["paths"], seed, cfg["checkpoints"], grid=g, threads=threads)
    tau, _, _ = sample_taus(p, cfg["paths"], seed, threads=threads)
    m, se = mean_stderr(tau)
    target = (1 - math.exp(-2 * p.a * p.t)) / (2 * p.a) if p.a > 0 else p.t
    agree = all(r[4] < max(3 * r[2], 2e-3) for r in rows)
    return Result(["x", "mc_mean", "mc_stderr", "fd_value", "abs_diff"], rows,
                  {"tau_mean": m, "tau_stderr": se, "tau_mean_exact": target,
                   "max_abs_tau": float(np.abs(tau).max())},
                  {"mc_fd_agree": agree, "tau_mean_within_3se": abs(m - target) <= 3 * se,
                   "tau_bounded": bool(np.all(np.abs(tau) <= p.t))})


@experiment("amoeba", t=Param(F, 1.0), cutoff=Param(I, 60))
def _amoeba(cfg, seed, threads):
    """Coefficient evolution of the cell-division generator vs the Poisson law."""
    from .fock import TruncatedFock, amoeba_evolution, poisson_pmf

    res = amoeba_evolution(cfg["t"], TruncatedFock(1, cfg["cutoff"]))
    exact = poisson_pmf(cfg["t"], cfg["cutoff"])
    psi = np.real(res.values)
    rows = [(k, float(a), float(b), float(abs(a - b))) for k, (a, b) in enumerate(zip(psi, exact))]
    err = max(r[3] for r in rows)
    return Result(["k", "psi_k", "poisson_exact", "abs_err"], rows,
                  {"max_abs_err": err, "total": res.total},
                  {"max_abs_err_lt_1e-10": err < 1e-10, "total_within_1e-10": abs(res.total - 1) < 1e-10})


@experiment(
    "predator-prey",
    birth=Param(F, 0.3), predation=Param(F, 0.3), death=Param(F, 0.3),
    cutoff=Param(I, 8), t=Param(F, 0.5), prey=Param(I, 1), predators=Param(I, 1),
)
def _predator_prey(cfg, seed, threads):
    """Two-mode generator evolution: marginals, conservation and truncation mass."""
    from .fock import RateTriple, predator_prey_run

    res = predator_prey_run(RateTriple(cfg["birth"], cfg["predation"], cfg["death"]), cfg["cutoff"],
                            cfg["t"], (cfg["prey"], cfg["predators"]))
    prey, pred = res.marginal(0), res.marginal(1)
    rows = [(k, float(a), float(b)) for k, (a, b) in enumerate(zip(prey, pred))]
    return Result(["k", "prey_marginal", "predator_marginal"], rows,
                  {"total": res.total, "boundary_mass": res.boundary_mass, "leaked_mass": 1.0 - res.total},
                  {"total_within_1e-6": abs(res.total - 1) <= 1e-6, "boundary_lt_1e-8": res.boundary_mass < 1e-8})


@experiment(
    "wick-moments", stochastic=True,
    samples=Param(I, 100_000), n_max=Param(I, 4), period=Param(F, 32.0), points=Param(I, 1024),
)
def _wick_moments(cfg, seed, threads):
    """Second moments of Wick monomials of a sharp-time Gaussian field."""
    from .wick import SpectralGrid, wick_moments

    rows, c = wick_moments(SpectralGrid(cfg["period"], cfg["points"]), cfg["samples"], seed,
                           cfg["n_max"], threads=threads)
    diag = [(n, emp, ex, z) for m, n, emp, ex, _, z in rows if m == n]
    cross = {f"{m},{n}": {"empirical": emp, "stderr": se, "z_score": z}
             for m, n, emp, _, se, z in rows if m != n}
    zmax = max(abs(r[5]) for r in rows)
    return Result(["n", "empirical_second_moment", "n_factorial_c2n", "z_score"], diag,
                  {"c_f": c, "max_abs_z": zmax, "cross_moments": cross}, {"all_z_lt_4": zmax < 4})


@experiment(
    "delta-scan",
    widths=Param(FL, [0.4, 0.2, 0.1, 0.05]), period=Param(F, 32.0), points=Param(I, 8192),
    center=Param(F, 0.0),
)
def _delta_scan(cfg, seed, threads):
    """Variance of box-averaged sharp-time fields as the box shrinks."""
    from .wick import SpectralGrid, delta_divergence_scan

    rows, slope = delta_divergence_scan(cfg["widths"], SpectralGrid(cfg["period"], cfg["points"]), cfg["center"])
    return Result(["width", "variance", "fitted_slope"], [(w, v, slope) for w, v in rows],
                  {"fitted_slope": slope}, {"slope_in_[-0.7,-0.3]": -0.7 <= slope <= -0.3})


@experiment(
    "ou-covariance", stochastic=True,
    samples=Param(I, 20_000), times=Param(FL, [0.0, 0.25, 0.5, 1.0]),
    period=Param(F, 32.0), points=Param(I, 1024),
)
def _ou_covariance(cfg, seed, threads):
    """Empirical time covariance of field trajectories vs the spectral formula."""
    from .wick import SpectralGrid, default_test_function, ou_covariance, ou_sample_trajectories

    g = SpectralGrid(cfg["period"], cfg["points"])
    f = default_test_function(g)
    times = cfg["times"]
    n = cfg["samples"]
    if n < 100:
        raise ConfigError("samples must be at least 100")
    chunk = 2048
    cols = [[] for _ in times]
    for s in range(0, n, chunk):
        traj = ou_sample_trajectories(g, times, min(chunk, n - s), seed, s)
        for j, x in enumerate(traj):
            cols[j].append(g.pair(f, x))
    vals = [np.concatenate(c) for c in cols]
    rows = []
    for j, t in enumerate(times):
        prod = vals[0] * vals[j]
        emp = float(prod.mean())
        exact = ou_covariance(f, f, times[0], t, g)
        se = float(prod.std(ddof=1) / math.sqrt(n))
        rows.append((times[0], t, emp, exact, se, (emp - exact) / se))
    zmax = max(abs(r[5]) for r in rows)
    return Result(["s", "t", "empirical", "exact", "stderr", "z_score"], rows,
                  {"max_abs_z": zmax}, {"all_z_lt_4": zmax < 4})


# -- config resolution and output -------------------------------------------------

def read_config_file(path) -> dict:
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (p.strip() for p in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve(exp: Experiment, file_cfg: dict, cli_cfg: dict) -> dict:
    unknown = sorted(set(file_cfg) - set(exp.params) - set(GLOBAL_KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s) for {exp.name}: {', '.join(unknown)}")
    cfg = {}
    for name, p in exp.params.items():
        raw = cli_cfg.get(name)
        if raw is None:
            raw = file_cfg.get(name)
        try:
            cfg[name] = p.default if raw is None else p.parse(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return cfg


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def render(result: Result, fmt_name: str, name: str) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(result.columns)
        for row in result.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()
    body = {"experiment": name, "columns": result.columns,
            "rows": [[jsonable(v) for v in r] for r in result.rows],
            "metrics": jsonable(result.metrics)}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message.replace("\n", " "))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="feynlab", description="Reproducible numerical experiments.")
    parser.add_argument("--version", action="version", version=f"feynlab {__version__}")
    sub = parser.add_subparsers(dest="experiment", metavar="experiment")
    for exp in EXPERIMENTS.values():
        sp = sub.add_parser(exp.name, help=exp.help, description=exp.help)
        sp.add_argument("--config", help="flat key=value parameter file")
        sp.add_argument("--seed", help="unsigned 64-bit experiment seed")
        sp.add_argument("--out", help="output path (default <experiment>.<format>)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--strict", action="store_true", default=None,
                        help="exit 3 when an acceptance tolerance is violated")
        sp.add_argument("--threads", help="worker cap for Monte-Carlo runs")
        for name, p in exp.params.items():
            sp.add_argument(f"--{name.replace('_', '-')}", dest=f"p_{name}", default=None,
                            help=f"{p.help} (default {fmt(p.default) if not isinstance(p.default, list) else ','.join(map(fmt, p.default))})".strip())
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    print(f"feynlab: {kind}: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not args.experiment:
            raise ConfigError("missing experiment name")
        exp = EXPERIMENTS[args.experiment]
        file_cfg = read_config_file(args.config) if args.config else {}
        cli_cfg = {k[2:]: v for k, v in vars(args).items() if k.startswith("p_") and v is not None}
        cfg = resolve(exp, file_cfg, cli_cfg)
        seed_raw = args.seed if args.seed is not None else file_cfg.get("seed")
        seed = parse_seed(seed_raw) if seed_raw is not None else None
        if exp.stochastic and seed is None:
            raise ConfigError(f"{exp.name} is stochastic and needs --seed")
        fmt_name = args.format or file_cfg.get("format", "csv")
        if fmt_name not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt_name!r}")
        strict = bool(args.strict) or parse_bool(file_cfg.get("strict", False))
        try:
            threads = int(args.threads if args.threads is not None else file_cfg.get("threads", 1))
        except ValueError:
            raise ConfigError("threads must be an integer") from None
        if threads < 1:
            raise ConfigError("threads must be >= 1")
        out = args.out or file_cfg.get("out") or f"{exp.name}.{fmt_name}"
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config-error", exc)

    try:
        with np.errstate(over="raise", invalid="raise", divide="ignore", under="ignore"):
            result = exp.run(cfg, seed, threads)
    except (ConfigError, BudgetError, PreconditionError, TruncationError) as exc:
        return _fail(EXIT_CONFIG, "config-error", exc)
    except (NumericError, FloatingPointError, FeynlabError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, "numeric-failure", exc)

    body = render(result, fmt_name, exp.name)
    passed = all(result.checks.values())
    manifest = {
        "experiment": exp.name,
        "version": __version__,
        "backend": BACKEND,
        "config": jsonable(cfg),
        "seed": seed,
        "format": fmt_name,
        "strict": strict,
        "threads": threads,
        "output": out,
        "metrics": jsonable(result.metrics),
        "checks": jsonable(result.checks),
        "passed": passed,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
        with open(f"{out}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        return _fail(EXIT_CONFIG, "config-error", f"cannot write {out}: {exc.strerror}")
    if strict and not passed:
        failed = [k for k, v in result.checks.items() if not v]
        return _fail(EXIT_TOLERANCE, "tolerance-violation", f"{exp.name}: {', '.join(failed)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
