"""Command-line entry point: simulations, steady-state sweeps, tau_c scans,
verification and benchmarks.  Every data product is a CSV file, and each one
gets a JSON manifest when written to disk.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure, 3 failed
verification or emission invariant.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import fullspace_oracle as oracle
from .errors import (
    CapacityError,
    ContractError,
    DomainError,
    InvariantError,
    ScenarioError,
    UnsupportedScenario,
)
from .observables import (
    coherence_of,
    excitation_probability,
    l1_coherence_full,
    reconstruct_density,
)
from .propagator import evolve_grid
from .reduced_model import (
    BathParams,
    ReducedState,
    Scenario,
    build_coherent_generator,
    build_generator,
    build_incoherent_generator,
    initial_vector,
)
from .steady_analytics import find_tau_c, steady_summary
from .verification import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3
TRACE_EMIT_TOL = 1e-9


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def parse_int_range(text: str) -> list[int]:
    try:
        a, b = (int(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"--n-range expects A:B with integers, got {text!r}") from None
    if b < a:
        raise ConfigError(f"--n-range {text!r} is empty")
    return list(range(a, b + 1))


def parse_float_grid(text: str) -> list[float]:
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"--tau-grid expects A:B:STEP, got {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigError(f"--tau-grid {text!r} needs STEP > 0 and B >= A")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


# -- output --------------------------------------------------------------------------

def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def emit(args, header, rows, out_path=None, extra=None):
    text = _rows_to_csv(header, rows)
    path = out_path if out_path is not None else args.out
    if path is None:
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    manifest = {
        "command": args.command,
        "config": {k: v for k, v in sorted(vars(args).items()) if k != "func" and not k.startswith("_")},
        "output": str(path),
        "rows": len(rows),
        "columns": list(header),
        "versions": {
            "collective_coherence": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timings": {"elapsed_s": time.perf_counter() - args._t0},
    }
    if extra:
        manifest.update(extra)
    path.with_name(path.name + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def _check_emitted(coherence, prob, trace_error):
    if not (0.0 <= coherence <= 1.0 and 0.0 <= prob <= 1.0):
        raise InvariantError(f"observable outside [0, 1]: C={coherence}, p={prob}")
    if trace_error > TRACE_EMIT_TOL:
        raise InvariantError(f"trace error {trace_error:.3e} exceeds {TRACE_EMIT_TOL:g}")


# -- config helpers ---------------------------------------------------------------

def _bath(args) -> BathParams:
    if args.nu is not None:
        if args.tau is not None:
            raise ConfigError("give either --tau or --nu, not both")
        return BathParams.from_nu(args.nu)
    return BathParams.from_tau(0.0 if args.tau is None else args.tau)


def _n_values(args, default):
    if args.n is not None and args.n_range is not None:
        raise ConfigError("give either --n or --n-range, not both")
    if args.n_range is not None:
        return parse_int_range(args.n_range)
    return [default if args.n is None else args.n]


def _tau_values(args, default):
    if sum(x is not None for x in (args.tau, args.tau_grid, args.nu)) > 1:
        raise ConfigError("give only one of --tau, --tau-grid, --nu")
    if args.tau_grid is not None:
        return [BathParams.from_tau(t) for t in parse_float_grid(args.tau_grid)]
    if args.nu is not None:
        return [BathParams.from_nu(args.nu)]
    if args.tau is not None:
        return [BathParams.from_tau(args.tau)]
    return [BathParams.from_tau(t) for t in default]


def _time_grid(t_max, steps):
    if steps < 1:
        raise ConfigError("--steps must be >= 1")
    if t_max < 0:
        raise ConfigError("--t-max must be >= 0")
    if steps == 1:
        return np.array([0.0]) if t_max == 0 else np.array([t_max])
    return np.linspace(0.0, t_max, steps)


# -- commands --------------------------------------------------------------------

SIM_HEADER = ("scenario", "N", "tau", "t", "coherence", "p_excited", "trace_error")


def _dicke_coherence(state: ReducedState) -> float:
    if 2 * state.j == state.n_qubits:
        return coherence_of(ReducedState(Scenario.COHERENT, state.coeffs, state.n_qubits))
    return l1_coherence_full(reconstruct_density(state))


def simulation_rows(scenario, N, bath, times, j=None, site_k=1):
    scenario = Scenario(scenario)
    if scenario is Scenario.INCOHERENT and not 1 <= site_k <= N:
        raise ConfigError(f"--site-k must lie in 1..{N}")
    G = build_generator(scenario, N, bath, j)
    v0 = initial_vector(scenario, N, j=G.j)
    traj = evolve_grid(G, v0, times)
    rows = []
    for t, state in zip(traj.times, traj.states):
        if scenario is Scenario.DICKE:
            c = _dicke_coherence(state)
        else:
            c = coherence_of(state)
        p = excitation_probability(state)
        tr_err = abs(state.trace() - 1.0)
        _check_emitted(c, p, tr_err)
        rows.append((scenario.value, N, bath.tau, float(t), c, p, tr_err))
    return rows


def cmd_simulate(args):
    if args.n is None:
        raise ConfigError("simulate needs --n")
    scenario = Scenario(args.scenario or "incoherent")
    times = _time_grid(args.t_max if args.t_max is not None else 3.0,
                       args.steps if args.steps is not None else 301)
    rows = simulation_rows(scenario, args.n, _bath(args), times, args.j, args.site_k)
    emit(args, SIM_HEADER, rows)
    return EXIT_OK


STEADY_HEADER = ("scenario", "N", "tau", "coherence_inf", "p_inf", "alpha")


def steady_rows(scenarios, n_values, baths):
    rows = []
    for sc in scenarios:
        for N in n_values:
            for bath in baths:
                s = steady_summary(sc, N, bath.nu)
                _check_emitted(s.coherence_inf, s.probability_inf, 0.0)
                rows.append((sc.value, N, bath.tau, s.coherence_inf, s.probability_inf, s.alpha))
    return rows


def _steady_scenarios(args):
    if args.scenario in (None, "both"):
        return [Scenario.INCOHERENT, Scenario.COHERENT]
    sc = Scenario(args.scenario)
    if sc is Scenario.DICKE:
        raise ConfigError("steady sweeps support --scenario incoherent|coherent|both")
    return [sc]


def cmd_steady(args):
    rows = steady_rows(_steady_scenarios(args), _n_values(args, 7),
                       _tau_values(args, parse_float_grid("0:4:0.05")))
    emit(args, STEADY_HEADER, rows)
    return EXIT_OK


def tau_c_rows(n_values):
    return [(N, find_tau_c(N)) for N in n_values]


def cmd_tau_c(args):
    n_values = _n_values(args, 5) if (args.n is not None or args.n_range is not None) else parse_int_range("5:40")
    emit(args, ("N", "tau_c"), tau_c_rows(n_values))
    return EXIT_OK


def cmd_verify(args):
    N = 4 if args.n is None else args.n
    tau = 0.5 if args.tau is None else args.tau
    results = run_checks(N, tau, seed=args.seed, inject_fault=args.inject_fault)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if args.out is not None:
        emit(args, ("check", "residual", "tol", "passed"),
             [(r.name, r.residual, r.tol, r.passed) for r in results])
    if failed:
        print(f"verification FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"verification passed: {len(results)} checks at N={N}, tau={tau}")
    return EXIT_OK


BENCH_HEADER = ("method", "N", "dim", "build_ms", "evolve_ms", "points")
BENCH_REDUCED_N = (2, 4, 8, 16, 32, 64, 100, 128, 200, 256)


def bench_rows(reduced_n=BENCH_REDUCED_N, full_n=range(2, 11), points=1000, t_max=3.0):
    rows = []
    times = np.linspace(0.0, t_max, points)
    bath = BathParams.from_tau(1.0)
    for method, builder in (("reduced_coherent", build_coherent_generator),
                            ("reduced_incoherent", build_incoherent_generator)):
        for N in reduced_n:
            t0 = time.perf_counter()
            G = builder(N, bath)
            t1 = time.perf_counter()
            evolve_grid(G, initial_vector(G.scenario, N), times)
            t2 = time.perf_counter()
            rows.append((method, N, G.dim, 1e3 * (t1 - t0), 1e3 * (t2 - t1), points))
    for N in full_n:
        t0 = time.perf_counter()
        ops = oracle.build_collective_operators(N)
        _ = ops.JpJm, ops.JmJp
        t1 = time.perf_counter()
        rho0 = np.zeros((ops.dim, ops.dim))
        rho0[2 ** (N - 1), 2 ** (N - 1)] = 1.0
        oracle.evolve_full(ops, bath, rho0, oracle.default_step(N, bath.tau))
        t2 = time.perf_counter()
        rows.append(("full_rk4_step", N, 4 ** N, 1e3 * (t1 - t0), 1e3 * (t2 - t1), 1))
    return rows


def cmd_bench(args):
    limit = oracle.max_full_n()
    full_n = parse_int_range(args.n_range) if args.n_range else list(range(2, min(10, limit) + 1))
    if any(N > limit for N in full_n):
        raise CapacityError(f"full-space benchmark limited to N <= {limit}")
    rows = bench_rows(full_n=full_n,
                      points=args.steps if args.steps is not None else 1000,
                      t_max=args.t_max if args.t_max is not None else 3.0)
    emit(args, BENCH_HEADER, rows)
    return EXIT_OK


def figure_tables(t_snapshot=1.8, N=7):
    """Data behind each reproduced figure, keyed by output file name."""
    times = np.linspace(0.0, 3.0, 301)
    tables = {}
    rows = []
    for tau in (0.0, 2.0):
        rows += simulation_rows(Scenario.INCOHERENT, N, BathParams.from_tau(tau), times)
    tables["fig1_incoherent_vs_time.csv"] = (SIM_HEADER, rows)

    rows = []
    for tau in parse_float_grid("0:4:0.05"):
        rows += simulation_rows(Scenario.INCOHERENT, N, BathParams.from_tau(tau), [t_snapshot])
    tables["fig2_incoherent_vs_tau.csv"] = (SIM_HEADER, rows)

    baths = [BathParams.from_tau(t) for t in (0.1, 1.0, 4.0)]
    tables["fig3_steady_vs_size.csv"] = (STEADY_HEADER, steady_rows([Scenario.INCOHERENT], range(2, 21), baths))

    rows = []
    for tau in (0.0, 0.3, 1.4, 2.0):
        rows += simulation_rows(Scenario.COHERENT, N, BathParams.from_tau(tau), times)
    tables["fig4_coherent_vs_time.csv"] = (SIM_HEADER, rows)

    tables["fig5_tau_c.csv"] = (("N", "tau_c"), tau_c_rows(range(5, 41)))

    baths = [BathParams.from_tau(t) for t in parse_float_grid("0:10:0.05")]
    tables["fig6_steady_vs_tau.csv"] = (STEADY_HEADER,
                                        steady_rows([Scenario.INCOHERENT, Scenario.COHERENT], [N], baths))
    return tables


def cmd_figures(args):
    out_dir = Path(args.out or "figures")
    t_snap = 1.8 if args.t_snapshot is None else args.t_snapshot
    tables = figure_tables(t_snap)
    for name, (header, rows) in tables.items():
        emit(args, header, rows, out_path=out_dir / name)
    print(f"wrote {len(tables)} tables to {out_dir}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", choices=["incoherent", "coherent", "dicke", "both"])
    common.add_argument("--n", type=int, help="number of qubits")
    common.add_argument("--n-range", help="inclusive range A:B of qubit numbers")
    common.add_argument("--j", type=float, help="total angular momentum for --scenario dicke")
    common.add_argument("--tau", type=float, help="bath mean photon number")
    common.add_argument("--tau-grid", help="inclusive grid A:B:STEP of tau values")
    common.add_argument("--nu", type=float, help="Boltzmann ratio tau/(1+tau) instead of --tau")
    common.add_argument("--t-max", type=float)
    common.add_argument("--steps", type=int, help="number of time points")
    common.add_argument("--t-snapshot", type=float, help="snapshot time of the tau sweep figure (default 1.8)")
    common.add_argument("--site-k", type=int, default=1, help="initially excited qubit (incoherent)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output CSV path (directory for 'figures'); stdout if omitted")

    parser = argparse.ArgumentParser(prog="collective-coherence", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("simulate", cmd_simulate, "coherence and excitation probability versus time"),
        ("steady", cmd_steady, "closed-form steady-state sweeps over N and tau"),
        ("tau-c", cmd_tau_c, "critical bath occupation of the coherent scenario"),
        ("verify", cmd_verify, "reduced-versus-full-space verification suite"),
        ("bench", cmd_bench, "reduced versus full-space timing benchmark"),
        ("figures", cmd_figures, "write the data of all reproduced figures"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        if name == "verify":
            p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except (ConfigError, DomainError, ScenarioError, ContractError, CapacityError,
            UnsupportedScenario, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
