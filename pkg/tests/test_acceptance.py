"""Acceptance suite.  Each test carries a ``criterion`` marker and gets one
PASS/FAIL line in the terminal summary."""
import time

import numpy as np
import pytest

from collective_coherence import (
    BathParams,
    appendix_zero_modes,
    build_coherent_generator,
    build_incoherent_generator,
    coherence_of,
    coherent_steady_coherence,
    coherent_steady_probability,
    evolve_grid,
    excitation_probability,
    find_tau_c,
    incoherent_steady_coherence,
    incoherent_steady_probability,
    initial_vector,
    verify_zero_modes,
)
from collective_coherence.cli import bench_rows
from collective_coherence.verification import (
    check_formula_reconstruction,
    check_generator_action,
    check_oracle_equivalence,
    check_singlet_steady_state,
    check_steady_states,
)

criterion = pytest.mark.criterion


def _failures(results):
    return [r.line() for r in results if not r.passed]


@criterion("1 oracle equivalence, N=2..6 x tau in {0, 0.5, 2}, 30 points, <= 1e-6, < 2 min")
def test_oracle_equivalence():
    t0 = time.perf_counter()
    bad = []
    for N in range(2, 7):
        for tau in (0.0, 0.5, 2.0):
            bad += _failures(check_oracle_equivalence(N, tau))
    elapsed = time.perf_counter() - t0
    assert not bad, bad
    assert elapsed <= 120.0, f"took {elapsed:.1f} s"


@criterion("2 generator action, incoherent N<=6 and coherent/Dicke N<=10, <= 1e-10")
def test_generator_action():
    bad = []
    for tau in (0.0, 0.5, 2.0):
        for N in range(1, 11):
            scenarios = None if N <= 6 else ("coherent", "dicke")
            for r in check_generator_action(N, tau, scenarios=scenarios):
                if not r.passed:
                    bad.append(f"N={N} tau={tau} {r.line()}")
    assert not bad, bad


@criterion("3 steady states at t=60 <= 1e-8 (N=2..8, tau in {0.1, 2}); singlet case C=1/6, p=1/4")
def test_steady_states():
    bad = []
    for N in range(2, 9):
        for tau in (0.1, 2.0):
            bad += _failures(check_steady_states(N, tau))
    singlet = check_singlet_steady_state()
    if not singlet.passed:
        bad.append(singlet.line())
    C = incoherent_steady_coherence(2, 0.0)
    p = incoherent_steady_probability(2, 0.0)
    assert abs(C - 1 / 6) <= 1e-10 and abs(p - 0.25) <= 1e-10, (C, p)
    assert not bad, bad


N_LIMITS = range(2, 11)
NU_COLD, NU_HOT = 1e-8, 1.0 - 1e-8


@criterion("4a incoherent p(inf) -> 1/N^2 (<= 1e-6) and -> 1/2 (<= 1e-4)")
def test_incoherent_probability_limits():
    for N in N_LIMITS:
        assert abs(incoherent_steady_probability(N, NU_COLD) - 1 / N ** 2) <= 1e-6, N
        assert abs(incoherent_steady_probability(N, NU_HOT) - 0.5) <= 1e-4, N


@criterion("4b incoherent C(inf) -> (N-1)(3N-4)/N^2/(2^N-1) as nu -> 0")
def test_incoherent_coherence_cold_limit():
    for N in N_LIMITS:
        target = (N - 1) * (3 * N - 4) / N ** 2 / (2 ** N - 1)
        assert abs(incoherent_steady_coherence(N, NU_COLD) - target) <= 1e-6, N


@criterion("4c incoherent C(inf) -> 2^N/((2^N-1)(N+1)) as nu -> 1")
def test_incoherent_coherence_hot_limit():
    errors = {}
    for N in N_LIMITS:
        target = 2 ** N / ((2 ** N - 1) * (N + 1))
        errors[N] = abs(incoherent_steady_coherence(N, NU_HOT) - target)
    bad = {N: e for N, e in errors.items() if e > 1e-4}
    assert not bad, f"deviation per N: {bad}"


@criterion("4d coherent p(inf) -> 0 and -> 1/2")
def test_coherent_probability_limits():
    for N in range(1, 11):
        assert abs(coherent_steady_probability(N, NU_COLD)) <= 1e-6, N
        assert abs(coherent_steady_probability(N, NU_HOT) - 0.5) <= 1e-4, N


@criterion("5 tau_c absent for N<=4, tau_c(5) = 3.05 +- 0.05, strictly decreasing N=5..20")
def test_tau_c():
    for N in range(1, 5):
        assert find_tau_c(N) is None, N
    values = [find_tau_c(N) for N in range(5, 21)]
    assert abs(values[0] - 3.05) <= 0.05, values[0]
    assert all(np.diff(values) < 0), values


def _incoherent_series(N, tau, times):
    traj = evolve_grid(build_incoherent_generator(N, tau), initial_vector("incoherent", N), times)
    C = np.array([coherence_of(s) for s in traj.states])
    p = np.array([excitation_probability(s) for s in traj.states])
    return C, p


@criterion("6a incoherent C(t), p(t) nondecreasing, N=7, tau in {0, 2}, dt = 0.01")
def test_shape_incoherent_time():
    times = np.arange(0.0, 3.0 + 1e-12, 0.01)
    for tau in (0.0, 2.0):
        C, p = _incoherent_series(7, tau, times)
        assert np.diff(C).min() >= -1e-12, tau
        assert np.diff(p).min() >= -1e-12, tau


@criterion("6b snapshot t=1.8 C and p nondecreasing in tau over [0, 4]")
def test_shape_snapshot_vs_tau():
    C, p = [], []
    for tau in np.arange(0.0, 4.0 + 1e-12, 0.05):
        c_, p_ = _incoherent_series(7, tau, [1.8])
        C.append(c_[0])
        p.append(p_[0])
    assert np.diff(C).min() >= -1e-12
    assert np.diff(p).min() >= -1e-12


@criterion("6c steady C decreasing in N (N=4..20) for tau in {0.1, 1, 4}, ordered by tau")
def test_shape_steady_vs_size():
    curves = []
    for tau in (0.1, 1.0, 4.0):
        nu = tau / (1 + tau)
        curve = np.array([incoherent_steady_coherence(N, nu) for N in range(4, 21)])
        assert np.all(np.diff(curve) < 0), tau
        curves.append(curve)
    assert np.all(curves[0] < curves[1]) and np.all(curves[1] < curves[2])


@criterion("6d coherent steady C < 6/127 at tau=0 and ~0.0897 > 6/127 at tau=2")
def test_shape_coherent_steady():
    c0 = 6 / 127
    assert coherent_steady_coherence(7, 0.0) < c0
    hot = coherent_steady_coherence(7, 2 / 3)
    assert hot > c0
    assert abs(hot - 0.0897) <= 5e-4, hot
    traj = evolve_grid(build_coherent_generator(7, 2.0), initial_vector("coherent", 7),
                       np.linspace(0.0, 10.0, 101))
    assert abs(coherence_of(traj.states[-1]) - hot) <= 1e-6


@criterion("6e incoherent and coherent steady C converge, gap < 0.02 by tau = 10")
def test_shape_scenario_gap():
    nu = 10 / 11
    assert abs(incoherent_steady_coherence(7, nu) - coherent_steady_coherence(7, nu)) < 0.02


@criterion("7 invariants on 200 random states per scenario, N<=6")
def test_invariants():
    rng = np.random.default_rng(1234)
    bad = []
    for N in range(1, 7):
        bad += [f"N={N} {line}" for line in _failures(check_formula_reconstruction(N, rng, 200))]
    assert not bad, bad


@criterion("8 explicit zero modes, residual and biorthonormality <= 1e-10, N=2..8")
def test_zero_modes():
    worst = 0.0
    for N in range(2, 9):
        for nu in (0.2, 0.5, 0.8):
            for sc in ("incoherent", "coherent"):
                res = verify_zero_modes(appendix_zero_modes(sc, N, nu))
                worst = max(worst, max(res.values()))
    assert worst <= 1e-10


@criterion("9a coherent N=200 build + 1000-point trajectory < 1 s")
def test_performance_coherent():
    times = np.linspace(0.0, 3.0, 1000)
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        G = build_coherent_generator(200, BathParams.from_tau(1.0))
        traj = evolve_grid(G, initial_vector("coherent", 200), times)
        _ = [coherence_of(s) for s in traj.states]
        best = min(best, time.perf_counter() - t0)
    assert best < 1.0, f"{best:.3f} s"


@criterion("9b benchmark rows: reduced dims polynomial, full dims 4^N")
def test_benchmark_scaling():
    rows = bench_rows(reduced_n=(2, 8, 32, 128), full_n=range(2, 8), points=200)
    reduced = {(r[0], r[1]): r[2] for r in rows if r[0].startswith("reduced")}
    full = {r[1]: r for r in rows if r[0] == "full_rk4_step"}
    for N in (2, 8, 32, 128):
        assert reduced[("reduced_coherent", N)] == N + 1
        assert reduced[("reduced_incoherent", N)] == 3 * N - 1
    for N, r in full.items():
        assert r[2] == 4 ** N
    assert full[7][4] > full[2][4]
