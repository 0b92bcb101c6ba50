"""Cross-checks of the reduced pipeline against the full-space oracle.

Each check returns a :class:`CheckResult` with the worst residual it saw and
the tolerance it was held to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fullspace_oracle as oracle
from .observables import (
    coherence_of,
    coherent_basis,
    excitation_probability,
    incoherent_basis,
    l1_coherence_full,
    reconstruct_density,
    site_excitation_probabilities,
)
from .propagator import evolve, evolve_grid
from .reduced_model import (
    BathParams,
    ReducedGenerator,
    ReducedState,
    Scenario,
    build_coherent_generator,
    build_dicke_generator,
    build_incoherent_generator,
    incoherent_dim,
    incoherent_index,
    initial_vector,
)
from .steady_analytics import (
    appendix_zero_modes,
    coherent_steady_state,
    incoherent_steady_state,
    verify_zero_modes,
)
from .errors import VerificationError


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{status}] {self.name}: max residual {self.residual:.3e} (tol {self.tol:.0e}){extra}"


def generator_action_residual(G: ReducedGenerator, basis, ops) -> float:
    """Max deviation between generator columns and the oracle's L[basis_i] expansion."""
    worst = 0.0
    for i, B in enumerate(basis):
        coeffs, leak = oracle.expand_in_basis(oracle.lindblad_rhs(ops, G.bath, B), basis)
        worst = max(worst, leak, float(np.abs(coeffs - G.matrix[:, i]).max()))
    return worst


def dicke_basis(N: int, j, k: int = 1, ops=None):
    two_j = int(round(2 * j))
    kets = [oracle.dicke_state(N, j, (2 * i - two_j) / 2, k, ops) for i in range(two_j + 1)]
    return [np.outer(v, v) for v in kets]


def random_physical_state(scenario, N: int, rng: np.random.Generator) -> ReducedState:
    """A random density matrix inside the scenario's invariant subspace.

    A random convex mixture of subspace-internal states is propagated for a
    random time under a random bath, so the result is always physical.
    """
    scenario = Scenario(scenario)
    if scenario is Scenario.COHERENT:
        v = rng.dirichlet(np.ones(N + 1))
    else:
        # per excitation number n, a random 2x2 PSD block on {|nE_k>, |nE_¬k>}
        v = np.zeros(incoherent_dim(N))
        weights = rng.dirichlet(np.ones(N + 1))
        for n in range(N + 1):
            if n == 0:
                v[incoherent_index("b", 0, N)] += weights[n]
                continue
            if n == N:
                v[incoherent_index("a", N, N)] += weights[n]
                continue
            x = rng.normal(size=(2, 2))
            block = x @ x.T
            block *= weights[n] / np.trace(block)
            v[incoherent_index("a", n, N)] += block[0, 0]
            v[incoherent_index("b", n, N)] += block[1, 1]
            v[incoherent_index("c", n, N)] += block[0, 1]
    state = ReducedState(scenario, v, N)
    tau = float(rng.uniform(0.0, 3.0))
    t = float(rng.exponential(0.3))
    G = build_incoherent_generator(N, tau) if scenario is Scenario.INCOHERENT else build_coherent_generator(N, tau)
    return evolve(G, state, t)


def check_generator_action(N: int, tau: float, generators=None, scenarios=None) -> list[CheckResult]:
    generators = generators or {}
    scenarios = set(Scenario) if scenarios is None else {Scenario(s) for s in scenarios}
    bath = BathParams.from_tau(tau)
    ops = oracle.build_collective_operators(N)
    out = []
    if N >= 2 and Scenario.INCOHERENT in scenarios:
        G = generators.get(Scenario.INCOHERENT) or build_incoherent_generator(N, bath)
        out.append(CheckResult("generator_action_incoherent",
                               generator_action_residual(G, incoherent_basis(N), ops), 1e-10))
    if Scenario.COHERENT in scenarios:
        G = generators.get(Scenario.COHERENT) or build_coherent_generator(N, bath)
        out.append(CheckResult("generator_action_coherent",
                               generator_action_residual(G, coherent_basis(N), ops), 1e-10))
    if Scenario.DICKE not in scenarios:
        return out
    sectors = [N / 2] + ([N / 2 - 1] if N >= 3 else [])
    worst = 0.0
    for j in sectors:
        G = build_dicke_generator(j, bath, n_qubits=N)
        worst = max(worst, generator_action_residual(G, dicke_basis(N, j, ops=ops), ops))
    out.append(CheckResult("generator_action_dicke", worst, 1e-10,
                           "j = " + ", ".join(f"{j:g}" for j in sectors)))
    return out


def check_oracle_equivalence(N: int, tau: float, generators=None, times=None,
                             tol: float = 1e-6) -> list[CheckResult]:
    """Reduced trajectories against RK4 integration of the full density matrix."""
    generators = generators or {}
    times = np.linspace(0.0, 3.0, 30) if times is None else np.asarray(times, dtype=float)
    bath = BathParams.from_tau(tau)
    ops = oracle.build_collective_operators(N)
    scenarios = [Scenario.INCOHERENT, Scenario.COHERENT] if N >= 2 else [Scenario.COHERENT]
    reduced, rho0 = {}, []
    for sc in scenarios:
        G = generators.get(sc) or (build_incoherent_generator(N, bath) if sc is Scenario.INCOHERENT
                                   else build_coherent_generator(N, bath))
        v0 = initial_vector(sc, N)
        reduced[sc] = evolve_grid(G, v0, times)
        rho0.append(reconstruct_density(v0))
    full = oracle.evolve_full_grid(ops, bath, np.stack(rho0), times)

    out = []
    for s_idx, sc in enumerate(scenarios):
        d_rho = d_c = d_p = 0.0
        trace_err = 0.0
        for t_idx, state in enumerate(reduced[sc].states):
            rho_full = full[t_idx, s_idx]
            rho_red = reconstruct_density(state)
            d_rho = max(d_rho, float(np.abs(rho_red - rho_full).max()))
            d_c = max(d_c, abs(coherence_of(state) - l1_coherence_full(rho_full)))
            probs = site_excitation_probabilities(rho_full, N)
            probs = probs[1:] if sc is Scenario.INCOHERENT else probs
            d_p = max(d_p, float(np.abs(probs - excitation_probability(state)).max()))
            trace_err = max(trace_err, abs(float(np.trace(rho_full)) - 1.0))
        out.append(CheckResult(f"oracle_density_{sc.value}", d_rho, tol))
        out.append(CheckResult(f"oracle_coherence_{sc.value}", d_c, tol))
        out.append(CheckResult(f"oracle_probability_{sc.value}", d_p, tol))
        out.append(CheckResult(f"oracle_trace_{sc.value}", trace_err, 1e-9))
    return out


def check_steady_states(N: int, tau: float, t_long: float = 60.0, generators=None) -> list[CheckResult]:
    generators = generators or {}
    bath = BathParams.from_tau(tau)
    out = []
    if N >= 2:
        G = generators.get(Scenario.INCOHERENT) or build_incoherent_generator(N, bath)
        v = evolve(G, initial_vector(Scenario.INCOHERENT, N), t_long)
        ref = incoherent_steady_state(N, bath.nu)
        out.append(CheckResult("steady_incoherent", float(np.abs(v.coeffs - ref.coeffs).max()), 1e-8))
    G = generators.get(Scenario.COHERENT) or build_coherent_generator(N, bath)
    v = evolve(G, initial_vector(Scenario.COHERENT, N), t_long)
    ref = coherent_steady_state(N, bath.nu)
    out.append(CheckResult("steady_coherent", float(np.abs(v.coeffs - ref.coeffs).max()), 1e-8))
    return out


def check_singlet_steady_state(t_long: float = 60.0) -> CheckResult:
    """N=2, tau=0: |eg><eg| relaxes to (|gg><gg| + singlet) / 2 in the full space."""
    ops = oracle.build_collective_operators(2)
    rho0 = np.zeros((4, 4))
    rho0[2, 2] = 1.0  # |eg>
    rho = oracle.evolve_full(ops, 0.0, rho0, t_long)
    singlet = oracle.dicke_state(2, 0, 0)
    target = 0.5 * np.outer(singlet, singlet)
    target[0, 0] += 0.5
    return CheckResult("singlet_steady_state", float(np.abs(rho - target).max()), 1e-6,
                       f"C = {l1_coherence_full(rho):.12f}")


def check_formula_reconstruction(N: int, rng, count: int = 200) -> list[CheckResult]:
    out = []
    scenarios = [Scenario.INCOHERENT, Scenario.COHERENT] if N >= 2 else [Scenario.COHERENT]
    for sc in scenarios:
        worst_c = worst_p = worst_tr = worst_psd = 0.0
        for _ in range(count):
            state = random_physical_state(sc, N, rng)
            rho = reconstruct_density(state)
            worst_c = max(worst_c, abs(coherence_of(state) - l1_coherence_full(rho)))
            probs = site_excitation_probabilities(rho, N)
            probs = probs[1:] if sc is Scenario.INCOHERENT else probs
            worst_p = max(worst_p, float(np.abs(probs - excitation_probability(state)).max()))
            worst_tr = max(worst_tr, abs(np.trace(rho) - 1.0))
            worst_psd = max(worst_psd, -float(np.linalg.eigvalsh(rho).min()))
        out.append(CheckResult(f"formula_vs_reconstruction_{sc.value}", max(worst_c, worst_p), 1e-10))
        out.append(CheckResult(f"random_state_trace_{sc.value}", worst_tr, 1e-10))
        out.append(CheckResult(f"random_state_psd_{sc.value}", max(worst_psd, 0.0), 1e-8))
    return out


def check_zero_modes(N: int, nu: float) -> list[CheckResult]:
    out = []
    scenarios = [Scenario.INCOHERENT, Scenario.COHERENT] if N >= 2 else [Scenario.COHERENT]
    for sc in scenarios:
        try:
            res = verify_zero_modes(appendix_zero_modes(sc, N, nu))
        except VerificationError as exc:
            res = exc.residuals
        out.append(CheckResult(f"zero_modes_{sc.value}", max(res.values()), 1e-10))
    return out


def corrupt_generator(G: ReducedGenerator, rel: float = 1e-3) -> ReducedGenerator:
    """Test hook: perturb the first diagonal entry of ``G``."""
    m = np.array(G.matrix)
    m[0, 0] *= 1.0 + rel
    if m[0, 0] == 0.0:
        m[0, 0] = -rel
    return G.with_matrix(m)


def run_checks(N: int, tau: float, seed: int = 0, inject_fault: bool = False,
               n_random: int = 200) -> list[CheckResult]:
    """Full verification suite at one (N, tau)."""
    bath = BathParams.from_tau(tau)
    generators = {}
    if inject_fault:
        if N >= 2:
            generators[Scenario.INCOHERENT] = corrupt_generator(build_incoherent_generator(N, bath))
        generators[Scenario.COHERENT] = corrupt_generator(build_coherent_generator(N, bath))
    rng = np.random.default_rng(seed)
    results = []
    results += check_generator_action(N, tau, generators)
    results += check_oracle_equivalence(N, tau, generators)
    results += check_steady_states(N, tau, generators=generators)
    if N == 2 and tau == 0:
        results.append(check_singlet_steady_state())
    results += check_formula_reconstruction(N, rng, n_random)
    if 0.0 < bath.nu < 1.0:
        results += check_zero_modes(N, bath.nu)
    return results
