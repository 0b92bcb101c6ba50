"""Coherence and excitation probability, from reduced coefficients or full matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from . import product_basis
from .errors import ContractError, DomainError, InvariantError, ScenarioError, UnsupportedScenario
from .reduced_model import ReducedState, Scenario

CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class ObservableSample:
    time: float
    coherence: float
    excitation_probability: float
    trace_error: float


def over_mersenne(x: float, N: int) -> float:
    """x / (2^N - 1) without converting 2^N to a float."""
    return math.ldexp(x, -N) / (1.0 - math.ldexp(1.0, -N))


def _clamp_unit(x: float, what: str) -> float:
    if x < -CLAMP_TOL or x > 1 + CLAMP_TOL or math.isnan(x):
        raise InvariantError(f"{what} = {x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def coherence_of(state: ReducedState) -> float:
    """Normalised l1 coherence computed directly from reduced coefficients.

    The incoherent family uses

        [sum_n C(N-1, n-1) (|a_n| + |b_{n-1}| + (2/n) sqrt(f_n) |c_n|) - 1] / (2^N - 1)

    and the coherent family ``[sum_n C(N, n) d_n - 1] / (2^N - 1)``.  Each
    binomial is divided by 2^N - 1 as an exact rational first, so large N does
    not overflow.
    """
    N = state.n_qubits
    denom = 2 ** N - 1
    if state.scenario is Scenario.COHERENT:
        total = sum(comb(N, n) / denom * d for n, d in enumerate(state.coeffs))
    elif state.scenario is Scenario.INCOHERENT:
        a, b, c = state.a, state.b, state.c
        total = 0.0
        for n in range(1, N + 1):
            block = abs(a[n - 1]) + abs(b[n - 1])
            if n < N:
                block += (2.0 / n) * math.sqrt(n * (N - n)) * abs(c[n - 1])
            total += comb(N - 1, n - 1) / denom * block
    else:
        raise UnsupportedScenario("closed-form coherence is defined for the incoherent and "
                                  "coherent families; reconstruct the density matrix instead")
    return _clamp_unit(total - over_mersenne(1.0, N), "coherence")


def excitation_probability(state: ReducedState) -> float:
    """Probability that one qubit is excited.

    Incoherent: any qubit other than the initially excited one.  Coherent:
    any qubit.  Dicke: the site average (<J_z> + N/2) / N.
    """
    N = state.n_qubits
    if state.scenario is Scenario.INCOHERENT:
        if N < 2:
            raise ScenarioError("needs N >= 2")
        n = np.arange(1, N + 1)
        p = (np.sum(n * (state.a + state.b)) - 1.0) / (N - 1)
    elif state.scenario is Scenario.COHERENT:
        p = np.dot(np.arange(N + 1), state.coeffs) / N
    else:
        m = np.arange(state.coeffs.size) - state.j
        p = (np.dot(m, state.coeffs) + N / 2) / N
    return _clamp_unit(float(p), "excitation probability")


def l1_coherence_full(rho: np.ndarray, herm_tol: float = 1e-9) -> float:
    """(1/(d-1)) sum_{i != j} |rho_ij| in the computational basis."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ContractError("rho must be a square matrix")
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ContractError("rho is not Hermitian")
    d = rho.shape[0]
    if d < 2:
        raise ContractError("coherence needs dimension >= 2")
    mag = np.abs(rho)
    return float((mag.sum() - np.trace(mag)) / (d - 1))


def site_excitation_probabilities(rho: np.ndarray, N: int) -> np.ndarray:
    """tr(rho |e><e|_l) for every qubit l = 1..N."""
    diag = np.real(np.diag(rho))
    return product_basis.occupation_table(N).T @ diag


def incoherent_basis(N: int, k: int = 1) -> list[np.ndarray]:
    """Operators Λ_1..Λ_N, Ω_0..Ω_{N-1}, χ_1..χ_{N-1} in coefficient-vector order."""
    if N < 2:
        raise ScenarioError("the incoherent family needs N >= 2")
    if not 1 <= k <= N:
        raise DomainError(f"site index k={k} outside 1..{N}")
    ek = [product_basis.site_excited_ket(N, n, k) for n in range(1, N + 1)]
    eg = [product_basis.site_ground_ket(N, n, k) for n in range(0, N)]
    ops = [np.outer(v, v) for v in ek]
    ops += [np.outer(v, v) for v in eg]
    for n in range(1, N):
        x = np.outer(ek[n - 1], eg[n])
        ops.append(x + x.T)
    return ops


def coherent_basis(N: int) -> list[np.ndarray]:
    kets = [product_basis.uniform_ket(N, n) for n in range(N + 1)]
    return [np.outer(v, v) for v in kets]


def reconstruct_density(state: ReducedState, k: int = 1) -> np.ndarray:
    """Full 2^N density matrix of a reduced state.

    ``k`` is the (1-based) site of the initial excitation for the incoherent
    family.  Dicke states outside j = N/2 need the oracle's sector states; see
    :func:`collective_coherence.fullspace_oracle.dicke_state`.
    """
    N = state.n_qubits
    if state.scenario is Scenario.INCOHERENT:
        basis = incoherent_basis(N, k)
    elif state.scenario is Scenario.COHERENT:
        basis = coherent_basis(N)
    elif 2 * state.j == N:
        basis = coherent_basis(N)
    else:
        from .fullspace_oracle import dicke_state

        kets = [dicke_state(N, state.j, m - state.j, k) for m in range(state.coeffs.size)]
        basis = [np.outer(v, v) for v in kets]
    rho = np.zeros((2 ** N, 2 ** N))
    for coeff, B in zip(state.coeffs, basis):
        if coeff:
            rho += coeff * B
    return rho


def observe(state: ReducedState, time: float = 0.0) -> ObservableSample:
    return ObservableSample(
        time=float(time),
        coherence=coherence_of(state),
        excitation_probability=excitation_probability(state),
        trace_error=abs(state.trace() - 1.0),
    )
