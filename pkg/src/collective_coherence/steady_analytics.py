"""Closed-form stationary states, their observables, limits and zero modes.

Geometric weights are written as ``nu^m / sum_{k=0}^{M} nu^k`` instead of
``(1-nu) nu^m / (1-nu^{M+1})``.  The two forms are equal, but the first has
no 0/0 at nu = 1 and no 1/nu at nu = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.optimize

from .errors import DomainError, ScenarioError, VerificationError
from .observables import excitation_probability, over_mersenne
from .reduced_model import (
    ReducedState,
    Scenario,
    build_coherent_generator,
    build_incoherent_generator,
    incoherent_dim,
    incoherent_index,
)


def _check_nu(nu):
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    return nu


def _geom_sum(nu: float, M: int) -> float:
    """sum_{k=0}^{M} nu^k."""
    return float(sum(nu ** k for k in range(M + 1)))


def _geom_weights(nu: float, M: int) -> np.ndarray:
    w = nu ** np.arange(M + 1, dtype=float)
    w[0] = 1.0  # 0**0
    return w / w.sum()


def mixing_weight(N: int, nu: float) -> float:
    """alpha = (1+nu)(1-nu^N) / (N (1-nu^{N+1})), the weight of rho_1."""
    nu = _check_nu(nu)
    return (1.0 + nu) * _geom_sum(nu, N - 1) / (N * _geom_sum(nu, N))


def _rho1_vector(N, nu):
    # nu^n on Λ_n (n=1..N) and nu^n on Ω_n (n=0..N-1), normalised to unit trace
    w = _geom_weights(nu, N)
    v = np.zeros(incoherent_dim(N))
    v[:N] = w[1:]
    v[N:2 * N] = w[:N]
    return v / v.sum()


def _rho2_vector(N, nu):
    # sum_n nu^n |psi_n><psi_n| over n=1..N-1 with
    # |psi_n><psi_n| = ((N-n)/N) Λ_n + (n/N) Ω_n - (sqrt(n(N-n))/N) χ_n
    w = _geom_weights(nu, N - 2)
    v = np.zeros(incoherent_dim(N))
    for n in range(1, N):
        wn = w[n - 1]
        v[incoherent_index("a", n, N)] += wn * (N - n) / N
        v[incoherent_index("b", n, N)] += wn * n / N
        v[incoherent_index("c", n, N)] -= wn * math.sqrt(n * (N - n)) / N
    return v


def incoherent_steady_state(N: int, nu: float) -> ReducedState:
    """alpha rho_1 + (1 - alpha) rho_2 as an incoherent coefficient vector."""
    nu = _check_nu(nu)
    if N < 2:
        raise ScenarioError("the incoherent scenario needs N >= 2")
    alpha = mixing_weight(N, nu)
    v = alpha * _rho1_vector(N, nu) + (1.0 - alpha) * _rho2_vector(N, nu)
    return ReducedState(Scenario.INCOHERENT, v, N)


def incoherent_steady_coherence(N: int, nu: float) -> float:
    nu = _check_nu(nu)
    if N < 2:
        raise ScenarioError("the incoherent scenario needs N >= 2")
    alpha = mixing_weight(N, nu)
    first = (1.0 + nu) ** (N - 1) / _geom_sum(nu, N - 1)
    second = (1.0 + nu) ** (N - 2) / _geom_sum(nu, N - 2)
    return over_mersenne(alpha * first + 4.0 * (1.0 - alpha) * (N - 1) / N * second - 1.0, N)


def incoherent_steady_probability(N: int, nu: float) -> float:
    return excitation_probability(incoherent_steady_state(N, nu))


def coherent_steady_state(N: int, nu: float) -> ReducedState:
    """d_n proportional to nu^n, n = 0..N."""
    nu = _check_nu(nu)
    if N < 1:
        raise DomainError("N must be >= 1")
    return ReducedState(Scenario.COHERENT, _geom_weights(nu, N), N)


def coherent_steady_coherence(N: int, nu: float) -> float:
    nu = _check_nu(nu)
    return over_mersenne((1.0 + nu) ** N / _geom_sum(nu, N) - 1.0, N)


def coherent_steady_probability(N: int, nu: float) -> float:
    """Mean excitation per qubit, sum_n n nu^n / (N sum_n nu^n)."""
    w = _geom_weights(_check_nu(nu), N)
    return float(np.dot(np.arange(N + 1), w) / N)


@dataclass(frozen=True)
class SteadySummary:
    scenario: Scenario
    N: int
    nu: float
    coherence_inf: float
    probability_inf: float
    alpha: float | None = None


def steady_summary(scenario, N: int, nu: float) -> SteadySummary:
    scenario = Scenario(scenario)
    if scenario is Scenario.INCOHERENT:
        state = incoherent_steady_state(N, nu)
        return SteadySummary(scenario, N, nu, incoherent_steady_coherence(N, nu),
                             excitation_probability(state), mixing_weight(N, nu))
    if scenario is Scenario.COHERENT:
        return SteadySummary(scenario, N, nu, coherent_steady_coherence(N, nu),
                             coherent_steady_probability(N, nu))
    raise ScenarioError("steady summaries exist for the incoherent and coherent scenarios")


def limit_values(scenario, N: int, limit: str) -> tuple[Fraction, Fraction]:
    """Exact (coherence, probability) of the steady state as nu -> 0 or nu -> 1.

    ``limit`` is ``"nu->0"`` or ``"nu->1"``.
    """
    scenario = Scenario(scenario)
    if limit not in ("nu->0", "nu->1"):
        raise DomainError(f"limit must be 'nu->0' or 'nu->1', got {limit!r}")
    d = 2 ** N - 1
    # at nu -> 1 both families spread uniformly and share C = (2^N/(N+1) - 1)/(2^N - 1)
    hot = Fraction(2 ** N - N - 1, (N + 1) * d)
    if scenario is Scenario.INCOHERENT:
        if N < 2:
            raise ScenarioError("the incoherent scenario needs N >= 2")
        if limit == "nu->0":
            return Fraction((N - 1) * (3 * N - 4), N * N * d), Fraction(1, N * N)
        return hot, Fraction(1, 2)
    if scenario is Scenario.COHERENT:
        if limit == "nu->0":
            return Fraction(0), Fraction(0)
        return hot, Fraction(1, 2)
    raise ScenarioError("limits exist for the incoherent and coherent scenarios")


def initial_coherent_coherence(N: int) -> float:
    """l1 coherence (N-1)/(2^N-1) of the uniform single-excitation state."""
    return over_mersenne(N - 1, N)


def find_tau_c(N: int, grid_points: int = 2001, xtol: float = 1e-10) -> float | None:
    """Bath occupation above which the coherent steady state beats its initial coherence.

    Returns ``None`` when the steady coherence never reaches (N-1)/(2^N-1).
    The smallest crossing found on a nu grid is refined by bisection.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    target = initial_coherent_coherence(N)
    g = lambda nu: coherent_steady_coherence(N, nu) - target
    if g(1.0) < 0:
        return None
    lo_edge, hi_edge = 1e-6, 1.0 - 1e-6
    grid = np.linspace(lo_edge, hi_edge, grid_points)
    vals = np.array([g(x) for x in grid])
    sign_change = np.flatnonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))
    if sign_change.size == 0:
        return None
    i = sign_change[0]
    nu_c = scipy.optimize.bisect(g, grid[i], grid[i + 1], xtol=xtol)
    return nu_c / (1.0 - nu_c)


@dataclass(frozen=True, eq=False)
class ZeroModes:
    """Right zero modes as columns, left zero modes as rows."""

    scenario: Scenario
    N: int
    nu: float
    right: np.ndarray
    left: np.ndarray

    def steady_vector(self, v0) -> np.ndarray:
        v0 = np.asarray(getattr(v0, "coeffs", v0), dtype=float)
        return self.right @ (self.left @ v0)


def appendix_zero_modes(scenario, N: int, nu: float) -> ZeroModes:
    """Explicit zero-eigenvalue eigenvectors of the reduced generators.

    Incoherent (needs 0 < nu < 1):
      r_1 ∝ sum_j nu^j |a_j> + nu^{j-1} |b_{j-1}>                 (rho_1)
      l_1 ∝ sum_j j |a_j> + (N-j+1) |b_{j-1}> + 2 sqrt(f_j) |c_j>   (J^2-like charge)
      r_2 ∝ sum_j (N-j) nu^j |a_j> + (j-1) nu^{j-1} |b_{j-1}> - sqrt(f_j) nu^j |c_j>
      l_2 = (nu - nu^N)/(N(1 - nu^{N+1})) (alpha_B w - N tr)
    with alpha_B = (1-nu^N)(1+nu)/(nu-nu^N), w = (N-n on a_n, n on b_n,
    -2 sqrt(f_n) on c_n) and tr the trace functional.

    Coherent: r' ∝ nu^n and l' = (1, ..., 1).
    """
    scenario = Scenario(scenario)
    nu = _check_nu(nu)
    if scenario is Scenario.COHERENT:
        if nu >= 1.0:
            raise DomainError("coherent zero modes need nu < 1")
        right = ((1.0 - nu) / (1.0 - nu ** (N + 1)) * nu ** np.arange(N + 1))[:, None]
        left = np.ones((1, N + 1))
        return ZeroModes(scenario, N, nu, right, left)
    if scenario is not Scenario.INCOHERENT:
        raise ScenarioError("zero modes are tabulated for the incoherent and coherent scenarios")
    if N < 2:
        raise ScenarioError("the incoherent scenario needs N >= 2")
    if not 0.0 < nu < 1.0:
        raise DomainError("incoherent zero modes need 0 < nu < 1")

    D = incoherent_dim(N)
    ia = lambda n: incoherent_index("a", n, N)
    ib = lambda n: incoherent_index("b", n, N)
    ic = lambda n: incoherent_index("c", n, N)
    r1, l1, r2, w, tr = (np.zeros(D) for _ in range(5))
    for j in range(1, N + 1):
        r1[ia(j)] = nu ** j
        r1[ib(j - 1)] = nu ** (j - 1)
        l1[ia(j)] = j
        l1[ib(j - 1)] = N - j + 1
        r2[ia(j)] = (N - j) * nu ** j
        r2[ib(j - 1)] = (j - 1) * nu ** (j - 1)
        w[ia(j)] = N - j
        w[ib(j - 1)] = j - 1
        tr[ia(j)] = tr[ib(j - 1)] = 1.0
    for j in range(1, N):
        s = math.sqrt(j * (N - j))
        l1[ic(j)] = 2.0 * s
        r2[ic(j)] = -s * nu ** j
        w[ic(j)] = -2.0 * s
    r1 *= (1.0 - nu) / ((1.0 + nu) * (1.0 - nu ** N))
    l1 *= (1.0 + nu) * (1.0 - nu ** N) / (N * (1.0 - nu ** (N + 1)))
    r2 *= (1.0 - nu) / (N * (nu - nu ** N))
    alpha_b = (1.0 - nu ** N) * (1.0 + nu) / (nu - nu ** N)
    l2 = (nu - nu ** N) / (N * (1.0 - nu ** (N + 1))) * (alpha_b * w - N * tr)
    return ZeroModes(scenario, N, nu, np.stack([r1, r2], axis=1), np.stack([l1, l2]))


def verify_zero_modes(modes: ZeroModes, tol: float = 1e-10) -> dict:
    """Check residuals, biorthonormality and unit trace against the built generator.

    Returns the residual norms; raises :class:`VerificationError` when any
    exceeds ``tol``.
    """
    tau = modes.nu / (1.0 - modes.nu)
    if modes.scenario is Scenario.INCOHERENT:
        G = build_incoherent_generator(modes.N, tau)
    else:
        G = build_coherent_generator(modes.N, tau)
    M = G.matrix
    trace_row = G.trace_row()
    k = modes.right.shape[1]
    res = {
        "right_residual": float(np.abs(M @ modes.right).max()),
        "left_residual": float(np.abs(modes.left @ M).max()),
        "biorthonormality": float(np.abs(modes.left @ modes.right - np.eye(k)).max()),
        "trace_one": float(np.abs(trace_row @ modes.right - 1.0).max()),
    }
    bad = {name: val for name, val in res.items() if not val <= tol}
    if bad:
        raise VerificationError(f"zero modes fail verification: {bad}", res)
    return res
