"""Brute-force reference dynamics in the full 2^N-dimensional Hilbert space.

This path never touches the reduced generators: it builds the collective
ladder operators explicitly and integrates the master equation

    drho/dt = (1+tau)(2 J- rho J+ - {J+J-, rho}) + tau(2 J+ rho J- - {J-J+, rho})

with classical fixed-step RK4.  It is memory bound (two 4^N matrices) and
therefore limited to small N.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import product_basis
from .errors import CapacityError, ContractError, DomainError
from .reduced_model import as_bath, two_j_of

DEFAULT_MAX_FULL_N = 12
MAX_FULL_N_ENV = "DICKE_MAX_FULL_N"


def max_full_n() -> int:
    raw = os.environ.get(MAX_FULL_N_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_FULL_N
    try:
        return int(raw)
    except ValueError:
        raise ContractError(f"{MAX_FULL_N_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True, eq=False)
class CollectiveOps:
    n_qubits: int
    J_minus: np.ndarray
    J_plus: np.ndarray

    @property
    def dim(self) -> int:
        return self.J_minus.shape[0]

    @cached_property
    def J_z(self) -> np.ndarray:
        return np.diag(product_basis.weights(self.n_qubits) - self.n_qubits / 2)

    @cached_property
    def JpJm(self) -> np.ndarray:
        return self.J_plus @ self.J_minus

    @cached_property
    def JmJp(self) -> np.ndarray:
        return self.J_minus @ self.J_plus

    @cached_property
    def J_squared(self) -> np.ndarray:
        Jz = self.J_z
        return self.JpJm + Jz @ Jz - Jz


def build_collective_operators(N: int) -> CollectiveOps:
    """J^- = sum_i sigma_i^- and J^+ = (J^-)^T in the lexicographic product basis."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    limit = max_full_n()
    if N > limit:
        raise CapacityError(
            f"full-space oracle capped at N={limit}: N={N} needs 4^N = {4 ** N:.3e} "
            f"matrix entries per operator (override with {MAX_FULL_N_ENV})"
        )
    d = 2 ** N
    Jm = np.zeros((d, d))
    idx = np.arange(d)
    for q in range(N):
        bit = 1 << (N - 1 - q)
        excited = idx[(idx & bit) != 0]
        # sigma^- = |g><e| clears the bit
        Jm[excited ^ bit, excited] = 1.0
    return CollectiveOps(N, Jm, Jm.T.copy())


def lindblad_rhs(ops: CollectiveOps, bath, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the collective master equation.

    ``rho`` may carry leading batch axes; the last two axes are the matrix.
    """
    bath = as_bath(bath)
    if not math.isfinite(bath.tau):
        raise DomainError("the master equation needs a finite tau")
    rho = np.asarray(rho)
    if rho.shape[-2:] != (ops.dim, ops.dim):
        raise ContractError(f"rho has shape {rho.shape}, expected (..., {ops.dim}, {ops.dim})")
    Jm, Jp = ops.J_minus, ops.J_plus
    down = 2.0 * (Jm @ rho @ Jp) - ops.JpJm @ rho - rho @ ops.JpJm
    out = (1.0 + bath.tau) * down
    if bath.tau:
        out = out + bath.tau * (2.0 * (Jp @ rho @ Jm) - ops.JmJp @ rho - rho @ ops.JmJp)
    return out


def _norm_bound(N: int, tau: float) -> float:
    # ||L|| <= 4(1+tau)||J-||^2 + 4 tau ||J+||^2 with ||J±||^2 <= N(N+2)/4
    return (1.0 + 2.0 * tau) * N * (N + 2)


def default_step(N: int, tau: float) -> float:
    return 0.05 / _norm_bound(N, tau)


def max_stable_step(N: int, tau: float) -> float:
    return 2.5 / _norm_bound(N, tau)


def _hermitian_part(rho):
    return 0.5 * (rho + np.swapaxes(rho, -1, -2).conj())


def evolve_full_grid(ops: CollectiveOps, bath, rho0, times, dt: float | None = None) -> np.ndarray:
    """RK4-integrate ``rho0`` and return snapshots at every entry of ``times``.

    Each interval between consecutive output times is split into equal
    sub-steps no longer than ``dt``.
    """
    bath = as_bath(bath)
    N = ops.n_qubits
    limit = max_stable_step(N, bath.tau)
    if dt is None:
        dt = default_step(N, bath.tau)
    if not 0 < dt <= limit:
        raise ContractError(f"dt={dt} outside (0, {limit:.3e}] for N={N}, tau={bath.tau}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ContractError("times must be non-negative and ascending")

    rho = np.array(rho0, dtype=np.result_type(rho0, float))
    out = np.empty((times.size,) + rho.shape, dtype=rho.dtype)
    f = lambda r: lindblad_rhs(ops, bath, r)
    now = 0.0
    for i, target in enumerate(times):
        span = target - now
        if span > 0:
            n_sub = max(1, math.ceil(span / dt - 1e-9))
            h = span / n_sub
            for _ in range(n_sub):
                k1 = f(rho)
                k2 = f(rho + 0.5 * h * k1)
                k3 = f(rho + 0.5 * h * k2)
                k4 = f(rho + h * k3)
                rho = _hermitian_part(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            now = target
        out[i] = rho
    return out


def evolve_full(ops: CollectiveOps, bath, rho0, t: float, dt: float | None = None) -> np.ndarray:
    return evolve_full_grid(ops, bath, rho0, [t], dt)[0]


def dicke_state(N: int, j, m, k: int = 1, ops: CollectiveOps | None = None) -> np.ndarray:
    """State vector |j, m> for j = N/2, or the j = N/2 - 1 copy containing |e>_k|g>^{N-1}.

    The j = N/2 - 1 state at m = 1 - N/2 is the Gram-Schmidt residual of
    |1E_k> against the symmetric Dicke state; higher m follow by applying J^+
    and normalising.
    """
    two_j = two_j_of(j)
    two_m = 2 * float(m)
    if abs(two_m - round(two_m)) > 1e-12 or abs(round(two_m)) > two_j or (two_j - round(two_m)) % 2:
        raise DomainError(f"m={m} is not a magnetic number of j={j}")
    two_m = int(round(two_m))
    n = (two_m + N) // 2  # excitation number
    if two_j == N:
        return product_basis.uniform_ket(N, n)
    if two_j != N - 2 or N < 2:
        raise DomainError(f"only j = N/2 and j = N/2 - 1 are supported, got j={j} for N={N}")
    seed = product_basis.site_excited_ket(N, 1, k)
    sym = product_basis.uniform_ket(N, 1)
    v = seed - (sym @ seed) * sym
    v /= np.linalg.norm(v)
    if n > 1:
        ops = ops if ops is not None else build_collective_operators(N)
        for _ in range(n - 1):
            v = ops.J_plus @ v
            v /= np.linalg.norm(v)
    return v


def expand_in_basis(X: np.ndarray, basis) -> tuple[np.ndarray, float]:
    """Coefficients of ``X`` in a Hilbert-Schmidt orthogonal operator basis.

    Returns ``(coeffs, residual)`` where ``residual`` is the max-abs entry of
    ``X - sum_i coeffs[i] B_i``; a nonzero residual means ``X`` leaves the span.
    """
    coeffs = np.array([np.vdot(B, X).real / np.vdot(B, B).real for B in basis])
    rebuilt = sum(c * B for c, B in zip(coeffs, basis))
    return coeffs, float(np.abs(X - rebuilt).max())
