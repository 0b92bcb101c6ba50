"""Time evolution of reduced coefficient vectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, DegeneracyError
from .reduced_model import ReducedGenerator, ReducedState

ZERO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __len__(self):
        return len(self.states)

    def coefficient_matrix(self) -> np.ndarray:
        """Stack of coefficient vectors, one row per time."""
        return np.stack([s.coeffs for s in self.states])


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Biorthonormal eigen-decomposition G = sum_i lambda_i |r_i><l_i|.

    ``right[:, i]`` is r_i and ``left[i, :]`` is l_i, normalised so that
    ``left @ right`` is the identity.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    zero_tol: float

    @property
    def zero_indices(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.eigenvalues) <= self.zero_tol)

    def propagate(self, v0, t: float) -> np.ndarray:
        v0 = np.asarray(getattr(v0, "coeffs", v0), dtype=float)
        out = self.right @ (np.exp(t * self.eigenvalues) * (self.left @ v0))
        return out.real if np.isrealobj(v0) else out

    def stationary_projection(self, v0) -> np.ndarray:
        """sum over zero modes of r_i <l_i|v0>, the t -> infinity limit."""
        v0 = np.asarray(getattr(v0, "coeffs", v0), dtype=float)
        z = self.zero_indices
        return (self.right[:, z] @ (self.left[z] @ v0)).real


def _check_dims(G: ReducedGenerator, v0: ReducedState):
    if v0.coeffs.shape != (G.dim,):
        raise ContractError(f"state of length {v0.coeffs.size} does not fit a {G.dim}x{G.dim} generator")
    if v0.scenario is not G.scenario:
        raise ContractError(f"{v0.scenario.value} state cannot evolve under a {G.scenario.value} generator")


def evolve(G: ReducedGenerator, v0: ReducedState, t: float) -> ReducedState:
    """Return exp(t G) v0."""
    _check_dims(G, v0)
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise ContractError(f"t must be finite and non-negative, got {t}")
    if t == 0.0:
        return v0
    return v0.with_coeffs(scipy.linalg.expm(t * G.matrix) @ v0.coeffs)


def evolve_grid(G: ReducedGenerator, v0: ReducedState, times) -> Trajectory:
    """Evaluate exp(t G) v0 on an ascending grid of times.

    States are advanced step to step with exp(dt G).  On a uniform grid a
    single propagator is reused.
    """
    _check_dims(G, v0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.ndim != 1 or times.size == 0:
        raise ContractError("times must be a non-empty 1-D grid")
    if times[0] < 0 or not np.all(np.isfinite(times)):
        raise ContractError("times must be finite and non-negative")
    steps = np.diff(times)
    if np.any(steps < 0):
        raise ContractError("times must be sorted ascending")

    uniform = steps.size > 0 and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0)
    v = scipy.linalg.expm(times[0] * G.matrix) @ v0.coeffs if times[0] > 0 else v0.coeffs
    states = [v0.with_coeffs(v) if times[0] > 0 else v0]
    step_prop = scipy.linalg.expm(steps[0] * G.matrix) if uniform else None
    for dt in steps:
        if dt == 0.0:
            states.append(states[-1])
            continue
        prop = step_prop if uniform else scipy.linalg.expm(dt * G.matrix)
        v = prop @ v
        states.append(v0.with_coeffs(v))
    return Trajectory(times=times, states=tuple(states))


def spectral_decompose(G: ReducedGenerator, zero_tol: float = ZERO_TOL,
                       max_condition: float = 1e12) -> Eigensystem:
    """Biorthonormal right/left eigenvectors of ``G``.

    Eigenvalues with ``|lambda| <= zero_tol * max|lambda|`` are treated as
    exact zeros.  Within each cluster of numerically equal eigenvalues the
    left vectors are re-solved against the right ones so that
    ``left @ right == I`` holds also for degenerate eigenvalues (the
    incoherent generator has a two-fold zero).
    """
    A = G.matrix if isinstance(G, ReducedGenerator) else np.asarray(G, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError("generator must be square")
    w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    scale = max(np.abs(w).max(), 1.0)
    tol = zero_tol * scale
    w = np.where(np.abs(w) <= tol, 0.0, w)
    if np.all(np.abs(w.imag) <= tol):
        w = w.real.astype(complex)

    if np.linalg.cond(vr) > max_condition:
        raise DegeneracyError("eigenvector matrix is singular; the spectrum looks defective")

    left = vl.conj().T
    # group eigenvalues that coincide to the zero tolerance
    order = np.argsort(w.real, kind="stable")
    clusters, current = [], [order[0]]
    for i in order[1:]:
        if abs(w[i] - w[current[-1]]) <= tol:
            current.append(i)
        else:
            clusters.append(current)
            current = [i]
    clusters.append(current)
    for idx in clusters:
        idx = np.array(idx)
        gram = left[idx] @ vr[:, idx]
        try:
            left[idx] = np.linalg.solve(gram, left[idx])
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError("left/right eigenvectors cannot be biorthonormalised") from exc

    return Eigensystem(eigenvalues=w, right=vr, left=left, zero_tol=tol)
