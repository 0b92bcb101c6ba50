"""Product eigenbasis {|g>, |e>}^N of the free qubit Hamiltonian.

Basis index ``i`` encodes qubit q (1-based) in bit ``N - q`` of ``i``, so
qubit 1 is the most significant bit and |g> = 0 precedes |e> = 1.
"""
from functools import lru_cache

import numpy as np

from .errors import DomainError


@lru_cache(maxsize=32)
def occupation_table(N: int) -> np.ndarray:
    """(2^N, N) array of 0/1 excitations, column q-1 for qubit q."""
    idx = np.arange(2 ** N)[:, None]
    shifts = np.arange(N - 1, -1, -1)[None, :]
    table = (idx >> shifts) & 1
    table.setflags(write=False)
    return table


def weights(N: int) -> np.ndarray:
    return occupation_table(N).sum(axis=1)


def _normalised(mask):
    v = mask.astype(float)
    norm = np.sqrt(v.sum())
    if norm == 0:
        raise DomainError("requested symmetric state is empty")
    return v / norm


def uniform_ket(N: int, n: int) -> np.ndarray:
    """|nE>: uniform superposition of all weight-n product states."""
    if not 0 <= n <= N:
        raise DomainError(f"excitation number {n} out of range for N={N}")
    return _normalised(weights(N) == n)


def site_excited_ket(N: int, n: int, k: int) -> np.ndarray:
    """|nE_k>: uniform over weight-n states with qubit k excited."""
    if not 1 <= k <= N or not 1 <= n <= N:
        raise DomainError(f"|{n}E_{k}> undefined for N={N}")
    occ = occupation_table(N)
    return _normalised((weights(N) == n) & (occ[:, k - 1] == 1))


def site_ground_ket(N: int, n: int, k: int) -> np.ndarray:
    """|nE_¬k>: uniform over weight-n states with qubit k in |g>."""
    if not 1 <= k <= N or not 0 <= n <= N - 1:
        raise DomainError(f"|{n}E_not{k}> undefined for N={N}")
    occ = occupation_table(N)
    return _normalised((weights(N) == n) & (occ[:, k - 1] == 0))
