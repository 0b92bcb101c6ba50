"""Domain types and the symmetry-reduced generators.

Three invariant operator subspaces are supported:

* ``INCOHERENT``: span of Λ_n = |nE_k><nE_k| (n=1..N), Ω_n = |nE_¬k><nE_¬k|
  (n=0..N-1) and χ_n = |nE_k><nE_¬k| + h.c. (n=1..N-1), reached from a single
  excitation localised on qubit k.  Dimension 3N-1.
* ``COHERENT``: span of Γ_n = |nE><nE| (n=0..N), reached from the uniform
  single-excitation superposition.  Dimension N+1.
* ``DICKE``: span of P_{j,m} = |j,m><j,m| for one total angular momentum j.
  Dimension 2j+1.

Every generator is defined by expansion coefficients: column ``i`` holds the
coefficients of L[basis_i] in the ordered basis, so that ``dv/dt = G @ v``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError, ScenarioError


class Scenario(str, enum.Enum):
    INCOHERENT = "incoherent"
    COHERENT = "coherent"
    DICKE = "dicke"


@dataclass(frozen=True)
class BathParams:
    """Thermal bath seen by the qubits.

    ``tau`` is the mean photon number of the resonant mode and
    ``nu = tau / (1 + tau)`` the Boltzmann ratio exp(-beta hbar omega).
    Use :meth:`from_tau` or :meth:`from_nu` rather than the raw constructor.
    """

    tau: float
    nu: float

    def __post_init__(self):
        if not (self.tau >= 0):
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        if not (0.0 <= self.nu <= 1.0):
            raise DomainError(f"nu must lie in [0, 1], got {self.nu}")

    @classmethod
    def from_tau(cls, tau: float) -> "BathParams":
        tau = float(tau)
        if not math.isfinite(tau) or tau < 0:
            raise DomainError(f"tau must be finite and >= 0, got {tau}")
        return cls(tau=tau, nu=tau / (1.0 + tau))

    @classmethod
    def from_nu(cls, nu: float) -> "BathParams":
        # nu == 1 (infinite temperature) is only meaningful for closed forms.
        nu = float(nu)
        if not 0.0 <= nu <= 1.0:
            raise DomainError(f"nu must lie in [0, 1], got {nu}")
        tau = math.inf if nu == 1.0 else nu / (1.0 - nu)
        return cls(tau=tau, nu=nu)

    @property
    def rate_down(self) -> float:
        """Emission rate 2(1+tau) multiplying the J^- dissipator."""
        return 2.0 * (1.0 + self.tau)

    @property
    def rate_up(self) -> float:
        return 2.0 * self.tau


def as_bath(bath) -> BathParams:
    if isinstance(bath, BathParams):
        return bath
    return BathParams.from_tau(bath)


def _require_finite_bath(bath: BathParams):
    if not math.isfinite(bath.tau) or bath.nu >= 1.0:
        raise DomainError("generator construction needs nu < 1 (finite tau)")


def two_j_of(j) -> int:
    """Return 2j as an int, rejecting values that are not half-integers."""
    twice = 2 * float(j)
    two_j = int(round(twice))
    if abs(twice - two_j) > 1e-12 or two_j < 0:
        raise DomainError(f"j must be a non-negative half-integer, got {j}")
    return two_j


def incoherent_dim(N: int) -> int:
    return 3 * N - 1


def incoherent_index(kind: str, n: int, N: int) -> int:
    """Position of a_n, b_n or c_n in the incoherent coefficient vector.

    The vector is ordered (a_1..a_N, b_0..b_{N-1}, c_1..c_{N-1}).
    """
    if kind == "a" and 1 <= n <= N:
        return n - 1
    if kind == "b" and 0 <= n <= N - 1:
        return N + n
    if kind == "c" and 1 <= n <= N - 1:
        return 2 * N + n - 1
    raise DomainError(f"no coefficient {kind}_{n} for N={N}")


def _state_dim(scenario: Scenario, n_qubits: int, j) -> int:
    if scenario is Scenario.INCOHERENT:
        return incoherent_dim(n_qubits)
    if scenario is Scenario.COHERENT:
        return n_qubits + 1
    return two_j_of(j) + 1


def _check_size(scenario: Scenario, N: int, j=None):
    if int(N) != N or N < 1:
        raise DomainError(f"number of qubits must be a positive integer, got {N}")
    if scenario is Scenario.INCOHERENT and N < 2:
        raise ScenarioError("the incoherent scenario needs N >= 2 (a qubit l != k)")
    if scenario is Scenario.DICKE:
        two_j = two_j_of(j)
        if two_j > N or (N - two_j) % 2:
            raise ScenarioError(f"j={j} is not a total angular momentum of {N} qubits")


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Coefficient vector of a density matrix inside one invariant subspace."""

    scenario: Scenario
    coeffs: np.ndarray
    n_qubits: int
    j: float | None = None

    def __post_init__(self):
        scenario = Scenario(self.scenario)
        object.__setattr__(self, "scenario", scenario)
        if scenario is Scenario.DICKE:
            if self.j is None:
                raise ScenarioError("a Dicke state needs its j")
            object.__setattr__(self, "j", two_j_of(self.j) / 2)
        _check_size(scenario, self.n_qubits, self.j)
        coeffs = np.array(self.coeffs, dtype=float)
        expected = _state_dim(scenario, self.n_qubits, self.j)
        if coeffs.shape != (expected,):
            raise ContractError(
                f"{scenario.value} state for N={self.n_qubits} needs {expected} "
                f"coefficients, got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def with_coeffs(self, coeffs) -> "ReducedState":
        return ReducedState(self.scenario, coeffs, self.n_qubits, self.j)

    @property
    def a(self):
        N = self.n_qubits
        return self.coeffs[:N]

    @property
    def b(self):
        N = self.n_qubits
        return self.coeffs[N:2 * N]

    @property
    def c(self):
        N = self.n_qubits
        return self.coeffs[2 * N:]

    def trace(self) -> float:
        if self.scenario is Scenario.INCOHERENT:
            # chi_n operators are traceless
            return float(self.a.sum() + self.b.sum())
        return float(self.coeffs.sum())

    def positivity_violation(self) -> float:
        """Largest amount by which the state fails to be positive semidefinite.

        Zero for a physical state.  For the incoherent family the check is on
        every 2x2 block [[a_n, c_n s], [c_n s, b_n]] of the density matrix
        restricted to span{|nE_k>, |nE_¬k>}.
        """
        if self.scenario is not Scenario.INCOHERENT:
            return float(max(0.0, -self.coeffs.min()))
        a, b, c = self.a, self.b, self.c
        worst = max(0.0, -a.min(), -b.min())
        for n in range(1, self.n_qubits):
            an, bn, cn = a[n - 1], b[n], c[n - 1]
            lam_min = 0.5 * (an + bn) - math.hypot(0.5 * (an - bn), cn)
            worst = max(worst, -lam_min)
        return float(worst)


@dataclass(frozen=True, eq=False)
class ReducedGenerator:
    matrix: np.ndarray
    scenario: Scenario
    n_qubits: int
    bath: BathParams
    j: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractError(f"generator must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_matrix(self, matrix) -> "ReducedGenerator":
        return ReducedGenerator(matrix, self.scenario, self.n_qubits, self.bath, self.j, dict(self.meta))

    def trace_row(self) -> np.ndarray:
        """Linear functional v -> tr(rho(v)) for this generator's basis."""
        row = np.ones(self.dim)
        if self.scenario is Scenario.INCOHERENT:
            row[2 * self.n_qubits:] = 0.0
        return row


def excitation_degeneracy(N: int, n: int) -> int:
    """f_n = n (N - n)."""
    if not 0 <= n <= N:
        raise DomainError(f"n must lie in [0, {N}], got {n}")
    return n * (N - n)


def spin_coupling_coefficient(j, m, sign: str) -> float:
    """Ladder amplitude c^±_{j,m} = sqrt(j(j+1) - m(m±1))."""
    two_j = two_j_of(j)
    two_m = 2 * float(m)
    if abs(two_m - round(two_m)) > 1e-12 or abs(two_m) > two_j or (two_j - round(two_m)) % 2:
        raise DomainError(f"m={m} is not a magnetic number of j={j}")
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    # integer arithmetic on 2j, 2m keeps the radicand exact
    tj, tm = two_j, int(round(two_m))
    s = 1 if sign == "+" else -1
    radicand4 = tj * (tj + 2) - tm * (tm + 2 * s)
    if radicand4 < 0:
        raise DomainError(f"negative radicand for c^{sign}_{{{j},{m}}}")
    return math.sqrt(radicand4) / 2.0


def build_dicke_generator(j, bath, n_qubits: int | None = None) -> ReducedGenerator:
    """Tridiagonal rate matrix for the populations u_m of P_{j,m}, m = -j..j."""
    bath = as_bath(bath)
    _require_finite_bath(bath)
    two_j = two_j_of(j)
    if two_j < 1:
        raise DomainError("the Dicke generator needs j >= 1/2")
    if n_qubits is None:
        n_qubits = two_j
    _check_size(Scenario.DICKE, n_qubits, j)
    dim = two_j + 1
    G = np.zeros((dim, dim))
    for col in range(dim):
        m = col - two_j / 2
        down = bath.rate_down * spin_coupling_coefficient(j, m, "-") ** 2
        up = bath.rate_up * spin_coupling_coefficient(j, m, "+") ** 2
        G[col, col] = -down - up
        if col > 0:
            G[col - 1, col] = down
        if col < dim - 1:
            G[col + 1, col] = up
    return ReducedGenerator(G, Scenario.DICKE, n_qubits, bath, j=two_j / 2)


def build_coherent_generator(N: int, bath) -> ReducedGenerator:
    """Rate matrix for the populations d_n of Γ_n = |nE><nE|, n = 0..N."""
    bath = as_bath(bath)
    _require_finite_bath(bath)
    _check_size(Scenario.COHERENT, N)
    G = np.zeros((N + 1, N + 1))
    for n in range(N + 1):
        # f_n + n = (c^-_{N/2, n-N/2})^2 ; vanishes at n = 0
        down = bath.rate_down * (excitation_degeneracy(N, n) + n)
        # f_{n+1} + n + 1 = (n+1)(N-n) ; vanishes at n = N
        up = bath.rate_up * (n + 1) * (N - n)
        G[n, n] = -down - up
        if n > 0:
            G[n - 1, n] = down
        if n < N:
            G[n + 1, n] = up
    return ReducedGenerator(G, Scenario.COHERENT, N, bath)


class _ColumnWriter:
    """Accumulates L[basis] terms into one generator column.

    Terms addressing operators outside the declared index ranges must carry
    a vanishing coefficient (they come with a factor f_0 or f_N).
    """

    def __init__(self, G, N, col):
        self.G, self.N, self.col = G, N, col

    def add(self, kind, n, value):
        try:
            row = incoherent_index(kind, n, self.N)
        except DomainError:
            if abs(value) > 0:
                raise AssertionError(f"non-zero boundary term {kind}_{n}: {value}")
            return
        self.G[row, self.col] += value


def build_incoherent_generator(N: int, bath) -> ReducedGenerator:
    """Generator M of dv/dt = M v for v = (a_1..a_N, b_0..b_{N-1}, c_1..c_{N-1})."""
    bath = as_bath(bath)
    _require_finite_bath(bath)
    _check_size(Scenario.INCOHERENT, N)
    dn, up = bath.rate_down, bath.rate_up
    f = lambda n: excitation_degeneracy(N, n) if 0 <= n <= N else 0
    rf = lambda n: math.sqrt(f(n))
    D = incoherent_dim(N)
    G = np.zeros((D, D))

    for n in range(1, N + 1):
        w = _ColumnWriter(G, N, incoherent_index("a", n, N))
        w.add("a", n - 1, dn * f(n - 1))
        w.add("a", n, -dn * (f(n) - N + 2 * n))
        w.add("b", n - 1, dn)
        w.add("c", n - 1, dn * rf(n - 1))
        w.add("c", n, -0.5 * dn * rf(n))
        w.add("a", n, -up * f(n))
        w.add("a", n + 1, up * f(n))
        w.add("c", n, -0.5 * up * rf(n))

    for n in range(0, N):
        w = _ColumnWriter(G, N, incoherent_index("b", n, N))
        w.add("b", n - 1, dn * f(n))
        w.add("b", n, -dn * f(n))
        w.add("c", n, -0.5 * dn * rf(n))
        w.add("a", n + 1, up)
        w.add("b", n, -up * (f(n + 1) + 1))
        w.add("b", n + 1, up * f(n + 1))
        w.add("c", n, -0.5 * up * rf(n))
        w.add("c", n + 1, up * rf(n + 1))

    for n in range(1, N):
        w = _ColumnWriter(G, N, incoherent_index("c", n, N))
        s = rf(n)
        w.add("a", n, -dn * s)
        w.add("b", n - 1, 2 * dn * s)
        w.add("b", n, -dn * s)
        w.add("c", n - 1, dn * math.sqrt(f(n - 1) * f(n)))
        w.add("c", n, -0.5 * dn * (2 * f(n) - N + 2 * n))
        w.add("a", n + 1, 2 * up * s)
        w.add("a", n, -up * s)
        w.add("b", n, -up * s)
        w.add("c", n, -0.5 * up * (2 * f(n) + N - 2 * n))
        w.add("c", n + 1, up * math.sqrt(f(n) * f(n + 1)))

    return ReducedGenerator(G, Scenario.INCOHERENT, N, bath)


def build_generator(scenario, N: int, bath, j=None) -> ReducedGenerator:
    scenario = Scenario(scenario)
    if scenario is Scenario.INCOHERENT:
        return build_incoherent_generator(N, bath)
    if scenario is Scenario.COHERENT:
        return build_coherent_generator(N, bath)
    return build_dicke_generator(N / 2 if j is None else j, bath, n_qubits=N)


def initial_vector(scenario, N: int, j=None, m=None) -> ReducedState:
    """Initial coefficients of the standard starting states.

    Incoherent: |1E_k><1E_k| (a_1 = 1).  Coherent: |1E><1E| (d_1 = 1).
    Dicke: P_{j,m}, defaulting to j = N/2 and the top state m = j.
    """
    scenario = Scenario(scenario)
    _check_size(scenario, N, N / 2 if j is None else j)
    if scenario is Scenario.INCOHERENT:
        v = np.zeros(incoherent_dim(N))
        v[incoherent_index("a", 1, N)] = 1.0
        return ReducedState(scenario, v, N)
    if scenario is Scenario.COHERENT:
        v = np.zeros(N + 1)
        v[1] = 1.0
        return ReducedState(scenario, v, N)
    j = N / 2 if j is None else j
    two_j = two_j_of(j)
    m = two_j / 2 if m is None else m
    idx = 2 * float(m) + two_j
    if abs(idx - round(idx)) > 1e-12 or not 0 <= round(idx) <= 2 * two_j or round(idx) % 2:
        raise DomainError(f"m={m} is not a magnetic number of j={j}")
    v = np.zeros(two_j + 1)
    v[int(round(idx)) // 2] = 1.0
    return ReducedState(scenario, v, N, j=j)


def decompose_single_excitation(N: int) -> tuple[float, float]:
    """Amplitudes of |e>|g>^{N-1} on the j = N/2 and j = N/2 - 1 sectors."""
    if N < 2:
        raise ScenarioError("the two-sector decomposition needs N >= 2")
    return 1.0 / math.sqrt(N), math.sqrt((N - 1) / N)
