import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collective_coherence import (
    BathParams,
    ContractError,
    DomainError,
    ScenarioError,
    build_coherent_generator,
    build_dicke_generator,
    build_generator,
    build_incoherent_generator,
    decompose_single_excitation,
    excitation_degeneracy,
    initial_vector,
    spin_coupling_coefficient,
)
from collective_coherence import fullspace_oracle as oracle
from collective_coherence import product_basis
from collective_coherence.reduced_model import ReducedState, incoherent_index


def test_bath_params():
    b = BathParams.from_tau(1.0)
    assert b.nu == 0.5 and b.rate_down == 4.0 and b.rate_up == 2.0
    assert BathParams.from_nu(0.5).tau == pytest.approx(1.0)
    assert math.isinf(BathParams.from_nu(1.0).tau)
    with pytest.raises(DomainError):
        BathParams.from_tau(-0.1)
    with pytest.raises(DomainError):
        BathParams.from_nu(1.5)


def test_excitation_degeneracy():
    assert excitation_degeneracy(4, 2) == 4
    assert excitation_degeneracy(7, 3) == 12
    assert excitation_degeneracy(7, 0) == 0
    assert excitation_degeneracy(7, 7) == 0
    with pytest.raises(DomainError):
        excitation_degeneracy(3, 4)


def test_spin_coupling_coefficient():
    assert spin_coupling_coefficient(1, 0, "-") == pytest.approx(math.sqrt(2))
    assert spin_coupling_coefficient(0.5, 0.5, "-") == pytest.approx(1.0)
    assert spin_coupling_coefficient(1, 1, "+") == 0.0
    assert spin_coupling_coefficient(1, -1, "-") == 0.0
    with pytest.raises(DomainError):
        spin_coupling_coefficient(1, 0.5, "+")


@pytest.mark.parametrize("N", [2, 3, 4])
def test_spin_coupling_matches_ladder_norm(N):
    ops = oracle.build_collective_operators(N)
    j = N / 2
    for n in range(N + 1):
        m = n - j
        v = product_basis.uniform_ket(N, n)
        assert np.linalg.norm(ops.J_minus @ v) == pytest.approx(spin_coupling_coefficient(j, m, "-"))
        assert np.linalg.norm(ops.J_plus @ v) == pytest.approx(spin_coupling_coefficient(j, m, "+"))


def test_dimensions():
    assert build_incoherent_generator(7, 0.5).dim == 20
    assert build_coherent_generator(7, 0.5).dim == 8
    assert build_dicke_generator(1.5, 0.5).dim == 4
    assert build_generator("dicke", 5, 0.5, j=1.5).j == 1.5


def test_incoherent_two_qubit_first_column():
    # L[Λ_1] at N=2, hand-derived from the master equation
    for tau in (0.0, 0.3, 2.0):
        col = build_incoherent_generator(2, tau).matrix[:, 0]
        expected = [-2 * (1 + 2 * tau), 2 * tau, 2 * (1 + tau), 0.0, -(1 + 2 * tau)]
        np.testing.assert_allclose(col, expected, atol=1e-14)


def test_coherent_two_qubit_tau_one():
    M = build_coherent_generator(2, 1.0).matrix
    np.testing.assert_allclose(np.diag(M), [-4.0, -12.0, -8.0], atol=1e-14)
    np.testing.assert_allclose(M[:, 1], [8.0, -12.0, 4.0], atol=1e-14)


def test_single_qubit_decay():
    M = build_coherent_generator(1, 0.0).matrix
    np.testing.assert_allclose(M, [[0.0, 2.0], [0.0, -2.0]])


@pytest.mark.parametrize("N", range(1, 9))
@pytest.mark.parametrize("tau", [0.0, 0.4, 3.0])
def test_symmetric_dicke_equals_coherent(N, tau):
    D = build_dicke_generator(N / 2, tau, n_qubits=N).matrix
    C = build_coherent_generator(N, tau).matrix
    assert np.abs(D - C).max() <= 1e-12


def test_dicke_spin_half_steady_ratio():
    for tau in (0.2, 1.0, 5.0):
        M = build_dicke_generator(0.5, tau).matrix
        # stationary populations (lower, upper) with upper/lower = nu
        v = np.array([1.0, tau / (1 + tau)])
        assert np.abs(M @ v).max() <= 1e-12


@pytest.mark.parametrize("N", list(range(2, 65, 7)) + [64])
@pytest.mark.parametrize("tau", [0.0, 0.1, 1.0, 10.0])
def test_trace_preservation(N, tau):
    G = build_incoherent_generator(N, tau)
    assert np.abs(G.trace_row() @ G.matrix).max() <= 1e-12
    Gc = build_coherent_generator(N, tau)
    assert np.abs(Gc.matrix.sum(axis=0)).max() <= 1e-12


@pytest.mark.parametrize("N", [2, 5, 12, 20, 40, 64])
@pytest.mark.parametrize("tau", [0.0, 0.1, 1.0, 10.0])
def test_spectrum_in_left_half_plane(N, tau):
    for G in (build_incoherent_generator(N, tau), build_coherent_generator(N, tau)):
        assert np.linalg.eigvals(G.matrix).real.max() <= 1e-10


def test_no_upward_transfer_at_zero_temperature():
    N = 5
    M = build_incoherent_generator(N, 0.0).matrix
    level = np.concatenate([np.arange(1, N + 1), np.arange(0, N), np.arange(1, N) + 0.5])
    rises = level[:, None] > level[None, :] + 0.75
    assert np.all(M[rises] == 0.0)
    assert np.all(np.triu(build_coherent_generator(N, 0.0).matrix, 1) >= 0)
    assert np.all(np.tril(build_coherent_generator(N, 0.0).matrix, -1) == 0)


def test_initial_vectors():
    v = initial_vector("incoherent", 4)
    assert v.coeffs[0] == 1.0 and v.coeffs.sum() == 1.0 and v.coeffs.size == 11
    c = initial_vector("coherent", 4)
    assert c.coeffs[1] == 1.0 and c.coeffs.size == 5
    d = initial_vector("dicke", 4)
    assert d.coeffs[-1] == 1.0 and d.j == 2
    d2 = initial_vector("dicke", 4, j=1, m=-1)
    assert d2.coeffs[0] == 1.0
    with pytest.raises(DomainError):
        initial_vector("dicke", 4, j=1, m=0.5)


def test_domain_errors():
    with pytest.raises(ScenarioError):
        build_incoherent_generator(1, 0.0)
    with pytest.raises((DomainError, ContractError)):
        build_coherent_generator(0, 0.0)
    with pytest.raises(DomainError):
        build_coherent_generator(3, BathParams.from_nu(1.0))
    with pytest.raises(ScenarioError):
        build_dicke_generator(2.5, 0.0, n_qubits=4)


def test_reduced_state_is_frozen():
    s = initial_vector("coherent", 3)
    with pytest.raises(ValueError):
        s.coeffs[0] = 1.0
    with pytest.raises(ContractError):
        ReducedState("coherent", np.zeros(3), 3)


@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_single_excitation_decomposition(N):
    sym_amp, rest_amp = decompose_single_excitation(N)
    e1 = product_basis.site_excited_ket(N, 1, 1)
    assert product_basis.uniform_ket(N, 1) @ e1 == pytest.approx(sym_amp)
    assert oracle.dicke_state(N, N / 2 - 1, 1 - N / 2) @ e1 == pytest.approx(rest_amp)
    assert sym_amp ** 2 + rest_amp ** 2 == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.floats(0.0, 20.0))
def test_generators_conserve_trace_property(N, tau):
    G = build_incoherent_generator(N, tau)
    scale = np.abs(G.matrix).max()
    assert np.abs(G.trace_row() @ G.matrix).max() <= 1e-14 * scale * N
    assert np.all(np.diag(build_coherent_generator(N, tau).matrix) <= 0)
