"""Collective thermal dissipation of N qubits in symmetry-reduced operator subspaces."""
from .errors import (
    CapacityError,
    ContractError,
    DegeneracyError,
    DomainError,
    InvariantError,
    ScenarioError,
    UnsupportedScenario,
    VerificationError,
)
from .observables import (
    ObservableSample,
    coherence_of,
    excitation_probability,
    l1_coherence_full,
    observe,
    reconstruct_density,
)
from .propagator import Eigensystem, Trajectory, evolve, evolve_grid, spectral_decompose
from .reduced_model import (
    BathParams,
    ReducedGenerator,
    ReducedState,
    Scenario,
    build_coherent_generator,
    build_dicke_generator,
    build_generator,
    build_incoherent_generator,
    decompose_single_excitation,
    excitation_degeneracy,
    initial_vector,
    spin_coupling_coefficient,
)
from .steady_analytics import (
    SteadySummary,
    ZeroModes,
    appendix_zero_modes,
    coherent_steady_coherence,
    coherent_steady_probability,
    coherent_steady_state,
    find_tau_c,
    incoherent_steady_coherence,
    incoherent_steady_probability,
    incoherent_steady_state,
    limit_values,
    mixing_weight,
    steady_summary,
    verify_zero_modes,
)

__version__ = "0.1.0"
