"""catscale: operational size of photonic superpositions.

The size of a two-component superposition is measured by how well the two
components can be told apart with noise-limited photon counting, calibrated
so that a pair of number states separated by N photons has size N.
"""

from ._kernels import BACKEND, get_backend
from .coarse import (GuessReport, SmearModel, SmearedDensity,
                     bhattacharyya_fidelity, discrete_trace_distance,
                     fock_guess_probability, guess_probability, trace_distance)
from .oracle import (McConfig, McResult, coin_guess_probability,
                     dense_displacement, mc_check, mc_guess_probability)
from .phase import (DephasedJointState, NegativityReport,
                    PhaseResolutionReport, TwoComponentEntangledState,
                    apply_phase_noise, environment_guess_bound, negativity,
                    pointer_spread_equivalence, required_phase_resolution)
from .sizing import (ConvergenceError, RotationResult, SizeReport,
                     closed_form_size_1a, closed_form_size_2,
                     closed_form_size_3, limit_guess_1b, max_tolerable_sigma,
                     optimize_rotation, size, size_from_sigma)
from .statekit import (CutoffError, FamilyPair, FockAmplitudeVector,
                       GrammarError, PhotonPMF, StateFamilySpec, TailMassError,
                       displace, family_pair, family_state, make_coherent,
                       make_fock, normalized_state, photon_pmf,
                       spin_excitation_pmf, superpose)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "get_backend",
    "GuessReport", "SmearModel", "SmearedDensity", "bhattacharyya_fidelity",
    "discrete_trace_distance", "fock_guess_probability", "guess_probability",
    "trace_distance",
    "McConfig", "McResult", "coin_guess_probability", "dense_displacement",
    "mc_check", "mc_guess_probability",
    "DephasedJointState", "NegativityReport", "PhaseResolutionReport",
    "TwoComponentEntangledState", "apply_phase_noise",
    "environment_guess_bound", "negativity", "pointer_spread_equivalence",
    "required_phase_resolution",
    "ConvergenceError", "RotationResult", "SizeReport", "closed_form_size_1a",
    "closed_form_size_2", "closed_form_size_3", "limit_guess_1b",
    "max_tolerable_sigma", "optimize_rotation", "size", "size_from_sigma",
    "CutoffError", "FamilyPair", "FockAmplitudeVector", "GrammarError",
    "PhotonPMF", "StateFamilySpec", "TailMassError", "displace",
    "family_pair", "family_state", "make_coherent", "make_fock",
    "normalized_state", "photon_pmf", "spin_excitation_pmf", "superpose",
    "__version__",
]
