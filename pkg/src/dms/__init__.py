"""Pulsed excitation of N degenerate ground states coupled to one excited state.

Analytic transfer matrices for the six exactly soluble pulse/detuning
families, inverse design of coupling ratios / areas / detunings that create
target superpositions, and an independent time-domain integrator that checks
every closed form at desk scale.
"""

from .core import (CayleyKlein, CouplingSet, DetuningProfile, ModelSpec,
                   PopulationDistribution, Propagator, PulseShape, StateVector,
                   pulse_area, rms_area)
from .morris_shore import (EigenvalueSet, MsBasis, build_ms_basis, eigenvalues,
                           hamiltonian, transform_hamiltonian)
from .models import (cayley_klein, gamma, lz_lambda, rz_abs_a_squared,
                     rz_integer_alpha_a)
from .propagator import (DOGrid, apply_propagator, assemble_propagator,
                         do_probabilities, lz_populations, lz_propagator_entries,
                         population_ratio, populations_from_excited,
                         populations_from_ground)
from .dynamics import (IntegrationConfig, IntegrationError, TrajectoryRecord,
                       integrate, lz_populations_oracle, oracle_cayley_klein,
                       peak_excited_population)
from .design import (DesignTarget, RzRootReport, VerifyResult, design_couplings,
                     resonance_areas, rz_minus_one_detunings, verify_design)

__version__ = "0.1.0"

__all__ = [
    "CouplingSet", "PulseShape", "DetuningProfile", "ModelSpec", "CayleyKlein",
    "Propagator", "PopulationDistribution", "StateVector", "pulse_area", "rms_area",
    "MsBasis", "EigenvalueSet", "hamiltonian", "build_ms_basis",
    "transform_hamiltonian", "eigenvalues",
    "gamma", "cayley_klein", "rz_abs_a_squared", "rz_integer_alpha_a", "lz_lambda",
    "assemble_propagator", "apply_propagator", "populations_from_ground",
    "populations_from_excited", "population_ratio", "lz_propagator_entries",
    "lz_populations", "DOGrid", "do_probabilities",
    "IntegrationConfig", "IntegrationError", "TrajectoryRecord", "integrate",
    "oracle_cayley_klein", "peak_excited_population", "lz_populations_oracle",
    "DesignTarget", "RzRootReport", "VerifyResult", "design_couplings",
    "resonance_areas", "rz_minus_one_detunings", "verify_design",
    "__version__",
]
