"""Voltage-biased electromechanics coupled to weakly anharmonic circuits.

Subpackage map:

* :mod:`mechqed.operators` - truncated-Fock-space matrices and expectations
* :mod:`mechqed.electromech` - equivalent circuit of the biased oscillator
* :mod:`mechqed.model` - quantization, Hamiltonians, drives, rotating frame
* :mod:`mechqed.solver` - Liouvillians, steady states, spectrum sweeps
* :mod:`mechqed.analysis` - closed-form regime results and requirement tables
* :mod:`mechqed.config` / :mod:`mechqed.cli` - config-driven command line
"""

from .electromech import (
    EquivalentCircuit,
    MechanicalSpec,
    PullInError,
    equivalent_circuit,
    pull_in_voltage,
    static_equilibrium,
    thermal_occupation,
)
from .model import (
    DriveSpec,
    ModeSpec,
    ThreeBodyParams,
    TwoBodyParams,
    TwoBodySystem,
    build_three_body_hamiltonian,
    build_two_body_hamiltonian,
    quantize_two_body,
    rotating_frame,
)
from .solver import (
    LindbladSystem,
    SpectrumResult,
    SteadyStateError,
    collapse_operators,
    liouvillian,
    spectrum_sweep,
    steady_state,
)

__all__ = [
    "DriveSpec",
    "EquivalentCircuit",
    "LindbladSystem",
    "MechanicalSpec",
    "ModeSpec",
    "PullInError",
    "SpectrumResult",
    "SteadyStateError",
    "ThreeBodyParams",
    "TwoBodyParams",
    "TwoBodySystem",
    "build_three_body_hamiltonian",
    "build_two_body_hamiltonian",
    "collapse_operators",
    "equivalent_circuit",
    "liouvillian",
    "pull_in_voltage",
    "quantize_two_body",
    "rotating_frame",
    "spectrum_sweep",
    "static_equilibrium",
    "steady_state",
    "thermal_occupation",
]

__version__ = "0.1.0"
