"""Two-photon transport through a two-level emitter in a chiral waveguide.

Closed-form one- and two-photon S-matrix, the {W, B} scattering eigenbasis
with its numerical verification, and an independent time-domain oracle.
"""

from .core import (ConfigurationError, DegenerateLabelError, InvalidParameterError, ModelParams,
                   NotAsymptoticError, PairKinematics, even_odd_coupling, from_bar,
                   kinematics_from_momenta, make_params, to_bar)
from .eigenbasis import (NORM_S, BasisPoint, EigenstateLabel, eigenvalue_B, eigenvalue_W, eval_A, eval_B,
                         eval_S, eval_W, overlap_A_with_B, overlap_S_with_B)
from .eigenstates import (build_B_eigenstate, build_W_eigenstate, check_boundary_conditions,
                          quadrant_ratio)
from .single_photon import SinglePhotonAmplitudes, amplitudes, excitation_e, transmission_t
from .smatrix import (SpectralWavePacket, apply_smatrix, background_B, deviation_at_origin,
                      deviation_map, fluorescence_map, outstate_relative_wavefunction, smatrix_element)

__all__ = [
    "ConfigurationError", "DegenerateLabelError", "InvalidParameterError", "NotAsymptoticError",
    "ModelParams", "PairKinematics", "make_params", "even_odd_coupling", "kinematics_from_momenta",
    "to_bar", "from_bar",
    "SinglePhotonAmplitudes", "transmission_t", "excitation_e", "amplitudes",
    "NORM_S", "BasisPoint", "EigenstateLabel", "eval_S", "eval_A", "eval_W", "eval_B",
    "eigenvalue_W", "eigenvalue_B", "overlap_S_with_B", "overlap_A_with_B",
    "build_W_eigenstate", "build_B_eigenstate", "check_boundary_conditions", "quadrant_ratio",
    "SpectralWavePacket", "apply_smatrix", "background_B", "smatrix_element", "deviation_at_origin",
    "deviation_map", "fluorescence_map", "outstate_relative_wavefunction",
]
