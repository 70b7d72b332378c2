"""Single-photon scattering amplitudes of the chiral one-mode model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams

__all__ = ["SinglePhotonAmplitudes", "transmission_t", "excitation_e", "amplitudes"]


@dataclass(frozen=True)
class SinglePhotonAmplitudes:
    t: complex
    e_exc: complex


def transmission_t(params: ModelParams, k):
    """Transmission amplitude (k - omega - i gamma/2) / (k - omega + i gamma/2).

    Unit modulus for real ``k``; equals -1 on resonance.  Accepts arrays and
    complex momenta (the bound-state construction evaluates it off-axis).
    """
    d = np.asarray(k) - params.omega
    h = 0.5j * params.gamma
    return (d - h) / (d + h)


def excitation_e(params: ModelParams, k):
    """Emitter excitation amplitude sqrt(gamma) / (k - omega + i gamma/2)."""
    d = np.asarray(k) - params.omega
    return np.sqrt(params.gamma) / (d + 0.5j * params.gamma)


def amplitudes(params: ModelParams, k: float) -> SinglePhotonAmplitudes:
    return SinglePhotonAmplitudes(complex(transmission_t(params, k)), complex(excitation_e(params, k)))
