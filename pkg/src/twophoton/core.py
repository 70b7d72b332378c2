"""Model parameters, pair kinematics and the dimensionless "bar" units.

Natural units throughout: the group velocity and hbar are both 1, so a
photon momentum k is also its energy.  The emitter sits at x = 0 and couples
to a single chiral (right-moving) continuum with strength V; the decay rate
into that continuum is Gamma = V**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

__all__ = [
    "InvalidParameterError",
    "DegenerateLabelError",
    "ConfigurationError",
    "NotAsymptoticError",
    "ModelParams",
    "PairKinematics",
    "make_params",
    "even_odd_coupling",
    "kinematics_from_momenta",
    "to_bar",
    "from_bar",
]


class InvalidParameterError(ValueError):
    """A physical parameter is outside its allowed range."""


class DegenerateLabelError(ValueError):
    """An eigenstate label sits on the excluded k == p diagonal."""


class ConfigurationError(ValueError):
    """A numerical configuration (grid, cutoffs, packet placement) is invalid."""


class NotAsymptoticError(RuntimeError):
    """A wave packet still overlaps the coupling axes."""


@dataclass(frozen=True)
class ModelParams:
    """Emitter transition energy ``omega`` and decay rate ``gamma``.

    ``coupling_v`` is derived from ``gamma`` and never stored separately.
    """

    omega: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma!r}")
        if not math.isfinite(self.omega):
            raise InvalidParameterError(f"omega must be finite, got {self.omega!r}")

    @property
    def coupling_v(self) -> float:
        return math.sqrt(self.gamma)

    @property
    def half_gamma(self) -> float:
        return 0.5 * self.gamma


def make_params(omega: float, gamma: float) -> ModelParams:
    return ModelParams(float(omega), float(gamma))


def even_odd_coupling(v_bar: float) -> float:
    """One-mode coupling V from the bidirectional-waveguide coupling.

    Folding right- and left-movers into even/odd combinations leaves only
    the even channel coupled, with strength sqrt(2) * v_bar.
    """
    if not v_bar > 0:
        raise InvalidParameterError(f"v_bar must be positive, got {v_bar!r}")
    return math.sqrt(2.0) * v_bar


@dataclass(frozen=True)
class PairKinematics:
    """Plane-wave label of a photon pair, stored with ``k <= p``."""

    k: float
    p: float

    def __post_init__(self):
        if self.k > self.p:
            raise InvalidParameterError("PairKinematics requires k <= p; use kinematics_from_momenta")

    @property
    def e_total(self) -> float:
        return self.k + self.p

    @property
    def delta(self) -> float:
        return 0.5 * (self.k - self.p)

    @classmethod
    def from_energy(cls, e_total: float, delta: float) -> "PairKinematics":
        """Build from total energy and relative half-momentum (``delta <= 0``)."""
        if delta > 0:
            delta = -delta
        return cls(0.5 * e_total + delta, 0.5 * e_total - delta)


def kinematics_from_momenta(k: float, p: float) -> PairKinematics:
    k, p = float(k), float(p)
    return PairKinematics(min(k, p), max(k, p))


Quantity = Literal["energy", "detuning", "length", "amplitude"]


def to_bar(params: ModelParams, quantity: Quantity, value):
    """Convert to the dimensionless units used for figure data.

    energy: (E - 2*omega) / (gamma/2); detuning: delta / (gamma/2);
    length: (gamma/2) * x; amplitude: (gamma/2) * B.
    """
    h = params.half_gamma
    if quantity == "energy":
        return (value - 2.0 * params.omega) / h
    if quantity == "detuning":
        return value / h
    if quantity == "length":
        return value * h
    if quantity == "amplitude":
        return value * h
    raise ValueError(f"unknown quantity {quantity!r}")


def from_bar(params: ModelParams, quantity: Quantity, value):
    """Inverse of :func:`to_bar`."""
    h = params.half_gamma
    if quantity == "energy":
        return value * h + 2.0 * params.omega
    if quantity == "detuning":
        return value * h
    if quantity == "length":
        return value / h
    if quantity == "amplitude":
        return value / h
    raise ValueError(f"unknown quantity {quantity!r}")
