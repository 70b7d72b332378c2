"""Piecewise plane-wave construction of two-photon scattering eigenstates.

Only the half plane x1 <= x2 is stored; the other half follows from Bose
symmetry.  Because photons move right, photon 2 crosses the emitter first:

    III: x1 < x2 < 0   (incoming)
    II : x1 < 0 < x2   (one photon through)
    I  : 0 < x1 < x2   (outgoing)

Each region holds terms ``coef * exp(i q1 x1 + i q2 x2)``; complex momenta are
allowed, which is how the bound state fits the same form.  The emitter
amplitude e(x) is stored separately on x < 0 and x > 0 as terms
``coef * exp(i q x)`` so its derivative is exact.

Crossing x2 = 0 turns a term with momentum q2 for photon 2 into t_{q2} times
itself, and leaves e(x1) = 2 e_{q2} * (incoming coefficient) behind.  Crossing
x1 = 0 does the same with q1.  Continuity of e at the origin is *not* imposed
by that propagation; it is what fixes the ratio B3/A3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, DegenerateLabelError, ModelParams, PairKinematics
from .eigenbasis import BasisPoint, eigenvalue_B, eigenvalue_W, eval_A, eval_S
from .single_photon import excitation_e, transmission_t

__all__ = [
    "PlaneWaveTerms",
    "PiecewiseEigenstate",
    "ResidualReport",
    "propagate",
    "build_W_eigenstate",
    "build_B_eigenstate",
    "check_boundary_conditions",
    "quadrant_ratio",
    "s_a_projection",
]


@dataclass(frozen=True)
class PlaneWaveTerms:
    """sum_j coef[j] * exp(i q1[j] x1 + i q2[j] x2)."""

    coef: tuple
    q1: tuple
    q2: tuple

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for c, a, b in zip(self.coef, self.q1, self.q2):
            out += c * np.exp(1j * (a * x1 + b * x2))
        return out


@dataclass(frozen=True)
class ExpTerms:
    """sum_j coef[j] * exp(i q[j] x), with exact derivative."""

    coef: tuple
    q: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, q in zip(self.coef, self.q):
            out += c * np.exp(1j * q * x)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, q in zip(self.coef, self.q):
            out += 1j * q * c * np.exp(1j * q * x)
        return out


@dataclass(frozen=True)
class PiecewiseEigenstate:
    e_total: float
    quadrant_amplitudes: dict = field(repr=False)
    e_left: ExpTerms = field(repr=False)
    e_right: ExpTerms = field(repr=False)
    eigenvalue_claimed: complex = 1.0

    def g_region(self, region: str, x1, x2):
        """g from the closed form of one region (used for one-sided limits)."""
        return self.quadrant_amplitudes[region](x1, x2)

    def g(self, x1, x2):
        """g on the whole plane, symmetrised; axes take the region above them."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        lo = np.minimum(x1, x2)
        hi = np.maximum(x1, x2)
        out = np.where(hi < 0, self.g_region("III", lo, hi), 0j)
        out = np.where((lo < 0) & (hi >= 0), self.g_region("II", lo, hi), out)
        return np.where(lo >= 0, self.g_region("I", lo, hi), out)

    def e(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, self.e_left(x), self.e_right(x))


@dataclass(frozen=True)
class ResidualReport:
    """Relative residuals of the jump, emitter and continuity conditions."""

    jump_x2_axis: float
    emitter_x2_axis: float
    jump_x1_axis: float
    emitter_x1_axis: float
    continuity: float

    @property
    def max_relative(self) -> float:
        return max(self.jump_x2_axis, self.emitter_x2_axis, self.jump_x1_axis,
                   self.emitter_x1_axis, self.continuity)


def propagate(params: ModelParams, k, p, b3: complex, a3: complex) -> PiecewiseEigenstate:
    """Carry region-III amplitudes ``b3 e^{i(k x1 + p x2)} + a3 e^{i(p x1 + k x2)}``
    through both axes using the jump and emitter equations."""
    tk, tp = transmission_t(params, k), transmission_t(params, p)
    ek, ep = excitation_e(params, k), excitation_e(params, p)
    regions = {
        "III": PlaneWaveTerms((b3, a3), (k, p), (p, k)),
        "II": PlaneWaveTerms((tp * b3, tk * a3), (k, p), (p, k)),
        "I": PlaneWaveTerms((tk * tp * b3, tk * tp * a3), (k, p), (p, k)),
    }
    e_left = ExpTerms((2.0 * ep * b3, 2.0 * ek * a3), (k, p))
    e_right = ExpTerms((2.0 * ek * tp * b3, 2.0 * ep * tk * a3), (p, k))
    return PiecewiseEigenstate(complex(k + p).real, regions, e_left, e_right, complex(tk * tp))


def build_W_eigenstate(params: ModelParams, kin: PairKinematics) -> PiecewiseEigenstate:
    """Scattering eigenstate W_{k,p}, normalised like the W basis function.

    Region III carries B3 = (k - p - i G)/(2 pi sqrt2 N) and
    A3 = (k - p + i G)/(2 pi sqrt2 N), N = sqrt((k - p)^2 + G^2).
    """
    k, p = kin.k, kin.p
    if not k < p:
        raise DegenerateLabelError("W eigenstate needs k < p")
    g = params.gamma
    n = math.hypot(k - p, g) * 2.0 * math.pi * math.sqrt(2.0)
    state = propagate(params, k, p, (k - p - 1j * g) / n, (k - p + 1j * g) / n)
    return PiecewiseEigenstate(state.e_total, state.quadrant_amplitudes, state.e_left,
                               state.e_right, complex(eigenvalue_W(params, kin)))


def build_B_eigenstate(params: ModelParams, e_total: float) -> PiecewiseEigenstate:
    """Bound state with region-III form exp(i E xc - G|x|/2).

    In x1 < x2 this is a single plane wave with complex momenta
    k = E/2 - i G/2 (photon 1) and p = E/2 + i G/2 (photon 2).  With
    d = E/2 - omega the propagated amplitudes simplify to

        II : d/(d + i G),  I : t_E,  e(x<0), e(x>0) : 2 sqrt(G)/(d + i G)

    which stay finite at d = 0, where t_k alone has a pole.
    """
    g = params.gamma
    k = 0.5 * e_total - 0.5j * g
    p = 0.5 * e_total + 0.5j * g
    d = 0.5 * e_total - params.omega
    t_p = d / (d + 1j * g)
    t_e = complex(eigenvalue_B(params, e_total))
    e_coef = 2.0 * math.sqrt(g) / (d + 1j * g)
    regions = {
        "III": PlaneWaveTerms((1.0 + 0j,), (k,), (p,)),
        "II": PlaneWaveTerms((t_p,), (k,), (p,)),
        "I": PlaneWaveTerms((t_e,), (k,), (p,)),
    }
    return PiecewiseEigenstate(float(e_total), regions, ExpTerms((e_coef,), (k,)),
                               ExpTerms((e_coef,), (p,)), t_e)


def _rel(res, *terms):
    scale = np.max(np.abs(np.stack(terms)), axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max(np.abs(res) / scale))


def check_boundary_conditions(params: ModelParams, state: PiecewiseEigenstate, sample_points) -> ResidualReport:
    """Residuals of the axis conditions at ``|s|`` for every sample ``s``.

    On x2 = 0 (x1 = -|s|):
        -i (g(x1, 0+) - g(x1, 0-)) + (V/2) e(x1)
        (-i d/dx1 - (E - omega)) e(x1) + V (g(x1, 0+) + g(x1, 0-))
    and the mirrored pair on x1 = 0 (x2 = +|s|), plus e(0-) - e(0+).
    Each residual is divided by the largest addend at that point.
    """
    if not {"I", "II", "III"} <= set(state.quadrant_amplitudes):
        raise ConfigurationError("state lacks one of the regions I, II, III")
    s = np.abs(np.asarray(sample_points, dtype=float))
    if s.size == 0 or np.any(s == 0):
        raise ConfigurationError("sample points must be non-zero")
    v = params.coupling_v
    ew = state.e_total - params.omega

    x1 = -s
    g3 = state.g_region("III", x1, 0.0)
    g2a = state.g_region("II", x1, 0.0)
    e1 = state.e_left(x1)
    de1 = state.e_left.derivative(x1)
    jump_a = -1j * (g2a - g3) + 0.5 * v * e1
    emit_a = -1j * de1 - ew * e1 + v * (g2a + g3)

    x2 = s
    g2b = state.g_region("II", 0.0, x2)
    g1 = state.g_region("I", 0.0, x2)
    e2 = state.e_right(x2)
    de2 = state.e_right.derivative(x2)
    jump_b = -1j * (g1 - g2b) + 0.5 * v * e2
    emit_b = -1j * de2 - ew * e2 + v * (g1 + g2b)

    el, er = complex(state.e_left(0.0)), complex(state.e_right(0.0))
    cont = abs(el - er) / max(abs(el), abs(er), 1e-300)
    return ResidualReport(
        jump_x2_axis=_rel(jump_a, g2a, g3, 0.5 * v * e1),
        emitter_x2_axis=_rel(emit_a, de1, ew * e1, v * g2a, v * g3),
        jump_x1_axis=_rel(jump_b, g1, g2b, 0.5 * v * e2),
        emitter_x1_axis=_rel(emit_b, de2, ew * e2, v * g1, v * g2b),
        continuity=cont,
    )


def quadrant_ratio(state: PiecewiseEigenstate) -> complex:
    """Ratio of region-I to region-III coefficients.

    Raises if the terms do not share a single common ratio.
    """
    c1 = np.asarray(state.quadrant_amplitudes["I"].coef)
    c3 = np.asarray(state.quadrant_amplitudes["III"].coef)
    mask = np.abs(c3) > 0
    ratios = c1[mask] / c3[mask]
    if not np.allclose(ratios, ratios[0], rtol=1e-12, atol=0.0):
        raise ValueError("region I is not a uniform multiple of region III")
    return complex(ratios[0])


def s_a_projection(params: ModelParams, kin: PairKinematics, pt: BasisPoint):
    """(k - p) S + i G A at ``pt``, for proportionality checks in region III."""
    return (kin.k - kin.p) * eval_S(kin, pt) + 1j * params.gamma * eval_A(kin, pt)
