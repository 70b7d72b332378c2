"""Free two-photon bases (S, A) and the scattering eigenbasis (W, B).

Coordinates: ``xc = (x1 + x2)/2`` and ``x = x1 - x2``; a pair label has total
energy ``E = k + p`` and relative half-momentum ``delta = (k - p)/2 <= 0``.
Every basis function factorises as

    exp(i E xc) / sqrt(2 pi)  *  (relative part in x),

and the relative parts (``rel_*`` below) are even in x and independent of E.
That factorisation is what the spectral machinery in :mod:`smatrix` and
:mod:`verification` is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import DegenerateLabelError, ModelParams, PairKinematics
from .single_photon import transmission_t

__all__ = [
    "NORM_S",
    "BasisPoint",
    "EigenstateLabel",
    "eval_S",
    "eval_A",
    "eval_W",
    "eval_B",
    "eigenvalue_W",
    "eigenvalue_B",
    "w_coefficients",
    "overlap_S_with_B",
    "overlap_A_with_B",
    "rel_s",
    "rel_a",
    "rel_w",
    "rel_b",
    "project_relative",
    "synthesize_relative",
]

#: prefactor sqrt(2)/(2 pi) of the symmetric plane-wave basis
NORM_S = math.sqrt(2.0) / (2.0 * math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class BasisPoint:
    """A point (or broadcastable arrays of points) of the two-photon plane."""

    x1: object
    x2: object

    @property
    def xc(self):
        return 0.5 * (np.asarray(self.x1) + np.asarray(self.x2))

    @property
    def x(self):
        return np.asarray(self.x1) - np.asarray(self.x2)

    @classmethod
    def from_relative(cls, xc, x) -> "BasisPoint":
        xc = np.asarray(xc)
        x = np.asarray(x)
        return cls(xc + 0.5 * x, xc - 0.5 * x)

    def swapped(self) -> "BasisPoint":
        return BasisPoint(self.x2, self.x1)


@dataclass(frozen=True)
class EigenstateLabel:
    """Either a Bethe-type scattering label W(k < p) or a bound-state label B(E)."""

    kind: Literal["W", "B"]
    kin: PairKinematics | None = None
    e_total: float | None = None

    def __post_init__(self):
        if self.kind == "W":
            if self.kin is None:
                raise ValueError("W label needs kinematics")
            if not self.kin.k < self.kin.p:
                raise DegenerateLabelError("W labels require k < p strictly")
        elif self.kind == "B":
            if self.e_total is None:
                raise ValueError("B label needs e_total")
        else:
            raise ValueError(f"unknown label kind {self.kind!r}")


# -- relative-coordinate parts ------------------------------------------------

def rel_s(delta, x):
    """cos(delta x)/sqrt(pi); delta-normalised on delta < 0."""
    return np.cos(np.multiply.outer(delta, x)) * _INV_SQRT_PI


def rel_a(delta, x):
    """i sgn(x) sin(delta x)/sqrt(pi)."""
    return 1j * np.sign(x) * np.sin(np.multiply.outer(delta, x)) * _INV_SQRT_PI


def w_coefficients(params: ModelParams, delta):
    """Coefficients (c_s, c_a) of the W state on the (S, A) pair.

    c_s = (k - p)/N, c_a = i gamma/N with N = sqrt((k - p)**2 + gamma**2);
    |c_s|**2 + |c_a|**2 == 1.
    """
    kp = 2.0 * np.asarray(delta, dtype=float)
    n = np.hypot(kp, params.gamma)
    return kp / n, 1j * params.gamma / n


def rel_w(params: ModelParams, delta, x):
    """Relative part of W; shape ``delta.shape + x.shape``."""
    cs, ca = w_coefficients(params, delta)
    pad = (1,) * np.ndim(x)
    cs = np.reshape(cs, np.shape(cs) + pad)
    ca = np.reshape(ca, np.shape(ca) + pad)
    return cs * rel_s(delta, x) + ca * rel_a(delta, x)


def rel_b(params: ModelParams, x):
    """sqrt(gamma/2) exp(-gamma |x| / 2); unit norm on the real line."""
    g = params.gamma
    return math.sqrt(0.5 * g) * np.exp(-0.5 * g * np.abs(x))


# -- full two-photon basis functions -------------------------------------------

def _carrier(e_total, xc):
    return np.exp(1j * e_total * np.asarray(xc))


def eval_S(kin: PairKinematics, pt: BasisPoint):
    """<x1, x2 | S_{k,p}> = sqrt(2)/(2 pi) exp(i E xc) cos(delta x)."""
    return NORM_S * _carrier(kin.e_total, pt.xc) * np.cos(kin.delta * pt.x)


def eval_A(kin: PairKinematics, pt: BasisPoint):
    """<x1, x2 | A_{k,p}> = i sqrt(2)/(2 pi) sgn(x) exp(i E xc) sin(delta x)."""
    x = pt.x
    return 1j * NORM_S * np.sign(x) * _carrier(kin.e_total, pt.xc) * np.sin(kin.delta * x)


def eval_W(params: ModelParams, kin: PairKinematics, pt: BasisPoint):
    if not kin.k < kin.p:
        raise DegenerateLabelError("W state undefined for k == p")
    cs, ca = w_coefficients(params, kin.delta)
    return cs * eval_S(kin, pt) + ca * eval_A(kin, pt)


def eval_B(params: ModelParams, e_total: float, pt: BasisPoint):
    """sqrt(gamma/(4 pi)) exp(i E xc - gamma |x| / 2)."""
    g = params.gamma
    return math.sqrt(g / (4.0 * math.pi)) * _carrier(e_total, pt.xc) * np.exp(-0.5 * g * np.abs(pt.x))


def eigenvalue_W(params: ModelParams, kin: PairKinematics):
    if not kin.k < kin.p:
        raise DegenerateLabelError("W eigenvalue undefined for k == p")
    return transmission_t(params, kin.k) * transmission_t(params, kin.p)


def eigenvalue_B(params: ModelParams, e_total):
    d = np.asarray(e_total) - 2.0 * params.omega
    g2 = 2j * params.gamma
    return (d - g2) / (d + g2)


def _delta_of(kin_out) -> float:
    return kin_out.delta if isinstance(kin_out, PairKinematics) else float(kin_out)


def overlap_S_with_B(params: ModelParams, kin_out, e_total: float) -> complex:
    """Coefficient of delta(E - E') in <S_{E', delta'} | B_E>.

    The centre-of-mass integral gives 2 pi delta(E - E'); the relative integral
    is the cosine transform of exp(-gamma |x| / 2), gamma / (delta'**2 + gamma**2/4).
    ``e_total`` only enters through the delta function and is accepted for
    symmetry with the call sites.  ``kin_out`` may also be a bare delta'
    value, which allows probing delta' > 0.
    """
    g = params.gamma
    d = _delta_of(kin_out)
    return complex(NORM_S * math.sqrt(g / (4.0 * math.pi)) * 2.0 * math.pi * g / (d * d + 0.25 * g * g))


def overlap_A_with_B(params: ModelParams, kin_out, e_total: float) -> complex:
    """Coefficient of delta(E - E') in <A_{E', delta'} | B_E>; odd in delta'."""
    g = params.gamma
    d = _delta_of(kin_out)
    return -1j * NORM_S * math.sqrt(g / (4.0 * math.pi)) * 2.0 * math.pi * 2.0 * d / (d * d + 0.25 * g * g)


def project_relative(params: ModelParams, values, x_nodes, x_weights, deltas):
    """Project an even relative function onto {w_delta} and b.

    ``values`` holds f at half-line quadrature nodes ``x_nodes >= 0`` (last
    axis); evenness doubles the half-line integral.  Returns ``(c_w, c_b)``
    with ``c_w`` of shape ``values.shape[:-1] + deltas.shape``.
    """
    fw = 2.0 * np.asarray(values) * x_weights
    w = rel_w(params, np.asarray(deltas), x_nodes)
    c_w = fw @ np.conj(w).T
    c_b = fw @ rel_b(params, x_nodes)
    return c_w, c_b


def synthesize_relative(params: ModelParams, c_w, deltas, delta_weights, c_b, x):
    """Inverse of :func:`project_relative`: sum_delta w_delta(x) c_w h_delta + b(x) c_b."""
    w = rel_w(params, np.asarray(deltas), x)
    out = (np.asarray(c_w) * delta_weights) @ w
    if c_b is not None:
        out = out + np.multiply.outer(c_b, rel_b(params, x))
    return out
