"""The two-photon S-matrix.

Matrix elements between symmetric plane waves split into two delta-function
channels (direct and exchange, both weighted by t_k t_p) and a smooth
background B(E, delta1, delta2) multiplying delta(E1 - E2).  The delta
channels are kept symbolic; only the background is ever gridded.

Figure-style maps are produced in bar units (see :func:`twophoton.core.to_bar`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, ModelParams, PairKinematics, from_bar
from .eigenbasis import NORM_S, eigenvalue_B
from .single_photon import transmission_t

__all__ = [
    "SMatrixElementResult",
    "FluorescenceMap",
    "DeviationMap",
    "SpectralWavePacket",
    "background_B",
    "smatrix_element",
    "outstate_relative_wavefunction",
    "interaction_part",
    "deviation_at_origin",
    "fluorescence_map",
    "find_peaks",
    "origin_curvature",
    "deviation_map",
    "zero_contour",
    "apply_smatrix",
    "pair_eigenvalue",
    "apply_smatrix_kernel",
]


@dataclass(frozen=True)
class SMatrixElementResult:
    """<S_{k2,p2}| S |S_{k1,p1}> split into its three channels.

    ``direct_coeff`` multiplies delta(d1 - d2) delta(E1 - E2), ``exchange_coeff``
    multiplies delta(d1 + d2) delta(E1 - E2) and ``background`` multiplies
    delta(E1 - E2) alone.
    """

    direct_coeff: complex
    exchange_coeff: complex
    background: complex


def _z(params: ModelParams, e_total):
    return np.asarray(e_total) - 2.0 * params.omega + 1j * params.gamma


def background_B(params: ModelParams, e_total, delta1, delta2):
    """Background fluorescence amplitude.

    B = (16 i G^2 / pi) z / ([4 d1^2 - z^2][4 d2^2 - z^2]),  z = E - 2 omega + i G.

    Broadcasts over array arguments.  The poles sit at complex momenta, so the
    value is finite for all real inputs.
    """
    g = params.gamma
    z = _z(params, e_total)
    z2 = z * z
    d1 = np.asarray(delta1)
    d2 = np.asarray(delta2)
    return (16j * g * g / math.pi) * z / ((4.0 * d1 * d1 - z2) * (4.0 * d2 * d2 - z2))


def smatrix_element(params: ModelParams, kin_in: PairKinematics, kin_out: PairKinematics) -> SMatrixElementResult:
    tt = complex(transmission_t(params, kin_in.k) * transmission_t(params, kin_in.p))
    b = complex(background_B(params, kin_in.e_total, kin_in.delta, kin_out.delta))
    return SMatrixElementResult(direct_coeff=tt, exchange_coeff=tt, background=b)


def pair_eigenvalue(params: ModelParams, e_total, delta):
    """t_k t_p with k = E/2 + delta, p = E/2 - delta (broadcasting)."""
    e = 0.5 * np.asarray(e_total)
    d = np.asarray(delta)
    return transmission_t(params, e + d) * transmission_t(params, e - d)


def interaction_part(params: ModelParams, e1: float, delta1: float, x):
    """Correlated part of the scattered relative wave function (without the
    sqrt(2)/(2 pi) prefactor): the amplitude multiplying
    exp(i (E1 - 2 omega)|x|/2 - G |x|/2)."""
    g = params.gamma
    z = _z(params, e1)
    ax = np.abs(np.asarray(x, dtype=float))
    return -(4.0 * g * g / (4.0 * delta1 * delta1 - z * z)) * np.exp(0.5j * z * ax)


def outstate_relative_wavefunction(params: ModelParams, e1: float, delta1: float, x):
    """Relative-coordinate factor of the scattered state for in-state S_{E1, delta1}.

    The full out-state is exp(i E1 xc) times this; even in x.
    """
    tt = pair_eigenvalue(params, e1, delta1)
    x = np.asarray(x, dtype=float)
    return NORM_S * (tt * np.cos(delta1 * x) + interaction_part(params, e1, delta1, x))


def deviation_at_origin(params: ModelParams, e1, delta1):
    """|<x=0|phi>|^2 / (sqrt(2)/(2 pi))^2 - 1; positive means bunching.

    Vectorised over ``e1`` and ``delta1``.
    """
    g = params.gamma
    z = _z(params, e1)
    d1 = np.asarray(delta1)
    amp = pair_eigenvalue(params, e1, d1) - 4.0 * g * g / (4.0 * d1 * d1 - z * z)
    return np.abs(amp) ** 2 - 1.0


# -- figure maps ------------------------------------------------------------------

@dataclass(frozen=True)
class FluorescenceMap:
    """|B_bar|^2 on a (delta1_bar, delta2_bar) grid at fixed E_bar.

    ``values[i, j]`` belongs to ``(delta1_bar_axis[i], delta2_bar_axis[j])``.
    """

    e_bar: float
    delta1_bar_axis: np.ndarray
    delta2_bar_axis: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class DeviationMap:
    """Normalised deviation at x = 0; ``values[i, j]`` at ``(e1_bar_axis[i], delta1_bar_axis[j])``."""

    e1_bar_axis: np.ndarray
    delta1_bar_axis: np.ndarray
    values: np.ndarray


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ConfigurationError(f"{name} must be a non-empty 1-D grid")
    if not np.all(np.isfinite(axis)):
        raise ConfigurationError(f"{name} must be finite")
    if axis.size > 1 and np.any(np.diff(axis) <= 0):
        raise ConfigurationError(f"{name} must be strictly increasing")
    return axis


def _abs_b_bar_sq(params: ModelParams, e_bar, d1_bar, d2_bar):
    h = params.half_gamma
    e = from_bar(params, "energy", e_bar)
    b = background_B(params, e, d1_bar * h, d2_bar * h)
    return np.abs(h * b) ** 2


def fluorescence_map(params: ModelParams, e_bar: float, delta_bar_axis, delta2_bar_axis=None) -> FluorescenceMap:
    d1 = _check_axis(delta_bar_axis, "delta_bar_axis")
    d2 = d1 if delta2_bar_axis is None else _check_axis(delta2_bar_axis, "delta2_bar_axis")
    values = _abs_b_bar_sq(params, float(e_bar), d1[:, None], d2[None, :])
    return FluorescenceMap(float(e_bar), d1, d2, values)


def find_peaks(values: np.ndarray, axis0: np.ndarray, axis1: np.ndarray, rel_floor: float = 1e-3):
    """Grid points that are >= all eight neighbours (edges padded with -inf).

    Points below ``rel_floor`` times the global maximum are ignored.  Returned
    as a sorted list of ``(axis0_value, axis1_value)`` tuples.
    """
    v = np.pad(values, 1, constant_values=-np.inf)
    core = v[1:-1, 1:-1]
    is_max = np.ones_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_max &= core >= v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
    is_max &= core >= rel_floor * np.max(values)
    ii, jj = np.nonzero(is_max)
    return sorted((float(axis0[i]), float(axis1[j])) for i, j in zip(ii, jj))


def origin_curvature(params: ModelParams, e_bar: float, step: float) -> float:
    """Normalised second difference of |B_bar|^2 along delta1_bar at the origin.

    Returns F''(0)/F(0) from a centred difference with spacing ``step``; it
    vanishes when the central peak is flat.
    """
    f = _abs_b_bar_sq(params, e_bar, np.array([-step, 0.0, step]), 0.0)
    return float((f[0] + f[2] - 2.0 * f[1]) / (step * step) / f[1])


def deviation_map(params: ModelParams, e1_bar_axis, delta1_bar_axis) -> DeviationMap:
    eb = _check_axis(e1_bar_axis, "e1_bar_axis")
    db = _check_axis(delta1_bar_axis, "delta1_bar_axis")
    h = params.half_gamma
    e1 = from_bar(params, "energy", eb)
    values = deviation_at_origin(params, e1[:, None], h * db[None, :])
    return DeviationMap(eb, db, values)


def zero_contour(dmap: DeviationMap):
    """Sign changes of the deviation along the delta axis, linearly interpolated.

    Returns an array of ``(e1_bar, delta1_bar)`` rows.
    """
    rows = []
    d = dmap.delta1_bar_axis
    for e, line in zip(dmap.e1_bar_axis, dmap.values):
        s = np.sign(line)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        for i in idx:
            f0, f1 = line[i], line[i + 1]
            rows.append((e, d[i] - f0 * (d[i + 1] - d[i]) / (f1 - f0)))
        rows.extend((e, d[i]) for i in np.nonzero(line == 0)[0])
    return np.array(rows, dtype=float).reshape(-1, 2)


# -- spectral application -----------------------------------------------------------

@dataclass
class SpectralWavePacket:
    """Coefficients of a two-photon state in the {W, B} eigenbasis.

    ``w[i, j]`` is the W coefficient at ``(e_axis[i], delta_axis[j])`` and
    ``b[i]`` the bound-state coefficient at ``e_axis[i]``.  The quadrature
    weights are part of the data, so the norm

        sum |w|^2 e_w d_w + sum |b|^2 e_w

    needs nothing else.
    """

    e_axis: np.ndarray
    e_weights: np.ndarray
    delta_axis: np.ndarray
    delta_weights: np.ndarray
    w: np.ndarray
    b: np.ndarray

    def validate(self):
        ne, nd = np.size(self.e_axis), np.size(self.delta_axis)
        if np.shape(self.e_weights) != (ne,) or np.shape(self.delta_weights) != (nd,):
            raise ConfigurationError("quadrature weights do not match their axes")
        if np.shape(self.w) != (ne, nd) or np.shape(self.b) != (ne,):
            raise ConfigurationError("coefficient arrays do not match the grids")
        if nd and np.max(self.delta_axis) >= 0:
            raise ConfigurationError("W channel grid must lie in delta < 0")

    def channel_norms(self):
        w_norm = float(np.sum(np.abs(self.w) ** 2 * self.e_weights[:, None] * self.delta_weights[None, :]))
        b_norm = float(np.sum(np.abs(self.b) ** 2 * self.e_weights))
        return w_norm, b_norm

    def norm(self) -> float:
        return sum(self.channel_norms())


def apply_smatrix(params: ModelParams, in_packet: SpectralWavePacket) -> SpectralWavePacket:
    """Multiply every eigen-channel by its eigenvalue: t_k t_p on W, t_E on B."""
    in_packet.validate()
    lam = pair_eigenvalue(params, in_packet.e_axis[:, None], in_packet.delta_axis[None, :])
    return SpectralWavePacket(
        e_axis=in_packet.e_axis,
        e_weights=in_packet.e_weights,
        delta_axis=in_packet.delta_axis,
        delta_weights=in_packet.delta_weights,
        w=lam * in_packet.w,
        b=eigenvalue_B(params, in_packet.e_axis) * in_packet.b,
    )


def apply_smatrix_kernel(params: ModelParams, k_axis, g_hat):
    """Apply S to a state given on a uniform square (k, p) momentum grid.

    ``g_hat[i, j]`` is any fixed multiple of the two-photon Fourier amplitude
    at ``(k_axis[i], k_axis[j])`` (symmetric in i, j).  Lines of constant E are
    the anti-diagonals ``i + j = const``, on which delta steps by the grid
    spacing; the background integral over delta1 < 0 is taken as half the
    integral over the full anti-diagonal.  The background is rank one on each
    line, so the cost is linear in the number of grid points.
    """
    k = np.asarray(k_axis, dtype=float)
    n = k.size
    if g_hat.shape != (n, n):
        raise ConfigurationError("g_hat must be square on k_axis")
    dk = (k[-1] - k[0]) / (n - 1)
    if not np.allclose(np.diff(k), dk, rtol=1e-9, atol=0.0):
        raise ConfigurationError("k_axis must be uniform")
    g = params.gamma
    e = k[:, None] + k[None, :]
    d = 0.5 * (k[:, None] - k[None, :])
    z = e - 2.0 * params.omega + 1j * g
    f = 1.0 / (4.0 * d * d - z * z)
    line = (np.arange(n)[:, None] + np.arange(n)[None, :]).ravel()
    fg = (f * g_hat).ravel()
    sums = (np.bincount(line, weights=fg.real, minlength=2 * n - 1)
            + 1j * np.bincount(line, weights=fg.imag, minlength=2 * n - 1))
    tt = transmission_t(params, k)
    out = tt[:, None] * tt[None, :] * g_hat
    out += 0.5 * dk * (16j * g * g / math.pi) * z * f * sums[line].reshape(n, n)
    return out
