"""Numerical checks of orthonormality, completeness and unitarity of {W, B}.

Every basis state factorises into a centre-of-mass plane wave times an even
relative part, so all checks here work with separable functions
``env(xc) * rel(x)``.  Inner products of separable sums reduce to products of
one-dimensional Gram matrices.  The relative factor carries the interesting
physics and is integrated by panel quadrature on the half line (evenness
doubles it).  The centre-of-mass factors are Gaussians with closed-form
Fourier transforms and overlaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, InvalidParameterError, ModelParams
from .eigenbasis import overlap_S_with_B, project_relative, rel_b, rel_w
from .quadrature import gauss_legendre_panels, midpoint_grid
from .smatrix import SpectralWavePacket, apply_smatrix

__all__ = [
    "SmearingSpec",
    "Cutoffs",
    "GaussianTerm",
    "BoundTerm",
    "TestFunction",
    "ReconstructionReport",
    "default_cutoffs",
    "seeded_test_family",
    "bound_state_test_function",
    "smeared_overlap",
    "orthonormality_check",
    "completeness_reconstruct",
    "b_fraction_closed_form",
    "gaussian_spectral_packet",
    "unitarity_check",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# -- smeared packets -------------------------------------------------------------

@dataclass(frozen=True)
class SmearingSpec:
    """Gaussian test function h(E, delta) around a channel label.

    h = exp(-(E - E0)^2 / (2 sigma_e^2) - (delta - delta0)^2 / (2 sigma_d^2));
    for the B channel ``delta_center`` and ``sigma_d`` are ignored.
    """

    channel: str
    e_center: float
    sigma_e: float
    delta_center: float = 0.0
    sigma_d: float = 1.0

    def __post_init__(self):
        if self.channel not in ("W", "B"):
            raise InvalidParameterError(f"channel must be 'W' or 'B', got {self.channel!r}")
        if not (self.sigma_e > 0 and self.sigma_d > 0):
            raise InvalidParameterError("smearing widths must be positive")
        if self.channel == "W" and self.delta_center + 6.0 * self.sigma_d > 0:
            raise InvalidParameterError("W packet must sit in delta < 0, at least 6 sigma_d from 0")

    def x_extent(self) -> float:
        """Distance beyond which the packet amplitude is below exp(-32)."""
        ext = 8.0 / self.sigma_e
        if self.channel == "W":
            ext = max(ext, 8.0 / self.sigma_d)
        return ext


def _gauss_amp(u, centre, sigma):
    return np.exp(-((u - centre) ** 2) / (2.0 * sigma * sigma))


def _gauss_overlap_1d(c1, s1, c2, s2):
    a, b = 0.5 / (s1 * s1), 0.5 / (s2 * s2)
    return math.sqrt(math.pi / (a + b)) * math.exp(-a * b / (a + b) * (c1 - c2) ** 2)


def _smeared_env(spec: SmearingSpec, xc):
    """int dE h_E(E) exp(i E xc) / sqrt(2 pi), by Gauss-Legendre in E."""
    half = 10.0 * spec.sigma_e
    nodes, weights = gauss_legendre_panels(spec.e_center - half, spec.e_center + half,
                                           max(8, int(math.ceil(half * np.max(np.abs(xc)) / math.pi)) + 8))
    h = _gauss_amp(nodes, spec.e_center, spec.sigma_e) * weights
    out = np.empty(np.shape(xc), dtype=complex)
    for i0 in range(0, np.size(xc), 2048):
        sl = slice(i0, i0 + 2048)
        out[sl] = np.exp(1j * np.multiply.outer(xc[sl], nodes)) @ h
    return out / _SQRT_2PI


def _smeared_rel(params: ModelParams, spec: SmearingSpec, x):
    if spec.channel == "B":
        return rel_b(params, x).astype(complex)
    half = 10.0 * spec.sigma_d
    lo, hi = spec.delta_center - half, min(spec.delta_center + half, 0.0)
    nodes, weights = gauss_legendre_panels(lo, hi, max(8, int(math.ceil((hi - lo) * np.max(x) / math.pi)) + 8))
    h = _gauss_amp(nodes, spec.delta_center, spec.sigma_d) * weights
    out = np.empty(np.shape(x), dtype=complex)
    for i0 in range(0, np.size(x), 1024):
        sl = slice(i0, i0 + 1024)
        out[sl] = h @ rel_w(params, nodes, x[sl])
    return out


def _analytic_overlap(a: SmearingSpec, b: SmearingSpec) -> float:
    if a.channel != b.channel:
        return 0.0
    val = _gauss_overlap_1d(a.e_center, a.sigma_e, b.e_center, b.sigma_e)
    if a.channel == "W":
        val *= _gauss_overlap_1d(a.delta_center, a.sigma_d, b.delta_center, b.sigma_d)
    return val


def smeared_overlap(params: ModelParams, spec_a: SmearingSpec, spec_b: SmearingSpec,
                    box_half_width: float | None = None):
    """Real-space <psi_a|psi_b> and its analytic value.

    psi = int dE d(delta) h(E, delta) |W_{E, delta}> (or the B analogue) is
    built on quadrature nodes in x_c and x; the box is [-L, L] in both with
    L = ``box_half_width``.  Returns ``(numeric, analytic, norm_a, norm_b)``
    with the norms also computed numerically.
    """
    need = 20.0 / params.gamma + max(spec_a.x_extent(), spec_b.x_extent())
    if box_half_width is None:
        box_half_width = need
    if box_half_width < need:
        raise ConfigurationError(f"box half width {box_half_width} is smaller than the packet extent {need:.3g}")
    big = box_half_width
    freq_c = max(abs(spec_a.e_center), abs(spec_b.e_center)) + 10.0 * max(spec_a.sigma_e, spec_b.sigma_e)
    xc, wc = gauss_legendre_panels(-big, big, max(8, int(math.ceil(big * freq_c / math.pi)) + 8))
    freq_r = 1.0 + max(abs(spec_a.delta_center) + 10.0 * spec_a.sigma_d if spec_a.channel == "W" else 0.0,
                       abs(spec_b.delta_center) + 10.0 * spec_b.sigma_d if spec_b.channel == "W" else 0.0,
                       params.gamma)
    # exp(-G|x|/2) has a kink at 0, which sits on a panel edge
    x, wx = gauss_legendre_panels(0.0, big, max(8, int(math.ceil(big * freq_r / math.pi)) + 8))

    env = [_smeared_env(s, xc) for s in (spec_a, spec_b)]
    rel = [_smeared_rel(params, s, x) for s in (spec_a, spec_b)]

    def inner(i, j):
        ec = np.sum(np.conj(env[i]) * env[j] * wc)
        rr = 2.0 * np.sum(np.conj(rel[i]) * rel[j] * wx)
        return complex(ec * rr)

    return inner(0, 1), _analytic_overlap(spec_a, spec_b), inner(0, 0).real, inner(1, 1).real


def orthonormality_check(params: ModelParams, spec_a: SmearingSpec, spec_b: SmearingSpec,
                         box_half_width: float | None = None) -> float:
    """|numeric - analytic| overlap of two smeared packets, relative to sqrt(norm_a norm_b).

    The analytic value follows from <W|W'> = delta(E - E') delta(delta - delta'),
    <B|B'> = delta(E - E') and <W|B> = 0.
    """
    num, ana, na, nb = smeared_overlap(params, spec_a, spec_b, box_half_width)
    scale = math.sqrt(_analytic_overlap(spec_a, spec_a) * _analytic_overlap(spec_b, spec_b))
    return abs(num - ana) / scale


# -- completeness ------------------------------------------------------------------

@dataclass(frozen=True)
class Cutoffs:
    """Momentum box half width ``k_max`` and grid spacings of the eigenbasis sum."""

    k_max: float
    e_step: float
    delta_step: float

    def __post_init__(self):
        if not (self.k_max > 0 and self.e_step > 0 and self.delta_step > 0):
            raise ConfigurationError("cutoffs must be positive")


def default_cutoffs(params: ModelParams, k_max: float | None = None) -> Cutoffs:
    g = params.gamma
    return Cutoffs(40.0 * g if k_max is None else float(k_max), g / 20.0, g / 20.0)


@dataclass(frozen=True)
class GaussianTerm:
    """amp * exp(-(xc-xc0)^2/(2 wc^2) + i e0 xc) * exp(-x^2/(2 wr^2)) cos(q x)."""

    amp: complex
    xc0: float
    width_c: float
    e0: float
    width_r: float
    q: float

    def rel(self, params, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x / self.width_r) ** 2) * np.cos(self.q * x)

    def rel_extent(self, params) -> float:
        return 10.0 * self.width_r

    def rel_cosine_spectrum(self, delta):
        """sigma(delta) on delta < 0 with rel(x) = int sigma(delta) cos(delta x)/sqrt(pi)."""
        w = self.width_r
        return (w / math.sqrt(2.0)) * (np.exp(-0.5 * (w * (delta - self.q)) ** 2)
                                       + np.exp(-0.5 * (w * (delta + self.q)) ** 2))


@dataclass(frozen=True)
class BoundTerm:
    """amp * exp(-(xc-xc0)^2/(2 wc^2) + i e0 xc) * exp(-G |x| / 2)."""

    amp: complex
    xc0: float
    width_c: float
    e0: float

    def rel(self, params, x):
        return np.exp(-0.5 * params.gamma * np.abs(np.asarray(x, dtype=float)))

    def rel_extent(self, params) -> float:
        return 60.0 / params.gamma


def _env(term, xc):
    return term.amp * np.exp(-0.5 * ((xc - term.xc0) / term.width_c) ** 2 + 1j * term.e0 * xc)


def _env_fourier(term, e):
    """int dxc env(xc) exp(-i E xc) / sqrt(2 pi)."""
    w = term.width_c
    return term.amp * w * np.exp(-0.5 * (w * (e - term.e0)) ** 2 + 1j * (term.e0 - e) * term.xc0)


def _env_gram(t1, t2) -> complex:
    """<env_1|env_2> over the whole line."""
    a, b = 0.5 / t1.width_c ** 2, 0.5 / t2.width_c ** 2
    # exponent: -a (y-x1)^2 - b (y-x2)^2 + i (e2 - e1) y
    s = a + b
    m = (a * t1.xc0 + b * t2.xc0) / s
    dk = t2.e0 - t1.e0
    expo = -a * b / s * (t1.xc0 - t2.xc0) ** 2 + 1j * dk * m - dk * dk / (4.0 * s)
    return complex(np.conj(t1.amp) * t2.amp * math.sqrt(math.pi / s) * np.exp(expo))


@dataclass(frozen=True)
class TestFunction:
    """Symmetric two-photon function sum_m env_m(xc) rel_m(x) with even rel_m."""

    terms: tuple

    def __call__(self, params, x1, x2):
        x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
        xc, x = 0.5 * (x1 + x2), x1 - x2
        out = np.zeros(np.broadcast(xc, x).shape, dtype=complex)
        for t in self.terms:
            out += _env(t, xc) * t.rel(params, x)
        return out

    def check_symmetry(self, params, tol: float = 1e-12, seed: int = 0):
        pts = np.random.default_rng(seed).uniform(-10.0, 10.0, size=(2, 64))
        a, b = self(params, pts[0], pts[1]), self(params, pts[1], pts[0])
        scale = max(float(np.max(np.abs(a))), 1e-300)
        if np.max(np.abs(a - b)) > tol * scale:
            raise InvalidParameterError("test function is not symmetric under x1 <-> x2")


def seeded_test_family(params: ModelParams, seed: int = 0, n_terms: int = 3) -> TestFunction:
    """Reproducible Gaussian-mixture test function near the resonance."""
    rng = np.random.default_rng(seed)
    g = params.gamma
    terms = []
    for _ in range(n_terms):
        amp = complex(rng.normal(), rng.normal())
        terms.append(GaussianTerm(
            amp=amp,
            xc0=float(rng.uniform(-5.0, 5.0)) / g,
            width_c=float(rng.uniform(1.5, 4.0)) / g,
            e0=2.0 * params.omega + float(rng.uniform(-3.0, 3.0)) * g,
            width_r=float(rng.uniform(1.0, 4.0)) / g,
            q=float(rng.uniform(0.0, 2.0)) * g,
        ))
    return TestFunction(tuple(terms))


def bound_state_test_function(params: ModelParams, width_c: float | None = None) -> TestFunction:
    """Gaussian x_c envelope at E = 2 omega times exp(-G|x|/2)."""
    wc = 3.0 / params.gamma if width_c is None else width_c
    return TestFunction((BoundTerm(1.0 + 0j, 0.0, wc, 2.0 * params.omega),))


@dataclass(frozen=True)
class ReconstructionReport:
    l2_error_relative: float
    cutoffs: Cutoffs
    w_fraction: float
    b_fraction: float
    include_b: bool = True
    n_e: int = field(default=0)
    n_delta: int = field(default=0)


def _relative_nodes(params: ModelParams, fn: TestFunction, cutoffs: Cutoffs):
    ext = max(t.rel_extent(params) for t in fn.terms)
    if ext >= math.pi / cutoffs.delta_step:
        raise ConfigurationError("delta spacing too coarse for the relative extent of the test function")
    freq = 0.5 * cutoffs.k_max + max(getattr(t, "q", 0.0) for t in fn.terms) + params.gamma
    n_panels = max(8, int(math.ceil(ext * freq / (2.0 * math.pi))))
    return gauss_legendre_panels(0.0, ext, n_panels)


def _env_box(fn: TestFunction, cutoffs: Cutoffs) -> float:
    box = max(abs(t.xc0) + 10.0 * t.width_c for t in fn.terms)
    if box >= math.pi / cutoffs.e_step:
        raise ConfigurationError("energy spacing too coarse for the centre-of-mass extent of the test function")
    return box


def _energy_side(params: ModelParams, fn: TestFunction, cutoffs: Cutoffs):
    """Gram matrices of env_m and their truncated reconstructions on [-L, L]."""
    e, we = midpoint_grid(2.0 * params.omega - cutoffs.k_max, 2.0 * params.omega + cutoffs.k_max, cutoffs.e_step)
    box = _env_box(fn, cutoffs)
    ehat = np.stack([_env_fourier(t, e) for t in fn.terms])        # (m, nE)
    g_full = np.array([[_env_gram(a, b) for b in fn.terms] for a in fn.terms])
    # <env_m | envK_n> with envK_n = sum_E we ehat_n exp(i E xc)/sqrt(2 pi)
    g_cross = (np.conj(ehat) * we) @ ehat.T
    # <envK_m | envK_n> on the box: Dirichlet kernel between grid energies
    diff = e[:, None] - e[None, :]
    dirichlet = np.where(diff == 0.0, box / math.pi, np.sin(diff * box) / (math.pi * np.where(diff == 0.0, 1.0, diff)))
    weighted = ehat * we
    g_recon = np.conj(weighted) @ dirichlet @ weighted.T
    return g_full, g_cross, g_recon, e.size


def completeness_reconstruct(params: ModelParams, test_fn: TestFunction, cutoffs: Cutoffs | None = None,
                             include_b: bool = True) -> ReconstructionReport:
    """Expand ``test_fn`` over the truncated {W, B} grid, resum, report the L2 error.

    The E grid is the midpoint grid on [2 omega - K, 2 omega + K] and the
    delta grid the midpoint grid on [-K/2, 0), both with the spacings in
    ``cutoffs``.  ``include_b=False`` drops the bound-state channel.
    """
    cutoffs = default_cutoffs(params) if cutoffs is None else cutoffs
    if not test_fn.terms:
        return ReconstructionReport(0.0, cutoffs, 0.0, 0.0, include_b)
    test_fn.check_symmetry(params)

    g_full, g_cross, g_recon, n_e = _energy_side(params, test_fn, cutoffs)

    x, wx = _relative_nodes(params, test_fn, cutoffs)
    deltas, wd = midpoint_grid(-0.5 * cutoffs.k_max, 0.0, cutoffs.delta_step)
    rel = np.stack([t.rel(params, x) for t in test_fn.terms]).astype(complex)
    rho, beta = project_relative(params, rel, x, wx, deltas)        # (m, nD), (m,)
    w_nodes = rel_w(params, deltas, x)                              # (nD, nx)
    rel_k = (rho * wd) @ w_nodes
    if include_b:
        rel_k = rel_k + np.multiply.outer(beta, rel_b(params, x))

    def gram(a, b):
        return 2.0 * (np.conj(a) * wx) @ b.T

    r_full, r_cross, r_recon = gram(rel, rel), gram(rel, rel_k), gram(rel_k, rel_k)
    norm2 = float(np.sum(g_full * r_full).real)
    if norm2 == 0.0:
        return ReconstructionReport(0.0, cutoffs, 0.0, 0.0, include_b, n_e, deltas.size)
    err2 = norm2 - 2.0 * float(np.sum(g_cross * r_cross).real) + float(np.sum(g_recon * r_recon).real)
    w_frac = float(np.sum(g_cross * ((np.conj(rho) * wd) @ rho.T)).real) / norm2
    b_frac = float(np.sum(g_cross * np.outer(np.conj(beta), beta)).real) / norm2
    return ReconstructionReport(math.sqrt(max(err2, 0.0) / norm2), cutoffs, w_frac,
                                b_frac if include_b else 0.0, include_b, n_e, deltas.size)


def b_fraction_closed_form(params: ModelParams, test_fn: TestFunction, cutoffs: Cutoffs | None = None) -> float:
    """B-channel norm fraction from the closed-form <S|B> overlaps.

    Each relative factor is written through its cosine spectrum,
    rel(x) = int_{delta<0} sigma(delta) s_delta(x), so that
    <b|rel> = int sigma(delta) <s_delta|b>* d(delta) without any x quadrature.
    """
    cutoffs = default_cutoffs(params) if cutoffs is None else cutoffs
    g = params.gamma
    betas = []
    for t in test_fn.terms:
        if isinstance(t, BoundTerm):
            betas.append(math.sqrt(2.0 / g))
            continue
        lo = -(t.q + 12.0 / t.width_r + 50.0 * g)
        nodes, weights = gauss_legendre_panels(lo, 0.0, 64)
        sb = np.array([overlap_S_with_B(params, d, 0.0) for d in nodes])
        betas.append(complex(np.sum(t.rel_cosine_spectrum(nodes) * np.conj(sb) * weights)))
    beta = np.asarray(betas, dtype=complex)
    g_full, g_cross, _, _ = _energy_side(params, test_fn, cutoffs)
    x, wx = _relative_nodes(params, test_fn, cutoffs)
    rel = np.stack([t.rel(params, x) for t in test_fn.terms]).astype(complex)
    norm2 = float(np.sum(g_full * (2.0 * (np.conj(rel) * wx) @ rel.T)).real)
    return float(np.sum(g_cross * np.outer(np.conj(beta), beta)).real) / norm2


# -- unitarity -----------------------------------------------------------------------

def gaussian_spectral_packet(params: ModelParams, e_center: float, delta_center: float,
                             sigma_e: float, sigma_d: float, b_amplitude: complex = 0.0,
                             cutoffs: Cutoffs | None = None) -> SpectralWavePacket:
    """Gaussian W packet plus an optional B component, normalised to 1."""
    cutoffs = default_cutoffs(params) if cutoffs is None else cutoffs
    e, we = midpoint_grid(e_center - 10.0 * sigma_e, e_center + 10.0 * sigma_e,
                          min(cutoffs.e_step, sigma_e / 10.0))
    lo = min(delta_center - 10.0 * sigma_d, -cutoffs.delta_step)
    d, wd = midpoint_grid(lo, 0.0, min(cutoffs.delta_step, sigma_d / 10.0))
    w = _gauss_amp(e, e_center, sigma_e)[:, None] * _gauss_amp(d, delta_center, sigma_d)[None, :]
    b = b_amplitude * _gauss_amp(e, e_center, sigma_e).astype(complex)
    packet = SpectralWavePacket(e, we, d, wd, w.astype(complex), b)
    scale = 1.0 / math.sqrt(packet.norm())
    packet.w *= scale
    packet.b *= scale
    return packet


def unitarity_check(params: ModelParams, in_packet: SpectralWavePacket) -> float:
    """|norm(S packet) - norm(packet)| for a packet of unit norm."""
    n_in = in_packet.norm()
    if not math.isclose(n_in, 1.0, rel_tol=1e-9):
        raise ConfigurationError(f"packet must be normalised to 1, got norm {n_in!r}")
    return abs(apply_smatrix(params, in_packet).norm() - n_in)
