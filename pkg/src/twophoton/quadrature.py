"""Composite Gauss-Legendre panel quadrature shared by all overlap oracles."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["gauss_legendre_panels", "panels_for_frequency", "midpoint_grid"]


@lru_cache(maxsize=32)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(a: float, b: float, n_panels: int, order: int = 16):
    """Nodes and weights of ``n_panels`` equal Gauss-Legendre panels on [a, b].

    Nodes are returned in ascending order, so any reduction over them has a
    fixed summation order.
    """
    if n_panels < 1 or order < 1:
        raise ValueError("n_panels and order must be positive")
    if not b > a:
        raise ValueError("need b > a")
    t, w = _leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panels_for_frequency(a: float, b: float, max_freq: float, order: int = 16,
                         min_panels: int = 4):
    """Panels fine enough that every oscillation period of ``exp(i*max_freq*x)``
    holds at least ``order`` nodes."""
    period = 2.0 * math.pi / max(abs(max_freq), 1e-300)
    n = max(min_panels, int(math.ceil((b - a) / period)))
    return gauss_legendre_panels(a, b, n, order)


def midpoint_grid(a: float, b: float, step: float):
    """Cell-centred uniform grid on [a, b) with spacing close to ``step``."""
    n = max(1, int(round((b - a) / step)))
    h = (b - a) / n
    return a + h * (np.arange(n) + 0.5), np.full(n, h)
