"""Shared numerical plumbing: finite differences, quadrature, low-discrepancy sampling."""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import qmc


def central_diff(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                 direction: np.ndarray, h: float) -> np.ndarray:
    """4th-order central difference of ``func`` along ``direction`` at ``x``."""
    d = np.asarray(direction, dtype=float)
    f = lambda s: np.asarray(func(x + s * d))
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)


def central_diff2(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                  direction: np.ndarray, h: float) -> np.ndarray:
    """4th-order central second difference along one direction."""
    d = np.asarray(direction, dtype=float)
    f = lambda s: np.asarray(func(x + s * d))
    return (-f(-2 * h) + 16 * f(-h) - 30 * f(0.0) + 16 * f(h) - f(2 * h)) / (12 * h * h)


def mixed_diff2(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                d1: np.ndarray, d2: np.ndarray, h: float) -> np.ndarray:
    """Mixed second derivative d^2/(dd1 dd2) via nested 4th-order stencils."""
    inner = lambda y: central_diff(func, y, d2, h)
    return central_diff(inner, x, d1, h)


def jacobian_fd(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                h: float) -> np.ndarray:
    """Jacobian d(func)/dx by columns of 4th-order central differences."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = 1.0
        cols.append(central_diff(func, x, e, h))
    return np.stack(cols, axis=-1)


def gauss_legendre_panels(a: float, b: float, order: int, panels: int,
                          geometric: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [a, b].

    ``geometric`` > 1 makes panel widths grow geometrically from ``a``, which
    matches integrands decaying away from ``a``.
    """
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be >= 1")
    xs, ws = leggauss(order)
    if geometric == 1.0:
        edges = np.linspace(a, b, panels + 1)
    else:
        ratios = geometric ** np.arange(panels)
        widths = (b - a) * ratios / ratios.sum()
        edges = a + np.concatenate([[0.0], np.cumsum(widths)])
        edges[-1] = b
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes.append(mid + half * xs)
        weights.append(half * ws)
    return np.concatenate(nodes), np.concatenate(weights)


def halton_ball(dim: int, n: int, radius: float, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points in the ball of given radius (unscrambled Halton)."""
    sampler = qmc.Halton(d=dim, scramble=False, seed=seed)
    pts = sampler.random(4 * n)
    cube = radius * (2.0 * pts - 1.0)
    inside = cube[np.linalg.norm(cube, axis=1) <= radius]
    while inside.shape[0] < n:
        more = radius * (2.0 * sampler.random(4 * n) - 1.0)
        inside = np.concatenate([inside, more[np.linalg.norm(more, axis=1) <= radius]])
    return inside[:n]


def fit_slope(logx: np.ndarray, logy: np.ndarray) -> float:
    """Least-squares slope of logy against logx."""
    A = np.vstack([logx, np.ones_like(logx)]).T
    sol, *_ = np.linalg.lstsq(A, logy, rcond=None)
    return float(sol[0])
