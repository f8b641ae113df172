"""Composite Gauss-Legendre panel quadrature and small fitting helpers.

Internal module: everything here is plain ndarray in / ndarray out.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre


class QuadratureError(Exception):
    """Adaptive refinement failed to reach the requested tolerance."""


@lru_cache(maxsize=64)
def gl_rule(p: int):
    """Gauss-Legendre nodes/weights on [-1, 1], cached."""
    x, w = roots_legendre(p)
    return x, w


def panel_nodes(edges: np.ndarray, p: int):
    """Composite GL nodes and weights for the panel edges.

    Returns flat arrays of length (len(edges)-1)*p.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gl_rule(p)
    a = edges[:-1]
    b = edges[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    return (mid + half * x[None, :]).ravel(), (half * w[None, :]).ravel()


def split_edges(edges, h_max: float) -> np.ndarray:
    """Subdivide panels so that no panel exceeds h_max."""
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil((b - a) / h_max)))
        out.extend(np.linspace(a, b, k + 1)[1:])
    return np.asarray(out)


def geometric_edges(lo: float, hi: float, start: float, ratio: float = 2.0) -> np.ndarray:
    """Edges on [lo, hi] graded geometrically toward hi.

    The panel adjacent to hi has length `start`; lengths grow by `ratio`
    moving left until the interval is exhausted.
    """
    if hi - lo <= start:
        return np.array([lo, hi])
    edges = [hi]
    d = start
    pos = hi - start
    while pos - lo > d * ratio:
        edges.append(pos)
        d *= ratio
        pos -= d
    edges.append(pos)
    edges.append(lo)
    return np.array(edges[::-1])


@lru_cache(maxsize=32)
def _cheb_points(m: int):
    # Chebyshev points of the second kind on [0, 1]
    k = np.arange(m + 1)
    return 0.5 * (1.0 - np.cos(np.pi * k / m))


@lru_cache(maxsize=32)
def _power_fit_matrices(m: int):
    """Cached maps: values at Chebyshev points -> Chebyshev coefficients,
    and Chebyshev coefficients (in u = 2x-1) -> power coefficients in x."""
    x = _cheb_points(m)
    vander = np.polynomial.chebyshev.chebvander(2.0 * x - 1.0, m)
    interp = np.linalg.inv(vander)
    conv = np.zeros((m + 1, m + 1))
    for k in range(m + 1):
        basis = np.zeros(m + 1)
        basis[k] = 1.0
        pu = np.polynomial.chebyshev.cheb2poly(basis)
        # rebase (2x-1)^j onto powers of x
        for j, cj in enumerate(pu):
            if cj == 0.0:
                continue
            for i in range(j + 1):
                binom = np.exp(np.sum(np.log(np.arange(1, j + 1)))
                               - np.sum(np.log(np.arange(1, i + 1)))
                               - np.sum(np.log(np.arange(1, j - i + 1))))
                conv[i, k] += cj * round(binom) * (2.0 ** i) * ((-1.0) ** (j - i))
    return interp, conv


def power_fit(fn, m: int) -> np.ndarray:
    """Monomial coefficients of a smooth function on [0, 1].

    Interpolates at Chebyshev points, then converts the (decaying)
    Chebyshev series to the power basis. Adequate for degree <= ~26 when
    the function is analytic well beyond [0, 1]; the intermediate
    Chebyshev step keeps the conversion numerically tame.
    """
    interp, conv = _power_fit_matrices(m)
    y = np.asarray(fn(_cheb_points(m)))
    return conv @ (interp @ y)


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
