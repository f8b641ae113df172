"""Hyperboloid-model primitives for the n-dimensional real hyperbolic space.

Points live on the upper sheet {[x, x] = 1, x_0 >= 1} of the Lorentz
hyperboloid in R^{1+n}.  Everything downstream of this module is radially
reduced, so points only appear in geometry itself and in its tests; the
rest of the package works with scalar radii.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

POINT_TOL = 1e-12
CLAMP_TOL = 1e-10


class GeometryError(ValueError):
    """Invalid point, dimension, or out-of-domain argument."""


def check_dimension(n: int) -> int:
    if int(n) != n or n < 2:
        raise GeometryError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    n = check_dimension(n)
    return float(2.0 * np.pi ** (n / 2.0) / np.exp(gammaln(n / 2.0)))


@dataclass(frozen=True)
class HyperPoint:
    """A point on the hyperboloid sheet, stored in ambient coordinates."""

    coords: tuple

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 3:
            raise GeometryError("coords must be a flat (n+1)-vector with n >= 2")
        q = c[0] * c[0] - float(np.dot(c[1:], c[1:]))
        if abs(q - 1.0) > 1e-9:
            raise GeometryError(f"[x,x] = {q} is not 1 within tolerance")
        if c[0] < 1.0 - POINT_TOL:
            raise GeometryError("point lies on the lower sheet (x_0 < 1)")
        object.__setattr__(self, "coords", tuple(float(v) for v in c))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def origin(n: int) -> HyperPoint:
    """The base point (1, 0, ..., 0)."""
    n = check_dimension(n)
    return HyperPoint((1.0,) + (0.0,) * n)


def polar_point(r: float, direction) -> HyperPoint:
    """Point at radius r from the origin in the given unit direction."""
    sigma = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(sigma)
    if abs(norm - 1.0) > 1e-9:
        raise GeometryError("direction must be a unit vector")
    if r < 0:
        raise GeometryError("radius must be nonnegative")
    return HyperPoint((np.cosh(r),) + tuple(np.sinh(r) * sigma))


def lorentz_form(x: HyperPoint, y: HyperPoint) -> float:
    """Lorentz quadratic form x_0 y_0 - x_1 y_1 - ... - x_n y_n."""
    a, b = x.array, y.array
    if a.size != b.size:
        raise GeometryError("points live in different dimensions")
    return float(a[0] * b[0] - np.dot(a[1:], b[1:]))


def _stable_arcosh(c: float) -> float:
    # arcosh(1+u) = log1p(u + sqrt(u(u+2))); avoids cancellation near c=1
    u = c - 1.0
    return float(np.log1p(u + np.sqrt(u * (u + 2.0))))


def distance(x: HyperPoint, y: HyperPoint) -> float:
    """Geodesic distance arcosh([x, y]), clamped against round-off."""
    c = lorentz_form(x, y)
    if c < 1.0:
        if c < 1.0 - CLAMP_TOL:
            raise GeometryError(f"lorentz form {c} < 1 beyond round-off tolerance")
        c = 1.0
    return _stable_arcosh(c)


def two_point_distance(r: float, t: float, theta) -> float:
    """Distance between points at radii r and t with angle theta between them.

    Hyperbolic law of cosines: cosh(rho) = cosh r cosh t - sinh r sinh t cos(theta).
    Vectorized in theta.
    """
    if r < 0 or t < 0:
        raise GeometryError("radii must be nonnegative")
    theta = np.asarray(theta, dtype=float)
    c = np.cosh(r) * np.cosh(t) - np.sinh(r) * np.sinh(t) * np.cos(theta)
    u = np.maximum(c - 1.0, 0.0)
    rho = np.log1p(u + np.sqrt(u * (u + 2.0)))
    return float(rho) if rho.ndim == 0 else rho


def ball_volume(t: float, n: int) -> float:
    """Volume of a geodesic ball of radius t in H^n.

    sigma_{n-1} * int_0^t sinh^{n-1} r dr, evaluated in closed form through
    the binomial expansion of sinh^{n-1}.
    """
    n = check_dimension(n)
    if t < 0:
        raise GeometryError("radius must be nonnegative")
    if t == 0.0:
        return 0.0
    m = n - 1
    total = 0.0
    # sinh^m r = 2^-m sum_k C(m,k) (-1)^k e^{(m-2k) r}
    for k in range(m + 1):
        a = m - 2 * k
        binom = np.exp(gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1))
        coeff = binom * (-1.0) ** k
        if a == 0:
            total += coeff * t
        else:
            total += coeff * np.expm1(a * t) / a
    return float(sphere_area(n) * total / 2.0 ** m)
