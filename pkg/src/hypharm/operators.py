"""Radial operators on H^n: spherical means, complex-order multipliers,
lacunary maximal operators with their local and global parts, the
Hardy-Littlewood comparison, the Kunze-Stein weighted integral, the heat
comparison sum, the kernel-difference tail integrals, and the
admissibility-region functions.

Everything acts on radial functions; reported operator norms are suprema
over a radial test family and therefore lower bounds for the true
operator norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import betainc, gammaln

from . import symbols, transform
from ._quad import geometric_edges, gl_rule, loglog_slope, panel_nodes
from .geometry import ball_volume, check_dimension, sphere_area
from .symbols import MultiplierSpec
from .transform import RadialFunction, RadialGrid, SpectralGrid

__all__ = [
    "LacunarySet",
    "FamilyMember",
    "build_default_family",
    "build_convolver_family",
    "radial_interpolator",
    "spherical_mean",
    "apply_multiplier",
    "direct_radial_convolution",
    "ball_average",
    "hl_maximal",
    "lacunary_maximal",
    "local_global_parts",
    "FittedCheck",
    "fitted_check",
    "kunze_stein_empirical",
    "kunze_stein_rhs",
    "kunze_stein_series_terms",
    "i3_values",
    "i3_sup",
    "cz_tail_integrals",
    "cz_tail_slopes",
    "region_threshold",
    "region_anchor_points",
    "interpolation_alpha",
    "interpolation_infimum",
    "empirical_operator_norm",
]


# --------------------------------------------------------------------------
# lacunary set and test family
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LacunarySet:
    """Truncated lacunary radii {2^-j : 1 <= j <= J} plus {1, ..., K}."""

    J: int
    K: int

    def __post_init__(self):
        if self.J < 0 or self.K < 0 or self.J + self.K == 0:
            raise ValueError("need J, K >= 0 with at least one radius")

    @property
    def small(self) -> np.ndarray:
        return np.array([2.0 ** -j for j in range(self.J, 0, -1)])

    @property
    def large(self) -> np.ndarray:
        return np.arange(1, self.K + 1, dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.small, self.large])


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    lo = x <= 0.0
    hi = x >= 1.0
    mid = ~lo & ~hi
    out = np.zeros(x.shape)
    out[hi] = 1.0
    xm = x[mid]
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    out[mid] = a / (a + b)
    return out


@dataclass(eq=False)
class FamilyMember:
    kind: str
    label: str
    fn: object
    f: RadialFunction


def _taper(grid: RadialGrid):
    # compactly supported inside [0, r_max - 1]; keeps every member in the
    # transform's safe class for all p
    a, b = grid.r_max - 3.0, grid.r_max - 1.0
    return lambda r: 1.0 - smooth_step((r - a) / (b - a))


def build_default_family(grid: RadialGrid) -> list:
    """Gaussians, shifted bumps, slow exponential tails, smoothed annulus.

    All members carry a smooth cutoff vanishing before r_max, so each one
    lies in L^p for every p and passes the transform tail checks.
    """
    n = grid.n
    cut = _taper(grid)
    members = []
    for a in (0.25, 1.0, 4.0):
        fn = (lambda a: lambda r: np.exp(-a * r ** 2) * cut(r))(a)
        members.append(FamilyMember("gaussian", f"gaussian(a={a})", fn,
                                    transform.sample_radial(grid, fn)))
    for R in (1.0, 2.0, 4.0):
        fn = (lambda R: lambda r: np.exp(-4.0 * (r - R) ** 2) * cut(r))(R)
        members.append(FamilyMember("shifted-bump", f"bump(R={R})", fn,
                                    transform.sample_radial(grid, fn)))
    for b in ((n - 1) / 2.0 + 0.1, float(n - 1)):
        fn = (lambda b: lambda r: np.exp(-b * r) * (1.0 + r) * cut(r))(b)
        members.append(FamilyMember("exp-tail", f"exptail(b={b:g})", fn,
                                    transform.sample_radial(grid, fn)))
    fn = lambda r: smooth_step((r - 0.75) / 0.5) * smooth_step((2.25 - r) / 0.5)
    members.append(FamilyMember("smoothed-annulus", "annulus(1..2)", fn,
                                transform.sample_radial(grid, fn)))
    return members


def build_convolver_family(grid: RadialGrid) -> list:
    """Nonnegative radial kernels for the convolution-inequality checks."""
    n = grid.n
    cut = _taper(grid)
    defs = [
        ("smooth-ball", lambda r: 1.0 - smooth_step((r - 0.75) / 0.5)),
        ("gaussian", lambda r: np.exp(-r ** 2)),
        ("slow-tail", lambda r: np.exp(-(n - 1) * r) * cut(r)),
        ("narrow-gaussian", lambda r: 8.0 * np.exp(-8.0 * r ** 2)),
    ]
    return [FamilyMember("kernel", name, fn, transform.sample_radial(grid, fn))
            for name, fn in defs]


# --------------------------------------------------------------------------
# interpolation and the direct (angular quadrature) routes
# --------------------------------------------------------------------------

def radial_interpolator(f: RadialFunction):
    """Cubic interpolant of a radial function, even across r = 0, zero
    beyond the grid."""
    g = f.grid
    x = np.concatenate([-g.nodes[::-1], g.nodes])
    y = np.concatenate([f.values[::-1], f.values])
    spline = CubicSpline(x, y, extrapolate=False)
    r_max = g.r_max

    def evaluate(r):
        r = np.asarray(r, dtype=float)
        out = spline(np.clip(r, 0.0, r_max))
        out = np.where(r > r_max, 0.0, out)
        return np.nan_to_num(out, nan=0.0)

    return evaluate


def _angular_rule(n: int, count: int):
    theta, w = panel_nodes(np.linspace(0.0, np.pi, max(2, count // 12) + 1), 12)
    c_n = np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)
    return theta, w * c_n * np.sin(theta) ** (n - 2)


def _two_point_dist(r: np.ndarray, t: float, theta: np.ndarray) -> np.ndarray:
    """Distance to points on the radius-t sphere, cancellation-free.

    cosh(rho) - 1 = 2 sinh^2((r-t)/2) + 2 sinh r sinh t sin^2(theta/2),
    which stays accurate when r and t are large and theta is small.
    """
    w = (2.0 * np.sinh(0.5 * (r - t)) ** 2
         + 2.0 * np.sinh(r) * np.sinh(t) * np.sin(0.5 * theta) ** 2)
    return np.log1p(w + np.sqrt(w * (w + 2.0)))


def _sphere_panels(r: np.ndarray, t: float, n_rho: int, p: int = 12):
    """Per-output-radius angular panels equidistributed in the distance
    rho(theta), which concentrates near theta = 0 when r is large."""
    r = r[:, None]
    lo, hi = np.abs(r - t), r + t
    rho_edges = lo + (hi - lo) * np.linspace(0.0, 1.0, n_rho + 1)[None, :]
    # invert cosh rho = cosh r cosh t - sinh r sinh t cos theta at the edges
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (np.cosh(r) * np.cosh(t) - np.cosh(rho_edges)) / (np.sinh(r) * np.sinh(t))
    arg = np.where(np.isfinite(arg), arg, np.linspace(1.0, -1.0, n_rho + 1)[None, :])
    edges = np.arccos(np.clip(arg, -1.0, 1.0))
    edges[:, 0], edges[:, -1] = 0.0, np.pi
    edges = np.maximum.accumulate(edges, axis=1)
    x, wgl = gl_rule(p)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    theta = mid[:, :, None] + half[:, :, None] * x[None, None, :]
    weights = half[:, :, None] * wgl[None, None, :]
    m = r.shape[0]
    return theta.reshape(m, -1), weights.reshape(m, -1)


def spherical_mean(f: RadialFunction, t: float, route: str = "spectral",
                   sgrid: SpectralGrid | None = None, out_r=None) -> RadialFunction:
    """Average of f over geodesic spheres of radius t.

    route="spectral" multiplies the transform by the order-zero symbol;
    route="direct" is the one-dimensional angular quadrature against
    normalized sin^(n-2), evaluated at `out_r` (default: the grid).  The
    two routes are algorithmically independent.
    """
    if t < 0:
        raise ValueError("radius must be nonnegative")
    if route == "spectral":
        if out_r is not None:
            raise ValueError("spectral route evaluates on the grid only")
        spec = MultiplierSpec(f.grid.n, 0.0, t) if t > 0 else None
        if spec is None:
            return f.with_values(f.values.copy())
        return apply_multiplier(spec, f, sgrid=sgrid)
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    g = f.grid
    n = g.n
    where = g.nodes if out_r is None else np.atleast_1d(np.asarray(out_r, dtype=float))
    interp = radial_interpolator(f)
    c_n = np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)
    vals = None
    for n_rho in (24, 48):
        theta, w = _sphere_panels(where, t, n_rho)
        rho = _two_point_dist(where[:, None], t, theta)
        fv = interp(rho.ravel()).reshape(rho.shape)
        new = c_n * np.sum(fv * w * np.sin(theta) ** (n - 2), axis=1)
        if vals is not None and np.max(np.abs(new - vals)) <= 1e-8 * (1.0 + np.max(np.abs(new))):
            vals = new
            break
        vals = new
    if out_r is None:
        return RadialFunction(g, vals)
    return RadialFunction(radial_grid_view(g, where), vals)


def radial_grid_view(grid: RadialGrid, nodes: np.ndarray) -> RadialGrid:
    """Ad-hoc evaluation grid (zero weights) for off-node outputs."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
    z = np.zeros(nodes.shape)
    return RadialGrid(grid.n, grid.r_max, grid.lambda_resolve, nodes, z, z)


def apply_multiplier(spec: MultiplierSpec, f: RadialFunction,
                     sgrid: SpectralGrid | None = None,
                     route: str = "spectral") -> RadialFunction:
    """Apply the order-alpha spherical multiplier to a radial function.

    The spectral route multiplies the transform by the symbol.  The
    kernel route (Re alpha > 0) convolves against the radial kernel
    divided by the sphere area, which is the convolution normalization
    matching the symbol family; it is exact in the angular variable for
    alpha in {1, 2} and serves as the independent oracle.
    """
    if f.grid.n != spec.n:
        raise ValueError("dimension mismatch between function and multiplier")
    if route == "spectral":
        if sgrid is None:
            sgrid = transform.default_spectral_grid(f.grid)
        if transform.tail_fraction(f) > 1e-8:
            raise transform.TailError("input outside the transform's safe class")
        plan = transform.get_plan(f.grid, sgrid)
        key = ("sym", spec.alpha, spec.t)
        sym = plan.symbol_cache.get(key)
        if sym is None:
            sym = symbols.multiplier_symbol(spec, sgrid.nodes)
            plan.symbol_cache[key] = sym
        # the spectral truncation is the operator's own discretization and
        # is certified by the two-route agreement checks, so only the
        # radial safe-class precondition is enforced here
        F = plan.forward_values(f.values)
        return RadialFunction(f.grid, plan.inverse_values(F * sym))
    if route == "kernel":
        return _apply_multiplier_kernel(spec, f)
    raise ValueError(f"unknown route {route!r}")


def _cap_integral(cos_theta: np.ndarray, n: int) -> np.ndarray:
    """int_0^theta sin^(n-2), theta = arccos(cos_theta), vectorized."""
    x = np.clip(cos_theta, -1.0, 1.0)
    return _cap_integral_uv(1.0 - x, 1.0 + x, n)


def _cap_full(n: int) -> float:
    return float(np.sqrt(np.pi) * np.exp(gammaln((n - 1) / 2.0) - gammaln(n / 2.0)))


def _cap_integral_uv(u, v, n: int) -> np.ndarray:
    """Cap integral from the stable pair u = 1 - cos theta, v = 1 + cos theta.

    Passing u and v separately preserves accuracy when theta is within
    ~1e-8 of either endpoint, where cos theta alone loses all digits.
    """
    full = _cap_full(n)
    s2 = np.clip(u * v, 0.0, 1.0)
    half = 0.5 * full * betainc((n - 1) / 2.0, 0.5, s2)
    return np.where(u <= 1.0, half, full - half)


def _cap_angle(u, v):
    """theta = arccos(1 - u), stable at both endpoints."""
    u = np.clip(u, 0.0, 2.0)
    v = np.clip(v, 0.0, 2.0)
    small = 2.0 * np.arcsin(np.sqrt(0.5 * np.minimum(u, v)))
    return np.where(u <= 1.0, small, np.pi - small)


def _cap_gap(theta, n: int) -> np.ndarray:
    """int_0^theta sin^(n-2) x (1 - cos x) dx, stable for small caps.

    Equals cap(theta) - sin^(n-1)(theta)/(n-1); the direct difference
    cancels catastrophically for small theta, so a series takes over.
    """
    theta = np.asarray(theta, dtype=float)
    direct = _cap_integral_uv(1.0 - np.cos(theta), 1.0 + np.cos(theta), n) \
        - np.sin(theta) ** (n - 1) / (n - 1)
    a = (2.0 * n - 3.0) / 12.0
    series = (theta ** (n + 1) / (2.0 * (n + 1))
              - a * theta ** (n + 3) / (2.0 * (n + 3)))
    return np.where(theta < 0.01, series, direct)


def _cap_uv_pair(r, rho, t: float):
    """Stable (u, v, B) for the cap where d(x, y) = t:
    u = 1 - cos theta*, v = 1 + cos theta*, B = sinh r sinh rho."""
    B = np.sinh(r) * np.sinh(rho)
    u = 2.0 * np.sinh(0.5 * (t + r - rho)) * np.sinh(0.5 * (t - r + rho)) / B
    v = 2.0 * np.sinh(0.5 * (r + rho + t)) * np.sinh(0.5 * (r + rho - t)) / B
    return u, v, B


def ball_average(f: RadialFunction, t: float, out_r=None) -> RadialFunction:
    """Average of f over geodesic balls of radius t.

    The angular integral of the ball indicator has a closed form (a cap
    integral), so only the radial quadrature is numerical.
    """
    if t <= 0:
        raise ValueError("ball radius must be positive")
    g = f.grid
    n = g.n
    where = g.nodes if out_r is None else np.atleast_1d(np.asarray(out_r, dtype=float))
    # the source sphere of radius rho is fully inside the ball when
    # r + rho <= t, fully outside when |r - rho| >= t, cut by a cap between
    r = where[:, None]
    rho = g.nodes[None, :]
    inside = r + rho <= t
    outside = (np.abs(r - rho) >= t) & ~inside
    body = ~inside & ~outside
    with np.errstate(divide="ignore", invalid="ignore"):
        u, v, _ = _cap_uv_pair(r, rho, t)
    cap = np.zeros(np.broadcast_shapes(r.shape, rho.shape))
    cap[inside] = _cap_full(n)
    cap[body] = _cap_integral_uv(u[body], v[body], n)
    c_n = np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)
    kernel_weights = sphere_area(n) * c_n * cap
    vals = (kernel_weights * (f.values * g.base_weights * np.sinh(g.nodes) ** (n - 1))[None, :]).sum(axis=1)
    vals = vals / ball_volume(t, n)
    if out_r is None:
        return RadialFunction(g, vals)
    return RadialFunction(radial_grid_view(g, where), vals)


def _apply_multiplier_kernel(spec: MultiplierSpec, f: RadialFunction) -> RadialFunction:
    """Kernel-route oracle for integer orders alpha = 1 and alpha = 2.

    alpha = 1: the kernel is constant on [0, t], so the operator is a
    multiple of the ball integral.  alpha = 2: the kernel is a linear
    combination of cosh t and cosh(d), both of which integrate in the
    angular variable in closed form.
    """
    a, t, n = spec.alpha, spec.t, spec.n
    if a.imag != 0.0 or a.real not in (1.0, 2.0):
        raise ValueError("kernel-route oracle supports alpha in {1, 2}")
    g = f.grid
    pref = np.exp(a.real * (np.log(2.0) + t) - 2.0 * a.real * np.log(np.expm1(t))
                  + (2.0 - n) * np.log(np.sinh(t)) - gammaln(a.real))
    r = g.nodes[:, None]
    rho = g.nodes[None, :]
    inside = r + rho <= t
    outside = (np.abs(r - rho) >= t) & ~inside
    body = ~inside & ~outside
    with np.errstate(divide="ignore", invalid="ignore"):
        u, v, B = _cap_uv_pair(r, rho, t)
    cap = np.zeros(np.broadcast_shapes(r.shape, rho.shape))
    cap[inside] = _cap_full(n)
    cap[body] = _cap_integral_uv(u[body], v[body], n)
    if a.real == 1.0:
        angular = cap
    else:
        # integral of (cosh t - cosh d) over the cap, written as
        # B [u cap - int sin^(n-2)(1 - cos)] so the exponentially large
        # cosh r cosh rho terms never meet in a subtraction
        angular = np.zeros(cap.shape)
        theta_star = _cap_angle(u[body], v[body])
        angular[body] = B[body] * (u[body] * cap[body] - _cap_gap(theta_star, n))
        angular[inside] = ((np.cosh(t) - np.cosh(r) * np.cosh(rho)) * cap)[inside]
    c_n = np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)
    radial_w = f.values * f.grid.base_weights * np.sinh(f.grid.nodes) ** (n - 1)
    vals = pref * sphere_area(n) * c_n * (angular * radial_w[None, :]).sum(axis=1)
    return RadialFunction(g, vals / sphere_area(n))


def direct_radial_convolution(f: RadialFunction, kappa, out_r=None,
                              n_theta: int = 96, chunk: int = 64) -> RadialFunction:
    """Brute-force convolution of radial functions by double quadrature.

    `kappa` is a callable on radii or a RadialFunction (interpolated).
    O(N_out * N_rho * N_theta); intended as an oracle on small grids.
    """
    g = f.grid
    n = g.n
    kfun = kappa if callable(kappa) else radial_interpolator(kappa)
    where = g.nodes if out_r is None else np.atleast_1d(np.asarray(out_r, dtype=float))
    theta, w_th = _angular_rule(n, n_theta)
    radial_w = f.values * g.base_weights * np.sinh(g.nodes) ** (n - 1)
    out = np.empty(where.shape, dtype=np.result_type(f.values.dtype, float))
    for lo in range(0, where.size, chunk):
        rs = where[lo:lo + chunk, None, None]
        rhos = g.nodes[None, :, None]
        w = (2.0 * np.sinh(0.5 * (rs - rhos)) ** 2
             + 2.0 * np.sinh(rs) * np.sinh(rhos) * np.sin(0.5 * theta)[None, None, :] ** 2)
        dist = np.log1p(w + np.sqrt(w * (w + 2.0)))
        kv = kfun(dist.ravel()).reshape(dist.shape)
        out[lo:lo + chunk] = sphere_area(n) * np.einsum("orx,x,r->o", kv, w_th, radial_w)
    if out_r is None:
        return RadialFunction(g, out)
    return RadialFunction(radial_grid_view(g, where), out)


# --------------------------------------------------------------------------
# maximal operators
# --------------------------------------------------------------------------

def _multiplier_profiles(alpha, f: RadialFunction, ts, sgrid: SpectralGrid | None):
    if sgrid is None:
        sgrid = transform.default_spectral_grid(f.grid)
    plan = transform.get_plan(f.grid, sgrid)
    F = transform.forward_sft(f, sgrid)
    for t in ts:
        spec = MultiplierSpec(f.grid.n, alpha, float(t))
        key = ("sym", spec.alpha, spec.t)
        sym = plan.symbol_cache.get(key)
        if sym is None:
            sym = symbols.multiplier_symbol(spec, sgrid.nodes)
            plan.symbol_cache[key] = sym
        yield t, plan.inverse_values(F.values * sym)


def lacunary_maximal(alpha, f: RadialFunction, lac: LacunarySet,
                     sgrid: SpectralGrid | None = None) -> RadialFunction:
    """Pointwise sup over the truncated lacunary radii of |multiplier(t) f|."""
    acc = np.zeros(f.grid.size)
    for _, vals in _multiplier_profiles(alpha, f, lac.values, sgrid):
        np.maximum(acc, np.abs(vals), out=acc)
    return RadialFunction(f.grid, acc)


def local_global_parts(alpha, f: RadialFunction, lac: LacunarySet,
                       sgrid: SpectralGrid | None = None):
    """Suprema over the dyadic-small and the integer radii, separately."""
    loc = np.zeros(f.grid.size)
    glo = np.zeros(f.grid.size)
    for t, vals in _multiplier_profiles(alpha, f, lac.values, sgrid):
        target = loc if t < 1.0 else glo
        np.maximum(target, np.abs(vals), out=target)
    return RadialFunction(f.grid, loc), RadialFunction(f.grid, glo)


def hl_maximal(f: RadialFunction, ts) -> RadialFunction:
    """Hardy-Littlewood maximal function restricted to a finite radius set."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size == 0:
        raise ValueError("need at least one ball radius")
    fa = f.with_values(np.abs(f.values))
    acc = np.zeros(f.grid.size)
    for t in ts:
        np.maximum(acc, ball_average(fa, float(t)).values, out=acc)
    return RadialFunction(f.grid, acc)


# --------------------------------------------------------------------------
# Kunze-Stein, heat comparison, kernel-difference tails
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FittedCheck:
    """Outcome of a calibrate/validate certification of one inequality."""

    name: str
    fitted_constant: float
    worst_ratio: float
    slack: float
    passed: bool


def fitted_check(name: str, calibration_ratios, validation_ratios,
                 slack: float) -> FittedCheck:
    """Fit the implicit constant on calibration data, validate with slack."""
    cal = np.asarray(calibration_ratios, dtype=float)
    val = np.asarray(validation_ratios, dtype=float)
    if cal.size == 0 or val.size == 0:
        raise ValueError("calibration and validation sets must be nonempty")
    fitted = float(cal.max())
    worst = float(val.max())
    return FittedCheck(name, fitted, worst, float(slack), bool(worst <= slack * fitted))


def kunze_stein_empirical(family, kappas, p: float,
                          sgrid: SpectralGrid | None = None,
                          slack: float = 1.5) -> FittedCheck:
    """Certify ||f * kappa||_p <= C * (weighted integral) * ||f||_p.

    One constant is fitted over the even-indexed family members paired
    with every kernel; the odd-indexed members validate it.
    """
    ratios = {True: [], False: []}
    for kappa in kappas:
        rhs = kunze_stein_rhs(kappa.f, p)
        for idx, member in enumerate(family):
            conv = transform.spectral_convolve(member.f, kappa.f, sgrid)
            num = transform.lp_norm(conv, p)
            den = rhs * transform.lp_norm(member.f, p)
            ratios[idx % 2 == 0].append(num / den)
    return fitted_check(f"kunze-stein(p={p:g})", ratios[True], ratios[False], slack)


def kunze_stein_rhs(kappa: RadialFunction, p: float) -> float:
    """Weighted integral of a nonnegative radial kernel against
    e^(-(n-1) r / p') and the polar measure."""
    if not 1.0 < p < 2.0:
        raise ValueError("the convolution inequality is stated for 1 < p < 2")
    if np.any(kappa.values < 0):
        raise ValueError("kernel must be nonnegative")
    g = kappa.grid
    pp = p / (p - 1.0)
    weight = np.exp(-(g.n - 1) * g.nodes / pp)
    return float(np.sum(g.measure_weights * weight * kappa.values))


def kunze_stein_series_terms(p: float, n: int, j_count: int, alpha: float = 1.0) -> np.ndarray:
    """p-th powers of the weighted integrals of the endpoint kernel pieces
    at integer radii; the sequence whose ratio tends to e^(-(n-1)(p-1))."""
    if not 1.0 < p < 2.0:
        raise ValueError("requires 1 < p < 2")
    n = check_dimension(n)
    if alpha <= 0:
        raise ValueError("requires Re alpha > 0")
    pp = p / (p - 1.0)
    out = np.empty(j_count)
    for idx, j in enumerate(range(1, j_count + 1)):
        if alpha >= 1.0:
            edges = np.linspace(j - 0.5, j, 5)
        else:
            edges = j - geometric_edges(0.0, 0.5, start=1e-10)[::-1]
        r, w = panel_nodes(edges, 16)
        vals = (np.exp(-(n - 1) * r / pp) * np.exp(-(n - 1.0) * j)
                * (j - r) ** (alpha - 1.0) * np.sinh(r) ** (n - 1))
        out[idx] = np.sum(w * vals) ** p
    return out


def i3_values(alpha, n: int, lams, J: int) -> np.ndarray:
    """Sum over dyadic radii of |m(lam) - m(0) heat(lam)|^2 on a lambda grid."""
    n = check_dimension(n)
    lams = np.asarray(lams, dtype=float)
    total = np.zeros(lams.shape)
    for j in range(1, J + 1):
        t = 2.0 ** -j
        spec = MultiplierSpec(n, alpha, t)
        m = symbols.multiplier_symbol(spec, lams)
        m0 = symbols.multiplier_symbol(spec, 0.0)
        total += np.abs(m - m0 * symbols.heat_symbol(t * t, lams)) ** 2
    return total


def i3_sup(alpha, n: int, lams, J: int) -> float:
    """Supremum over the lambda grid of the heat-comparison square sum."""
    if J == 0:
        return 0.0
    if J < 0:
        raise ValueError("J must be nonnegative")
    return float(np.max(i3_values(alpha, n, lams, J)))


def cz_tail_integrals(alpha: float, n: int, j: int, r_l: float):
    """Closed forms of the two kernel-difference tail integrals.

    J1 = 2 int_{2^-j - 3 r_l}^{2^-j} 2^(nj) r^(n-1) (1 - 2^j r)^(alpha-1) dr
    J2 = 2^j r_l int_{r_l}^{2^-j - r_l} 2^(nj) r^(n-1) (1 - 2^j r)^(alpha-2) dr

    Both reduce, after u = 2^j r and the binomial expansion of (1-v)^(n-1),
    to incomplete power/log integrals.
    """
    n = check_dimension(n)
    if alpha <= 0:
        raise ValueError("requires Re alpha > 0")
    eps = 2.0 ** j * r_l
    if not 0 < eps <= 1.0:
        raise ValueError("need 0 < 2^j r_l <= 1")
    top = min(3.0 * eps, 1.0)
    j1 = 0.0
    for k in range(n):
        j1 += comb(n - 1, k) * (-1.0) ** k * top ** (alpha + k) / (alpha + k)
    j1 *= 2.0
    j2 = 0.0
    if eps < 0.5:
        for k in range(n):
            e = alpha - 1.0 + k
            c = comb(n - 1, k) * (-1.0) ** k
            if abs(e) < 1e-14:
                j2 += c * (np.log(1.0 - eps) - np.log(eps))
            else:
                j2 += c * ((1.0 - eps) ** e - eps ** e) / e
        j2 *= eps
    return float(j1), float(j2)


def cz_tail_slopes(alpha: float, n: int, j: int, r_ls) -> tuple:
    """Log-log regression slopes of the two tail integrals over an r_l sweep."""
    r_ls = np.asarray(r_ls, dtype=float)
    vals = np.array([cz_tail_integrals(alpha, n, j, rl) for rl in r_ls])
    return loglog_slope(r_ls, vals[:, 0]), loglog_slope(r_ls, vals[:, 1])


# --------------------------------------------------------------------------
# admissibility region and interpolation
# --------------------------------------------------------------------------

def lacunary_exponent_count(n: int) -> float:
    return float(n - 1)


def region_threshold(p: float, n: int, which: str) -> float:
    """Critical Re(alpha) above which the maximal operator is L^p bounded.

    which="lacunary": the folded-segment threshold of the lacunary
    operator; which="full": the threshold of the full spherical maximal
    operator.  p may be inf.
    """
    n = check_dimension(n)
    if not p > 1.0:
        raise ValueError("thresholds are stated for p > 1")
    x = 0.0 if np.isinf(p) else 1.0 / p
    if which == "lacunary":
        return (n - 1) * abs(x - 0.5) - (n - 1) / 2.0
    if which != "full":
        raise ValueError(f"unknown region {which!r}")
    pn = 4.0 if n == 2 else 2.0 * (n + 1) / (n - 1)
    if p <= 2.0:
        return (1.0 - n) + n * x
    if p <= pn:
        return (2.0 - n) * x - (1.0 - 2.0 * x) / (pn * (pn - 2.0))
    return (2.0 - n) * x - x / pn


def region_anchor_points(n: int) -> dict:
    """Figure anchor points as label -> (1/p, Re alpha, curve)."""
    n = check_dimension(n)
    pn = 4.0 if n == 2 else 2.0 * (n + 1) / (n - 1)
    return {
        "O": (0.0, 0.0, "both"),
        "D": (0.5, (1.0 - n) / 2.0, "lacunary"),
        "E": (1.0, 0.0, "lacunary"),
        "A": (1.0 / pn, (2.0 - n) / pn - 1.0 / pn ** 2, "full"),
        "B": (0.5, (2.0 - n) / 2.0, "full"),
        "C": (1.0, 1.0, "full"),
    }


def interpolation_alpha(alpha0: float, p0: float, alpha1: float, p: float) -> float:
    """Order obtained by complex interpolation between (alpha0, p0) and
    (alpha1, 2); affine in 1/p on [p0, 2]."""
    if not 1.0 < p0 < 2.0:
        raise ValueError("p0 must lie in (1, 2)")
    if not (p0 <= p <= 2.0):
        raise ValueError("p must lie in [p0, 2]")
    x, x0 = 1.0 / p, 1.0 / p0
    return alpha0 * (x - 0.5) / (x0 - 0.5) + alpha1 * (x0 - x) / (x0 - 0.5)


def interpolation_infimum(p: float, n: int, eps: float = 1e-5, m: int = 10) -> float:
    """Grid minimization of the interpolated order over admissible
    (alpha0, p0, alpha1); approaches 1 - n + (n-1)/p."""
    if not 1.0 < p < 2.0:
        raise ValueError("p must lie in (1, 2)")
    a0s = np.geomspace(eps, 0.5, m)
    a1s = (1.0 - n) / 2.0 + np.geomspace(eps, 0.5, m)
    p0s = 1.0 + np.geomspace(eps, p - 1.0, m)
    best = np.inf
    for a0 in a0s:
        for a1 in a1s:
            for p0 in p0s:
                best = min(best, interpolation_alpha(a0, p0, a1, p))
    return float(best)


def empirical_operator_norm(op, family, p: float) -> float:
    """sup over the family of ||op f||_p / ||f||_p (a lower bound for the
    operator norm)."""
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    worst = 0.0
    for member in family:
        f = member.f if isinstance(member, FamilyMember) else member
        denom = transform.lp_norm(f, p)
        if denom == 0.0:
            raise ValueError("family members must be nonzero")
        worst = max(worst, transform.lp_norm(op(f), p) / denom)
    return worst
