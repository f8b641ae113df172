"""Complex-order spherical multiplier symbols, their kernels, and the
fitted-constant checkers for the symbol estimates.

The symbol family is normalized so that order zero reproduces the
elementary spherical function exactly: m(0-order, t)(lam) = phi_lam(t).
With that normalization the convolution kernel of the order-alpha
operator is `multiplier_kernel / sphere_area(n)`; equivalently the
sigma-weighted forward transform of `multiplier_kernel` equals
sphere_area(n) times `multiplier_symbol`.  The mass and duality tests
pin both statements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import specfun
from .geometry import check_dimension

__all__ = [
    "MultiplierSpec",
    "EstimateReport",
    "multiplier_symbol",
    "multiplier_symbol_deriv",
    "multiplier_kernel",
    "kernel_split",
    "kernel_small_radius_bound",
    "heat_symbol",
    "check_symbol_estimate",
    "ESTIMATE_KINDS",
]

ALPHA_MARGIN = 1e-3


@dataclass(frozen=True)
class MultiplierSpec:
    """Identifies one spherical multiplier: dimension, complex order, radius."""

    n: int
    alpha: complex
    t: float

    def __post_init__(self):
        check_dimension(self.n)
        a = complex(self.alpha)
        if a.real <= (1 - self.n) / 2.0 + ALPHA_MARGIN:
            raise ValueError(
                f"Re alpha = {a.real} must exceed (1-n)/2 + {ALPHA_MARGIN} for n={self.n}")
        if not self.t > 0:
            raise ValueError("radius t must be positive")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "t", float(self.t))

    @property
    def is_real_order(self) -> bool:
        return self.alpha.imag == 0.0


def _log_gamma_auto(a):
    # real positive orders stay in real arithmetic
    if isinstance(a, complex):
        return specfun.log_gamma(a)
    return gammaln(a)


def _symbol_prefactor(spec: MultiplierSpec):
    n, a, t = spec.n, spec.alpha, spec.t
    if spec.is_real_order:
        a = a.real
    log_pref = ((0.5 * (n - 1) + a) * np.log(2.0)
                + gammaln(n / 2.0) - 0.5 * np.log(np.pi)
                - _log_gamma_auto(a + (n - 1) / 2.0)
                + a * t - 2.0 * a * np.log(np.expm1(t))
                + (2.0 - n) * np.log(np.sinh(t)))
    return np.exp(log_pref)


def multiplier_symbol(spec: MultiplierSpec, lam):
    """Symbol m(lam) of the order-alpha spherical operator at radius t.

    Computed through the conical cosine integral; vectorized over lam.
    Order zero gives phi_lam(t).
    """
    beta = (spec.alpha if not spec.is_real_order else spec.alpha.real) + (spec.n - 3) / 2.0
    lam_arr = np.atleast_1d(lam)
    out = _symbol_prefactor(spec) * specfun._cos_transform_batch(beta, spec.t, lam_arr)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return out[0]
    return out


def multiplier_symbol_deriv(spec: MultiplierSpec, lam):
    """d/dlam of the symbol, via the differentiated integral kernel -s sin(lam s).

    Quadrature of the exact derivative integrand, not a finite difference.
    """
    beta = (spec.alpha if not spec.is_real_order else spec.alpha.real) + (spec.n - 3) / 2.0
    lam_arr = np.atleast_1d(lam)
    out = _symbol_prefactor(spec) * specfun._cos_transform_batch(beta, spec.t, lam_arr, deriv=True)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return out[0]
    return out


def multiplier_kernel(spec: MultiplierSpec, r):
    """Radial convolution kernel of the order-alpha operator (Re alpha > 0).

    (cosh t - cosh r)^(alpha-1) times its closed-form prefactor, supported
    on [0, t].  The r = t endpoint is singular for Re alpha < 1 (returns
    inf there); beyond t the kernel vanishes.
    """
    a, t, n = spec.alpha, spec.t, spec.n
    if a.real <= 0:
        raise ValueError("kernel representation requires Re alpha > 0")
    if spec.is_real_order:
        a = a.real
    log_pref = (a * (np.log(2.0) + t) - 2.0 * a * np.log(np.expm1(t))
                + (2.0 - n) * np.log(np.sinh(t)) - _log_gamma_auto(a))
    pref = np.exp(log_pref)
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 0
    r_arr = np.atleast_1d(r_arr)
    out = np.zeros(r_arr.shape, dtype=complex if not spec.is_real_order else float)
    inside = r_arr < t
    diff = 2.0 * np.sinh(0.5 * (t + r_arr[inside])) * np.sinh(0.5 * (t - r_arr[inside]))
    out[inside] = pref * np.exp((a - 1.0) * np.log(diff))
    at_edge = r_arr == t
    if np.any(at_edge):
        ra = complex(spec.alpha).real
        if ra > 1.0:
            out[at_edge] = 0.0
        elif ra == 1.0:
            out[at_edge] = pref
        else:
            out[at_edge] = np.inf
    return out[0] if scalar else out


def kernel_split(spec: MultiplierSpec, r):
    """Dominating pair (K1, K2) for the kernel at integer-scale radii t >= 1.

    K1 is the flat bulk piece supported on [0, t-1/2]; K2 carries the
    endpoint singularity (t-r)^(Re alpha - 1) on (t-1/2, t].
    """
    if spec.t < 1.0:
        raise ValueError("kernel split is for t >= 1")
    if spec.alpha.real <= 0:
        raise ValueError("kernel split requires Re alpha > 0")
    n, t, ra = spec.n, spec.t, spec.alpha.real
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    k1 = np.where(r_arr <= t - 0.5, np.exp(-(n - 1) * (t - 0.5)), 0.0)
    mid = (r_arr > t - 0.5) & (r_arr <= t)
    k2 = np.zeros(r_arr.shape)
    k2[mid] = np.exp(-(n - 1) * t) * (t - r_arr[mid]) ** (ra - 1.0)
    if np.asarray(r).ndim == 0:
        return float(k1[0]), float(k2[0])
    return k1, k2


def kernel_small_radius_bound(spec: MultiplierSpec, r):
    """Scale-invariant dominating kernel t^-n (1 - r/t)^(Re alpha - 1) for t <= 1."""
    if not 0 < spec.t <= 1.0:
        raise ValueError("small-radius bound is for 0 < t <= 1")
    if spec.alpha.real <= 0:
        raise ValueError("small-radius bound requires Re alpha > 0")
    t, ra, n = spec.t, spec.alpha.real, spec.n
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros(r_arr.shape)
    inside = r_arr < t
    out[inside] = t ** (-n) * (1.0 - r_arr[inside] / t) ** (ra - 1.0)
    if np.asarray(r).ndim == 0:
        return float(out[0])
    return out


def heat_symbol(t: float, lam):
    """Spectral function e^(-t lam^2) of the shifted heat semigroup."""
    if t <= 0:
        raise ValueError("time must be positive")
    lam_arr = np.asarray(lam, dtype=float)
    return np.exp(-t * lam_arr ** 2)


# --------------------------------------------------------------------------
# fitted-constant estimate checks
# --------------------------------------------------------------------------

ESTIMATE_KINDS = ("decay", "derivative", "highfreq")


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one calibrate/validate run for a symbol inequality."""

    estimate_id: str
    n: int
    alpha: complex
    fitted_constant: float
    worst_ratio: float
    slack: float
    passed: bool
    calibration: str
    validation: str

    def csv_row(self) -> str:
        return (f"{self.estimate_id},{self.n},{self.alpha.real:.12g},"
                f"{self.alpha.imag:.12g},{self.fitted_constant:.12g},"
                f"{self.worst_ratio:.12g},{self.slack:.12g},{int(self.passed)}")

    @staticmethod
    def csv_header() -> str:
        return "estimate_id,n,re_alpha,im_alpha,fitted_constant,worst_ratio,slack,pass"


def _estimate_ratios(kind: str, alpha: complex, n: int, ts, lams) -> np.ndarray:
    """Max-over-lambda ratio |m| / bound for each t in the grid.

    `lams` is either one shared array or a per-t sequence of arrays (the
    latter lets highfreq grids track the |lam| t >= 1 domain with uniform
    phase coverage).
    """
    out = np.empty(len(ts))
    shared = np.asarray(lams[0]).ndim == 0
    for i, t in enumerate(ts):
        lam_t = np.asarray(lams if shared else lams[i], dtype=float)
        if lam_t.size == 0:
            out[i] = np.nan
            continue
        spec = MultiplierSpec(n, alpha, float(t))
        if kind == "decay":
            vals = np.abs(multiplier_symbol(spec, lam_t))
            bound = (1.0 + t) * np.exp(-0.5 * (n - 1) * t)
            out[i] = float(vals.max()) / bound
        elif kind == "derivative":
            vals = np.abs(multiplier_symbol_deriv(spec, lam_t))
            out[i] = float(vals.max()) / t
        elif kind == "highfreq":
            keep = np.abs(lam_t) * t >= 1.0
            if not np.any(keep):
                out[i] = np.nan
                continue
            lk = lam_t[keep]
            vals = np.abs(multiplier_symbol(spec, lk))
            bound = (np.abs(lk) * t) ** (-(alpha.real + 0.5 * (n - 1)))
            out[i] = float((vals / bound).max())
        else:
            raise ValueError(f"unknown estimate kind {kind!r}")
    return out


def _check_domain(kind: str, ts) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise ValueError("radii must be positive")
    if kind in ("derivative", "highfreq") and np.any(ts > 1.0):
        raise ValueError(f"estimate kind {kind!r} is stated for 0 < t <= 1")
    return ts


def estimate_grids(kind: str, t_lo: float = 2.0 ** -10, t_hi: float = 8.0,
                   lam_max: float = 200.0, n_t: int = 10, n_lam: int = 10,
                   refine: int = 4):
    """Standard (calibration, validation) grids for one estimate kind.

    Radii are log-spaced; validation is `refine` times finer in both
    directions.  For decay/derivative the spectral grid is {0} plus a
    log-spaced sweep.  The highfreq ratio oscillates with period pi in
    the product lam*t, so its spectral grids are built per radius with
    uniform phase coverage (lam*t steps of 0.5 on calibration and 0.5 /
    refine on validation); a log lattice cannot estimate the supremum to
    within the validation slack.
    """
    if kind in ("derivative", "highfreq"):
        t_hi = min(t_hi, 1.0)
    ts_c = np.logspace(np.log10(t_lo), np.log10(t_hi), n_t)
    ts_v = np.logspace(np.log10(t_lo), np.log10(t_hi), n_t * refine)
    if kind in ("decay", "derivative"):
        lam_c = np.concatenate(([0.0], np.logspace(-1, np.log10(lam_max), n_lam - 1)))
        lam_v = np.concatenate(([0.0], np.logspace(-1, np.log10(lam_max), n_lam * refine - 1)))
        return (ts_c, lam_c), (ts_v, lam_v)
    if kind != "highfreq":
        raise ValueError(f"unknown estimate kind {kind!r}")

    def per_t(ts, dphase):
        grids = []
        for t in ts:
            if lam_max * t < 1.0:
                grids.append(np.empty(0))
                continue
            count = max(2, int(np.ceil((lam_max * t - 1.0) / dphase)) + 1)
            grids.append(np.linspace(1.0 / t, lam_max, count))
        return grids

    return (ts_c, per_t(ts_c, 0.5)), (ts_v, per_t(ts_v, 0.5 / refine))


def check_symbol_estimate(kind: str, alpha, n: int, calibration, validation,
                          slack: float = 1.2) -> EstimateReport:
    """Calibrate the implicit constant of a symbol inequality, then validate.

    `calibration` and `validation` are (ts, lams) grid pairs.  The fitted
    constant is the max ratio |m| / bound over the calibration grid; the
    check passes when the max ratio over the (finer) validation grid does
    not exceed slack * constant.  For kind="highfreq" the grids are
    filtered to |lam| t >= 1, and the report fails with an error if the
    domain filter empties a grid.
    """
    if kind not in ESTIMATE_KINDS:
        raise ValueError(f"unknown estimate kind {kind!r}")
    alpha = complex(alpha)
    n = check_dimension(n)
    (ts_c, lam_c), (ts_v, lam_v) = calibration, validation
    if len(ts_c) == 0 or len(lam_c) == 0 or len(ts_v) == 0 or len(lam_v) == 0:
        raise ValueError("calibration and validation grids must be nonempty")
    ts_c = _check_domain(kind, ts_c)
    ts_v = _check_domain(kind, ts_v)
    rc = _estimate_ratios(kind, alpha, n, ts_c, lam_c)
    rv = _estimate_ratios(kind, alpha, n, ts_v, lam_v)
    rc = rc[~np.isnan(rc)]
    rv = rv[~np.isnan(rv)]
    if rc.size == 0 or rv.size == 0:
        raise ValueError(f"domain filter for {kind!r} left an empty grid")
    fitted = float(rc.max())
    worst = float(rv.max())
    return EstimateReport(
        estimate_id=kind, n=n, alpha=alpha, fitted_constant=fitted,
        worst_ratio=worst, slack=float(slack), passed=bool(worst <= slack * fitted),
        calibration=f"{len(ts_c)}x{len(lam_c)}", validation=f"{len(ts_v)}x{len(lam_v)}")
