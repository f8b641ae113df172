"""Special functions for radial analysis on H^n.

Provides the complex log-gamma (with pole detection), the elementary
spherical function evaluated from its angular-integral definition, the
conical cosine-transform integral with an algebraic endpoint singularity,
and the Harish-Chandra Plancherel density.

The cosine-transform engine is the workhorse of the whole package: the
spherical multiplier symbols, the spherical-transform matrix and all the
symbol estimates run through `_cos_transform_batch`.
"""

from __future__ import annotations

from math import factorial

import numpy as np
from scipy.special import gammaln, loggamma

from ._quad import QuadratureError, geometric_edges, panel_nodes, power_fit, split_edges
from .geometry import check_dimension, sphere_area

__all__ = [
    "PoleError",
    "QuadratureError",
    "log_gamma",
    "spherical_function",
    "conical_cosine_integral",
    "spherical_function_prefactor",
    "inv_c_squared",
    "plancherel_constant",
    "paper_inversion_constant",
    "plancherel_density",
]


class PoleError(ValueError):
    """Gamma evaluated at a nonpositive integer."""


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z.

    Raises PoleError at the poles z = 0, -1, -2, ...
    """
    z = np.asarray(z, dtype=complex)
    on_pole = (np.abs(z.imag) < 1e-300) & (z.real <= 0) & (np.abs(z.real - np.round(z.real)) == 0)
    if np.any(on_pole):
        raise PoleError(f"log_gamma pole at z={z[on_pole].flat[0]}")
    out = loggamma(z)
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# spherical function: angular-integral definition
# --------------------------------------------------------------------------

def _check_spectral_parameter(lam, n: int):
    """Spectral parameters are real, or purely imaginary with |Im| = (n-1)/2."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    im = lam.imag
    bad = (np.abs(im) > 1e-12) & (np.abs(np.abs(im) - (n - 1) / 2.0) > 1e-12)
    bad |= (np.abs(im) > 1e-12) & (np.abs(lam.real) > 1e-12)
    if np.any(bad):
        raise ValueError(
            "complex spectral parameter must be real or +-i(n-1)/2, got "
            f"{lam[bad].flat[0]}")
    return lam


def spherical_function(lam, r: float, n: int, abs_tol: float = 1e-12,
                       max_nodes: int = 1 << 20):
    """Elementary spherical function phi_lambda(r) on H^n.

    Evaluates the angular integral over [0, pi] of
    (cosh r - cos s sinh r)^(i lam - (n-1)/2) sin^(n-2) s, normalized so
    that phi_lambda(0) = 1.  `lam` may be an array; real values give real
    results, and the two imaginary values +-i(n-1)/2 are accepted for
    endpoint checks.

    Panels are equidistributed in the phase variable
    g(s) = log(cosh r - cos s sinh r), which both tracks the oscillation
    of the integrand and clusters nodes on the small-s boundary layer.
    """
    n = check_dimension(n)
    scalar_in = np.isscalar(lam) or np.asarray(lam).ndim == 0
    lam = _check_spectral_parameter(lam, n)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0.0:
        out = np.ones(lam.shape, dtype=complex)
        return _despin(out, scalar_in)
    lmax = float(np.max(np.abs(lam.real))) + float(np.max(np.abs(lam.imag)))
    norm = np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)

    def attempt(phase_per_panel: float, p: int):
        npan = max(8, int(np.ceil(2.0 * r * max(lmax, 1.0) / phase_per_panel)),
                   int(np.ceil((n - 1) * r / 2.0)))
        g_edges = np.linspace(-r, r, npan + 1)
        arg = np.clip((np.cosh(r) - np.exp(g_edges)) / np.sinh(r), -1.0, 1.0)
        s_edges = np.arccos(arg)
        s_edges[0], s_edges[-1] = 0.0, np.pi
        nodes, weights = panel_nodes(s_edges, p)
        # cosh r - cos s sinh r = e^-r + 2 sin^2(s/2) sinh r, cancellation-free
        g = np.log(np.exp(-r) + 2.0 * np.sin(0.5 * nodes) ** 2 * np.sinh(r))
        amp = weights * np.exp(-0.5 * (n - 1) * g) * np.sin(nodes) ** (n - 2)
        osc = np.exp(1j * np.outer(lam, g))
        return norm * (osc @ amp), nodes.size

    prev = None
    total = 0
    for (ppp, p) in ((2.0, 14), (1.2, 18), (0.7, 24)):
        val, used = attempt(ppp, p)
        total += used
        if prev is not None:
            err = np.abs(val - prev)
            if np.all(err <= np.maximum(abs_tol, 1e-10 * np.abs(val))):
                return _despin(val, scalar_in)
        if total > max_nodes:
            break
        prev = val
    raise QuadratureError(f"spherical_function failed to converge at r={r}, n={n}")


def _despin(values: np.ndarray, scalar_in: bool):
    """Drop a negligible imaginary part and unwrap singleton arrays."""
    if np.all(np.abs(values.imag) <= 1e-12 + 1e-10 * np.abs(values.real)):
        values = values.real
    if scalar_in and values.shape == (1,):
        return values[0]
    return values


# --------------------------------------------------------------------------
# conical cosine-transform engine
# --------------------------------------------------------------------------

def _cosh_diff(t: float, s):
    # cosh t - cosh s without cancellation
    return 2.0 * np.sinh(0.5 * (t + s)) * np.sinh(0.5 * (t - s))


def _sinhc(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-5
    safe = np.where(small, 1.0, y)
    return np.where(small, 1.0 + y * y / 6.0, np.sinh(safe) / safe)


def _tail_series(beta, t: float, d: float, mu, deriv: bool, m_fit: int, j_max: int):
    """Endpoint contribution int_{t(1-d)}^{t} (cosh t - cosh s)^beta k(s) ds.

    Uses (cosh t - cosh s) = t v S(v) with v = 1 - s/t, fits S^beta by a
    short power series and integrates the singular powers v^(beta+m)
    against cos/sin exactly.  Requires |mu| d <= ~2.5 with mu = lam * t.
    """
    def smooth(u):
        v = d * u
        return np.exp(beta * (np.log(np.sinh(0.5 * t * (2.0 - v))) + np.log(_sinhc(0.5 * t * v))))

    a = power_fit(smooth, m_fit)
    if deriv:
        # extra factor (1 - v) from s = t(1 - v)
        shifted = np.concatenate((np.zeros(1, dtype=a.dtype), a)) * d
        a = np.concatenate((a, np.zeros(1, dtype=a.dtype))) - shifted
    m_idx = np.arange(a.size)
    mud = np.asarray(mu) * d
    jj = np.arange(j_max + 1)
    # q_j = sum_m a_m / (beta + m + 2j + 1)  and the sine analogue
    qc = np.array([np.sum(a / (beta + m_idx + 2 * j + 1.0)) for j in jj])
    qs = np.array([np.sum(a / (beta + m_idx + 2 * j + 2.0)) for j in jj])
    sgn = (-1.0) ** jj
    fc = sgn / np.array([float(factorial(2 * j)) for j in jj])
    fs = sgn / np.array([float(factorial(2 * j + 1)) for j in jj])
    pow2 = mud[None, :] ** (2 * jj[:, None])
    A = (qc * fc) @ pow2
    B = (qs * fs) @ (pow2 * mud[None, :])
    phase_c = np.cos(np.asarray(mu))
    phase_s = np.sin(np.asarray(mu))
    scale = np.exp((beta + 1.0) * (np.log(t) + np.log(d)))
    if deriv:
        return -t * scale * (phase_s * A - phase_c * B)
    return scale * (phase_c * A + phase_s * B)


def _cos_transform_once(beta, t: float, lams: np.ndarray, deriv: bool, s_lo: float,
                        p: int, osc_cap: float, m_fit: int, j_max: int):
    x0 = s_lo / t
    lam_abs = np.abs(lams.real) + np.abs(lams.imag)
    wmax = max(float(lam_abs.max()) * t if lams.size else 0.0, 1e-9)
    d = min(1.0 - x0, 0.25, 0.5 * np.pi / t, 2.0 / max(wmax, 8.0))
    mu = lams * t
    tail = _tail_series(beta, t, d, mu, deriv, m_fit, j_max)
    xc = 1.0 - d
    if xc <= x0 + 1e-15:
        return tail, 0
    h_osc = min(osc_cap / wmax, 0.35)
    edges = geometric_edges(x0, xc, start=min(d, xc - x0))
    edges = split_edges(edges, h_osc)
    x, w = panel_nodes(edges, p)
    s = t * x
    amp = w * t * np.exp(beta * np.log(_cosh_diff(t, s)))
    phase = np.outer(lams, s)
    if deriv:
        bulk = (-np.sin(phase)) @ (amp * s)
    else:
        bulk = np.cos(phase) @ amp
    return bulk + tail, x.size


def _cos_transform_batch(beta, t: float, lams, deriv: bool = False, s_lo: float = 0.0,
                         abs_tol: float = 1e-10, rel_tol: float = 1e-8,
                         max_nodes: int = 1 << 20):
    """int_{s_lo}^t (cosh t - cosh s)^beta k(s) ds over an array of lambdas.

    k(s) = cos(lam s), or -s sin(lam s) when deriv=True (the d/dlam
    integrand).  beta may be complex with Re beta > -1.  Adaptive over a
    fixed ladder of panel/fit resolutions.  Real beta and real lambdas
    stay in real arithmetic.
    """
    beta = complex(beta)
    if beta.real <= -1.0:
        raise ValueError(f"exponent Re beta = {beta.real} must exceed -1")
    if beta.imag == 0.0:
        beta = beta.real
    lams = np.atleast_1d(np.asarray(lams))
    if not np.iscomplexobj(lams):
        lams = lams.astype(float)
    if t < 0 or s_lo < 0:
        raise ValueError("domain endpoints must be nonnegative")
    if t == 0.0 or s_lo >= t:
        return np.zeros(lams.shape)
    prev = None
    used = 0
    for (p, osc_cap, m_fit, j_max) in ((14, 10.0, 16, 16), (18, 7.0, 20, 22), (26, 4.5, 26, 28)):
        val, nn = _cos_transform_once(beta, t, lams, deriv, s_lo, p, osc_cap, m_fit, j_max)
        used += nn
        if prev is not None:
            err = np.abs(val - prev)
            if np.all(err <= abs_tol + rel_tol * np.abs(val)):
                return val
        if used > max_nodes:
            break
        prev = val
    raise QuadratureError(
        f"conical cosine transform failed to converge (beta={beta}, t={t})")


def conical_cosine_integral(lam, t: float, alpha, n: int, deriv: bool = False):
    """int_0^t (cosh t - cosh s)^(alpha + (n-3)/2) cos(lam s) ds.

    This is the Legendre-function integral representation with its
    endpoint singularity handled analytically; `deriv=True` integrates
    the differentiated kernel -s sin(lam s) instead.  Valid for complex
    alpha with Re alpha > (1-n)/2 and t > 0.
    """
    n = check_dimension(n)
    alpha = complex(alpha)
    if alpha.real <= (1 - n) / 2.0:
        raise ValueError(f"Re alpha = {alpha.real} must exceed (1-n)/2 = {(1 - n) / 2}")
    if t <= 0:
        raise ValueError("t must be positive")
    beta = alpha if alpha.imag != 0 else alpha.real
    beta = beta + (n - 3) / 2.0
    lam_arr = np.atleast_1d(lam)
    out = _cos_transform_batch(beta, float(t), lam_arr, deriv=deriv)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return out[0]
    return out


def spherical_function_prefactor(n: int, r):
    """Constant turning the conical cosine integral into phi_lambda(r)."""
    n = check_dimension(n)
    c = 2.0 ** ((n - 1) / 2.0) * np.exp(gammaln(n / 2.0) - gammaln((n - 1) / 2.0)) / np.sqrt(np.pi)
    return c * np.sinh(r) ** (2.0 - n)


# --------------------------------------------------------------------------
# Plancherel density
# --------------------------------------------------------------------------

def inv_c_squared(lam, n: int):
    """|c(lambda)|^-2 for the Harish-Chandra c-function of H^n.

    Vanishes like lambda^2 as lambda -> 0 (rank one); lam = 0 maps to 0
    by continuity.
    """
    n = check_dimension(n)
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    if np.any(lam < 0):
        raise ValueError("spectral parameter must be nonnegative")
    out = np.zeros(lam.shape)
    pos = lam > 0
    z = 1j * lam[pos]
    logratio = 2.0 * np.real(loggamma(z + (n - 1) / 2.0) - loggamma(z))
    logconst = 2.0 * (gammaln((n - 1) / 2.0) - gammaln(n - 1.0))
    out[pos] = np.exp(logratio + logconst)
    return float(out[0]) if scalar else out


def paper_inversion_constant(n: int) -> float:
    """The constant 2^(n-1) pi^(n/2-1) / Gamma(n/2)."""
    n = check_dimension(n)
    return float(2.0 ** (n - 1) * np.pi ** (n / 2.0 - 1.0) / np.exp(gammaln(n / 2.0)))


def plancherel_constant(n: int) -> float:
    """Spectral-measure constant paired with the sigma-weighted transform.

    With the forward transform carrying the full polar measure
    sigma_{n-1} sinh^(n-1) r dr, the Plancherel measure is
    plancherel_constant(n) * |c(lambda)|^-2 dlambda.
    """
    return paper_inversion_constant(n) / sphere_area(n) ** 2


def plancherel_density(lam, n: int):
    """Plancherel density plancherel_constant(n) * |c(lambda)|^-2."""
    return plancherel_constant(n) * inv_c_squared(lam, n)
