"""Exact finite-n correlation kernel from the orthogonal monomials."""
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidParams
from .model import PlanePoint, in_gap
from .specfun import DEFAULT_ACCURACY, log_reg_gamma

# exp(-745) is below the smallest subnormal double
DROP_LOG = 745.0


def _shape_params(params, j):
    j = np.asarray(j, dtype=float)
    a = (j + params.alpha) / params.b
    x1 = params.n * params.r1 ** (2 * params.b)
    x2 = params.n * params.r2 ** (2 * params.b)
    return a, x1, x2


def _log_mass(params, j, cfg=DEFAULT_ACCURACY):
    """log of P(a, n r1^2b) + Q(a, n r2^2b), the gamma mass left outside the gap."""
    a, x1, x2 = _shape_params(params, j)
    logp1, _ = log_reg_gamma(a, x1, cfg)
    _, logq2 = log_reg_gamma(a, x2, cfg)
    return np.logaddexp(logp1, logq2)


@functools.lru_cache(maxsize=64)
def _log_h_table(params):
    j = np.arange(1, params.n + 1, dtype=float)
    a = (j + params.alpha) / params.b
    table = gammaln(a) - math.log(params.b) - a * math.log(params.n) + _log_mass(params, j)
    table.setflags(write=False)
    return table


def log_hj(params, j):
    """log of the squared norm h_j of z^(j-1), 1 <= j <= n."""
    j = np.asarray(j)
    if np.any(j < 1) or np.any(j > params.n):
        raise InvalidParams("mode index must lie in 1..n")
    out = _log_h_table(params)[j.astype(int) - 1]
    return float(out) if out.ndim == 0 else out


def _as_point(p):
    if isinstance(p, PlanePoint):
        return p
    if isinstance(p, complex):
        return PlanePoint.from_complex(p)
    r, theta = p
    return PlanePoint(float(r), float(theta))


def _log_terms(params, z, w, j):
    n, b, alpha = params.n, params.b, params.alpha
    power = j - 1.0 + alpha
    rr = z.r * w.r
    base = -0.5 * n * (z.r ** (2 * b) + w.r ** (2 * b))
    if rr > 0:
        logmag = base + power * math.log(rr)
    else:
        logmag = np.where(power == 0, base, np.where(power > 0, -np.inf, np.inf))
    logmag = logmag - _log_h_table(params)[j.astype(int) - 1]
    phase = (j - 1.0) * (z.theta - w.theta)
    return logmag, phase


@dataclass(frozen=True)
class LogComplex:
    log_mag: float
    phase: float

    def __post_init__(self):
        if self.log_mag == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            # normalize into (-pi, pi]
            ph = -math.remainder(-self.phase, 2 * math.pi)
            object.__setattr__(self, "phase", math.pi if ph == -math.pi else ph)

    def to_complex(self):
        return math.exp(self.log_mag) * complex(math.cos(self.phase), math.sin(self.phase))


def kernel_term(params, j, z, w):
    """The j-th summand of K_n(z, w) as (log magnitude, phase); zero on the gap."""
    z, w = _as_point(z), _as_point(w)
    if not 1 <= j <= params.n:
        raise InvalidParams("mode index must lie in 1..n")
    if in_gap(params, z.r) or in_gap(params, w.r):
        return LogComplex(-math.inf, 0.0)
    logmag, phase = _log_terms(params, z, w, np.asarray([j], dtype=float))
    return LogComplex(float(logmag[0]), float(phase[0]))


@dataclass(frozen=True)
class KernelValue:
    value: complex
    terms_summed: int
    max_term_log: float
    dropped_terms: int


def kernel_eval(params, z, w):
    """K_n(z, w) summed over all modes in the log domain.

    Terms more than DROP_LOG below the largest are dropped; the rest are
    rescaled by the largest and added with exactly rounded summation.
    """
    z, w = _as_point(z), _as_point(w)
    n = params.n
    if in_gap(params, z.r) or in_gap(params, w.r):
        return KernelValue(0j, 0, -math.inf, n)
    j = np.arange(1, n + 1, dtype=float)
    logmag, phase = _log_terms(params, z, w, j)
    top = float(np.max(logmag))
    if top == -math.inf:
        # origin with alpha > 0: the weight vanishes there
        return KernelValue(0j, 0, top, n)
    if not math.isfinite(top):
        raise InvalidParams("kernel is infinite at the origin for alpha < 0")
    keep = logmag >= top - DROP_LOG
    scaled = np.exp(logmag[keep] - top)
    re = math.fsum(scaled * np.cos(phase[keep]))
    im = math.fsum(scaled * np.sin(phase[keep]))
    scale = math.exp(top)
    kept = int(keep.sum())
    return KernelValue(complex(re * scale, im * scale), kept, top, n - kept)


def kernel_value(params, z, w):
    return kernel_eval(params, z, w).value


def one_point(params, z):
    """One-point density K_n(z, z)."""
    v = kernel_value(params, z, z)
    return max(v.real, 0.0)


def kernel_matrix(params, points):
    """Matrix [K_n(p_i, p_k)] for a list of points."""
    pts = [_as_point(p) for p in points]
    m = len(pts)
    out = np.empty((m, m), dtype=complex)
    for i in range(m):
        out[i, i] = kernel_value(params, pts[i], pts[i])
        for k in range(i + 1, m):
            out[i, k] = kernel_value(params, pts[i], pts[k])
            out[k, i] = out[i, k].conjugate()
    return out


def radial_cdf(params, j, r, cfg=DEFAULT_ACCURACY):
    """Distribution function of |z| under the normalized weight of mode j.

    The weight is proportional to r^(2(j+alpha)-1) exp(-n r^2b) off the gap;
    with u = n r^2b it is a gamma(a) law conditioned to avoid (x1, x2).
    """
    a, x1, x2 = _shape_params(params, j)
    r = np.asarray(r, dtype=float)
    a, r = np.broadcast_arrays(a, r)
    if np.any(r < 0):
        raise InvalidParams("radius must be non-negative")
    lmass = _log_mass(params, a * params.b - params.alpha, cfg)
    out = np.empty(a.shape)
    inner = r <= params.r1
    outer = r >= params.r2
    mid = ~(inner | outer)
    if inner.any():
        u = params.n * r[inner] ** (2 * params.b)
        out[inner] = np.exp(log_reg_gamma(a[inner], u, cfg)[0] - lmass[inner])
    if mid.any():
        out[mid] = np.exp(log_reg_gamma(a[mid], x1, cfg)[0] - lmass[mid])
    if outer.any():
        u = params.n * r[outer] ** (2 * params.b)
        out[outer] = -np.expm1(log_reg_gamma(a[outer], u, cfg)[1] - lmass[outer])
    return float(out) if out.ndim == 0 else out


def expected_count_in_disk(params, r):
    """Expected number of particles with |z| <= r, summed mode by mode."""
    j = np.arange(1, params.n + 1, dtype=float)
    return math.fsum(np.atleast_1d(radial_cdf(params, j, np.full(j.shape, float(r)))))
