"""Special functions: incomplete gamma in log form, Temme's uniform expansion,
error functions, E1, the Jacobi theta function on the imaginary axis, and an
adaptive Gauss-Kronrod quadrature.
"""
import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NonConvergence

EULER_GAMMA = 0.57721566490153286060651209008240243
LOG_2PI = math.log(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)

_TINY = 1e-300
_SERIES_EPS = 2.0 ** -55


@dataclass(frozen=True)
class AccuracyConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_terms: int = 10**6
    quad_panel_limit: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_terms < 100:
            raise DomainError("max_terms must be at least 100")


DEFAULT_ACCURACY = AccuracyConfig()


def _as_output(value, scalar):
    if scalar:
        return float(np.asarray(value).reshape(-1)[0])
    return value


def log_gamma(a):
    """log Gamma(a) for a > 0."""
    if not a > 0 or not math.isfinite(a):
        raise DomainError(f"log_gamma needs a finite a > 0, got {a}")
    return math.lgamma(a)


def _stirling_remainder(a):
    # lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2]
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    big = a >= 10.0
    ab = a[big]
    inv2 = 1.0 / (ab * ab)
    out[big] = (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0
                - inv2 * (1.0 / 1680.0 - inv2 / 1188.0)))) / ab
    sm = a[~big]
    out[~big] = special.gammaln(sm) - ((sm - 0.5) * np.log(sm) - sm + 0.5 * LOG_2PI)
    return out


def log1pmx_neg(d):
    """d - log(1 + d), accurate near d = 0."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    small = np.abs(d) < 0.1
    ds = d[small]
    acc = np.zeros_like(ds)
    power = ds * ds
    for k in range(2, 24):
        acc += (1.0 if k % 2 == 0 else -1.0) * power / k
        power = power * ds
    out[small] = acc
    dl = d[~small]
    out[~small] = dl - np.log1p(dl)
    return out


def log_gamma_prefactor(a, x):
    """log(x**a * exp(-x) / Gamma(a)) for x > 0, stable for large a."""
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(a.shape)
    big = a >= 10.0
    ab, xb = a[big], x[big]
    d = (xb - ab) / ab
    near = np.abs(d) < 0.5
    phi = np.empty_like(d)
    phi[near] = log1pmx_neg(d[near])
    with np.errstate(divide="ignore"):    # x = 0 gives -inf, as it should
        phi[~near] = d[~near] - np.log(xb[~near] / ab[~near])
    out[big] = -ab * phi + 0.5 * np.log(ab / (2 * math.pi)) - _stirling_remainder(ab)
    asm, xsm = a[~big], x[~big]
    out[~big] = asm * np.log(xsm) - xsm - special.gammaln(asm)
    return out


def _series_lower(a, x, max_terms):
    # sum_k x^k / ((a+1)...(a+k))
    s = np.ones_like(a)
    term = np.ones_like(a)
    idx = np.arange(a.size)
    k = 0
    while idx.size:
        k += 1
        if k > max_terms:
            raise NonConvergence("incomplete gamma series did not converge")
        term[idx] *= x[idx] / (a[idx] + k)
        s[idx] += term[idx]
        idx = idx[term[idx] > _SERIES_EPS * s[idx]]
    return s


def _cf_upper(a, x, max_terms):
    # modified Lentz for the continued fraction of Gamma(a, x) e^x x^-a
    bb = x + 1.0 - a
    c = np.full_like(a, 1.0 / _TINY)
    d = 1.0 / bb
    h = d.copy()
    idx = np.arange(a.size)
    i = 0
    while idx.size:
        i += 1
        if i > max_terms:
            raise NonConvergence("incomplete gamma continued fraction did not converge")
        an = -i * (i - a[idx])
        bb[idx] += 2.0
        di = an * d[idx] + bb[idx]
        di = np.where(np.abs(di) < _TINY, _TINY, di)
        ci = bb[idx] + an / c[idx]
        ci = np.where(np.abs(ci) < _TINY, _TINY, ci)
        di = 1.0 / di
        delta = di * ci
        d[idx] = di
        c[idx] = ci
        h[idx] *= delta
        idx = idx[np.abs(delta - 1.0) > _SERIES_EPS]
    return h


def log_reg_gamma(a, x, cfg=DEFAULT_ACCURACY):
    """Return (log P(a, x), log Q(a, x)) elementwise.

    Series when x < a + 1, continued fraction otherwise; the complementary
    value comes from log1p so nothing underflows for large a.
    """
    scalar = np.ndim(a) == 0 and np.ndim(x) == 0
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    shape = a.shape
    a = a.ravel().copy()
    x = x.ravel().copy()
    if np.any(~(a > 0)) or np.any(np.isinf(a)):
        raise DomainError("incomplete gamma needs finite a > 0")
    if np.any(~(x >= 0)):
        raise DomainError("incomplete gamma needs x >= 0")
    logp = np.empty_like(a)
    logq = np.empty_like(a)
    zero = x == 0
    inf = np.isinf(x)
    logp[zero], logq[zero] = -np.inf, 0.0
    logp[inf], logq[inf] = 0.0, -np.inf
    body = ~(zero | inf)
    ser = body & (x < a + 1.0)
    cf = body & ~ser
    if ser.any():
        aa, xx = a[ser], x[ser]
        lp = log_gamma_prefactor(aa, xx) - np.log(aa) + np.log(_series_lower(aa, xx, cfg.max_terms))
        logp[ser] = lp
        logq[ser] = np.log1p(-np.exp(lp))
    if cf.any():
        aa, xx = a[cf], x[cf]
        lq = log_gamma_prefactor(aa, xx) + np.log(_cf_upper(aa, xx, cfg.max_terms))
        logq[cf] = lq
        logp[cf] = np.log1p(-np.exp(lq))
    logp = logp.reshape(shape)
    logq = logq.reshape(shape)
    if scalar:
        return float(logp[()]), float(logq[()])
    return logp, logq


def reg_lower_gamma(a, x, cfg=DEFAULT_ACCURACY):
    """Regularized lower incomplete gamma P(a, x)."""
    scalar = np.ndim(a) == 0 and np.ndim(x) == 0
    return _as_output(np.exp(log_reg_gamma(a, x, cfg)[0]), scalar)


def reg_upper_gamma(a, x, cfg=DEFAULT_ACCURACY):
    """Regularized upper incomplete gamma Q(a, x), computed directly."""
    scalar = np.ndim(a) == 0 and np.ndim(x) == 0
    return _as_output(np.exp(log_reg_gamma(a, x, cfg)[1]), scalar)


# Taylor coefficients in d = lambda - 1 for the first two coefficient
# functions of the uniform expansion; exact rationals from series reversion.
_C0_TAYLOR = (-1 / 3, 1 / 12, -23 / 540, 353 / 12960, -589 / 30240,
              81083 / 5443200, -7783 / 653184, 514303 / 52254720)
_C1_TAYLOR = (-1 / 540, -1 / 288, 23 / 6048, -3733 / 1088640, 3253 / 1088640,
              -135719 / 52254720, 176215213 / 77598259200, -4349006363 / 2172751257600)
_TAYLOR_SWITCH = 1e-2


def eta_of_lambda(lam):
    """Signed eta with eta**2 / 2 = lam - 1 - log(lam)."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    d = lam - 1.0
    phi = float(log1pmx_neg(d)) if abs(d) < 0.5 else d - math.log(lam)
    return math.copysign(math.sqrt(2.0 * phi), d)


@dataclass(frozen=True)
class GammaArgs:
    a: float
    lam: float
    eta: float

    @classmethod
    def from_lambda(cls, a, lam):
        if not a > 0:
            raise DomainError(f"a must be positive, got {a}")
        return cls(float(a), float(lam), eta_of_lambda(lam))


def temme_coefficients(lam):
    """(c0, c1) of the uniform expansion as functions of lambda."""
    d = lam - 1.0
    if abs(d) < _TAYLOR_SWITCH:
        c0 = sum(c * d**k for k, c in enumerate(_C0_TAYLOR))
        c1 = sum(c * d**k for k, c in enumerate(_C1_TAYLOR))
        return c0, c1
    eta = eta_of_lambda(lam)
    c0 = 1.0 / d - 1.0 / eta
    c1 = 1.0 / eta**3 - 1.0 / d**3 - 1.0 / d**2 - 1.0 / (12.0 * d)
    return c0, c1


def temme_uniform_P(args, order=1):
    """P(a, lam*a) from the uniform expansion truncated after c_order."""
    if args.a < 50:
        raise DomainError("uniform expansion is only used for a >= 50")
    if order not in (0, 1):
        raise DomainError("order must be 0 or 1")
    a, eta = args.a, args.eta
    c0, c1 = temme_coefficients(args.lam)
    series = c0 + (c1 / a if order == 1 else 0.0)
    main = 0.5 * math.erfc(-eta * math.sqrt(a / 2.0))
    return main - math.exp(-a * eta * eta / 2.0) / math.sqrt(2.0 * math.pi * a) * series


def upper_gamma_tail(args, scaled=False):
    """Two-term expansion of Q(a, lam*a) for lam bounded away from 1.

    With scaled=True the factor exp(-a eta^2/2)/sqrt(2 pi) is left out.
    """
    a, lam, eta = args.a, args.lam, args.eta
    d = lam - 1.0
    if abs(d) < _TAYLOR_SWITCH:
        raise DomainError("tail expansion needs lambda away from 1")
    body = 1.0 / (d * math.sqrt(a)) - (1.0 + 10.0 * lam + lam * lam) / (12.0 * d**3 * a**1.5)
    if scaled:
        return body
    return math.exp(-a * eta * eta / 2.0) / math.sqrt(2.0 * math.pi) * body


def euler_gamma():
    return EULER_GAMMA


def erfc(y):
    return special.erfc(y)


def erfcx(y):
    """exp(y**2) erfc(y); overflows to inf only for y below about -26.6."""
    return special.erfcx(y)


def erfc_asymptotic(y, terms=4):
    """Large-y expansion exp(-y^2)/sqrt(pi) * (1/y - 1/(2y^3) + ...)."""
    if not y > 0:
        raise DomainError("asymptotic erfc needs y > 0")
    acc = 0.0
    coef = 1.0
    for k in range(terms):
        acc += coef / y ** (2 * k + 1)
        coef *= -(2 * k + 1) / 2.0
    return math.exp(-y * y) / SQRT_PI * acc


def exp_integral_E1(s):
    if not s > 0:
        raise DomainError(f"E1 needs s > 0, got {s}")
    return float(special.exp1(s))


def _theta_modes(tau_im, cfg):
    if not tau_im > 0:
        raise DomainError("theta needs Im(tau) > 0")
    # stop once exp(-pi tau_im l^2) < 1e-18
    lmax = int(math.ceil(math.sqrt(18.0 * math.log(10.0) / (math.pi * tau_im))))
    if lmax > cfg.max_terms:
        raise NonConvergence("theta series needs too many terms")
    ell = np.arange(1, lmax + 1, dtype=float)
    return ell, np.exp(-math.pi * tau_im * ell * ell)


def jacobi_theta(zr, tau_im, cfg=DEFAULT_ACCURACY):
    """theta(z; i*tau_im) = sum_l exp(2 pi i l z - pi tau_im l^2) for real z."""
    ell, q = _theta_modes(tau_im, cfg)
    z = zr - math.floor(zr)
    return 1.0 + 2.0 * float(np.sum(q * np.cos(2 * math.pi * ell * z)))


def jacobi_log_theta_deriv(zr, tau_im, cfg=DEFAULT_ACCURACY):
    """d/dz log theta(z; i*tau_im) for real z."""
    ell, q = _theta_modes(tau_im, cfg)
    z = zr - math.floor(zr)
    num = -4.0 * math.pi * float(np.sum(ell * q * np.sin(2 * math.pi * ell * z)))
    den = 1.0 + 2.0 * float(np.sum(q * np.cos(2 * math.pi * ell * z)))
    return num / den


# 7-point Gauss / 15-point Kronrod pair on [-1, 1]
_XK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.0])
_WK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:14:2] = _WG[2::-1]


def _map_infinite(f, a, b):
    if math.isinf(a) and math.isinf(b):
        raise DomainError("split doubly infinite ranges at a finite point first")
    if math.isinf(b):
        return (lambda t: f(a + t / (1 - t)) / (1 - t) ** 2), 0.0, 1.0
    if math.isinf(a):
        return (lambda t: f(b - t / (1 - t)) / (1 - t) ** 2), 0.0, 1.0
    return f, a, b


def _gk15(f, lo, hi):
    centers = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centers[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ _KW)
    gauss = half * (fx @ _GW)
    absint = np.abs(half) * (np.abs(fx) @ _KW)
    return kron, np.abs(kron - gauss), absint


def quad_adaptive(f, a, b, cfg=DEFAULT_ACCURACY, points=(), full_output=False):
    """Globally adaptive G7-K15 quadrature with bisection of the worst panel.

    f must accept a 1-d float array and return an array of the same length.
    points are interior break points; at most one infinite endpoint per call.
    """
    a, b = float(a), float(b)
    if a == b:
        return (0.0, 0.0) if full_output else 0.0
    if b < a:
        out = quad_adaptive(f, b, a, cfg, points, full_output)
        return (-out[0], out[1]) if full_output else -out
    if math.isinf(a) and math.isinf(b):
        left = quad_adaptive(f, a, 0.0, cfg, (), True)
        right = quad_adaptive(f, 0.0, b, cfg, (), True)
        total = (left[0] + right[0], left[1] + right[1])
        return total if full_output else total[0]
    g, lo, hi = _map_infinite(f, a, b)
    if points and not (math.isinf(a) or math.isinf(b)):
        edges = np.unique(np.concatenate([[lo], [p for p in points if lo < p < hi], [hi]]))
    else:
        edges = np.array([lo, hi])
    vals, errs, absints = _gk15(g, edges[:-1], edges[1:])
    heap = [(-e, l, h, v, s) for e, l, h, v, s in zip(errs, edges[:-1], edges[1:], vals, absints)]
    heapq.heapify(heap)
    total = float(np.sum(vals))
    err = float(np.sum(errs))
    absum = float(np.sum(absints))
    splits = 0
    while err > max(cfg.abs_tol, cfg.rel_tol * abs(total), 50 * np.finfo(float).eps * absum):
        splits += 1
        if splits % 64 == 0 or splits > cfg.quad_panel_limit:
            # the running error sum drifts once it has shrunk by many orders
            err = math.fsum(-item[0] for item in heap)
            if err <= max(cfg.abs_tol, cfg.rel_tol * abs(total), 50 * np.finfo(float).eps * absum):
                break
        if splits > cfg.quad_panel_limit:
            raise NonConvergence(f"quadrature stalled at error {err:.3g} for value {total:.6g}")
        negerr, l, h, v, s = heapq.heappop(heap)
        m = 0.5 * (l + h)
        nv, ne, ns = _gk15(g, np.array([l, m]), np.array([m, h]))
        total += float(nv.sum()) - v
        err += float(ne.sum()) + negerr
        absum += float(ns.sum()) - s
        heapq.heappush(heap, (-ne[0], l, m, nv[0], ns[0]))
        heapq.heappush(heap, (-ne[1], m, h, nv[1], ns[1]))
    # re-sum to shed drift from the running updates
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return (total, err) if full_output else total
