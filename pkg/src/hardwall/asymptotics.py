"""Large-n predictions for the kernel near and across the hard walls.

Covers the universal erfc integrals, the four-term expansion at the inner
wall, the semi-hard profile, the two Szego-type kernels that govern
correlations across the gap, the theta-function oscillation factor, and the
regime-by-regime asymptotics of the norms h_j.
"""
import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DegenerateAngles, DomainError, Divergent, NonConvergence, RegimeUnknown
from .model import equilibrium, hard_edge_point
from .specfun import (DEFAULT_ACCURACY, AccuracyConfig, EULER_GAMMA, SQRT_PI, eta_of_lambda,
                      exp_integral_E1, jacobi_log_theta_deriv, quad_adaptive)

INTEGRAL_CUTOFF = 50.0
# beyond this point the regularized integrands are taken from their large-y series
TAIL_SWITCH = 8.0
_INTEGRAL_CFG = AccuracyConfig(abs_tol=1e-14, rel_tol=1e-13, quad_panel_limit=2000)
_TAIL_TERMS = 20


class Theorem(enum.Enum):
    HardMicro = "1.1"
    SemiHardMicro = "1.2"
    R1R2Macro = "1.3"
    R1R1Macro = "1.4"
    SemiHardMacroBound = "1.5"


@dataclass(frozen=True)
class Prediction:
    theorem: Theorem
    breakdown: dict
    error_order: str
    value: complex = field(init=False)

    def __post_init__(self):
        total = 0j
        for v in self.breakdown.values():
            total += v
        object.__setattr__(self, "value", complex(total))

    def to_json_dict(self):
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "breakdown": {k: [complex(v).real, complex(v).imag] for k, v in self.breakdown.items()},
            "error_order": self.error_order,
        }


def _eq(params, eq):
    return equilibrium(params) if eq is None else eq


# ---------------------------------------------------------------- integrals

def _mills_ratio(y):
    # exp(-y^2) / (sqrt(pi) erfc(y)); erfcx overflows to inf for y << 0 giving 0
    return 1.0 / (SQRT_PI * special.erfcx(y))


def _mills_minus_y(y):
    """R(y) - y without cancellation; the large-y series takes over past TAIL_SWITCH."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    small = y < TAIL_SWITCH
    out[small] = _mills_ratio(y[small]) - y[small]
    yl = y[~small]
    acc = np.zeros_like(yl)
    for k, c in reversed(list(enumerate(_inverse_erfcx_series(_TAIL_TERMS)))):
        if k:
            acc += c * yl ** (1 - 2 * k)
    out[~small] = acc
    return out


def _inverse_erfcx_series(terms):
    # sqrt(pi) y erfcx(y) ~ sum_k e_k u^k with u = y^-2; return coefficients of its reciprocal
    e = [1.0]
    for k in range(1, terms):
        e.append(-e[-1] * (2 * k - 1) / 2.0)
    r = [1.0]
    for k in range(1, terms):
        r.append(-sum(e[i] * r[k - i] for i in range(1, k + 1)))
    return r


def _laurent_mul(p, q):
    out = {}
    for i, a in p.items():
        for k, c in q.items():
            out[i + k] = out.get(i + k, 0.0) + a * c
    return out


def _tail_integral(series, subtract, cutoff):
    """Integral over (cutoff, inf) of series - subtract, both given as {power: coef}."""
    diff = dict(series)
    for p, c in subtract.items():
        diff[p] = diff.get(p, 0.0) - c
    total = 0.0
    for p, c in diff.items():
        if p >= -1:
            if abs(c) > 1e-12:
                raise AssertionError(f"regularization leaves y^{p} with coefficient {c}")
            continue
        total += c * cutoff ** (p + 1) / (-p - 1)
    return total


@functools.lru_cache(maxsize=1)
def _tail_series():
    r = _inverse_erfcx_series(_TAIL_TERMS)
    mills = {1 - 2 * k: c for k, c in enumerate(r)}           # R(y) ~ y + 1/(2y) - ...
    ymills = {p + 1: c for p, c in mills.items()}
    y3mills = {p + 3: c for p, c in mills.items()}
    mills_sq = _laurent_mul(mills, mills)
    ymills_sq = _laurent_mul(ymills, ymills)
    rational = {-1 - 2 * m: 0.5 * (-1) ** m for m in range(_TAIL_TERMS)}
    rational[1] = 1.0
    return {
        "I": (ymills, {2: 1.0, 0: 0.5}),
        "I1": (mills, rational),
        "I2": (y3mills, {4: 1.0, 2: 0.5, 0: -0.5}),
        "I3": (mills_sq, {2: 1.0, 0: 1.0}),
        "I4": (ymills_sq, {4: 1.0, 2: 1.0, 0: -0.75}),
    }


_INTEGRANDS = {
    "I": (lambda y, m: y * m, lambda y: y * y + 0.5),
    "I1": (lambda y, m: m, lambda y: y + y / (2.0 * (1.0 + y * y))),
    "I2": (lambda y, m: y**3 * m, lambda y: y**4 + 0.5 * y * y - 0.5),
    "I3": (lambda y, m: m * m, lambda y: y * y + 1.0),
    "I4": (lambda y, m: (y * m) ** 2, lambda y: y**4 + y * y - 0.75),
}


def _regularized_integral(name, cfg):
    body, poly = _INTEGRANDS[name]
    left = quad_adaptive(lambda y: body(y, _mills_ratio(y)), -INTEGRAL_CUTOFF, 0.0, cfg)
    right = quad_adaptive(lambda y: body(y, _mills_ratio(y)) - poly(y), 0.0, TAIL_SWITCH, cfg)
    series, subtract = _tail_series()[name]
    return left + right + _tail_integral(series, subtract, TAIL_SWITCH)


@functools.lru_cache(maxsize=8)
def integral_I(cfg=_INTEGRAL_CFG):
    """Regularized integral of y R(y) - (y^2 + 1/2) 1{y>0}, R the Mills-type ratio."""
    return _regularized_integral("I", cfg)


@functools.lru_cache(maxsize=8)
def integrals_I1_to_I4(cfg=_INTEGRAL_CFG):
    return tuple(_regularized_integral(k, cfg) for k in ("I1", "I2", "I3", "I4"))


# ------------------------------------------------------- inner hard wall, micro

def _one_minus_poly_exp(s):
    # 1 - (1 + s) e^{-s}
    if s < 0.1:
        acc, term = 0.0, 1.0
        for k in range(1, 20):
            term *= s / k
            if k >= 2:
                acc += (-1) ** k * (k - 1) * term
        return acc
    return -math.expm1(-s) - s * math.exp(-s)


SMALL_T_SWITCH = 1e-8


def hard_micro_constants(params, eq=None, t1=0.0, t2=0.0):
    """(C1, C2, C3, C4) of the four-term expansion at the inner wall."""
    eq = _eq(params, eq)
    if t1 < 0 or t2 < 0:
        raise DomainError("t1, t2 must be non-negative")
    b, r1, sig = params.b, params.r1, eq.sigma1
    lap = b * b * r1 ** (2 * b - 2)
    s = t1 + t2
    c2 = lap / 2.0
    if s < SMALL_T_SWITCH:
        c1 = sig**2 / (2 * r1**2)
        c3 = lap / 2.0 * math.log(2 * math.pi * sig**2 / (b * b * r1 ** (2 * b)))
        c4 = math.sqrt(2) * b * b * r1 ** (b - 2) * integral_I()
        return c1, c2, c3, c4
    g = _one_minus_poly_exp(s)
    c1 = sig**2 * g / (r1**2 * s**2)
    sq = t1 * t1 + t2 * t2
    c3 = (-lap * (exp_integral_E1(s) + EULER_GAMMA + math.log(b * r1**b * s / (sig * math.sqrt(2 * math.pi))))
          + sig / (r1**2 * s**3) * (s * s * sq / (2 * math.exp(s))
                                    + (2 * t1 * t2 - b * b * r1 ** (2 * b) / sig * s * sq) * g))
    c4 = math.sqrt(2) * b * b * r1 ** (b - 2) * (1 - 2 * b * r1 ** (2 * b) * s / sig) * integral_I()
    return c1, c2, c3, c4


def theta_factor_Fn(params, eq=None):
    """Bounded oscillating factor driven by n*sigma_star mod 1."""
    eq = _eq(params, eq)
    gap = math.log(params.r2 / params.r1)
    ratio = math.log(eq.sigma2 / eq.sigma1)
    arg = params.n * eq.sigma_star + 0.5 - params.alpha + ratio / (2 * gap)
    return (jacobi_log_theta_deriv(arg, math.pi / gap) + ratio) / (2 * gap)


def predict_hard_micro(params, eq=None, t1=0.0, t2=0.0):
    eq = _eq(params, eq)
    n = params.n
    c1, c2, c3, c4 = hard_micro_constants(params, eq, t1, t2)
    osc = eq.sigma1 / params.r1**2 * math.exp(-t1 - t2) * theta_factor_Fn(params, eq)
    return Prediction(Theorem.HardMicro, {
        "C1*n^2": c1 * n * n,
        "C2*nlogn": c2 * n * math.log(n),
        "C3*n": c3 * n,
        "theta_term": osc * n,
        "C4*sqrt_n": c4 * math.sqrt(n),
    }, "O(n^{2/5})")


# ------------------------------------------------------- semi-hard regime

def _gauss_over_erfc(y, s1, s2):
    # exp(-((y+s1)^2 + (y+s2)^2)/2) / (sqrt(pi) erfc(y)) without overflow
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    neg = y < 0
    yn = y[neg]
    out[neg] = np.exp(-0.5 * ((yn + s1) ** 2 + (yn + s2) ** 2)) / (SQRT_PI * special.erfc(yn))
    yp = y[~neg]
    out[~neg] = np.exp(-yp * (s1 + s2) - 0.5 * (s1 * s1 + s2 * s2)) / (SQRT_PI * special.erfcx(yp))
    return out


def _semi_hard_integral(f, s1, s2, cfg):
    upper = 750.0 / (s1 + s2)
    return (quad_adaptive(f, -INTEGRAL_CUTOFF, 0.0, cfg)
            + quad_adaptive(f, 0.0, upper, cfg, points=(1.0, 5.0, 20.0)))


def semi_hard_constants(params, eq=None, s1=1.0, s2=1.0, cfg=_INTEGRAL_CFG):
    eq = _eq(params, eq)
    if not (s1 > 0 and s2 > 0):
        raise DomainError("semi-hard scale parameters must be positive")
    b, r1 = params.b, params.r1
    lap = eq.delta_tilde_Q_r1
    c1 = 2 * lap * _semi_hard_integral(lambda y: _gauss_over_erfc(y, s1, s2), s1, s2, cfg)
    ssum, ssq, scube = s1 + s2, s1 * s1 + s2 * s2, s1**3 + s2**3

    def bracket(y):
        return _gauss_over_erfc(y, s1, s2) * (
            (10 * y * y - 2) * _mills_minus_y(y) / 3 + 13 * y / 3 + ssum / b
            - y * ssq / (2 * b) - 2 * y * y * ssum + (2 * b - 3) / b * scube / 6)

    c2 = b * math.sqrt(2 * lap) / r1 * _semi_hard_integral(bracket, s1, s2, cfg)
    return c1, c2


def predict_semi_hard_micro(params, eq=None, s1=1.0, s2=1.0):
    eq = _eq(params, eq)
    c1, c2 = semi_hard_constants(params, eq, s1, s2)
    return Prediction(Theorem.SemiHardMicro,
                      {"C1*n": c1 * params.n, "C2*sqrt_n": c2 * math.sqrt(params.n)}, "O(1)")


def density_profile_rho(x, cfg=_INTEGRAL_CFG):
    """Limiting one-point profile near the semi-hard wall.

    Scaled like K_n / (2 n Lap Q(r1)), so it tends to 1/2 deep in the bulk
    and blows up at the wall.
    """
    if not x > 0:
        raise DomainError("profile is defined for x > 0")
    return _semi_hard_integral(lambda y: _gauss_over_erfc(y, x, x), x, x, cfg)


def predict_semi_hard_macro_bound(params, eq=None):
    return Prediction(Theorem.SemiHardMacroBound, {"bound": 0j}, "O(1)")


# ------------------------------------------------------- across the gap

_SZEGO_CHUNK = 4096


def _sum_until_small(logmag_fn, phase_fn, start, step, cfg):
    """Sum exp(logmag + i phase) over l = start, start+step, ... until 10
    consecutive terms fall below 1e-15 of the running magnitude."""
    re_parts, im_parts = [], []
    total = 0j
    count = 0
    while True:
        ell = start + step * np.arange(count, count + _SZEGO_CHUNK, dtype=float)
        mag = np.exp(logmag_fn(ell))
        ph = phase_fn(ell)
        re_parts.append(math.fsum(mag * np.cos(ph)))
        im_parts.append(math.fsum(mag * np.sin(ph)))
        total = complex(math.fsum(re_parts), math.fsum(im_parts))
        count += _SZEGO_CHUNK
        small = mag < 1e-15 * max(abs(total), 1e-300)
        if small[-10:].all():
            return total
        if count > cfg.max_terms:
            raise NonConvergence("Szego series did not reach its tail criterion")


def szego_hard(params, eq=None, z=None, w=None, cfg=DEFAULT_ACCURACY):
    """Bilateral theta-type kernel coupling the two walls, for r1^2 < |z w| < r2^2."""
    eq = _eq(params, eq)
    r1, r2, x = params.r1, params.r2, eq.x_frac
    prod = z.r * w.r
    if not (r1 * r1 < prod < r2 * r2):
        raise Divergent(f"|z w| = {prod:.6g} must lie strictly between r1^2 and r2^2")
    lp, l1, l2 = math.log(prod), math.log(r1), math.log(r2)
    ls1, ls2 = math.log(eq.sigma1), math.log(eq.sigma2)
    dth = z.theta - w.theta

    def logmag(ell):
        e = 2 * (ell + 1 - x)
        return ell * lp - np.logaddexp(e * l1 - ls1, e * l2 - ls2)

    def phase(ell):
        return ell * dth

    pos = _sum_until_small(logmag, phase, 0.0, 1.0, cfg)
    neg = _sum_until_small(logmag, phase, -1.0, -1.0, cfg)
    return (pos + neg) / (2 * math.pi)


def _check_angles(theta1, theta2):
    if abs(math.remainder(theta1 - theta2, 2 * math.pi)) < 1e-12:
        raise DegenerateAngles("angles coincide modulo 2 pi")


def szego_hard_regularized(params, eq=None, theta1=0.0, theta2=1.0, cfg=DEFAULT_ACCURACY):
    """Abel-regularized limit of szego_hard with both points on the inner wall."""
    eq = _eq(params, eq)
    _check_angles(theta1, theta2)
    x = eq.x_frac
    d = theta1 - theta2
    lrho = 2 * math.log(params.r2 / params.r1)
    lratio = math.log(eq.sigma1 / eq.sigma2)

    def up_log(ell):
        return -np.logaddexp(0.0, lratio + (ell + 1 - x) * lrho)

    def down_log(ell):
        return -np.logaddexp(0.0, -lratio - (ell + 1 - x) * lrho)

    up = _sum_until_small(up_log, lambda ell: d * ell, 0.0, 1.0, cfg)
    down = _sum_until_small(down_log, lambda ell: d * ell, -1.0, -1.0, cfg)
    pole = 1.0 / (complex(math.cos(d), math.sin(d)) - 1.0)
    return eq.sigma1 / params.r1 ** (2 * (1 - x)) * (pole + up - down) / (2 * math.pi)


def predict_r1r2_macro(params, eq=None, t1=0.0, t2=0.0, theta1=0.0, theta2=0.0):
    eq = _eq(params, eq)
    z = hard_edge_point(params, eq, t1, theta1, "inner")
    w = hard_edge_point(params, eq, t2, theta2, "outer")
    phase = math.floor(eq.j_star) * (theta1 - theta2)
    value = (2 * math.pi * params.n * szego_hard(params, eq, z, w) * complex(math.cos(phase), math.sin(phase))
             * (params.r1 * params.r2) ** (-eq.x_frac) * math.exp(-t1 - t2))
    return Prediction(Theorem.R1R2Macro, {"szego_term": value}, "O((log n)^2)")


def predict_r1r1_macro(params, eq=None, t1=0.0, t2=0.0, theta1=0.0, theta2=1.0):
    eq = _eq(params, eq)
    phase = math.floor(eq.j_star) * (theta1 - theta2)
    value = (2 * math.pi * params.n * szego_hard_regularized(params, eq, theta1, theta2)
             * complex(math.cos(phase), math.sin(phase)) * params.r1 ** (-2 * eq.x_frac) * math.exp(-t1 - t2))
    return Prediction(Theorem.R1R1Macro, {"szego_regularized_term": value}, "O(sqrt(n log n))")


def Q_n_series(params, eq=None, theta1=0.0, theta2=0.0, cfg=DEFAULT_ACCURACY):
    """Two damped one-sided geometric-type series in the angle difference."""
    eq = _eq(params, eq)
    x = eq.x_frac
    d = theta1 - theta2
    lrho = 2 * math.log(params.r2 / params.r1)
    lratio = math.log(eq.sigma1 / eq.sigma2)
    first = _sum_until_small(lambda j: -np.logaddexp(0.0, lratio + (j + 1 - x) * lrho),
                             lambda j: d * j, 0.0, 1.0, cfg)
    second = _sum_until_small(lambda j: -np.logaddexp(0.0, -lratio + (j + x) * lrho),
                              lambda j: -d * (j + 1), 0.0, 1.0, cfg)
    return first - second


def Q_n_theta(params, eq=None):
    """Closed form of Q_n_series at equal angles through the theta function."""
    eq = _eq(params, eq)
    gap = math.log(params.r2 / params.r1)
    arg = (params.n * eq.sigma_star - params.alpha
           + math.log(eq.sigma2 * params.r2 / (eq.sigma1 * params.r1)) / (2 * gap))
    return (jacobi_log_theta_deriv(arg, math.pi / gap) + (2 * eq.x_frac - 1) * gap
            + math.log(eq.sigma2 / eq.sigma1)) / (2 * gap)


# ------------------------------------------------------- regimes of h_j

class Regime(enum.IntEnum):
    FIXED = 1
    BELOW_INNER = 2
    BELOW_INNER_NEAR = 3
    INNER_WINDOW = 4
    ABOVE_INNER_NEAR = 5
    INNER_GAP = 6
    OUTER_GAP = 7
    BELOW_OUTER_NEAR = 8
    OUTER_WINDOW = 9
    ABOVE_OUTER_NEAR = 10
    ABOVE_OUTER = 11


@dataclass(frozen=True)
class RegimeParams:
    """Window geometry and per-mode gamma arguments for one mode index."""
    epsilon: float
    window: float           # M
    window_const: float     # M'
    a: float
    lam: tuple              # lambda_{j,1}, lambda_{j,2}
    eta: tuple
    window_offset: tuple    # sqrt(n)(lambda_{j,k} - 1)
    regime: Regime


def default_epsilon(params, eq=None):
    """Half the room allowed by the ordering constraints, capped at 0.05."""
    eq = _eq(params, eq)
    b1 = params.b * params.r1 ** (2 * params.b)
    b2 = params.b * params.r2 ** (2 * params.b)
    room = min(1 - b1 / eq.sigma_star, b2 / eq.sigma_star - 1, 1 - b2,
               (b2 - b1) / (b2 + b1))
    return min(0.05, 0.5 * room)


def regime_bounds(params, eq=None, epsilon=None, window_const=6.0):
    eq = _eq(params, eq)
    n, alpha = params.n, params.alpha
    eps = default_epsilon(params, eq) if epsilon is None else epsilon
    m = window_const * math.sqrt(math.log(n))
    out = {"epsilon": eps, "window": m, "window_const": window_const, "floor_j_star": math.floor(eq.j_star)}
    for k, r in ((1, params.r1), (2, params.r2)):
        beta = params.b * n * r ** (2 * params.b)
        out[f"j{k}-"] = math.ceil(beta / (1 + eps) - alpha)
        out[f"j{k}+"] = math.floor(beta / (1 - eps) - alpha)
        out[f"g{k}-"] = math.ceil(beta / (1 + m / math.sqrt(n)) - alpha)
        out[f"g{k}+"] = math.floor(beta / (1 - m / math.sqrt(n)) - alpha) if m < math.sqrt(n) else n
    return out


def classify_regime(params, eq, j, bounds):
    if j < bounds["window_const"]:
        return Regime.FIXED
    if bounds["g1-"] <= j <= bounds["g1+"]:
        return Regime.INNER_WINDOW
    if bounds["g2-"] <= j <= bounds["g2+"]:
        return Regime.OUTER_WINDOW
    if j < bounds["g1-"]:
        return Regime.BELOW_INNER if j < bounds["j1-"] else Regime.BELOW_INNER_NEAR
    if j <= bounds["floor_j_star"]:
        return Regime.ABOVE_INNER_NEAR if j <= bounds["j1+"] else Regime.INNER_GAP
    if j < bounds["g2-"]:
        return Regime.OUTER_GAP if j < bounds["j2-"] else Regime.BELOW_OUTER_NEAR
    if j > bounds["g2+"]:
        return Regime.ABOVE_OUTER_NEAR if j <= bounds["j2+"] else Regime.ABOVE_OUTER
    raise RegimeUnknown(f"mode {j} fits no window")


def regime_params(params, eq, j, epsilon=None, window_const=6.0, regime=None):
    """Build RegimeParams for mode j; regime may be forced to evaluate a formula off its window."""
    eq = _eq(params, eq)
    if not 1 <= j <= params.n:
        raise DomainError("mode index must lie in 1..n")
    bounds = regime_bounds(params, eq, epsilon, window_const)
    a = (j + params.alpha) / params.b
    lam = tuple(params.b * params.n * r ** (2 * params.b) / (j + params.alpha) for r in (params.r1, params.r2))
    eta = tuple(eta_of_lambda(v) for v in lam)
    offs = tuple(math.sqrt(params.n) * (v - 1) for v in lam)
    reg = classify_regime(params, eq, j, bounds) if regime is None else Regime(regime)
    return RegimeParams(bounds["epsilon"], bounds["window"], window_const, a, lam, eta, offs, reg)


def _log_stirling_prefactor(params, y):
    # log of b n^a / Gamma(a) from its large-j expansion, y = j/n
    b, alpha, n = params.b, params.alpha, params.n
    corr = (-b * b + 6 * b * alpha - 6 * alpha * alpha) / (12 * b * y * n)
    return (math.log(b) + 0.5 * math.log(n) + n / b * (y - y * math.log(y / b)) - 0.5 * math.log(2 * math.pi)
            + alpha / b * math.log(b / y) + 0.5 * math.log(y / b) + math.log1p(corr))


def _log_window_prefactor(params, r, m):
    # log of b n^a / Gamma(a) on the sqrt(n) window around b n r^2b, in the offset m
    n = params.n
    p = r ** (2 * params.b)
    lp = math.log(p)
    rn = math.sqrt(n)
    corr = (m / 6 * (-3 + 5 * m * m * p + 6 * m * m * p * lp) / rn
            + (p * p * m**6 * (25 / 72 + 5 * lp / 6 + lp * lp / 2) - 1.5 * p * m**4 * (1 + lp)) / n
            + (125 + 450 * lp + 540 * lp**2 + 216 * lp**3) / 1296 * p**3 * m**9 / n**1.5)
    return (math.log(params.b) + p * (1 - lp) * n + m * p * lp * rn - p * (0.5 + lp) * m * m
            + 0.5 * lp + 0.5 * math.log(n) - 0.5 * math.log(2 * math.pi) + math.log1p(corr))


def log_hj_asymptotic(params, eq, rp, j):
    """Asymptotic log h_j from the formula of regime rp.regime."""
    eq = _eq(params, eq)
    b, alpha, n = params.b, params.alpha, params.n
    r1, r2 = params.r1, params.r2
    y = j / n
    b1, b2 = b * r1 ** (2 * b), b * r2 ** (2 * b)
    reg = rp.regime
    if reg == Regime.FIXED:
        a = (j + alpha) / b
        return -(math.log(b) + a * math.log(n) - math.lgamma(a))
    if reg in (Regime.BELOW_INNER, Regime.BELOW_INNER_NEAR, Regime.ABOVE_OUTER_NEAR, Regime.ABOVE_OUTER):
        return -_log_stirling_prefactor(params, y)
    if reg == Regime.INNER_WINDOW:
        m = rp.window_offset[0]
        p = r1 ** (2 * b)
        lp = math.log(p)
        rb = r1**b
        half_erfc = 0.5 * math.erfc(-m * rb / math.sqrt(2))
        corr = ((5 * m * m * p - 2) * math.exp(-p * m * m / 2) / (3 * math.sqrt(2 * math.pi) * rb * 2 * half_erfc)
                + m**3 * p * lp - m / 2 + 5 * m**3 * p / 6) / math.sqrt(n)
        corr += (p * p / 2 * lp * lp * m**6 - 2 * p * lp * m**4) / n + p**3 * lp**3 * m**9 / (6 * n**1.5)
        log_inv = (math.log(b) + p * (1 - lp) * n + m * p * lp * math.sqrt(n) - p * (0.5 + lp) * m * m
                   + math.log(rb * math.sqrt(n)) - math.log(half_erfc * math.sqrt(2 * math.pi)) + math.log1p(corr))
        return -log_inv
    if reg == Regime.OUTER_WINDOW:
        m = rp.window_offset[1]
        p = r2 ** (2 * b)
        rb = r2**b
        ec = math.erfc(-m * rb / math.sqrt(2))
        chi = 1.0 if m > 0 else 0.0
        corr = ((2 - 5 * m * m * p) * math.exp(-p * m * m / 2) / (3 * math.sqrt(2 * math.pi) * rb * (2 - ec) * math.sqrt(n))
                + chi / n * (25 * p * p * m**6 / 72 + 1.5 * p * m**4) - chi * 125 * p**3 * m**9 / (1296 * n**1.5))
        return -(_log_window_prefactor(params, r2, m) - math.log1p(-0.5 * ec) + math.log1p(corr))
    if reg == Regime.ABOVE_INNER_NEAR:
        d = y - b1
        corr = ((b * b * r1 ** (2 * b) + d * alpha) / (n * d * d) - 2 * b**4 * r1 ** (4 * b) / (n * n * d**4)
                + 10 * b**6 * r1 ** (6 * b) / (n**3 * d**6))
        return -(math.log(n * d) - 2 * alpha * math.log(r1) + n * (r1 ** (2 * b) - 2 * y * math.log(r1))
                 + math.log1p(corr))
    if reg == Regime.INNER_GAP:
        d = y - b1
        denom = 1 / d + (r1 / r2) ** (2 * (eq.j_star - j)) / (b2 - y)
        corr = (b * b * r1 ** (2 * b) + d * alpha) / (n * d * d)
        return -(math.log(n) - 2 * alpha * math.log(r1) + n * (r1 ** (2 * b) - 2 * y * math.log(r1))
                 - math.log(denom) + math.log1p(corr))
    if reg == Regime.OUTER_GAP:
        d = y - b2
        denom = 1 / (b2 - y) + (r1 / r2) ** (2 * (j - eq.j_star)) / (y - b1)
        corr = (b * b * r2 ** (2 * b) + d * alpha) / (n * d * d)
        return -(math.log(n) - 2 * alpha * math.log(r2) + n * (r2 ** (2 * b) - 2 * y * math.log(r2))
                 - math.log(denom) + math.log1p(corr))
    if reg == Regime.BELOW_OUTER_NEAR:
        d = y - b2
        corr = (b * b * r2 ** (2 * b) + d * alpha) / (n * d * d)
        return -(math.log(n * (b2 - y)) - 2 * alpha * math.log(r2) + n * (r2 ** (2 * b) - 2 * y * math.log(r2))
                 + math.log1p(corr))
    raise RegimeUnknown(f"unknown regime {reg}")
