"""Exact sampling of the ensemble through independent per-mode radii.

For a rotation-invariant ensemble the moduli of the n points are distributed
as independent draws, one per mode j, from the radial weights
r^(2(j+alpha)-1) exp(-n r^2b) restricted off the gap. Angles are uniform.

Random streams: one PCG64 generator seeded with `seed` produces n radius
uniforms followed by n angle uniforms; mode j consumes entry j-1 of each
block. Any subset of modes can therefore be recomputed independently.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidParams, NonConvergence
from .kernel import _log_mass, _shape_params
from .kernel import radial_cdf as _kernel_radial_cdf
from .model import PlanePoint
from .specfun import DEFAULT_ACCURACY, log_gamma_prefactor, log_reg_gamma

MAX_ITER = 200


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    n_points: int
    inversion_tol: float = 1e-12

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise InvalidParams("n_points must be a positive integer")
        if not self.inversion_tol > 0:
            raise InvalidParams("inversion_tol must be positive")


def radial_cdf(params, j, r):
    """CDF of the modulus of mode j at radius r (flat across the gap)."""
    j = np.asarray(j)
    if np.any(j < 1) or np.any(j > params.n):
        raise InvalidParams("mode index must lie in 1..n")
    return _kernel_radial_cdf(params, j, r)


def open_uniforms(rng, size):
    # (k + 1/2) / 2^53: never exactly 0 or 1
    return rng.random(size) + 2.0**-54


def _solve_monotone(func, lo, hi, guess, tol):
    """Safeguarded Newton on a bracket where func(lo) <= 0 <= func(hi).

    func(t) returns (value, derivative) arrays; works elementwise.
    """
    t = np.clip(np.where(np.isfinite(guess), guess, 0.5 * (lo + hi)), lo, hi)
    lo, hi = lo.copy(), hi.copy()
    active = np.arange(t.size)
    for _ in range(MAX_ITER):
        f, df = func(t[active], active)
        pos = f > 0
        hi[active[pos]] = t[active[pos]]
        lo[active[~pos]] = t[active[~pos]]
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t[active] - f / df
        a_lo, a_hi = lo[active], hi[active]
        bad = ~np.isfinite(newton) | (newton < a_lo) | (newton > a_hi)
        step_to = np.where(f == 0, t[active], np.where(bad, 0.5 * (a_lo + a_hi), newton))
        moved = np.abs(step_to - t[active])
        t[active] = step_to
        done = (moved <= tol) | (a_hi - a_lo <= tol) | (f == 0)
        active = active[~done]
        if active.size == 0:
            return t
    raise NonConvergence(f"radial inversion did not converge in {MAX_ITER} iterations")


def invert_radial_cdf(params, j, u, tol=1e-12, cfg=DEFAULT_ACCURACY):
    """Radii r with radial_cdf(params, j, r) = u for u in (0, 1), elementwise.

    Works on t = log(n r^2b). The inner branch solves log P(a, e^t) = log(u M),
    the outer one log Q(a, e^t) = log((1 - u) M), M the gamma mass off the gap.
    """
    j, u = np.broadcast_arrays(np.asarray(j, dtype=float), np.asarray(u, dtype=float))
    j, u = j.ravel(), u.ravel()
    if np.any(~((u > 0) & (u < 1))):
        raise InvalidParams("uniforms must lie strictly inside (0, 1)")
    a, x1, x2 = _shape_params(params, j)
    lmass = _log_mass(params, j, cfg)
    logp1 = log_reg_gamma(a, np.full_like(a, x1), cfg)[0]
    inner = np.log(u) + lmass <= logp1
    t = np.empty_like(a)

    if inner.any():
        ai = a[inner]
        target = np.log(u[inner]) + lmass[inner]
        # P(a, u) <= u^a / Gamma(a+1) gives a lower bracket
        lo = (target + special.gammaln(ai + 1)) / ai
        hi = np.full_like(ai, math.log(x1))
        lo = np.minimum(lo, hi)
        with np.errstate(all="ignore"):
            guess = np.log(special.gammaincinv(ai, np.exp(target)))

        def f_inner(tt, idx):
            uu = np.exp(tt)
            lp = log_reg_gamma(ai[idx], uu, cfg)[0]
            return lp - target[idx], np.exp(log_gamma_prefactor(ai[idx], uu) - lp)

        t[inner] = _solve_monotone(f_inner, lo, hi, guess, tol)

    outer = ~inner
    if outer.any():
        ao = a[outer]
        target = np.log1p(-u[outer]) + lmass[outer]
        lo = np.full_like(ao, math.log(x2))
        # Q(a, u) <= u^a e^-u / (Gamma(a) (u - a + 1)) for u > a - 1; grow until below target
        uh = 2.0 * np.maximum(x2, ao + 1.0)
        for _ in range(MAX_ITER):
            bound = log_gamma_prefactor(ao, uh) - np.log(uh - ao + 1.0)
            short = bound > target
            if not short.any():
                break
            uh[short] *= 2.0
        else:
            raise NonConvergence("could not bracket the outer radial inversion")
        hi = np.log(uh)
        with np.errstate(all="ignore"):
            guess = np.log(special.gammainccinv(ao, np.exp(target)))

        def f_outer(tt, idx):
            uu = np.exp(tt)
            lq = log_reg_gamma(ao[idx], uu, cfg)[1]
            # decreasing in t; negate so the bracket convention holds
            return target[idx] - lq, np.exp(log_gamma_prefactor(ao[idx], uu) - lq)

        t[outer] = _solve_monotone(f_outer, lo, hi, guess, tol)

    r = np.exp((t - math.log(params.n)) / (2 * params.b))
    # the gap is excluded by construction; clamp rounding at the walls
    r = np.where(inner, np.minimum(r, params.r1), np.maximum(r, params.r2))
    return r


def _draw(params, cfg):
    if cfg.n_points != params.n:
        raise InvalidParams("n_points must equal the particle count n")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = params.n
    ur = open_uniforms(rng, n)
    ua = rng.random(n)
    j = np.arange(1, n + 1)
    r = invert_radial_cdf(params, j, ur, cfg.inversion_tol)
    theta = math.pi - 2 * math.pi * ua    # (-pi, pi]
    return j, r, theta


def sample_configuration(params, cfg):
    """One exact draw of the n points, ordered by mode index."""
    _, r, theta = _draw(params, cfg)
    return [PlanePoint(float(ri), float(ti)) for ri, ti in zip(r, theta)]


def sample_arrays(params, cfg):
    """Same draw as sample_configuration as (j, r, theta) arrays."""
    return _draw(params, cfg)


def sample_moduli(params, seeds, tol=1e-12):
    """Moduli for several seeds, shape (len(seeds), n)."""
    return np.stack([_draw(params, SampleConfig(int(s), params.n, tol))[1] for s in seeds])


def write_csv(path, j, r, theta):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "r", "theta", "x", "y"])
        for jj, rr, tt in zip(j, r, theta):
            w.writerow([int(jj), f"{rr:.17g}", f"{tt:.17g}",
                        f"{rr * math.cos(tt):.17g}", f"{rr * math.sin(tt):.17g}"])
