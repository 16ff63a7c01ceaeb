"""Model parameters, the gap potential and its equilibrium measure."""
import math
from dataclasses import asdict, dataclass

from .errors import InvalidParams


@dataclass(frozen=True)
class ModelParams:
    """Exponent b, insertion strength alpha, gap radii r1 < r2 and particle count n."""
    b: float
    alpha: float
    r1: float
    r2: float
    n: int

    def __post_init__(self):
        b, alpha, r1, r2, n = self.b, self.alpha, self.r1, self.r2, self.n
        if not (math.isfinite(b) and b > 0):
            raise InvalidParams(f"b must be positive, got {b}")
        if not (math.isfinite(alpha) and alpha > -1):
            raise InvalidParams(f"alpha must exceed -1, got {alpha}")
        if int(n) != n or n < 1:
            raise InvalidParams(f"n must be a positive integer, got {n}")
        object.__setattr__(self, "n", int(n))
        rmax = b ** (-1.0 / (2.0 * b))
        if not (0 < r1 < r2 < rmax):
            raise InvalidParams(f"need 0 < r1 < r2 < {rmax:.6g}, got r1={r1}, r2={r2}")

    @classmethod
    def from_fractions(cls, b, alpha, r1_frac, r2_frac, n):
        """Radii given as fractions of the droplet radius b**(-1/(2b))."""
        if not (0 < r1_frac < r2_frac < 1):
            raise InvalidParams("need 0 < r1_frac < r2_frac < 1")
        rmax = b ** (-1.0 / (2.0 * b))
        return cls(b, alpha, r1_frac * rmax, r2_frac * rmax, n)

    @classmethod
    def from_dict(cls, d):
        if "r1" in d and "r2" in d:
            return cls(float(d["b"]), float(d["alpha"]), float(d["r1"]), float(d["r2"]), int(d["n"]))
        return cls.from_fractions(float(d["b"]), float(d["alpha"]), float(d["r1_frac"]),
                                  float(d["r2_frac"]), int(d["n"]))

    def to_dict(self):
        return asdict(self)

    def with_n(self, n):
        return ModelParams(self.b, self.alpha, self.r1, self.r2, n)

    @property
    def droplet_radius(self):
        return self.b ** (-1.0 / (2.0 * self.b))


@dataclass(frozen=True)
class EquilibriumData:
    sigma_star: float   # mass of the disk of radius r1 after balayage
    sigma1: float       # atom on the inner circle
    sigma2: float       # atom on the outer circle
    j_star: float
    x_frac: float               # fractional part of j_star, 0 on exact ties
    delta_tilde_Q_r1: float     # b^2 r1^(2b-2)


def equilibrium(params):
    b, r1, r2, n = params.b, params.r1, params.r2, params.n
    p1, p2 = r1 ** (2 * b), r2 ** (2 * b)
    sigma_star = (p2 - p1) / (2.0 * math.log(r2 / r1))
    sigma1 = sigma_star - b * p1
    sigma2 = b * p2 - sigma_star
    j_star = n * sigma_star - params.alpha
    frac = j_star - math.floor(j_star)
    return EquilibriumData(sigma_star, sigma1, sigma2, j_star, frac, b * b * r1 ** (2 * b - 2))


@dataclass(frozen=True)
class PlanePoint:
    r: float
    theta: float

    def __post_init__(self):
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise InvalidParams(f"radius must be finite and non-negative, got {self.r}")

    @property
    def z(self):
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @classmethod
    def from_complex(cls, z):
        return cls(abs(z), math.atan2(z.imag, z.real))


def in_gap(params, r):
    """True on the open annulus r1 < r < r2 where the potential is infinite."""
    return params.r1 < r < params.r2


def potential_Q(params, p):
    """|z|^(2b) - (2 alpha / n) log|z|, infinite on the gap."""
    r = p.r if isinstance(p, PlanePoint) else float(p)
    if in_gap(params, r):
        return math.inf
    if r == 0:
        if params.alpha == 0:
            return 0.0
        return math.inf if params.alpha > 0 else -math.inf
    return r ** (2 * params.b) - 2.0 * params.alpha / params.n * math.log(r)


def mu_mass_in_disk(params, r):
    """Equilibrium mass of the closed disk of radius r."""
    b = params.b
    if r < 0:
        raise InvalidParams("radius must be non-negative")
    if r >= params.droplet_radius:
        return 1.0
    if params.r1 <= r < params.r2:
        return equilibrium(params).sigma_star
    return b * r ** (2 * b)


def hard_edge_point(params, eq, t, beta=0.0, side="inner"):
    """Point at scaled distance t from the inner or outer wall, on the droplet side."""
    if t < 0:
        raise InvalidParams("t must be non-negative")
    if side == "inner":
        return PlanePoint(params.r1 * (1.0 - t / (eq.sigma1 * params.n)), beta)
    if side == "outer":
        return PlanePoint(params.r2 * (1.0 + t / (eq.sigma2 * params.n)), beta)
    raise InvalidParams("side must be 'inner' or 'outer'")


def semi_hard_point(params, s_frak, beta=0.0):
    """Point r1 (1 - s/(b r1^b sqrt(2n))) inside the inner wall."""
    if not s_frak > 0:
        raise InvalidParams("semi-hard offset must be positive")
    b, r1 = params.b, params.r1
    return PlanePoint(r1 * (1.0 - s_frak / (b * r1**b * math.sqrt(2.0 * params.n))), beta)
