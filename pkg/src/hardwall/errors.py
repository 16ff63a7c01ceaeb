class HardwallError(Exception):
    pass


class NonConvergence(HardwallError, RuntimeError):
    """A series, continued fraction or quadrature hit its iteration cap."""


class DomainError(HardwallError, ValueError):
    pass


class InvalidParams(HardwallError, ValueError):
    pass


class DegenerateAngles(HardwallError, ValueError):
    """Two angles coincide where a different-angle formula was requested."""


class Divergent(HardwallError, ValueError):
    """Point pair lies outside the convergence annulus of a series."""


class RegimeUnknown(HardwallError, ValueError):
    pass
