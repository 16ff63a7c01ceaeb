"""Exact kernels and large-n asymptotics for the Mittag-Leffler ensemble with an annular hard wall."""
from .errors import (DegenerateAngles, Divergent, DomainError, HardwallError, InvalidParams,
                     NonConvergence, RegimeUnknown)
from .model import EquilibriumData, ModelParams, PlanePoint, equilibrium
from .specfun import AccuracyConfig

__all__ = [
    "AccuracyConfig", "DegenerateAngles", "Divergent", "DomainError", "EquilibriumData",
    "HardwallError", "InvalidParams", "ModelParams", "NonConvergence", "PlanePoint",
    "RegimeUnknown", "equilibrium",
]
