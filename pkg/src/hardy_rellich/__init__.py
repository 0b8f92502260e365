"""Numerical verification of weighted Hardy and Rellich identities on the half-line."""

from .errors import (
    ConfigError,
    DegenerateSampling,
    ExcludedParameter,
    HardyRellichError,
    InsufficientSmoothness,
    InvalidSupport,
    NoConvergence,
    OverflowGuard,
    ZeroC,
    ZeroDenominator,
)
from .funcspace import (
    BareFunction,
    FamilySpec,
    TestFunction,
    bare_power,
    combine,
    dilate,
    make_mollifier_bump,
    make_poly_bump,
    modulate,
    scale_power,
)
from .operators import SpaceParams, apply_L, c_const, f_sharp, f_star, h_const, r_const
from .quad import IntegralResult, QuadratureConfig, inner, mc_radial, norm_sq, weighted_integral

__version__ = "0.1.0"
