"""Sharp constants and the pointwise operators built from a jet.

Conventions: ``alpha`` is the first-order coefficient of ``L_alpha = d2/dr2 +
(alpha/r) d/dr`` and ``beta`` is the exponent of the measure ``r**beta dr``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .funcspace import BareFunction, TestFunction

Handle = Union[TestFunction, BareFunction]
PointRule = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SpaceParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError(f"alpha and beta must be finite, got ({self.alpha}, {self.beta})")


def c_const(alpha: float, beta: float) -> float:
    """Rellich constant ``(beta - 3)(2 alpha - beta + 1) / 4``."""
    return (beta - 3) * (2 * alpha - beta + 1) / 4


def h_const(q: float) -> float:
    """Hardy constant ``(q - 2) / 2``."""
    return (q - 2) / 2


def r_const(q: float) -> float:
    """n-dimensional Rellich constant ``q (q - 4) / 4``."""
    return q * (q - 4) / 4


def extremal_power(beta: float) -> float:
    """The exponent ``(3 - beta)/2`` killed by ``f*``, ``f#`` and ``L_alpha + C/r**2``."""
    return (3 - beta) / 2


@dataclass(frozen=True)
class DerivedFunction:
    """A complex function of ``r`` computed pointwise from a source jet.

    ``rule(r, f, f1, f2)`` receives the radii and the jet components there.
    """

    source: Handle
    rule: PointRule = field(repr=False, compare=False)
    label: str = "g"

    @property
    def support(self):
        return self.source.support

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        v, d1, d2 = self.source.jet(r)
        out = np.asarray(self.rule(r, v, d1, d2), dtype=complex)
        if self.source.support is not None:
            a, b = self.source.support
            out = np.where((r >= a) & (r <= b), out, 0.0)
        return out


def pointwise(f: Handle, rule: PointRule, label: str) -> DerivedFunction:
    return DerivedFunction(f, rule, label)


def radial_derivative(f: Handle) -> DerivedFunction:
    return DerivedFunction(f, lambda r, v, d1, d2: d1, f"d({f.label})")


def apply_L(alpha: float, f: Handle) -> DerivedFunction:
    """``L_alpha f = f'' + (alpha/r) f'``."""
    return DerivedFunction(f, lambda r, v, d1, d2: d2 + alpha / r * d1, f"L[{alpha:g}]{f.label}")


def f_star(beta: float, f: Handle) -> DerivedFunction:
    """``f* = f' + (beta - 3)/(2r) f``."""
    k = (beta - 3) / 2
    return DerivedFunction(f, lambda r, v, d1, d2: d1 + k / r * v, f"{f.label}*[{beta:g}]")


def f_sharp(beta: float, f: Handle) -> DerivedFunction:
    """``f# = f'' + (beta - 2)/r f' + (beta - 3)**2/(4 r**2) f``."""
    k1 = beta - 2
    k0 = (beta - 3) ** 2 / 4
    return DerivedFunction(
        f, lambda r, v, d1, d2: d2 + k1 / r * d1 + k0 / r**2 * v, f"{f.label}#[{beta:g}]"
    )


def rellich_remainder(alpha: float, beta: float, f: Handle) -> DerivedFunction:
    """``L_alpha f + C_{alpha,beta} f / r**2``."""
    c = c_const(alpha, beta)
    return DerivedFunction(
        f,
        lambda r, v, d1, d2: d2 + alpha / r * d1 + c / r**2 * v,
        f"(L[{alpha:g}]+C/r^2){f.label}",
    )
