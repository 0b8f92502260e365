"""Compactly supported test functions on (0, inf) carrying exact second-order jets.

A jet at ``r`` is the triple ``(f(r), f'(r), f''(r))``. Every constructor and
combinator here derives the jet in closed form (product and chain rules), so
downstream residuals only ever see quadrature error.

All jets are vectorized: ``f.jet(r)`` accepts any array of radii and returns
three complex arrays of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InsufficientSmoothness, InvalidSupport

Jet = tuple[np.ndarray, np.ndarray, np.ndarray]
JetRule = Callable[[np.ndarray], Jet]

# exp(-1/q) underflows to exactly 0 below this q
_MOLLIFIER_Q_MIN = 1.0 / 700.0


@dataclass(frozen=True)
class TestFunction:
    """A C^2 function with support ``[a, b]``, ``0 < a < b``, and a closed-form jet.

    ``rule`` is only ever called on radii inside the support; the public
    :meth:`jet` pads with exact zeros outside.
    """

    __test__ = False  # keep pytest from collecting this class

    support: tuple[float, float]
    rule: JetRule = field(repr=False, compare=False)
    label: str = "f"

    def jet(self, r) -> Jet:
        r = np.asarray(r, dtype=float)
        a, b = self.support
        inside = (r >= a) & (r <= b)
        out = [np.zeros(r.shape, dtype=complex) for _ in range(3)]
        if inside.any():
            v, d1, d2 = self.rule(r[inside])
            out[0][inside] = v
            out[1][inside] = d1
            out[2][inside] = d2
        return out[0], out[1], out[2]

    def __call__(self, r):
        return self.jet(r)[0]


@dataclass(frozen=True)
class BareFunction:
    """A jet handle without compact support, e.g. a pure power ``r**gamma``.

    Only used to probe operators pointwise; the quadrature module refuses it
    unless an explicit interval is given.
    """

    rule: JetRule = field(repr=False, compare=False)
    label: str = "bare"
    support: None = None

    def jet(self, r) -> Jet:
        r = np.asarray(r, dtype=float)
        v, d1, d2 = self.rule(r)
        return (
            np.asarray(v, dtype=complex) * np.ones(r.shape),
            np.asarray(d1, dtype=complex) * np.ones(r.shape),
            np.asarray(d2, dtype=complex) * np.ones(r.shape),
        )

    def __call__(self, r):
        return self.jet(r)[0]


def bare_power(gamma: float, coeff: complex = 1.0) -> BareFunction:
    """``coeff * r**gamma`` on all of (0, inf)."""

    def rule(r):
        p = coeff * r**gamma
        return p, gamma * p / r, gamma * (gamma - 1) * p / r**2

    return BareFunction(rule, label=f"r^{gamma:g}")


def _check_support(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0 or b <= a:
        raise InvalidSupport(f"support must satisfy 0 < a < b < inf, got [{a}, {b}]")


def make_poly_bump(a: float, b: float, k: int) -> TestFunction:
    """``((r - a)(b - r))**k`` on ``[a, b]``; C^(k-1) across the endpoints."""
    _check_support(a, b)
    if int(k) != k or k < 3:
        raise InsufficientSmoothness(f"polynomial bump needs integer k >= 3 for C^2, got {k}")
    k = int(k)

    def rule(r):
        p = (r - a) * (b - r)
        dp = a + b - 2 * r
        # p'' = -2
        v = p**k
        d1 = k * p ** (k - 1) * dp
        d2 = k * (k - 1) * p ** (k - 2) * dp**2 - 2 * k * p ** (k - 1)
        return v, d1, d2

    return TestFunction((float(a), float(b)), rule, f"poly({a:g},{b:g},k={k})")


def mollifier_jet(s: np.ndarray) -> Jet:
    """Jet of ``exp(-1/(1 - s**2))`` on ``|s| < 1`` (zero elsewhere), real-valued."""
    s = np.asarray(s, dtype=float)
    q = 1.0 - s * s
    live = q > _MOLLIFIER_Q_MIN
    v = np.zeros_like(s)
    d1 = np.zeros_like(s)
    d2 = np.zeros_like(s)
    if live.any():
        sl, ql = s[live], q[live]
        phi = np.exp(-1.0 / ql)
        v[live] = phi
        d1[live] = -2.0 * sl / ql**2 * phi
        d2[live] = phi * (4.0 * sl**2 / ql**4 - 2.0 / ql**2 - 8.0 * sl**2 / ql**3)
    return v, d1, d2


def make_mollifier_bump(a: float, b: float) -> TestFunction:
    """The standard C^inf bump rescaled to ``[a, b]``."""
    _check_support(a, b)
    center, half = 0.5 * (a + b), 0.5 * (b - a)

    def rule(r):
        v, d1, d2 = mollifier_jet((r - center) / half)
        return v, d1 / half, d2 / half**2

    return TestFunction((float(a), float(b)), rule, f"moll({a:g},{b:g})")


def modulate(f: TestFunction, omega: float) -> TestFunction:
    """``r -> exp(i omega r) f(r)``."""
    if omega == 0:
        return f

    def rule(r):
        v, d1, d2 = f.rule(r)
        e = np.exp(1j * omega * r)
        return (
            e * v,
            e * (d1 + 1j * omega * v),
            e * (d2 + 2j * omega * d1 - omega**2 * v),
        )

    return TestFunction(f.support, rule, f"{f.label}*exp(i{omega:g}r)")


def scale_power(f: TestFunction, gamma: float) -> TestFunction:
    """``r -> r**gamma f(r)``; safe because supports stay away from 0."""
    if gamma == 0:
        return f

    def rule(r):
        v, d1, d2 = f.rule(r)
        p = r**gamma
        p1 = gamma * p / r
        p2 = gamma * (gamma - 1) * p / r**2
        return p * v, p1 * v + p * d1, p2 * v + 2 * p1 * d1 + p * d2

    return TestFunction(f.support, rule, f"r^{gamma:g}*{f.label}")


def dilate(f: TestFunction, lam: float) -> TestFunction:
    """``r -> f(lam r)`` with support ``[a/lam, b/lam]``."""
    if not lam > 0:
        raise InvalidSupport(f"dilation factor must be positive, got {lam}")
    if lam == 1:
        return f

    def rule(r):
        v, d1, d2 = f.rule(lam * r)
        return v, lam * d1, lam**2 * d2

    a, b = f.support
    return TestFunction((a / lam, b / lam), rule, f"{f.label}(r*{lam:g})")


def combine(f: TestFunction, g: TestFunction, c1: complex = 1.0, c2: complex = 1.0) -> TestFunction:
    """``c1 f + c2 g`` on the convex hull of both supports."""
    support = (min(f.support[0], g.support[0]), max(f.support[1], g.support[1]))

    def rule(r):
        fv = f.jet(r)
        gv = g.jet(r)
        return tuple(c1 * x + c2 * y for x, y in zip(fv, gv))

    return TestFunction(support, rule, f"({c1:g})*{f.label}+({c2:g})*{g.label}")


FAMILY_KINDS = ("polynomial-bump", "mollifier-bump")


@dataclass(frozen=True)
class FamilySpec:
    """Serializable recipe for one corpus function.

    Transformations apply in a fixed order: power, then modulation, then
    dilation. ``None`` means the transformation is skipped.
    """

    kind: str
    a: float
    b: float
    k: Optional[int] = None
    omega: Optional[float] = None
    gamma: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")
        _check_support(self.a, self.b)
        if self.kind == "polynomial-bump":
            if self.k is None or int(self.k) != self.k or self.k < 3:
                raise InsufficientSmoothness(f"polynomial-bump needs integer k >= 3, got {self.k}")
        if self.lam is not None and not self.lam > 0:
            raise InvalidSupport(f"lambda must be positive, got {self.lam}")

    def build(self) -> TestFunction:
        if self.kind == "polynomial-bump":
            f = make_poly_bump(self.a, self.b, int(self.k))
        else:
            f = make_mollifier_bump(self.a, self.b)
        if self.gamma is not None:
            f = scale_power(f, self.gamma)
        if self.omega is not None:
            f = modulate(f, self.omega)
        if self.lam is not None:
            f = dilate(f, self.lam)
        return f

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.a,
            "b": self.b,
            "k": self.k,
            "omega": self.omega,
            "gamma": self.gamma,
            "lambda": self.lam,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FamilySpec":
        unknown = set(obj) - {"kind", "a", "b", "k", "omega", "gamma", "lambda"}
        if unknown:
            raise ValueError(f"unknown FamilySpec fields: {sorted(unknown)}")
        if "kind" not in obj or "a" not in obj or "b" not in obj:
            raise ValueError("FamilySpec requires 'kind', 'a' and 'b'")
        return cls(
            kind=obj["kind"],
            a=float(obj["a"]),
            b=float(obj["b"]),
            k=obj.get("k"),
            omega=None if obj.get("omega") is None else float(obj["omega"]),
            gamma=None if obj.get("gamma") is None else float(obj["gamma"]),
            lam=None if obj.get("lambda") is None else float(obj["lambda"]),
        )
