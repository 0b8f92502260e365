"""Rayleigh quotients and near-extremizer families for the sharp constants.

The family ``f_m(r) = r**p * chi((ln r - c) / m)`` uses the power ``p`` that the
remainder operators annihilate, cut off in log scale by a fixed C^inf bump
``chi`` on (-1, 1). All remainder terms then live where ``chi'`` is nonzero,
so each Rayleigh quotient gap decays like ``1/m**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import OverflowGuard, ZeroDenominator
from .funcspace import FamilySpec, TestFunction, mollifier_jet, scale_power
from .operators import apply_L, c_const, extremal_power, h_const, pointwise
from .quad import DEFAULT_QUAD, QuadratureConfig, norm_sq

M_MAX = 300.0
TARGETS = ("hardy", "rellich")

# simplex search box: log-width, power offset
_M_BOUNDS = (0.05, 30.0)
_OFFSET_BOUND = 2.0


@dataclass(frozen=True)
class TracePoint:
    param: float
    ratio: float
    target: float

    @property
    def gap(self) -> float:
        return self.ratio - self.target


def make_log_bump(m: float, beta: float, power: Optional[float] = None, center: float = 0.0) -> TestFunction:
    """Log-scale bump of half-width ``m`` around ``exp(center)`` times ``r**power``.

    ``power`` defaults to the Rellich extremal power ``(3 - beta)/2``.
    """
    if not m > 0:
        raise ValueError(f"log-width must be positive, got {m}")
    if m > M_MAX or abs(center) + m > M_MAX:
        raise OverflowGuard(f"log-width {m} exceeds {M_MAX}; support endpoints would overflow")
    if power is None:
        power = extremal_power(beta)

    def rule(r):
        s = (np.log(r) - center) / m
        v, d1, d2 = mollifier_jet(s)
        mr = m * r
        return v.astype(complex), d1 / mr, d2 / mr**2 - d1 / (m * r * r)

    bump = TestFunction((math.exp(center - m), math.exp(center + m)), rule, f"logbump(m={m:g},c={center:g})")
    return scale_power(bump, power)


def hardy_log_bump(m: float, beta: float, center: float = 0.0) -> TestFunction:
    """Log bump with the Hardy extremal power ``-(beta - 1)/2``."""
    return make_log_bump(m, beta, power=-h_const(beta + 1), center=center)


def rayleigh_rellich(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``||L_alpha f||**2 / ||f/r**2||**2`` in ``L^2(r**beta dr)``."""
    den = norm_sq(pointwise(f, lambda r, v, d1, d2: v / r**2, "f/r^2"), beta=beta, cfg=cfg)
    if not den > 0:
        raise ZeroDenominator("||f/r^2|| vanishes")
    return norm_sq(apply_L(alpha, f), beta=beta, cfg=cfg) / den


def rayleigh_hardy(f, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``||f'||**2 / ||f/r||**2`` in ``L^2(r**beta dr)``."""
    den = norm_sq(pointwise(f, lambda r, v, d1, d2: v / r, "f/r"), beta=beta, cfg=cfg)
    if not den > 0:
        raise ZeroDenominator("||f/r|| vanishes")
    return norm_sq(pointwise(f, lambda r, v, d1, d2: d1, "f'"), beta=beta, cfg=cfg) / den


def target_constant(target: str, alpha: float, beta: float) -> float:
    if target == "rellich":
        return c_const(alpha, beta) ** 2
    if target == "hardy":
        return h_const(beta + 1) ** 2
    raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")


def _family(target, m, alpha, beta, center=0.0, offset=0.0):
    if target == "rellich":
        return make_log_bump(m, beta, power=extremal_power(beta) + offset, center=center)
    return make_log_bump(m, beta, power=-h_const(beta + 1) + offset, center=center)


def _ratio(target, f, alpha, beta, cfg):
    if target == "rellich":
        return rayleigh_rellich(f, alpha, beta, cfg)
    return rayleigh_hardy(f, beta, cfg)


def family_trace(target: str, alpha: float, beta: float, m_list: Sequence[float],
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> list[TracePoint]:
    """Rayleigh quotient of the log-bump family at each log-width in ``m_list``."""
    goal = target_constant(target, alpha, beta)
    return [TracePoint(float(m), _ratio(target, _family(target, m, alpha, beta), alpha, beta, cfg), goal)
            for m in m_list]


@dataclass
class MinimizeResult:
    trace: list[TracePoint]
    best_params: tuple[float, float, float]
    evaluations: list[float]
    target: float

    @property
    def best_ratio(self) -> float:
        return self.trace[-1].ratio if self.trace else math.inf

    def lower_bound_respected(self, rel: float = 1e-8) -> bool:
        floor = self.target - rel * max(1.0, self.target)
        return all(e >= floor for e in self.evaluations) and all(p.ratio >= floor for p in self.trace)


def _init_params(init: FamilySpec, target: str, beta: float) -> np.ndarray:
    center = 0.5 * math.log(init.a * init.b)
    m = 0.5 * math.log(init.b / init.a)
    base = extremal_power(beta) if target == "rellich" else -h_const(beta + 1)
    offset = 0.0 if init.gamma is None else init.gamma - base
    return np.array([center, m, offset])


def minimize_ratio(
    target: str,
    alpha: float,
    beta: float,
    init: FamilySpec,
    max_iters: int = 200,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    window: int = 20,
    rel_improvement: float = 1e-6,
) -> MinimizeResult:
    """Nelder-Mead over (log-center, log-width, power offset) of the log-bump family.

    The trace holds the best ratio after each simplex iteration, so it is
    nonincreasing. Stops after ``max_iters`` iterations or once the best ratio
    improved by less than ``rel_improvement`` (relative) over ``window`` iterations.
    """
    goal = target_constant(target, alpha, beta)
    evaluations: list[float] = []
    best = {"fun": math.inf, "x": None}

    def clip(x):
        c, m, d = x
        m = min(max(m, _M_BOUNDS[0]), _M_BOUNDS[1])
        d = min(max(d, -_OFFSET_BOUND), _OFFSET_BOUND)
        c = min(max(c, -50.0), 50.0)
        return c, m, d

    def objective(x):
        c, m, d = clip(x)
        val = _ratio(target, _family(target, m, alpha, beta, center=c, offset=d), alpha, beta, cfg)
        evaluations.append(val)
        if val < best["fun"]:
            best["fun"], best["x"] = val, (c, m, d)
        return val

    trace: list[TracePoint] = []

    def callback(intermediate_result):
        trace.append(TracePoint(float(len(trace) + 1), best["fun"], goal))
        if len(trace) > window:
            old = trace[-1 - window].ratio
            if old - trace[-1].ratio <= rel_improvement * abs(trace[-1].ratio):
                raise StopIteration

    x0 = _init_params(init, target, beta)
    objective(x0)
    trace.append(TracePoint(0.0, best["fun"], goal))
    minimize(
        objective,
        x0,
        method="Nelder-Mead",
        callback=callback,
        options={"maxiter": max_iters, "xatol": 0.0, "fatol": 0.0, "initial_simplex": _simplex(x0)},
    )
    return MinimizeResult(trace, best["x"], evaluations, goal)


def _simplex(x0):
    steps = np.array([0.5, 1.0, 0.25])
    return np.vstack([x0] + [x0 + np.eye(3)[i] * steps[i] for i in range(3)])
