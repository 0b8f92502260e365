"""Weighted integrals over compact subintervals of (0, inf), plus a Monte Carlo oracle.

The deterministic integrator is a globally adaptive panel rule: each panel is
integrated with an ``n``-point Gauss-Legendre rule, and the panel error is
estimated by comparing that value with the sum over its two halves. Panels
whose share of the error is too large are bisected until the total estimate
meets ``rel_tol * |value|`` (or ``abs_tol``).

The weight ``r**beta`` is folded into the integrand; supports never touch 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DegenerateSampling, InvalidSupport, NoConvergence

EPS = np.finfo(float).eps

# Monte Carlo points are drawn in chunks of this size, chunk i from child seed i.
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_depth: int = 40
    nodes_per_panel: int = 15

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    panels_used: int


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _initial_panels(a: float, b: float) -> np.ndarray:
    # wide supports (e.g. the log-bump family) get geometric panels up front
    ratio = b / a
    if ratio <= 4.0:
        return np.array([a, b])
    count = int(math.ceil(math.log2(ratio)))
    edges = np.geomspace(a, b, count + 1)
    edges[0], edges[-1] = a, b
    return edges


def _resolve_support(g, support) -> tuple[float, float]:
    if support is None:
        support = getattr(g, "support", None)
    if support is None:
        raise InvalidSupport("function has no compact support; pass an explicit interval")
    a, b = float(support[0]), float(support[1])
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0 or b < a:
        raise InvalidSupport(f"integration interval must lie in (0, inf), got [{a}, {b}]")
    return a, b


def weighted_integral(
    g: Callable[[np.ndarray], np.ndarray],
    support=None,
    beta: float = 0.0,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> IntegralResult:
    """Integrate ``g(r) r**beta`` over ``support`` (defaults to ``g.support``)."""
    a, b = _resolve_support(g, support)
    if a == b:
        return IntegralResult(0j, 0.0, 0)
    nodes, weights = gauss_legendre(cfg.nodes_per_panel)
    n = nodes.size

    def panel_sums(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        r = mid[:, None] + half[:, None] * nodes[None, :]
        vals = np.asarray(g(r.ravel()), dtype=complex).reshape(lo.size, n)
        vals = vals * r**beta
        total = (vals @ weights) * half
        mag = (np.abs(vals) @ weights) * half
        return total, mag

    def halves(lo, hi, coarse):
        mid = 0.5 * (lo + hi)
        lo2 = np.concatenate([lo, mid])
        hi2 = np.concatenate([mid, hi])
        t, m = panel_sums(lo2, hi2)
        k = lo.size
        left, right = t[:k], t[k:]
        fine = left + right
        err = np.abs(coarse - fine)
        return left, right, fine, err, m[:k] + m[k:]

    edges = _initial_panels(a, b)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    coarse, _ = panel_sums(lo, hi)
    depth = np.zeros(lo.size, dtype=int)
    left, right, fine, err, mag = halves(lo, hi, coarse)

    while True:
        value = complex(fine.sum())
        trunc = float(err.sum())
        magnitude = float(mag.sum())
        roundoff = 50.0 * EPS * magnitude
        target = max(cfg.rel_tol * abs(value), cfg.abs_tol)
        estimate = max(trunc, roundoff)
        result = IntegralResult(value, float(estimate), int(lo.size))
        if trunc <= target or trunc <= roundoff:
            return result

        share = target / lo.size
        split = err > share
        split[int(np.argmax(err))] = True
        split &= depth < cfg.max_depth
        if not split.any():
            raise NoConvergence(
                f"adaptive quadrature reached max_depth={cfg.max_depth} on [{a}, {b}] "
                f"with error {trunc:.3e} > target {target:.3e}",
                result,
            )

        keep = ~split
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[keep], lo[split], mids])
        new_hi = np.concatenate([hi[keep], mids, hi[split]])
        new_coarse = np.concatenate([left[split], right[split]])
        new_depth = np.concatenate([depth[split] + 1, depth[split] + 1])
        nl, nr, nf, ne, nm = halves(new_lo[keep.sum():], new_hi[keep.sum():], new_coarse)

        lo = new_lo
        hi = new_hi
        depth = np.concatenate([depth[keep], new_depth])
        left = np.concatenate([left[keep], nl])
        right = np.concatenate([right[keep], nr])
        fine = np.concatenate([fine[keep], nf])
        err = np.concatenate([err[keep], ne])
        mag = np.concatenate([mag[keep], nm])
        # keep panels in positional order so sums are reproducible
        order = np.argsort(lo, kind="stable")
        lo, hi, depth = lo[order], hi[order], depth[order]
        left, right, fine, err, mag = left[order], right[order], fine[order], err[order], mag[order]


def _common_support(f, g, support):
    if support is not None:
        return support
    sf = getattr(f, "support", None)
    sg = getattr(g, "support", None)
    if sf is None and sg is None:
        return None
    if sf is None:
        return sg
    if sg is None:
        return sf
    lo, hi = max(sf[0], sg[0]), min(sf[1], sg[1])
    if hi <= lo:
        return (lo, lo)
    return (lo, hi)


def inner(f, g, support=None, beta: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUAD) -> IntegralResult:
    """Hermitian product ``<f, g> = int f conj(g) r**beta dr``, conjugate-linear in ``g``."""
    sup = _common_support(f, g, support)
    return weighted_integral(lambda r: f(r) * np.conj(g(r)), sup, beta, cfg)


def norm_sq(f, support=None, beta: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``||f||**2`` in ``L^2(r**beta dr)``."""
    if support is None:
        support = getattr(f, "support", None)
    res = weighted_integral(lambda r: np.abs(f(r)) ** 2, support, beta, cfg)
    return float(res.value.real)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n, ``2 pi**(n/2) / Gamma(n/2)``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def mc_radial(
    n: int,
    f,
    weight_power: float,
    samples: int,
    seed: int,
    min_accepted: int = 100,
) -> tuple[float, float]:
    """Estimate ``int_{R^n} |f(|x|)|**2 |x|**p dx`` by box rejection sampling.

    Points are uniform in ``[-b, b]**n``; those with ``a <= |x| <= b`` contribute.
    Chunk ``i`` of ``MC_CHUNK`` points always uses the ``i``-th child of
    ``SeedSequence(seed)``, so results do not depend on how chunks are scheduled.
    Returns ``(estimate, standard_error)``.
    """
    if not 2 <= n <= 5:
        raise ValueError(f"dimension must be in 2..5, got {n}")
    if samples < 1:
        raise DegenerateSampling("no samples requested")
    a, b = f.support
    volume = (2.0 * b) ** n
    n_chunks = -(-samples // MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    accepted = 0
    for i, child in enumerate(children):
        size = min(MC_CHUNK, samples - i * MC_CHUNK)
        rng = np.random.default_rng(child)
        x = rng.uniform(-b, b, size=(size, n))
        rho = np.sqrt(np.einsum("ij,ij->i", x, x))
        keep = (rho >= a) & (rho <= b)
        accepted += int(keep.sum())
        rk = rho[keep]
        h = np.abs(f(rk)) ** 2 * rk**weight_power
        total += math.fsum(h)
        total_sq += math.fsum(h * h)
    if accepted < min_accepted:
        raise DegenerateSampling(f"only {accepted} of {samples} points fell in the annulus (< {min_accepted})")
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    se = math.sqrt(var / samples) if samples > 1 else 0.0
    return volume * mean, volume * se
