"""Expansion of a run config into independent work items, and their execution.

A work item is a plain tuple ``(check, corpus_index, params)`` so it can be
shipped to worker processes; each worker rebuilds its test function from the
corpus spec. Results are sorted by ``(name, params, fn_label)`` afterwards, so
output does not depend on the number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import identities as ids
from .config import RunConfig
from .errors import DegenerateSampling, ExcludedParameter, NoConvergence
from .funcspace import FamilySpec
from .quad import QuadratureConfig

log = logging.getLogger(__name__)

LEMMA21_SEED = 2021


def lemma21_cases(seed: int = LEMMA21_SEED):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=8) + 1j * rng.normal(size=8)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    return [
        ("u=v", u, u, -2.0),
        ("random", u, v, 3.0),
        ("u=0", np.zeros(8, dtype=complex), v, 0.5),
    ]


def expand(cfg: RunConfig) -> list[tuple]:
    """Every applicable (check, function, parameters) triple, deduplicated, in a fixed order."""
    items: list[tuple] = []
    want = set(cfg.checks)

    def add(check, idx, **params):
        items.append((check, idx, tuple(sorted(params.items()))))

    for idx in range(len(cfg.corpus)):
        if "beta2_sign" in want:
            add("beta2_sign", idx)
        for beta in cfg.betas:
            if "h1" in want:
                add("h1", idx, beta=beta)
            if "ibp_chain" in want:
                add("ibp_chain", idx, beta=beta)
            if "remark23" in want:
                add("remark23", idx, t=beta - 2)
            if "r5" in want:
                add("r5", idx, a=0.0, beta=beta)
            for alpha in cfg.alphas:
                d = beta - alpha - 2
                for name in ("r1", "r7", "q1"):
                    if name in want:
                        add(name, idx, alpha=alpha, beta=beta)
                if abs(d) > ids.EXCLUSION_EPS:
                    for name in ("r2", "r6"):
                        if name in want:
                            add(name, idx, alpha=alpha, beta=beta)
                if "r5" in want:
                    add("r5", idx, a=2 * alpha - beta + 3, beta=beta)
        if "dimensional" in want:
            fns = cfg.mc.functions if cfg.mc.functions is not None else range(len(cfg.corpus))
            if idx in fns:
                for n in cfg.mc.dims:
                    add("dimensional", idx, n=n)

    if "coefficient" in want:
        for alpha in cfg.alphas:
            for beta in cfg.betas:
                if abs(beta - alpha - 2) > ids.EXCLUSION_EPS:
                    add("coefficient", -1, alpha=alpha, beta=beta)
    if "lemma21" in want:
        for i in range(len(lemma21_cases())):
            add("lemma21", -1, case=i)

    seen = set()
    unique = []
    for it in items:
        if it not in seen:
            seen.add(it)
            unique.append(it)
    return unique


@dataclass
class ItemContext:
    corpus: list[dict]
    quad: QuadratureConfig
    identity_tol: float
    inequality_tol: float
    sigma: float
    samples: int
    seed: int
    _cache: dict = field(default_factory=dict, repr=False)

    def function(self, idx):
        if idx not in self._cache:
            self._cache[idx] = FamilySpec.from_json(self.corpus[idx]).build()
        return self._cache[idx]


def run_item(ctx: ItemContext, item) -> list[ids.IdentityReport]:
    check, idx, params = item
    p = dict(params)
    q, itol, qtol = ctx.quad, ctx.identity_tol, ctx.inequality_tol
    f = ctx.function(idx) if idx >= 0 else None
    if check == "h1":
        return [ids.check_hardy_h1(f, p["beta"], q, itol)]
    if check == "r1":
        return [ids.check_rellich_r1(f, p["alpha"], p["beta"], q, itol)]
    if check == "r2":
        return [ids.check_rellich_r2(f, p["alpha"], p["beta"], q, itol)]
    if check == "ibp_chain":
        return ids.check_ibp_chain(f, p["beta"], None, q, itol)
    if check == "q1":
        return ids.check_q1(f, p["alpha"], p["beta"], q, itol)
    if check == "beta2_sign":
        return [ids.check_beta2_sign(f, q)]
    if check == "r5":
        return ids.check_r5(f, p["a"], p["beta"], q, itol)
    if check == "r6":
        return ids.check_r6(f, p["alpha"], p["beta"], q, itol)
    if check == "r7":
        return [ids.check_rellich_ineq_r7(f, p["alpha"], p["beta"], q, qtol)]
    if check == "remark23":
        return ids.check_remark23(f, p["t"], q, qtol)
    if check == "coefficient":
        return [ids.check_coefficient_identity(p["alpha"], p["beta"])]
    if check == "lemma21":
        label, u, v, c = lemma21_cases()[p["case"]]
        rep = ids.check_lemma21(u, v, c)
        rep.fn_label = f"{rep.fn_label}:{label}"
        return [rep]
    if check == "dimensional":
        return ids.check_dimensional_reduction(f, p["n"], ctx.samples, ctx.seed, q, ctx.sigma, itol)
    raise KeyError(f"no runner for check {check!r}")


@dataclass
class SweepResult:
    reports: list[ids.IdentityReport]
    errors: list[str]
    skipped: int = 0

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _run_chunk(args):
    ctx, chunk = args
    out = []
    for item in chunk:
        try:
            out.append(("ok", item, run_item(ctx, item)))
        except ExcludedParameter:
            out.append(("skip", item, []))
        except (NoConvergence, DegenerateSampling) as exc:
            out.append(("error", item, f"{item[0]} {dict(item[2])} fn#{item[1]}: {exc}"))
    return out


def make_context(cfg: RunConfig) -> ItemContext:
    return ItemContext(
        corpus=[spec.to_json() for spec in cfg.corpus],
        quad=cfg.quad,
        identity_tol=cfg.identity_tol,
        inequality_tol=cfg.inequality_tol,
        sigma=cfg.sigma,
        samples=cfg.mc.samples,
        seed=cfg.mc.seed,
    )


def run_items(cfg: RunConfig, items: list[tuple], jobs: int = 1) -> SweepResult:
    ctx = make_context(cfg)
    if jobs <= 1 or len(items) < 2:
        outcomes = _run_chunk((ctx, items))
    else:
        # interleaved chunks balance the cheap and expensive checks
        chunks = [items[i::jobs * 4] for i in range(jobs * 4)]
        outcomes = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_chunk, [(ctx, c) for c in chunks if c]):
                outcomes.extend(part)
    reports, errors, skipped = [], [], 0
    for status, _item, payload in outcomes:
        if status == "ok":
            reports.extend(payload)
        elif status == "skip":
            skipped += 1
        else:
            errors.append(payload)
    reports.sort(key=lambda r: r.sort_key())
    errors.sort()
    log.info("ran %d items: %d reports, %d skipped, %d errors", len(items), len(reports), skipped, len(errors))
    return SweepResult(reports, errors, skipped)
