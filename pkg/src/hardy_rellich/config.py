"""Run configuration: JSON schema version 1.

Example (abridged)::

    {
      "schema_version": 1,
      "alphas": [-2, -1, 0, 1, 1.5, 2, 3, 4, 5],
      "betas": [-1, 0, 1, 2, 3, 3.5, 4, 5],
      "corpus": [{"kind": "polynomial-bump", "a": 1, "b": 2, "k": 3}],
      "checks": ["h1", "r1"],
      "quad": {"rel_tol": 1e-12},
      "mc": {"dims": [2, 3, 4], "samples": 1000000, "seed": 20261015, "functions": [0]},
      "extremal": {"targets": [{"target": "rellich", "alpha": 4, "beta": 4}],
                   "m_list": [2, 4, 6, 8, 10], "max_iters": 200},
      "tolerance": {"identity": 1e-8, "inequality": 1e-10, "sigma": 3},
      "output": "out"
    }
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, HardyRellichError
from .extremal import M_MAX, TARGETS
from .funcspace import FamilySpec
from .identities import IDENTITY_TOL, INEQUALITY_TOL
from .quad import QuadratureConfig

SCHEMA_VERSION = 1

# "dimensional" runs Monte Carlo and is driven by the oracle command unless listed explicitly
SWEEP_CHECKS = (
    "h1",
    "r1",
    "r2",
    "ibp_chain",
    "q1",
    "beta2_sign",
    "lemma21",
    "r5",
    "r6",
    "r7",
    "coefficient",
    "remark23",
)
KNOWN_CHECKS = SWEEP_CHECKS + ("dimensional",)

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "alphas": [-2, -1, 0, 1, 1.5, 2, 3, 4, 5],
    "betas": [-1, 0, 1, 2, 3, 3.5, 4, 5],
    "corpus": [
        {"kind": "polynomial-bump", "a": 1, "b": 2, "k": 3},
        {"kind": "polynomial-bump", "a": 0.5, "b": 2.5, "k": 4, "gamma": -1},
        {"kind": "mollifier-bump", "a": 1, "b": 3},
        {"kind": "polynomial-bump", "a": 1, "b": 2, "k": 4, "omega": 5.0},
        {"kind": "mollifier-bump", "a": 0.5, "b": 2, "omega": 3.0, "gamma": 0.5},
        {"kind": "mollifier-bump", "a": 1, "b": 4, "lambda": 2.0},
    ],
    "checks": list(SWEEP_CHECKS),
    "quad": {"rel_tol": 1e-12, "abs_tol": 1e-300, "max_depth": 40, "nodes_per_panel": 15},
    "mc": {"dims": [2, 3, 4], "samples": 1_000_000, "seed": 20261015, "functions": [0, 2]},
    "extremal": {
        "targets": [
            {"target": "rellich", "alpha": 4, "beta": 4},
            {"target": "rellich", "alpha": 0, "beta": 0},
            {"target": "rellich", "alpha": 1, "beta": 1},
            {"target": "hardy", "beta": 2},
            {"target": "hardy", "beta": 1},
        ],
        "m_list": [2, 4, 6, 8, 10],
        "max_iters": 200,
        "init": {"kind": "mollifier-bump", "a": 1, "b": 3},
    },
    "tolerance": {"identity": IDENTITY_TOL, "inequality": INEQUALITY_TOL, "sigma": 3.0},
    "output": "out",
}


@dataclass
class MCConfig:
    dims: list[int]
    samples: int
    seed: int
    functions: Optional[list[int]] = None


@dataclass
class ExtremalTarget:
    target: str
    alpha: float
    beta: float


@dataclass
class ExtremalConfig:
    targets: list[ExtremalTarget]
    m_list: list[float]
    max_iters: int
    init: FamilySpec


@dataclass
class RunConfig:
    alphas: list[float]
    betas: list[float]
    corpus: list[FamilySpec]
    checks: list[str]
    quad: QuadratureConfig
    mc: MCConfig
    extremal: ExtremalConfig
    identity_tol: float = IDENTITY_TOL
    inequality_tol: float = INEQUALITY_TOL
    sigma: float = 3.0
    output: str = "out"
    raw: dict = field(default_factory=dict, repr=False)


def default_config_dict() -> dict:
    return copy.deepcopy(DEFAULT_CONFIG)


def _floats(obj, key) -> list[float]:
    vals = obj.get(key)
    if not isinstance(vals, list) or not vals:
        raise ConfigError(f"'{key}' must be a nonempty list")
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' must contain numbers: {exc}") from None


def parse_config(obj: dict) -> RunConfig:
    """Validate a config dict; missing sections fall back to the defaults."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    merged = default_config_dict()
    merged.update(obj)

    alphas = _floats(merged, "alphas")
    betas = _floats(merged, "betas")

    corpus_raw = merged.get("corpus")
    if not isinstance(corpus_raw, list) or not corpus_raw:
        raise ConfigError("'corpus' must be a nonempty list of function specs")
    corpus = []
    for i, spec in enumerate(corpus_raw):
        try:
            corpus.append(FamilySpec.from_json(spec))
        except (HardyRellichError, ValueError, TypeError) as exc:
            raise ConfigError(f"corpus[{i}]: {exc}") from None

    checks = merged.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ConfigError("'checks' must be a nonempty list")
    unknown = [c for c in checks if c not in KNOWN_CHECKS]
    if unknown:
        raise ConfigError(f"unknown check name(s): {', '.join(map(str, unknown))}; known: {', '.join(KNOWN_CHECKS)}")

    try:
        quad = QuadratureConfig(**{**DEFAULT_CONFIG["quad"], **merged.get("quad", {})})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"quad: {exc}") from None

    mc_raw = {**DEFAULT_CONFIG["mc"], **merged.get("mc", {})}
    try:
        mc = MCConfig(
            dims=[int(n) for n in mc_raw["dims"]],
            samples=int(mc_raw["samples"]),
            seed=int(mc_raw["seed"]),
            functions=None if mc_raw.get("functions") is None else [int(i) for i in mc_raw["functions"]],
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"mc: {exc}") from None
    if not mc.dims or any(not 2 <= n <= 5 for n in mc.dims):
        raise ConfigError("mc.dims must be a nonempty list with entries in 2..5")
    if mc.functions is not None and any(not 0 <= i < len(corpus) for i in mc.functions):
        raise ConfigError("mc.functions indexes outside the corpus")

    ex_raw = {**DEFAULT_CONFIG["extremal"], **merged.get("extremal", {})}
    targets = []
    for i, t in enumerate(ex_raw.get("targets", [])):
        name = t.get("target")
        if name not in TARGETS:
            raise ConfigError(f"extremal.targets[{i}]: unknown target {name!r}")
        if "beta" not in t or (name == "rellich" and "alpha" not in t):
            raise ConfigError(f"extremal.targets[{i}]: missing alpha/beta")
        targets.append(ExtremalTarget(name, float(t.get("alpha", 0.0)), float(t["beta"])))
    m_list = _floats(ex_raw, "m_list")
    bad = [m for m in m_list if not 0 < m <= M_MAX]
    if bad:
        raise ConfigError(f"extremal.m_list entries must lie in (0, {M_MAX:g}] (overflow guard): {bad}")
    try:
        init = FamilySpec.from_json(ex_raw["init"])
    except (HardyRellichError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"extremal.init: {exc}") from None
    extremal = ExtremalConfig(targets, m_list, int(ex_raw["max_iters"]), init)

    tol = {**DEFAULT_CONFIG["tolerance"], **merged.get("tolerance", {})}
    return RunConfig(
        alphas=alphas,
        betas=betas,
        corpus=corpus,
        checks=list(checks),
        quad=quad,
        mc=mc,
        extremal=extremal,
        identity_tol=float(tol["identity"]),
        inequality_tol=float(tol["inequality"]),
        sigma=float(tol["sigma"]),
        output=str(merged.get("output", "out")),
        raw=merged,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(obj)
