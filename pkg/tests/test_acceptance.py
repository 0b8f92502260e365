"""One test per acceptance criterion; each records a PASS/FAIL line in the terminal summary."""

import json
import time

import numpy as np
import pytest

from hardy_rellich import identities as ids
from hardy_rellich.cli import main
from hardy_rellich.config import default_config_dict, parse_config
from hardy_rellich.extremal import family_trace
from hardy_rellich.funcspace import bare_power, dilate, make_mollifier_bump, make_poly_bump, modulate, scale_power
from hardy_rellich.operators import apply_L, c_const, extremal_power, f_sharp, f_star, r_const
from hardy_rellich.quad import weighted_integral
from hardy_rellich.sweep import expand, run_items

from test_funcspace import fd_slopes
from test_quad import BETA_FAMILY, poly_bump_moment

EQUALITY_CHECKS = ["h1", "r1", "r2", "r5", "r6", "ibp_chain"]
M_LIST = [2, 4, 6, 8, 10]


def test_criterion_1_equality_suite(acceptance):
    cfg = parse_config({**default_config_dict(), "checks": EQUALITY_CHECKS})
    assert len(cfg.alphas) == 9 and len(cfg.betas) == 8 and len(cfg.corpus) == 6
    complex_fns = [s for s in cfg.corpus if s.omega]
    start = time.perf_counter()
    result = run_items(cfg, expand(cfg), jobs=1)
    elapsed = time.perf_counter() - start
    worst = max(r.rel_residual for r in result.reports)
    names = {r.name for r in result.reports}
    ok = (
        not result.errors
        and len(complex_fns) >= 2
        and {"h1", "r1", "r2", "r5", "r6", "r4", "r3_step1", "r3_step2", "ibp_quotient", "ibp_cubic"} <= names
        and worst <= 1e-8
        and elapsed <= 60
    )
    acceptance(1, ok, f"{len(result.reports)} equality reports, max rel_residual {worst:.2e}, {elapsed:.1f} s single-threaded")
    assert ok


def _random_fn(rng):
    a = rng.uniform(0.2, 3.0)
    b = a + rng.uniform(0.2, 4.0)
    f = make_poly_bump(a, b, int(rng.integers(3, 8))) if rng.random() < 0.5 else make_mollifier_bump(a, b)
    if rng.random() < 0.5:
        f = modulate(f, rng.uniform(-8, 8))
    if rng.random() < 0.3:
        f = scale_power(f, rng.uniform(-2, 2))
    return f


def test_criterion_2_inequality_sweep(acceptance):
    rng = np.random.default_rng(1000)
    worst, failures = 0.0, 0
    for _ in range(1000):
        f = _random_fn(rng)
        alpha, beta = rng.uniform(-3, 6, size=2)
        reps = [ids.check_rellich_ineq_r7(f, alpha, beta)] + ids.check_remark23(f, beta - 2)
        for rep in reps:
            worst = max(worst, rep.rel_residual)
            failures += not rep.passed
    ok = failures == 0
    acceptance(2, ok, f"1000 draws x (r7, remark23 hardy, remark23 rellich): {failures} failures, max violation {worst:.1e}")
    assert ok


def test_criterion_3_constants(acceptance):
    const_err = max(abs(c_const(n - 1, n - 1) - r_const(n)) for n in range(2, 11))
    worst, positive = 0.0, True
    count = 0
    for alpha in np.linspace(-3, 6, 10):
        for beta in np.linspace(-2.95, 7.05, 10):
            if abs(beta - alpha - 2) <= ids.EXCLUSION_EPS:
                continue
            rep = ids.check_coefficient_identity(alpha, beta)
            worst = max(worst, rep.rel_residual)
            positive &= rep.notes["left_positive"]
            count += 1
    ok = const_err <= 1e-15 and worst <= 1e-14 and positive and count == 100
    acceptance(3, ok, f"C(n-1,n-1)=R(n) err {const_err:.1e}; coefficient identity max rel {worst:.1e} on {count} points, left>0: {positive}")
    assert ok


def test_criterion_4_annihilation(acceptance):
    rng = np.random.default_rng(4)
    r = np.linspace(0.3, 5.0, 101)
    worst = 0.0
    for alpha, beta in rng.uniform(-3, 6, size=(20, 2)):
        f = bare_power(extremal_power(beta))
        scale = np.abs(r ** (extremal_power(beta) - 2))
        C = c_const(alpha, beta)
        for val in (
            f_star(beta, f)(r) * r,
            f_sharp(beta, f)(r),
            apply_L(alpha, f)(r) + C * f(r) / r**2,
        ):
            worst = max(worst, float(np.max(np.abs(val) / scale)))
    ok = worst <= 1e-13
    acceptance(4, ok, f"20 random (alpha, beta): max |residual| {worst:.1e} relative to r^(p-2)")
    assert ok


def test_criterion_5_monotone_families(acceptance):
    rellich = [p.ratio for p in family_trace("rellich", 4, 4, M_LIST)]
    hardy = [p.ratio for p in family_trace("hardy", 0, 2, M_LIST)]
    ok = all(b <= a for a, b in zip(rellich, rellich[1:])) and all(b <= a for a, b in zip(hardy, hardy[1:]))
    acceptance("5a", ok, f"log-bump ratios nonincreasing over m in {M_LIST}: rellich(4,4) {rellich[0]:.4f} -> {rellich[-1]:.4f}")
    assert ok


@pytest.mark.xfail(strict=True, reason="Poincare bound: the log-bump ratio at m=10 exceeds 1.1x the sharp constants")
def test_criterion_5_sharpness_at_m10(acceptance):
    rellich = family_trace("rellich", 4, 4, [10.0])[0]
    hardy = family_trace("hardy", 0, 2, [10.0])[0]
    r_ok = rellich.ratio <= 1.1 * 25 / 16
    h_ok = hardy.ratio <= 1.1 * 0.25
    acceptance("5b", r_ok and h_ok,
               f"m=10: rellich(4,4) ratio {rellich.ratio:.4f} vs limit {1.1 * 25 / 16:.5f}; "
               f"hardy(beta=2) ratio {hardy.ratio:.4f} vs limit 0.275")
    assert r_ok and h_ok


@pytest.mark.slow
def test_criterion_6_dimensional_reduction(acceptance):
    cfg = default_config_dict()
    fns = [make_poly_bump(1, 2, 3), make_mollifier_bump(1, 3)]
    worst_z, worst_eq, ok = 0.0, 0.0, True
    for f in fns:
        for n in (2, 3, 4):
            for rep in ids.check_dimensional_reduction(f, n, samples=10**6, seed=cfg["mc"]["seed"]):
                ok &= rep.passed
                if rep.kind == "statistical":
                    worst_z = max(worst_z, rep.notes["z"])
                else:
                    worst_eq = max(worst_eq, rep.rel_residual)
    ok &= worst_z <= 3 and worst_eq <= 1e-8
    acceptance(6, ok, f"n in (2,3,4), N=1e6, 2 functions: max z {worst_z:.2f}; O1/O1' max rel_residual {worst_eq:.1e}")
    assert ok


def test_criterion_7_beta_two(acceptance):
    fns = [
        make_poly_bump(1, 2, 3),
        make_poly_bump(0.5, 3, 5),
        make_mollifier_bump(1, 3),
        make_mollifier_bump(0.2, 0.9),
        modulate(make_poly_bump(1, 2, 4), 5.0),
        modulate(make_mollifier_bump(0.5, 2), 3.0),
        scale_power(make_poly_bump(0.5, 2.5, 4), -1),
        scale_power(modulate(make_mollifier_bump(1, 4), -2.0), 0.5),
        dilate(make_mollifier_bump(1, 4), 2.0),
        dilate(make_poly_bump(2, 7, 6), 0.3),
    ]
    reps = [ids.check_beta2_sign(f) for f in fns]
    signs = {rep.notes["sign"] for rep in reps}
    worst_match = max(min(rep.notes["residual_plus"], rep.notes["residual_minus"]) for rep in reps)
    worst_mid = max(rep.notes["middle_rel"] for rep in reps)
    r1 = max(ids.check_rellich_r1(f, a, 2.0).rel_residual for f in fns for a in (0.0, 1.0, 4.0))
    ok = len(signs) == 1 and 0 not in signs and worst_match <= 1e-9 and worst_mid <= 1e-9 and r1 <= 1e-8
    acceptance(7, ok, f"sign s={signs} on 10 functions, match {worst_match:.1e}, middle term {worst_mid:.1e}; r1 at beta=2 {r1:.1e}")
    assert ok


def test_criterion_8_hygiene(acceptance, tmp_path):
    slopes = [s for f in (make_poly_bump(1, 2, 3), make_mollifier_bump(1, 3)) for s in fd_slopes(f)]
    slope_ok = all(abs(s - 2.0) <= 0.1 for s in slopes)

    honest = True
    for a, b, k, beta in BETA_FAMILY:
        res = weighted_integral(make_poly_bump(float(a), float(b), k), beta=float(beta))
        honest &= abs(res.value.real - float(poly_bump_moment(a, b, k, beta))) <= 10 * res.error_estimate

    cfg = default_config_dict()
    cfg.update(alphas=[0, 4], betas=[1, 4])
    cfg["mc"].update(dims=[2, 3], samples=100_000)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    blobs = {}
    for cmd in ("verify", "oracle"):
        for jobs in ("1", "2", "4"):
            out = tmp_path / f"{cmd}{jobs}"
            assert main([cmd, "--config", str(path), "--out", str(out), "--jobs", jobs]) == 0
            blobs.setdefault(cmd, set()).add((out / "reports.csv").read_bytes() + (out / "reports.json").read_bytes())
    deterministic = all(len(v) == 1 for v in blobs.values())

    ok = slope_ok and honest and deterministic
    acceptance(8, ok, f"FD slopes {min(slopes):.3f}..{max(slopes):.3f}; quadrature estimate honest on "
                      f"{len(BETA_FAMILY)} Beta integrals: {honest}; byte-identical over jobs 1/2/4: {deterministic}")
    assert ok
