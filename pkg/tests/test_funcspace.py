import math

import numpy as np
import pytest

from hardy_rellich.errors import InsufficientSmoothness, InvalidSupport
from hardy_rellich.funcspace import (
    FamilySpec,
    combine,
    dilate,
    make_mollifier_bump,
    make_poly_bump,
    modulate,
    scale_power,
)
from hardy_rellich.quad import norm_sq, weighted_integral

from conftest import corpus

STEPS = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])


def fd_slopes(f, n_points=200, seed=0):
    """Log-log slopes of the worst central-difference errors against the jet."""
    a, b = f.support
    margin = 2 * STEPS[0]
    rng = np.random.default_rng(seed)
    r = rng.uniform(a + margin, b - margin, n_points)
    _, d1, d2 = f.jet(r)
    e1, e2 = [], []
    for h in STEPS:
        fp, f0, fm = f(r + h), f(r), f(r - h)
        e1.append(np.max(np.abs((fp - fm) / (2 * h) - d1)))
        e2.append(np.max(np.abs((fp - 2 * f0 + fm) / h**2 - d2)))
    s1 = np.polyfit(np.log(STEPS), np.log(e1), 1)[0]
    s2 = np.polyfit(np.log(STEPS), np.log(e2), 1)[0]
    return s1, s2


class TestPolyBump:
    def test_center_value(self):
        f = make_poly_bump(1, 2, 3)
        assert f(np.array([1.5]))[0] == pytest.approx(0.015625, rel=1e-15)

    def test_outside_support_is_zero(self):
        f = make_poly_bump(1, 2, 3)
        v, d1, d2 = f.jet(np.array([0.5, 2.5, 1e-3, 100.0]))
        assert np.all(v == 0) and np.all(d1 == 0) and np.all(d2 == 0)

    def test_integral_is_beta_4_4(self):
        f = make_poly_bump(1, 2, 3)
        res = weighted_integral(f, beta=0.0)
        assert res.value.real == pytest.approx(1 / 140, rel=1e-12)

    def test_continuous_at_endpoints(self):
        f = make_poly_bump(1, 2, 3)
        for r in (1 + 1e-7, 2 - 1e-7):
            v, d1, d2 = f.jet(np.array([r]))
            assert abs(v[0]) < 1e-18 and abs(d1[0]) < 1e-12 and abs(d2[0]) < 1e-6

    @pytest.mark.parametrize("a,b", [(0, 1), (-1, 1), (2, 2), (3, 1)])
    def test_invalid_support(self, a, b):
        with pytest.raises(InvalidSupport):
            make_poly_bump(a, b, 3)

    @pytest.mark.parametrize("k", [0, 1, 2, 2.5])
    def test_insufficient_smoothness(self, k):
        with pytest.raises(InsufficientSmoothness):
            make_poly_bump(1, 2, k)


class TestMollifier:
    def test_center(self):
        f = make_mollifier_bump(1, 3)
        v, d1, _ = f.jet(np.array([2.0]))
        assert v[0].real == pytest.approx(math.exp(-1), rel=1e-15)
        assert d1[0] == 0

    def test_fd_slope_at_one_point(self):
        f = make_mollifier_bump(1, 3)
        r = np.array([1.5])
        d1 = f.jet(r)[1][0]
        hs = np.array([1e-2, 5e-3, 2.5e-3])
        errs = [abs((f(r + h) - f(r - h))[0] / (2 * h) - d1) for h in hs]
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert abs(slope - 2) < 0.1

    def test_vanishes_near_edges(self):
        f = make_mollifier_bump(1, 3)
        v, d1, d2 = f.jet(np.array([1.0, 1 + 1e-9, 3 - 1e-9, 3.0]))
        assert np.all(v == 0) and np.all(d1 == 0) and np.all(d2 == 0)

    def test_invalid_support(self):
        with pytest.raises(InvalidSupport):
            make_mollifier_bump(0, 1)


@pytest.mark.parametrize("idx", range(6))
def test_jet_consistency_order_two(idx):
    s1, s2 = fd_slopes(corpus()[idx])
    assert abs(s1 - 2) <= 0.1
    assert abs(s2 - 2) <= 0.1


class TestCombinators:
    r = np.linspace(0.4, 3.2, 57)

    def test_modulate_zero_is_identity(self, poly3):
        assert modulate(poly3, 0.0) is poly3

    def test_modulate_preserves_modulus(self, moll13):
        g = modulate(moll13, 2.7)
        np.testing.assert_allclose(np.abs(g(self.r)), np.abs(moll13(self.r)), rtol=1e-15, atol=0)

    def test_modulate_preserves_norm(self, poly3):
        a = norm_sq(poly3, beta=2.0)
        b = norm_sq(modulate(poly3, 4.0), beta=2.0)
        assert b == pytest.approx(a, rel=1e-12)

    def test_modulate_composes(self, moll13):
        g1 = modulate(modulate(moll13, 1.3), -0.4)
        g2 = modulate(moll13, 0.9)
        for x, y in zip(g1.jet(self.r), g2.jet(self.r)):
            np.testing.assert_allclose(x, y, rtol=1e-14, atol=1e-14 * np.max(np.abs(y)))

    def test_scale_power_product_rule(self, poly3):
        g = scale_power(poly3, 1)
        v, d1, _ = poly3.jet(self.r)
        gv, gd1, _ = g.jet(self.r)
        np.testing.assert_allclose(gv, self.r * v, rtol=1e-15)
        np.testing.assert_allclose(gd1, v + self.r * d1, rtol=1e-14, atol=1e-16)

    def test_scale_power_inverse(self, poly3):
        g = scale_power(poly3, -2)
        np.testing.assert_allclose(g(self.r) * self.r**2, poly3(self.r), rtol=1e-14, atol=0)
        assert scale_power(poly3, 0) is poly3

    def test_dilate_support_and_identity(self, poly3):
        assert dilate(poly3, 2.0).support == (0.5, 1.0)
        assert dilate(poly3, 1.0) is poly3

    def test_dilate_roundtrip(self, moll13):
        g = dilate(dilate(moll13, 3.0), 1 / 3.0)
        for x, y in zip(g.jet(self.r), moll13.jet(self.r)):
            np.testing.assert_allclose(x, y, rtol=1e-14, atol=1e-14 * np.max(np.abs(y)))

    def test_dilate_scaling_of_weighted_norm(self, poly3):
        # ||f_lam / r^2||^2 in L^2_1 scales like lam^(3 - beta) = lam^2
        over = lambda f: (lambda r: f(r) / r**2)
        g = dilate(poly3, 2.0)
        a = norm_sq(over(poly3), support=poly3.support, beta=1.0)
        b = norm_sq(over(g), support=g.support, beta=1.0)
        assert b == pytest.approx(2.0**2 * a, rel=1e-12)

    def test_combine_zero(self, poly3):
        z = combine(poly3, poly3, 0.0, 0.0)
        assert np.all(z(self.r) == 0)


class TestFamilySpec:
    def test_roundtrip(self):
        spec = FamilySpec("polynomial-bump", 1.0, 2.0, k=4, omega=5.0, gamma=-1.0, lam=2.0)
        assert FamilySpec.from_json(spec.to_json()) == spec

    def test_absent_fields_not_applied(self):
        spec = FamilySpec.from_json({"kind": "mollifier-bump", "a": 1, "b": 3})
        f = spec.build()
        g = make_mollifier_bump(1, 3)
        r = np.linspace(1, 3, 11)
        np.testing.assert_array_equal(f(r), g(r))

    def test_deterministic_build(self):
        spec = FamilySpec("polynomial-bump", 1.0, 2.0, k=3, omega=1.0)
        r = np.linspace(1, 2, 7)
        np.testing.assert_array_equal(spec.build().jet(r)[2], spec.build().jet(r)[2])

    def test_order_power_modulate_dilate(self):
        spec = FamilySpec("polynomial-bump", 1.0, 2.0, k=3, omega=2.0, gamma=0.5, lam=2.0)
        g = dilate(modulate(scale_power(make_poly_bump(1, 2, 3), 0.5), 2.0), 2.0)
        r = np.linspace(0.5, 1.0, 9)
        np.testing.assert_array_equal(spec.build()(r), g(r))

    @pytest.mark.parametrize("bad", [
        {"kind": "gaussian", "a": 1, "b": 2},
        {"kind": "polynomial-bump", "a": 1, "b": 2},
        {"kind": "polynomial-bump", "a": 1, "b": 2, "k": 2},
        {"kind": "mollifier-bump", "a": 2, "b": 1},
        {"kind": "mollifier-bump", "a": 1, "b": 2, "colour": "red"},
    ])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            FamilySpec.from_json(bad)
