"""Residual checks for the weighted Hardy and Rellich equalities and inequalities.

Every check evaluates each norm or inner product independently by adaptive
quadrature and assembles both sides of the identity. Residuals are normalized
by the largest additive term; an inner product enters that normalization
through its Cauchy-Schwarz bound ``|c| ||u|| ||v||``, so a product whose true
value is zero cannot masquerade as a large relative error.

Notation in term labels: ``n(u)`` is ``||u||**2`` in ``L^2(r**beta dr)`` and
``ip(u, v)`` is ``Re <u, v>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ExcludedParameter, ZeroC
from .funcspace import TestFunction
from .operators import (
    apply_L,
    c_const,
    f_sharp,
    f_star,
    h_const,
    pointwise,
    r_const,
    rellich_remainder,
)
from .quad import DEFAULT_QUAD, QuadratureConfig, inner, mc_radial, norm_sq, sphere_area

IDENTITY_TOL = 1e-8
INEQUALITY_TOL = 1e-10
TRIVIAL_TOL = 1e-14
EXCLUSION_EPS = 1e-9
TINY = np.finfo(float).tiny


@dataclass
class IdentityReport:
    name: str
    params: dict
    fn_label: str
    terms: dict
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    tolerance: float
    passed: bool
    kind: str = "equality"
    notes: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.name, tuple(sorted(self.params.items())), self.fn_label)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": dict(sorted(self.params.items())),
            "fn_label": self.fn_label,
            "terms": self.terms,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "notes": self.notes,
        }


def equality_report(name, params, label, terms, lhs, rhs, tol=IDENTITY_TOL, scale=0.0, notes=None):
    abs_res = abs(lhs - rhs)
    denom = max([abs(lhs), abs(rhs), scale, TINY] + [abs(t) for t in terms.values()])
    rel = abs_res / denom
    return IdentityReport(
        name, params, label, dict(terms), float(lhs), float(rhs), float(abs_res), float(rel), tol,
        bool(rel <= tol), "equality", notes or {},
    )


def inequality_report(name, params, label, terms, lower, upper, tol=INEQUALITY_TOL, notes=None):
    """``lower <= upper`` up to ``tol * |upper|``."""
    deficit = upper - lower
    abs_res = max(0.0, -deficit)
    rel = abs_res / max(abs(upper), TINY)
    terms = dict(terms)
    terms["deficit"] = float(deficit)
    return IdentityReport(
        name, params, label, terms, float(lower), float(upper), float(abs_res), float(rel), tol,
        bool(rel <= tol), "inequality", notes or {},
    )


class _Norms:
    """Quadrature front end bound to one weight exponent and config."""

    def __init__(self, beta: float, cfg: QuadratureConfig):
        self.beta = beta
        self.cfg = cfg

    def n(self, u) -> float:
        return norm_sq(u, beta=self.beta, cfg=self.cfg)

    def ip(self, u, v) -> tuple[float, float]:
        """``(Re <u, v>, ||u|| ||v||)``."""
        val = inner(u, v, beta=self.beta, cfg=self.cfg).value.real
        return float(val), math.sqrt(self.n(u) * self.n(v))


def _d(f, rule, label):
    return pointwise(f, rule, label)


def _over(f, p, label=None):
    return _d(f, lambda r, v, d1, d2: v / r**p, label or f"{f.label}/r^{p:g}")


def _deriv_over(f, p, label=None):
    return _d(f, lambda r, v, d1, d2: d1 / r**p, label or f"{f.label}'/r^{p:g}")


def _excluded_if_zero(x: float, what: str) -> None:
    if abs(x) <= EXCLUSION_EPS:
        raise ExcludedParameter(f"{what} = {x:g} is excluded")


def check_hardy_h1(f: TestFunction, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    H = h_const(beta + 1)
    N = _Norms(beta, cfg)
    nv = N.n(_over(f, 1))
    nd = N.n(_deriv_over(f, 0, "f'"))
    nr = N.n(_d(f, lambda r, v, d1, d2: d1 + H * v / r, "f'+Hf/r"))
    lhs = H * H * nv
    terms = {"H^2 n(f/r)": lhs, "n(f')": nd, "-n(f'+H f/r)": -nr}
    return equality_report("h1", {"beta": beta}, f.label, terms, lhs, nd - nr, tol)


def check_rellich_r1(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    C = c_const(alpha, beta)
    N = _Norms(beta, cfg)
    n_f = N.n(_over(f, 2))
    n_L = N.n(apply_L(alpha, f))
    n_A = N.n(rellich_remainder(alpha, beta, f))
    n_S = N.n(_star_over_r(f, beta))
    lhs = C * C * n_f
    terms = {"C^2 n(f/r^2)": lhs, "n(Lf)": n_L, "-n(Lf+Cf/r^2)": -n_A, "-2C n(f*/r)": -2 * C * n_S}
    rhs = n_L - n_A - 2 * C * n_S
    return equality_report("r1", {"alpha": alpha, "beta": beta}, f.label, terms, lhs, rhs, tol)


def _star_over_r(f, beta):
    k = (beta - 3) / 2
    return _d(f, lambda r, v, d1, d2: (d1 + k * v / r) / r, "f*/r")


def check_rellich_r2(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    d = beta - alpha - 2
    _excluded_if_zero(d, "beta - alpha - 2")
    C = c_const(alpha, beta)
    kappa = 2 * C / d**2
    N = _Norms(beta, cfg)
    n_f = N.n(_over(f, 2))
    n_L = N.n(apply_L(alpha, f))
    n_A = N.n(rellich_remainder(alpha, beta, f))
    n_sh = N.n(f_sharp(beta, f))
    lhs = C * C * n_f
    terms = {
        "C^2 n(f/r^2)": lhs,
        "n(Lf)": n_L,
        "-(1+k) n(Lf+Cf/r^2)": -(1 + kappa) * n_A,
        "k n(f#)": kappa * n_sh,
    }
    rhs = n_L - (1 + kappa) * n_A + kappa * n_sh
    return equality_report(
        "r2", {"alpha": alpha, "beta": beta}, f.label, terms, lhs, rhs, tol, notes={"kappa": kappa}
    )


def check_r3(f, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    """The two integration-by-parts steps; undefined at ``beta`` in {2, 3}."""
    _excluded_if_zero(beta - 2, "beta - 2")
    _excluded_if_zero(beta - 3, "beta - 3")
    N = _Norms(beta, cfg)
    params = {"beta": beta}
    n_f = N.n(_over(f, 2))
    ip1, s1 = N.ip(_over(f, 2), _deriv_over(f, 1))
    c1 = -2 / (beta - 3)
    step1 = equality_report(
        "r3_step1", params, f.label, {"n(f/r^2)": n_f, "c ip(f/r^2, f'/r)": c1 * ip1},
        n_f, c1 * ip1, tol, scale=abs(c1) * s1,
    )
    n_fp = N.n(_deriv_over(f, 1))
    ip2, s2 = N.ip(_over(f, 2), _d(f, lambda r, v, d1, d2: d2, "f''"))
    c2 = 2 / ((beta - 2) * (beta - 3))
    step2 = equality_report(
        "r3_step2", params, f.label,
        {"n(f/r^2)": n_f, "c n(f'/r)": c2 * n_fp, "c ip(f/r^2, f'')": c2 * ip2},
        n_f, c2 * (n_fp + ip2), tol, scale=abs(c2) * s2,
    )
    return [step1, step2]


def check_ibp_chain(f, beta: float, alpha: Optional[float] = None, cfg: QuadratureConfig = DEFAULT_QUAD,
                    tol=IDENTITY_TOL):
    """All integration-by-parts sub-identities used to derive the first Rellich equality.

    The two-step chain is included only where it is defined (``beta`` not 2 or 3).
    With ``alpha`` given, the decomposition through ``L_alpha`` and the gathered
    relation ``-C n(f/r^2) = ip(f/r^2, L f) + n(f*/r)`` are added.
    """
    N = _Norms(beta, cfg)
    params = {"beta": beta}
    H = h_const(beta + 1)
    f_r2 = _over(f, 2)
    dq = _d(f, lambda r, v, d1, d2: d1 / r - v / r**2, "(f/r)'")
    n_f = N.n(f_r2)
    out = []

    ip, s = N.ip(dq, f_r2)
    out.append(equality_report(
        "ibp_quotient", params, f.label, {"2 ip((f/r)', f/r^2)": 2 * ip, "-(b-1) n(f/r^2)": -(beta - 1) * n_f},
        2 * ip, -(beta - 1) * n_f, tol, scale=2 * s,
    ))
    ip, s = N.ip(_over(f, 3), _deriv_over(f, 0, "f'"))
    out.append(equality_report(
        "ibp_cubic", params, f.label, {"ip(f/r^3, f')": ip, "-(b-3)/2 n(f/r^2)": -(beta - 3) / 2 * n_f},
        ip, -(beta - 3) / 2 * n_f, tol, scale=s,
    ))

    n_fp = N.n(_deriv_over(f, 1))
    n_dq = N.n(dq)
    ip_q, s_q = N.ip(dq, f_r2)
    out.append(equality_report(
        "r4_expansion", params, f.label,
        {"n(f'/r)": n_fp, "n((f/r)')": n_dq, "2 ip((f/r)', f/r^2)": 2 * ip_q, "n(f/r^2)": n_f},
        n_fp, n_dq + 2 * ip_q + n_f, tol, scale=2 * s_q,
    ))
    n_shift = N.n(_d(f, lambda r, v, d1, d2: d1 / r + (H - 1) * v / r**2, "(f/r)'+Hf/r^2"))
    out.append(equality_report(
        "r4_hardy_shift", params, f.label,
        {"n((f/r)')": n_dq, "H^2 n(f/r^2)": H * H * n_f, "n((f/r)'+Hf/r^2)": n_shift},
        n_dq, H * H * n_f + n_shift, tol,
    ))
    out.append(equality_report(
        "r4", params, f.label,
        {"n(f'/r)": n_fp, "(H-1)^2 n(f/r^2)": (H - 1) ** 2 * n_f, "n((f/r)'+Hf/r^2)": n_shift},
        n_fp, (H - 1) ** 2 * n_f + n_shift, tol,
    ))

    if abs(beta - 2) > EXCLUSION_EPS and abs(beta - 3) > EXCLUSION_EPS:
        out.extend(check_r3(f, beta, cfg, tol))

    if alpha is not None:
        out.extend(check_q1(f, alpha, beta, cfg, tol))
    return out


def check_q1(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    """Split of ``Re <f/r^2, f''>`` through ``L_alpha`` and the gathered first-equality form."""
    N = _Norms(beta, cfg)
    f_r2 = _over(f, 2)
    n_f = N.n(f_r2)
    out = []
    ap = {"alpha": alpha, "beta": beta}
    C = c_const(alpha, beta)
    ip_dd, s_dd = N.ip(f_r2, _d(f, lambda r, v, d1, d2: d2, "f''"))
    ip_L, s_L = N.ip(f_r2, apply_L(alpha, f))
    ip_c, s_c = N.ip(_over(f, 3), _deriv_over(f, 0, "f'"))
    out.append(equality_report(
        "q1", ap, f.label,
        {"ip(f/r^2, f'')": ip_dd, "ip(f/r^2, Lf)": ip_L, "-a ip(f/r^3, f')": -alpha * ip_c},
        ip_dd, ip_L - alpha * ip_c, tol, scale=max(s_dd, s_L, abs(alpha) * s_c),
    ))
    n_S = N.n(_star_over_r(f, beta))
    out.append(equality_report(
        "q1_gathered", ap, f.label,
        {"-C n(f/r^2)": -C * n_f, "ip(f/r^2, Lf)": ip_L, "n(f*/r)": n_S},
        -C * n_f, ip_L + n_S, tol, scale=s_L,
    ))
    return out


def check_beta2_sign(f, cfg: QuadratureConfig = DEFAULT_QUAD, tol: float = 1e-9):
    """Measure the three quantities of the printed weight-2 chain without assuming it.

    Records which sign ``s`` makes ``Re <f/r^2, f''> = s ||f'/r||^2`` hold in
    ``L^2(r**2 dr)``, and the value of ``Re <f/r, f'/r>``.
    """
    N = _Norms(2.0, cfg)
    left, s_left = N.ip(_over(f, 2), _d(f, lambda r, v, d1, d2: d2, "f''"))
    middle, s_mid = N.ip(_over(f, 1), _deriv_over(f, 1))
    right = N.n(_deriv_over(f, 1))
    scale = max(abs(left), right, s_left, TINY)
    residual = {s: abs(left - s * right) / scale for s in (1, -1)}
    matches = [s for s in (1, -1) if residual[s] <= tol]
    sign = matches[0] if len(matches) == 1 else 0
    middle_rel = abs(middle) / max(s_mid, TINY)
    notes = {
        "sign": sign,
        "residual_plus": residual[1],
        "residual_minus": residual[-1],
        "middle": middle,
        "middle_rel": middle_rel,
        "printed_chain_holds": bool(sign == 1 and middle_rel <= tol),
    }
    terms = {"ip(f/r^2, f'')": left, "ip(f/r, f'/r)": middle, "n(f'/r)": right}
    rep = equality_report(
        "beta2_sign", {"beta": 2.0}, f.label, terms, left, sign * right, tol, scale=scale, notes=notes
    )
    rep.passed = bool(sign != 0 and middle_rel <= tol)
    return rep


def check_lemma21(u, v, c: float, a: Optional[float] = None, tol: float = 1e-13):
    """Polarization lemma on a finite-dimensional complex inner-product space."""
    if c == 0:
        raise ZeroC("c must be nonzero")
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("u and v must have the same dimension")
    nu = float(np.vdot(u, u).real)
    nv = float(np.vdot(v, v).real)
    re_uv = float(np.vdot(v, u).real)
    if a is None:
        a = nu + c * re_uv
    w = v + u / c
    nw = float(np.vdot(w, w).real)
    lhs = nu / c**2
    terms = {"n(v)": nv, "-n(v+u/c)": -nw, "2a/c^2": 2 * a / c**2, "n(u)/c^2": lhs}
    left_res = abs(nu - (-c * re_uv + a))
    return equality_report(
        "lemma21", {"c": float(c), "a": float(a)}, f"dim={u.size}", terms, lhs, nv - nw + 2 * a / c**2, tol,
        scale=math.sqrt(nu * nv) / abs(c), notes={"left_residual": left_res},
    )


def check_r5(g, a: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    """Shifted Hardy identity and its integration-by-parts step, for exponent ``a``."""
    k = (beta - 1 - a) / 2
    N = _Norms(beta, cfg)
    params = {"a": a, "beta": beta}
    u1 = _d(g, lambda r, v, d1, d2: v / r ** (1 + a / 2), "g/r^(1+a/2)")
    u2 = _d(g, lambda r, v, d1, d2: d1 / r ** (a / 2), "g'/r^(a/2)")
    n1 = N.n(u1)
    n2 = N.n(u2)
    n3 = N.n(_d(g, lambda r, v, d1, d2: k * v / r ** (1 + a / 2) + d1 / r ** (a / 2), "k u1 + u2"))
    lhs = k * k * n1
    main = equality_report(
        "r5", params, g.label, {"k^2 n(u1)": lhs, "n(u2)": n2, "-n(k u1+u2)": -n3}, lhs, n2 - n3, tol
    )
    ip, s = N.ip(u1, u2)
    one = equality_report(
        "r5_one_liner", params, g.label, {"2 ip(u1, u2)": 2 * ip, "-(b-1-a) n(u1)": -(beta - 1 - a) * n1},
        2 * ip, -(beta - 1 - a) * n1, tol, scale=2 * s,
    )
    return [main, one]


def check_r6(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=IDENTITY_TOL):
    """The substitution identity for ``||f*/r||**2`` and its combination with the first equality."""
    d = beta - alpha - 2
    _excluded_if_zero(d, "beta - alpha - 2")
    C = c_const(alpha, beta)
    N = _Norms(beta, cfg)
    params = {"alpha": alpha, "beta": beta}
    n_S = N.n(_star_over_r(f, beta))
    n_A = N.n(rellich_remainder(alpha, beta, f))
    n_sh = N.n(f_sharp(beta, f))
    rhs = (n_A - n_sh) / d**2
    main = equality_report(
        "r6", params, f.label, {"n(f*/r)": n_S, "n(Lf+Cf/r^2)/d^2": n_A / d**2, "-n(f#)/d^2": -n_sh / d**2},
        n_S, rhs, tol,
    )
    n_f = N.n(_over(f, 2))
    n_L = N.n(apply_L(alpha, f))
    lhs = C * C * n_f
    combined = n_L - n_A - 2 * C * rhs
    cons = equality_report(
        "r6_into_r1", params, f.label,
        {"C^2 n(f/r^2)": lhs, "n(Lf)": n_L, "-(1+k) n(Lf+Cf/r^2)": -(1 + 2 * C / d**2) * n_A,
         "k n(f#)": 2 * C / d**2 * n_sh},
        lhs, combined, tol,
    )
    return [main, cons]


def check_rellich_ineq_r7(f, alpha: float, beta: float, cfg: QuadratureConfig = DEFAULT_QUAD,
                          tol=INEQUALITY_TOL):
    C = c_const(alpha, beta)
    N = _Norms(beta, cfg)
    lower = C * C * N.n(_over(f, 2))
    upper = N.n(apply_L(alpha, f))
    return inequality_report(
        "r7", {"alpha": alpha, "beta": beta}, f.label, {"C^2 n(f/r^2)": lower, "n(Lf)": upper}, lower, upper, tol
    )


def check_coefficient_identity(alpha: float, beta: float, tol=TRIVIAL_TOL):
    """``1 + 2C/d**2 = 1/2 + (alpha-1)**2 / (2 d**2)`` with ``d = beta - alpha - 2``."""
    d = beta - alpha - 2
    _excluded_if_zero(d, "beta - alpha - 2")
    left = 1 + 2 * c_const(alpha, beta) / d**2
    right = 0.5 + (alpha - 1) ** 2 / (2 * d**2)
    rep = equality_report(
        "coefficient", {"alpha": alpha, "beta": beta}, "-", {"left": left, "right": right}, left, right, tol
    )
    rep.notes["left_positive"] = bool(left > 0)
    rep.passed = rep.passed and left > 0
    return rep


def check_remark23(f, t: float, cfg: QuadratureConfig = DEFAULT_QUAD, tol=INEQUALITY_TOL):
    """Weighted 1-D Hardy and Rellich inequalities with power ``t``."""
    n0 = norm_sq(f, beta=t, cfg=cfg)
    n1 = norm_sq(_deriv_over(f, 0, "f'"), beta=t + 2, cfg=cfg)
    n2 = norm_sq(_d(f, lambda r, v, d1, d2: d2, "f''"), beta=t + 4, cfg=cfg)
    kh = ((t + 1) / 2) ** 2
    kr = ((t + 3) / 2) ** 2 * kh
    params = {"t": t}
    hardy = inequality_report(
        "remark23_hardy", params, f.label, {"K n_t(f)": kh * n0, "n_t+2(f')": n1}, kh * n0, n1, tol
    )
    rellich = inequality_report(
        "remark23_rellich", params, f.label, {"K n_t(f)": kr * n0, "n_t+4(f'')": n2}, kr * n0, n2, tol
    )
    return [hardy, rellich]


DIMENSIONAL_QUANTITIES = ("f/|x|^2", "Delta_r f", "f*/|x|", "f#")


def check_dimensional_reduction(
    f,
    n: int,
    samples: int = 1_000_000,
    seed: int = 0,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    sigma: float = 3.0,
    tol=IDENTITY_TOL,
):
    """Compare n-dimensional Monte Carlo integrals with sphere-area-scaled 1-D quadrature.

    Each of the four norms in the n-dimensional radial Rellich equalities is
    estimated by box rejection sampling and compared (within ``sigma`` standard
    errors) against ``|S^{n-1}|`` times the 1-D integral with weight ``r**(n-1)``.
    Both n-dimensional equalities are then assembled from the quadrature values.
    """
    if not 2 <= n <= 5:
        raise ValueError(f"dimension must be in 2..5, got {n}")
    beta = float(n - 1)
    omega = sphere_area(n)
    profiles = {
        "f/|x|^2": (f, -4.0, _over(f, 2)),
        "Delta_r f": (apply_L(n - 1, f), 0.0, apply_L(n - 1, f)),
        "f*/|x|": (f_star(beta, f), -2.0, _star_over_r(f, beta)),
        "f#": (f_sharp(beta, f), 0.0, f_sharp(beta, f)),
    }
    out = []
    quadv = {}
    for key, (profile, p, one_d) in profiles.items():
        est, se = mc_radial(n, profile, p, samples, seed)
        ref = omega * norm_sq(one_d, beta=beta, cfg=cfg)
        quadv[key] = ref
        diff = abs(est - ref)
        rep = IdentityReport(
            f"polar[{key}]", {"n": n}, f.label, {"mc": est, "std_error": se, "quad": ref}, est, ref, diff,
            diff / max(abs(ref), abs(est), TINY), sigma, bool(diff <= sigma * se), "statistical",
            {"z": diff / se if se > 0 else (0.0 if diff == 0 else math.inf), "samples": samples, "seed": seed},
        )
        out.append(rep)

    R = r_const(n)
    n_A = omega * norm_sq(rellich_remainder(n - 1, beta, f), beta=beta, cfg=cfg)
    lhs = R * R * quadv["f/|x|^2"]
    params = {"n": n}
    out.append(equality_report(
        "o1", params, f.label,
        {"R^2 N(f/|x|^2)": lhs, "N(Delta_r f)": quadv["Delta_r f"], "-N(Delta_r f+Rf/|x|^2)": -n_A,
         "-2R N(f*/|x|)": -2 * R * quadv["f*/|x|"]},
        lhs, quadv["Delta_r f"] - n_A - 2 * R * quadv["f*/|x|"], tol,
    ))
    out.append(equality_report(
        "o1_prime", params, f.label,
        {"R^2 N(f/|x|^2)": lhs, "N(Delta_r f)": quadv["Delta_r f"], "-(1+R/2) N(...)": -(1 + R / 2) * n_A,
         "R/2 N(f#)": R / 2 * quadv["f#"]},
        lhs, quadv["Delta_r f"] - (1 + R / 2) * n_A + R / 2 * quadv["f#"], tol,
    ))
    return out

