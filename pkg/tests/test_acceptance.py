"""Acceptance criteria, each at its stated tolerance and time budget.

Run ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion; the lines are also collected in the terminal summary.
"""

import math
import time

import numpy as np
import pytest
import scipy.linalg

from annulusvn.annulus import Annulus, KernelKind, gram, random_points, verify_kernel_identities
from annulusvn.calculus import apply_function, factor_psd, model_formula_check
from annulusvn.laurent import LaurentPoly, g_family, norms, random_laurent, sup_norm
from annulusvn.multspace import (rescaling_inequalities, shift_kernel_identity, mult_norm, pick_lower_bound,
                                 sharpness_trajectory, shift_report, vn_experiment)
from annulusvn.operators import check_membership, counterexample, counterexample_formula, sample_member
from annulusvn.pickext import default_nodes, extension_check

pytestmark = pytest.mark.acceptance

R_VALUES = (0.3, 0.5, 0.8)
SQRT2 = math.sqrt(2)


def test_c01_kernel_identities(verdict):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst, worst_rel = 0.0, 0.0
    for r in R_VALUES:
        a = Annulus.standard(r)
        pairs = np.stack([random_points(rng, a, 1000), random_points(rng, a, 1000)], axis=1)
        worst = max(worst, *verify_kernel_identities(r, pairs))
        worst_rel = max(worst_rel, *verify_kernel_identities(r, pairs, relative=True))
    dt = time.perf_counter() - t0
    verdict("C1 kernel identities", worst < 1e-12 and dt < 1,
            f"max absolute residual {worst:.2e} (< 1e-12; relative {worst_rel:.1e}), {dt:.2f}s (< 1s)")


def test_c02_norm_equivalence(verdict):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = -math.inf
    for r in R_VALUES:
        for _ in range(500):
            p = random_laurent(rng, r, 20, normalized=False)
            h2, sh2 = norms(p, r)
            worst = max(worst, (sh2 - h2) / h2, (h2 - SQRT2 * sh2) / h2)
    dt = time.perf_counter() - t0
    verdict("C2 norm equivalence", worst <= 1e-12 and dt < 1,
            f"worst relative excess {worst:.2e} (<= 1e-12), {dt:.2f}s (< 1s)")


def test_c03_extremal_family(verdict):
    t0 = time.perf_counter()
    sup_err, min_lower = 0.0, math.inf
    for r in R_VALUES:
        a = Annulus.standard(r)
        for n in range(1, 31):
            g = g_family(r, n)
            s = sup_norm(g, a)
            sup_err = max(sup_err, abs(s - (1 + r ** n)))
            min_lower = min(min_lower, mult_norm(g, r, sup=s).lower)
    ratios = [row[3] for row in sharpness_trajectory(0.5, 20)]
    threshold = SQRT2 / (1 + 0.5 ** 20) - 1e-8
    monotone = all(b >= a for a, b in zip(ratios, ratios[1:]))
    dt = time.perf_counter() - t0
    ok = sup_err < 1e-10 and min_lower >= SQRT2 - 1e-8 and ratios[-1] > threshold and monotone and dt < 30
    verdict("C3 extremal family constants", ok,
            f"sup error {sup_err:.1e}, min lower {min_lower:.10f}, ratio(20) {ratios[-1]:.13f} "
            f"> {threshold:.13f}, nondecreasing={monotone}, {dt:.1f}s (< 30s)")


def test_c04_sqrt2_inequality(verdict):
    t0 = time.perf_counter()
    rep = vn_experiment(0.5, 1000, dims=range(2, 9), seed=2024, tol=1e-8, normal_tol=1e-10)
    s = rep["summary"]
    dt = time.perf_counter() - t0
    ok = (s["completed"] == 1000 and not s["violations"] and s["min_margin_sqrt2"] >= -1e-8
          and s["min_margin_upper"] >= -1e-8 and s["max_ratio_normal"] <= 1 + 1e-10 and dt < 300)
    verdict("C4 sqrt(2) inequality", ok,
            f"{s['completed']} trials, {len(s['violations'])} violations, {len(s['skipped'])} skipped, "
            f"min sqrt2 margin {s['min_margin_sqrt2']:.3e}, normal max ratio "
            f"{s['max_ratio_normal']:.16f}, {dt:.1f}s (< 300s)")


def test_c05_tt_bounds(verdict):
    t0 = time.perf_counter()
    worst_lo, worst_hi, members = math.inf, -math.inf, 0
    for i in range(1000):
        r = R_VALUES[i % 3]
        strategy = ("normal", "perturbed")[(i // 3) % 2]
        rep = check_membership(sample_member(r, 1 + i % 8, strategy, 5000 + i).T, r)
        if not rep.is_member:
            continue
        members += 1
        lo, hi = rep.tt_bounds
        worst_lo = min(worst_lo, lo - r * r)
        worst_hi = max(worst_hi, hi - 1)
    dt = time.perf_counter() - t0
    ok = members == 1000 and worst_lo >= -1e-8 and worst_hi <= 1e-8 and dt < 30
    verdict("C5 bounds on TT*", ok,
            f"{members}/1000 members, min(TT*) - r^2 >= {worst_lo:.2e}, max(TT*) - 1 <= {worst_hi:.2e}, "
            f"{dt:.1f}s (< 30s)")


def test_c06_bilateral_shift(verdict):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    pointwise, structure = 0.0, 0.0
    for r in R_VALUES:
        a = Annulus.standard(r)
        pointwise = max(pointwise, shift_kernel_identity(r, random_points(rng, a, 1000), random_points(rng, a, 1000)))
        _, D = shift_report(r, 32)
        target = np.zeros_like(D)
        target[31, 31] = 1 - r * r
        structure = max(structure, float(np.max(np.abs(D - target))))
    dt = time.perf_counter() - t0
    verdict("C6 bilateral shift", pointwise < 1e-12 and structure < 1e-12 and dt < 5,
            f"pointwise {pointwise:.2e}, interior defect {structure:.2e} (< 1e-12), {dt:.2f}s (< 5s)")


def test_c07_counterexample(verdict):
    t0 = time.perf_counter()
    worst_norm, worst_form, max_q = 0.0, 0.0, -math.inf
    for r in np.linspace(0.01, 0.99, 99):
        _, na, nr, q = counterexample(r)
        worst_norm = max(worst_norm, abs(na - 1), abs(nr - 1))
        worst_form = max(worst_form, abs(q - counterexample_formula(r)))
        max_q = max(max_q, q)
    q05 = counterexample(0.5)[3]
    dt = time.perf_counter() - t0
    ok = worst_norm < 1e-10 and worst_form < 1e-10 and max_q < 0 and abs(q05 + 0.125) < 1e-10 and dt < 1
    verdict("C7 counterexample", ok,
            f"norm error {worst_norm:.1e}, formula error {worst_form:.1e}, max quad form {max_q:.2e} < 0, "
            f"q(0.5) = {q05:.12f}, {dt:.2f}s (< 1s)")


def test_c08_rescaling_inequalities(verdict):
    t0 = time.perf_counter()
    ok_all, cases = True, 0
    for r in np.round(np.arange(0.1, 1.0, 0.1), 10):
        n = np.arange(math.ceil(2 / (1 - r)) + 1, 10 ** 4 + 1)
        a, b = rescaling_inequalities(r, n)
        ok_all &= bool(a.all() and b.all())
        cases += len(n)
    dt = time.perf_counter() - t0
    verdict("C8 rescaling inequalities", ok_all and dt < 5, f"{cases} (r, n) cases all true={ok_all}, {dt:.2f}s (< 5s)")


def test_c09_calculus_oracles(verdict):
    t0 = time.perf_counter()
    worst_agree, worst_hom = 0.0, 0.0
    for i in range(200):
        rng = np.random.default_rng([9, i])
        r = R_VALUES[i % 3]
        a = Annulus.standard(r)
        T = sample_member(r, 2 + i % 7, ("normal", "perturbed")[i % 2], 9000 + i).T
        phi, psi = random_laurent(rng, r, 10), random_laurent(rng, r, 10)
        outs = [apply_function(phi, T, a, m) for m in ("series", "eigen", "contour")]
        scale = max(1.0, np.linalg.norm(outs[0], 2))
        for X in outs[1:]:
            worst_agree = max(worst_agree, np.linalg.norm(X - outs[0], 2) / scale)
        lhs = apply_function(phi * psi, T, a)
        rhs = outs[1] @ apply_function(psi, T, a)
        worst_hom = max(worst_hom, np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2)))
    dt = time.perf_counter() - t0
    verdict("C9 calculus oracles", worst_agree < 1e-8 and worst_hom < 1e-9 and dt < 60,
            f"method agreement {worst_agree:.2e} (< 1e-8), homomorphism {worst_hom:.2e} (< 1e-9), "
            f"{dt:.1f}s (< 60s)")


def test_c10_factorization_and_model_formula(verdict):
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    worst_fac = 0.0
    for r in R_VALUES:
        for _ in range(10):
            G = gram(KernelKind.annulus(r), random_points(rng, Annulus.standard(r), 20, margin=0.01))
            fac = factor_psd(G)
            worst_fac = max(worst_fac, fac.residual)
    within, worst_bound, worst_diff = True, 0.0, 0.0
    symbols = [g_family(0.5, 1), g_family(0.5, 3), LaurentPoly.monomial(1)]
    symbols += [random_laurent(rng, 0.5, 6) for _ in range(5)]
    for k, phi in enumerate(symbols):
        # dividing by the sqrt(2) sup envelope certifies a contractive multiplier
        phi = phi * (1 / mult_norm(phi, 0.5).upper)
        lam = np.sqrt(rng.uniform(0.51 ** 2, 0.99 ** 2, 4)) * np.exp(2j * np.pi * rng.uniform(size=4))
        out = model_formula_check(phi, np.diag(lam), 0.5, box=32)
        within &= out["difference"] <= out["error_bound"]
        worst_bound = max(worst_bound, out["error_bound"])
        worst_diff = max(worst_diff, out["difference"])
    dt = time.perf_counter() - t0
    ok = worst_fac < 1e-10 and within and worst_bound < 1e-6 and dt < 60
    verdict("C10 factorization and model formula", ok,
            f"factor residual {worst_fac:.2e} (< 1e-10), model difference {worst_diff:.2e} within bound="
            f"{within}, max bound {worst_bound:.2e} (< 1e-6), {dt:.1f}s (< 60s)")


def test_c11_finite_node_extension(verdict):
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    nodes = default_nodes(0.5)
    assert len(nodes) == 24
    interval_ok, worst_gap = True, 0.0
    for _ in range(100):
        phi = random_laurent(rng, 0.5, 10)
        res = extension_check(phi, 0.5, nodes, tol=1e-7)
        interval_ok &= res.lower_ok and res.upper_ok
        worst_gap = max(worst_gap, abs(res.C_star - pick_lower_bound(phi, 0.5, nodes, tol=1e-10)))
    dt = time.perf_counter() - t0
    verdict("C11 finite-node extension", interval_ok and worst_gap < 1e-7 and dt < 120,
            f"interval holds={interval_ok}, equality-transfer gap {worst_gap:.2e} (< 1e-7), {dt:.1f}s (< 120s)")
