import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulusvn._linalg import DomainError
from annulusvn.annulus import Annulus
from annulusvn.laurent import (LaurentPoly, arith, circle_points, coeffs_from_samples, evaluate,
                               g_family, norms, random_laurent, sup_norm)

Z = LaurentPoly.monomial(1)
ONE = LaurentPoly.constant(1)


def laurent_strategy(max_bw=20):
    coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
    return st.tuples(st.integers(-max_bw, max_bw), st.lists(coeff, min_size=1, max_size=8)).map(
        lambda t: LaurentPoly(t[0], t[1]))


def test_eval_examples():
    assert evaluate(Z, 0.7) == pytest.approx(0.7)
    assert evaluate(g_family(0.5, 1), 0.8) == pytest.approx(1.425, abs=1e-15)
    assert evaluate(ONE, 0.3 + 0.1j) == 1
    assert g_family(0.5, 1)(0.8) == pytest.approx(1.425, abs=1e-15)


def test_eval_rejects_zero_with_negative_support():
    with pytest.raises(DomainError):
        evaluate(LaurentPoly.monomial(-1), 0)
    assert evaluate(Z, 0) == 0


def test_eval_matches_direct_sum(rng):
    for _ in range(50):
        p = random_laurent(rng, 0.5, 12, normalized=False)
        z = rng.uniform(0.5, 1, 20) * np.exp(2j * np.pi * rng.uniform(size=20))
        direct = sum(a * z ** n for n, a in p.items())
        assert np.allclose(evaluate(p, z), direct, rtol=1e-12, atol=1e-12)


def test_canonical_form():
    p = LaurentPoly(-3, [0, 0, 1, 2, 0])
    assert p.n_min == -1 and p.n_max == 0
    assert LaurentPoly(5, [0, 0]).is_zero
    assert LaurentPoly(5, [0]) == LaurentPoly()
    assert hash(LaurentPoly(-1, [1, 0])) == hash(LaurentPoly.monomial(-1))


def test_arith_examples():
    zinv = LaurentPoly.monomial(-1)
    assert Z * zinv == ONE
    g = g_family(0.5, 3)
    assert arith("multiply", g, ONE) == g
    r = 0.5
    sq = arith("multiply", Z + r * zinv, Z + r * zinv)
    assert sq == LaurentPoly.from_dict({2: 1, 0: 2 * r, -2: r * r})
    assert arith("add", Z, Z) == arith("scale", Z, 2)
    assert (Z - Z).is_zero
    with pytest.raises(ValueError):
        arith("divide", Z, Z)


@settings(max_examples=200, deadline=None)
@given(laurent_strategy(10), laurent_strategy(10),
       st.floats(0.3, 1.0), st.floats(0, 2 * math.pi))
def test_eval_multiplicative(p, q, rad, theta):
    z = rad * complex(math.cos(theta), math.sin(theta))
    lhs = evaluate(p * q, z)
    rhs = evaluate(p, z) * evaluate(q, z)
    scale = 1 + sum(abs(a) for a in p.coeffs) * sum(abs(a) for a in q.coeffs) * rad ** -20
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_coeffs_from_samples_examples():
    rec = coeffs_from_samples(evaluate(Z, circle_points(0.7, 8)), 0.7, -2, 2)
    assert abs(rec.coeff(1) - 1) < 1e-14
    assert all(abs(rec.coeff(n)) < 1e-14 for n in (-2, -1, 0, 2))
    g2 = g_family(0.5, 2)
    rec = coeffs_from_samples(evaluate(g2, circle_points(0.75, 16)), 0.75, -4, 4)
    assert rec.close_to(g2, 1e-14)
    assert rec.coeff(-2) == pytest.approx(0.25) and rec.coeff(2) == pytest.approx(1)
    rec = coeffs_from_samples(np.full(16, 2 - 1j), 0.8, -3, 3)
    assert rec.close_to(LaurentPoly.constant(2 - 1j), 1e-15)


def test_coeffs_from_samples_rejects_aliasing():
    with pytest.raises(ValueError):
        coeffs_from_samples(np.ones(4), 0.7, -2, 2)


@settings(max_examples=100, deadline=None)
@given(laurent_strategy(20))
def test_coeffs_roundtrip(p):
    rho = math.sqrt(0.5)
    lo, hi = min(p.n_min, -20), max(p.n_max, 20)
    f = evaluate(p, circle_points(rho, 64))
    rec = coeffs_from_samples(f, rho, lo, hi)
    # rounding in the samples is amplified by rho^-n in the n-th coefficient
    fmax = max(1.0, float(np.max(np.abs(f))))
    for n in range(lo, hi + 1):
        assert abs(rec.coeff(n) - p.coeff(n)) <= 1e-12 * fmax * rho ** -n


def test_sup_norm_examples():
    a = Annulus.standard(0.5)
    assert sup_norm(Z, a) == 1
    assert sup_norm(LaurentPoly.constant(-3j), a) == pytest.approx(3)
    for n in (1, 2, 5):
        assert sup_norm(g_family(0.5, n), a) == pytest.approx(1 + 0.5 ** n, abs=1e-12)
    with pytest.raises(ValueError):
        sup_norm(Z, a, samples_per_circle=100)


@pytest.mark.parametrize("r", [0.3, 0.5, 0.8])
def test_sup_norm_g_family(r):
    a = Annulus.standard(r)
    for n in range(1, 31):
        assert abs(sup_norm(g_family(r, n), a) - (1 + r ** n)) < 1e-10


def test_sup_norm_against_brute_force(rng):
    a = Annulus.standard(0.5)
    theta = np.linspace(0, 2 * np.pi, 200001)
    for _ in range(10):
        p = random_laurent(rng, 0.5, 8)
        brute = max(np.max(np.abs(evaluate(p, rho * np.exp(1j * theta)))) for rho in (0.5, 1.0))
        s = sup_norm(p, a)
        assert s >= brute - 1e-12
        assert s <= brute * (1 + 1e-6)
        # interior points never exceed the boundary maximum
        z = rng.uniform(0.5, 1, 500) * np.exp(2j * np.pi * rng.uniform(size=500))
        assert np.max(np.abs(evaluate(p, z))) <= s + 1e-12


def test_norm_examples():
    assert norms(ONE, 0.4) == pytest.approx((math.sqrt(2), 1.0))
    assert norms(LaurentPoly(), 0.4) == (0.0, 0.0)
    for r in (0.3, 0.5, 0.8):
        for n in (1, 4, 9):
            assert norms(g_family(r, n), r)[1] == pytest.approx(math.sqrt(2), rel=1e-14)
    with pytest.raises(DomainError):
        norms(ONE, 1.0)


@settings(max_examples=300, deadline=None)
@given(laurent_strategy(20), st.sampled_from([0.3, 0.5, 0.8]))
def test_norm_equivalence(p, r):
    h2, sh2 = norms(p, r)
    assert sh2 <= h2 * (1 + 1e-12)
    assert h2 <= math.sqrt(2) * sh2 * (1 + 1e-12)


def test_g_family_examples():
    g = g_family(0.5, 1)
    assert g.coeff(-1) == 0.5 and g.coeff(1) == 1 and g.coeff(0) == 0
    g = g_family(0.5, 3)
    assert g.coeff(-3) == 0.125 and g.coeff(3) == 1
    for r in (0.2, 0.7):
        for n in (1, 6):
            assert evaluate(g_family(r, n), 1.0) == pytest.approx(1 + r ** n)
    with pytest.raises(ValueError):
        g_family(0.5, 0)


def test_random_laurent_normalization(rng):
    p = random_laurent(rng, 0.5, 10)
    assert p.bandwidth <= 10
    assert LaurentPoly.from_dict({}).is_zero
