import random
from fractions import Fraction

import pytest

from spinorchain.qpoly import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    RationalFunction,
    ShiftedPolynomial,
    det_bareiss,
    fused_power,
    parse_gaussian,
    wronskian,
)

U = ShiftedPolynomial.variable()
ONE = ShiftedPolynomial([GR_ONE])


def gr(re, im=0):
    return GaussianRational(re, im)


def rand_poly(rng, deg, span=4):
    coeffs = [
        gr(Fraction(rng.randint(-span, span), rng.randint(1, 3)),
           Fraction(rng.randint(-span, span), rng.randint(1, 3)))
        for _ in range(deg + 1)
    ]
    coeffs[-1] = coeffs[-1] if coeffs[-1] else GR_ONE
    return ShiftedPolynomial(coeffs)


def test_gaussian_field_ops():
    a = gr(Fraction(1, 2), Fraction(-1, 3))
    b = gr(Fraction(2, 5), Fraction(7, 2))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * (GR_ONE / a) == GR_ONE
    with pytest.raises(ZeroDivisionError):
        a / GR_ZERO


def test_parse_gaussian():
    assert parse_gaussian("3/2") == gr(Fraction(3, 2))
    assert parse_gaussian("-1/3+i*1/2") == gr(Fraction(-1, 3), Fraction(1, 2))
    assert parse_gaussian("i*2") == gr(0, 2)
    assert parse_gaussian("1-i*1/4") == gr(1, Fraction(-1, 4))


def test_shift_definition():
    # u shifted by 1 is u + i/2
    assert U.shift(1) == ShiftedPolynomial([gr(0, Fraction(1, 2)), GR_ONE])
    # identity case
    p = rand_poly(random.Random(0), 5)
    assert p.shift(0) == p
    # u^2 shifted by 2: u^2 + 2i u - 1
    u2 = U * U
    assert u2.shift(2) == ShiftedPolynomial([gr(-1), gr(0, 2), GR_ONE])


def test_shift_inverse_and_homomorphism():
    rng = random.Random(1)
    for _ in range(12):
        p = rand_poly(rng, rng.randint(0, 8))
        q = rand_poly(rng, rng.randint(0, 8))
        k = rng.randint(-6, 6)
        assert p.shift(k).shift(-k) == p
        assert (p * q).shift(k) == p.shift(k) * q.shift(k)
        assert (p + q).shift(k) == p.shift(k) + q.shift(k)


def test_fused_power_examples():
    assert fused_power(U, 1) == U
    assert fused_power(U, 2) == ShiftedPolynomial([gr(Fraction(1, 4)), GR_ZERO, GR_ONE])
    assert fused_power(U, 0) == ONE


def test_fused_power_degree_and_lead():
    rng = random.Random(2)
    for _ in range(6):
        p = rand_poly(rng, rng.randint(1, 4))
        n = rng.randint(1, 4)
        f = fused_power(p, n)
        assert f.degree == n * p.degree
        lead = GR_ONE
        for _ in range(n):
            lead = lead * p.lead()
        assert f.lead() == lead


def test_wronskian_examples():
    # [1, u] -> -i
    assert wronskian([ONE, U]) == ShiftedPolynomial([gr(0, -1)])
    # [1, u, u^2] -> 2i
    assert wronskian([ONE, U, U * U]) == ShiftedPolynomial([gr(0, 2)])
    # repeated argument
    assert wronskian([U, U]).is_zero()


def test_wronskian_antisymmetry_and_dependence():
    rng = random.Random(3)
    for _ in range(8):
        p = rand_poly(rng, rng.randint(1, 5))
        q = rand_poly(rng, rng.randint(1, 5))
        s = rand_poly(rng, rng.randint(1, 5))
        assert wronskian([p, q]) == -wronskian([q, p])
        a = gr(Fraction(rng.randint(-3, 3), 2))
        b = gr(Fraction(rng.randint(-3, 3), 2))
        dep = p.scale(a) + q.scale(b)
        assert wronskian([p, q, dep]).is_zero()


def test_wronskian_plucker_identity():
    # W(W(p,q), W(p,s)) * p == W(p,q,s) * p * p after clearing
    rng = random.Random(4)
    for _ in range(6):
        p = rand_poly(rng, rng.randint(1, 4))
        q = rand_poly(rng, rng.randint(1, 4))
        s = rand_poly(rng, rng.randint(1, 4))
        lhs = wronskian([wronskian([p, q]), wronskian([p, s])]) * p
        rhs = wronskian([p, q, s]) * p * p
        assert lhs == rhs


def test_divrem_examples():
    num = fused_power(U, 2)  # u^2 + 1/4
    den = U.shift(1)  # u + i/2
    q, r = num.divrem(den)
    assert r.is_zero()
    assert q == U.shift(-1)
    q, r = (U * U).divrem(ONE)
    assert q == U * U and r.is_zero()
    q, r = U.divrem(U * U)
    assert q.is_zero() and r == U


def test_divrem_random_roundtrip():
    rng = random.Random(5)
    for _ in range(10):
        num = rand_poly(rng, rng.randint(0, 9))
        den = rand_poly(rng, rng.randint(1, 5))
        q, r = num.divrem(den)
        assert q * den + r == num
        assert r.degree < den.degree


def test_eval_numeric():
    p = fused_power(U, 2)
    assert abs(p.to_complex().eval(0j) - 0.25) < 1e-15
    assert abs(U.to_complex().eval(1j) - 1j) < 1e-15
    # root of u^2 - 1/8
    p = (U * U - ShiftedPolynomial([gr(Fraction(1, 8))])).to_complex()
    assert abs(p.eval(0.3535533906 + 0j)) < 1e-9


def test_bareiss_matches_expansion():
    rng = random.Random(6)
    for n in (2, 3, 4):
        ps = [rand_poly(rng, rng.randint(1, 3)) for _ in range(n)]
        assert wronskian(ps) == det_bareiss(
            [[p.shift(n + 1 - 2 * a) for p in ps] for a in range(1, n + 1)]
        )


def test_serialization_roundtrip():
    rng = random.Random(7)
    p = rand_poly(rng, 6)
    assert ShiftedPolynomial.deserialize(p.serialize()) == p


def test_rational_function_canonical():
    p = U * U - ShiftedPolynomial([gr(Fraction(1, 4))])
    q = U - ShiftedPolynomial([gr(Fraction(1, 2))])
    f = RationalFunction(p, q)
    assert f.is_polynomial()
    assert f.as_polynomial() == U + ShiftedPolynomial([gr(Fraction(1, 2))])
    g = RationalFunction(p, p * q)
    h = RationalFunction(ONE, q)
    assert g == h
    assert (g - h).is_zero()


def test_rational_function_shift_and_arith():
    rng = random.Random(8)
    a = RationalFunction(rand_poly(rng, 3), rand_poly(rng, 2))
    b = RationalFunction(rand_poly(rng, 2), rand_poly(rng, 3))
    assert ((a + b) - b) == a
    assert ((a * b) / b) == a
    assert a.shift(3).shift(-3) == a
