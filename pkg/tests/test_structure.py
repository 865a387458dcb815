import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ghzeta.arith import PeriodicFunction
from ghzeta.cyclo import Cyclo
from ghzeta.structure import (
    IS_PL,
    NOT_PL,
    RESIDUE_OBSTRUCTION,
    UNKNOWN,
    RationalShift,
    UnsupportedAlpha,
    VERDICT_INFINITE,
    VERDICT_ZERO_FREE_FORM,
    VERDICT_ZEROS_FROM_POLY,
    coefficients_at_alpha_one,
    decompose,
    detect_pl_form,
    lift_rational,
    nonvanishing_verdict,
)
from ghzeta.zeta import f_eval

ONE = PeriodicFunction.constant_one()


def series_coefficient(dec, m):
    return complex(dec.coefficient(m))


def test_rational_shift_validation():
    RationalShift(1, 3)
    with pytest.raises(ValueError):
        RationalShift(2, 4)
    with pytest.raises(ValueError):
        RationalShift(3, 3)


def test_lift_examples():
    g = lift_rational(ONE, RationalShift(1, 3))
    assert [complex(*map(float, g.coeffs.exact(m))) for m in range(3)] == [0, 1, 0]
    g2 = lift_rational(PeriodicFunction(2, (1, 2)), RationalShift(1, 2))
    vals = [complex(*map(float, g2.coeffs.exact(m))) for m in range(4)]
    assert vals == [0, 1, 0, 2]
    g3 = lift_rational(ONE, RationalShift(1, 2))
    assert [complex(*map(float, g3.coeffs.exact(m))) for m in range(2)] == [0, 1]


def test_lift_numeric_identity():
    # b^s * sum g(m) m^-s must reproduce F(s, f, a/b) at s = 3
    rng = random.Random(5)
    for a, b, q in ((1, 3, 1), (1, 2, 2), (2, 5, 3)):
        vals = tuple(rng.randrange(-3, 4) or 1 for _ in range(q))
        f = PeriodicFunction(q, vals)
        g = lift_rational(f, RationalShift(a, b))
        direct = f_eval(3.0, f, a / b)
        lifted = b**3.0 * math.fsum(
            g.coeffs(m).real * m**-3.0 for m in range(1, 10**6)
        )
        assert abs(direct.value - lifted) < 1e-10


def test_decompose_one_third():
    dec = decompose(lift_rational(ONE, RationalShift(1, 3)))
    by_conductor = {chi.modulus: dict(poly) for chi, poly in dec.terms}
    assert sorted(by_conductor) == [1, 3]
    assert by_conductor[1][1] == Cyclo.from_rational(Fraction(1, 2))
    assert by_conductor[1][3] == Cyclo.from_rational(Fraction(-1, 2))
    assert by_conductor[3][1] == Cyclo.from_rational(Fraction(1, 2))
    assert dec.verified


def test_decompose_primitive_character_series():
    # coefficients equal to the primitive character mod 4: single L term
    f = PeriodicFunction(2, (1, -1))
    g = lift_rational(f, RationalShift(1, 2))
    dec = decompose(g)
    assert len(dec.terms) == 1
    chi, poly = dec.terms[0]
    assert chi.modulus == 4
    assert dict(poly)[1] == 1


def test_decompose_alternating():
    dec = decompose(coefficients_at_alpha_one(PeriodicFunction(2, (1, -1))))
    assert len(dec.terms) == 1
    chi, poly = dec.terms[0]
    assert chi.modulus == 1
    assert dict(poly) == {1: Cyclo.one(), 2: Cyclo.from_rational(-2)}


def test_decompose_matches_f_eval():
    rng = random.Random(17)
    for trial in range(4):
        q = rng.randrange(1, 4)
        b = rng.choice([2, 3, 4])
        a = rng.choice([x for x in range(1, b) if math.gcd(x, b) == 1])
        vals = tuple(rng.randrange(-2, 3) or 1 for _ in range(q))
        f = PeriodicFunction(q, vals)
        g = lift_rational(f, RationalShift(a, b))
        dec = decompose(g)
        for _ in range(3):
            s = complex(rng.uniform(1.6, 3.0), rng.uniform(-5, 5))
            from ghzeta.zeros import decomposition_evaluator

            F = decomposition_evaluator(dec, prefactor=b)
            direct = f_eval(s, f, a / b)
            assert abs(F(s) - complex(direct.value)) < 1e-8


def test_detect_residue_obstruction():
    cert = detect_pl_form(lift_rational(ONE, RationalShift(1, 3)))
    assert cert.verdict == NOT_PL
    assert cert.proof_kind == RESIDUE_OBSTRUCTION
    assert cert.obstruction == (1, 3)


def test_detect_chi4_product():
    f = PeriodicFunction(2, (1, -1))
    cert = detect_pl_form(lift_rational(f, RationalShift(1, 2)))
    assert cert.verdict == IS_PL
    assert cert.character.modulus == 4
    assert cert.polynomial() == {1: Cyclo.one()}


def test_detect_alternating_and_deconvolution():
    cert = detect_pl_form(coefficients_at_alpha_one(PeriodicFunction(2, (1, -1))))
    assert cert.verdict == IS_PL
    assert cert.character.modulus == 1
    assert cert.polynomial() == {1: Cyclo.one(), 2: Cyclo.from_rational(-2)}

    cert2 = detect_pl_form(coefficients_at_alpha_one(PeriodicFunction(2, (1, -2))))
    assert cert2.verdict == IS_PL
    assert cert2.polynomial() == {1: Cyclo.one(), 2: Cyclo.from_rational(-3)}


def test_detect_reconvolution_is_exact():
    cert = detect_pl_form(coefficients_at_alpha_one(PeriodicFunction(2, (1, -2))))
    chi = cert.character
    poly = cert.polynomial()
    b = coefficients_at_alpha_one(PeriodicFunction(2, (1, -2)))
    for m in range(1, cert.verification_period + 1):
        total = Cyclo.zero()
        for n, c in poly.items():
            if m % n == 0:
                total = total + c * chi.cyclo(m // n)
        re, im = b.exact(m)
        assert total == Cyclo.from_rational(re, im)


def test_detect_unknown_below_cap():
    f = PeriodicFunction(2, (1, -1))
    cert = detect_pl_form(lift_rational(f, RationalShift(1, 2)), search_bound=2)
    assert cert.verdict == UNKNOWN


@given(
    st.integers(min_value=0, max_value=11),
    st.sampled_from([3, 4, 5, 6, 7]),
    st.integers(min_value=1, max_value=6),
)
def test_obstructed_support_never_is_pl(seed, r, width):
    """Coefficients supported on one coprime class mod r (r > 2) can never
    be a P(s)L(s,chi); the detector must refuse IsPL."""
    rng = random.Random(seed)
    h = rng.choice([x for x in range(1, r) if math.gcd(x, r) == 1])
    values = [0] * (r * width)
    placed = False
    for m in range(1, r * width + 1):
        if m % r == h and rng.random() < 0.7:
            values[m % (r * width)] = rng.randrange(1, 5)
            placed = True
    if not placed:
        values[h] = 1
    series = PeriodicFunction(r * width, tuple(values))
    cert = detect_pl_form(series)
    assert cert.verdict != IS_PL


def test_verdict_one_third():
    rep = nonvanishing_verdict(ONE, Fraction(1, 3))
    assert rep.verdict == VERDICT_INFINITE
    assert rep.certificate.proof_kind == RESIDUE_OBSTRUCTION
    assert rep.lift_prefactor == 3


def test_verdict_alternating():
    rep = nonvanishing_verdict(PeriodicFunction(2, (1, -1)), Fraction(1))
    assert rep.verdict == VERDICT_ZERO_FREE_FORM
    assert rep.certificate.verdict == IS_PL
    assert rep.polynomial_zeros == ()


def test_verdict_zeros_from_polynomial():
    rep = nonvanishing_verdict(PeriodicFunction(2, (1, -2)), Fraction(1))
    assert rep.verdict == VERDICT_ZEROS_FROM_POLY
    assert rep.polynomial_zeros
    z = rep.polynomial_zeros[0]
    assert abs(z.real - math.log2(3)) < 1e-6
    assert abs(z.imag) < 1e-5


def test_verdict_chi4_half():
    f = PeriodicFunction(2, (1, -1))
    rep = nonvanishing_verdict(f, Fraction(1, 2))
    assert rep.verdict == VERDICT_ZERO_FREE_FORM
    assert rep.lift_prefactor == 2
    assert rep.certificate.character.modulus == 4


def test_verdict_shifted_character_fixture():
    # f(n) = chi(n+1) for the primitive character mod 4: the alpha = 1
    # series is exactly L(s, chi), a nonvanishing product form
    f = PeriodicFunction(4, (1, 0, -1, 0))
    rep = nonvanishing_verdict(f, Fraction(1))
    assert rep.verdict == VERDICT_ZERO_FREE_FORM
    assert rep.certificate.verdict == IS_PL
    assert rep.certificate.character.modulus == 4
    assert rep.certificate.polynomial() == {1: Cyclo.one()}


def test_verdict_algebraic_and_untyped():
    from ghzeta.ideals import fixtures

    rep = nonvanishing_verdict(ONE, fixtures())
    assert rep.verdict == VERDICT_INFINITE
    with pytest.raises(UnsupportedAlpha):
        nonvanishing_verdict(ONE, 0.3333)
