from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transval.errors import CharacteristicOne, DenominatorVanishes, DivisionByZero, NotOmegaIncreasing
from transval.sigma import (
    INF,
    ONE,
    ZERO,
    SigmaExponent,
    SigmaPoly,
    SigmaRational,
    binom_mod_p,
    compare,
    digit_decompose,
    digit_dominates,
    dominated_exponents,
    injectivity_threshold,
    sign_threshold,
    solve_affine_cut,
    specialize_q,
    truncate_approx,
)

S = SigmaRational.sigma()


def E(*c):
    return SigmaExponent(list(c))


# -- frozen examples ----------------------------------------------------------

def test_compare_examples():
    assert compare(S, 10**9) == 1
    assert compare(1 / S, Fraction(1, 1000)) == -1
    assert compare((S + 1) / (S - 1), 1) == 1
    assert compare(S - S, 0) == 0


def test_field_ops():
    assert (S - 1) * (1 / (S - 1)) == ONE
    assert 1 / S + S**-2 == (S + 1) / S**2
    assert ZERO + S == S
    with pytest.raises(DivisionByZero):
        S / ZERO


def test_canonical_form():
    r = (S**2 - 1) / (2 * S - 2)
    assert r == (S + 1) / 2
    assert r.den.lead > 0
    assert SigmaRational(SigmaPoly([1]), SigmaPoly([-2])) == Fraction(-1, 2)


def test_render():
    assert str(SigmaExponent({1: Fraction(1, 2), 2: 1})) == "s^2 + s/2"
    assert str(S**2 + S / 2) == "(2*s^2 + s)/2"
    assert str((S + 1) / (S - 1)) == "(s + 1)/(s - 1)"
    assert (1 / S).to_json() == {"num": "1", "den": "s"}


def test_digit_decompose_examples():
    d = digit_decompose(E(0, 3), 2)
    assert (d[(1, 0)], d[(1, 1)]) == (1, 1)
    d = digit_decompose(E(0, 0, 5), 3)
    assert (d[(2, 0)], d[(2, 1)]) == (2, 1)
    assert len(digit_decompose(SigmaExponent(), 5)) == 0
    with pytest.raises(CharacteristicOne):
        digit_decompose(E(1), 1)


def test_digit_decompose_p_denominators():
    nu = SigmaExponent({0: Fraction(3, 4), 1: 1})
    d = digit_decompose(nu, 2)
    assert d.clearing_power == 2
    assert d.reconstruct() == nu


def test_digit_dominates_examples():
    assert digit_dominates(E(0, 1), E(1, 1), 2)
    assert not digit_dominates(E(0, 1), E(0, 2), 2)
    nu = E(3, 2, 1)
    assert digit_dominates(nu, nu, 3)


def test_binom_examples():
    assert binom_mod_p(E(1, 1), E(0, 1), 2) == 1
    assert binom_mod_p(E(0, 2), E(0, 1), 2) == 0
    assert binom_mod_p(E(0, 3), E(0, 1), 2) == 1
    # characteristic zero: exact product of per-index binomials
    assert binom_mod_p(E(4, 3), E(2, 1), 1) == 6 * 3


def test_specialize_examples():
    assert specialize_q(S**2 + S, 5) == 30
    assert specialize_q(1 / (S - 1), 3) == Fraction(1, 2)
    assert specialize_q(ZERO, 7) == 0
    assert E(1, 1).specialize(4) == 5
    with pytest.raises(DenominatorVanishes):
        specialize_q(1 / (S - 3), 3)


def test_injectivity_examples():
    assert injectivity_threshold([E(0, 1), E(3)]) == 4
    assert injectivity_threshold([E(1, 1), E(0, 2)]) == 2
    assert injectivity_threshold([E(7, 2)]) == 2


def test_truncate_approx_examples():
    beta = truncate_approx(1, S - 1, 3)
    assert beta == S**-1 + S**-2 + S**-3 + S**-4
    assert abs((S - 1) * beta - 1) < S**-3
    assert truncate_approx(S, 1, 5) == S
    assert truncate_approx(0, S, 2) == ZERO


def test_solve_affine_cut_examples():
    assert solve_affine_cut(1, 0, S) == 1 / (S - 1)
    assert solve_affine_cut(S, S, S**2) == ZERO
    assert solve_affine_cut(0, S**2 - 1, S**2) == -1
    with pytest.raises(NotOmegaIncreasing):
        solve_affine_cut(1, 0, 5)


def test_infinity_order():
    assert S**5 < INF and not INF < S
    assert INF + S is INF


def test_exponent_json_round_trip():
    nu = SigmaExponent({0: Fraction(1, 4), 2: 3})
    doc = nu.to_json()
    assert SigmaExponent.from_json(doc) == nu
    assert {"i": 0, "num": 1, "pden": 4} in doc["terms"]


def test_exponent_rejects_negative():
    with pytest.raises(ValueError):
        SigmaExponent([-1])


def test_transformal_pth_powers():
    assert E(0, 0, 4).is_transformal_pth_power(2)
    assert SigmaExponent({1: Fraction(1, 2)}).is_transformal_pth_power(2)
    assert not E(0, 3).is_transformal_pth_power(2)
    assert not E(1, 1).is_transformal_pth_power(2)


# -- properties ---------------------------------------------------------------

small_poly = st.lists(st.integers(-6, 6), min_size=1, max_size=4)


@st.composite
def rationals(draw):
    num = SigmaRational(SigmaPoly(draw(small_poly)))
    den = draw(small_poly)
    if not any(den):
        den = [1]
    return num / SigmaRational(SigmaPoly(den))


exponents = st.lists(st.integers(0, 7), min_size=0, max_size=3).map(lambda c: SigmaExponent(c))


@settings(max_examples=200, deadline=None)
@given(rationals(), rationals())
def test_order_matches_specialization(a, b):
    q0 = max(sign_threshold(a - b), sign_threshold(a), sign_threshold(b))
    c = compare(a, b)
    for q in range(q0, q0 + 5):
        d = specialize_q(a, q) - specialize_q(b, q)
        assert (d > 0) - (d < 0) == c


@settings(max_examples=200, deadline=None)
@given(rationals(), rationals(), rationals())
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a - a == ZERO
    if b:
        assert (a / b) * b == a
    assert (a < b) + (a == b) + (a > b) == 1


@settings(max_examples=200, deadline=None)
@given(exponents, st.integers(1, 50))
def test_omega_increasing(alpha, n):
    if alpha.is_zero():
        return
    a = alpha.to_rational()
    assert compare(S * a, n * a) == 1


@settings(max_examples=200, deadline=None)
@given(exponents, st.sampled_from([2, 3, 5]))
def test_digits_reconstruct(nu, p):
    assert digit_decompose(nu, p).reconstruct() == nu


@settings(max_examples=100, deadline=None)
@given(exponents, st.sampled_from([2, 3, 5]))
def test_dominated_exponents_are_the_nonzero_binomials(nu, p):
    dom = set(dominated_exponents(nu, p))
    for mu in dom:
        assert binom_mod_p(nu, mu, p) != 0
        assert digit_dominates(mu, nu, p)


@settings(max_examples=100, deadline=None)
@given(exponents, exponents, exponents, st.sampled_from([2, 3]))
def test_domination_is_a_partial_order(a, b, c, p):
    assert digit_dominates(a, a, p)
    if digit_dominates(a, b, p) and digit_dominates(b, a, p):
        assert a == b
    if digit_dominates(a, b, p) and digit_dominates(b, c, p):
        assert digit_dominates(a, c, p)
    if digit_dominates(a, b, p):
        assert a <= b


@settings(max_examples=100, deadline=None)
@given(st.lists(exponents, min_size=1, max_size=5))
def test_injectivity_threshold_is_sound_and_minimal(exps):
    q0 = injectivity_threshold(exps)
    distinct = set(exps)
    for q in range(q0, q0 + 4):
        assert len({e.specialize(q) for e in distinct}) == len(distinct)
    if q0 > 2:
        assert len({e.specialize(q0 - 1) for e in distinct}) < len(distinct)


@settings(max_examples=100, deadline=None)
@given(rationals(), rationals(), st.integers(1, 4))
def test_solve_affine_cut_solves(alpha, beta, k):
    nu = S**k + 1
    x = solve_affine_cut(alpha, beta, nu)
    assert x + alpha == nu * x + beta


@settings(max_examples=100, deadline=None)
@given(rationals(), st.integers(0, 4))
def test_truncate_approx_bound(target, n):
    nu = S - 2
    beta = truncate_approx(target, nu, n)
    assert beta.is_laurent()
    assert abs(nu * beta - target) < S ** (-n)
