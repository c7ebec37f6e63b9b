import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transval.errors import DivisionByZero, MixedCoefficientRings
from transval.fields import GF, QQ, field_from_spec

FIELDS = [GF(2), GF(3), GF(2, 2), GF(3, 2), GF(2, 3), GF(5)]


def _poly_mod_arith(F, a, b):
    """Oracle: multiply codes as polynomials over F_p modulo the field modulus."""
    p, n = F.p, F.n

    def digits(c):
        return [(c // p**i) % p for i in range(n)]

    x, y = digits(a), digits(b)
    prod = [0] * (2 * n - 1)
    for i, u in enumerate(x):
        for j, v in enumerate(y):
            prod[i + j] = (prod[i + j] + u * v) % p
    mod = list(F.modulus) + [1]  # monic modulus, low degree first
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * mod[i]) % p
    return sum(prod[i] * p**i for i in range(n))


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_multiplication_matches_polynomial_oracle(F):
    for a in range(F.q):
        for b in range(F.q):
            got = F.code(F.from_code(a) * F.from_code(b))
            assert got == _poly_mod_arith(F, a, b)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_field_axioms(F):
    els = list(F.elements())
    assert len(els) == F.q
    for a in els:
        assert a + (-a) == F.zero
        if a:
            assert a * a.inverse() == F.one
        assert F.frob(a, F.n) == a
        assert F.frob(F.frob(a, 1), -1) == a
        assert a ** F.q == a


def test_frobenius_is_additive():
    F = GF(3, 2)
    for a in F.elements():
        for b in F.elements():
            assert F.frob(a + b) == F.frob(a) + F.frob(b)


def test_sigma_is_configured_frobenius_power():
    F = GF(2, 2, 1)
    g = F.gen
    assert F.sigma(g) == g**2
    assert GF(2, 2).sigma(g := GF(2, 2).gen) == g


def test_extension_embedding_is_a_homomorphism():
    F = GF(2, 2)
    big, emb = F.extension(3)
    assert big.q == 64
    for a in F.elements():
        for b in F.elements():
            assert emb(a * b) == emb(a) * emb(b)
            assert emb(a + b) == emb(a) + emb(b)


def test_extension_concurrent_construction():
    F = GF(3)
    results = []

    def work():
        results.append(F.extension(4)[0])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len({id(r) for r in results}) == 1


def test_errors():
    with pytest.raises(DivisionByZero):
        GF(5).zero.inverse()
    with pytest.raises(MixedCoefficientRings):
        GF(2).one + GF(3).one
    with pytest.raises(MixedCoefficientRings):
        QQ.coerce(GF(2).one)


def test_field_specs():
    assert field_from_spec("Q", 1) is QQ
    assert field_from_spec("F4", 2) is GF(2, 2)
    assert field_from_spec("F9:1", 3) is GF(3, 2, 1)


def test_render():
    F = GF(5)
    assert F.render(F.from_int(4)) == "-1"
    assert GF(2, 2).render(GF(2, 2).gen) == "g"
    assert QQ.render(Fraction(1, 2)) == "1/2"


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_distributive(F, data):
    a, b, c = (F.from_code(data.draw(st.integers(0, F.q - 1))) for _ in range(3))
    assert a * (b + c) == a * b + a * c
