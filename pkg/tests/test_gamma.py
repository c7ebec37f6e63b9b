import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transval.gamma import (
    Everything,
    GammaVector,
    PointAtInfinity,
    PositivePart,
    RadicalPrincipal,
    contains,
    convex_level,
    divisible_defect,
    is_transformally_prime,
)
from transval.sigma import INF, SigmaPoly, SigmaRational

S = SigmaRational.sigma()


def test_convex_level_examples():
    assert convex_level(GammaVector([0, 5])) == 1
    assert convex_level(GammaVector([S**-3, -7])) == 0
    assert convex_level(GammaVector.zero(2)) == 2


def test_lex_order():
    assert GammaVector([1, -100]) > GammaVector([0, S**9])
    assert GammaVector([0, 1]) < GammaVector([0, S])


def test_prime_examples():
    assert not is_transformally_prime(RadicalPrincipal(GammaVector([1])), 1)
    assert is_transformally_prime(PositivePart(1), 2)
    assert not is_transformally_prime(Everything(), 1)
    assert is_transformally_prime(PointAtInfinity(), 1)
    assert is_transformally_prime(PositivePart(0), 1)


def test_level_out_of_range():
    with pytest.raises(ValueError):
        is_transformally_prime(PositivePart(1), 1)


def test_radical_principal_needs_positive_generator():
    with pytest.raises(ValueError):
        RadicalPrincipal(GammaVector([-1]))


def test_divisible_defect_examples():
    assert divisible_defect("full", S - 1)
    assert not divisible_defect("lattice", S - 1)
    assert divisible_defect("lattice", S)
    assert divisible_defect("lattice", SigmaPoly([0, 0, -4]), p=2)
    assert not divisible_defect("lattice", 6, p=2)


def test_contains():
    g = GammaVector([1])
    ideal = RadicalPrincipal(g)
    assert contains(ideal, GammaVector([SigmaRational(1) / 1000]))
    assert not contains(ideal, GammaVector([1 / S]))
    assert contains(ideal, INF)
    assert not contains(PointAtInfinity(), g)
    assert contains(Everything(), GammaVector([0]))
    assert contains(PositivePart(0), GammaVector([0, 1]), 2)
    assert not contains(PositivePart(1), GammaVector([0, 1]), 2)
    assert contains(PositivePart(1), GammaVector([1, -9]), 2)


def test_json_round_trip():
    v = GammaVector([S / 3, -(S + 1) / (S - 1)])
    assert GammaVector.from_json(v.to_json()) == v


coord = st.builds(
    lambda n, d, k: SigmaRational(n, d) * S**k,
    st.integers(-9, 9),
    st.integers(1, 5),
    st.integers(-2, 2),
)
vectors = st.lists(coord, min_size=2, max_size=2).map(GammaVector)


@settings(max_examples=200, deadline=None)
@given(vectors, st.integers(1, 40))
def test_sigma_is_omega_increasing(g, n):
    if g.sign() > 0:
        assert g.sigma_map() > g.scale(n)


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_convex_level_sigma_invariant(g):
    assert convex_level(g) == convex_level(g.sigma_map())


def _ideal_kinds(d):
    yield Everything()
    yield PointAtInfinity()
    for k in range(d):
        yield PositivePart(k)
    yield RadicalPrincipal(GammaVector([1] + [0] * (d - 1)))
    yield RadicalPrincipal(GammaVector([S] + [0] * (d - 1)))


def _probes(d):
    base = [SigmaRational(0), SigmaRational(1), SigmaRational(-1), S, 1 / S, S**2, S**-2, S / 2]
    if d == 1:
        return [GammaVector([c]) for c in base]
    return [GammaVector([a, b]) for a in base for b in base]


@pytest.mark.parametrize("d", [1, 2])
def test_primality_matches_brute_force(d):
    """sigma(alpha) in I forces alpha in I, and 0 is not in I."""
    probes = _probes(d)
    for ideal in _ideal_kinds(d):
        zero_in = contains(ideal, GammaVector.zero(d), d)
        closed = all(
            contains(ideal, a, d) for a in probes if contains(ideal, a.sigma_map(), d)
        )
        assert is_transformally_prime(ideal, d) == (not zero_in and closed), ideal


def test_d1_primes_are_exactly_two():
    primes = [i for i in _ideal_kinds(1) if is_transformally_prime(i, 1)]
    assert set(primes) == {PositivePart(0), PointAtInfinity()}
