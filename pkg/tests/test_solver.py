import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transval.diffpoly import DiffPoly
from transval.errors import (
    BudgetExceeded,
    PreconditionFailed,
    ResidueSearchExhausted,
    SymbolicResidueUnsupported,
)
from transval.fields import GF, QQ
from transval.hahn import HahnRing, HahnSeries
from transval.sigma import INF, SigmaExponent, SigmaRational
from transval.solver import (
    NO_ROOT,
    Budget,
    Certificate,
    LiftReport,
    hensel_lift,
    newton_step,
    residue_root,
    root_distances,
    root_in_ball,
    solve_additive,
)
from transval.tropical import Ball, tropical_roots

S = SigmaRational.sigma()
E = lambda *c: SigmaExponent(list(c))  # noqa: E731


def setup(field):
    R = HahnRing.of(field)
    return R, DiffPoly.x(R)


def T(F, e, c=1):
    return HahnSeries.monomial(F, e, c)


def K(R, c):
    return DiffPoly.const(R, c)


# -- newton_step ----------------------------------------------------------------

def test_newton_step_examples():
    R, x = setup(QQ)
    t = HahnSeries.t(QQ)
    f = x.sigma_map(1) - x - K(R, t)
    a1 = newton_step(f, HahnSeries.zero(QQ))
    assert a1 == -t
    assert f(a1).val() == S
    g = x**2 - K(R, HahnSeries.one(QQ) + t)
    b = newton_step(g, HahnSeries.one(QQ))
    assert b.agrees_with(HahnSeries(QQ, {0: 1, 1: Fraction(1, 2)}), 2)
    c = HahnSeries(QQ, {-3: 2, S: 5})
    assert newton_step(x - K(R, c), T(QQ, 7)) == c


def test_newton_step_precondition():
    R, x = setup(QQ)
    f = x**2 - K(R, T(QQ, 1))
    with pytest.raises(PreconditionFailed):
        newton_step(f, HahnSeries.one(QQ))


def test_newton_gain():
    """v(a' - a) = v(f(a)) - v(f'(a)) and v(f(a')) >= sigma * that gap."""
    R, x = setup(GF(3))
    for e in (1, 2, S, S + 1):
        f = x.sigma_map(1) - x - K(R, T(GF(3), e))
        a = HahnSeries.zero(GF(3))
        for _ in range(3):
            fa, d = f(a), f.derivative()(a)
            gap = fa.val() - d.val()
            b = newton_step(f, a)
            assert (b - a).val() == gap
            fb = f(b)
            assert fb.is_zero() or fb.val() >= S * gap
            a = b


# -- hensel_lift ----------------------------------------------------------------

def test_hensel_examples():
    R, x = setup(QQ)
    t = HahnSeries.t(QQ)
    f = x.sigma_map(1) - x - K(R, t)
    rep = hensel_lift(f, HahnSeries.zero(QQ), S**3)
    assert rep.root == -(t + T(QQ, S) + T(QQ, S**2))
    assert rep.residual_valuation == S**3
    assert rep.distance_to_seed == 1 == f(HahnSeries.zero(QQ)).val()
    c = HahnSeries(QQ, {2: 3})
    rep = hensel_lift(x - K(R, c), c, 5)
    assert rep.root == c and rep.steps == 0


def test_hensel_classical_artin_schreier():
    F = GF(2)
    R, x = setup(F)
    f = x**2 - x - K(R, HahnSeries.t(F))
    rep = hensel_lift(f, HahnSeries.zero(F), 16)
    assert rep.root.truncate(16) == HahnSeries(F, {1: 1, 2: 1, 4: 1, 8: 1}).truncate(16)
    assert rep.residual_valuation >= 16


def test_hensel_unreachable_target_reports_partial_result():
    F = GF(2)
    R, x = setup(F)
    f = x**2 - x - K(R, HahnSeries.t(F))
    with pytest.raises(BudgetExceeded) as info:
        hensel_lift(f, HahnSeries.zero(F), S, Budget(max_steps=4))
    rep = info.value.report
    assert isinstance(rep, LiftReport) and not rep.converged
    assert rep.residual_valuation == 16


def test_hensel_preconditions():
    F = GF(2)
    R, x = setup(F)
    with pytest.raises(PreconditionFailed):
        hensel_lift(x - K(R, HahnSeries.one(F)), HahnSeries.zero(F), 3)
    with pytest.raises(PreconditionFailed):
        hensel_lift(x - K(R, T(F, 1)), T(F, -1), 3)


def test_hensel_twist():
    F = GF(2)
    R, x = setup(F)
    t = HahnSeries.t(F)
    f = x.sigma_map(2) - x.sigma_map(1) - K(R, t.sigma_map(1))
    with pytest.raises(PreconditionFailed):
        hensel_lift(f, HahnSeries.zero(F), S**2)
    rep = hensel_lift(f, HahnSeries.zero(F), S**2, twist=True)
    assert f(rep.root).val() >= S**2


def test_hensel_uniqueness():
    F = GF(3)
    R, x = setup(F)
    f = x.sigma_map(1) - x - K(R, HahnSeries(F, {1: 1, 2: 2}))
    target = S**2
    r1 = hensel_lift(f, HahnSeries.zero(F), target)
    r2 = hensel_lift(f, T(F, 3), target)
    assert r1.root.agrees_with(r2.root, 1 + S)
    assert r2.distance_to_seed == f(T(F, 3)).val()


def test_cancellation_token():
    F = GF(2)
    R, x = setup(F)
    f = x.sigma_map(1) - x - K(R, T(F, -1))
    ev = threading.Event()
    ev.set()
    with pytest.raises(BudgetExceeded):
        root_in_ball(f, Ball(None, -1), budget=Budget(cancel=ev))
    with pytest.raises(BudgetExceeded):
        root_in_ball(f, Ball(None, -1), budget=Budget(cancel=lambda: True))


# -- root_in_ball -----------------------------------------------------------------

def test_root_in_ball_artin_schreier_sigma():
    F = GF(2)
    R, x = setup(F)
    f = x.sigma_map(1) - x - K(R, T(F, -1))
    rep = root_in_ball(f, Ball(None, -1), budget=Budget(max_steps=5))
    expect = HahnSeries(F, {-(S ** -n): 1 for n in range(1, 6)})
    assert rep.root == expect
    assert rep.root.val() == -1 / S
    assert rep.residual_valuation == -(S**-5)
    assert not rep.converged
    assert len(rep.nest) == 5


def test_root_in_ball_certificate():
    R, x = setup(GF(3))
    res = root_in_ball(x - K(R, 1), Ball(None, 1))
    assert isinstance(res, Certificate) and res.kind == NO_ROOT
    assert "herbrand" in res.to_json()


@pytest.mark.parametrize("mode", ["symbolic", "specialized"])
def test_root_in_ball_square_root(mode):
    R, x = setup(QQ)
    f = x**2 - K(R, HahnSeries.t(QQ))
    rep = root_in_ball(f, Ball(None, Fraction(1, 2)), mode=mode, q=5)
    assert rep.converged and rep.residual_valuation is INF
    assert rep.root == T(QQ, Fraction(1, 2))


def test_root_in_ball_specialized_artin_schreier():
    F = GF(2)
    R, x = setup(F)
    f = x.sigma_map(1) - x - K(R, T(F, -1))
    rep = root_in_ball(f, Ball(None, -1), mode="specialized", q=4, budget=Budget(max_steps=3))
    assert rep.q == 4
    assert rep.root == HahnSeries(F, {Fraction(-1, 4): 1, Fraction(-1, 16): 1, Fraction(-1, 64): 1})


def test_root_in_ball_strict():
    F = GF(2)
    R, x = setup(F)
    f = x.sigma_map(1) - x - K(R, T(F, -1))
    with pytest.raises(BudgetExceeded) as info:
        root_in_ball(f, Ball(None, -1), budget=Budget(max_steps=2), strict=True)
    assert info.value.report.steps == 2


def test_root_in_ball_extension_field():
    # y^2 + y + 1 has no root in F_2 but one in F_4
    F = GF(2)
    R, x = setup(F)
    f = x**2 + x + K(R, 1)
    rep = root_in_ball(f, Ball(None, 0))
    assert rep.converged and rep.root.field.q == 4


def test_residue_root():
    F = GF(5)
    y, m = residue_root(F, {E(2): F.from_int(-1)})
    assert m == 1 and y * y == F.one
    with pytest.raises(SymbolicResidueUnsupported):
        residue_root(F, {E(1, 1): F.one, E(2): F.one})
    y, m = residue_root(F, {E(1, 1): F.one, E(2): F.one}, mode="specialized")
    Fm, emb = F.extension(m)
    assert Fm.one + Fm.sigma(y) * y + y * y == Fm.zero
    with pytest.raises(ResidueSearchExhausted):
        residue_root(QQ, {E(2): Fraction(1)})
    y, m = residue_root(QQ, {E(1): Fraction(-1, 3)})
    assert y == 3


# -- solve_additive ----------------------------------------------------------------

def test_solve_additive_examples():
    F = GF(2)
    R, x = setup(F)
    tau = x.sigma_map(1) - x
    rep = solve_additive(tau, T(F, -1), budget=Budget(max_steps=4))
    assert rep.root == HahnSeries(F, {-(S ** -n): 1 for n in range(1, 5)})
    assert rep.residual_valuation == -(S**-4)
    t = HahnSeries.t(F)
    rep = solve_additive(tau, t, target=S**3)
    assert rep.root == t + T(F, S) + T(F, S**2)
    c = HahnSeries(F, {-2: 1, S: 1})
    assert solve_additive(x, c).root == c


def test_solve_additive_rejects():
    F = GF(2)
    R, x = setup(F)
    with pytest.raises(PreconditionFailed):
        solve_additive(x**3, HahnSeries.one(F))
    with pytest.raises(PreconditionFailed):
        solve_additive(x, HahnSeries.zero(F))


# -- root_distances ----------------------------------------------------------------

@pytest.mark.parametrize("q,p,n", [(4, 2, 2), (8, 2, 3), (9, 3, 2)])
def test_root_distances_sigma(q, p, n):
    R, x = setup(GF(p, n))
    tau = x.sigma_map(1) - x
    assert root_distances(tau, q) == [0]
    assert root_distances(tau, q, m=2) == [0]


def test_root_distances_artin_schreier():
    F = GF(3)
    R, x = setup(F)
    assert root_distances(x**3 - x, 3, c=T(F, -1)) == [0]
    assert root_distances(x, 3) == []


def test_root_distances_need_finite_field():
    R, x = setup(QQ)
    with pytest.raises(PreconditionFailed):
        root_distances(x.sigma_map(1) - x, 4)


# -- budget ----------------------------------------------------------------------

def test_budget_parsing(monkeypatch):
    assert Budget.parse("40").max_steps == 40
    b = Budget.parse("steps=3,terms=100,field=2")
    assert (b.max_steps, b.max_terms, b.max_field_power) == (3, 100, 2)
    with pytest.raises(ValueError):
        Budget.parse("speed=3")
    monkeypatch.setenv("TRANSVAL_BUDGET", "steps=7")
    assert Budget.from_env().max_steps == 7


def test_report_json():
    F = GF(2)
    R, x = setup(F)
    rep = solve_additive(x.sigma_map(1) - x, T(F, -1), budget=Budget(max_steps=2))
    doc = rep.to_json()
    assert doc["steps"] == 2 and doc["converged"] is False
    assert doc["residualValuation"] == {"num": "-1", "den": "s^2"}


# -- properties --------------------------------------------------------------------

F3 = GF(3)
R3, X3 = setup(F3)
small_pos = st.sampled_from([SigmaRational(1), SigmaRational(2), S, S + 1, 1 / S])
neg = st.sampled_from([SigmaRational(-1), SigmaRational(-2), -S, -S - 1, -(S**2), -1 / S, SigmaRational(Fraction(-1, 3))])


@settings(max_examples=40, deadline=None)
@given(neg, st.integers(1, 2))
def test_descent_roots_are_tropical(g, coeff):
    f = X3.sigma_map(1) - X3 - K(R3, T(F3, g, coeff))
    rep = solve_additive(X3.sigma_map(1) - X3, T(F3, g, coeff), budget=Budget(max_steps=4))
    assert rep.root.val() in tropical_roots(f)
    assert rep.residual_valuation > g


@settings(max_examples=40, deadline=None)
@given(small_pos, st.integers(1, 2))
def test_hensel_distance_is_vfa(e, coeff):
    f = X3.sigma_map(1) - X3 - K(R3, T(F3, e, coeff))
    seed = HahnSeries.zero(F3)
    rep = hensel_lift(f, seed, S**2 * 3)
    assert rep.distance_to_seed == f(seed).val()
    assert rep.root.val() in tropical_roots(f)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([SigmaRational(1), SigmaRational(2), S + 1]), st.sampled_from([3, 9]))
def test_specialized_hensel_matches(e, q):
    """Lifting f and its specialization agree term by term after gamma -> gamma(q)."""
    f = X3.sigma_map(1) - X3 - K(R3, T(F3, e))
    target = S**2 + 1
    sym = hensel_lift(f, HahnSeries.zero(F3), target).root
    fq = f.specialize_sigma(q, coefficients=True)
    spec = hensel_lift(fq, HahnSeries.zero(F3), target(q)).root
    assert sym.specialize(q) == spec
