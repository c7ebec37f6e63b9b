"""Root finding over truncated Hahn series.

Two engines are provided.  The Newton iteration handles the Hensel regime
v(f(a)) > 2 v(f'(a)).  The descent engine follows the ball-shrinking
argument: at each step it jumps to the largest tropical root of the
translated polynomial, solves the residue equation there and adds the
corresponding monomial.  Descent steps are exact whenever f is.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from .diffpoly import DiffPoly, ring_power
from .errors import (
    BudgetExceeded,
    PrecisionLoss,
    PreconditionFailed,
    ResidueSearchExhausted,
    SymbolicResidueUnsupported,
)
from .fields import MAX_FIELD_SIZE, QQ
from .hahn import HahnRing, HahnSeries, term_budget
from .sigma import EXP_ONE, INF, SigmaExponent, SigmaRational, as_rational
from .tropical import Ball, PiecewiseTA, herbrand, lower_envelope, newton_polygon, strictly_increasing


@dataclass
class Budget:
    """Explicit limits for the iterative engines.

    ``cancel`` is a cooperative cancellation token: a ``threading.Event`` or
    any zero-argument callable returning True once the caller wants to stop.
    """

    max_steps: int = 32
    max_terms: int = 4096
    max_field_power: int = 3
    cancel: Optional[Union[threading.Event, Callable[[], bool]]] = None

    def check(self):
        c = self.cancel
        if c is None:
            return
        stop = c.is_set() if isinstance(c, threading.Event) else c()
        if stop:
            raise BudgetExceeded("search cancelled")

    @classmethod
    def parse(cls, text: str, base: Optional["Budget"] = None) -> "Budget":
        """``"40"`` sets the step limit; ``"steps=40,terms=2000,field=2"`` sets several."""
        b = Budget(**{k: getattr(base, k) for k in ("max_steps", "max_terms", "max_field_power")}) if base else cls()
        text = text.strip()
        if not text:
            return b
        if text.isdigit():
            b.max_steps = int(text)
            return b
        names = {"steps": "max_steps", "terms": "max_terms", "field": "max_field_power"}
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in names or not val.strip().isdigit():
                raise ValueError(f"bad budget entry {part!r}")
            setattr(b, names[key], int(val))
        return b

    @classmethod
    def from_env(cls, base: Optional["Budget"] = None) -> "Budget":
        text = os.environ.get("TRANSVAL_BUDGET")
        return cls.parse(text, base) if text else (base or cls())


@dataclass
class LiftReport:
    root: HahnSeries
    residual_valuation: object
    steps: int
    distance_to_seed: object
    converged: bool = True
    nest: Tuple[Ball, ...] = ()
    q: Optional[int] = None

    def to_json(self) -> dict:
        def val(v):
            return "inf" if v is INF else v.to_json()

        return {
            "root": self.root.to_json(),
            "rootText": str(self.root),
            "residualValuation": val(self.residual_valuation),
            "steps": self.steps,
            "distanceToSeed": val(self.distance_to_seed),
            "converged": self.converged,
            "nest": [{"center": str(b.center), "radius": b.radius.to_json()} for b in self.nest],
            "q": self.q,
        }


@dataclass
class Certificate:
    """Proof object: the Herbrand function above the ball has a flat piece."""

    kind: str
    ball: Ball
    herbrand: PiecewiseTA

    def to_json(self) -> dict:
        return {"kind": self.kind, "radius": self.ball.radius.to_json(), "herbrand": self.herbrand.to_json()}


NO_ROOT = "NoRootInAnyExtension"


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _as_hahn_poly(f: DiffPoly) -> DiffPoly:
    if isinstance(f.ring, HahnRing):
        return f
    ring = HahnRing.of(f.ring)
    return DiffPoly._raw(ring, {nu: HahnSeries.const(f.ring, c) for nu, c in f.terms.items()})


def _field_of(f: DiffPoly):
    return f.ring.field if isinstance(f.ring, HahnRing) else f.ring


def _lower(x: HahnSeries):
    return x._val_lower()


def _embed_poly(f: DiffPoly, emb, big) -> DiffPoly:
    ring = HahnRing.of(big)
    return DiffPoly._raw(ring, {nu: c.map_coefficients(emb, big) for nu, c in f.terms.items()})


# ---------------------------------------------------------------------------
# Newton iteration
# ---------------------------------------------------------------------------

def newton_step(f: DiffPoly, a: HahnSeries, prec=None) -> HahnSeries:
    """a - f(a)/f'(a), valid when v(f(a)) > 2 v(f'(a)).

    ``prec`` bounds the absolute precision of the correction when the
    division is not exact; by default it is 2 v(f(a)) - 3 v(f'(a)).
    """
    f = _as_hahn_poly(f)
    a = f.ring.coerce(a)
    fa = f.evaluate(a)
    if fa.is_zero():
        return a
    vfa = fa.val()
    fd = f.derivative()
    d = fd.evaluate(a) if fd else HahnSeries.zero(f.ring.field)
    if d.is_zero():
        raise PreconditionFailed("f'(a) = 0: Newton's step is undefined")
    vd = d.val()
    linear = all(mu.is_zero() or mu == EXP_ONE for mu in f.terms)
    if not linear and not vfa > vd * 2:
        raise PreconditionFailed(f"Newton needs v(f(a)) > 2 v(f'(a)); got {vfa} and {vd}")
    if len(d.terms) == 1 and d.prec is None:
        corr = fa * d.inverse()
    else:
        if prec is None:
            prec = vfa * 2 - vd * 3
        prec = as_rational(prec)
        corr = fa._mul(d.inverse(prec - vfa), cap=prec)
    return a - corr


def _newton_loop(f, seed, target, budget: Budget):
    b = seed
    steps = 0
    while True:
        budget.check()
        fb = f.evaluate(b)
        if fb.is_zero() or _lower(fb) >= target:
            return b, fb, steps, True
        if steps >= budget.max_steps:
            return b, fb, steps, False
        vd = f.derivative().evaluate(b).val()
        b = newton_step(f, b, prec=target - vd)
        steps += 1


def hensel_lift(f: DiffPoly, a, target, budget: Optional[Budget] = None, twist: bool = False) -> LiftReport:
    """Lift an integral approximate root with v(f(a)) > 0 and v(f'(a)) = 0.

    With ``twist=True`` a seed whose derivative is not a unit is first
    handled by untwisting f (the roots do not change).
    """
    budget = budget or Budget()
    f = _as_hahn_poly(f)
    ring = f.ring
    a = ring.coerce(a)
    target = as_rational(target)
    with term_budget(budget.max_terms):
        fa = f.evaluate(a)
        if fa.is_zero():
            return LiftReport(a, INF, 0, INF)
        if _lower(a) < 0:
            raise PreconditionFailed("the seed must be integral")
        vfa = fa.val()
        if not vfa > 0:
            raise PreconditionFailed("Hensel lifting needs v(f(a)) > 0")
        d = f.derivative()
        vd = d.evaluate(a).val() if d else INF
        if vd != 0:
            if not twist:
                raise PreconditionFailed("Hensel lifting needs v(f'(a)) = 0 (pass twist=True to untwist)")
            f, _, _ = f.twist_normalize()
            d = f.derivative()
            vd = d.evaluate(a).val() if d else INF
            if vd != 0:
                raise PreconditionFailed("v(f'(a)) != 0 even after untwisting")
            fa = f.evaluate(a)
            vfa = fa.val()
            if not vfa > 0:
                raise PreconditionFailed("untwisted polynomial has v(f(a)) <= 0")
        b, fb, steps, ok = _newton_loop(f, a, target, budget)
        report = LiftReport(b, INF if fb.is_zero() else _lower(fb), steps, _lower(b - a), ok)
    if not ok:
        raise BudgetExceeded(f"Hensel lift did not reach {target} in {steps} steps", report)
    return report


# ---------------------------------------------------------------------------
# residue equations
# ---------------------------------------------------------------------------

def _transformal_pth_power(mu: SigmaExponent, p: int) -> Optional[Tuple[int, int]]:
    """(n, m) with mu = sigma^n p^m, or None."""
    if len(mu.entries) != 1:
        return None
    (n, c), = mu.entries
    if c == 1:
        return n, 0
    if p < 2:
        return None
    m = 0
    num, den = c.numerator, c.denominator
    if num != 1 and den != 1:
        return None
    k = num if den == 1 else den
    while k % p == 0:
        k //= p
        m += 1
    if k != 1:
        return None
    return (n, m) if den == 1 else (n, -m)


def _eval_residue(field, coeffs, y):
    total = field.one
    for mu, r in coeffs.items():
        total = total + r * ring_power(field, y, mu)
    return total


def _rational_roots(coeffs: Dict[int, Fraction]) -> List[Fraction]:
    """Rational roots of sum c_k y^k, by the rational root theorem."""
    from math import gcd

    lcm = 1
    for c in coeffs.values():
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = {k: int(c * lcm) for k, c in coeffs.items() if c}
    if not ints:
        return []
    low = min(ints)
    ints = {k - low: v for k, v in ints.items()}
    roots = [Fraction(0)] if low > 0 else []
    a0, an = abs(ints.get(0, 0)), abs(ints[max(ints)])

    def divisors(n):
        return [d for d in range(1, n + 1) if n % d == 0]

    cands = sorted({Fraction(s * u, v) for u in divisors(a0) for v in divisors(an) for s in (1, -1)},
                   key=lambda z: (z < 0, abs(z)))
    for z in cands:
        if sum(c * z ** k for k, c in ints.items()) == 0:
            roots.append(z)
    return roots


def residue_root(field, coeffs: Dict[SigmaExponent, object], mode: str = "symbolic", max_field_power: int = 3):
    """A root y of 1 + sum r_mu y^mu in the residue field or a finite extension.

    Returns ``(y, m)`` where y lives in ``field.extension(m)[0]``.
    """
    if not coeffs:
        raise ResidueSearchExhausted("the residue equation 1 = 0 has no root")
    p = field.p
    if mode == "symbolic":
        if len(coeffs) == 1:
            (mu, r), = coeffs.items()
            shape = _transformal_pth_power(mu, p) if p > 1 else ((mu.entries[0][0], 0) if len(mu.entries) == 1 and mu.entries[0][1] == 1 else None)
            if shape is not None:
                n, m = shape
                z = -(field.one / r)
                return field.sigma(field.frob(z, -m), -n), 1
        algebraic = all(mu.is_natural() for mu in coeffs)
        additive = all(_transformal_pth_power(mu, p) is not None for mu in coeffs) if p > 1 else all(
            len(mu.entries) == 1 and mu.entries[0][1] == 1 for mu in coeffs
        )
        if not (algebraic or additive):
            raise SymbolicResidueUnsupported(
                "symbolic mode solves only binomial, additive or algebraic residue equations"
            )
    if field is QQ or not getattr(field, "is_finite", False):
        poly: Dict[int, Fraction] = {0: Fraction(1)}
        for mu, r in coeffs.items():
            k = int(mu.specialize(1))
            poly[k] = poly.get(k, Fraction(0)) + r
        roots = _rational_roots(poly)
        if not roots:
            raise ResidueSearchExhausted("no rational residue root")
        return roots[0], 1
    for m in range(1, max_field_power + 1):
        if field.q ** m > MAX_FIELD_SIZE:
            raise BudgetExceeded(f"residue search field F_{field.q}^{m} is too large")
        big, emb = field.extension(m)
        rs = {mu: emb(r) for mu, r in coeffs.items()}
        for y in big.nonzero_elements():
            if not _eval_residue(big, rs, y):
                return y, m
    raise ResidueSearchExhausted(f"no residue root over F_{field.q}^m for m <= {max_field_power}")


# ---------------------------------------------------------------------------
# descent
# ---------------------------------------------------------------------------

def _crossing(lines, level) -> SigmaRational:
    """The unique lambda where the (increasing) envelope of ``lines`` reaches ``level``."""
    env = lower_envelope(lines)
    for pc in env.pieces:
        lam = (level - pc.intercept) / pc.slope.to_rational()
        if (pc.start is None or lam >= pc.start) and (pc.end is None or lam <= pc.end):
            return lam
    raise PreconditionFailed("the Herbrand function never reaches the constant line")  # pragma: no cover


def _descend(f: DiffPoly, a: HahnSeries, target, budget: Budget, mode: str):
    field = f.ring.field
    taylor = {mu: g for mu, g in f.taylor().items() if not mu.is_zero()}
    nest: List[Ball] = []
    steps = 0
    while True:
        budget.check()
        fa = f.evaluate(a)
        if fa.is_zero():
            return f, a, fa, steps, True, nest
        if not fa.terms:
            if target is not None and fa.prec >= target:
                return f, a, fa, steps, True, nest
            raise PrecisionLoss(f"f(a) vanishes below the working precision {fa.prec}")
        v0, c0 = fa.terms[0]
        if target is not None and v0 >= target:
            return f, a, fa, steps, True, nest
        if steps >= budget.max_steps:
            return f, a, fa, steps, False, nest
        values = {mu: g.evaluate(a) for mu, g in taylor.items()}
        lines = [(mu, c.val()) for mu, c in values.items() if not c.is_zero()]
        if not lines:
            raise PreconditionFailed("f is constant")
        g0 = _crossing(lines, v0)
        coeffs = {}
        for mu, beta in lines:
            if beta + mu.to_rational() * g0 == v0:
                coeffs[mu] = values[mu].leading_coefficient / c0
        y, m = residue_root(field, coeffs, mode, budget.max_field_power)
        if m > 1:
            big, emb = field.extension(m)
            f = _embed_poly(f, emb, big)
            a = a.map_coefficients(emb, big)
            field = big
            taylor = {mu: g for mu, g in f.taylor().items() if not mu.is_zero()}
        nest.append(Ball(a, g0))
        a = a + HahnSeries.monomial(field, g0, y)
        steps += 1


def root_in_ball(
    f: DiffPoly,
    ball: Ball,
    mode: str = "symbolic",
    q: Optional[int] = None,
    budget: Optional[Budget] = None,
    target=None,
    strict: bool = False,
) -> Union[LiftReport, Certificate]:
    """Find a root of f in a closed ball, or certify that none exists.

    ``mode="specialized"`` substitutes sigma -> q everywhere first, so the
    returned root is a root of the specialized polynomial.  Without a
    ``target`` the descent runs for the step budget; an unfinished descent
    is reported with ``converged=False`` (or raised when ``strict``).
    """
    budget = budget or Budget()
    if mode not in ("symbolic", "specialized"):
        raise ValueError(f"unknown mode {mode!r}")
    f = _as_hahn_poly(f)
    if f.is_zero():
        raise PreconditionFailed("every point is a root of the zero polynomial")
    center = ball.center if ball.center is not None else HahnSeries.zero(f.ring.field)
    radius = ball.radius
    target = None if target is None else as_rational(target)
    if mode == "specialized":
        if q is None:
            raise PreconditionFailed("specialized mode needs q")
        f = f.specialize_sigma(q, coefficients=True)
        center = center.specialize(q)
        radius = SigmaRational(radius(q))
        target = None if target is None else SigmaRational(target(q))
    ball = Ball(center, radius, ball.closed)
    with term_budget(budget.max_terms):
        psi = herbrand(f, ball)
        if not strictly_increasing(psi):
            return Certificate(NO_ROOT, ball, psi)
        _, a, fa, steps, ok, nest = _descend(f, center, target, budget, mode)
        residual = INF if fa.is_zero() else _lower(fa)
        dist = _lower(a - _embed_series(center, a.field))
        report = LiftReport(a, residual, steps, dist, ok, tuple(nest), q if mode == "specialized" else None)
    if strict and not ok:
        raise BudgetExceeded(f"no root to the requested precision within {steps} steps", report)
    return report


def _embed_series(s: HahnSeries, big) -> HahnSeries:
    if s.field is big:
        return s
    _, emb = s.field.extension(big.n // s.field.n)
    return s.map_coefficients(emb, big)


def solve_additive(
    tau: DiffPoly,
    c,
    target=None,
    budget: Optional[Budget] = None,
    mode: str = "symbolic",
    q: Optional[int] = None,
    strict: bool = False,
) -> LiftReport:
    """Solve tau(x) = c for an additive difference polynomial tau.

    The Hensel regime v(c) > 2 v(tau'(0)) uses Newton's iteration (it needs a
    ``target``); otherwise the descent produces the partial sums.
    """
    budget = budget or Budget()
    tau = _as_hahn_poly(tau)
    if tau.is_constant() or not tau.is_additive():
        raise PreconditionFailed("tau must be a nonconstant additive difference polynomial")
    ring = tau.ring
    c = ring.coerce(c)
    if c.is_zero():
        raise PreconditionFailed("c must be nonzero")
    f = tau - DiffPoly.const(ring, c)
    target = None if target is None else as_rational(target)
    zero = HahnSeries.zero(ring.field)
    with term_budget(budget.max_terms):
        one = SigmaExponent.const(1)
        if set(tau.terms) == {one}:
            coef = tau.terms[one]
            if len(coef.terms) == 1 and coef.prec is None:
                root = c * coef.inverse()
            elif target is not None:
                root = c._mul(coef.inverse(target - c.val()), cap=target)
            else:
                raise PreconditionFailed("dividing by a non-monomial needs a target precision")
            fr = f.evaluate(root)
            return LiftReport(root, INF if fr.is_zero() else _lower(fr), 1, root.val())
        d = tau.terms.get(one)
        if mode == "symbolic" and d is not None and target is not None and c.val() > d.val() * 2:
            b, fb, steps, ok = _newton_loop(f, zero, target, budget)
            report = LiftReport(b, INF if fb.is_zero() else _lower(fb), steps, _lower(b), ok)
        else:
            g0 = max(r for r in _finite(newton_polygon(f)))
            report = root_in_ball(f, Ball(None, g0), mode, q, budget, target)
            if isinstance(report, Certificate):  # pragma: no cover - additive equations always have roots
                raise PreconditionFailed("no root in the expected ball")
            ok = report.converged
    if strict and not ok:
        raise BudgetExceeded("additive equation not solved to the requested precision", report)
    return report


def _finite(poly) -> List[SigmaRational]:
    return [-s for s in poly.slopes]


def root_distances(tau: DiffPoly, q: int, m: int = 1, c=None, budget: Optional[Budget] = None) -> List[SigmaRational]:
    """Valuations v(a - b) between distinct roots of tau(x) = c over F_{q^m}-series.

    By additivity these are the valuations of nonzero kernel elements of the
    specialized polynomial; each one is a finite tropical root whose edge
    equation has a nonzero solution in the residue field.
    """
    budget = budget or Budget()
    tau = _as_hahn_poly(tau)
    if tau.is_constant() or not tau.is_additive():
        raise PreconditionFailed("tau must be a nonconstant additive difference polynomial")
    field = tau.ring.field
    if not getattr(field, "is_finite", False):
        raise PreconditionFailed("root distances are computed over finite residue fields")
    if c is not None:
        tau.ring.coerce(c)
    tq = tau.specialize_sigma(q, coefficients=True)
    if field.q ** m > MAX_FIELD_SIZE:
        raise BudgetExceeded(f"search field F_{field.q}^{m} is too large")
    big, emb = field.extension(m)
    poly = newton_polygon(tq)
    lines = [(mu, beta) for beta, mu in poly.points]
    out = set()
    for s in poly.slopes:
        budget.check()
        gamma = -s
        vals = {mu: beta + mu.to_rational() * gamma for mu, beta in lines}
        low = min(vals.values())
        edge = {mu: emb(tq.terms[mu].leading_coefficient) for mu, v in vals.items() if v == low}
        for y in big.nonzero_elements():
            total = big.zero
            for mu, r in edge.items():
                total = total + r * ring_power(big, y, mu)
            if not total:
                out.add(gamma)
                break
    return sorted(out)
