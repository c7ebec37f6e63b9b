"""Min-plus layer: Newton polygons, tropical roots and Herbrand functions.

Everything is exact.  A *line* is a pair (mu, beta) standing for the
transformally affine map lambda -> beta + mu*lambda, with mu in N[sigma]
and beta in Q(sigma).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .diffpoly import DiffPoly
from .errors import LimitNotRational, PrecisionLoss, PreconditionFailed
from .hahn import UNKNOWN, HahnSeries
from .sigma import (
    EXP_ZERO,
    INF,
    ZERO,
    SigmaExponent,
    SigmaRational,
    as_rational,
    injectivity_threshold,
    sign_threshold,
)

Line = Tuple[SigmaExponent, SigmaRational]


def coeff_valuation(c):
    """Valuation of a coefficient; constants of a bare field have valuation 0."""
    if isinstance(c, HahnSeries):
        v = c.valuation()
        if v is UNKNOWN:
            raise PrecisionLoss(f"coefficient {c} has no known valuation")
        return v
    return INF if not c else ZERO


@dataclass(frozen=True)
class Ball:
    """Closed (or open) ball {x : v(x - center) >= radius}; ``center=None`` means 0."""

    center: Optional[HahnSeries]
    radius: SigmaRational
    closed: bool = True

    def __post_init__(self):
        if self.radius is not INF:
            object.__setattr__(self, "radius", as_rational(self.radius))

    def contains(self, a: HahnSeries) -> bool:
        d = a if self.center is None else a - self.center
        v = d._val_lower()
        return v >= self.radius if self.closed else v > self.radius


def taylor_lines(f: DiffPoly, center=None, include_constant: bool = True) -> List[Line]:
    """Lines (mu, v(f_mu(center))) with finite valuation."""
    if f.is_zero():
        raise PreconditionFailed("the zero polynomial has no lines")
    if center is None or (isinstance(center, HahnSeries) and center.is_zero()):
        coeffs = f.terms
    else:
        coeffs = {mu: fm.evaluate(center) for mu, fm in f.taylor().items()}
    out = []
    for mu, c in coeffs.items():
        if mu.is_zero() and not include_constant:
            continue
        if isinstance(c, HahnSeries) and not c.terms and c.prec is not None:
            if mu.is_zero():
                raise PrecisionLoss("f(center) vanishes to working precision; pass assume_root")
            raise PrecisionLoss(f"f_{mu}(center) vanishes to working precision")
        v = coeff_valuation(c)
        if v is not INF:
            out.append((mu, v))
    return sorted(out, key=lambda ln: ln[0])


def _rat(mu: SigmaExponent) -> SigmaRational:
    return mu.to_rational()


def generic_value(f: DiffPoly, b: Ball) -> SigmaRational:
    """v(f) at the generic point of the ball: min over mu of beta_mu + mu*radius."""
    lines = taylor_lines(f, b.center)
    return min(beta + _rat(mu) * b.radius for mu, beta in lines)


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex boundary of the points (beta_mu, mu).

    ``hull`` lists vertices by increasing mu; ``slopes[k]`` is
    d(beta)/d(mu) along the k-th edge, strictly increasing.
    """

    points: Tuple[Tuple[SigmaRational, SigmaExponent], ...]
    hull: Tuple[Tuple[SigmaRational, SigmaExponent], ...]
    slopes: Tuple[SigmaRational, ...]

    def to_json(self) -> dict:
        def pt(b, m):
            return {"beta": b.to_json(), "mu": m.to_json()}

        return {
            "points": [pt(b, m) for b, m in self.points],
            "hull": [pt(b, m) for b, m in self.hull],
            "slopes": [s.to_json() for s in self.slopes],
        }


def _cross(o, a, b) -> SigmaRational:
    # points are (mu, beta) in Q(sigma)^2
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[Tuple[SigmaRational, SigmaRational]]):
    """Monotone-chain lower hull of (x, y) points with distinct x, exact."""
    pts = sorted(points, key=lambda pt: _SortKey(pt[0]))
    hull: List = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt).sign() <= 0:
            hull.pop()
        hull.append(pt)
    return hull


class _SortKey:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v


def newton_polygon(f: DiffPoly) -> NewtonPolygon:
    lines = taylor_lines(f)
    byrat = {_rat(mu): (mu, beta) for mu, beta in lines}
    hull = lower_hull([(_rat(mu), beta) for mu, beta in lines])
    slopes = tuple((b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(hull, hull[1:]))
    return NewtonPolygon(
        points=tuple((beta, mu) for mu, beta in lines),
        hull=tuple((byrat[x][1], byrat[x][0]) for x, _ in hull),
        slopes=slopes,
    )


def tropical_roots(f: DiffPoly) -> List:
    """Values gamma at which two terms tie for min(beta_k + k*gamma); INF if f(0) = 0.

    Sorted increasingly, INF last.
    """
    if f.is_constant():
        raise PreconditionFailed("tropical roots of a constant polynomial")
    roots = sorted({-s for s in newton_polygon(f).slopes}, key=_SortKey)
    if f.constant_term == f.ring.zero:
        roots.append(INF)
    return roots


# ---------------------------------------------------------------------------
# piecewise transformally affine functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    start: Optional[SigmaRational]  # None = -inf
    end: Optional[SigmaRational]  # None = +inf
    slope: SigmaExponent
    intercept: SigmaRational

    def __call__(self, lam) -> SigmaRational:
        return self.intercept + _rat(self.slope) * as_rational(lam)

    def to_json(self) -> dict:
        return {
            "from": None if self.start is None else self.start.to_json(),
            "to": None if self.end is None else self.end.to_json(),
            "slope": self.slope.to_json(),
            "intercept": self.intercept.to_json(),
        }


@dataclass(frozen=True)
class PiecewiseTA:
    """Continuous concave function on (-inf, domain_end), stored piece by piece."""

    pieces: Tuple[Piece, ...]
    domain_end: object = INF
    closed: bool = False
    lines: Tuple[Line, ...] = field(default=(), compare=False)

    def __call__(self, lam):
        lam = as_rational(lam)
        if self.domain_end is not INF and (lam > self.domain_end or (lam == self.domain_end and not self.closed)):
            raise ValueError(f"{lam} lies outside the domain")
        for pc in self.pieces:
            if pc.end is None or lam <= pc.end:
                return pc(lam)
        return self.pieces[-1](lam)

    def slopes(self) -> List[SigmaExponent]:
        return [pc.slope for pc in self.pieces]

    def breakpoints(self) -> List[SigmaRational]:
        return [pc.end for pc in self.pieces[:-1]]

    def is_continuous(self) -> bool:
        return all(a(a.end) == b(a.end) for a, b in zip(self.pieces, self.pieces[1:]))

    def is_concave(self) -> bool:
        return all(a.slope > b.slope for a, b in zip(self.pieces, self.pieces[1:]))

    def is_nondecreasing(self) -> bool:
        return all(pc.slope >= EXP_ZERO for pc in self.pieces)

    def to_json(self) -> dict:
        return {
            "domainEnd": None if self.domain_end is INF else self.domain_end.to_json(),
            "closed": self.closed,
            "pieces": [pc.to_json() for pc in self.pieces],
        }

    def table(self) -> List[Tuple[str, str, str, str]]:
        rows = []
        for pc in self.pieces:
            rows.append(
                (
                    "-inf" if pc.start is None else str(pc.start),
                    "+inf" if pc.end is None else str(pc.end),
                    str(pc.slope),
                    str(pc.intercept),
                )
            )
        return rows


def lower_envelope(lines: Iterable[Line], domain_end=INF, closed: bool = False) -> PiecewiseTA:
    """Canonical pieces of lambda -> min(beta + mu*lambda) on (-inf, domain_end)."""
    best: Dict[SigmaExponent, SigmaRational] = {}
    for mu, beta in lines:
        if mu not in best or beta < best[mu]:
            best[mu] = beta
    if not best:
        raise PreconditionFailed("no lines to take the minimum of")
    # steepest first: it wins as lambda -> -inf
    ordered = sorted(best.items(), key=lambda ln: ln[0], reverse=True)

    def meet(l1, l2):
        return (l2[1] - l1[1]) / (_rat(l1[0]) - _rat(l2[0]))

    stack: List[Line] = []
    for ln in ordered:
        while stack:
            top = stack[-1]
            # the new line has a smaller slope; it is useless if it never dips below
            if len(stack) == 1:
                break
            if meet(stack[-2], ln) <= meet(stack[-2], top):
                stack.pop()
            else:
                break
        stack.append(ln)
    # a line with smaller slope but larger-or-equal value everywhere left of the
    # previous meet is also handled by the pop rule above
    pieces: List[Piece] = []
    start = None
    for i, ln in enumerate(stack):
        end = meet(ln, stack[i + 1]) if i + 1 < len(stack) else None
        pieces.append(Piece(start, end, ln[0], ln[1]))
        start = end
    if domain_end is not INF:
        domain_end = as_rational(domain_end)
        kept = []
        for pc in pieces:
            if pc.start is not None and pc.start >= domain_end:
                break
            kept.append(pc)
        last = kept[-1]
        kept[-1] = Piece(last.start, None, last.slope, last.intercept)
        pieces = kept
    return PiecewiseTA(tuple(pieces), domain_end, closed, tuple(best.items()))


def herbrand(f: DiffPoly, above: Union[Ball, HahnSeries, None] = None, assume_root: bool = False) -> PiecewiseTA:
    """Transformal Herbrand function of f above a ball (or a point).

    For a ball of radius r the domain is lambda < r.  ``assume_root`` treats
    the center as an exact root and drops the constant line.
    """
    if isinstance(above, Ball):
        center, end, closed = above.center, above.radius, above.closed
    else:
        center, end, closed = above, INF, False
    lines = taylor_lines(f, center, include_constant=not assume_root)
    if not lines:
        raise PreconditionFailed("the Herbrand function of a constant at a root is undefined")
    return lower_envelope(lines, end, closed)


def singular_points(psi: PiecewiseTA) -> List[SigmaRational]:
    return psi.breakpoints()


def strictly_increasing(psi: PiecewiseTA) -> bool:
    return all(not pc.slope.is_zero() for pc in psi.pieces)


# ---------------------------------------------------------------------------
# dominant exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dominance:
    rho: SigmaExponent
    dominant: Tuple[SigmaExponent, ...]
    g: DiffPoly
    betas: Tuple[Line, ...]

    def __iter__(self):
        return iter((self.rho, set(self.dominant), self.g))


def dominance_analysis(f: DiffPoly, a_n: HahnSeries, radii) -> Dominance:
    """Dominant exponent and truncation of f along a nest with rational limit.

    ``radii`` is ``(prefix, limit)``; the prefix must increase strictly and
    stay below the limit.  I' collects the nonconstant Taylor lines attaining
    the minimum at the limit; rho is the steepest of them.
    """
    prefix, limit = radii
    if limit is None or limit is INF:
        raise LimitNotRational("the radii need an exact limit in Q(sigma)")
    limit = as_rational(limit)
    prefix = [as_rational(r) for r in prefix]
    if any(b <= a for a, b in zip(prefix, prefix[1:])) or any(r >= limit for r in prefix):
        raise PreconditionFailed("radii must increase strictly towards the limit")
    taylor = f.taylor()
    values = {mu: fm.evaluate(a_n) for mu, fm in taylor.items()}
    lines = []
    for mu, c in values.items():
        if mu.is_zero():
            continue
        v = coeff_valuation(c)
        if v is not INF:
            lines.append((mu, v))
    if not lines:
        raise PreconditionFailed("f has no nonconstant Taylor terms")
    at = {mu: beta + _rat(mu) * limit for mu, beta in lines}
    m = min(at.values())
    dominant = tuple(sorted(mu for mu, val in at.items() if val == m))
    rho = dominant[-1]
    ring = f.ring
    x = DiffPoly.x(ring)
    shift = x - DiffPoly.const(ring, a_n)
    g = DiffPoly.const(ring, values.get(EXP_ZERO, ring.zero))
    for mu in dominant:
        g = g + shift.pow_exp(mu) * values[mu]
    return Dominance(rho, dominant, g, tuple(sorted(lines, key=lambda ln: ln[0])))


# ---------------------------------------------------------------------------
# specialization
# ---------------------------------------------------------------------------

def specialization_threshold(f: DiffPoly) -> int:
    """Least q0 beyond which sigma -> q preserves the Newton polygon of f.

    Covers injectivity and order of the support, the leading exponent of every
    coefficient, and the sign of every orientation test in the hull.
    """
    lines = taylor_lines(f)
    q0 = max(2, injectivity_threshold(f.terms))
    mus = [_rat(mu) for mu, _ in lines]
    for a, b in combinations(mus, 2):
        q0 = max(q0, sign_threshold(a - b))
    for c in f.terms.values():
        if isinstance(c, HahnSeries):
            for e in c.support()[1:]:
                q0 = max(q0, sign_threshold(e - c.terms[0][0]))
            if c.prec is not None and c.terms:
                q0 = max(q0, sign_threshold(c.prec - c.terms[0][0]))
    pts = [(_rat(mu), beta) for mu, beta in lines]
    for o, a, b in combinations(pts, 3):
        q0 = max(q0, sign_threshold(_cross(o, a, b)))
    return q0
