"""Value groups Q(sigma)^d under the lexicographic order, and their ideals.

Coordinate 0 is the most significant one.  The convex sigma-invariant
subgroups are the tails {0}^k x Q(sigma)^(d-k); ``convex_level`` names the
smallest one that contains a given vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

from .sigma import INF, SigmaPoly, SigmaRational, as_rational


class GammaVector:
    """A point of Q(sigma)^d, ordered lexicographically."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        cs = tuple(as_rational(c) for c in coords)
        if not cs:
            raise ValueError("a value-group vector needs at least one coordinate")
        self.coords: Tuple[SigmaRational, ...] = cs

    @classmethod
    def zero(cls, d: int) -> "GammaVector":
        return cls([0] * d)

    @property
    def d(self) -> int:
        return len(self.coords)

    def _check(self, other: "GammaVector"):
        if not isinstance(other, GammaVector):
            raise TypeError("expected a GammaVector")
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")

    def sign(self) -> int:
        for c in self.coords:
            s = c.sign()
            if s:
                return s
        return 0

    def is_zero(self) -> bool:
        return self.sign() == 0

    def __add__(self, other):
        self._check(other)
        return GammaVector(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return GammaVector(-a for a in self.coords)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "GammaVector":
        k = as_rational(k)
        return GammaVector(k * a for a in self.coords)

    def sigma_map(self, n: int = 1) -> "GammaVector":
        return self.scale(SigmaRational.sigma(n))

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        if not isinstance(other, GammaVector):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        return "GammaVector(" + ", ".join(str(c) for c in self.coords) + ")"

    def to_json(self) -> dict:
        return {"d": self.d, "coords": [c.to_json() for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> "GammaVector":
        from .cli.parser import parse_sigma_rational

        coords = [parse_sigma_rational(f"({c['num']})/({c['den']})") for c in data["coords"]]
        if len(coords) != data["d"]:
            raise ValueError("coordinate count does not match d")
        return cls(coords)


def convex_level(g: GammaVector) -> int:
    """Index of the leading nonzero coordinate; ``d`` for the zero vector."""
    for i, c in enumerate(g.coords):
        if not c.is_zero():
            return i
    return g.d


@dataclass(frozen=True)
class PositivePart:
    """Elements strictly above the convex subgroup of level ``d - k``.

    ``k = 0`` gives all strictly positive elements.
    """

    level: int


@dataclass(frozen=True)
class RadicalPrincipal:
    """Union over n of [p^(-n) gamma, inf]."""

    gamma: GammaVector

    def __post_init__(self):
        if self.gamma.sign() <= 0:
            raise ValueError("a radical principal ideal needs a positive generator")


@dataclass(frozen=True)
class Everything:
    """All of Gamma_{>=0} together with infinity."""


@dataclass(frozen=True)
class PointAtInfinity:
    """The ideal {inf}."""


GammaIdeal = Union[PositivePart, RadicalPrincipal, Everything, PointAtInfinity]


def _check_level(ideal: PositivePart, d: int):
    if not 0 <= ideal.level <= d - 1:
        raise ValueError(f"level {ideal.level} out of range for d={d}")


def contains(ideal: GammaIdeal, g, d: Optional[int] = None) -> bool:
    """Membership of a vector (or INF) in an ideal of Gamma_inf."""
    if g is INF:
        return True
    if g.sign() < 0:
        return False
    if isinstance(ideal, Everything):
        return True
    if isinstance(ideal, PointAtInfinity):
        return False
    if isinstance(ideal, PositivePart):
        d = g.d if d is None else d
        _check_level(ideal, d)
        # strictly above the subgroup of vectors with convex level >= d - k
        return g.sign() > 0 and convex_level(g) < d - ideal.level
    if isinstance(ideal, RadicalPrincipal):
        # g >= p^-n gamma for some n iff g and gamma share the leading level
        # and g is positive, or g sits at a strictly coarser level
        if g.sign() <= 0:
            return False
        lg, lr = convex_level(g), convex_level(ideal.gamma)
        if lg != lr:
            return lg < lr
        a, b = g.coords[lg], ideal.gamma.coords[lr]
        # a >= b / p^n for some n: true iff a has the same sigma-degree
        # magnitude or bigger
        return _dominates_some_root(a, b)
    raise TypeError(f"unknown ideal kind {ideal!r}")


def _dominates_some_root(a: SigmaRational, b: SigmaRational) -> bool:
    # b / p^n decreases to 0 within the archimedean class of b; it is eventually
    # below a iff deg(a) >= deg(b) (both positive)
    return a.degree >= b.degree


def is_transformally_prime(ideal: GammaIdeal, d: int = 1) -> bool:
    """0 not in I, and sigma(alpha) in I forces alpha in I."""
    if isinstance(ideal, Everything):
        return False
    if isinstance(ideal, PointAtInfinity):
        return True
    if isinstance(ideal, PositivePart):
        _check_level(ideal, d)
        return True
    if isinstance(ideal, RadicalPrincipal):
        return False
    raise TypeError(f"unknown ideal kind {ideal!r}")


FULL = "full"
LATTICE = "lattice"


def divisible_defect(kind: str, nu, p: Optional[int] = None) -> bool:
    """Whether multiplication by nu is onto the declared group kind.

    ``kind`` is ``"full"`` for Q(sigma)^d or ``"lattice"`` for
    Z[sigma^(+-1), p^(+-1)]^d.  On the lattice exactly the units
    +-sigma^a p^b are onto.  Without ``p`` any single prime is accepted.
    """
    if isinstance(nu, SigmaPoly):
        poly = nu
    else:
        r = as_rational(nu)
        if r.den.coeffs != (1,):
            raise ValueError("nu must be a polynomial in sigma")
        poly = r.num
    if not poly:
        raise ValueError("nu must be nonzero")
    if kind == FULL:
        return True
    if kind != LATTICE:
        raise ValueError(f"unknown group kind {kind!r}")
    nonzero = [c for c in poly.coeffs if c]
    if len(nonzero) != 1:
        return False
    c = abs(nonzero[0])
    if c == 1:
        return True
    if p is None:
        p = next(q for q in range(2, c + 1) if c % q == 0)
    if p < 2:
        return False
    while c % p == 0:
        c //= p
    return c == 1
