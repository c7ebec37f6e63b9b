"""Difference polynomials in one variable.

A difference polynomial is a finitely supported map from exponents
``nu`` in N[sigma] to coefficients; ``x^nu`` means
``prod_i sigma^i(x)^(nu_i)``.  The coefficient ring is any object with the
small interface shared by :class:`~transval.fields.FiniteField`,
:data:`~transval.fields.QQ` and :class:`~transval.hahn.HahnRing`:
``p``, ``zero``, ``one``, ``coerce``, ``sigma``, ``frob``, ``is_zero``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import MixedCoefficientRings, NonUnitScale, SupportCollision, ZeroPolynomial
from .sigma import (
    EXP_ONE,
    EXP_ZERO,
    SigmaExponent,
    binom_mod_p,
    dominated_exponents,
    injectivity_threshold,
)


def _as_exp(nu) -> SigmaExponent:
    if isinstance(nu, SigmaExponent):
        return nu
    if isinstance(nu, (int, Fraction)):
        return SigmaExponent.const(nu)
    if isinstance(nu, Mapping):
        return SigmaExponent(nu)
    raise TypeError(f"cannot use {type(nu).__name__} as an exponent")


def ring_power(ring, a, nu: SigmaExponent):
    """a^nu inside ``ring``, using its sigma and Frobenius actions."""
    out = ring.one
    for i, c in nu.entries:
        b = ring.sigma(a, i) if i else a
        k = c.denominator
        if k > 1:
            m = 0
            while k > 1:
                k //= ring.p
                m += 1
            b = ring.frob(b, -m)
        out = out * (b ** c.numerator)
    return out


class DiffPoly:
    """sum c_nu x^nu over a coefficient ring.

    >>> from transval.fields import GF
    >>> F = GF(2)
    >>> x = DiffPoly.x(F)
    >>> str(x.sigma_map(1) - x)
    'x^(s) + x'
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms: Optional[Mapping] = None):
        self.ring = ring
        acc: Dict[SigmaExponent, object] = {}
        for nu, c in (terms or {}).items():
            nu = _as_exp(nu)
            c = ring.coerce(c)
            acc[nu] = acc[nu] + c if nu in acc else c
        self.terms: Dict[SigmaExponent, object] = {
            nu: c for nu, c in acc.items() if not ring.is_zero(c)
        }

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = {nu: c for nu, c in terms.items() if not ring.is_zero(c)}
        return obj

    @classmethod
    def x(cls, ring) -> "DiffPoly":
        return cls._raw(ring, {EXP_ONE: ring.one})

    @classmethod
    def const(cls, ring, c) -> "DiffPoly":
        return cls._raw(ring, {EXP_ZERO: ring.coerce(c)})

    @classmethod
    def monomial(cls, ring, nu, c=None) -> "DiffPoly":
        return cls._raw(ring, {_as_exp(nu): ring.one if c is None else ring.coerce(c)})

    # -- inspection -------------------------------------------------------------
    @property
    def p(self) -> int:
        return self.ring.p

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(nu.is_zero() for nu in self.terms)

    @property
    def degree(self) -> SigmaExponent:
        if not self.terms:
            raise ZeroPolynomial("the zero polynomial has no degree")
        return max(self.terms)

    def support(self) -> List[SigmaExponent]:
        return sorted(self.terms)

    def coefficient(self, nu):
        return self.terms.get(_as_exp(nu), self.ring.zero)

    @property
    def constant_term(self):
        return self.coefficient(EXP_ZERO)

    def is_additive(self) -> bool:
        """All exponents are transformal p-th powers (no constant term)."""
        return bool(self.terms) and all(nu.is_transformal_pth_power(self.p) for nu in self.terms)

    def is_algebraic(self) -> bool:
        return all(nu.is_natural() for nu in self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic --------------------------------------------------------------
    def _co(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            if other.ring is not self.ring:
                raise MixedCoefficientRings(f"{self.ring} vs {other.ring}")
            return other
        return DiffPoly.const(self.ring, other)

    def __add__(self, other):
        o = self._co(other)
        acc = dict(self.terms)
        for nu, c in o.terms.items():
            acc[nu] = acc[nu] + c if nu in acc else c
        return DiffPoly._raw(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw(self.ring, {nu: -c for nu, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        acc: Dict[SigmaExponent, object] = {}
        for nu, c in self.terms.items():
            for mu, d in o.terms.items():
                k = nu + mu
                e = c * d
                acc[k] = acc[k] + e if k in acc else e
        return DiffPoly._raw(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPoly":
        if n < 0:
            raise ValueError("negative powers of difference polynomials")
        out = DiffPoly.const(self.ring, self.ring.one)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def sigma_map(self, n: int = 1) -> "DiffPoly":
        """sigma^n applied to the whole polynomial (exponents and coefficients)."""
        ring = self.ring
        return DiffPoly._raw(ring, {nu.shift(n): ring.sigma(c, n) for nu, c in self.terms.items()})

    def frobenius(self, m: int = 1) -> "DiffPoly":
        """Raise the whole polynomial to the p^m-th power (m < 0: p-th roots)."""
        ring = self.ring
        if ring.p == 1 or m == 0:
            return self
        scale = Fraction(ring.p) ** m
        return DiffPoly._raw(ring, {nu * scale: ring.frob(c, m) for nu, c in self.terms.items()})

    def pow_exp(self, nu) -> "DiffPoly":
        """self^nu for an exponent nu in N[sigma] (with p-power denominators)."""
        nu = _as_exp(nu)
        out = DiffPoly.const(self.ring, self.ring.one)
        for i, c in nu.entries:
            b = self.sigma_map(i)
            k = c.denominator
            if k > 1:
                m = 0
                while k > 1:
                    k //= self.p
                    m += 1
                b = b.frobenius(-m)
            out = out * (b ** c.numerator)
        return out

    # -- calculus ------------------------------------------------------------------
    def taylor(self) -> Dict[SigmaExponent, "DiffPoly"]:
        """All transformal derivatives: f(x + e) = sum_mu f_mu(x) e^mu."""
        p = self.p
        acc: Dict[SigmaExponent, Dict[SigmaExponent, object]] = {}
        for nu, c in self.terms.items():
            for mu in dominated_exponents(nu, p):
                b = binom_mod_p(nu, mu, p)
                if not b:
                    continue
                slot = acc.setdefault(mu, {})
                rest = nu - mu
                term = c * b if b != 1 else c
                slot[rest] = slot[rest] + term if rest in slot else term
        out = {}
        for mu, terms in acc.items():
            g = DiffPoly._raw(self.ring, terms)
            if g:
                out[mu] = g
        return out

    def derivative(self) -> "DiffPoly":
        """The first transformal derivative f_1."""
        return self.taylor().get(EXP_ONE, DiffPoly(self.ring))

    def evaluate(self, a):
        """Substitute x = a, computing a^nu through sigma and Frobenius."""
        ring = self.ring
        a = ring.coerce(a)
        total = ring.zero
        cache: Dict[SigmaExponent, object] = {}
        for nu, c in self.terms.items():
            if nu.is_zero():
                total = total + c
                continue
            if nu not in cache:
                cache[nu] = ring_power(ring, a, nu)
            total = total + c * cache[nu]
        return total

    __call__ = evaluate

    def rescale(self, t) -> "DiffPoly":
        """g(x) = f(t x): c_nu x^nu -> c_nu t^nu x^nu."""
        ring = self.ring
        t = ring.coerce(t)
        if ring.is_zero(t):
            raise NonUnitScale("cannot rescale by zero")
        try:
            return DiffPoly._raw(
                ring, {nu: c * ring_power(ring, t, nu) for nu, c in self.terms.items()}
            )
        except (ZeroDivisionError, ValueError) as exc:
            raise NonUnitScale(f"t^nu undefined: {exc}") from exc

    def translate(self, a) -> "DiffPoly":
        """g(x) = f(x + a) = sum_nu f_nu(a) x^nu."""
        ring = self.ring
        a = ring.coerce(a)
        if ring.is_zero(a):
            return self
        return DiffPoly._raw(ring, {nu: fn.evaluate(a) for nu, fn in self.taylor().items()})

    def twist_normalize(self) -> Tuple["DiffPoly", int, int]:
        """Untwist until some exponent has a constant term prime to p.

        Returns (g, s, m) with f = sigma^s applied to the p^m-th power of g,
        so f and g share their roots, and g' != 0 for nonconstant g.
        """
        if not self.terms:
            raise ZeroPolynomial("twist of the zero polynomial")
        g, s, m = self, 0, 0
        p = self.p
        while True:
            nonzero = [nu for nu in g.terms if not nu.is_zero()]
            if not nonzero:
                return g, s, m
            if all(nu.constant_term == 0 for nu in nonzero):
                g = g.sigma_map(-1)
                s += 1
                continue
            if p > 1 and all(
                nu.constant_term.denominator == 1 and int(nu.constant_term) % p == 0 for nu in nonzero
            ):
                g = g.frobenius(-1)
                m += 1
                continue
            return g, s, m

    def specialize_sigma(self, q: int, coefficients: bool = False) -> "DiffPoly":
        """Ordinary polynomial obtained from sigma -> q on the exponents.

        With ``coefficients=True`` Hahn-series coefficients are specialized too.
        """
        if q < injectivity_threshold(self.terms):
            raise SupportCollision(f"sigma -> {q} is not injective on the support of {self}")
        acc = {}
        for nu, c in self.terms.items():
            k = SigmaExponent.const(nu.specialize(q))
            if k in acc:
                raise SupportCollision(f"exponents collide at sigma = {q}")
            acc[k] = c.specialize(q) if coefficients else c
        if coefficients:
            from .hahn import HahnRing

            field = next(iter(acc.values())).field if acc else self.ring.field
            return DiffPoly._raw(HahnRing.of(field), acc)
        return DiffPoly._raw(self.ring, acc)

    def map_coefficients(self, fn, ring) -> "DiffPoly":
        return DiffPoly._raw(ring, {nu: fn(c) for nu, c in self.terms.items()})

    # -- display -------------------------------------------------------------------
    def __repr__(self):
        return f"DiffPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for nu in sorted(self.terms, reverse=True):
            c = self.terms[nu]
            cs = _render_coeff(self.ring, c)
            neg = False
            if cs.startswith("-") and _is_atomic(cs[1:]):
                neg, cs = True, cs[1:]
            elif not _is_atomic(cs):
                cs = f"({cs})"
            if nu.is_zero():
                body = cs
            else:
                mono = _render_monomial(nu)
                body = mono if cs == "1" else f"{cs}*{mono}"
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {
            "terms": [
                {"exp": nu.to_json(), "coeff": _render_coeff(self.ring, self.terms[nu])}
                for nu in sorted(self.terms, reverse=True)
            ]
        }


def _render_coeff(ring, c) -> str:
    field = getattr(ring, "field", None)
    if field is not None:
        return str(c)
    return ring.render(c)


def _is_atomic(s: str) -> bool:
    depth = 0
    for i, ch in enumerate(s):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif depth == 0 and ch in "+-" and i > 0 and s[i - 1] == " ":
            return False
    return True


def _render_monomial(nu: SigmaExponent) -> str:
    if nu.is_natural():
        n = int(nu.constant_term)
        return "x" if n == 1 else f"x^{n}"
    return f"x^({nu})"
