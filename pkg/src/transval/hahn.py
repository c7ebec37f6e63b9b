"""Truncated Hahn series k((t^Gamma)) with exponents in Q(sigma).

A series is a finite sorted list of terms ``c * t^gamma`` plus a precision
bound: ``O(t^prec)`` stands for an unknown tail with every exponent
``>= prec``.  ``prec is None`` means the series is exact.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple, Union

from .errors import (
    BudgetExceeded,
    CharacteristicOne,
    DivisionByZero,
    MixedCoefficientRings,
    NonNegativeValuation,
    PrecisionLoss,
)
from .fields import FFElem, FiniteField, RationalField
from .sigma import INF, MAX_P_DEPTH, ONE, ZERO, SigmaExponent, SigmaRational, as_rational

Field = Union[FiniteField, RationalField]

_max_terms: contextvars.ContextVar[int] = contextvars.ContextVar("transval_max_terms", default=4096)


@contextmanager
def term_budget(n: int):
    """Temporarily change the maximal support length of a series."""
    token = _max_terms.set(n)
    try:
        yield
    finally:
        _max_terms.reset(token)


class _Unknown:
    """Valuation of a series that is zero up to its precision."""

    def __repr__(self):
        return "UNKNOWN"


UNKNOWN = _Unknown()


def _p_depth_ok(e: SigmaRational, p: int) -> bool:
    content = 0
    for c in e.den.coeffs:
        content = gcd(content, c)
    k = 0
    while content % p == 0:
        content //= p
        k += 1
    return k <= MAX_P_DEPTH


class HahnSeries:
    """Element of k((t^Gamma)) truncated at ``prec``.

    >>> from transval.fields import GF
    >>> t = HahnSeries.t(GF(2))
    >>> (t * t.inverse()) == HahnSeries.one(GF(2))
    True
    """

    __slots__ = ("field", "terms", "prec")

    def __init__(self, field: Field, terms=(), prec=None):
        self.field = field
        if prec is not None and prec is not INF:
            prec = as_rational(prec)
        else:
            prec = None
        acc: Dict[SigmaRational, object] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for e, c in items:
            e = as_rational(e)
            c = field.coerce(c)
            if e in acc:
                acc[e] = acc[e] + c
            else:
                acc[e] = c
        ts = [(e, c) for e, c in acc.items() if c and (prec is None or e < prec)]
        ts.sort(key=_key)
        if len(ts) > _max_terms.get():
            raise BudgetExceeded(f"series support exceeds {_max_terms.get()} terms")
        self.terms: Tuple[Tuple[SigmaRational, object], ...] = tuple(ts)
        self.prec: Optional[SigmaRational] = prec

    @classmethod
    def _from_sorted(cls, field, terms, prec):
        obj = cls.__new__(cls)
        obj.field = field
        obj.terms = tuple(terms)
        obj.prec = prec
        if len(obj.terms) > _max_terms.get():
            raise BudgetExceeded(f"series support exceeds {_max_terms.get()} terms")
        return obj

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, field: Field, prec=None) -> "HahnSeries":
        return cls(field, (), prec)

    @classmethod
    def one(cls, field: Field) -> "HahnSeries":
        return cls._from_sorted(field, ((ZERO, field.one),), None)

    @classmethod
    def const(cls, field: Field, c) -> "HahnSeries":
        return cls(field, [(ZERO, c)])

    @classmethod
    def monomial(cls, field: Field, exponent, coeff=1) -> "HahnSeries":
        return cls(field, [(exponent, coeff)])

    @classmethod
    def t(cls, field: Field) -> "HahnSeries":
        return cls.monomial(field, ONE)

    @property
    def ring(self) -> "HahnRing":
        return HahnRing.of(self.field)

    # -- inspection -----------------------------------------------------------
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True only for the exact zero series."""
        return not self.terms and self.prec is None

    def __bool__(self):
        return not self.is_zero()

    def valuation(self):
        """Least exponent; INF for exact zero; UNKNOWN when zero up to precision."""
        if self.terms:
            return self.terms[0][0]
        return INF if self.prec is None else UNKNOWN

    def val(self):
        """Like :meth:`valuation` but raises PrecisionLoss instead of UNKNOWN."""
        v = self.valuation()
        if v is UNKNOWN:
            raise PrecisionLoss(f"series O(t^({self.prec})) has no known valuation")
        return v

    def _val_lower(self):
        if self.terms:
            return self.terms[0][0]
        return INF if self.prec is None else self.prec

    def leading_term(self) -> Tuple[SigmaRational, object]:
        if not self.terms:
            raise PrecisionLoss("series has no known leading term")
        return self.terms[0]

    @property
    def leading_coefficient(self):
        return self.leading_term()[1]

    def coefficient(self, exponent):
        e = as_rational(exponent)
        if self.prec is not None and e >= self.prec:
            raise PrecisionLoss(f"coefficient of t^({e}) beyond precision {self.prec}")
        for x, c in self.terms:
            if x == e:
                return c
        return self.field.zero

    def residue(self):
        """Residue class of an integral series."""
        v = self.val()
        if v is not INF and v < 0:
            raise ValueError("residue of a non-integral series")
        return self.coefficient(ZERO)

    def support(self) -> List[SigmaRational]:
        return [e for e, _ in self.terms]

    def __len__(self):
        return len(self.terms)

    # -- comparison -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, HahnSeries):
            try:
                other = self.ring.coerce(other)
            except (TypeError, MixedCoefficientRings):
                return NotImplemented
        if other.field is not self.field:
            return False
        return self.terms == other.terms and self.prec == other.prec

    def __hash__(self):
        return hash((self.terms, self.prec))

    def agrees_with(self, other: "HahnSeries", prec=None) -> bool:
        """Equality of both series below a common precision window."""
        bound = _min_prec(self.prec, other.prec)
        if prec is not None:
            bound = _min_prec(bound, as_rational(prec))
        if bound is None:
            return self == other
        return self.truncate(bound).terms == other.truncate(bound).terms

    # -- arithmetic ------------------------------------------------------------
    def _co(self, other) -> "HahnSeries":
        if isinstance(other, HahnSeries):
            if other.field is not self.field:
                raise MixedCoefficientRings(f"series over {self.field} and {other.field}")
            return other
        return self.ring.coerce(other)

    def __add__(self, other):
        o = self._co(other)
        prec = _min_prec(self.prec, o.prec)
        acc = dict(self.terms)
        for e, c in o.terms:
            acc[e] = acc[e] + c if e in acc else c
        ts = [(e, c) for e, c in acc.items() if c and (prec is None or e < prec)]
        ts.sort(key=_key)
        return HahnSeries._from_sorted(self.field, ts, prec)

    __radd__ = __add__

    def __neg__(self):
        return HahnSeries._from_sorted(self.field, [(e, -c) for e, c in self.terms], self.prec)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FFElem)) and not isinstance(other, bool):
            c = self.field.coerce(other)
            if not c:
                return HahnSeries.zero(self.field, None if self.prec is None else self.prec)
            return HahnSeries._from_sorted(self.field, [(e, x * c) for e, x in self.terms], self.prec)
        o = self._co(other)
        return self._mul(o)

    __rmul__ = __mul__

    def _mul(self, o: "HahnSeries", cap=None) -> "HahnSeries":
        va, vb = self._val_lower(), o._val_lower()
        if self.is_zero() or o.is_zero():
            return HahnSeries.zero(self.field)
        prec = None
        if o.prec is not None:
            prec = va + o.prec
        if self.prec is not None:
            other = vb + self.prec
            prec = other if prec is None or other < prec else prec
        if cap is not None:
            prec = cap if prec is None or cap < prec else prec
        acc: Dict[SigmaRational, object] = {}
        for e1, c1 in self.terms:
            if prec is not None and not (e1 + vb < prec):
                break
            for e2, c2 in o.terms:
                e = e1 + e2
                if prec is not None and not (e < prec):
                    break
                c = c1 * c2
                if e in acc:
                    acc[e] = acc[e] + c
                else:
                    acc[e] = c
        ts = [(e, c) for e, c in acc.items() if c]
        ts.sort(key=_key)
        return HahnSeries._from_sorted(self.field, ts, prec)

    def truncate(self, prec) -> "HahnSeries":
        """Forget every term at or above ``prec``."""
        prec = as_rational(prec)
        newp = _min_prec(self.prec, prec)
        return HahnSeries._from_sorted(self.field, [(e, c) for e, c in self.terms if e < newp], newp)

    def inverse(self, prec=None) -> "HahnSeries":
        """Multiplicative inverse, truncated at ``prec`` unless it is exact."""
        if not self.terms:
            if self.prec is None:
                raise DivisionByZero("inverse of the zero series")
            raise PrecisionLoss("inverse of a series that is zero up to precision")
        beta, c = self.terms[0]
        cinv = self.field.one / c
        lead_inv = HahnSeries._from_sorted(self.field, [(-beta, cinv)], None)
        u_terms = [(e - beta, x * cinv) for e, x in self.terms[1:]]
        u_prec = None if self.prec is None else self.prec - beta
        if not u_terms and u_prec is None:
            return lead_inv
        # relative precision of 1/(1+u)
        rel = None if prec is None else as_rational(prec) + beta
        if u_prec is not None:
            rel = u_prec if rel is None or u_prec < rel else rel
        if rel is None:
            raise PrecisionLoss("inverse of a non-monomial exact series needs a precision")
        u = HahnSeries._from_sorted(self.field, u_terms, u_prec)
        acc = HahnSeries.one(self.field).truncate(rel)
        if rel <= 0:
            return lead_inv._mul(acc)
        vu = u._val_lower()
        if vu is not INF and vu.degree < rel.degree:
            raise BudgetExceeded(
                f"geometric series in t^({vu}) cannot reach relative precision {rel}"
            )
        power = HahnSeries.one(self.field)
        neg_u = -u
        steps = 0
        while True:
            power = power._mul(neg_u, cap=rel)
            if not power.terms:
                break
            acc = acc + power
            steps += 1
            if steps > _max_terms.get():
                raise BudgetExceeded("inverse did not converge within the term budget")
        return lead_inv._mul(acc)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FFElem)) and not isinstance(other, bool):
            return self * (self.field.one / self.field.coerce(other))
        o = self._co(other)
        prec = None
        if self.prec is not None and o.terms:
            prec = self.prec - o.terms[0][0]
        return self * o.inverse(prec)

    def __rtruediv__(self, other):
        return self._co(other) / self

    def __pow__(self, n: int) -> "HahnSeries":
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return HahnSeries.one(self.field)
        p = self.field.p
        if p > 1 and n >= p:
            # (sum c t^e)^(p^j) is a Frobenius twist: no support growth
            out = HahnSeries.one(self.field)
            j = 0
            while n:
                n, d = divmod(n, p)
                if d:
                    out = out * _small_pow(self.frobenius(j), d)
                j += 1
            return out
        return _small_pow(self, n)

    # -- actions ------------------------------------------------------------------
    def sigma_map(self, n: int = 1) -> "HahnSeries":
        """Apply sigma^n: exponents times sigma^n, coefficients through sigma_k^n."""
        if n == 0:
            return self
        s = SigmaRational.sigma(n)
        f = self.field
        ts = [(e * s, f.sigma(c, n)) for e, c in self.terms]
        return HahnSeries._from_sorted(f, ts, None if self.prec is None else self.prec * s)

    def frobenius(self, m: int = 1) -> "HahnSeries":
        """Apply x -> x^(p^m); negative m extracts p-th roots."""
        f = self.field
        if m == 0 or f.p == 1:
            return self
        scale = SigmaRational(Fraction(f.p) ** m)
        ts = []
        for e, c in self.terms:
            ne = e * scale
            if m < 0 and not _p_depth_ok(ne, f.p):
                raise BudgetExceeded(f"exponent {ne} exceeds the p-denominator budget")
            ts.append((ne, f.frob(c, m)))
        return HahnSeries._from_sorted(f, ts, None if self.prec is None else self.prec * scale)

    def power_exp(self, nu: SigmaExponent) -> "HahnSeries":
        """self^nu = prod_i sigma^i(self)^(nu_i), with p-power denominators via Frobenius."""
        return self.ring.power(self, nu)

    def map_coefficients(self, fn, field: Field) -> "HahnSeries":
        return HahnSeries._from_sorted(field, [(e, fn(c)) for e, c in self.terms], self.prec)

    def specialize(self, q: int) -> "HahnSeries":
        """Substitute sigma -> q in every exponent (and in the precision)."""
        ts = {}
        for e, c in self.terms:
            k = SigmaRational(e(q))
            ts[k] = ts[k] + c if k in ts else c
        prec = None if self.prec is None else SigmaRational(self.prec(q))
        return HahnSeries(self.field, ts, prec)

    # -- display ----------------------------------------------------------------------
    def __repr__(self):
        return f"HahnSeries({self})"

    def __str__(self):
        parts = []
        for e, c in self.terms:
            cs = self.field.render(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if e.is_zero():
                body = cs
            else:
                mono = "t" if e == 1 else f"t^({e})"
                body = mono if cs == "1" else f"{cs}*{mono}"
            parts.append(("-" if neg else "+", body))
        if self.prec is not None:
            parts.append(("+", "O(t)" if self.prec == 1 else f"O(t^({self.prec}))"))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {
            "field": getattr(self.field, "name", str(self.field)),
            "terms": [{"exp": e.to_json(), "coeff": self.field.render(c)} for e, c in self.terms],
            "prec": None if self.prec is None else self.prec.to_json(),
        }


def _key(item):
    return _SortKey(item[0])


class _SortKey:
    __slots__ = ("e",)

    def __init__(self, e):
        self.e = e

    def __lt__(self, other):
        return self.e < other.e


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def _small_pow(a: HahnSeries, n: int) -> HahnSeries:
    out = HahnSeries.one(a.field)
    base = a
    while n:
        if n & 1:
            out = out * base
        n >>= 1
        if n:
            base = base * base
    return out


class HahnRing:
    """Coefficient-ring adaptor so difference polynomials can use Hahn series."""

    _cache: Dict[int, "HahnRing"] = {}

    def __init__(self, field: Field):
        self.field = field
        self.p = field.p

    @classmethod
    def of(cls, field: Field) -> "HahnRing":
        key = id(field)
        ring = cls._cache.get(key)
        if ring is None or ring.field is not field:
            ring = cls(field)
            cls._cache[key] = ring
        return ring

    @property
    def zero(self) -> HahnSeries:
        return HahnSeries.zero(self.field)

    @property
    def one(self) -> HahnSeries:
        return HahnSeries.one(self.field)

    def coerce(self, x) -> HahnSeries:
        if isinstance(x, HahnSeries):
            if x.field is not self.field:
                raise MixedCoefficientRings(f"series over {x.field} used in {self}")
            return x
        return HahnSeries.const(self.field, self.field.coerce(x))

    def sigma(self, x: HahnSeries, n: int = 1) -> HahnSeries:
        return x.sigma_map(n)

    def frob(self, x: HahnSeries, m: int = 1) -> HahnSeries:
        return x.frobenius(m)

    def is_zero(self, x: HahnSeries) -> bool:
        return x.is_zero()

    def power(self, a: HahnSeries, nu: SigmaExponent) -> HahnSeries:
        out = self.one
        for i, c in nu.entries:
            b = a.sigma_map(i)
            k = c.denominator
            if k > 1:
                m = 0
                while k > 1:
                    k //= self.p
                    m += 1
                b = b.frobenius(-m)
            out = out * (b ** c.numerator)
        return out

    def __repr__(self):
        return f"HahnRing({self.field!r})"


# ---------------------------------------------------------------------------
# Artin-Schreier data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutData:
    """Generating sequence of a cut: increasing samples and their supremum."""

    samples: Tuple[SigmaRational, ...]
    limit: Optional[SigmaRational]
    closed_at_limit: bool = False

    def __post_init__(self):
        s = self.samples
        if any(not (a < b) for a, b in zip(s, s[1:])):
            raise ValueError("cut samples must be strictly increasing")
        if self.limit is not None and s and not (s[-1] < self.limit):
            raise ValueError("cut samples must lie below the limit")

    def contains(self, gamma) -> bool:
        """Membership in the downward closure; the limit is taken as the supremum."""
        g = as_rational(gamma)
        if self.limit is None:
            return bool(self.samples) and g <= self.samples[-1]
        return g < self.limit or (self.closed_at_limit and g == self.limit)

    def to_json(self) -> dict:
        return {
            "samples": [x.to_json() for x in self.samples],
            "limit": None if self.limit is None else self.limit.to_json(),
            "closedAtLimit": self.closed_at_limit,
        }


def _require_as_input(a: HahnSeries):
    if a.field.p == 1:
        raise CharacteristicOne("Artin-Schreier series need characteristic p >= 2")
    v = a.val()
    if v is INF or v >= 0:
        raise NonNegativeValuation(
            "Artin-Schreier expansion needs v(a) < 0; use the Hensel lift for v(a) >= 0"
        )


def as_root(a: HahnSeries, n: int) -> HahnSeries:
    """Partial Artin-Schreier root b = sum_{k=1..n} a^(p^-k).

    b^p - b = a - a^(p^-n), so the residual has valuation p^-n * v(a).
    """
    _require_as_input(a)
    b = HahnSeries.zero(a.field)
    for k in range(1, n + 1):
        b = b + a.frobenius(-k)
    return b


def as_cut(a: HahnSeries, n: int) -> CutData:
    """Valuative distances from the Artin-Schreier root of ``a`` to its partial sums."""
    _require_as_input(a)
    partials = [HahnSeries.zero(a.field)]
    for k in range(1, n + 2):
        partials.append(partials[-1] + a.frobenius(-k))
    deep = partials[-1]
    samples = tuple((deep - partials[k]).val() for k in range(n + 1))
    return CutData(samples, ZERO, False)


def twisted_as(x: HahnSeries, n: int) -> HahnSeries:
    """Approximate the distinguished root y of y^p - y = x^sigma - x."""
    d = x.sigma_map(1) - x
    if d.is_zero():
        return HahnSeries.zero(x.field)
    return as_root(d, n)
