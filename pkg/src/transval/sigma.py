"""Exact arithmetic in N[sigma], Z[sigma] and the ordered field Q(sigma).

``sigma`` is a formal variable that is larger than every natural number, so
Q(sigma) is ordered by the sign of the leading coefficient of a rational
function.  Exponents of difference monomials live in the monoid N[sigma]
(optionally with denominators that are powers of the characteristic
exponent ``p``).  Everything here is immutable.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import comb, gcd
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from .errors import CharacteristicOne, DenominatorVanishes, DivisionByZero, NotOmegaIncreasing

#: maximal p-adic depth of exponent denominators (entries may be k / p**MAX_P_DEPTH)
MAX_P_DEPTH = 64

Number = Union[int, Fraction]


# ---------------------------------------------------------------------------
# dense integer / rational polynomial helpers; tuples are low -> high
# ---------------------------------------------------------------------------

def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pneg(a):
    return tuple(-x for x in a)


def _psub(a, b):
    return _padd(a, _pneg(b))


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, k):
    return _trim(x * k for x in a)


def _peval(a, q):
    acc = 0
    for c in reversed(a):
        acc = acc * q + c
    return acc


def _content(a):
    return reduce(gcd, a, 0)


def _qdivmod(a, b):
    """Long division over Q; a, b are tuples of Fractions/ints."""
    a = [Fraction(x) for x in a]
    db = len(b) - 1
    lb = Fraction(b[-1])
    if len(a) - 1 < db:
        return (), _trim(a)
    quo = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] / lb
        quo[k - db] = c
        if c:
            for j in range(db + 1):
                a[k - db + j] -= c * b[j]
    return _trim(quo), _trim(a[:db])


def _to_primitive(a):
    """Scale a rational polynomial to a primitive integer one (same sign of lead)."""
    den = reduce(lambda x, y: x * y // gcd(x, y), (Fraction(x).denominator for x in a), 1)
    ints = [int(Fraction(x) * den) for x in a]
    g = _content(ints)
    ints = [x // g for x in ints]
    return tuple(ints)


def _qgcd(a, b):
    """Primitive integer gcd with positive leading coefficient."""
    while b:
        _, r = _qdivmod(a, b)
        a, b = b, r
    g = _to_primitive(a)
    return _pneg(g) if g[-1] < 0 else g


def _exact_div(a, b):
    q, r = _qdivmod(a, b)
    assert not r, "inexact polynomial division"
    return tuple(int(x) for x in q)


def _normalize(num, den):
    if not den:
        raise DivisionByZero("zero denominator in Q(sigma)")
    if not num:
        return (), (1,)
    if len(den) == 1 or not any(den[:-1]):
        # monomial denominator c*sigma^k: only powers of sigma can cancel
        k = len(den) - 1
        j = next(i for i, x in enumerate(num) if x)
        s = min(j, k)
        if s:
            num = num[s:]
            den = den[s:]
    else:
        g = _qgcd(num, den)
        if len(g) > 1:
            num = _exact_div(num, g)
            den = _exact_div(den, g)
    c = gcd(_content(num), _content(den))
    if den[-1] < 0:
        c = -c
    if c != 1:
        num = tuple(x // c for x in num)
        den = tuple(x // c for x in den)
    return num, den


def _render_poly(coeffs, var="s"):
    """Render a low->high coefficient sequence (ints or Fractions)."""
    if not any(coeffs):
        return "0"
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[i])
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a}*{mono}"
            elif a.numerator == 1:
                body = f"{mono}/{a.denominator}"
            else:
                body = f"{a.numerator}*{mono}/{a.denominator}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# Z[sigma]
# ---------------------------------------------------------------------------

class SigmaPoly:
    """Integer polynomial in sigma, canonical with no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        self.coeffs = _trim(int(c) for c in coeffs)

    @classmethod
    def sigma(cls, n: int = 1) -> "SigmaPoly":
        return cls((0,) * n + (1,))

    @classmethod
    def const(cls, c: int) -> "SigmaPoly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = SigmaPoly((other,))
        return isinstance(other, SigmaPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("SigmaPoly", self.coeffs))

    def __add__(self, other):
        other = _as_poly(other)
        return SigmaPoly(_padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        return SigmaPoly(_psub(self.coeffs, _as_poly(other).coeffs))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return SigmaPoly(_pneg(self.coeffs))

    def __mul__(self, other):
        return SigmaPoly(_pmul(self.coeffs, _as_poly(other).coeffs))

    __rmul__ = __mul__

    def __call__(self, q):
        return _peval(self.coeffs, q)

    def __repr__(self):
        return f"SigmaPoly({_render_poly(self.coeffs)})"

    def __str__(self):
        return _render_poly(self.coeffs)


def _as_poly(x) -> SigmaPoly:
    if isinstance(x, SigmaPoly):
        return x
    if isinstance(x, int):
        return SigmaPoly((x,))
    raise TypeError(f"cannot use {type(x).__name__} as an integer sigma-polynomial")


# ---------------------------------------------------------------------------
# infinity sentinel for valuations
# ---------------------------------------------------------------------------

class _Infinity:
    """The value of zero; larger than every element of Q(sigma)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    __str__ = lambda self: "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("transval-inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()


# ---------------------------------------------------------------------------
# Q(sigma)
# ---------------------------------------------------------------------------

class SigmaRational:
    """Element num/den of Q(sigma) with gcd(num, den) = 1 and den > 0.

    >>> s = SigmaRational.sigma()
    >>> (s + 1) / (s - 1) > 1
    True
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, num=0, den=1):
        if isinstance(num, SigmaRational) and den == 1:
            self._num, self._den = num._num, num._den
            self._hash = None
            return
        n = _coerce_pair(num)
        d = _coerce_pair(den)
        # n = n0/n1, d = d0/d1 with n1, d1 integer polys
        self._num, self._den = _normalize(_pmul(n[0], d[1]), _pmul(n[1], d[0]))
        self._hash = None

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj._num, obj._den = _normalize(num, den)
        obj._hash = None
        return obj

    @classmethod
    def sigma(cls, n: int = 1) -> "SigmaRational":
        if n >= 0:
            return cls._raw((0,) * n + (1,), (1,))
        return cls._raw((1,), (0,) * (-n) + (1,))

    @classmethod
    def laurent(cls, terms: Mapping[int, Number]) -> "SigmaRational":
        """Build sum c * sigma^e from a mapping e -> c (e may be negative)."""
        terms = {e: Fraction(c) for e, c in terms.items() if c}
        if not terms:
            return ZERO
        m = max(0, -min(terms))
        top = max(terms) + m
        lcd = reduce(lambda x, y: x * y // gcd(x, y), (c.denominator for c in terms.values()), 1)
        num = [0] * (top + 1)
        for e, c in terms.items():
            num[e + m] = int(c * lcd)
        den = (0,) * m + (lcd,)
        return cls._raw(_trim(num), den)

    @property
    def num(self) -> SigmaPoly:
        return SigmaPoly(self._num)

    @property
    def den(self) -> SigmaPoly:
        return SigmaPoly(self._den)

    @property
    def degree(self) -> int:
        """sigma-degree deg(num) - deg(den); meaningless for zero."""
        return len(self._num) - len(self._den)

    def sign(self) -> int:
        if not self._num:
            return 0
        return 1 if self._num[-1] > 0 else -1

    def is_zero(self) -> bool:
        return not self._num

    def is_rational(self) -> bool:
        return len(self._num) <= 1 and len(self._den) == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational number")
        return Fraction(self._num[0] if self._num else 0, self._den[0])

    def is_laurent(self) -> bool:
        return len(self._den) == 1 or not any(self._den[:-1])

    def laurent_terms(self) -> Dict[int, Fraction]:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial in sigma")
        k = len(self._den) - 1
        c = self._den[-1]
        return {i - k: Fraction(x, c) for i, x in enumerate(self._num) if x}

    def __bool__(self):
        return bool(self._num)

    def __eq__(self, other):
        if other is INF:
            return False
        try:
            o = _as_rational(other)
        except TypeError:
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __hash__(self):
        if self._hash is None:
            if len(self._num) <= 1 and self._den == (1,):
                self._hash = hash(self._num[0] if self._num else 0)
            elif len(self._num) <= 1 and len(self._den) == 1:
                self._hash = hash(Fraction(self._num[0], self._den[0]))
            else:
                self._hash = hash((self._num, self._den))
        return self._hash

    def _cmp(self, other) -> int:
        o = _as_rational(other)
        if self._den == o._den:
            d = _psub(self._num, o._num)
        else:
            d = _psub(_pmul(self._num, o._den), _pmul(o._num, self._den))
        if not d:
            return 0
        return 1 if d[-1] > 0 else -1

    def __lt__(self, other):
        if other is INF:
            return True
        return self._cmp(other) < 0

    def __le__(self, other):
        if other is INF:
            return True
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if other is INF:
            return False
        return self._cmp(other) > 0

    def __ge__(self, other):
        if other is INF:
            return False
        return self._cmp(other) >= 0

    def __add__(self, other):
        if other is INF:
            return INF
        o = _as_rational(other)
        if self._den == o._den:
            return SigmaRational._raw(_padd(self._num, o._num), self._den)
        return SigmaRational._raw(
            _padd(_pmul(self._num, o._den), _pmul(o._num, self._den)), _pmul(self._den, o._den)
        )

    __radd__ = __add__

    def __neg__(self):
        obj = SigmaRational.__new__(SigmaRational)
        obj._num, obj._den, obj._hash = _pneg(self._num), self._den, None
        return obj

    def __sub__(self, other):
        return self + (-_as_rational(other))

    def __rsub__(self, other):
        return _as_rational(other) - self

    def __mul__(self, other):
        if isinstance(other, SigmaExponent):
            other = other.to_rational()
        o = _as_rational(other)
        return SigmaRational._raw(_pmul(self._num, o._num), _pmul(self._den, o._den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rational(other)
        if not o._num:
            raise DivisionByZero("division by zero in Q(sigma)")
        return SigmaRational._raw(_pmul(self._num, o._den), _pmul(self._den, o._num))

    def __rtruediv__(self, other):
        return _as_rational(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return ONE / (self ** (-n))
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __call__(self, q):
        return specialize_q(self, q)

    def __repr__(self):
        return f"SigmaRational({self})"

    def __str__(self):
        n = _render_poly(self._num)
        if self._den == (1,):
            return n
        d = _render_poly(self._den)
        if len(self._num) > 1 and sum(1 for x in self._num if x) > 1:
            n = f"({n})"
        if sum(1 for x in self._den if x) > 1 or (len(self._den) > 1 and self._den[-1] != 1):
            d = f"({d})"
        return f"{n}/{d}"

    def to_json(self) -> dict:
        return {"num": _render_poly(self._num), "den": _render_poly(self._den)}


def _coerce_pair(x):
    """Return (num, den) integer tuples for an int, Fraction, poly or rational."""
    if isinstance(x, SigmaRational):
        return x._num, x._den
    if isinstance(x, SigmaPoly):
        return x.coeffs, (1,)
    if isinstance(x, bool):
        raise TypeError("bool is not a sigma-rational")
    if isinstance(x, int):
        return _trim((x,)), (1,)
    if isinstance(x, Fraction):
        return _trim((x.numerator,)), (x.denominator,)
    if isinstance(x, SigmaExponent):
        r = x.to_rational()
        return r._num, r._den
    raise TypeError(f"cannot coerce {type(x).__name__} into Q(sigma)")


def _as_rational(x) -> SigmaRational:
    if isinstance(x, SigmaRational):
        return x
    if isinstance(x, SigmaExponent):
        return x.to_rational()
    n, d = _coerce_pair(x)
    return SigmaRational._raw(n, d)


ZERO = SigmaRational._raw((), (1,))
ONE = SigmaRational._raw((1,), (1,))
SIGMA = SigmaRational._raw((0, 1), (1,))


def as_rational(x) -> SigmaRational:
    """Public coercion of ints, Fractions, SigmaPoly and SigmaExponent into Q(sigma)."""
    return _as_rational(x)


# ---------------------------------------------------------------------------
# exponents: N[sigma] with p-power denominators
# ---------------------------------------------------------------------------

class SigmaExponent:
    """Finitely supported sum of m_i * sigma^i with m_i >= 0 rational.

    Entries may carry denominators that are powers of the characteristic
    exponent; the order is the order of Q(sigma), i.e. lexicographic from
    the highest sigma-power down.
    """

    __slots__ = ("entries", "_rat", "_hash")

    def __init__(self, coeffs: Union[Mapping[int, Number], Iterable[Number], None] = None):
        if coeffs is None:
            items = ()
        elif isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        ent = []
        for i, c in items:
            c = Fraction(c)
            if c < 0:
                raise ValueError("exponent entries must be nonnegative")
            if i < 0:
                raise ValueError("sigma-index must be nonnegative")
            if c:
                ent.append((int(i), c))
        ent.sort()
        self.entries: Tuple[Tuple[int, Fraction], ...] = tuple(ent)
        self._rat = None
        self._hash = None

    @classmethod
    def const(cls, n: Number) -> "SigmaExponent":
        return cls({0: n})

    @classmethod
    def sigma_power(cls, n: int = 1, m: Number = 1) -> "SigmaExponent":
        return cls({n: m})

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        for j, c in self.entries:
            if j == i:
                return c
        return Fraction(0)

    @property
    def constant_term(self) -> Fraction:
        return self[0]

    @property
    def top(self) -> int:
        """Largest sigma-index in the support (-1 for zero)."""
        return self.entries[-1][0] if self.entries else -1

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self):
        return bool(self.entries)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.entries)

    def is_natural(self) -> bool:
        """True when the exponent is an ordinary natural number."""
        return all(i == 0 for i, _ in self.entries) and self.is_integral()

    def to_rational(self) -> SigmaRational:
        if self._rat is None:
            self._rat = SigmaRational.laurent(dict(self.entries))
        return self._rat

    def p_depth(self, p: int) -> int:
        """Smallest k with p^k * self integral; validates the denominators."""
        k = 0
        for _, c in self.entries:
            d = c.denominator
            j = 0
            while d % p == 0 and d > 1:
                d //= p
                j += 1
            if d != 1:
                raise ValueError(f"denominator of {c} is not a power of {p}")
            k = max(k, j)
        return k

    def __eq__(self, other):
        if isinstance(other, int):
            other = SigmaExponent.const(other)
        return isinstance(other, SigmaExponent) and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("SigmaExponent", self.entries))
        return self._hash

    def _cmp(self, other) -> int:
        if isinstance(other, int):
            other = SigmaExponent.const(other)
        a, b = dict(self.entries), dict(other.entries)
        for i in sorted(set(a) | set(b), reverse=True):
            x, y = a.get(i, 0), b.get(i, 0)
            if x != y:
                return 1 if x > y else -1
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __add__(self, other):
        if isinstance(other, int):
            other = SigmaExponent.const(other)
        if not isinstance(other, SigmaExponent):
            return NotImplemented
        d = dict(self.entries)
        for i, c in other.entries:
            d[i] = d.get(i, 0) + c
        return SigmaExponent(d)

    __radd__ = __add__

    def __sub__(self, other):
        """Difference, defined only when it stays in the monoid."""
        if isinstance(other, int):
            other = SigmaExponent.const(other)
        d = dict(self.entries)
        for i, c in other.entries:
            d[i] = d.get(i, 0) - c
        if any(c < 0 for c in d.values()):
            raise ValueError(f"{self} - {other} leaves N[sigma]")
        return SigmaExponent(d)

    def __mul__(self, k):
        if isinstance(k, (int, Fraction)):
            if k < 0:
                raise ValueError("exponents scale by nonnegative rationals only")
            return SigmaExponent({i: c * k for i, c in self.entries})
        if isinstance(k, SigmaExponent):
            # product in the monoid N[sigma]
            d: Dict[int, Fraction] = {}
            for i, a in self.entries:
                for j, b in k.entries:
                    d[i + j] = d.get(i + j, 0) + a * b
            return SigmaExponent(d)
        if isinstance(k, SigmaRational):
            return self.to_rational() * k
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, n: int) -> "SigmaExponent":
        """Multiply by sigma^n (n < 0 requires the low indices to vanish)."""
        if n < 0 and self.entries and self.entries[0][0] + n < 0:
            raise ValueError(f"{self} is not divisible by sigma^{-n}")
        return SigmaExponent({i + n: c for i, c in self.entries})

    def specialize(self, q) -> Fraction:
        return specialize_q(self, q)

    def is_transformal_pth_power(self, p: int) -> bool:
        """True for sigma^n * p^m (m may be negative); for p=1, for sigma^n."""
        if len(self.entries) != 1:
            return False
        c = self.entries[0][1]
        if p == 1:
            return c == 1
        for part in (c.numerator, c.denominator):
            while part % p == 0:
                part //= p
            if part != 1:
                return False
        return True

    def __repr__(self):
        return f"SigmaExponent({self})"

    def __str__(self):
        top = self.top
        return _render_poly([self[i] for i in range(top + 1)])

    def to_json(self) -> dict:
        return {
            "terms": [
                {"i": i, "num": c.numerator, "pden": c.denominator} for i, c in self.entries
            ]
        }

    @classmethod
    def from_json(cls, doc) -> "SigmaExponent":
        return cls({t["i"]: Fraction(t["num"], t.get("pden", 1)) for t in doc["terms"]})


EXP_ZERO = SigmaExponent()
EXP_ONE = SigmaExponent.const(1)


# ---------------------------------------------------------------------------
# comparison and specialization
# ---------------------------------------------------------------------------

def compare(a, b) -> int:
    """-1, 0 or 1 according to the order of Q(sigma)."""
    return _as_rational(a)._cmp(b)


def specialize_q(x, q) -> Fraction:
    """Substitute sigma -> q exactly."""
    if isinstance(x, SigmaExponent):
        return sum((c * Fraction(q) ** i for i, c in x.entries), Fraction(0))
    if isinstance(x, SigmaPoly):
        return Fraction(x(q))
    r = _as_rational(x)
    d = _peval(r._den, Fraction(q))
    if d == 0:
        raise DenominatorVanishes(f"denominator of {r} vanishes at sigma={q}")
    return Fraction(_peval(r._num, Fraction(q))) / d


def _cauchy_bound(coeffs) -> int:
    """Integer above the absolute value of every complex root."""
    coeffs = [Fraction(c) for c in coeffs]
    coeffs = list(_trim(coeffs))
    if len(coeffs) <= 1:
        return 0
    lead = abs(coeffs[-1])
    m = max(abs(c) for c in coeffs[:-1]) / lead
    return int(m) + 2


def _largest_integer_root(coeffs, lo: int = 2) -> Optional[int]:
    """Largest integer root >= lo of a nonzero rational polynomial, or None."""
    coeffs = list(_trim(Fraction(c) for c in coeffs))
    if len(coeffs) <= 1:
        return None
    b = _cauchy_bound(coeffs)
    for q in range(b, lo - 1, -1):
        if _peval(coeffs, q) == 0:
            return q
    return None


def injectivity_threshold(exponents: Iterable[SigmaExponent]) -> int:
    """Least q0 >= 2 such that nu -> nu(q) is injective on the set for all q >= q0."""
    exps = list(set(exponents))
    lcd = reduce(lambda x, y: x * y // gcd(x, y), (c.denominator for e in exps for _, c in e.entries), 1)
    width = max((e.top for e in exps), default=-1) + 1
    vecs = []
    for e in exps:
        v = [0] * width
        for i, c in e.entries:
            v[i] = c.numerator * (lcd // c.denominator)
        vecs.append(v)
    diffs = set()
    for a_i, a in enumerate(vecs):
        for b in vecs[a_i + 1:]:
            diff = [x - y for x, y in zip(a, b)]
            # d and -d have the same roots
            if next(c for c in reversed(diff) if c) < 0:
                diff = [-c for c in diff]
            diffs.add(tuple(diff))
    worst = None
    for diff in diffs:
        r = _largest_integer_root(diff)
        if r is not None and (worst is None or r > worst):
            worst = r
    return 2 if worst is None else worst + 1


def sign_threshold(x) -> int:
    """Least q0 >= 2 with sign(x(q)) = sign(x) and den(q) != 0 for all integers q >= q0."""
    r = _as_rational(x)
    s = r.sign()
    bound = max(_cauchy_bound(r._num), _cauchy_bound(r._den), 2)
    q = bound
    while q >= 2:
        d = _peval(r._den, q)
        n = _peval(r._num, q)
        val_sign = 0 if n == 0 else (1 if (n > 0) == (d > 0) else -1)
        if d == 0 or val_sign != s:
            return q + 1
        q -= 1
    return 2


# ---------------------------------------------------------------------------
# digitwise combinatorics
# ---------------------------------------------------------------------------

class DigitMatrix:
    """Base-p digits nu_ij of an exponent: nu = sum nu_ij * sigma^i * p^j.

    ``j`` is negative for the p-power denominators; ``clearing_power`` is the
    least k for which p^k * nu is integral.
    """

    __slots__ = ("p", "digits")

    def __init__(self, p: int, digits: Mapping[Tuple[int, int], int]):
        self.p = p
        self.digits = {k: v for k, v in digits.items() if v}

    def __getitem__(self, key) -> int:
        return self.digits.get(key, 0)

    def __eq__(self, other):
        return isinstance(other, DigitMatrix) and (self.p, self.digits) == (other.p, other.digits)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self.digits))

    def __len__(self):
        return len(self.digits)

    @property
    def clearing_power(self) -> int:
        return max([0] + [-j for _, j in self.digits])

    def reconstruct(self) -> SigmaExponent:
        d: Dict[int, Fraction] = {}
        for (i, j), v in self.digits.items():
            d[i] = d.get(i, 0) + v * Fraction(self.p) ** j
        return SigmaExponent(d)

    def __repr__(self):
        return f"DigitMatrix(p={self.p}, {self.digits})"


def digit_decompose(nu: SigmaExponent, p: int) -> DigitMatrix:
    if p == 1:
        raise CharacteristicOne("characteristic exponent 1 has no digit theory")
    if p < 2:
        raise ValueError("p must be a prime")
    return _digits(nu, p)


@lru_cache(maxsize=8192)
def _digits(nu: SigmaExponent, p: int) -> DigitMatrix:
    k = nu.p_depth(p)
    scale = p ** k
    digits = {}
    for i, c in nu.entries:
        n = c.numerator * (scale // c.denominator)
        j = -k
        while n:
            n, r = divmod(n, p)
            if r:
                digits[(i, j)] = r
            j += 1
    return DigitMatrix(p, digits)


def digit_dominates(mu: SigmaExponent, nu: SigmaExponent, p: int) -> bool:
    """True iff every base-p digit of mu is at most the matching digit of nu."""
    dm, dn = digit_decompose(mu, p), digit_decompose(nu, p)
    return all(v <= dn[key] for key, v in dm.digits.items())


def binom_mod_p(nu: SigmaExponent, mu: SigmaExponent, p: int) -> int:
    """Coefficient of x^mu in (1+x)^nu over the prime field (exact for p = 1)."""
    if p == 1:
        if not (nu.is_integral() and mu.is_integral()):
            raise ValueError("characteristic 0 binomials need integral exponents")
        out = 1
        for i, m in mu.entries:
            out *= comb(int(nu[i]), int(m))
            if not out:
                return 0
        return out
    dm, dn = digit_decompose(mu, p), digit_decompose(nu, p)
    out = 1
    for key, m in dm.digits.items():
        out = out * comb(dn[key], m) % p
        if not out:
            return 0
    return out


def dominated_exponents(nu: SigmaExponent, p: int) -> Iterator[SigmaExponent]:
    """All mu with binom(nu, mu) != 0: digitwise below nu (componentwise for p = 1)."""
    if p == 1:
        keys = [(i, int(c)) for i, c in nu.entries]
        if not nu.is_integral():
            raise ValueError("characteristic 0 exponents must be integral")

        def rec(k, acc):
            if k == len(keys):
                yield SigmaExponent(acc)
                return
            i, n = keys[k]
            for m in range(n + 1):
                acc[i] = m
                yield from rec(k + 1, acc)
            del acc[i]

        yield from rec(0, {})
        return
    dm = digit_decompose(nu, p)
    keys = sorted(dm.digits.items())

    def rec_p(k, acc):
        if k == len(keys):
            yield SigmaExponent(acc)
            return
        (i, j), n = keys[k]
        w = Fraction(p) ** j
        base = acc.get(i, 0)
        for m in range(n + 1):
            acc[i] = base + m * w
            yield from rec_p(k + 1, acc)
        acc[i] = base

    yield from rec_p(0, {})


# ---------------------------------------------------------------------------
# density and rational cuts
# ---------------------------------------------------------------------------

def truncate_approx(target, nu, n: int) -> SigmaRational:
    """Laurent polynomial beta with |nu*beta - target| < sigma^-n.

    beta truncates the sigma^-1 power series expansion of target/nu.
    """
    target = _as_rational(target)
    nu = _as_rational(nu)
    if nu.is_zero():
        raise DivisionByZero("nu must be nonzero")
    if target.is_zero():
        return ZERO
    r = target / nu
    P, Q = r._num, r._den
    dP, dQ = len(P) - 1, len(Q) - 1
    Pt = [Fraction(c) for c in reversed(P)]
    Qt = [Fraction(c) for c in reversed(Q)]
    bound = SigmaRational.sigma(-n)
    coeffs = []
    k = 0
    while True:
        c = Pt[k] if k < len(Pt) else Fraction(0)
        for j in range(1, min(k, len(Qt) - 1) + 1):
            c -= Qt[j] * coeffs[k - j]
        c /= Qt[0]
        coeffs.append(c)
        beta = SigmaRational.laurent({dP - dQ - i: ci for i, ci in enumerate(coeffs)})
        if abs(nu * beta - target) < bound:
            return beta
        k += 1


def solve_affine_cut(alpha, beta, nu) -> SigmaRational:
    """The unique x with x + alpha = nu * x + beta, for nu infinitely large."""
    nu_r = _as_rational(nu)
    if nu_r.degree < 1 or nu_r.sign() <= 0:
        raise NotOmegaIncreasing(f"{nu} is not larger than every natural number")
    return (_as_rational(alpha) - _as_rational(beta)) / (nu_r - 1)
