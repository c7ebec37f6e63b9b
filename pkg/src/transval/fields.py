"""Coefficient fields: finite fields F_{p^n} and the rationals.

Finite-field elements are stored as discrete logarithms with respect to a
primitive element; addition goes through a Zech-logarithm table.  Each
field carries an automorphism ``sigma_k`` (a power of Frobenius, identity
by default) so it can serve as the residue field of a transformal valued
field.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .errors import DivisionByZero, MixedCoefficientRings

MAX_FIELD_SIZE = 1 << 20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(n ** 0.5) + 1):
        if n % d == 0:
            return False
    return True


def _factor(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FFElem:
    """Element of a finite field; ``e`` is the discrete log (None for zero)."""

    __slots__ = ("field", "e")

    def __init__(self, field: "FiniteField", e: Optional[int]):
        self.field = field
        self.e = e

    def _co(self, other) -> "FFElem":
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise MixedCoefficientRings(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            return self.field.from_fraction(other)
        raise TypeError(f"cannot combine {self.field} element with {type(other).__name__}")

    def is_zero(self) -> bool:
        return self.e is None

    def __bool__(self):
        return self.e is not None

    def __eq__(self, other):
        try:
            o = self._co(other)
        except (TypeError, MixedCoefficientRings):
            return NotImplemented
        return self.e == o.e

    def __hash__(self):
        if self.e == 0:
            return hash(1)
        if self.e is None:
            return hash(0)
        return hash((self.field.q, self.e))

    def __add__(self, other):
        o = self._co(other)
        f = self.field
        if self.e is None:
            return o
        if o.e is None:
            return self
        z = f._zech[(o.e - self.e) % f.order]
        if z is None:
            return f.zero
        return FFElem(f, (self.e + z) % f.order)

    __radd__ = __add__

    def __neg__(self):
        if self.e is None:
            return self
        f = self.field
        return FFElem(f, (self.e + f._half) % f.order)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        if self.e is None or o.e is None:
            return self.field.zero
        return FFElem(self.field, (self.e + o.e) % self.field.order)

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        if self.e is None:
            raise DivisionByZero("inverse of zero in a finite field")
        return FFElem(self.field, (-self.e) % self.field.order)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int):
        if self.e is None:
            if n < 0:
                raise DivisionByZero("negative power of zero")
            return self.field.one if n == 0 else self
        return FFElem(self.field, (self.e * n) % self.field.order)

    def __repr__(self):
        return f"FFElem({self.field.render(self)})"

    def __str__(self):
        return self.field.render(self)


class FiniteField:
    """F_{p^n} with ``sigma_k = Frobenius^sigma_power``.

    Use :func:`GF` to obtain cached instances, so that elements of the same
    field compare by identity of their parent.
    """

    is_finite = True

    def __init__(self, p: int, n: int = 1, sigma_power: int = 0):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p ** n > MAX_FIELD_SIZE:
            raise ValueError(f"F_{p}^{n} exceeds the supported field size")
        self.p = p
        self.n = n
        self.q = p ** n
        self.order = self.q - 1
        self.sigma_power = sigma_power % n if n else 0
        self._half = self.order // 2 if p != 2 else 0
        self.modulus = self._primitive_modulus()
        self._build_tables()
        self.zero = FFElem(self, None)
        self.one = FFElem(self, 0)
        self._ext: Dict[int, Tuple["FiniteField", Callable]] = {}
        self._lock = threading.Lock()

    # -- construction --------------------------------------------------------
    def _code_mul_x(self, code: int) -> int:
        """Multiply the polynomial with base-p code by x modulo the modulus."""
        p, n = self.p, self.n
        digits = [(code // p ** i) % p for i in range(n)]
        top = digits[-1]
        shifted = [0] + digits[:-1]
        # x^n = -sum(mod[i] x^i)
        for i in range(n):
            shifted[i] = (shifted[i] - top * self.modulus[i]) % p
        return sum(d * p ** i for i, d in enumerate(shifted))

    def _primitive_modulus(self) -> Tuple[int, ...]:
        p, n = self.p, self.n
        if n == 1:
            for g in range(1, p):
                if p == 2 or all(pow(g, (p - 1) // r, p) != 1 for r in set(_factor(p - 1))):
                    return ((-g) % p,)
        for tail in itertools.product(range(p), repeat=n):
            if tail[0] == 0:
                continue
            self.modulus = tail
            code, k = 1, 0
            seen_one = False
            for k in range(1, self.order + 1):
                code = self._code_mul_x(code) if n > 1 else code
                if code == 1:
                    seen_one = True
                    break
            if seen_one and k == self.order:
                return tail
        raise ValueError(f"no primitive polynomial of degree {n} over F_{p}")

    def _build_tables(self):
        p, n = self.p, self.n
        exp = [0] * max(self.order, 1)
        log = {}
        if n == 1:
            g = (-self.modulus[0]) % p
            code = 1
            for k in range(self.order):
                exp[k] = code
                log[code] = k
                code = code * g % p
        else:
            code = 1
            for k in range(self.order):
                exp[k] = code
                log[code] = k
                code = self._code_mul_x(code)
        self._exp = exp
        self._log = log

        def add_codes(a, b):
            out, i = 0, 0
            while a or b:
                out += ((a % p + b % p) % p) * p ** i
                a //= p
                b //= p
                i += 1
            return out

        zech = [None] * max(self.order, 1)
        for k in range(self.order):
            s = add_codes(1, exp[k])
            zech[k] = None if s == 0 else log[s]
        self._zech = zech

    # -- element constructors -------------------------------------------------
    def from_int(self, k: int) -> FFElem:
        k %= self.p
        return self.zero if k == 0 else FFElem(self, self._log[k])

    def from_fraction(self, x: Fraction) -> FFElem:
        return self.from_int(x.numerator) / self.from_int(x.denominator)

    def coerce(self, x) -> FFElem:
        if isinstance(x, FFElem):
            if x.field is not self:
                raise MixedCoefficientRings(f"{x.field} element used in {self}")
            return x
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    @property
    def gen(self) -> FFElem:
        """The primitive element whose powers enumerate the multiplicative group."""
        return FFElem(self, 1 % max(self.order, 1)) if self.order > 1 else self.one

    def from_code(self, code: int) -> FFElem:
        return self.zero if code == 0 else FFElem(self, self._log[code])

    def code(self, c: FFElem) -> int:
        return 0 if c.e is None else self._exp[c.e]

    def elements(self) -> Iterator[FFElem]:
        yield self.zero
        for k in range(self.order):
            yield FFElem(self, k)

    def nonzero_elements(self) -> Iterator[FFElem]:
        for k in range(self.order):
            yield FFElem(self, k)

    # -- automorphisms --------------------------------------------------------
    def frob(self, c: FFElem, m: int = 1) -> FFElem:
        """c^(p^m); negative m takes p-th roots."""
        if c.e is None or self.order == 1:
            return c
        return FFElem(self, (c.e * pow(self.p, m, self.order)) % self.order)

    def sigma(self, c: FFElem, n: int = 1) -> FFElem:
        return self.frob(c, self.sigma_power * n) if self.sigma_power else c

    def is_zero(self, c) -> bool:
        return c.e is None

    # -- extensions -----------------------------------------------------------
    def extension(self, m: int) -> Tuple["FiniteField", Callable[[FFElem], FFElem]]:
        """F_{q^m} together with an embedding of this field into it."""
        if m == 1:
            return self, lambda c: c
        with self._lock:
            if m not in self._ext:
                big = GF(self.p, self.n * m, self.sigma_power)
                self._ext[m] = (big, self._embedding_into(big))
            return self._ext[m]

    def _embedding_into(self, big: "FiniteField") -> Callable[[FFElem], FFElem]:
        if self.n == 1:
            return lambda c: big.from_int(self._exp[c.e]) if c.e is not None else big.zero
        step = big.order // self.order
        # the generator is a root of the defining modulus
        mod = [big.from_int(c) for c in self.modulus]
        for j in range(1, self.order + 1):
            h = FFElem(big, (step * j) % big.order)
            acc = h ** self.n
            for i, c in enumerate(mod):
                acc = acc + c * h ** i
            if acc.is_zero():
                L = h.e
                return lambda c, L=L: big.zero if c.e is None else FFElem(big, (c.e * L) % big.order)
        raise ValueError("no embedding found")  # pragma: no cover

    # -- display --------------------------------------------------------------
    def render(self, c: FFElem) -> str:
        code = self.code(c)
        if code < self.p:
            v = code if code <= self.p // 2 or self.p == 2 else code - self.p
            return str(v)
        return "g" if c.e == 1 else f"g^{c.e}"

    @property
    def name(self) -> str:
        base = f"F{self.q}"
        return base if not self.sigma_power else f"{base}:{self.sigma_power}"

    def __repr__(self):
        return f"GF({self.p}^{self.n}, sigma_power={self.sigma_power})"


class RationalField:
    """Q with trivial sigma and trivial Frobenius (characteristic exponent 1)."""

    is_finite = False
    p = 1
    q = 0
    sigma_power = 0
    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, k: int) -> Fraction:
        return Fraction(k)

    def from_fraction(self, x: Fraction) -> Fraction:
        return Fraction(x)

    def coerce(self, x) -> Fraction:
        if isinstance(x, FFElem):
            raise MixedCoefficientRings("finite-field element used over Q")
        return Fraction(x)

    def frob(self, c, m: int = 1):
        return c

    def sigma(self, c, n: int = 1):
        return c

    def is_zero(self, c) -> bool:
        return c == 0

    def render(self, c) -> str:
        return str(c)

    def extension(self, m: int):
        if m != 1:
            raise ValueError("Q has no finite extensions in this library")
        return self, lambda c: c

    def __repr__(self):
        return "QQ"


QQ = RationalField()

_cache: Dict[Tuple[int, int, int], FiniteField] = {}
_cache_lock = threading.Lock()


def GF(p: int, n: int = 1, sigma_power: int = 0) -> FiniteField:
    """Cached finite field F_{p^n}; concurrent callers see a fully built field."""
    key = (p, n, sigma_power % n)
    with _cache_lock:
        f = _cache.get(key)
        if f is None:
            f = FiniteField(p, n, sigma_power)
            _cache[key] = f
        return f


def field_from_spec(spec: str, p: int) -> "FiniteField | RationalField":
    """Parse ``Q``, ``F4``, ``F9:1`` (q and optional sigma power)."""
    spec = spec.strip()
    if spec.upper() in ("Q", "QQ"):
        return QQ
    body = spec[1:] if spec[:1] in ("F", "f") else spec
    power = 0
    if ":" in body:
        body, sp = body.split(":", 1)
        power = int(sp)
    q = int(body)
    fac = _factor(q)
    if len(set(fac)) != 1:
        raise ValueError(f"{q} is not a prime power")
    if p != 1 and fac[0] != p:
        raise ValueError(f"field {spec} does not have characteristic {p}")
    return GF(fac[0], len(fac), power)
