"""Scalars for state sums: exact cyclotomic numbers and a complex-float fallback.

An exact scalar lives in Q(z) with z = exp(2*pi*i/n).  It is stored as an
integer coefficient vector over the power basis 1, z, ..., z^(phi(n)-1)
together with a positive common denominator; after every operation the
vector is reduced modulo the n-th cyclotomic polynomial and the fraction is
put in lowest terms, so equality is plain tuple equality.

Float scalars wrap a Python complex and compare with a tolerance.
"""
from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

DEFAULT_TOL = 1e-9


class FieldMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_div(num: list[int], den: Iterable[int]) -> list[int]:
    den = list(den)
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], lead)
        assert r == 0
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    assert not any(num[: len(den) - 1])
    return out


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class CycloField:
    """The cyclotomic field Q(zeta_n) with canonical power-basis elements."""

    backend = "exact"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("field order must be >= 1")
        self.order = n
        self.poly = cyclotomic_poly(n)
        self.degree = len(self.poly) - 1
        # reduced coefficient vectors of z^k for 0 <= k < n
        deg = self.degree
        powers = []
        vec = [0] * deg
        vec[0] = 1
        for _ in range(n):
            powers.append(tuple(vec))
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                for j in range(deg):
                    vec[j] -= top * self.poly[j]
        self._powers = powers
        self._zeta_cache: dict[int, Cyclo] = {}

    def __repr__(self) -> str:
        return f"CycloField({self.order})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CycloField) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("cyclo", self.order))

    def _make(self, num, den=1) -> "Cyclo":
        return Cyclo(self, tuple(num), den)

    def zero(self) -> "Cyclo":
        return self._make([0] * self.degree)

    def one(self) -> "Cyclo":
        return self.from_rational(1)

    def from_rational(self, q) -> "Cyclo":
        q = Fraction(q)
        num = [0] * self.degree
        num[0] = q.numerator
        return self._make(num, q.denominator)

    def zeta(self, k: int) -> "Cyclo":
        k %= self.order
        z = self._zeta_cache.get(k)
        if z is None:
            z = self._make(self._powers[k])
            self._zeta_cache[k] = z
        return z

    def from_terms(self, terms: Iterable[tuple[Fraction, int]]) -> "Cyclo":
        acc = self.zero()
        for q, k in terms:
            acc = acc + self.zeta(k) * self.from_rational(q)
        return acc

    def sqrt_rational(self, q) -> "Cyclo":
        """Square root of a rational inside this field, normalized to have
        positive real part (positive imaginary part for negative q).
        Raises ValueError when the root does not live in this field."""
        q = Fraction(q)
        if q == 0:
            return self.zero()
        den = q.denominator
        root = self.from_rational(Fraction(1, den))
        for p, e in _factor(abs(q.numerator) * den).items():
            if e % 2:
                root = root * self._sqrt_prime(p)
            root = root * self.from_rational(p ** (e // 2))
        if q < 0:
            root = root * self._need(4, 1)
        c = root.to_complex()
        if c.real < -1e-12 or (abs(c.real) <= 1e-12 and c.imag < 0):
            root = -root
        return root

    def _need(self, m: int, k: int) -> "Cyclo":
        if self.order % m:
            raise ValueError(f"zeta_{m} is not in Q(zeta_{self.order})")
        return self.zeta(k * (self.order // m))

    def _sqrt_prime(self, p: int) -> "Cyclo":
        if p == 2:
            return self._need(8, 1) + self._need(8, -1)
        # quadratic Gauss sum g with g^2 = (-1)^((p-1)/2) p
        g = self.zero()
        for a in range(1, p):
            leg = pow(a, (p - 1) // 2, p)
            g = g + self._need(p, a) if leg == 1 else g - self._need(p, a)
        if p % 4 == 3:
            g = g * self._need(4, -1)
        return g

    def galois(self, a: "Cyclo", k: int) -> "Cyclo":
        """Apply the automorphism z -> z^k (k coprime to the order)."""
        n = self.order
        acc = [0] * self.degree
        for j, c in enumerate(a.num):
            if c:
                vec = self._powers[(j * k) % n]
                for t in range(self.degree):
                    acc[t] += c * vec[t]
        return Cyclo(self, tuple(acc), a.den)

    def parse(self, text: str) -> "Cyclo":
        return self.from_terms(parse_exact_terms(text))

    def root_exponent(self, a: "Cyclo"):
        """Return k with a == z^k, or None if a is not an n-th root of unity."""
        if not hasattr(self, "_root_index"):
            self._root_index = {self.zeta(k): k for k in range(self.order)}
        return self._root_index.get(a)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class Cyclo:
    """Exact element of a CycloField."""

    __slots__ = ("field", "num", "den", "_hash")
    backend = "exact"

    def __init__(self, field: CycloField, num: tuple[int, ...], den: int = 1):
        if den < 0:
            num = tuple(-c for c in num)
            den = -den
        g = den
        for c in num:
            g = math.gcd(g, c)
            if g == 1:
                break
        if g > 1:
            num = tuple(c // g for c in num)
            den //= g
        if not any(num):
            den = 1
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    def _check(self, other) -> "Cyclo":
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        if not isinstance(other, Cyclo):
            raise FieldMismatch(f"cannot combine exact scalar with {type(other).__name__}")
        if other.field.order != self.field.order:
            raise FieldMismatch(f"Q(z_{self.field.order}) vs Q(z_{other.field.order})")
        return other

    def __add__(self, other):
        other = self._check(other)
        d1, d2 = self.den, other.den
        return Cyclo(self.field, tuple(a * d2 + b * d1 for a, b in zip(self.num, other.num)), d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.field, tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        f = self.field
        deg = f.degree
        n = f.order
        prod = [0] * (2 * deg - 1)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(other.num):
                    if b:
                        prod[i + j] += a * b
        out = prod[:deg]
        for j in range(deg, 2 * deg - 1):
            c = prod[j]
            if c:
                vec = f._powers[j % n]
                for t in range(deg):
                    out[t] += c * vec[t]
        return Cyclo(f, tuple(out), self.den * other.den)

    __rmul__ = __mul__

    def is_zero(self, tol: float | None = None) -> bool:
        return not any(self.num)

    def inv(self) -> "Cyclo":
        """Inverse via the norm: 1/a = (product of the other conjugates) / N(a)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        f = self.field
        k = f.root_exponent(self)
        if k is not None:
            return f.zeta(-k % f.order)
        cache = f.__dict__.setdefault("_inv_cache", {})
        if self in cache:
            return cache[self]
        n = f.order
        others = f.one()
        for k in range(2, n + 1):
            if math.gcd(k, n) == 1 and k % n != 1:
                others = others * f.galois(self, k)
        norm = self * others
        assert not any(norm.num[1:]), "norm must be rational"
        q = Fraction(norm.num[0], norm.den)
        out = cache[self] = others * f.from_rational(1 / q)
        return out

    def __truediv__(self, other):
        return self * self._check(other).inv()

    def __rtruediv__(self, other):
        return self._check(other) * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def conj(self) -> "Cyclo":
        return self.field.galois(self, -1)

    def to_complex(self) -> complex:
        n = self.field.order
        s = sum(c * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(self.num) if c)
        return complex(s) / self.den

    def equals(self, other, tol: float | None = None) -> bool:
        return self == other

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, Cyclo):
            return NotImplemented
        return self.field.order == other.field.order and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.order, self.num, self.den))
        return self._hash

    def rational(self):
        """The value as a Fraction if it is rational, else None."""
        if any(self.num[1:]):
            return None
        return Fraction(self.num[0], self.den)

    def literal(self) -> str:
        terms = []
        for k, c in enumerate(self.num):
            if c:
                q = Fraction(c, self.den)
                terms.append((q, k))
        if not terms:
            return "0"
        parts = []
        for idx, (q, k) in enumerate(terms):
            sign = "-" if q < 0 else "+"
            body = str(abs(q)) if k == 0 else f"{abs(q)}*z^{k}"
            if idx == 0:
                parts.append(("-" if q < 0 else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.literal()

    def __repr__(self) -> str:
        return f"Cyclo[{self.field.order}]({self.literal()})"


_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?z\^\(?(-?\d+)\)?|\*?z)?")


def parse_exact_terms(text: str) -> list[tuple[Fraction, int]]:
    """Parse `<rat>*z^<k>` sums.  A bare rational is a z^0 term."""
    if re.search(r"[\w^*/.]\s+[\w^*/.]", text):
        raise ValueError(f"bad scalar literal: {text!r}")
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty scalar literal")
    s = s.replace("+-", "-").replace("-+", "-").replace("--", "+")
    pos = 0
    terms = []
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"bad scalar literal: {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        q = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3) is None:
            k = 0
        elif m.group(4) is None:
            k = 1
        else:
            k = int(m.group(4))
        terms.append((sign * q, k))
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"bad scalar literal: {text!r}")
    return terms


class FloatField:
    """Complex double backend.  `order` only matters for zeta()."""

    backend = "float"

    def __init__(self, order: int = 1, tol: float = DEFAULT_TOL):
        self.order = order
        self.tol = tol

    def __repr__(self) -> str:
        return f"FloatField(tol={self.tol})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FloatField)

    def __hash__(self) -> int:
        return hash("float")

    def zero(self) -> "Approx":
        return Approx(0j, self)

    def one(self) -> "Approx":
        return Approx(1 + 0j, self)

    def from_rational(self, q) -> "Approx":
        return Approx(complex(float(Fraction(q))), self)

    def from_complex(self, z: complex) -> "Approx":
        return Approx(complex(z), self)

    def zeta(self, k: int, n: int | None = None) -> "Approx":
        n = n or self.order
        return Approx(cmath.exp(2j * math.pi * (k % n) / n), self)

    def sqrt_rational(self, q) -> "Approx":
        q = float(Fraction(q))
        return Approx(complex(math.sqrt(q)) if q >= 0 else 1j * math.sqrt(-q), self)

    def parse(self, text: str) -> "Approx":
        return Approx(parse_float_literal(text), self)


def parse_float_literal(text: str) -> complex:
    s = re.sub(r"\s+", "", text)
    m = re.fullmatch(r"\(([^,]+),([^,]+)\)", s)
    if m:
        return complex(float(m.group(1)), float(m.group(2)))
    try:
        return complex(float(s))
    except ValueError:
        # an exact literal is also acceptable on the float backend
        pass
    total = 0j
    for q, k in parse_exact_terms(s):
        if k:
            raise ValueError(f"exact term {text!r} needs a field order on the float backend")
        total += float(q)
    return total


class Approx:
    """Float scalar.  Equality is tolerance based (see `equals`)."""

    __slots__ = ("value", "field")
    backend = "float"

    def __init__(self, value: complex, field: FloatField):
        self.value = complex(value)
        self.field = field

    def _v(self, other) -> complex:
        if isinstance(other, Approx):
            return other.value
        if isinstance(other, (int, float, complex, Fraction)):
            return complex(other)
        raise FieldMismatch(f"cannot combine float scalar with {type(other).__name__}")

    def __add__(self, other):
        return Approx(self.value + self._v(other), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return Approx(self.value - self._v(other), self.field)

    def __rsub__(self, other):
        return Approx(self._v(other) - self.value, self.field)

    def __mul__(self, other):
        return Approx(self.value * self._v(other), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return Approx(-self.value, self.field)

    def __truediv__(self, other):
        d = self._v(other)
        if d == 0:
            raise ZeroDivisionError("division by zero scalar")
        return Approx(self.value / d, self.field)

    def __rtruediv__(self, other):
        return Approx(self._v(other), self.field) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return Approx(self.value ** e, self.field)

    def inv(self) -> "Approx":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Approx(1 / self.value, self.field)

    def conj(self) -> "Approx":
        return Approx(self.value.conjugate(), self.field)

    def to_complex(self) -> complex:
        return self.value

    def is_zero(self, tol: float | None = None) -> bool:
        return abs(self.value) <= (self.field.tol if tol is None else tol)

    def equals(self, other, tol: float | None = None) -> bool:
        tol = self.field.tol if tol is None else tol
        return abs(self.value - self._v(other)) <= tol

    def __eq__(self, other) -> bool:
        try:
            return self.equals(other)
        except FieldMismatch:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(round(self.value.real, 6)) ^ hash(round(self.value.imag, 6))

    def literal(self) -> str:
        return format_complex(self.value, self.field.tol)

    def __str__(self) -> str:
        return self.literal()

    def __repr__(self) -> str:
        return f"Approx({self.value!r})"


def format_complex(z: complex, tol: float = DEFAULT_TOL) -> str:
    re_, im = z.real, z.imag
    if abs(re_) <= tol:
        re_ = 0.0
    if abs(im) <= tol:
        im = 0.0
    return f"({re_ + 0.0:.12g},{im + 0.0:.12g})"


Scalar = Cyclo | Approx


# Thin functional API.

def field_new(n: int) -> CycloField:
    return CycloField(n)


def zeta_pow(f: CycloField, k: int) -> Cyclo:
    return f.zeta(k)


def arith(a, b, op: str):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def inv(a):
    return a.inv()


def conj(a):
    return a.conj()


def to_float(a) -> tuple[float, float]:
    z = a.to_complex()
    return (z.real, z.imag)


def parse_scalar(text: str, field) -> Scalar:
    return field.parse(text)
