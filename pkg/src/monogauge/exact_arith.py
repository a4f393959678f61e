"""
Exact arithmetic: rationals, univariate polynomials over Q, the cyclotomic
field Q(zeta_m) and factored characteristic polynomials.

Rationals are :class:`fractions.Fraction`. A polynomial is stored as a tuple
of coefficients, constant term first, so ``UniPoly.from_ints(-1, 1)`` is t - 1.

>>> str(cyclotomic_poly(12))
't^4-t^2+1'
>>> z = CycloElement.zeta(4)
>>> (z * z).coeffs
(Fraction(-1, 1), Fraction(0, 1))
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DivisionByZeroError, OrderMismatch, ParseError

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


@dataclass(frozen=True, init=False)
class UniPoly:
    """Dense univariate polynomial over Q in the variable t, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim([Fraction(c) for c in coeffs]))

    @classmethod
    def from_ints(cls, *coeffs: int) -> UniPoly:
        return cls(coeffs)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> UniPoly:
        return cls([0] * degree + [coeff])

    @classmethod
    def t_power_minus_one(cls, j: int) -> UniPoly:
        return cls([-1] + [0] * (j - 1) + [1])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else _ZERO

    def is_monic(self) -> bool:
        return self.leading == 1

    def __add__(self, other: UniPoly) -> UniPoly:
        return UniPoly(a + b for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=_ZERO))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return UniPoly(a - b for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=_ZERO))

    def __neg__(self) -> UniPoly:
        return UniPoly(-c for c in self.coeffs)

    def __mul__(self, other: UniPoly | int | Fraction) -> UniPoly:
        if not isinstance(other, UniPoly):
            return UniPoly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> UniPoly:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = UniPoly.from_ints(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if other.is_zero():
            raise DivisionByZeroError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [_ZERO] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            c = c / lead
            quot[i - dq] = c
            for j, b in enumerate(other.coeffs):
                rem[i - dq + j] -= c * b
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: UniPoly) -> UniPoly:
        return divmod(self, other)[1]

    def exact_div(self, other: UniPoly) -> UniPoly:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self) -> UniPoly:
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return format_poly(self.coeffs, "t")

    def __repr__(self) -> str:
        return f"UniPoly('{self}')"


def format_poly(coeffs: Sequence, var: str, descending: bool = True) -> str:
    """Render coefficients (constant first) as compact text such as ``t^2+t+1``."""
    parts = []
    order = range(len(coeffs) - 1, -1, -1) if descending else range(len(coeffs))
    for i in order:
        c = Fraction(coeffs[i])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out


def poly_xgcd(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """Return (g, s, u) with s*a + u*b = g = gcd(a, b), g monic."""
    r0, r1 = a, b
    s0, s1 = UniPoly.from_ints(1), UniPoly()
    u0, u1 = UniPoly(), UniPoly.from_ints(1)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        u0, u1 = u1, u0 - q * u1
    lead = r0.leading
    return r0 * (1 / lead), s0 * (1 / lead), u0 * (1 / lead)


def euler_phi(n: int) -> int:
    result, k, p = n, n, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, s) if n = p^s with s >= 1, else None."""
    if n < 2:
        return None
    p = 2
    while n % p:
        p += 1
    s = 0
    while n % p == 0:
        n //= p
        s += 1
    return (p, s) if n == 1 else None


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> UniPoly:
    """Phi_n, by exact division of t^n - 1 by Phi_d for every proper divisor d."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    acc = UniPoly.t_power_minus_one(n)
    for d in divisors(n)[:-1]:
        acc = acc.exact_div(cyclotomic_poly(d))
    return acc


@functools.lru_cache(maxsize=None)
def _phi_int(m: int) -> tuple[int, ...]:
    return tuple(int(c) for c in cyclotomic_poly(m).coeffs)


@functools.lru_cache(maxsize=None)
def zeta_power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Integer power-basis vectors of zeta_m^j for j = 0 .. m-1."""
    phi = _phi_int(m)
    deg = len(phi) - 1
    rows = []
    v = [0] * deg
    v[0] = 1
    for _ in range(m):
        rows.append(tuple(v))
        # multiply by zeta and reduce the overflow using the monic Phi_m
        top = v[-1]
        v = [0] + v[:-1]
        if top:
            v = [v[i] - top * phi[i] for i in range(deg)]
    return tuple(rows)


def reduce_mod_phi(vec: Sequence, m: int) -> list:
    """Reduce a coefficient vector in zeta (any length) modulo Phi_m."""
    phi = _phi_int(m)
    deg = len(phi) - 1
    v = list(vec)
    for i in range(len(v) - 1, deg - 1, -1):
        c = v[i]
        if c:
            base = i - deg
            for j in range(deg):
                if phi[j]:
                    v[base + j] -= c * phi[j]
    v = v[:deg]
    if len(v) < deg:
        v += [0] * (deg - len(v))
    return v


def ring_mul(a: Sequence, b: Sequence, m: int) -> list:
    """Product of two power-basis vectors in Z[zeta_m] or Q(zeta_m)."""
    deg = len(a)
    if deg == 1:
        return [a[0] * b[0]]
    prod = [0] * (2 * deg - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    return reduce_mod_phi(prod, m)


@dataclass(frozen=True, init=False)
class CycloElement:
    """
    Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1).

    The coefficient tuple is canonical, so equality and zero tests are plain
    coefficient comparisons.
    """

    order: int
    coeffs: tuple[Fraction, ...]

    def __init__(self, order: int, coeffs: Iterable = ()):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        reduced = reduce_mod_phi([Fraction(c) for c in coeffs] or [_ZERO], order)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in reduced))

    @classmethod
    def _raw(cls, order: int, coeffs: tuple[Fraction, ...]) -> CycloElement:
        obj = object.__new__(cls)
        object.__setattr__(obj, "order", order)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @classmethod
    def from_int(cls, order: int, value) -> CycloElement:
        deg = euler_phi(order)
        return cls._raw(order, (Fraction(value),) + (_ZERO,) * (deg - 1))

    @classmethod
    def zero(cls, order: int) -> CycloElement:
        return cls.from_int(order, 0)

    @classmethod
    def one(cls, order: int) -> CycloElement:
        return cls.from_int(order, 1)

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> CycloElement:
        row = zeta_power_table(order)[power % order]
        return cls._raw(order, tuple(Fraction(c) for c in row))

    @classmethod
    def parse(cls, text: str, order: int) -> CycloElement:
        return parse_z(text, order)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def _check(self, other: CycloElement) -> None:
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order}")

    def _coerce(self, other) -> CycloElement:
        if isinstance(other, CycloElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElement.from_int(self.order, other)
        return NotImplemented

    def __add__(self, other) -> CycloElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElement._raw(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other) -> CycloElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElement._raw(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other) -> CycloElement:
        return (-self) + other

    def __neg__(self) -> CycloElement:
        return CycloElement._raw(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> CycloElement:
        if isinstance(other, (int, Fraction)):
            return CycloElement._raw(self.order, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElement._raw(self.order, tuple(ring_mul(self.coeffs, other.coeffs, self.order)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> CycloElement:
        if n < 0:
            return self.invert() ** (-n)
        result = CycloElement.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def invert(self) -> CycloElement:
        """Inverse via the extended gcd of the representative with Phi_m."""
        if self.is_zero():
            raise DivisionByZeroError("inverse of zero in Q(zeta_m)")
        if self.is_rational():
            return CycloElement.from_int(self.order, 1 / self.coeffs[0])
        g, s, _ = poly_xgcd(UniPoly(self.coeffs), cyclotomic_poly(self.order))
        # Phi_m is irreducible, so the gcd with a nonzero reduced element is 1
        assert g.degree == 0
        return CycloElement(self.order, s.coeffs)

    def __truediv__(self, other) -> CycloElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.invert()

    def __rtruediv__(self, other) -> CycloElement:
        return self.invert() * other

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __str__(self) -> str:
        return format_poly(self.coeffs, "z", descending=False)

    def __repr__(self) -> str:
        return f"CycloElement({self.order}, '{self}')"

    def sort_key(self) -> tuple:
        return tuple((c.numerator, c.denominator) for c in self.coeffs)


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+)(?:\s*/\s*(\d+))?\s*(\*)?\s*)?(z(?:\s*\^\s*(\d+))?)?\s*"
)


def parse_z(text: str, order: int, line: int | None = None) -> CycloElement:
    """
    Parse an expression like ``1 - z^2`` or ``3/2*z + 1/3`` as an element of
    Q(zeta_order), interpreting z as zeta_order.

    >>> str(parse_z("z^4", 4))
    '1'
    """
    s = text.strip()
    if not s:
        raise ParseError("empty field element", line, 1)
    pos = 0
    acc: dict[int, Fraction] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, den, star, zpart, exp = m.groups()
        if m.end() == pos or (num is None and zpart is None):
            raise ParseError(f"unexpected character {s[pos]!r}", line, pos + 1)
        if star and zpart is None:
            raise ParseError("'*' must be followed by z", line, m.end())
        if sign is None and not first:
            raise ParseError("missing operator between terms", line, pos + 1)
        if den is not None and int(den) == 0:
            raise ParseError("zero denominator", line, pos + 1)
        coeff = Fraction(int(num), int(den) if den else 1) if num is not None else _ONE
        if sign == "-":
            coeff = -coeff
        power = 0
        if zpart is not None:
            power = int(exp) if exp is not None else 1
        acc[power] = acc.get(power, _ZERO) + coeff
        pos = m.end()
        first = False
    vec = [_ZERO] * (max(acc) + 1)
    for p, c in acc.items():
        vec[p] = c
    # z^j with j >= order wraps first, keeping reduction cheap for large exponents
    wrapped = [_ZERO] * order
    for p, c in enumerate(vec):
        wrapped[p % order] += c
    return CycloElement(order, wrapped)


@dataclass(frozen=True)
class Factor:
    """One factor of a :class:`FactoredPoly`.

    ``kind`` is ``"cyclotomic"`` (Phi_index), ``"binomial"`` (t^index - 1,
    reducible, kept only for presentation) or ``"other"``.
    """

    poly: UniPoly
    kind: str
    index: int | None = None

    @classmethod
    def cyclotomic(cls, n: int) -> Factor:
        return cls(cyclotomic_poly(n), "cyclotomic", n)

    @classmethod
    def binomial(cls, j: int) -> Factor:
        return cls(UniPoly.t_power_minus_one(j), "binomial", j)

    def cyclotomic_parts(self) -> dict[int, int]:
        if self.kind == "cyclotomic":
            return {self.index: 1}
        if self.kind == "binomial":
            return {d: 1 for d in divisors(self.index)}
        n = recognize_cyclotomic(self.poly)
        if n is None:
            raise ValueError(f"{self.poly} is not a product of cyclotomic polynomials")
        return {n: 1}


def recognize_cyclotomic(p: UniPoly) -> int | None:
    """Index n with Phi_n == p, or None."""
    deg = p.degree
    if deg < 1 or not p.is_monic():
        return None
    # phi(n) >= sqrt(n/2) bounds the search
    for n in range(1, 2 * deg * deg + 3):
        if euler_phi(n) == deg and cyclotomic_poly(n) == p:
            return n
    return None


@dataclass(frozen=True)
class FactoredPoly:
    """A polynomial kept as a multiset of (factor, multiplicity)."""

    factors: tuple[tuple[Factor, int], ...] = ()

    def __post_init__(self):
        for f, mult in self.factors:
            if mult < 0:
                raise ValueError("negative multiplicity")
            if not f.poly.is_monic():
                raise ValueError(f"factor {f.poly} is not monic")

    @classmethod
    def from_cyclotomic(cls, mults: Mapping[int, int]) -> FactoredPoly:
        return cls(tuple((Factor.cyclotomic(n), e) for n, e in sorted(mults.items()) if e))

    @classmethod
    def of(cls, *pairs: tuple[Factor | UniPoly, int]) -> FactoredPoly:
        out = []
        for f, e in pairs:
            if isinstance(f, UniPoly):
                n = recognize_cyclotomic(f)
                f = Factor.cyclotomic(n) if n is not None else Factor(f, "other")
            out.append((f, e))
        return cls(tuple(out))

    def expand(self) -> UniPoly:
        acc = UniPoly.from_ints(1)
        for f, e in self.factors:
            acc = acc * f.poly ** e
        return acc

    @property
    def degree(self) -> int:
        return sum(f.poly.degree * e for f, e in self.factors)

    def cyclotomic_multiplicities(self) -> dict[int, int]:
        """Multiplicity of each Phi_n after splitting binomial factors."""
        out: dict[int, int] = {}
        for f, e in self.factors:
            for n, k in f.cyclotomic_parts().items():
                out[n] = out.get(n, 0) + k * e
        return {n: e for n, e in sorted(out.items()) if e}

    def canonical(self) -> FactoredPoly:
        return FactoredPoly.from_cyclotomic(self.cyclotomic_multiplicities())

    def root_orders(self) -> set[int]:
        return set(self.cyclotomic_multiplicities())

    def __mul__(self, other: FactoredPoly) -> FactoredPoly:
        return FactoredPoly(self.factors + other.factors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactoredPoly):
            return NotImplemented
        return self.expand() == other.expand()

    def __hash__(self) -> int:
        return hash(self.expand())

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(f"({f.poly})^{e}" for f, e in self.factors)
