"""
Local invariants of isolated weighted homogeneous singularities y -> g(y)
and of their d-th suspensions g(y) + t^d.

All functions here are pure integer combinatorics. The only objects that
leave the module are integers, monomial exponent lists and factored local
Alexander polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import NonIntegral, Unsupported
from .exact_arith import Factor, FactoredPoly, euler_phi


@dataclass(frozen=True)
class WHType:
    """Weighted homogeneity type (w_1, ..., w_n; e)."""

    weights: tuple[int, ...]
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if not self.weights or min(self.weights) < 1:
            raise ValueError(f"weights must be positive, got {self.weights}")
        if self.degree < max(self.weights):
            raise ValueError(f"degree {self.degree} below max weight {max(self.weights)}")

    @property
    def basis_degree(self) -> int:
        """e - sum(w): weighted degree of the monomials spanning the top Hodge piece."""
        return self.degree - sum(self.weights)

    def __str__(self) -> str:
        return f"({','.join(map(str, self.weights))};{self.degree})"


@dataclass(frozen=True)
class OrdinaryMultiple:
    """m distinct lines through a point."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("an ordinary multiple point needs m >= 2")

    def wh_type(self) -> WHType:
        return WHType((1, 1), self.m)

    @property
    def multiplicity(self) -> int:
        return self.m

    def to_json(self) -> dict:
        return {"ordinary": self.m}


@dataclass(frozen=True)
class Brieskorn:
    """Local model y1^a + y2^b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 2 or self.b < 2:
            raise ValueError("Brieskorn exponents must be >= 2")

    def wh_type(self) -> WHType:
        lcm = math.lcm(self.a, self.b)
        return WHType((lcm // self.a, lcm // self.b), lcm)

    @property
    def multiplicity(self) -> int:
        return min(self.a, self.b)

    def to_json(self) -> dict:
        return {"brieskorn": [self.a, self.b]}


@dataclass(frozen=True)
class GeneralWH:
    type: WHType

    def wh_type(self) -> WHType:
        return self.type

    @property
    def multiplicity(self) -> int:
        # order of a weighted homogeneous polynomial of isolated type is at least e/max(w)
        return -(-self.type.degree // max(self.type.weights))

    def to_json(self) -> dict:
        return {"weighted": {"weights": list(self.type.weights), "degree": self.type.degree}}


SingularityKind = Union[OrdinaryMultiple, Brieskorn, GeneralWH]


def kind_from_json(obj: Mapping) -> SingularityKind:
    if "ordinary" in obj:
        return OrdinaryMultiple(int(obj["ordinary"]))
    if "brieskorn" in obj:
        a, b = obj["brieskorn"]
        return Brieskorn(int(a), int(b))
    if "weighted" in obj:
        w = obj["weighted"]
        return GeneralWH(WHType(tuple(w["weights"]), int(w["degree"])))
    raise ValueError(f"unknown singularity kind {dict(obj)!r}")


@dataclass(frozen=True)
class LocalMonodromy:
    alexander: FactoredPoly
    eigenvalue_orders: frozenset[int]


@dataclass(frozen=True)
class Suspension:
    """Type of g(y) + t^d together with the reduction data used by a(g, k)."""

    type: WHType
    d1: int
    e1: int
    gamma: int


def gamma_mu(e: int, d: int) -> tuple[int, int]:
    g = math.gcd(e, d)
    return g, e * d // g


def suspension(g: WHType, d: int) -> Suspension:
    gamma, mu = gamma_mu(g.degree, d)
    d1, e1 = d // gamma, g.degree // gamma
    return Suspension(WHType(tuple(d1 * w for w in g.weights) + (e1,), mu), d1, e1, gamma)


def suspension_type(g: WHType, d: int) -> WHType:
    return suspension(g, d).type


def weighted_monomials(weights: Sequence[int], D: int) -> list[tuple[int, ...]]:
    """All exponent vectors alpha >= 0 with sum(alpha_j * w_j) == D, lexicographically descending."""
    if D < 0:
        return []
    out: list[tuple[int, ...]] = []

    def rec(j: int, rest: int, prefix: tuple[int, ...]) -> None:
        w = weights[j]
        if j == len(weights) - 1:
            if rest % w == 0:
                out.append(prefix + (rest // w,))
            return
        for a in range(rest // w, -1, -1):
            rec(j + 1, rest - a * w, prefix + (a,))

    rec(0, D, ())
    return out


def _min_s_exceeding(weights: Sequence[int], D: int) -> int:
    # smallest s in N (0 included) with s*w > D for every weight w
    if D < 0:
        return 0
    return max(D // w + 1 for w in weights)


def a_absolute(g: WHType) -> int:
    """Jet order a(g): m^a(g) lies in the kernel of the localization map."""
    return _min_s_exceeding(g.weights, g.basis_degree)


def basis_degree_k(g: WHType, d: int, k: int) -> int:
    """Weighted degree mu(e,d) - d1*sum(w) - e1*k of the A_k monomials."""
    s = suspension(g, d)
    return s.type.degree - s.d1 * sum(g.weights) - s.e1 * k


def a_k_basis(g: WHType, d: int, k: int) -> list[tuple[int, ...]]:
    s = suspension(g, d)
    return weighted_monomials([s.d1 * w for w in g.weights], basis_degree_k(g, d, k))


def a_suspension(g: WHType, d: int, k: int) -> int:
    if not 1 <= k <= d:
        raise ValueError(f"k={k} outside [1, {d}]")
    s = suspension(g, d)
    return _min_s_exceeding([s.d1 * w for w in g.weights], basis_degree_k(g, d, k))


def nontrivial_k(g: WHType, d: int) -> set[int]:
    """Characters k in [1, d] whose local F-piece is nonzero (A_k nonempty)."""
    return {k for k in range(1, d + 1) if a_k_basis(g, d, k)}


def milnor_number(g: WHType) -> int:
    prod = Fraction(1)
    for w in g.weights:
        prod *= Fraction(g.degree - w, w)
    if prod.denominator != 1:
        raise NonIntegral(f"Milnor number of {g} is {prod}")
    return int(prod)


def brieskorn_alexander(a: int, b: int) -> FactoredPoly:
    """
    Characteristic polynomial of the monodromy of y1^a + y2^b, from the
    eigenvalue products zeta_a^i * zeta_b^j, 1 <= i < a, 1 <= j < b.
    """
    n = a * b
    counts: dict[int, int] = {}
    for i in range(1, a):
        for j in range(1, b):
            r = (i * b + j * a) % n
            order = n // math.gcd(r, n)
            counts[order] = counts.get(order, 0) + 1
    mults = {}
    for order, c in counts.items():
        q, rem = divmod(c, euler_phi(order))
        # the eigenvalue multiset is Galois stable
        assert rem == 0, (a, b, order, c)
        mults[order] = q
    return FactoredPoly.from_cyclotomic(mults)


def local_alexander(kind: SingularityKind) -> LocalMonodromy:
    if isinstance(kind, OrdinaryMultiple):
        m = kind.m
        pairs = [(Factor.cyclotomic(1), 1)]
        if m > 2:
            pairs.insert(0, (Factor.binomial(m), m - 2))
        poly = FactoredPoly(tuple(pairs))
    elif isinstance(kind, Brieskorn):
        poly = brieskorn_alexander(kind.a, kind.b)
    else:
        raise Unsupported(f"local Alexander polynomial of {kind} is not implemented")
    return LocalMonodromy(poly, frozenset(poly.root_orders()))


def project_to_basis(coeffs: Mapping[tuple[int, ...], object], g: WHType) -> dict:
    """Keep exactly the coefficients whose monomial has weighted degree e - sum(w)."""
    target = g.basis_degree
    return {
        alpha: c
        for alpha, c in coeffs.items()
        if sum(a * w for a, w in zip(alpha, g.weights)) == target
    }
