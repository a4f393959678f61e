"""
Characteristic polynomial assembly.

Presence of eigenvalues is never derived here from the engine: multiplicity
laws are imported facts (the published answers for the reflection families,
resting on the MPP multiplicity results). The engine only contributes
exclusions, and every imported law is checked against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .arrangements import (
    Arrangement,
    SingularityProfile,
    build_full_monomial,
    build_monomial,
    builtin_profile,
    BUILTIN_ARRANGEMENTS,
    BUILTIN_PROFILES,
    builtin_arrangement,
    section_profile,
)
from .engine import AnalysisReport, eigenvalue_order
from .errors import NonPolynomial, OutOfRange, SoundnessViolation, Unresolved
from .exact_arith import Factor, FactoredPoly, UniPoly, divisors, prime_power

MPP = "Macinic-Papadima-Popescu"

# number of reflecting hyperplanes of the exceptional groups of rank >= 3
EXCEPTIONAL_HYPERPLANES = {
    23: 15, 24: 21, 25: 12, 26: 21, 27: 45, 28: 24, 29: 40, 30: 60,
    31: 60, 32: 40, 33: 45, 34: 126, 35: 36, 36: 63, 37: 120,
}


@dataclass(frozen=True)
class Family:
    kind: str  # "mmn", "m1n" or "exceptional"
    m: int = 0
    n: int = 0
    j: int = 0

    def __post_init__(self):
        if self.kind == "mmn":
            if not ((self.m >= 2 and self.n >= 3) or (self.m == 1 and self.n >= 4)):
                raise OutOfRange(f"A({self.m},{self.m},{self.n}) is not a monomial arrangement")
        elif self.kind == "m1n":
            if self.m < 2 or self.n < 3:
                raise OutOfRange(f"A({self.m},1,{self.n}) is not a full monomial arrangement")
        elif self.kind == "exceptional":
            if self.j not in EXCEPTIONAL_HYPERPLANES:
                raise OutOfRange(f"G{self.j} is not an exceptional group of rank >= 3")
        else:
            raise OutOfRange(f"unknown family kind {self.kind!r}")

    @property
    def q(self) -> int:
        return math.comb(self.n, 2)

    @property
    def degree(self) -> int:
        if self.kind == "mmn":
            return self.q * self.m
        if self.kind == "m1n":
            return self.q * self.m + self.n
        return EXCEPTIONAL_HYPERPLANES[self.j]

    @property
    def label(self) -> str:
        if self.kind == "mmn":
            return f"A({self.m},{self.m},{self.n})"
        if self.kind == "m1n":
            return f"A({self.m},1,{self.n})"
        return f"G{self.j}"

    def arrangement(self) -> Arrangement:
        if self.kind == "mmn":
            return build_monomial(self.m, self.n)
        if self.kind == "m1n":
            return build_full_monomial(self.m, self.n)
        if self.label in BUILTIN_ARRANGEMENTS:
            return builtin_arrangement(self.label)
        raise Unresolved(f"no hyperplane coordinates are built in for {self.label}")

    def profile(self, threads: int = 1) -> SingularityProfile:
        if self.label in BUILTIN_PROFILES:
            return builtin_profile(self.label)
        if self.kind == "exceptional" and self.label not in BUILTIN_ARRANGEMENTS:
            raise Unresolved(f"no built-in singularity profile for {self.label}")
        prof = section_profile(self.arrangement(), threads)
        return replace(prof, name=self.label)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "label": self.label}
        if self.kind == "exceptional":
            out["j"] = self.j
        else:
            out.update(m=self.m, n=self.n)
        return out


def family_for_profile(profile: SingularityProfile) -> Family | None:
    name = profile.name or ""
    if name.startswith("G") and name[1:].isdigit():
        return Family("exceptional", j=int(name[1:]))
    return None


@dataclass(frozen=True)
class Law:
    poly: FactoredPoly
    source: str


def _phi(n: int) -> Factor:
    return Factor.cyclotomic(n)


def known_law(family: Family) -> Law:
    """Multiplicity law for Delta(t) = det(t - h^1) with its provenance."""
    m, n, q = family.m, family.n, family.q
    if family.kind == "mmn":
        if n == 3:
            cubic = 2 if m % 3 == 0 else 1
            return Law(
                FactoredPoly(((_phi(1), 3 * m - 1), (_phi(3), cubic))),
                f"monomial arrangement, n=3: only cubic roots; cubic multiplicity {cubic} from the {MPP} s=1 equality",
            )
        if n == 4:
            return Law(
                FactoredPoly(((_phi(1), q * m - 1), (_phi(3), 1))),
                f"monomial arrangement, n=4: only cubic roots, multiplicity 1 ({MPP} s=1 equality)",
            )
        return Law(FactoredPoly(((_phi(1), q * m - 1),)), "monomial arrangement, n>4: h1 = Id")
    if family.kind == "m1n":
        d = q * m + n
        if n == 3 and m % 3 == 1:
            return Law(
                FactoredPoly(((_phi(1), d - 1), (_phi(3), 1))),
                f"full monomial arrangement, n=3, m = 1 mod 3: cubic roots with multiplicity 1 ({MPP})",
            )
        return Law(FactoredPoly(((_phi(1), d - 1),)), "full monomial arrangement: h1 = Id")
    if family.j == 31:
        raise Unresolved("G31 is not settled by the bound; it needs a separate computation")
    d = family.degree
    if family.j == 25:
        return Law(
            FactoredPoly(((_phi(1), 9), (Factor.binomial(4), 2))),
            "Hessian arrangement G25 (via the MPP results)",
        )
    return Law(FactoredPoly(((_phi(1), d - 1),)), f"exceptional group G{family.j}: h1 = Id ({MPP})")


def known_answer(family: Family) -> FactoredPoly:
    return known_law(family).poly


def mpp_exclusion(family: Family, order: int) -> str | None:
    """
    Reason why eigenvalues of the given order are absent from h^1 by the
    imported prime-power results, or None when they say nothing.
    """
    pp = prime_power(order)
    if pp is None:
        return None
    p, s = pp
    if family.kind == "mmn":
        if family.n == 3 and p != 3:
            return f"{MPP}: for A(m,m,3) eigenvalues of order p^s occur only for p = 3"
        if family.n > 3 and not (p == 3 and family.n == 4):
            return f"{MPP}: for A(m,m,n), n > 3, eigenvalues of order p^s occur only for p = 3 and n = 4"
        return None
    if family.kind == "m1n":
        if not (p == 3 and family.n == 3 and family.m % 3 == 1):
            return f"{MPP}: for A(m,1,n) eigenvalues of order p^s occur only for p = 3, n = 3, m = 1 mod 3"
        return None
    if family.j == 31:
        return None
    if family.j == 25:
        return None if p == 2 else f"{MPP}: for G25 only eigenvalues of 2-power order occur"
    return f"{MPP}: for G{family.j} no eigenvalue of prime-power order occurs"


def apply_imports(report: AnalysisReport, family: Family | None) -> AnalysisReport:
    """Attach labeled imported exclusions for the candidates the engine could not rule out."""
    if family is None:
        return report
    facts = []
    for k in report.h1_candidates:
        if k == 0:
            continue
        order = eigenvalue_order(k, report.d)
        reason = mpp_exclusion(family, order)
        if reason:
            facts.append({"k": k, "order": order, "rule": reason, "family": family.label})
    return replace(report, imported_facts=tuple(facts))


# ------------------------------------------------------------------ Euler check


@dataclass(frozen=True)
class ChiReport:
    chi_V: int
    chi_U: int
    mu_total: int
    delta1: FactoredPoly
    delta2: FactoredPoly | None
    consistent: bool
    degree_identity: bool

    def to_json(self) -> dict:
        return {
            "chi_V": self.chi_V,
            "chi_U": self.chi_U,
            "mu_total": self.mu_total,
            "delta1": str(self.delta1),
            "delta2": None if self.delta2 is None else self.delta2.cyclotomic_multiplicities(),
            "delta2_degree": None if self.delta2 is None else self.delta2.degree,
            "consistent": self.consistent,
            "degree_identity": self.degree_identity,
        }


def euler_chi_U(profile: SingularityProfile, delta1: FactoredPoly, strict: bool = True,
                expand_limit: int = 400) -> ChiReport:
    """
    chi(U) = 3 - chi(V) with chi(V) = 3d - d^2 + sum(mu_p), then
    Delta^2 = (t^d - 1)^chi(U) * Delta^1 / (t - 1), computed on cyclotomic
    multiplicities and, for small degrees, by explicit polynomial division.
    """
    if profile.ambient_n != 2:
        raise ValueError("the Euler check is implemented for plane curves")
    d = profile.curve_degree
    mu = profile.milnor_total()
    chi_V = 3 * d - d * d + mu
    chi_U = 3 - chi_V
    mults: dict[int, int] = {}
    for j in divisors(d):
        mults[j] = chi_U
    for j, e in delta1.cyclotomic_multiplicities().items():
        mults[j] = mults.get(j, 0) + e
    mults[1] = mults.get(1, 0) - 1
    ok = all(e >= 0 for e in mults.values())
    if not ok:
        if strict:
            bad = {j: e for j, e in mults.items() if e < 0}
            raise NonPolynomial(f"Delta^2 would carry negative multiplicities {bad}")
        return ChiReport(chi_V, chi_U, mu, delta1, None, False, False)
    delta2 = FactoredPoly.from_cyclotomic(mults)
    if chi_U >= 0 and d * chi_U + delta1.degree <= expand_limit:
        num = UniPoly.t_power_minus_one(d) ** chi_U * delta1.expand()
        q, r = divmod(num, UniPoly.from_ints(-1, 1))
        if not r.is_zero() or q != delta2.expand():
            if strict:
                raise NonPolynomial("explicit division disagrees with the factored computation")
            return ChiReport(chi_V, chi_U, mu, delta1, delta2, False, False)
    identity = 1 - delta1.degree + delta2.degree == d * chi_U
    return ChiReport(chi_V, chi_U, mu, delta1, delta2, ok and identity, identity)


# ------------------------------------------------------------------ assembly


@dataclass(frozen=True)
class Assembly:
    delta: FactoredPoly
    placeholders: tuple[dict, ...]
    log: tuple[str, ...]
    source: str | None = None
    complete: bool = True

    @property
    def resolved(self) -> bool:
        return not self.placeholders

    def text(self) -> str:
        s = str(self.delta)
        for ph in self.placeholders:
            s += f" (Phi_{ph['order']})^?"
        return s

    def to_json(self) -> dict:
        return {
            "delta": self.text(),
            "factors": [{"poly": str(f.poly), "multiplicity": e} for f, e in self.delta.factors],
            "coefficients": [str(c) for c in self.delta.expand().coeffs],
            "degree": self.delta.degree,
            "placeholders": list(self.placeholders),
            "source": self.source,
            "complete": self.complete,
            "log": list(self.log),
        }


def _ks_of_order(d: int, order: int) -> list[int]:
    return [k for k in range(d) if eigenvalue_order(k, d) == order]


def assemble(profile: SingularityProfile, report: AnalysisReport, family: Family | None = None) -> Assembly:
    d = profile.curve_degree
    log = []
    candidates = set(report.h1_candidates)
    imported = report.imported_ks
    try:
        law = known_law(family) if family is not None else None
    except Unresolved as exc:
        log.append(f"no multiplicity law: {exc}")
        law = None

    if law is not None:
        delta = law.poly
        if delta.degree and family.degree != d:
            raise SoundnessViolation(f"law for {family.label} has degree {family.degree}, profile has {d}")
        mults = delta.cyclotomic_multiplicities()
        if mults.get(1, 0) != d - 1:
            raise SoundnessViolation(f"(t-1)-exponent {mults.get(1, 0)} differs from d - 1 = {d - 1}")
        for order in mults:
            if order == 1:
                continue
            for k in _ks_of_order(d, order):
                if k not in candidates:
                    raise SoundnessViolation(f"law asserts order {order} but the engine excluded k={k}")
                if k in imported:
                    raise SoundnessViolation(f"law asserts order {order} but an import excluded k={k}")
        present = set(mults)
        leftover = sorted({eigenvalue_order(k, d) for k in report.resolved_candidates} - present)
        complete = not leftover
        log.append(f"law: {law.source}")
        log.append(f"identity eigenspace dimension d - 1 = {d - 1}")
        if complete:
            log.append("every remaining candidate order is accounted for by the law")
        else:
            log.append(f"candidate orders {leftover} neither excluded nor asserted")
        return Assembly(delta, (), tuple(log), law.source, complete)

    delta = FactoredPoly(((Factor.cyclotomic(1), d - 1),))
    orders = sorted({eigenvalue_order(k, d) for k in report.resolved_candidates} - {1})
    placeholders = tuple(
        {"order": o, "ks": [k for k in report.resolved_candidates if eigenvalue_order(k, d) == o],
         "multiplicity": "unknown"}
        for o in orders
    )
    if placeholders:
        log.append("NotExcluded candidate orbits carry unknown multiplicities")
    else:
        log.append("every nontrivial character excluded: h1 = Id")
    return Assembly(delta, placeholders, tuple(log), None, not placeholders)
