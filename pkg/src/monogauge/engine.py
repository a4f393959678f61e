"""
Per-character vanishing decisions for the monodromy of a plane curve.

For each character k of the group of d-th roots of unity the engine tries,
in order: the local-Alexander divisibility filter, the counting bound
N = d - n - 1 - k >= sum(a(g_i, k)) - 1 over the points with a nonzero
local piece, and optionally the exact evaluation-rank oracle. Verdicts on
k and d - k are then paired to decide which eigenvalues of h^1 are ruled out.

NotExcluded never means "present": it means the criterion was inconclusive.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .arrangements import ProfileEntry, SingularityProfile
from .errors import MissingCoordinates
from .wh_local import a_k_basis, a_suspension, local_alexander

EXCLUDED_BY_DIVISIBILITY = "ExcludedByDivisibility"
EXCLUDED_BY_BOUND = "ExcludedByBound"
EXCLUDED_BY_ORACLE = "ExcludedByOracle"
NOT_EXCLUDED = "NotExcluded"
EXCLUDED = frozenset({EXCLUDED_BY_DIVISIBILITY, EXCLUDED_BY_BOUND, EXCLUDED_BY_ORACLE})

# I_k is indexed by singular points (profile entries), not by characters.
INDEX_SET_READING = "I_k ranges over singular-point entries of the profile"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("MONOGAUGE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class IndexTerm:
    entry: int
    count: int
    kind: str
    a: int

    def to_json(self) -> dict:
        return {"entry": self.entry, "count": self.count, "kind": self.kind, "a": self.a}


@dataclass(frozen=True)
class CharacterVerdict:
    k: int
    status: str
    N: int
    I_k: tuple[IndexTerm, ...]
    sum_a: int
    evidence: tuple[str, ...] = ()
    oracle: dict | None = None

    @property
    def excluded(self) -> bool:
        return self.status in EXCLUDED

    @property
    def a_values(self) -> dict[int, int]:
        return {t.entry: t.a for t in self.I_k}

    @property
    def bound_holds(self) -> bool:
        return self.N >= self.sum_a - 1

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "status": self.status,
            "N": self.N,
            "sum_a": self.sum_a,
            "I_k": [t.to_json() for t in self.I_k],
            "evidence": list(self.evidence),
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out


@dataclass(frozen=True)
class AnalysisReport:
    d: int
    verdicts: tuple[CharacterVerdict, ...]
    h1_excluded: tuple[int, ...]
    h1_candidates: tuple[int, ...]
    identity_dimension: int
    imported_facts: tuple[dict, ...] = ()
    profile_name: str | None = None
    source: str | None = None

    def verdict(self, k: int) -> CharacterVerdict:
        return self.verdicts[k - 1]

    @property
    def imported_ks(self) -> frozenset[int]:
        return frozenset(f["k"] for f in self.imported_facts)

    @property
    def resolved_candidates(self) -> tuple[int, ...]:
        """Candidates left after engine exclusions and imported exclusions."""
        imp = self.imported_ks
        return tuple(k for k in self.h1_candidates if k not in imp)

    def to_json(self) -> dict:
        out = {
            "degree": self.d,
            "verdicts": [v.to_json() for v in self.verdicts],
            "h1_excluded": list(self.h1_excluded),
            "h1_candidates": list(self.h1_candidates),
            "identity_eigenspace_dim": self.identity_dimension,
            "imported_facts": list(self.imported_facts),
            "resolved_candidates": list(self.resolved_candidates),
            "index_set_reading": INDEX_SET_READING,
        }
        if self.profile_name:
            out["profile"] = self.profile_name
        if self.source:
            out["source"] = self.source
        return out


def canonical_profile(profile: SingularityProfile) -> SingularityProfile:
    """Merge entries of equal kind and sort them, so analysis ignores input order."""
    merged: dict[str, list] = {}
    kinds = {}
    for e in profile.entries:
        key = repr(sorted(e.kind.to_json().items()))
        kinds[key] = e.kind
        slot = merged.setdefault(key, [0, []])
        slot[0] += e.count
        slot[1] = None if (e.points is None or slot[1] is None) else slot[1] + list(e.points)
    ordered = sorted(merged, key=lambda k: (kinds[k].multiplicity, k))
    entries = []
    for key in ordered:
        count, pts = merged[key]
        if pts is not None:
            pts = tuple(sorted(pts, key=lambda p: tuple(c.sort_key() for c in p)))
        entries.append(ProfileEntry(count, kinds[key], pts))
    return replace(profile, entries=tuple(entries))


def _kind_label(entry: ProfileEntry) -> str:
    return f"{type(entry.kind).__name__}{entry.kind.wh_type()}"


def eigenvalue_order(k: int, d: int) -> int:
    return d // math.gcd(k, d)


def divisibility_candidates(profile: SingularityProfile) -> set[int]:
    """k in [1, d-1] whose eigenvalue exp(2 pi i k/d) is a root of some local Alexander polynomial."""
    d = profile.curve_degree
    orders: set[int] = set()
    for e in profile.entries:
        orders |= local_alexander(e.kind).eigenvalue_orders
    return {k for k in range(1, d) if eigenvalue_order(k, d) in orders}


def index_set(profile: SingularityProfile, k: int) -> tuple[IndexTerm, ...]:
    d = profile.curve_degree
    terms = []
    for i, e in enumerate(profile.entries):
        g = e.kind.wh_type()
        if a_k_basis(g, d, k):
            terms.append(IndexTerm(i, e.count, _kind_label(e), a_suspension(g, d, k)))
    return tuple(terms)


def analyze_character(
    profile: SingularityProfile,
    k: int,
    use_oracle: bool = False,
    candidates: set[int] | None = None,
) -> CharacterVerdict:
    d = profile.curve_degree
    if not 1 <= k <= d - 1:
        raise ValueError(f"k={k} outside [1, {d - 1}]")
    if candidates is None:
        candidates = divisibility_candidates(profile)
    N = d - profile.ambient_n - 1 - k
    I_k = index_set(profile, k)
    sum_a = sum(t.count * t.a for t in I_k)
    order = eigenvalue_order(k, d)
    evidence = [f"eigenvalue order {order}"]

    if k not in candidates:
        evidence.append("order occurs in no local Alexander polynomial")
        return CharacterVerdict(k, EXCLUDED_BY_DIVISIBILITY, N, I_k, sum_a, tuple(evidence))
    if not I_k:
        evidence.append("I_k empty: zero target, surjectivity is vacuous")
        return CharacterVerdict(k, EXCLUDED_BY_BOUND, N, I_k, sum_a, tuple(evidence))
    if N >= sum_a - 1:
        evidence.append(f"bound holds: N={N} >= sum_a-1={sum_a - 1}")
        return CharacterVerdict(k, EXCLUDED_BY_BOUND, N, I_k, sum_a, tuple(evidence))
    evidence.append(f"bound fails: N={N} < sum_a-1={sum_a - 1}")
    if use_oracle:
        if not profile.has_coordinates:
            raise MissingCoordinates(f"oracle requested for k={k} but the profile has no coordinates")
        from .oracle import certify_vanishing

        result = certify_vanishing(profile, k)
        info = result.to_json()
        if result.certified:
            evidence.append(f"evaluation map surjective: rank {result.rank} = {result.target_dim}")
            return CharacterVerdict(k, EXCLUDED_BY_ORACLE, N, I_k, sum_a, tuple(evidence), info)
        evidence.append(f"evaluation rank {result.rank} < {result.target_dim}: inconclusive")
        return CharacterVerdict(k, NOT_EXCLUDED, N, I_k, sum_a, tuple(evidence), info)
    return CharacterVerdict(k, NOT_EXCLUDED, N, I_k, sum_a, tuple(evidence))


def pair_exclusions(d: int, verdicts: Sequence[CharacterVerdict]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Eigenvalue theta^k is ruled out of h^1 iff both k and d - k are excluded."""
    excluded = tuple(k for k in range(1, d) if verdicts[k - 1].excluded and verdicts[d - k - 1].excluded)
    ex = set(excluded)
    candidates = tuple(k for k in range(d) if k not in ex)
    return excluded, candidates


def analyze_h1(
    profile: SingularityProfile,
    use_oracle: bool = False,
    threads: int | None = None,
) -> AnalysisReport:
    if profile.ambient_n != 2:
        raise ValueError("h^1 analysis needs a plane curve (ambient_n = 2)")
    profile = canonical_profile(profile)
    d = profile.curve_degree
    cands = divisibility_candidates(profile)
    threads = threads or default_threads()

    def run(k: int) -> CharacterVerdict:
        return analyze_character(profile, k, use_oracle, cands)

    ks = range(1, d)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = tuple(pool.map(run, ks))
    else:
        verdicts = tuple(map(run, ks))
    excluded, candidates = pair_exclusions(d, verdicts)
    return AnalysisReport(
        d,
        verdicts,
        excluded,
        candidates,
        identity_dimension=d - 1,
        profile_name=profile.name,
        source=profile.source,
    )
