"""
Self-test battery: one check per acceptance criterion.

Each check returns exact results only. Wall-clock times are collected on the
side and judged against per-criterion limits, so that the JSON payload is
independent of the machine and of the thread count.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .arrangements import (
    build_full_monomial,
    build_monomial,
    builtin_arrangement,
    builtin_profile,
    check_pair_partition,
    oracle_profile,
    rank2_flats,
)
from .assembly import Family, apply_imports, assemble, euler_chi_U
from .engine import EXCLUDED_BY_BOUND, NOT_EXCLUDED, analyze_h1, eigenvalue_order
from .exact_arith import CycloElement, UniPoly
from .oracle import JetTarget, certify_many, check_lemma_bound, random_rational_points
from .wh_local import Brieskorn, OrdinaryMultiple, WHType, a_k_basis, a_suspension, brieskorn_alexander, local_alexander

T_MINUS_1 = UniPoly.from_ints(-1, 1)
CUBIC = UniPoly.from_ints(1, 1, 1)


@dataclass
class CriterionResult:
    id: int
    title: str
    passed: bool
    details: dict
    max_seconds: float = 0.0
    limit: float | None = None

    @property
    def timing_ok(self) -> bool:
        return self.limit is None or self.max_seconds < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.timing_ok

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        t = f"max {self.max_seconds:.2f}s"
        if self.limit is not None:
            t += f" / limit {self.limit:g}s"
        return f"{tag} [{self.id:2d}] {self.title} ({t})"

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "details": self.details}


class _Clock:
    def __init__(self):
        self.worst = 0.0

    def __enter__(self):
        self._t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.worst = max(self.worst, time.perf_counter() - self._t)


@dataclass
class _Run:
    family: Family
    profile: object
    report: object
    assembly: object


def _run_family(family: Family, threads: int) -> _Run:
    prof = family.profile(threads)
    rep = apply_imports(analyze_h1(prof, threads=threads), family)
    return _Run(family, prof, rep, assemble(prof, rep, family))


def _engine_orders(run: _Run) -> list[int]:
    d = run.report.d
    return sorted({eigenvalue_order(k, d) for k in run.report.h1_candidates})


# ------------------------------------------------------------------ criteria


def criterion_1(threads: int = 1) -> CriterionResult:
    clock, rows, ok = _Clock(), [], True
    for m in range(2, 13):
        with clock:
            run = _run_family(Family("mmn", m, 3), threads)
        c = 2 if m % 3 == 0 else 1
        expected = T_MINUS_1 ** (3 * m - 1) * CUBIC ** c
        good = run.assembly.delta.expand() == expected and set(_engine_orders(run)) <= {1, 3}
        ok &= good
        rows.append({"m": m, "delta": str(run.assembly.delta), "engine_orders": _engine_orders(run), "ok": good})
    return CriterionResult(1, "A(m,m,3), m=2..12: Delta equals the cubic law", ok, {"instances": rows}, clock.worst, 1.0)


def criterion_2(threads: int = 1) -> CriterionResult:
    clock, rows, ok = _Clock(), [], True
    for m in range(2, 7):
        with clock:
            run = _run_family(Family("mmn", m, 4), threads)
        expected = T_MINUS_1 ** (6 * m - 1) * CUBIC
        good = run.assembly.delta.expand() == expected and set(_engine_orders(run)) <= {1, 3}
        ok &= good
        rows.append({"family": run.family.label, "delta": str(run.assembly.delta), "ok": good})
    for n in (5, 6):
        for m in (2, 3):
            with clock:
                run = _run_family(Family("mmn", m, n), threads)
            d = run.report.d
            good = run.report.resolved_candidates == (0,) and run.assembly.delta.expand() == T_MINUS_1 ** (d - 1)
            ok &= good
            rows.append({
                "family": run.family.label,
                "delta": str(run.assembly.delta),
                "engine_candidates": list(run.report.h1_candidates),
                "imported": sorted(run.report.imported_ks),
                "ok": good,
            })
    return CriterionResult(2, "A(m,m,4) cubic law; A(m,m,5|6) h1 = Id", ok, {"instances": rows}, clock.worst, 5.0)


def criterion_3(threads: int = 1) -> CriterionResult:
    clock, rows, ok = _Clock(), [], True
    for m in range(2, 8):
        with clock:
            run = _run_family(Family("m1n", m, 3), threads)
        mults = run.assembly.delta.cyclotomic_multiplicities()
        good = (3 in mults) == (m % 3 == 1) and mults.get(1) == 3 * m + 2
        expected = T_MINUS_1 ** (3 * m + 2) * (CUBIC if m % 3 == 1 else UniPoly.from_ints(1))
        good &= run.assembly.delta.expand() == expected
        ok &= good
        rows.append({"family": run.family.label, "delta": str(run.assembly.delta), "ok": good})
    for n in (4, 5):
        for m in (2, 3):
            with clock:
                run = _run_family(Family("m1n", m, n), threads)
            d = run.report.d
            good = run.report.resolved_candidates == (0,) and run.assembly.delta.expand() == T_MINUS_1 ** (d - 1)
            ok &= good
            rows.append({
                "family": run.family.label,
                "delta": str(run.assembly.delta),
                "engine_candidates": list(run.report.h1_candidates),
                "imported": sorted(run.report.imported_ks),
                "ok": good,
            })
    return CriterionResult(3, "A(m,1,3) cubic branch law; A(m,1,4|5) h1 = Id", ok, {"instances": rows}, clock.worst)


def _criteria_families() -> list[Family]:
    fams = [Family("mmn", m, 3) for m in range(2, 13)]
    fams += [Family("mmn", m, 4) for m in range(2, 7)]
    fams += [Family("mmn", m, n) for n in (5, 6) for m in (2, 3)]
    fams += [Family("m1n", m, 3) for m in range(2, 8)]
    fams += [Family("m1n", m, n) for n in (4, 5) for m in (2, 3)]
    return fams


def criterion_4(threads: int = 1) -> CriterionResult:
    ok, checked, bad = True, 0, []
    for fam in _criteria_families():
        rep = analyze_h1(fam.profile(threads), threads=threads)
        for v in rep.verdicts:
            if v.status != EXCLUDED_BY_BOUND:
                continue
            checked += 1
            if v.N != rep.d - 3 - v.k or not v.N >= v.sum_a - 1:
                bad.append({"family": fam.label, "k": v.k})
    ok &= not bad
    spots = []
    for m in range(4, 13):
        rep = analyze_h1(Family("mmn", m, 3).profile(threads), threads=threads)
        for k1 in range(1, m - 1):
            k = 3 * k1
            if k % m == 0:
                continue
            v = rep.verdict(k)
            a_vals = sorted({t.a for t in v.I_k})
            good = (
                v.status == EXCLUDED_BY_BOUND
                and v.N == 3 * m - 3 - k
                and a_vals == [m - k1 - 1]
                and v.sum_a == 3 * (m - k1 - 1)
            )
            spots.append({"m": m, "k": k, "N": v.N, "sum_a": v.sum_a, "a": a_vals, "ok": good})
            if len(spots) == 20:
                break
        if len(spots) == 20:
            break
    ok &= len(spots) == 20 and all(s["ok"] for s in spots)
    details = {"bound_verdicts_checked": checked, "violations": bad, "spot_checks": spots}
    return CriterionResult(4, "certificates record N >= sum_a - 1; A(m,m,3) proof values", ok, details)


def criterion_5(threads: int = 1) -> CriterionResult:
    rep = analyze_h1(builtin_profile("G31"), threads=threads)
    v = rep.verdict(10)
    ok = v.status == NOT_EXCLUDED and v.N == 47 and v.sum_a - 1 == 119 and not v.bound_holds
    ok &= [(t.count, t.a) for t in v.I_k] == [(30, 4)]
    details = {"k": 10, "status": v.status, "N": v.N, "sum_a_minus_1": v.sum_a - 1, "I_k": [t.to_json() for t in v.I_k]}
    return CriterionResult(5, "G31, k=10: the bound fails (47 < 119)", ok, details)


def criterion_6(threads: int = 1) -> CriterionResult:
    checks = {"i": 0, "ii": 0, "iii": 0}
    bad = []
    cubic = WHType((1, 1), 3)
    for m in range(1, 11):
        checks["i"] += 1
        if a_suspension(cubic, 3 * m, m) != 1 or {k for k in range(1, 3 * m + 1) if a_k_basis(cubic, 3 * m, k)} != {m}:
            bad.append(["i", m])
    for m in range(3, 11):
        g = WHType((1, 1), m)
        for q in range(1, 7):
            d = q * m
            for k1 in range(1, m - 1):
                checks["ii"] += 1
                if a_suspension(g, d, q * k1) != m - k1 - 1:
                    bad.append(["ii", m, q, k1])
            nonzero = {k for k in range(1, d + 1) if a_k_basis(g, d, k)}
            if nonzero != {q * k1 for k1 in range(1, m - 1)}:
                bad.append(["ii-support", m, q])
    for m in range(3, 11):
        g = WHType((1, 1), m)
        for d in range(2, 31):
            gam = math.gcd(m, d)
            d1, m1 = d // gam, m // gam
            for k1 in range(1, gam):
                k = k1 * d1
                checks["iii"] += 1
                a = a_suspension(g, d, k)
                if a != m - 1 - k1 * m1 or a * d != m * (d - k) - d:
                    bad.append(["iii", m, d, k])
            nonzero = {k for k in range(1, d + 1) if a_k_basis(g, d, k)}
            if not nonzero <= {k1 * d1 for k1 in range(1, gam)}:
                bad.append(["iii-support", m, d])
    return CriterionResult(6, "local jet orders a(g,k) on the worked local examples", not bad,
                           {"checks": checks, "failures": bad})


def _expected_flat_counts(m: int, n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for mult, c in ((m, math.comb(n, 2)), (3, math.comb(n, 3) * m * m),
                    (2, math.comb(n, 2) * math.comb(n - 2, 2) * m * m // 2)):
        if c:
            out[mult] = out.get(mult, 0) + c
    return dict(sorted(out.items()))


def criterion_7(threads: int = 1) -> CriterionResult:
    clock, rows, ok = _Clock(), [], True
    for m in range(2, 5):
        for n in range(3, 7):
            A = build_monomial(m, n)
            with clock:
                flats = rank2_flats(A, threads)
            counts: dict[int, int] = {}
            for f in flats:
                counts[f.multiplicity] = counts.get(f.multiplicity, 0) + 1
            counts = dict(sorted(counts.items()))
            good = counts == _expected_flat_counts(m, n) and check_pair_partition(A, flats)
            ok &= good
            rows.append({"family": f"A({m},{m},{n})", "d": len(A), "counts": {str(k): v for k, v in counts.items()}, "ok": good})
    others = [build_full_monomial(m, n) for m in (2, 3) for n in (3, 4)]
    others += [builtin_arrangement("G23"), builtin_arrangement("G25")]
    for A in others:
        flats = rank2_flats(A, threads)
        good = check_pair_partition(A, flats)
        ok &= good
        rows.append({"d": len(A), "pair_partition": good})
    return CriterionResult(7, "rank-2 flat counts and the pair-partition identity", ok, {"arrangements": rows}, clock.worst, 30.0)


def criterion_8(threads: int = 1) -> CriterionResult:
    rows, ok = [], True
    for m in range(2, 9):
        closed = local_alexander(OrdinaryMultiple(m)).alexander.expand()
        product = brieskorn_alexander(m, m).expand()
        good = closed == product and closed.degree == (m - 1) ** 2
        good &= local_alexander(Brieskorn(m, m)).alexander.expand() == closed
        ok &= good
        rows.append({"m": m, "degree": closed.degree, "ok": good})
    return CriterionResult(8, "ordinary m-fold point Alexander polynomial, two ways", ok, {"instances": rows})


def lemma_configurations(seed: int = 20240517, count: int = 50) -> list[list[JetTarget]]:
    rng = random.Random(seed)
    configs = []
    for _ in range(count):
        r = rng.randint(1, 4)
        pts = random_rational_points(r, rng)
        configs.append([JetTarget(p, rng.randint(1, 4)) for p in pts])
    return configs


def collinear_witness() -> list[JetTarget]:
    return [JetTarget((CycloElement.from_int(1, i), CycloElement.from_int(1, 2 * i)), 3) for i in range(3)]


def criterion_9(threads: int = 1) -> CriterionResult:
    clock = _Clock()
    rows, ok = [], True
    t0 = time.perf_counter()
    for targets in lemma_configurations():
        rep = check_lemma_bound(targets)
        ok &= rep.full_at_bound
        rows.append([rep.sum_a, rep.target_dim, rep.rank_at_bound])
    w = check_lemma_bound(collinear_witness())
    witness = w.to_json()
    ok &= w.full_at_bound and w.rank_below is not None and w.rank_below < w.target_dim
    clock.worst = time.perf_counter() - t0
    return CriterionResult(9, "fat-point evaluation surjective at N = sum(a) - 1", ok,
                           {"configurations": rows, "collinear_witness": witness}, clock.worst, 60.0)


def criterion_10(threads: int = 1) -> CriterionResult:
    rows, ok = [], True
    items = [(fam.label, fam.profile(threads), _run_family(fam, threads).assembly.delta) for fam in _criteria_families()]
    for j in (23, 25):
        fam = Family("exceptional", j=j)
        run = _run_family(fam, threads)
        items.append((fam.label, run.profile, run.assembly.delta))
    g31 = builtin_profile("G31")
    rep = analyze_h1(g31, threads=threads)
    items.append(("G31", g31, assemble(g31, rep, Family("exceptional", j=31)).delta))
    for label, prof, delta in items:
        chi = euler_chi_U(prof, delta, strict=False)
        good = chi.consistent and chi.degree_identity
        ok &= good
        rows.append({"profile": label, "chi_U": chi.chi_U, "deg_delta1": delta.degree,
                     "deg_delta2": None if chi.delta2 is None else chi.delta2.degree, "ok": good})
    return CriterionResult(10, "Euler characteristic consistency of Delta^2", ok, {"profiles": rows})


def criterion_11(threads: int = 1) -> CriterionResult:
    fam = Family("exceptional", j=23)
    run = _run_family(fam, threads)
    rep = run.report
    nontrivial = [k for k in rep.h1_candidates if k]
    covered = {}
    for k in range(1, rep.d):
        if k in rep.h1_excluded:
            covered[k] = "engine"
    for f in rep.imported_facts:
        covered[f["k"]] = "import: " + f["rule"]
    ok = run.assembly.delta.expand() == T_MINUS_1 ** 14 and nontrivial == [3, 5, 6, 9, 10, 12]
    ok &= all(k in covered for k in range(1, rep.d))
    prof, _ = oracle_profile(builtin_arrangement("G23"))
    ks = [v.k for v in analyze_h1(prof, threads=threads).verdicts if v.status == NOT_EXCLUDED]
    oracle = {str(r.k): r.to_json() for r in certify_many(prof, ks, threads)}
    details = {
        "delta": str(run.assembly.delta),
        "nontrivial_candidates": nontrivial,
        "resolution": {str(k): covered[k] for k in nontrivial},
        "oracle_experiment": oracle,
    }
    return CriterionResult(11, "G23 end to end: Delta = (t-1)^14", ok, details)


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def battery_json(results: list[CriterionResult]) -> str:
    return json.dumps([r.to_json() for r in results], sort_keys=True, indent=2)


def criterion_12(threads: int = 1, ids: tuple[int, ...] = tuple(range(1, 12))) -> CriterionResult:
    t0 = time.perf_counter()
    digests = {}
    for t in (1, 4, 8):
        digests[t] = battery_json([CRITERIA[i](t) for i in ids])
    same = len(set(digests.values())) == 1
    details = {"threads": [1, 4, 8], "criteria": list(ids), "bytes": len(digests[1]), "identical": same}
    return CriterionResult(12, "selftest JSON identical for 1, 4 and 8 threads", same, details, time.perf_counter() - t0)


def run_battery(ids: list[int] | None = None, threads: int = 1) -> list[CriterionResult]:
    ids = ids or list(range(1, 13))
    out = []
    for i in ids:
        out.append(run_criterion(i, threads))
    return out


def run_criterion(i: int, threads: int = 1) -> CriterionResult:
    """Run one criterion; criteria without per-instance timing report their total time."""
    t0 = time.perf_counter()
    if i == 12:
        res = criterion_12(threads)
    elif i in CRITERIA:
        res = CRITERIA[i](threads)
    else:
        raise KeyError(f"no criterion {i}")
    if res.limit is None and not res.max_seconds:
        res.max_seconds = time.perf_counter() - t0
    return res
