"""
Evaluation-rank oracle.

A degree-N form h is sent to the jets of h(1, y1, y2) modulo m^a at each
singular point with a nonzero local piece. If that map is onto, the
localization map factoring through it is onto as well, which certifies the
vanishing of the corresponding eigenspace piece. The test is one-sided: a
rank deficit proves nothing.

Rank is computed exactly over Z[zeta_m] by fraction-free elimination, with
an independent rank modulo a prime p = 1 mod m as a lower-bound cross-check.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arrangements import SingularityProfile
from .errors import DuplicatePoint, LemmaCounterexample, MissingCoordinates
from .exact_arith import CycloElement, euler_phi, reduce_mod_phi, ring_mul, zeta_power_table
from .wh_local import a_k_basis, a_suspension


@dataclass(frozen=True)
class JetTarget:
    point: tuple[CycloElement, ...]
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("jet order must be >= 1")

    @property
    def jet_dim(self) -> int:
        return math.comb(self.order + 1, 2)


@dataclass(frozen=True)
class EvalMatrix:
    field_order: int
    rows: tuple[tuple[CycloElement, ...], ...]
    row_labels: tuple[tuple[int, tuple[int, int]], ...]
    columns: tuple[tuple[int, int, int], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)


def plane_monomials(N: int) -> list[tuple[int, int, int]]:
    """Exponents (a0, a1, a2) of degree N, ordered by affine degree a1 + a2, then a1 descending."""
    out = []
    for s in range(N + 1):
        for a1 in range(s, -1, -1):
            out.append((N - s, a1, s - a1))
    return out


def jet_monomials(order: int) -> list[tuple[int, int]]:
    return [(b1, s - b1) for s in range(order) for b1 in range(s, -1, -1)]


def build_eval_matrix(N: int, targets: Sequence[JetTarget], field_order: int | None = None) -> EvalMatrix:
    """
    Rows are (target, jet exponent beta), columns are the degree-N monomials.
    The entry is the Taylor coefficient of u^beta in (b + u)^alpha with
    x0 = 1, i.e. C(a1,b1) p1^(a1-b1) C(a2,b2) p2^(a2-b2).
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if field_order is None:
        field_order = targets[0].point[0].order if targets else 1
    seen = set()
    for t in targets:
        key = tuple(c.sort_key() for c in t.point)
        if key in seen:
            raise DuplicatePoint(f"point {[str(c) for c in t.point]} appears twice")
        seen.add(key)
    cols = plane_monomials(N)
    rows = []
    labels = []
    for ti, t in enumerate(targets):
        p1, p2 = t.point
        pw1 = [CycloElement.one(field_order)]
        pw2 = [CycloElement.one(field_order)]
        for _ in range(N):
            pw1.append(pw1[-1] * p1)
            pw2.append(pw2[-1] * p2)
        for b1, b2 in jet_monomials(t.order):
            row = []
            for _, a1, a2 in cols:
                if b1 > a1 or b2 > a2:
                    row.append(CycloElement.zero(field_order))
                else:
                    row.append(pw1[a1 - b1] * pw2[a2 - b2] * (math.comb(a1, b1) * math.comb(a2, b2)))
            rows.append(tuple(row))
            labels.append((ti, (b1, b2)))
    return EvalMatrix(field_order, tuple(rows), tuple(labels), tuple(cols))


# ------------------------------------------------------------------ Z[zeta] ring


def _units(m: int) -> list[int]:
    return [j for j in range(1, max(m, 2)) if math.gcd(j, m) == 1]


def _conjugate(v: Sequence[int], j: int, m: int) -> list[int]:
    table = zeta_power_table(m)
    out = [0] * len(v)
    for i, c in enumerate(v):
        if c:
            row = table[(i * j) % m]
            for t, r in enumerate(row):
                if r:
                    out[t] += c * r
    return out


def _divisor_data(b: Sequence[int], m: int) -> tuple[list[int], int]:
    """(product of the nontrivial Galois conjugates of b, norm of b)."""
    conj = [1] + [0] * (len(b) - 1)
    for j in _units(m):
        if j != 1:
            conj = ring_mul(conj, _conjugate(b, j, m), m)
    norm_vec = ring_mul(b, conj, m)
    assert not any(norm_vec[1:]), "norm must be rational"
    return conj, norm_vec[0]


def _to_int_rows(M: EvalMatrix) -> list[list[list[int]]]:
    out = []
    for row in M.rows:
        den = 1
        for e in row:
            for c in e.coeffs:
                den = math.lcm(den, c.denominator)
        out.append([[int(c * den) for c in e.coeffs] for e in row])
    return out


def _bareiss_rank(rows: list[list[list[int]]], m: int) -> int:
    """Fraction-free echelon elimination over Z[zeta_m]; divisions by the previous pivot are exact."""
    if not rows:
        return 0
    deg = len(rows[0][0]) if rows[0] else 1
    nrows, ncols = len(rows), len(rows[0])
    M = [[list(e) for e in r] for r in rows]
    prev_conj, prev_norm = [1] + [0] * (deg - 1), 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if any(M[i][c])), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        top = M[r]
        for i in range(r + 1, nrows):
            row = M[i]
            lead = row[c]
            lead_zero = not any(lead)
            for j in range(c + 1, ncols):
                x = ring_mul(piv, row[j], m) if any(row[j]) else [0] * deg
                if not lead_zero and any(top[j]):
                    y = ring_mul(lead, top[j], m)
                    x = [a - b for a, b in zip(x, y)]
                if prev_norm != 1 or any(prev_conj[1:]):
                    if any(x):
                        x = ring_mul(x, prev_conj, m)
                        q = []
                        for a in x:
                            qa, ra = divmod(a, prev_norm)
                            assert ra == 0, "inexact fraction-free division"
                            q.append(qa)
                        x = q
                row[j] = x
            row[c] = [0] * deg
        prev_conj, prev_norm = _divisor_data(piv, m)
        r += 1
    return r


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_with_root(m: int, start: int = 1 << 61) -> tuple[int, int]:
    """Prime p = 1 mod m and a primitive m-th root of unity modulo p."""
    step = max(m, 2)
    p = start - start % step + 1
    while not _is_probable_prime(p):
        p += step
    if m <= 2:
        return p, (p - 1 if m == 2 else 1)
    prime_factors = [q for q in range(2, m + 1) if m % q == 0 and all(q % r for r in range(2, q))]
    g = 2
    while True:
        root = pow(g, (p - 1) // m, p)
        if all(pow(root, m // q, p) != 1 for q in prime_factors):
            return p, root
        g += 1


def modular_rank(M: EvalMatrix) -> tuple[int, int]:
    """
    Rank of the reduction modulo p along zeta -> root. A ring map out of
    Z[zeta], so the result is a lower bound for the rank over Q(zeta).
    """
    m = M.field_order
    p, root = _prime_with_root(m)
    powers = [pow(root, i, p) for i in range(euler_phi(m))]
    A = [[sum(c * w for c, w in zip(e, powers)) % p for e in row] for row in _to_int_rows(M)]
    rank = 0
    ncols = len(M.columns)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        for i in range(rank + 1, len(A)):
            f = A[i][c] * inv % p
            if f:
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank, p


def exact_rank(M: EvalMatrix) -> int:
    """Exact rank over Q(zeta_m). Cross-checked against the modular lower bound."""
    rank = _bareiss_rank(_to_int_rows(M), M.field_order)
    lower, p = modular_rank(M)
    assert lower <= rank, f"modular rank {lower} exceeds exact rank {rank} (p={p})"
    return rank


def dump_matrix(M: EvalMatrix) -> str:
    """One row per line, entries in z-syntax, for external cross-checking."""
    return "\n".join(" ".join(str(e).replace(" ", "") for e in row) for row in M.rows) + "\n"


@dataclass(frozen=True)
class OracleResult:
    k: int
    N: int
    rank: int
    target_dim: int
    columns: int
    targets: int

    @property
    def certified(self) -> bool:
        return self.rank == self.target_dim

    @property
    def status(self) -> str:
        return "Certified" if self.certified else "Inconclusive"

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "status": self.status,
            "N": self.N,
            "rank": self.rank,
            "target_dim": self.target_dim,
            "columns": self.columns,
            "targets": self.targets,
        }


def oracle_targets(profile: SingularityProfile, k: int) -> list[JetTarget]:
    d = profile.curve_degree
    targets = []
    for e in profile.entries:
        g = e.kind.wh_type()
        if not a_k_basis(g, d, k):
            continue
        if e.points is None:
            raise MissingCoordinates(f"entry {e.kind} lies in I_k but carries no coordinates")
        a = a_suspension(g, d, k)
        targets.extend(JetTarget(tuple(p), a) for p in e.points)
    return targets


def certify_vanishing(profile: SingularityProfile, k: int, dump: list | None = None) -> OracleResult:
    d = profile.curve_degree
    N = d - profile.ambient_n - 1 - k
    targets = oracle_targets(profile, k)
    target_dim = sum(t.jet_dim for t in targets)
    if not targets:
        return OracleResult(k, N, 0, 0, 0, 0)
    if N < 0:
        return OracleResult(k, N, 0, target_dim, 0, len(targets))
    M = build_eval_matrix(N, targets, profile.field_order)
    if dump is not None:
        dump.append(dump_matrix(M))
    if target_dim > len(M.columns):
        # more conditions than forms: surjectivity is impossible, skip elimination
        return OracleResult(k, N, modular_rank(M)[0], target_dim, len(M.columns), len(targets))
    return OracleResult(k, N, exact_rank(M), target_dim, len(M.columns), len(targets))


def certify_many(profile: SingularityProfile, ks: Sequence[int], threads: int = 1) -> list[OracleResult]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda k: certify_vanishing(profile, k), ks))
    return [certify_vanishing(profile, k) for k in ks]


@dataclass(frozen=True)
class LemmaReport:
    sum_a: int
    target_dim: int
    rank_at_bound: int
    rank_below: int | None

    @property
    def full_at_bound(self) -> bool:
        return self.rank_at_bound == self.target_dim

    def to_json(self) -> dict:
        return {
            "sum_a": self.sum_a,
            "target_dim": self.target_dim,
            "rank_at_bound": self.rank_at_bound,
            "rank_below": self.rank_below,
        }


def check_lemma_bound(targets: Sequence[JetTarget], field_order: int | None = None) -> LemmaReport:
    """Rank at N = sum(a) - 1 (must be full) and at N = sum(a) - 2 (reported)."""
    s = sum(t.order for t in targets)
    dim = sum(t.jet_dim for t in targets)
    at = exact_rank(build_eval_matrix(s - 1, targets, field_order))
    if at != dim:
        raise LemmaCounterexample(f"rank {at} < {dim} at N = {s - 1}")
    below = exact_rank(build_eval_matrix(s - 2, targets, field_order)) if s >= 2 else None
    return LemmaReport(s, dim, at, below)


def random_rational_points(count: int, rng: random.Random, field_order: int = 1, bound: int = 9) -> list[tuple]:
    pts: list[tuple] = []
    seen = set()
    while len(pts) < count:
        p = tuple(
            CycloElement.from_int(field_order, Fraction(rng.randint(-bound, bound), rng.randint(1, 4)))
            for _ in range(2)
        )
        key = tuple(c.sort_key() for c in p)
        if key not in seen:
            seen.add(key)
            pts.append(p)
    return pts
