"""
Central hyperplane arrangements over Q(zeta_m).

Builders for the monomial families A(m,m,n) and A(m,1,n), rank-2 flat
enumeration, singularity profiles of generic plane sections, explicit
planar singular points for the evaluation oracle, and file I/O.
"""

from __future__ import annotations

import itertools
import json
import re
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ChartHitsSingularity, InvariantViolation, OutOfRange, ParseError
from .exact_arith import CycloElement, parse_z
from .wh_local import OrdinaryMultiple, SingularityKind, kind_from_json, milnor_number

Covector = tuple[CycloElement, ...]
Point = tuple[CycloElement, ...]

_TOKEN = re.compile(r"\S+")


def _normalize(vec: Sequence[CycloElement]) -> Covector:
    for c in vec:
        if not c.is_zero():
            inv = c.invert()
            return tuple(x * inv for x in vec)
    raise ValueError("zero covector")


def _key(vec: Sequence[CycloElement]) -> tuple:
    return tuple(c.sort_key() for c in vec)


@dataclass(frozen=True)
class Hyperplane:
    covector: Covector
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "covector", _normalize(self.covector))

    def __call__(self, point: Sequence[CycloElement]) -> CycloElement:
        acc = CycloElement.zero(self.covector[0].order)
        for c, x in zip(self.covector, point):
            if not c.is_zero():
                acc = acc + c * x
        return acc


@dataclass(frozen=True)
class Arrangement:
    field_order: int
    dim: int
    hyperplanes: tuple[Hyperplane, ...]

    def __post_init__(self):
        seen = set()
        for h in self.hyperplanes:
            if len(h.covector) != self.dim:
                raise ValueError(f"hyperplane {h.label or h.covector} has wrong length")
            if h.covector[0].order != self.field_order:
                raise ValueError("hyperplane coefficients live in the wrong field")
            k = _key(h.covector)
            if k in seen:
                raise ValueError(f"proportional hyperplanes ({h.label or 'unnamed'})")
            seen.add(k)

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def to_text(self) -> str:
        lines = [f"cyclo {self.field_order}", f"dim {self.dim}"]
        for h in self.hyperplanes:
            row = " ".join(str(c).replace(" ", "") for c in h.covector)
            lines.append(row + (f"  # {h.label}" if h.label else ""))
        return "\n".join(lines) + "\n"


def _coordinate_covector(order: int, n: int, entries: dict[int, CycloElement]) -> Covector:
    zero = CycloElement.zero(order)
    return tuple(entries.get(i, zero) for i in range(n))


def _monomial_hyperplanes(m: int, n: int) -> list[Hyperplane]:
    one = CycloElement.one(m)
    out = []
    for i, j in itertools.combinations(range(n), 2):
        for a in range(m):
            cov = _coordinate_covector(m, n, {i: one, j: -CycloElement.zeta(m, a)})
            out.append(Hyperplane(cov, f"x{i}-z^{a}*x{j}"))
    return out


def build_monomial(m: int, n: int) -> Arrangement:
    """A(m,m,n): the hyperplanes x_i - zeta^a x_j, i < j, 0 <= a < m."""
    if not ((m >= 2 and n >= 3) or (m == 1 and n >= 4)):
        raise OutOfRange(f"A({m},{m},{n}) needs m >= 2, n >= 3 or m = 1, n >= 4")
    return Arrangement(m, n, tuple(_monomial_hyperplanes(m, n)))


def build_full_monomial(m: int, n: int) -> Arrangement:
    """A(m,1,n): the monomial hyperplanes plus the n coordinate hyperplanes."""
    if m < 2 or n < 3:
        raise OutOfRange(f"A({m},1,{n}) needs m >= 2, n >= 3")
    one = CycloElement.one(m)
    coords = [Hyperplane(_coordinate_covector(m, n, {k: one}), f"x{k}") for k in range(n)]
    return Arrangement(m, n, tuple(_monomial_hyperplanes(m, n) + coords))


@dataclass(frozen=True)
class Flat2:
    basis: tuple[Covector, Covector]
    members: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


def _rref_pair(u: Covector, v: Covector) -> tuple[Covector, Covector]:
    p1 = next(i for i, c in enumerate(u) if not c.is_zero())
    r1 = _normalize(u)
    f = v[p1]
    r2 = tuple(b - f * a for a, b in zip(r1, v)) if not f.is_zero() else v
    p2 = next(i for i, c in enumerate(r2) if not c.is_zero())
    r2 = _normalize(r2)
    g = r1[p2]
    if not g.is_zero():
        r1 = tuple(a - g * b for a, b in zip(r1, r2))
    return (r1, r2) if p1 < p2 else (r2, r1)


def _flats_from_row(hyps: Sequence[Hyperplane], i: int) -> list[tuple[tuple, tuple, int, int]]:
    out = []
    u = hyps[i].covector
    for j in range(i + 1, len(hyps)):
        basis = _rref_pair(u, hyps[j].covector)
        out.append((_key(basis[0]) + _key(basis[1]), basis, i, j))
    return out


def rank2_flats(A: Arrangement, threads: int = 1) -> list[Flat2]:
    """
    Every codimension-2 intersection of the arrangement with the hyperplanes
    containing it, grouped by the reduced echelon form of a cutting pair.
    Output order is canonical: sorted by echelon key, independent of input order.
    """
    hyps = A.hyperplanes
    rows = range(len(hyps))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda i: _flats_from_row(hyps, i), rows))
    else:
        chunks = [_flats_from_row(hyps, i) for i in rows]
    groups: dict[tuple, tuple[tuple, set[int]]] = {}
    for chunk in chunks:
        for key, basis, i, j in chunk:
            entry = groups.setdefault(key, (basis, set()))
            entry[1].update((i, j))
    return [Flat2(groups[k][0], tuple(sorted(groups[k][1]))) for k in sorted(groups)]


def check_pair_partition(A: Arrangement, flats: Sequence[Flat2]) -> bool:
    return sum(math.comb(f.multiplicity, 2) for f in flats) == math.comb(len(A), 2)


@dataclass(frozen=True)
class ProfileEntry:
    count: int
    kind: SingularityKind
    points: tuple[Point, ...] | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("profile entry counts must be positive")
        if self.points is not None and len(self.points) != self.count:
            raise ValueError("number of points differs from count")


@dataclass(frozen=True)
class SingularityProfile:
    curve_degree: int
    entries: tuple[ProfileEntry, ...]
    ambient_n: int = 2
    field_order: int | None = None
    name: str | None = None
    source: str | None = None

    @property
    def has_coordinates(self) -> bool:
        return all(e.points is not None for e in self.entries)

    @property
    def point_count(self) -> int:
        return sum(e.count for e in self.entries)

    def counts_by_multiplicity(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e in self.entries:
            out[e.kind.multiplicity] = out.get(e.kind.multiplicity, 0) + e.count
        return dict(sorted(out.items()))

    def milnor_total(self) -> int:
        return sum(e.count * milnor_number(e.kind.wh_type()) for e in self.entries)

    def pair_count_ok(self) -> bool:
        """Sum of count*C(mult,2) equals C(d,2); meaningful for line arrangements."""
        lhs = sum(e.count * math.comb(e.kind.multiplicity, 2) for e in self.entries)
        return lhs == math.comb(self.curve_degree, 2)

    def without_coordinates(self) -> SingularityProfile:
        return SingularityProfile(
            self.curve_degree,
            tuple(ProfileEntry(e.count, e.kind) for e in self.entries),
            self.ambient_n,
            None,
            self.name,
            self.source,
        )

    def to_json(self) -> dict:
        out: dict = {
            "degree": self.curve_degree,
            "ambient_n": self.ambient_n,
            "singularities": [{"count": e.count, "kind": e.kind.to_json()} for e in self.entries],
        }
        if self.has_coordinates and self.entries:
            out["coordinates"] = {
                "field_order": self.field_order,
                "points": [[[str(c) for c in p] for p in e.points] for e in self.entries],
            }
        if self.name:
            out["name"] = self.name
        if self.source:
            out["source"] = self.source
        return out


def _profile_from_flats(A: Arrangement, flats: Sequence[Flat2]) -> SingularityProfile:
    counts: dict[int, int] = {}
    for f in flats:
        counts[f.multiplicity] = counts.get(f.multiplicity, 0) + 1
    entries = tuple(ProfileEntry(c, OrdinaryMultiple(mult)) for mult, c in sorted(counts.items()))
    return SingularityProfile(len(A), entries, 2)


def section_profile(A: Arrangement, threads: int = 1) -> SingularityProfile:
    """Singularities of the curve cut out by a generic plane section: one per rank-2 flat."""
    return _profile_from_flats(A, rank2_flats(A, threads))


def flat_point(flat: Flat2) -> Point:
    """Kernel vector of a rank-2 flat in a 3-dimensional arrangement."""
    r1, r2 = flat.basis
    if len(r1) != 3:
        raise ValueError("flat points are only defined in dimension 3")
    p1 = next(i for i, c in enumerate(r1) if not c.is_zero())
    p2 = next(i for i, c in enumerate(r2) if not c.is_zero())
    free = ({0, 1, 2} - {p1, p2}).pop()
    order = r1[0].order
    v = [CycloElement.zero(order)] * 3
    v[free] = CycloElement.one(order)
    v[p1] = -r1[free]
    v[p2] = -r2[free]
    return tuple(v)


def planar_points(A: Arrangement, chart: int = 0) -> SingularityProfile:
    """
    Profile of a planar arrangement with exact affine coordinates of every
    singular point in the chart x_chart != 0 (coordinates in increasing index order).
    """
    if A.dim != 3:
        raise ValueError("planar_points needs a 3-dimensional arrangement")
    flats = rank2_flats(A)
    by_mult: dict[int, list[Point]] = {}
    for f in flats:
        v = flat_point(f)
        if v[chart].is_zero():
            raise ChartHitsSingularity(f"flat of hyperplanes {list(f.members)} lies on x{chart} = 0")
        inv = v[chart].invert()
        coords = tuple(v[i] * inv for i in range(3) if i != chart)
        by_mult.setdefault(f.multiplicity, []).append(coords)
    entries = tuple(
        ProfileEntry(len(pts), OrdinaryMultiple(mult), tuple(pts)) for mult, pts in sorted(by_mult.items())
    )
    return SingularityProfile(len(A), entries, 2, A.field_order)


def linear_substitution(A: Arrangement, matrix: Sequence[Sequence], label: str = "") -> Arrangement:
    """
    Pull the arrangement back along x = S y, S an n x r matrix with rational or
    field entries: each covector c becomes c S. Used both for coordinate
    changes (r = n) and for plane sections (r = 3).
    """
    order = A.field_order
    rows = [[e if isinstance(e, CycloElement) else CycloElement.from_int(order, Fraction(e)) for e in row] for row in matrix]
    if len(rows) != A.dim:
        raise ValueError("substitution matrix has the wrong number of rows")
    r = len(rows[0])
    out = []
    for h in A.hyperplanes:
        cov = []
        for col in range(r):
            acc = CycloElement.zero(order)
            for c, row in zip(h.covector, rows):
                if not c.is_zero() and not row[col].is_zero():
                    acc = acc + c * row[col]
            cov.append(acc)
        if all(c.is_zero() for c in cov):
            raise ValueError(f"hyperplane {h.label} contains the section")
        out.append(Hyperplane(tuple(cov), h.label))
    return Arrangement(order, r, tuple(out))


def chart_shear(A: Arrangement, seed: int = 0, tries: int = 200) -> tuple[Arrangement, tuple[int, int]]:
    """
    Random rational change of coordinates making x0 = 0 avoid every singular
    point: x0 -> x0 - a1 x1 - a2 x2. Deterministic for a given seed.
    """
    rng = random.Random(seed)
    flats = rank2_flats(A)
    pts = [flat_point(f) for f in flats]
    for _ in range(tries):
        a1, a2 = rng.randint(-7, 7), rng.randint(-7, 7)
        if all(not (p[0] + p[1] * a1 + p[2] * a2).is_zero() for p in pts):
            S = [[1, -a1, -a2], [0, 1, 0], [0, 0, 1]]
            return linear_substitution(A, S), (a1, a2)
    raise ChartHitsSingularity("no admissible shear found")


def oracle_profile(A: Arrangement, seed: int = 0) -> tuple[SingularityProfile, Arrangement]:
    """Coordinates for the oracle: chart x0 if admissible, else a seeded shear, re-validated."""
    try:
        return planar_points(A, 0), A
    except ChartHitsSingularity:
        B, _ = chart_shear(A, seed)
        prof = planar_points(B, 0)
        if prof.counts_by_multiplicity() != section_profile(A).counts_by_multiplicity():
            raise InvariantViolation("coordinate change altered the singularity profile")
        return prof, B


def validate_section(A: Arrangement, S: Sequence[Sequence]) -> Arrangement:
    """Restrict to the plane x = S y and check genericity against the flat-derived profile."""
    try:
        B = linear_substitution(A, S)
    except ValueError as exc:
        raise InvariantViolation(f"section matrix is not generic: {exc}") from None
    if section_profile(B).counts_by_multiplicity() != section_profile(A).counts_by_multiplicity():
        raise InvariantViolation("section matrix is not generic for this arrangement")
    return B


# ---------------------------------------------------------------- file formats


def parse_arrangement(text: str) -> Arrangement:
    lines = text.splitlines()
    header: dict[str, int] = {}
    hyps: list[Hyperplane] = []
    seen: dict[tuple, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            continue
        if len(header) < 2:
            parts = body.split()
            expected = "cyclo" if not header else "dim"
            if len(parts) != 2 or parts[0] != expected:
                raise ParseError(f"expected '{expected} <int>'", lineno, 1)
            try:
                value = int(parts[1])
            except ValueError:
                raise ParseError(f"bad integer {parts[1]!r}", lineno, raw.index(parts[1]) + 1) from None
            if value < 1:
                raise ParseError(f"{expected} must be positive", lineno, raw.index(parts[1]) + 1)
            header[expected] = value
            continue
        m, n = header["cyclo"], header["dim"]
        tokens = [(tok.start(), tok.group()) for tok in _TOKEN.finditer(body)]
        if len(tokens) != n:
            raise ParseError(f"expected {n} entries, found {len(tokens)}", lineno, 1)
        cov = []
        for col, tok in tokens:
            try:
                cov.append(parse_z(tok, m, lineno))
            except ParseError as exc:
                raise ParseError(str(exc).split(": ", 1)[-1], lineno, col + (exc.column or 1)) from None
        if all(c.is_zero() for c in cov):
            raise ParseError("zero covector", lineno, 1)
        hyp = Hyperplane(tuple(cov), comment.strip())
        key = _key(hyp.covector)
        if key in seen:
            raise ParseError(f"hyperplane proportional to the one on line {seen[key]}", lineno, 1)
        seen[key] = lineno
        hyps.append(hyp)
    if len(header) < 2:
        raise ParseError("missing 'cyclo' / 'dim' header", len(lines) or 1, 1)
    try:
        return Arrangement(header["cyclo"], header["dim"], tuple(hyps))
    except ValueError as exc:
        raise ParseError(str(exc)) from None



def from_file(path: str | Path) -> Arrangement:
    return parse_arrangement(Path(path).read_text(encoding="utf-8"))


def profile_from_json(obj: dict, check_pairs: bool = True) -> SingularityProfile:
    try:
        d = int(obj["degree"])
        ambient = int(obj.get("ambient_n", 2))
        sing = obj["singularities"]
        kinds = [(int(s["count"]), kind_from_json(s["kind"])) for s in sing]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed profile: {exc}") from None
    coords = obj.get("coordinates")
    order = None
    pts_per_entry: list = [None] * len(kinds)
    if coords:
        order = int(coords["field_order"])
        pts_per_entry = coords["points"]
        if len(pts_per_entry) != len(kinds):
            raise ParseError("coordinates do not align with singularities")
    entries = []
    for (count, kind), pts in zip(kinds, pts_per_entry):
        parsed = None
        if pts is not None:
            parsed = tuple(tuple(parse_z(str(c), order) for c in p) for p in pts)
        try:
            entries.append(ProfileEntry(count, kind, parsed))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    prof = SingularityProfile(d, tuple(entries), ambient, order, obj.get("name"), obj.get("source"))
    if check_pairs and all(isinstance(e.kind, OrdinaryMultiple) for e in prof.entries):
        if not prof.pair_count_ok():
            raise InvariantViolation(
                f"pair count {sum(e.count * math.comb(e.kind.multiplicity, 2) for e in prof.entries)}"
                f" != C({d},2) = {math.comb(d, 2)}"
            )
    return prof


BUILTIN_PROFILES = ("G23", "G31")


def builtin_profile(name: str) -> SingularityProfile:
    if name not in BUILTIN_PROFILES:
        raise KeyError(f"unknown built-in profile {name!r}; known: {', '.join(BUILTIN_PROFILES)}")
    text = resources.files("monogauge.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return profile_from_json(json.loads(text))


BUILTIN_ARRANGEMENTS = ("G23", "G25")


def builtin_arrangement(name: str) -> Arrangement:
    """Hyperplane coordinates shipped with the package (icosahedral G23, Hessian G25)."""
    if name not in BUILTIN_ARRANGEMENTS:
        raise KeyError(f"unknown built-in arrangement {name!r}; known: {', '.join(BUILTIN_ARRANGEMENTS)}")
    return parse_arrangement(resources.files("monogauge.data").joinpath(f"{name}.arr").read_text(encoding="utf-8"))


def arrangement_from_file(path: str | Path) -> Arrangement:
    ref = str(path)
    if ref.startswith("builtin:"):
        return builtin_arrangement(ref.split(":", 1)[1])
    return from_file(path)


def profile_from_file(path: str | Path) -> SingularityProfile:
    ref = str(path)
    if ref.startswith("builtin:"):
        return builtin_profile(ref.split(":", 1)[1])
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return profile_from_json(obj)
