from __future__ import annotations

import json
import math
import random

import pytest

from monogauge.arrangements import (
    Arrangement,
    Hyperplane,
    builtin_arrangement,
    builtin_profile,
    build_full_monomial,
    build_monomial,
    chart_shear,
    check_pair_partition,
    flat_point,
    linear_substitution,
    oracle_profile,
    parse_arrangement,
    planar_points,
    profile_from_file,
    profile_from_json,
    rank2_flats,
    section_profile,
    validate_section,
)
from monogauge.errors import ChartHitsSingularity, InvariantViolation, OutOfRange, ParseError
from monogauge.exact_arith import CycloElement
from monogauge.wh_local import OrdinaryMultiple


def counts(A):
    out = {}
    for f in rank2_flats(A):
        out[f.multiplicity] = out.get(f.multiplicity, 0) + 1
    return dict(sorted(out.items()))


@pytest.mark.parametrize("m, n, size", [(2, 3, 6), (3, 3, 9), (1, 4, 6), (4, 5, 40)])
def test_build_monomial_sizes(m, n, size):
    A = build_monomial(m, n)
    assert len(A) == size and A.field_order == m


@pytest.mark.parametrize("m, n, size", [(2, 3, 9), (3, 3, 12), (4, 3, 15), (2, 4, 16)])
def test_build_full_monomial_sizes(m, n, size):
    assert len(build_full_monomial(m, n)) == size


@pytest.mark.parametrize("args", [(0, 3), (2, 2), (1, 3)])
def test_build_monomial_out_of_range(args):
    with pytest.raises(OutOfRange):
        build_monomial(*args)


@pytest.mark.parametrize("args", [(1, 3), (2, 2)])
def test_build_full_monomial_out_of_range(args):
    with pytest.raises(OutOfRange):
        build_full_monomial(*args)


def test_a223_flats():
    assert counts(build_monomial(2, 3)) == {2: 3, 3: 4}


@pytest.mark.parametrize("m", range(2, 5))
@pytest.mark.parametrize("n", range(3, 7))
def test_monomial_closed_forms(m, n):
    expected = {}
    for mult, c in ((m, math.comb(n, 2)), (3, math.comb(n, 3) * m * m),
                    (2, math.comb(n, 2) * math.comb(n - 2, 2) * m * m // 2)):
        if c:
            expected[mult] = expected.get(mult, 0) + c
    A = build_monomial(m, n)
    assert counts(A) == dict(sorted(expected.items()))
    assert check_pair_partition(A, rank2_flats(A))


@pytest.mark.parametrize("m", range(2, 7))
def test_full_monomial_n3(m):
    prof = section_profile(build_full_monomial(m, 3))
    assert prof.curve_degree == 3 * m + 3
    assert prof.counts_by_multiplicity()[m + 2] == 3
    assert prof.pair_count_ok()


def test_a413_profile():
    prof = section_profile(build_full_monomial(4, 3))
    assert prof.curve_degree == 15
    assert prof.counts_by_multiplicity() == {2: 12, 3: 16, 6: 3}


def test_flats_independent_of_order():
    A = build_monomial(3, 4)
    hyps = list(A.hyperplanes)
    random.Random(7).shuffle(hyps)
    B = Arrangement(A.field_order, A.dim, tuple(hyps))
    key = lambda fl: sorted(tuple(sorted(A.hyperplanes[i].label for i in f.members)) for f in fl)
    relabel = lambda fl: sorted(tuple(sorted(B.hyperplanes[i].label for i in f.members)) for f in fl)
    assert key(rank2_flats(A)) == relabel(rank2_flats(B))
    assert [f.multiplicity for f in rank2_flats(A)] == [f.multiplicity for f in rank2_flats(B)]


def test_threads_do_not_change_flats():
    A = build_monomial(3, 5)
    assert rank2_flats(A, threads=1) == rank2_flats(A, threads=4)


def test_planar_points_a223_chart_problem():
    with pytest.raises(ChartHitsSingularity):
        planar_points(build_monomial(2, 3), 0)


def test_planar_points_after_shear_satisfy_equations():
    for A in (build_monomial(2, 3), build_monomial(3, 3), build_full_monomial(2, 3)):
        prof, B = oracle_profile(A, seed=3)
        one = CycloElement.one(B.field_order)
        for e in prof.entries:
            for p in e.points:
                on = [h for h in B.hyperplanes if h((one,) + tuple(p)).is_zero()]
                assert len(on) == e.kind.multiplicity


def test_planar_points_a333_counts():
    prof, _ = oracle_profile(build_monomial(3, 3))
    assert prof.point_count == 12
    irrational = sum(1 for e in prof.entries for p in e.points if not all(c.is_rational() for c in p))
    assert irrational >= 6


def test_origin_point():
    # x1 = x2 = 0 lies in the chart x0 = 1 at the origin
    A = build_monomial(2, 3)
    B, _ = chart_shear(A, 0)
    prof = planar_points(B, 0)
    assert all(len(p) == 2 for e in prof.entries for p in e.points)


def test_flat_point_kernel():
    A = build_monomial(3, 3)
    for f in rank2_flats(A):
        v = flat_point(f)
        assert all(A.hyperplanes[i](v).is_zero() for i in f.members)


def test_linear_substitution_section():
    A = build_monomial(2, 4)
    S = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 3, 5]]
    B = validate_section(A, S)
    assert B.dim == 3 and len(B) == len(A)
    with pytest.raises(InvariantViolation):
        validate_section(A, [[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1]])


def test_hyperplane_normalization():
    z = CycloElement.zeta(3)
    h = Hyperplane((z, z * z, CycloElement.zero(3)))
    assert h.covector[0] == CycloElement.one(3)


ARR_TEXT = """# sample
cyclo 3
dim 3
1 0 0
0 1 0
0 0 1
1 -z -z^2   # a line
"""


def test_parse_arrangement():
    A = parse_arrangement(ARR_TEXT)
    assert len(A) == 4 and A.field_order == 3
    assert parse_arrangement(A.to_text()).hyperplanes == A.hyperplanes


@pytest.mark.parametrize(
    "text, line",
    [
        ("cyclo 3\ndim 3\n1 0\n", 3),
        ("cyclo 3\ndim 3\n1 0 q\n", 3),
        ("cyclo 3\ndim x\n", 2),
        ("cyclo 3\ndim 3\n1 0 0\n2 0 0\n", 4),
    ],
)
def test_parse_arrangement_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_arrangement(text)
    assert info.value.line == line


def test_builtin_profiles():
    g23 = builtin_profile("G23")
    assert g23.curve_degree == 15
    assert [(e.count, e.kind) for e in g23.entries] == [(15, OrdinaryMultiple(2)), (10, OrdinaryMultiple(3)), (6, OrdinaryMultiple(5))]
    assert g23.pair_count_ok()
    g31 = builtin_profile("G31")
    assert g31.curve_degree == 60
    assert g31.counts_by_multiplicity() == {2: 360, 3: 320, 6: 30}
    assert "Orlik" in g31.source


def test_builtin_arrangements_match_profiles():
    g23 = section_profile(builtin_arrangement("G23"))
    assert g23.counts_by_multiplicity() == builtin_profile("G23").counts_by_multiplicity()
    assert section_profile(builtin_arrangement("G25")).counts_by_multiplicity() == {2: 12, 4: 9}


def test_profile_json_round_trip(tmp_path):
    prof, _ = oracle_profile(build_monomial(3, 3))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(prof.to_json()))
    back = profile_from_file(path)
    assert back.to_json() == prof.to_json()
    assert back.has_coordinates


def test_profile_pair_count_violation():
    obj = {"degree": 15, "singularities": [{"count": 14, "kind": {"ordinary": 2}}, {"count": 10, "kind": {"ordinary": 3}},
                                          {"count": 6, "kind": {"ordinary": 5}}]}
    with pytest.raises(InvariantViolation):
        profile_from_json(obj)
    assert profile_from_json(obj, check_pairs=False).point_count == 30


def test_profile_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"degree\": 3,\n  oops\n}")
    with pytest.raises(ParseError) as info:
        profile_from_file(bad)
    assert info.value.line == 3
    with pytest.raises(KeyError):
        profile_from_file("builtin:G99")


def test_linear_substitution_rejects_containing_section():
    A = build_monomial(2, 3)
    with pytest.raises(ValueError):
        linear_substitution(A, [[1, 0], [1, 0], [0, 1]])
