from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from monogauge.arrangements import build_full_monomial, build_monomial, builtin_arrangement, builtin_profile, oracle_profile, validate_section
from monogauge.engine import EXCLUDED_BY_BOUND, analyze_h1
from monogauge.errors import DuplicatePoint, InvariantViolation, LemmaCounterexample, MissingCoordinates
from monogauge.exact_arith import CycloElement
from monogauge.oracle import (
    EvalMatrix,
    JetTarget,
    build_eval_matrix,
    certify_vanishing,
    check_lemma_bound,
    dump_matrix,
    exact_rank,
    modular_rank,
    plane_monomials,
    random_rational_points,
)


def q(x, order=1):
    return CycloElement.from_int(order, Fraction(x))


def pt(a, b, order=1):
    return (q(a, order), q(b, order))


def as_ints(M):
    return [[int(e.coeffs[0]) if e.is_rational() else e for e in row] for row in M.rows]


def test_jet_dim():
    assert [JetTarget(pt(0, 0), a).jet_dim for a in (1, 2, 3, 4)] == [1, 3, 6, 10]
    with pytest.raises(ValueError):
        JetTarget(pt(0, 0), 0)


def test_eval_matrix_small_cases():
    assert as_ints(build_eval_matrix(1, [JetTarget(pt(0, 0), 1)])) == [[1, 0, 0]]
    assert as_ints(build_eval_matrix(1, [JetTarget(pt(3, -2), 1)])) == [[1, 3, -2]]
    M = build_eval_matrix(2, [JetTarget(pt(0, 0), 2)])
    assert M.shape == (3, 6)
    assert as_ints(M) == [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]


@pytest.mark.parametrize("N", range(0, 7))
def test_column_count(N):
    assert len(plane_monomials(N)) == math.comb(N + 2, 2)


def test_duplicate_point():
    with pytest.raises(DuplicatePoint):
        build_eval_matrix(3, [JetTarget(pt(1, 2), 1), JetTarget(pt(1, 2), 2)])


def test_rank_trivial():
    zero = EvalMatrix(1, ((q(0), q(0)), (q(0), q(0))), ((0, (0, 0)), (0, (1, 0))), ((1, 0, 0), (0, 1, 0)))
    assert exact_rank(zero) == 0
    ident = build_eval_matrix(3, [JetTarget(pt(0, 0), 4)])
    assert exact_rank(ident) == 10


def collinear(order=3):
    return [JetTarget(pt(i, 2 * i), order) for i in range(3)]


def test_collinear_witness():
    assert exact_rank(build_eval_matrix(8, collinear())) == 18
    assert exact_rank(build_eval_matrix(7, collinear())) < 18
    rep = check_lemma_bound(collinear())
    assert rep.sum_a == 9 and rep.rank_at_bound == 18 and rep.rank_below == 17


def test_lemma_small_cases():
    rng = random.Random(11)
    targets = [JetTarget(p, 2) for p in random_rational_points(3, rng)]
    assert exact_rank(build_eval_matrix(5, targets)) == 9
    for a in range(1, 6):
        assert exact_rank(build_eval_matrix(a - 1, [JetTarget(pt(2, -1), a)])) == math.comb(a + 1, 2)


@pytest.mark.parametrize("seed", range(10))
def test_lemma_random(seed):
    rng = random.Random(seed)
    targets = [JetTarget(p, rng.randint(1, 4)) for p in random_rational_points(rng.randint(1, 4), rng)]
    assert check_lemma_bound(targets).full_at_bound


def test_lemma_counterexample_raised(monkeypatch):
    from monogauge import oracle

    monkeypatch.setattr(oracle, "exact_rank", lambda M: 0)
    with pytest.raises(LemmaCounterexample):
        oracle.check_lemma_bound([JetTarget(pt(0, 0), 2)])


def permuted(M, rng, scale_order):
    rows = list(range(len(M.rows)))
    cols = list(range(len(M.columns)))
    rng.shuffle(rows)
    rng.shuffle(cols)
    new_rows = []
    for r in rows:
        s = CycloElement.zeta(scale_order, rng.randint(0, scale_order)) * rng.choice([1, 2, -3, Fraction(1, 5)])
        new_rows.append(tuple(M.rows[r][c] * s for c in cols))
    return EvalMatrix(M.field_order, tuple(new_rows), tuple(M.row_labels[r] for r in rows), tuple(M.columns[c] for c in cols))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rank_invariant_under_permutation_and_scaling(seed):
    rng = random.Random(seed)
    prof, _ = oracle_profile(build_monomial(3, 3), seed=1)
    targets = [JetTarget(p, rng.randint(1, 2)) for e in prof.entries for p in e.points][: rng.randint(2, 6)]
    N = rng.randint(1, 4)
    M = build_eval_matrix(N, targets, 3)
    r = exact_rank(M)
    assert exact_rank(permuted(M, rng, 3)) == r
    assert modular_rank(M)[0] <= r


def test_certify_empty_target():
    prof, _ = oracle_profile(build_monomial(4, 3))
    # k = 1 has no nonzero local piece anywhere
    res = certify_vanishing(prof, 1)
    assert res.certified and res.target_dim == 0


def test_certify_a443_k3():
    prof, _ = oracle_profile(build_monomial(4, 3))
    res = certify_vanishing(prof, 3)
    assert res.N == 6 and res.targets == 3 and res.target_dim == 9
    assert res.N >= 3 * 2 - 1
    assert res.status == "Certified"


def test_oracle_never_certifies_a_present_eigenvalue():
    for m in (2, 3, 4, 5):
        prof, _ = oracle_profile(build_monomial(m, 3))
        res = certify_vanishing(prof, m)
        assert not res.certified


def test_certify_needs_coordinates():
    with pytest.raises(MissingCoordinates):
        certify_vanishing(builtin_profile("G23"), 3)


def test_g23_experiment():
    prof, _ = oracle_profile(builtin_arrangement("G23"))
    res = certify_vanishing(prof, 3)
    assert (res.N, res.targets, res.target_dim, res.columns) == (9, 6, 36, 55)
    # recorded outcome of the experiment on the icosahedral coordinates
    assert res.rank == 36


def generic_section(A, seed=0):
    rng = random.Random(seed)
    while True:
        S = [[1, 0, 0], [0, 1, 0], [0, 0, 1]] + [[rng.randint(-9, 9) for _ in range(3)] for _ in range(A.dim - 3)]
        try:
            return validate_section(A, S)
        except InvariantViolation:
            continue


ORACLE_FAMILIES = [build_monomial(m, 3) for m in (2, 3, 4, 5)] + [
    generic_section(build_monomial(2, 4)),
    build_full_monomial(2, 3),
    build_full_monomial(4, 3),
]


@pytest.mark.parametrize("A", ORACLE_FAMILIES, ids=lambda A: f"d{len(A)}_z{A.field_order}")
def test_certified_whenever_bound_holds(A):
    prof, _ = oracle_profile(A)
    rep = analyze_h1(prof)
    for v in rep.verdicts:
        if v.status == EXCLUDED_BY_BOUND and v.I_k and v.N >= 0:
            assert certify_vanishing(prof, v.k).certified, v.k


def test_dump_format():
    M = build_eval_matrix(1, [JetTarget((CycloElement.zeta(3), q(0, 3)), 1)], 3)
    assert dump_matrix(M) == "1 z 0\n"
