from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from monogauge.errors import NonIntegral, Unsupported
from monogauge.exact_arith import UniPoly
from monogauge.wh_local import (
    Brieskorn,
    GeneralWH,
    OrdinaryMultiple,
    WHType,
    a_absolute,
    a_k_basis,
    a_suspension,
    basis_degree_k,
    gamma_mu,
    kind_from_json,
    local_alexander,
    milnor_number,
    nontrivial_k,
    project_to_basis,
    suspension_type,
    weighted_monomials,
)


def wh(*w, e):
    return WHType(tuple(w), e)


@pytest.mark.parametrize("e, d, expected", [(3, 9, (3, 9)), (5, 15, (5, 15)), (4, 6, (2, 12))])
def test_gamma_mu(e, d, expected):
    assert gamma_mu(e, d) == expected


@pytest.mark.parametrize("m", range(1, 8))
def test_suspension_of_triple_point(m):
    assert suspension_type(wh(1, 1, e=3), 3 * m) == wh(m, m, 1, e=3 * m)


@pytest.mark.parametrize("m, q", [(3, 2), (4, 3), (6, 1), (5, 5)])
def test_suspension_of_ordinary_point(m, q):
    assert suspension_type(wh(1, 1, e=m), q * m) == wh(q, q, 1, e=q * m)


@pytest.mark.parametrize("m, d", [(4, 6), (6, 10), (5, 7), (9, 12)])
def test_suspension_general_d(m, d):
    g = math.gcd(m, d)
    assert suspension_type(wh(1, 1, e=m), d) == wh(d // g, d // g, m // g, e=math.lcm(m, d))


def test_weighted_monomials_values():
    assert set(weighted_monomials((3, 3), 6)) == {(2, 0), (1, 1), (0, 2)}
    assert weighted_monomials((3, 3), 6) == [(2, 0), (1, 1), (0, 2)]
    assert weighted_monomials((2, 3), -1) == []
    assert weighted_monomials((2, 4), 3) == []


@pytest.mark.parametrize("m", range(3, 10))
@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_ak_counts_ordinary(m, q):
    g, d = wh(1, 1, e=m), q * m
    for k1 in range(1, m - 1):
        assert len(a_k_basis(g, d, q * k1)) == m - 1 - k1
    for k1 in range(m - 1, m + 1):
        assert a_k_basis(g, d, q * k1) == []


@pytest.mark.parametrize("m", range(1, 8))
def test_ak_triple_point(m):
    g = wh(1, 1, e=3)
    for k in range(1, 3 * m + 1):
        assert len(a_k_basis(g, 3 * m, k)) == (1 if k == m else 0)


@pytest.mark.parametrize("g, expected", [(wh(1, 1, e=3), 2), (wh(1, 2, e=6), 4)] + [(wh(1, 1, e=m), m - 1) for m in range(2, 9)])
def test_a_absolute(g, expected):
    assert a_absolute(g) == expected


def test_a_suspension_examples():
    for m in range(1, 9):
        assert a_suspension(wh(1, 1, e=3), 3 * m, m) == 1
    assert a_suspension(wh(1, 1, e=5), 15, 3) == 3
    with pytest.raises(ValueError):
        a_suspension(wh(1, 1, e=3), 9, 0)


def test_a_suspension_can_be_zero():
    # m = 5, d = 15, k1 = 4: the A_k degree is negative
    g = wh(1, 1, e=5)
    assert basis_degree_k(g, 15, 12) < 0
    assert a_k_basis(g, 15, 12) == []
    assert a_suspension(g, 15, 12) == 0


@pytest.mark.parametrize("m", range(2, 41, 3))
def test_general_d_jet_order_identity(m):
    g = wh(1, 1, e=m)
    for d in range(2, 41):
        gam = math.gcd(m, d)
        d1, m1 = d // gam, m // gam
        for k1 in range(1, gam):
            k = k1 * d1
            assert a_suspension(g, d, k) == m - 1 - k1 * m1
            assert a_suspension(g, d, k) * d == m * (d - k) - d


def test_nontrivial_k_values():
    for m in range(1, 6):
        assert nontrivial_k(wh(1, 1, e=3), 3 * m) == {m}
    assert nontrivial_k(wh(1, 1, e=4), 12) == {3, 6}
    for d in (3, 5, 7, 9, 11):
        assert nontrivial_k(wh(1, 1, e=2), d) == set()


WEIGHTS = st.lists(st.integers(1, 4), min_size=2, max_size=2)


@settings(max_examples=150, deadline=None)
@given(WEIGHTS, st.integers(2, 12), st.integers(1, 30), st.data())
def test_ak_nonempty_iff_positive_a(w, e_mult, d, data):
    e = max(w) * e_mult
    g = WHType(tuple(w), e)
    k = data.draw(st.integers(1, d))
    basis = a_k_basis(g, d, k)
    a = a_suspension(g, d, k)
    if basis:
        assert a > 0
    if a == 0:
        assert not basis


@pytest.mark.parametrize("m", range(2, 9))
@pytest.mark.parametrize("d", [6, 10, 12, 15, 24])
def test_a_nonincreasing_in_k(m, d):
    g = wh(1, 1, e=m)
    gam = math.gcd(m, d)
    step = d // gam
    for k0 in range(1, step + 1):
        vals = [a_suspension(g, d, k) for k in range(k0, d + 1, step)]
        assert vals == sorted(vals, reverse=True)


@pytest.mark.parametrize("g, d", [(wh(1, 1, e=3), 9), (wh(1, 2, e=6), 10), (wh(2, 3, e=12), 8)])
def test_suspension_degree_is_lcm(g, d):
    s = suspension_type(g, d)
    assert s.degree == math.lcm(g.degree, d)
    assert all(s.degree % w == 0 for w in s.weights)


@pytest.mark.parametrize("g, mu", [(wh(1, 1, e=3), 4), (wh(1, 1, e=2), 1), (wh(1, 1, e=7), 36), (wh(2, 3, e=6), 2)])
def test_milnor_values(g, mu):
    assert milnor_number(g) == mu


def test_milnor_non_integral():
    with pytest.raises(NonIntegral):
        milnor_number(wh(2, 3, e=7))


def test_local_alexander_small():
    two = local_alexander(OrdinaryMultiple(2))
    assert two.alexander.expand() == UniPoly.from_ints(-1, 1)
    assert two.eigenvalue_orders == {1}
    three = local_alexander(OrdinaryMultiple(3))
    assert three.alexander.expand() == UniPoly.from_ints(-1, 1) ** 2 * UniPoly.from_ints(1, 1, 1)
    assert three.eigenvalue_orders == {1, 3}


@pytest.mark.parametrize("a", range(2, 11))
@pytest.mark.parametrize("b", range(2, 11))
def test_alexander_degree_is_milnor(a, b):
    kind = Brieskorn(a, b)
    assert local_alexander(kind).alexander.degree == milnor_number(kind.wh_type())


@pytest.mark.parametrize("m", range(2, 9))
def test_ordinary_matches_brieskorn(m):
    closed = local_alexander(OrdinaryMultiple(m))
    assert closed.alexander.expand() == local_alexander(Brieskorn(m, m)).alexander.expand()
    assert closed.alexander.degree == (m - 1) ** 2
    assert closed.eigenvalue_orders <= {d for d in range(1, m + 1) if m % d == 0}


def test_general_wh_unsupported():
    with pytest.raises(Unsupported):
        local_alexander(GeneralWH(wh(1, 2, e=6)))


def test_project_to_basis():
    g = wh(1, 1, e=3)
    coeffs = {(0, 0): 5, (1, 0): 2, (0, 1): -1, (2, 0): 7}
    assert project_to_basis(coeffs, g) == {(1, 0): 2, (0, 1): -1}
    assert project_to_basis({(1, 0): 3, (0, 2): 1}, wh(1, 1, e=2)) == {}


@pytest.mark.parametrize("g", [wh(1, 1, e=3), wh(1, 1, e=6), wh(1, 2, e=6), wh(2, 3, e=12)])
def test_basis_monomials_outside_jet_ideal(g):
    a = a_absolute(g)
    for alpha in weighted_monomials(g.weights, g.basis_degree):
        assert sum(alpha) < a
    # everything in m^a is dropped
    high = {alpha: 1 for alpha in weighted_monomials((1, 1), a)}
    assert project_to_basis(high, g) == {}


def test_kind_json_round_trip():
    for kind in (OrdinaryMultiple(4), Brieskorn(2, 3), GeneralWH(wh(1, 2, e=6))):
        assert kind_from_json(kind.to_json()) == kind
    with pytest.raises(ValueError):
        kind_from_json({"cusp": 1})
