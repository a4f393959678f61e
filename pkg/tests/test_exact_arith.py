from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from monogauge.errors import DivisionByZeroError, OrderMismatch, ParseError
from monogauge.exact_arith import (
    CycloElement,
    Factor,
    FactoredPoly,
    UniPoly,
    cyclotomic_poly,
    divisors,
    euler_phi,
    parse_z,
    prime_power,
    recognize_cyclotomic,
)

T1 = UniPoly.from_ints(-1, 1)


@pytest.mark.parametrize(
    "n, coeffs",
    [
        (1, (-1, 1)),
        (2, (1, 1)),
        (3, (1, 1, 1)),
        (4, (1, 0, 1)),
        (6, (1, -1, 1)),
        (12, (1, 0, -1, 0, 1)),
        (15, (1, -1, 0, 1, -1, 1, 0, -1, 1)),
    ],
)
def test_cyclotomic_values(n, coeffs):
    assert cyclotomic_poly(n) == UniPoly.from_ints(*coeffs)


@pytest.mark.parametrize("n", range(1, 31))
def test_cyclotomic_product_identity(n):
    prod = UniPoly.from_ints(1)
    for d in divisors(n):
        prod = prod * cyclotomic_poly(d)
    assert prod == UniPoly.t_power_minus_one(n)
    assert cyclotomic_poly(n).degree == euler_phi(n)
    _, r = divmod(UniPoly.t_power_minus_one(n), cyclotomic_poly(n))
    assert r.is_zero()


def test_cyclotomic_recognition():
    assert recognize_cyclotomic(UniPoly.from_ints(1, 0, -1, 0, 1)) == 12
    assert recognize_cyclotomic(UniPoly.from_ints(1, 0, 0, 1)) is None


@pytest.mark.parametrize("n, expected", [(8, (2, 3)), (9, (3, 2)), (7, (7, 1)), (6, None), (1, None), (12, None)])
def test_prime_power(n, expected):
    assert prime_power(n) == expected


def test_zeta4_squared():
    z = CycloElement.zeta(4)
    assert z * z == CycloElement.from_int(4, -1)
    assert (z * z).coeffs == (Fraction(-1), Fraction(0))


def test_order3_inverse():
    z = CycloElement.zeta(3)
    one = CycloElement.one(3)
    assert (one + z) * one == one + z
    assert (one + z).invert() == -z


def test_order5_inverse():
    z = CycloElement.zeta(5)
    a = CycloElement.one(5) - z
    assert a * a.invert() == CycloElement.one(5)


def test_zero_inversion_raises():
    with pytest.raises(DivisionByZeroError):
        CycloElement.zero(7).invert()
    with pytest.raises(ZeroDivisionError):
        CycloElement.one(7) / CycloElement.zero(7)


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        CycloElement.zeta(3) + CycloElement.zeta(4)


def test_reduction_mod_phi_not_binomial():
    # 1 + z + z^2 vanishes in Q(zeta_3); a pure coefficient test sees it
    z = CycloElement.zeta(3)
    assert (CycloElement.one(3) + z + z * z).is_zero()
    assert z ** 3 == CycloElement.one(3)
    assert z ** -1 == z * z


ORDERS = st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15])
FRACS = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@st.composite
def elements(draw, order=None):
    m = order if order is not None else draw(ORDERS)
    n = euler_phi(m)
    return CycloElement(m, draw(st.lists(FRACS, min_size=n, max_size=n)))


@settings(max_examples=120, deadline=None)
@given(elements())
def test_inverse_property(a):
    if a.is_zero():
        return
    assert a * a.invert() == CycloElement.one(a.order)


@settings(max_examples=120, deadline=None)
@given(elements())
def test_parse_round_trip(a):
    assert parse_z(str(a), a.order) == a
    assert CycloElement.parse(str(a), a.order).coeffs == a.coeffs


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_field_axioms(data):
    m = data.draw(ORDERS)
    a, b, c = (data.draw(elements(m)) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == CycloElement.zero(m)


@pytest.mark.parametrize(
    "text, order, expected",
    [
        ("0", 5, (0, 0, 0, 0)),
        ("z", 5, (0, 1, 0, 0)),
        ("z^5", 5, (1, 0, 0, 0)),
        ("1/3-z+3/2*z^2", 5, (Fraction(1, 3), -1, Fraction(3, 2), 0)),
        ("-z^2-z^3", 5, (0, 0, -1, -1)),
    ],
)
def test_parse_values(text, order, expected):
    assert parse_z(text, order).coeffs == tuple(Fraction(x) for x in expected)


@pytest.mark.parametrize("bad", ["z^", "2*", "1+/z", "x", "", "1/0", "2 3"])
def test_parse_errors(bad):
    with pytest.raises(ParseError) as info:
        parse_z(bad, 5, line=4)
    assert info.value.line == 4


def test_expand_values():
    assert FactoredPoly.of((T1, 2)).expand() == UniPoly.from_ints(1, -2, 1)
    cubic = FactoredPoly.of((T1, 8), (UniPoly.from_ints(1, 1, 1), 2))
    assert cubic.degree == 12 and cubic.expand().degree == 12
    g25 = FactoredPoly(((Factor.cyclotomic(1), 9), (Factor.binomial(4), 2)))
    other = FactoredPoly.from_cyclotomic({1: 11, 2: 2, 4: 2})
    assert g25.expand().degree == 17
    assert g25 == other
    assert g25.cyclotomic_multiplicities() == {1: 11, 2: 2, 4: 2}
    assert str(g25) == "(t-1)^9 (t^4-1)^2"


MULTS = st.dictionaries(st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12]), st.integers(0, 3), max_size=4)


@settings(max_examples=60, deadline=None)
@given(MULTS, MULTS)
def test_expand_is_multiplicative(f, g):
    F, G = FactoredPoly.from_cyclotomic(f), FactoredPoly.from_cyclotomic(g)
    assert (F * G).expand() == F.expand() * G.expand()
    assert (F * G).degree == F.degree + G.degree


def test_unipoly_division():
    q, r = divmod(UniPoly.t_power_minus_one(6), UniPoly.from_ints(1, 1, 1))
    assert r.is_zero() and q == UniPoly.from_ints(-1, 1, 0, -1, 1)
    assert str(UniPoly.from_ints(1, 1, 1)) == "t^2+t+1"
