from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tuttelab.fields import (
    BudgetExceeded,
    check_budget,
    enumerate_points,
    eval_poly,
    field_of_order,
    is_irreducible,
    make_field,
    point_codes,
    split_range,
)
from tuttelab.polynomials import parse_polynomial

FIELDS = [make_field(2), make_field(3), make_field(7), make_field(2, 2), make_field(3, 2), make_field(2, 3), make_field(5, 2)]


def test_f4_frozen():
    f4 = make_field(2, 2)
    assert f4.modulus == (1, 1, 1)
    x = f4.element([0, 1])
    assert x * x == x + f4.one()
    assert x ** 3 == f4.one()


def test_f9_modulus_and_str():
    f9 = make_field(3, 2)
    assert f9.modulus == (1, 0, 1)
    assert str(f9) == "F_{3^2} mod x^2 + 1"
    assert str(make_field(5)) == "F_5"


def test_rejects_non_primes_and_large_fields():
    with pytest.raises(ValueError):
        make_field(4)
    with pytest.raises(BudgetExceeded):
        make_field(2, 40)
    assert field_of_order(9) == make_field(3, 2)
    with pytest.raises(ValueError):
        field_of_order(12)


def test_irreducibility():
    assert is_irreducible([1, 1, 1], 2)
    assert not is_irreducible([1, 0, 1], 2)  # (x+1)^2
    assert is_irreducible([1, 1, 0, 1], 2)


def test_fraction_maps_through_prime_subfield():
    f = make_field(7)
    assert f.element(Fraction(1, 2)) * f.element(2) == f.one()


def test_enumeration_order_and_budget():
    f = make_field(3)
    pts = list(enumerate_points(f, 2))
    assert [tuple(x.code for x in p) for p in pts[:4]] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert point_codes(f, 2, 5) == (1, 2)
    assert [tuple(x.code for x in p) for p in enumerate_points(f, 2, 4, 6)] == [(1, 1), (1, 2)]
    with pytest.raises(BudgetExceeded):
        check_budget(make_field(23), 8, budget=10**9)


def test_split_range_covers():
    assert split_range(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert split_range(2, 5) == [(0, 1), (1, 2)]


def test_eval_poly():
    f = make_field(5)
    poly = parse_polynomial("q*t1 + t2^2 + 3", 2)
    val = eval_poly(poly, 2, (f.element(1), f.element(2)))
    assert val == f.element(2 + 4 + 3)


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_field_axioms_exhaustive(field):
    elems = field.elements()
    zero, one = field.zero(), field.one()
    for a in elems:
        assert a + zero == a and a * one == a and a + (-a) == zero
        if a != zero:
            assert a * a.inv() == one
    # the multiplicative group is cyclic of order q-1
    assert all(a ** (field.order - 1) == one for a in elems if a != zero)


@pytest.mark.parametrize("field", FIELDS, ids=str)
def test_vector_kernels_match_scalars(field):
    ar = field.arith
    a = np.arange(field.order)
    for b in range(field.order):
        got_add = ar.add(a, np.full_like(a, b))
        got_mul = ar.mul(a, np.full_like(a, b))
        for x in range(field.order):
            assert got_add[x] == (field.from_code(x) + field.from_code(b)).code
            assert got_mul[x] == (field.from_code(x) * field.from_code(b)).code


@given(st.sampled_from(FIELDS), st.data())
def test_distributivity(field, data):
    codes = st.integers(0, field.order - 1)
    a, b, c = (field.from_code(data.draw(codes)) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
