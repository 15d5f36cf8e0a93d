from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tuttelab.counting import tutte_count
from tuttelab.fields import make_field
from tuttelab.graphs import complete, path, polygon, polygon_chain
from tuttelab.motives import (
    ClassPoly,
    class_chain,
    class_polychain,
    class_polygon,
    class_q1,
    class_tree,
    evaluate_class,
    fibration_test,
    fit_count_polynomial,
    k4_decomposition_check,
    load_k4_fixture,
    polygon_count_formula,
)

K4_POINTS = [(3, 413), (5, 4449), (7, 20901), (11, 180333), (13, 403025), (17, 1493449), (19, 2580541), (23, 6627909)]


def test_polygon_class_frozen():
    assert class_polygon(3).text() == "T^4 + 3*T^3 - 2*T^2 - 2*T + 3"
    assert class_polygon(1).text() == "T^2 + T + 1"
    assert evaluate_class(class_polygon(1), 5) == tutte_count(polygon(2), 2, make_field(5)).count == 4


def test_class_roundtrip_between_bases():
    c = class_polygon(4)
    assert ClassPoly.from_t(c.t_coeffs()) == ClassPoly(c.coeffs)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_polygon_formula_agrees(m, p):
    assert polygon_count_formula(m, p) == evaluate_class(class_polygon(m), p)


def test_q1_and_tree_classes():
    assert evaluate_class(class_q1(3), 5) == 125 - 64
    assert evaluate_class(class_tree(2), 7) == tutte_count(path(2), 3, make_field(7)).count


def test_chain_class_multiplies():
    f = make_field(5)
    g = polygon_chain(2, 1, 2)
    assert evaluate_class(class_polychain(2, 1, 2), 5) == tutte_count(g, 2, f).count
    c = class_chain([class_polygon(2)] * 2, 1)
    assert c == class_polychain(2, 1, 2)


def test_fitter_k4_nonpolynomial():
    v = fit_count_polynomial(K4_POINTS, 5, spin=2)
    assert v.status == "NonPolynomial"
    assert v.witness["kind"] == "inconsistency"
    assert v.witness["predicted"] != v.witness["observed"]


def test_fitter_integrality_witness():
    # x(x+1)/2 is integer valued but its coefficients are not integers
    v = fit_count_polynomial([(2, 3), (3, 6), (4, 10), (5, 15)], 2)
    assert v.status == "NonPolynomial"
    assert v.witness == {"kind": "integrality", "index": 1, "value": Fraction(1, 2)}


def test_fitter_inconclusive_and_excluded():
    v = fit_count_polynomial([(3, 1), (5, 2)], 3)
    assert v.status == "Inconclusive"
    v = fit_count_polynomial([(2, 4), (3, 9), (4, 16), (5, 25), (7, 49)], 2, spin=6)
    assert v.excluded == [2, 3, 4]
    assert v.status == "Inconclusive"
    with pytest.raises(ValueError):
        fit_count_polynomial([(3, 1), (3, 2)], 1)


@settings(max_examples=30)
@given(st.lists(st.integers(-20, 20), min_size=6, max_size=6))
def test_fitter_recovers_integer_polynomials(coeffs):
    pts = [(x, sum(c * x**j for j, c in enumerate(coeffs))) for x in (2, 3, 4, 5, 7, 8)]
    v = fit_count_polynomial(pts, 5)
    assert v.status == "PolynomialCandidate"
    assert v.coefficients == coeffs


def test_fibration_k4_fails_polygon_consistent():
    rep = fibration_test(complete(4), make_field(7))
    assert rep["verdict"] == "fails" and all(rep["checks"].values())
    rep = fibration_test(polygon(4), make_field(7))
    assert rep["verdict"] == "consistent"
    assert fibration_test(polygon(3), make_field(3))["verdict"] == "inconclusive"


def test_k4_fixture():
    P = load_k4_fixture()
    assert P.arity == 4 and len(P) == 31
    rep = k4_decomposition_check(make_field(5))
    assert rep["match"] and rep["direct"] == 4449
    assert rep["terms"]["Z[2+2x4+x4^2]"] == "2/5"
