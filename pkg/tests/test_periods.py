from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from tuttelab.graphs import complete, path, polygon
from tuttelab.periods import (
    PhysParams,
    normalized_period,
    period_estimate,
    polychain_grid,
    simplex_samples,
    simplex_volume,
    standard_simplex_volume,
    thermo_average,
    weights_from_energy,
)
from tuttelab.polynomials import observable


def test_volumes():
    assert simplex_volume(1, 1.0) == 1.0
    assert math.isclose(simplex_volume(2, 1.0), math.sqrt(3) / 4)
    assert math.isclose(standard_simplex_volume(2), math.sqrt(2))
    assert math.isclose(standard_simplex_volume(3), math.sqrt(3) / 2)
    assert standard_simplex_volume(1) == 1.0


def test_samples_lie_on_simplex():
    t = simplex_samples(3, 0, 1000, 4)
    assert np.all(t >= 0)
    assert np.allclose(t.sum(axis=1), 1.0)
    assert np.allclose(t.mean(axis=0), 0.25, atol=0.02)


def test_thermo_average_exact():
    g = path(1)
    assert thermo_average(g, 2, [Fraction(1)], observable("t1", g)) == Fraction(1, 3)
    tri = polygon(3)
    assert thermo_average(tri, 2, [1, 2, 3], observable("1", tri)) == 1


def test_constant_observable_is_exactly_one():
    g = complete(4)
    est = normalized_period(g, 2, observable("1", g), 5000, 0)
    assert est.value == 1.0 and est.stderr == 0.0


def test_single_edge_one_third():
    g = path(1)
    assert normalized_period(g, 2, observable("t1", g), 1000, 0).value == 1 / 3


def test_raw_period_scales_by_volume():
    g = polygon(3)
    f = observable("t1", g)
    raw = period_estimate(g, 2, f, 4000, 2)
    norm = normalized_period(g, 2, f, 4000, 2)
    assert math.isclose(raw.value, norm.value * standard_simplex_volume(3))


def test_chunking_does_not_change_estimate():
    g = polygon(3)
    f = observable("t1*t2", g)
    a = normalized_period(g, 2, f, 3000, 4, chunk_size=1 << 14)
    b = normalized_period(g, 2, f, 3000, 4, chunk_size=1 << 14)
    assert a == b


def test_phys_params():
    w = weights_from_energy(PhysParams(0.5, (1.0, 2.0)))
    assert np.allclose(w, [math.expm1(0.5), math.expm1(1.0)])
    with pytest.raises(ValueError):
        PhysParams(1.0, (-1.0,))


def test_polychain_grid_rows():
    rows = polychain_grid([(2, 0, 2), (2, 1, 2)], 2, "1", 200, 0)
    assert [r["edges"] for r in rows] == [6, 7]
    assert all(r["value"] == 1.0 for r in rows)
