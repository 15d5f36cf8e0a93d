"""Thermodynamic averages and their integrals over the standard simplex.

The measure on ``{t >= 0, sum t = 1}`` is the (m-1)-dimensional Hausdorff
measure, so the simplex has the volume of a regular simplex of side sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph, components_count, polygon_chain
from .polynomials import MultiPoly, observable, second_polynomial, tutte

MEASURE_TAG = "hausdorff-simplex-side-sqrt2"


@dataclass(frozen=True)
class PhysParams:
    beta: float
    J: tuple[float, ...]
    ferromagnetic: bool = True

    def __post_init__(self):
        if self.ferromagnetic and any(j < 0 for j in self.J):
            raise ValueError("ferromagnetic couplings must be non-negative")


@dataclass
class PeriodEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    integrand_min: float
    integrand_max: float
    measure: str = MEASURE_TAG

    def to_dict(self) -> dict:
        return asdict(self)


def weights_from_energy(params: PhysParams) -> np.ndarray:
    return np.expm1(params.beta * np.asarray(params.J, dtype=float))


def thermo_average(g: Graph, q: int, t: Sequence, f: MultiPoly):
    """``<F> = P_{G,F}(q,t) / Z_G(q,t)``; exact for rational ``t`` and ``F``."""
    z = tutte(g).evaluate(q, t)
    if z == 0:
        raise ZeroDivisionError("partition function vanishes at this point")
    num = second_polynomial(g, f).evaluate(q, t)
    if isinstance(z, int) and isinstance(num, (int, Fraction)):
        return Fraction(num) / z
    if isinstance(z, Fraction) or isinstance(num, Fraction):
        return Fraction(num) / Fraction(z)
    return num / z


def simplex_volume(n: int, a: float) -> float:
    """Volume of the regular ``n``-simplex with side ``a``."""
    if n < 0 or a <= 0:
        raise ValueError("need n >= 0 and a > 0")
    return a**n / math.factorial(n) * math.sqrt((n + 1) / 2**n)


def standard_simplex_volume(m: int) -> float:
    """Hausdorff volume of ``{t in R^m : t >= 0, sum t = 1}``."""
    return simplex_volume(m - 1, math.sqrt(2))


class _FloatPoly:
    """Dense float evaluation of a polynomial in the edge variables at many points."""

    def __init__(self, poly: MultiPoly):
        self.arity = poly.arity
        degs = [poly.t_degree(i) for i in range(self.arity)]
        self.tensor = np.zeros([d + 1 for d in degs])
        for exps, c in poly.items():
            self.tensor[exps[1:]] += float(c)

    def __call__(self, t: np.ndarray) -> np.ndarray:
        n = t.shape[0]
        if self.arity == 0:
            return np.full(n, float(self.tensor))
        d = self.tensor.shape[0]
        cur = np.tensordot(t[:, :1] ** np.arange(d), self.tensor, axes=([1], [0]))
        for i in range(1, self.arity):
            d = cur.shape[1]
            cur = np.einsum("nk,nk...->n...", t[:, i : i + 1] ** np.arange(d), cur)
        return cur


def simplex_samples(seed: int, chunk: int, count: int, m: int) -> np.ndarray:
    """Uniform points of the standard simplex from sorted uniform spacings."""
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk]))
    u = np.sort(rng.random((count, m - 1)), axis=1)
    edges = np.concatenate([np.zeros((count, 1)), u, np.ones((count, 1))], axis=1)
    return np.diff(edges, axis=1)


def _integrand_values(g: Graph, q: int, f: MultiPoly, samples: int, seed: int, chunk_size: int):
    if q < 1:
        raise ValueError("need q >= 1")
    m = g.edge_count
    zpoly = tutte(g).specialize_q(q)
    ppoly = second_polynomial(g, f).specialize_q(q)
    z_eval = _FloatPoly(zpoly)
    p_eval = z_eval if ppoly == zpoly else _FloatPoly(ppoly)
    floor = float(q ** components_count(g))
    out = np.empty(samples)
    for c, lo in enumerate(range(0, samples, chunk_size)):
        hi = min(samples, lo + chunk_size)
        t = simplex_samples(seed, c, hi - lo, m)
        z = z_eval(t)
        if not np.all(z >= floor * (1 - 1e-12)):
            raise ArithmeticError("partition function fell below q^k(G) on the simplex")
        out[lo:hi] = p_eval(t) / z
    return out


def _mean(vals: np.ndarray) -> float:
    # a constant integrand averages to itself; fsum keeps the general case correctly rounded
    lo, hi = float(vals.min()), float(vals.max())
    return lo if lo == hi else math.fsum(vals) / len(vals)


def _sd(vals: np.ndarray) -> float:
    if len(vals) < 2 or vals.min() == vals.max():
        return 0.0
    return float(np.std(vals, ddof=1))


def period_estimate(
    g: Graph, q: int, f: MultiPoly, samples: int = 100_000, seed: int = 0, chunk_size: int = 1 << 14
) -> PeriodEstimate:
    """Monte Carlo estimate of the integral of ``P_{G,F} / Z_G`` over the simplex."""
    if samples < 1:
        raise ValueError("need at least one sample")
    vals = _integrand_values(g, q, f, samples, seed, chunk_size)
    vol = standard_simplex_volume(g.edge_count)
    sd = _sd(vals)
    return PeriodEstimate(
        value=vol * _mean(vals),
        stderr=vol * sd / math.sqrt(samples),
        samples=samples,
        seed=seed,
        integrand_min=float(vals.min()),
        integrand_max=float(vals.max()),
    )


def normalized_period(
    g: Graph, q: int, f: MultiPoly, samples: int = 100_000, seed: int = 0, chunk_size: int = 1 << 14
) -> PeriodEstimate:
    """Simplex average of ``<F>``: the period divided by the simplex volume."""
    if samples < 1:
        raise ValueError("need at least one sample")
    vals = _integrand_values(g, q, f, samples, seed, chunk_size)
    sd = _sd(vals)
    return PeriodEstimate(_mean(vals), sd / math.sqrt(samples), samples, seed,
                          float(vals.min()), float(vals.max()))


def polychain_grid(
    params: Iterable[tuple[int, int, int]],
    q: int,
    observable_text: str = "1",
    samples: int = 20_000,
    seed: int = 0,
) -> list[dict]:
    """Normalized averages for polygon chains over a grid of ``(m, k, N)``."""
    rows = []
    for m, k, n in params:
        g = polygon_chain(m, k, n)
        f = observable(observable_text, g)
        est = normalized_period(g, q, f, samples, seed)
        rows.append({"m": m, "k": k, "N": n, "edges": g.edge_count, "q": q,
                     "observable": observable_text, **est.to_dict()})
    return rows
