"""Monte Carlo estimation of point counts.

Sample ``i`` uses words ``[i*m, (i+1)*m)`` of the Philox stream keyed by the
seed, so any split of the sample indices into ranges reproduces the same
tallies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import PolySystem, _terms_of, as_system, brute_count
from .fields import FieldSpec, split_range
from .graphs import Graph
from .polynomials import tutte


@dataclass(frozen=True)
class McConfig:
    trials: int = 10_000
    delta: float = 0.05
    seed: int = 0
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class McResult:
    fraction: Fraction
    estimate: float
    epsilon: float
    trials: int
    seed: int
    roots: int
    field_order: int
    arity: int

    @property
    def relative_bound(self) -> float:
        return self.epsilon / float(self.fraction) if self.fraction else math.inf

    def to_dict(self) -> dict:
        return {
            "fraction": str(self.fraction),
            "estimate": self.estimate,
            "epsilon": self.epsilon,
            "relative_bound": self.relative_bound,
            "trials": self.trials,
            "seed": self.seed,
            "roots": self.roots,
        }


def error_bound(fraction: float, trials: int, delta: float) -> float:
    """``sqrt(4 b ln(2/delta) / N)`` with ``b`` the (estimated) root fraction."""
    return math.sqrt(4 * float(fraction) * math.log(2 / delta) / trials)


def sample_codes(seed: int, start: int, stop: int, arity: int, order: int) -> np.ndarray:
    """Element codes of samples ``start..stop-1``, shape ``(stop-start, arity)``."""
    first = start * arity
    count = (stop - start) * arity
    block, skip = divmod(first, 4)
    gen = np.random.Philox(key=seed, counter=[block, 0, 0, 0])
    raw = gen.random_raw(count + skip)[skip:]
    return (raw % np.uint64(order)).astype(np.int64).reshape(stop - start, arity)


class PointEvaluator:
    """Evaluates a system at arbitrary batches of points (rows of element codes)."""

    def __init__(self, system: PolySystem, field: FieldSpec):
        self.field = field
        self.arith = field.arith
        self.arity = system.arity
        self.tensors, self.powers = [], []
        for f in system.polys:
            terms = _terms_of(f, field.p)
            degs = [0] * self.arity
            for exps, _ in terms:
                degs = [max(a, b) for a, b in zip(degs, exps)]
            tensor = np.zeros([d + 1 for d in degs], dtype=np.int64)
            for exps, c in terms:
                tensor[exps] = self.arith.const(c)
            self.tensors.append(tensor)
            self.powers.append([self.arith.power_matrix(d) for d in degs])

    def _values(self, which: int, codes: np.ndarray) -> np.ndarray:
        a = self.arith
        tensor = self.tensors[which]
        n = codes.shape[0]
        cur = np.broadcast_to(tensor, (n,) + tensor.shape)
        for i in range(self.arity):
            rows = self.powers[which][i][codes[:, i]]  # (n, d+1)
            shape = (n,) + (1,) * (cur.ndim - 2)
            acc = a.mul(cur[:, 0], rows[:, 0].reshape(shape))
            for k in range(1, cur.shape[1]):
                acc = a.add(acc, a.mul(cur[:, k], rows[:, k].reshape(shape)))
            cur = acc
        return np.asarray(cur).reshape(n)

    def zero_mask(self, codes: np.ndarray) -> np.ndarray:
        mask = np.ones(codes.shape[0], dtype=bool)
        for i in range(len(self.tensors)):
            mask &= self._values(i, codes) == 0
        return mask


def count_roots(system, field: FieldSpec, seed: int, start: int, stop: int, chunk_size: int = 1 << 16) -> int:
    system = as_system(system)
    ev = PointEvaluator(system, field)
    roots = 0
    for lo in range(start, stop, chunk_size):
        hi = min(stop, lo + chunk_size)
        codes = sample_codes(seed, lo, hi, system.arity, field.order)
        roots += int(np.count_nonzero(ev.zero_mask(codes)))
    return roots


def mc_count(system, field: FieldSpec, cfg: McConfig = McConfig()) -> McResult:
    """Estimate the number of common zeros from ``cfg.trials`` uniform samples."""
    system = as_system(system)
    roots = count_roots(system, field, cfg.seed, 0, cfg.trials, cfg.chunk_size)
    frac = Fraction(roots, cfg.trials)
    total = field.order**system.arity
    return McResult(
        fraction=frac,
        estimate=float(frac * total),
        epsilon=error_bound(frac, cfg.trials, cfg.delta),
        trials=cfg.trials,
        seed=cfg.seed,
        roots=roots,
        field_order=field.order,
        arity=system.arity,
    )


def mc_count_chunked(system, field: FieldSpec, cfg: McConfig, pieces: int) -> McResult:
    """Same as :func:`mc_count` but tallied over ``pieces`` separate index ranges."""
    system = as_system(system)
    roots = sum(
        count_roots(system, field, cfg.seed, lo, hi, cfg.chunk_size)
        for lo, hi in split_range(cfg.trials, pieces)
    )
    frac = Fraction(roots, cfg.trials)
    return McResult(frac, float(frac * field.order**system.arity),
                    error_bound(frac, cfg.trials, cfg.delta), cfg.trials, cfg.seed, roots,
                    field.order, system.arity)


def mc_vs_exact(system, field: FieldSpec, cfg: McConfig = McConfig(), exact: int | None = None) -> dict:
    """One comparison row: estimate, relative error and bounds against the exact count."""
    system = as_system(system)
    if exact is None:
        exact = brute_count(system, field).count
    res = mc_count(system, field, cfg)
    row = {
        "p": field.p,
        "r": field.r,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "exact": exact,
        "monte_carlo": res.estimate,
        "epsilon": res.epsilon,
        "error_bound": res.relative_bound,
        "exact_zero": exact == 0,
    }
    if exact == 0:
        row["error"] = res.estimate  # absolute difference; relative error undefined
    else:
        row["error"] = (res.estimate - exact) / exact
    return row


def fibration_mc_probe(g: Graph, field: FieldSpec, cfg: McConfig = McConfig()) -> dict:
    """Estimate the count of ``Z_{G,q}`` for every ``q`` in ``2..p-1`` from shared samples.

    Non-constancy is flagged when the spread of the estimated fractions exceeds
    the sum of the bounds of the largest and smallest estimate.
    """
    if field.p < 3:
        raise ValueError("need p >= 3 so that some q lies outside {0, 1}")
    z = tutte(g)
    per_q = {}
    for q in range(2, field.p):
        per_q[q] = mc_count([z.specialize_q(q)], field, cfg)
    report = {"graph": g.label(), "field": str(field), "per_q": {q: r.to_dict() for q, r in per_q.items()}}
    if len(per_q) < 2:
        report.update(verdict=None, non_constant=None, reason="only one q outside {0, 1}")
        return report
    hi = max(per_q, key=lambda q: per_q[q].fraction)
    lo = min(per_q, key=lambda q: per_q[q].fraction)
    spread = float(per_q[hi].fraction - per_q[lo].fraction)
    allowance = per_q[hi].epsilon + per_q[lo].epsilon
    report.update(spread=spread, allowance=allowance, non_constant=spread > allowance,
                  verdict="non-constant" if spread > allowance else "constancy not rejected")
    return report


def mc_table(g: Graph, q: int, primes: Sequence[int], cfg: McConfig, exact: dict[int, int] | None = None) -> list[dict]:
    from .fields import make_field

    z = tutte(g).specialize_q(q)
    rows = []
    for p in primes:
        rows.append(mc_vs_exact([z], make_field(p), cfg, (exact or {}).get(p)))
    return rows
