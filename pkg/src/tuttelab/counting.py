"""Point counts of zero loci over finite fields.

Exhaustive counting evaluates every polynomial of a system on aligned blocks
of the lexicographic enumeration of ``F^m``: the coefficient tensor is
contracted against the power table of the field one variable at a time, so a
block of ``F^f`` points costs a handful of dense tensor products instead of
``|F|^f`` scalar evaluations. Any partition of the index range gives the same
total.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .fields import (
    DEFAULT_ENUMERATION_BUDGET,
    BudgetExceeded,
    FieldSpec,
    check_budget,
    point_codes,
    split_range,
)
from .graphs import Graph, contract, delete
from .polynomials import DEFAULT_EDGE_CAP, MultiPoly, tutte

MAX_BLOCK = 2**23
REDUCTION_BRUTE_VARS = 4
REDUCTION_TERM_LIMIT = 4096

Terms = tuple[tuple[tuple[int, ...], int], ...]  # ((exponents over the t's), coefficient)


def default_threads() -> int:
    return max(1, int(os.environ.get("TUTTELAB_THREADS", "1")))


# -- systems -------------------------------------------------------------------

@dataclass(frozen=True)
class PolySystem:
    """Polynomials in a shared set of ``arity`` variables whose common zeros are counted.

    Members must not involve ``q``; specialize first with
    :meth:`MultiPoly.specialize_q`.
    """

    polys: tuple[MultiPoly, ...]

    def __init__(self, polys: Iterable[MultiPoly] | MultiPoly):
        if isinstance(polys, MultiPoly):
            polys = [polys]
        polys = tuple(polys)
        if not polys:
            raise ValueError("a system needs at least one polynomial")
        arities = {f.arity for f in polys}
        if len(arities) != 1:
            raise ValueError(f"members have different arities {sorted(arities)}")
        if any(f.has_q() for f in polys):
            raise ValueError("specialize q before counting")
        object.__setattr__(self, "polys", polys)

    @property
    def arity(self) -> int:
        return self.polys[0].arity

    def digest(self) -> str:
        blob = "|".join(f.to_json() for f in self.polys)
        return hashlib.sha256(blob.encode()).hexdigest()

    def __len__(self) -> int:
        return len(self.polys)


def as_system(system) -> PolySystem:
    return system if isinstance(system, PolySystem) else PolySystem(system)


def _terms_of(poly: MultiPoly, p: int, with_q: bool = False) -> Terms:
    out = []
    for exps, c in poly.items():
        if isinstance(c, Fraction):
            c = c.numerator * pow(c.denominator, -1, p)
        c %= p
        if c:
            out.append((exps if with_q else exps[1:], c))
    return tuple(out)


@dataclass
class CountRecord:
    subject: str
    poly_hash: str
    spin: int | None
    field: dict
    arity: int
    count: int
    method: str
    wall_time: float = 0.0
    seed: int | None = None
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        total = self.field["p"] ** (self.field["r"] * self.arity)
        if not 0 <= self.count <= total:
            raise ValueError(f"count {self.count} outside [0, {total}]")

    @property
    def field_order(self) -> int:
        return self.field["p"] ** self.field["r"]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CountRecord":
        return cls(**json.loads(text))


# -- dense block evaluation ------------------------------------------------------

class _DenseSystem:
    """Coefficient tensors of a system, ready to be evaluated on aligned blocks."""

    def __init__(self, terms_list: Sequence[Terms], arity: int, field: FieldSpec):
        self.field = field
        self.arity = arity
        self.arith = field.arith
        self.prime = field.r == 1
        self.tensors = []
        self.powers = []
        for terms in terms_list:
            degs = [0] * arity
            for exps, _ in terms:
                degs = [max(a, b) for a, b in zip(degs, exps)]
            tensor = np.zeros([d + 1 for d in degs], dtype=np.int64)
            for exps, c in terms:
                tensor[exps] = self.arith.const(c)
            self.tensors.append(tensor)
            self.powers.append([self.arith.power_matrix(d) for d in degs])

    def _contract_point(self, tensor: np.ndarray, row: np.ndarray) -> np.ndarray:
        # sum_k row[k] * tensor[k]
        if self.prime:
            p = self.field.p
            return np.tensordot(row, tensor, axes=([0], [0])) % p
        a = self.arith
        acc = a.mul(tensor[0], row[0])
        for k in range(1, tensor.shape[0]):
            acc = a.add(acc, a.mul(tensor[k], row[k]))
        return acc

    def _contract_grid(self, tensor: np.ndarray, matrix: np.ndarray) -> np.ndarray:
        # out[..., x] = sum_k matrix[x, k] * tensor[k, ...]
        if self.prime:
            p = float(self.field.p)
            out = np.tensordot(tensor.astype(np.float64), matrix.astype(np.float64), axes=([0], [1]))
            return np.fmod(out, p).astype(np.int64)
        a = self.arith
        acc = a.mul(tensor[0][..., None], matrix[:, 0])
        for k in range(1, tensor.shape[0]):
            acc = a.add(acc, a.mul(tensor[k][..., None], matrix[:, k]))
        return acc

    def values(self, which: int, prefix: Sequence[int]) -> np.ndarray:
        """Flat values of polynomial ``which`` over all points starting with ``prefix``."""
        tensor = self.tensors[which]
        pw = self.powers[which]
        for i, x in enumerate(prefix):
            tensor = self._contract_point(tensor, pw[i][x])
        for i in range(len(prefix), self.arity):
            tensor = self._contract_grid(tensor, pw[i])
        return np.asarray(tensor).reshape(-1)

    def zero_mask(self, prefix: Sequence[int]) -> np.ndarray | bool:
        mask: np.ndarray | bool = True
        for i in range(len(self.tensors)):
            vals = self.values(i, prefix)
            mask = (vals == 0) if mask is True else (mask & (vals == 0))
        return mask

    def count_block(self, prefix: Sequence[int]) -> int:
        free = self.arity - len(prefix)
        mask = self.zero_mask(prefix)
        if mask is True:
            return self.field.order**free
        if mask.ndim == 0 or mask.size == 1:
            return int(bool(mask.reshape(-1)[0])) * self.field.order**free
        return int(np.count_nonzero(mask))


def aligned_blocks(start: int, stop: int, base: int, arity: int, max_block: int = MAX_BLOCK):
    """Split ``[start, stop)`` into blocks ``(prefix_length, prefix_index)`` of whole sub-grids."""
    f_max = 0
    while f_max < arity and base ** (f_max + 1) <= max_block:
        f_max += 1
    lo = start
    while lo < stop:
        f = f_max
        while f and (lo % base**f or lo + base**f > stop):
            f -= 1
        yield arity - f, lo // base**f
        lo += base**f


def _count_range(dense: _DenseSystem, start: int, stop: int) -> int:
    total = 0
    base = dense.field.order
    for plen, pidx in aligned_blocks(start, stop, base, dense.arity):
        prefix = point_codes(dense.field, plen, pidx)
        total += dense.count_block(prefix)
    return total


def _count_terms(
    terms_list: Sequence[Terms],
    arity: int,
    field: FieldSpec,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    threads: int = 1,
    chunks: int | None = None,
    ranges: Sequence[tuple[int, int]] | None = None,
) -> int:
    total = check_budget(field, arity, budget)
    terms_list = [t for t in terms_list if t]
    if not terms_list:
        return total
    if any(all(not any(e) for e, _ in t) for t in terms_list):
        # a nonzero constant member has no zeros
        return 0
    if arity == 0:
        return 1
    dense = _DenseSystem(terms_list, arity, field)
    if ranges is None:
        ranges = split_range(total, chunks or threads)
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: _count_range(dense, *r), ranges))
    else:
        parts = [_count_range(dense, lo, hi) for lo, hi in ranges]
    return sum(parts)


# -- public counting API -------------------------------------------------------------

def brute_count(
    system,
    field: FieldSpec,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    threads: int | None = None,
    chunks: int | None = None,
    ranges: Sequence[tuple[int, int]] | None = None,
    subject: str = "",
) -> CountRecord:
    """Exact number of common zeros in ``field^m`` by exhaustive evaluation.

    ``ranges`` (index intervals of the lexicographic enumeration) lets callers
    count a partition piecewise; the default splits into ``chunks`` pieces.
    """
    system = as_system(system)
    threads = threads or default_threads()
    t0 = time.perf_counter()
    terms = [_terms_of(f, field.p) for f in system.polys]
    n = _count_terms(terms, system.arity, field, budget, threads, chunks, ranges)
    return CountRecord(
        subject=subject or system.digest()[:16],
        poly_hash=system.digest(),
        spin=None,
        field=field.to_dict(),
        arity=system.arity,
        count=n,
        method="brute",
        wall_time=time.perf_counter() - t0,
    )


def tutte_count(
    g: Graph,
    q: int,
    field: FieldSpec,
    *,
    method: str = "brute",
    normalized: bool = False,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    threads: int | None = None,
    cap: int = DEFAULT_EDGE_CAP,
) -> CountRecord:
    """Points ``t`` of ``field^m`` with ``Z_G(q, t) = 0`` for an integer spin count ``q``."""
    from .polynomials import normalized_tutte

    z = normalized_tutte(g, cap) if normalized else tutte(g, cap)
    zq = z.specialize_q(q)
    m = g.edge_count
    label = g.label() + (" (normalized)" if normalized else "")
    if not normalized and q % field.p == 0:
        # every subset term carries a positive power of q
        return CountRecord(label, PolySystem([zq]).digest(), q, field.to_dict(), m,
                           field.order**m, "short-circuit", 0.0)
    if method == "brute":
        rec = brute_count([zq], field, budget=budget, threads=threads, subject=label)
    elif method == "reduced":
        rec = reduced_count([zq], field, subject=label)
    else:
        raise ValueError(f"unknown counting method {method!r}")
    rec.spin = q
    return rec


def zfrak(system, field: FieldSpec, **kw) -> Fraction:
    """Probability that a uniform point of ``field^m`` is a common zero."""
    system = as_system(system)
    n = brute_count(system, field, **kw).count
    return Fraction(n, field.order**system.arity)


def zfrak_complement(system, field: FieldSpec, **kw) -> Fraction:
    return 1 - zfrak(system, field, **kw)


def joint_count(g: Graph, field: FieldSpec, cap: int = DEFAULT_EDGE_CAP, **kw) -> int:
    """Points ``(q, t)`` of ``field^(m+1)`` with ``Z_G(q, t) = 0``; ``q`` ranges over the field."""
    terms = _terms_of(tutte(g, cap), field.p, with_q=True)
    return _count_terms([terms], g.edge_count + 1, field, **kw)


# -- reduction engine -----------------------------------------------------------------
#
# Systems are tuples of term tuples over n variables with coefficients in F_p.
# A variable x of degree <= 1 everywhere is eliminated via f1 = A x + B:
#   N(S) = N(S - f1 + {A, B}) + N'(G) - N'(G + {A}),   G = {A D_i - B C_i}
# where N' counts in the n-1 remaining variables.

def _padd(a: dict, b: dict, p: int, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = (out.get(e, 0) + sign * c) % p
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pmul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


class ReductionEngine:
    """Exact counting by linear-variable elimination with memoization."""

    def __init__(self, field: FieldSpec, brute_vars: int = REDUCTION_BRUTE_VARS,
                 term_limit: int = REDUCTION_TERM_LIMIT, budget: int = DEFAULT_ENUMERATION_BUDGET):
        self.field = field
        self.p = field.p
        self.brute_vars = brute_vars
        self.term_limit = term_limit
        self.budget = budget
        self.memo: dict = {}
        self._lock = threading.Lock()
        self.stats = {"brute": 0, "eliminations": 0, "memo_hits": 0}

    # normalization -------------------------------------------------------
    def _monic(self, poly: dict) -> dict:
        lead = poly[max(poly)]
        if lead == 1:
            return poly
        inv = pow(lead, -1, self.p)
        return {e: c * inv % self.p for e, c in poly.items()}

    def _canonical(self, polys: list[dict], n: int):
        """Drop trivial members, strip unused variables, rename by first use.

        Returns ``(None, 0)`` for an empty zero set, else ``(key, free)`` where
        ``free`` counts variables that occur nowhere.
        """
        kept = []
        for f in polys:
            if not f:
                continue
            if len(f) == 1 and not any(next(iter(f))):
                return None, 0
            kept.append(self._monic(f))
        used = sorted({i for f in kept for e in f for i, x in enumerate(e) if x})
        free = n - len(used)
        # first-use order after a provisional sort
        prov = sorted(tuple(sorted((tuple(e[i] for i in used), c) for e, c in f.items())) for f in kept)
        order: dict[int, int] = {}
        for f in prov:
            for e, _ in f:
                for i, x in enumerate(e):
                    if x and i not in order:
                        order[i] = len(order)
        perm = [None] * len(used)
        for old, new in order.items():
            perm[new] = old
        key = tuple(sorted(set(
            tuple(sorted((tuple(e[perm[j]] for j in range(len(used))), c) for e, c in f))
            for f in prov
        )))
        return key, free

    def count(self, polys: list[dict], n: int) -> int:
        key, free = self._canonical(polys, n)
        if key is None:
            return 0
        return self.field.order**free * self._count_key(key)

    def _count_key(self, key) -> int:
        hit = self.memo.get(key)
        if hit is not None:
            self.stats["memo_hits"] += 1
            return hit
        n = len(key[0][0][0]) if key else 0
        result = self._solve(key, n)
        with self._lock:
            self.memo.setdefault(key, result)
        return result

    def _components(self, key, n):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for f in key:
            vs = [i for e, _ in f for i, x in enumerate(e) if x]
            for v in vs[1:]:
                parent[find(v)] = find(vs[0])
        groups: dict[int, list] = {}
        for f in key:
            v = next(i for e, _ in f for i, x in enumerate(e) if x)
            groups.setdefault(find(v), []).append(f)
        return list(groups.values())

    def _solve(self, key, n: int) -> int:
        if not key:
            return self.field.order**n
        comps = self._components(key, n)
        if len(comps) > 1:
            result = 1
            for comp in comps:
                result *= self.count([dict(f) for f in comp], n) // self.field.order ** (n - self._nvars(comp))
                if not result:
                    break
            return result
        if n <= self.brute_vars or any(len(f) > self.term_limit for f in key):
            return self._brute(key, n)
        var = self._pick_variable(key, n)
        if var is None:
            return self._brute(key, n)
        self.stats["eliminations"] += 1
        polys = [dict(f) for f in key]
        holders = [i for i, f in enumerate(polys) if any(e[var] for e in f)]
        i1 = min(holders, key=lambda i: len(polys[i]))
        a, b = self._split(polys[i1], var)
        others = [polys[i] for i in range(len(polys)) if i != i1]
        # A = 0 branch: x stays free in the remaining members
        n_zero = self.count(others + [a, b], n)
        # A != 0 branch: x = -B/A, eliminated
        g = []
        for f in others:
            c, d = self._split(f, var)
            g.append(_padd(_pmul(a, d, self.p), _pmul(b, c, self.p), self.p, -1))
        g = [self._drop(f, var) for f in g]
        a_red = self._drop(a, var)
        n_g = self.count(g, n - 1)
        n_ga = self.count(g + [a_red], n - 1) if n_g else 0
        return n_zero + n_g - n_ga

    @staticmethod
    def _nvars(comp) -> int:
        return len({i for f in comp for e, _ in f for i, x in enumerate(e) if x})

    @staticmethod
    def _split(f: dict, var: int) -> tuple[dict, dict]:
        a, b = {}, {}
        for e, c in f.items():
            if e[var]:
                a[e[:var] + (0,) + e[var + 1 :]] = c
            else:
                b[e] = c
        return a, b

    @staticmethod
    def _drop(f: dict, var: int) -> dict:
        return {e[:var] + e[var + 1 :]: c for e, c in f.items()}

    @staticmethod
    def _pick_variable(key, n: int) -> int | None:
        best, best_score = None, None
        for v in range(n):
            degs = [max((e[v] for e, _ in f), default=0) for f in key]
            if max(degs) != 1:
                continue
            score = (sum(degs), sum(len(f) for f, d in zip(key, degs) if d))
            if best_score is None or score < best_score:
                best, best_score = v, score
        return best

    def _brute(self, key, n: int) -> int:
        self.stats["brute"] += 1
        return _count_terms([tuple(f) for f in key], n, self.field, self.budget)


def reduced_count(system, field: FieldSpec, *, engine: ReductionEngine | None = None,
                  subject: str = "") -> CountRecord:
    """Exact count via linear-variable elimination; agrees with :func:`brute_count`."""
    system = as_system(system)
    engine = engine or ReductionEngine(field)
    t0 = time.perf_counter()
    polys = [dict(_terms_of(f, field.p)) for f in system.polys]
    n = engine.count(polys, system.arity)
    return CountRecord(
        subject=subject or system.digest()[:16],
        poly_hash=system.digest(),
        spin=None,
        field=field.to_dict(),
        arity=system.arity,
        count=n,
        method="reduced",
        wall_time=time.perf_counter() - t0,
        extra=dict(engine.stats),
    )


# -- deletion-contraction checks -------------------------------------------------------

def _specialized(g: Graph, q: int) -> MultiPoly:
    return tutte(g).specialize_q(q)


def delcon_count_identity(g: Graph, e: int, q: int, field: FieldSpec, **kw) -> dict:
    """Brute-force both sides of ``N(Z_G) = Q N(Z_{G/e}, Z_{G-e}) + Q^{m-1} - N(Z_{G/e})``."""
    m = g.edge_count
    qq = field.order
    n_g = brute_count([_specialized(g, q)], field, **kw).count
    z_con = _specialized(contract(g, e), q)
    z_del = _specialized(delete(g, e), q)
    n_con = brute_count([z_con], field, **kw).count
    n_both = brute_count([z_con, z_del], field, **kw).count
    rhs = qq * n_both + qq ** (m - 1) - n_con
    return {
        "graph": g.label(),
        "edge": e,
        "q": q,
        "field": str(field),
        "lhs": n_g,
        "rhs": rhs,
        "N_contract": n_con,
        "N_contract_and_delete": n_both,
        "equal": n_g == rhs,
    }


def zfrak_delcon_terms(g: Graph, e: int, q: int, field: FieldSpec, **kw) -> dict:
    """All counting-function terms of the two deletion-contraction relations, brute-forced."""
    qq = Fraction(field.order)
    z = zfrak([_specialized(g, q)], field, **kw)
    z_con = zfrak([_specialized(contract(g, e), q)], field, **kw)
    z_both = zfrak([_specialized(contract(g, e), q), _specialized(delete(g, e), q)], field, **kw)
    rhs = 1 / qq - z_con / qq + z_both
    zv = 1 - z
    zv_rhs = (1 - z_both) - (1 - z_con) / qq
    return {
        "z": z,
        "z_contract": z_con,
        "z_contract_delete": z_both,
        "z_rhs": rhs,
        "zvee": zv,
        "zvee_rhs": zv_rhs,
        "z_holds": z == rhs,
        "zvee_holds": zv == zv_rhs,
    }


# -- chains ----------------------------------------------------------------------------

def chain_count(blocks: Sequence[tuple[Graph, CountRecord]], q: int, field: FieldSpec) -> CountRecord:
    """Count for blocks glued at single vertices: ``Q^M - prod (Q^{m_i} - N_i)``."""
    if q % field.p == 0:
        raise ValueError("chain formula needs q nonzero in the field; every point is a zero")
    if not blocks:
        raise ValueError("need at least one block")
    qq = field.order
    total_m = 0
    complement = 1
    for g, rec in blocks:
        if rec.arity != g.edge_count or rec.field_order != qq:
            raise ValueError("block count does not match its graph or field")
        total_m += g.edge_count
        complement *= qq**g.edge_count - rec.count
    label = "chain(" + ",".join(g.label() for g, _ in blocks) + ")"
    return CountRecord(label, "", q, field.to_dict(), total_m, qq**total_m - complement,
                       "chain-formula", 0.0)


# -- Potts state sum ---------------------------------------------------------------------

def potts_state_sum(g: Graph, q: int, t: Sequence) -> object:
    """``sum over spin maps V -> {0..q-1} of prod_e (1 + t_e [spins agree])``, summed explicitly."""
    if len(t) != g.edge_count:
        raise ValueError("one weight per edge required")
    total = 0
    for sigma in product(range(q), repeat=g.vertex_count):
        w = 1
        for (u, v), te in zip(g.edges, t):
            if sigma[u] == sigma[v]:
                w = w * (1 + te)
        total = total + w
    return total


__all__ = [
    "PolySystem",
    "CountRecord",
    "BudgetExceeded",
    "brute_count",
    "tutte_count",
    "zfrak",
    "zfrak_complement",
    "joint_count",
    "ReductionEngine",
    "reduced_count",
    "delcon_count_identity",
    "zfrak_delcon_terms",
    "chain_count",
    "potts_state_sum",
    "aligned_blocks",
]
