"""Small graphs and random polynomial systems used by the verification suites."""

from __future__ import annotations

import random

from .graphs import Graph, complete, contract, delete, one_sum, path, polygon
from .polynomials import MultiPoly, tutte


def corpus_graphs() -> list[Graph]:
    """Polygons C_3..C_5, short paths, K4 and two-block chains."""
    return [
        polygon(3),
        polygon(4),
        polygon(5),
        path(1),
        path(2),
        path(3),
        complete(4),
        one_sum(polygon(3), polygon(3)),
        one_sum(polygon(3), polygon(4)),
        one_sum(polygon(3), path(1)),
    ]


def random_multilinear(rng: random.Random, arity: int, terms: int, p: int) -> MultiPoly:
    coeffs: dict[tuple[int, ...], int] = {}
    for _ in range(terms):
        exps = (0,) + tuple(rng.randint(0, 1) for _ in range(arity))
        coeffs[exps] = rng.randrange(1, p)
    return MultiPoly(arity, coeffs)


def random_system(rng: random.Random, order: int, p: int, max_points: int = 10**7) -> tuple[str, list[MultiPoly]]:
    """A labelled random system whose enumeration space has at most ``max_points`` points.

    Mixes graph hypersurfaces, the contraction/deletion pairs of the
    deletion-contraction identity, and random multilinear systems.
    """
    graphs = [g for g in corpus_graphs() if order**g.edge_count <= max_points]
    kind = rng.choice(["graph", "pair", "random"] if graphs else ["random"])
    if kind == "graph":
        g = rng.choice(graphs)
        q = rng.randrange(2, 2 * p + 2)
        return f"{g.label()} q={q}", [tutte(g).specialize_q(q)]
    if kind == "pair":
        g = rng.choice(graphs)
        q = rng.randrange(2, 2 * p + 2)
        e = rng.randrange(g.edge_count)
        zc = tutte(contract(g, e)).specialize_q(q)
        zd = tutte(delete(g, e)).specialize_q(q)
        return f"{g.label()} q={q} contract/delete e={e}", [zc, zd]
    arity = 1
    while arity < 8 and order ** (arity + 1) <= max_points:
        arity += 1
    arity = rng.randint(1, arity)
    k = rng.randint(1, 3)
    polys = [random_multilinear(rng, arity, rng.randint(1, 6), p) for _ in range(k)]
    return f"random arity={arity} k={k}", polys
