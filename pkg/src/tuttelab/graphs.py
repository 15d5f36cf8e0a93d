"""Finite multigraphs with stable edge indexing, plus the chain families.

Edge ``e`` of a :class:`Graph` is bound to the polynomial variable ``t_{e+1}``;
every operation here preserves the relative order of the surviving edges.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

EdgeSubset = int  # bit e set <=> edge e belongs to the subset


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be non-negative")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge {(u, v)} out of range for {self.vertex_count} vertices")
        object.__setattr__(self, "edges", edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def subset(self, indices: Iterable[int]) -> EdgeSubset:
        mask = 0
        for e in indices:
            self._check_edge(e)
            mask |= 1 << e
        return mask

    def full_subset(self) -> EdgeSubset:
        return (1 << self.edge_count) - 1

    def _check_edge(self, e: int) -> None:
        if not 0 <= e < self.edge_count:
            raise IndexError(f"edge index {e} out of range (edge count {self.edge_count})")

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Graph":
        return cls(int(data["vertices"]), tuple(tuple(e) for e in data["edges"]), name)

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "Graph":
        return cls.from_dict(json.loads(text), name)

    def label(self) -> str:
        return self.name or self.to_json()


class _UnionFind:
    __slots__ = ("parent", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        self.count -= 1
        return True


def components_count(g: Graph, a: EdgeSubset | None = None) -> int:
    """Number of connected components of the spanning subgraph (V, A).

    Isolated vertices count as components. ``a=None`` means the full edge set.
    """
    if a is None:
        a = g.full_subset()
    if a >> g.edge_count:
        raise ValueError("edge subset has bits beyond the edge count")
    uf = _UnionFind(g.vertex_count)
    for e, (u, v) in enumerate(g.edges):
        if a >> e & 1:
            uf.union(u, v)
    return uf.count


def first_betti(g: Graph) -> int:
    return g.edge_count - g.vertex_count + components_count(g)


def delete(g: Graph, e: int) -> Graph:
    g._check_edge(e)
    return Graph(g.vertex_count, g.edges[:e] + g.edges[e + 1 :])


def contract(g: Graph, e: int) -> Graph:
    """Identify the endpoints of edge ``e`` and drop it.

    Contracting a loop is the same as deleting it. The merged vertex takes the
    smaller index; vertices above the removed one shift down by one.
    """
    g._check_edge(e)
    u, v = g.edges[e]
    if u == v:
        return delete(g, e)
    keep, gone = min(u, v), max(u, v)

    def relabel(x: int) -> int:
        if x == gone:
            x = keep
        return x - 1 if x > gone else x

    rest = g.edges[:e] + g.edges[e + 1 :]
    return Graph(g.vertex_count - 1, tuple((relabel(a), relabel(b)) for a, b in rest))


def spanning_structures(g: Graph) -> list[EdgeSubset]:
    """All maximal spanning forests, as edge subsets in lexicographic order."""
    rank = g.vertex_count - components_count(g)
    forests = []
    for combo in itertools.combinations(range(g.edge_count), rank):
        uf = _UnionFind(g.vertex_count)
        if all(uf.union(*g.edges[e]) for e in combo):
            forests.append(g.subset(combo))
    return forests


def subset_members(a: EdgeSubset) -> Iterator[int]:
    e = 0
    while a:
        if a & 1:
            yield e
        a >>= 1
        e += 1


# -- families --------------------------------------------------------------

def polygon(sides: int) -> Graph:
    """Cycle C_s; edge i joins vertex i to vertex i+1 (mod s)."""
    if sides < 1:
        raise ValueError("a polygon needs at least one side")
    return Graph(sides, tuple((i, (i + 1) % sides) for i in range(sides)), f"polygon:{sides}")


def path(edge_count: int) -> Graph:
    if edge_count < 1:
        raise ValueError("a tree needs at least one edge")
    return Graph(edge_count + 1, tuple((i, i + 1) for i in range(edge_count)), f"tree:{edge_count}")


def complete(vertex_count: int) -> Graph:
    if vertex_count < 1:
        raise ValueError("complete graph needs at least one vertex")
    edges = tuple(itertools.combinations(range(vertex_count), 2))
    name = "k4" if vertex_count == 4 else f"complete:{vertex_count}"
    return Graph(vertex_count, edges, name)


def edgeless(vertex_count: int) -> Graph:
    return Graph(vertex_count, (), f"edgeless:{vertex_count}")


def polygon_chain(m: int, k: int, n: int) -> Graph:
    """``n`` polygons with ``m+1`` sides, consecutive ones joined by a ``k``-edge path.

    Block by block: the polygon's edges (around the cycle, starting at its
    entry vertex), then the connector path. The connector leaves polygon i at
    the vertex opposite its entry vertex and ends at the entry vertex of
    polygon i+1. ``k = 0`` glues consecutive polygons at that vertex.
    """
    if m < 1 or n < 1 or k < 0:
        raise ValueError("polychain needs m >= 1, k >= 0, N >= 1")
    sides = m + 1
    edges: list[tuple[int, int]] = []
    count = 1
    entry = 0
    for block in range(n):
        verts = [entry] + list(range(count, count + m))
        count += m
        edges.extend((verts[i], verts[(i + 1) % sides]) for i in range(sides))
        if block == n - 1:
            break
        prev = verts[sides // 2]
        for _ in range(k):
            edges.append((prev, count))
            prev = count
            count += 1
        entry = prev
    vertex_count = count
    return Graph(vertex_count, tuple(edges), f"polychain:m={m},k={k},N={n}")


def tetra_chain(n: int) -> Graph:
    """``n`` copies of K4; copy i uses vertices 3i..3i+3, so consecutive copies share one."""
    if n < 1:
        raise ValueError("tetrachain needs N >= 1")
    edges = []
    for block in range(n):
        base = 3 * block
        edges.extend((base + a, base + b) for a, b in itertools.combinations(range(4), 2))
    return Graph(3 * n + 1, tuple(edges), f"tetrachain:{n}")


def one_sum(*blocks: Graph) -> Graph:
    """Chain the blocks so the last vertex of each is the first vertex of the next."""
    edges: list[tuple[int, int]] = []
    offset = 0
    for block in blocks:
        edges.extend((u + offset, v + offset) for u, v in block.edges)
        offset += block.vertex_count - 1
    names = "+".join(b.label() for b in blocks)
    return Graph(offset + 1, tuple(edges), f"chain({names})")


_FAMILY = re.compile(r"^\s*([a-z][a-z0-9]*)\s*(?::\s*(.*))?$", re.I)


def build_family(spec: str) -> Graph:
    """Build a graph from a family string such as ``polygon:4`` or ``polychain:m=3,k=2,N=4``."""
    match = _FAMILY.match(spec)
    if not match:
        raise ValueError(f"cannot parse family spec {spec!r}")
    kind, args = match.group(1).lower(), match.group(2)
    if kind == "k4" and not args:
        return complete(4)
    if kind == "polychain":
        params = {}
        for item in (args or "").split(","):
            key, _, value = item.partition("=")
            params[key.strip().lower()] = int(value)
        try:
            return polygon_chain(params["m"], params["k"], params["n"])
        except KeyError as exc:
            raise ValueError(f"polychain spec missing {exc}") from None
    if args is None:
        raise ValueError(f"family {kind!r} needs a size parameter")
    size = int(args)
    builders = {
        "polygon": polygon,
        "cycle": polygon,
        "tree": path,
        "path": path,
        "complete": complete,
        "tetrachain": tetra_chain,
        "edgeless": edgeless,
    }
    if kind not in builders:
        raise ValueError(f"unknown graph family {kind!r}")
    return builders[kind](size)


def load_graph(arg: str) -> Graph:
    """Family spec string, inline JSON, or path to a JSON graph file."""
    text = arg.strip()
    if text.startswith("{"):
        return Graph.from_json(text)
    if text.endswith(".json"):
        with open(text) as fh:
            return Graph.from_json(fh.read(), name=text)
    return build_family(text)
