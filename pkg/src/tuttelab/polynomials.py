"""Sparse multivariate polynomials in ``q, t_1..t_m`` and the graph polynomials.

A :class:`MultiPoly` maps exponent vectors ``(deg_q, deg_t1, ..., deg_tm)`` to
nonzero coefficients (``int`` or ``Fraction``). Edge ``e`` of a graph is the
variable ``t_{e+1}``.
"""

from __future__ import annotations

import ast
import hashlib
import json
import threading
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .graphs import Graph, components_count, contract, delete, spanning_structures, subset_members

Coeff = Union[int, Fraction]

DEFAULT_EDGE_CAP = 24


class EdgeCapExceeded(ValueError):
    pass


def _norm(c) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class MultiPoly:
    """Immutable sparse polynomial over ZZ or QQ in ``q`` and ``arity`` edge variables."""

    __slots__ = ("arity", "_terms", "_hash")

    def __init__(self, arity: int, terms: Mapping[tuple[int, ...], Coeff] | None = None):
        self.arity = arity
        clean: dict[tuple[int, ...], Coeff] = {}
        for exps, c in (terms or {}).items():
            if len(exps) != arity + 1:
                raise ValueError(f"exponent vector {exps} does not match arity {arity}")
            if c:
                clean[tuple(exps)] = _norm(c)
        self._terms = clean
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, arity: int) -> "MultiPoly":
        return cls(arity)

    @classmethod
    def constant(cls, c: Coeff, arity: int) -> "MultiPoly":
        return cls(arity, {(0,) * (arity + 1): c})

    @classmethod
    def q(cls, arity: int) -> "MultiPoly":
        return cls(arity, {(1,) + (0,) * arity: 1})

    @classmethod
    def t(cls, index: int, arity: int) -> "MultiPoly":
        """Edge variable for 0-based edge ``index`` (printed as ``t{index+1}``)."""
        if not 0 <= index < arity:
            raise IndexError(f"variable index {index} out of range for arity {arity}")
        exps = [0] * (arity + 1)
        exps[index + 1] = 1
        return cls(arity, {tuple(exps): 1})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Coeff]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def q_degrees(self) -> tuple[int, int]:
        qs = [e[0] for e in self._terms]
        return min(qs), max(qs)

    def t_degree(self, index: int) -> int:
        return max((e[index + 1] for e in self._terms), default=0)

    def is_multilinear(self) -> bool:
        return all(x <= 1 for e in self._terms for x in e[1:])

    def t_homogeneous_degrees(self) -> set[int]:
        return {sum(e[1:]) for e in self._terms}

    def has_q(self) -> bool:
        return any(e[0] for e in self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.arity == other.arity and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(other, self.arity)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.arity, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.arity != self.arity:
                raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.arity)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.arity, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.arity, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.arity, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        out: dict[tuple[int, ...], Coeff] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.arity, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(1, self.arity)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- transformations --------------------------------------------------
    def specialize_q(self, value: Coeff) -> "MultiPoly":
        out: dict[tuple[int, ...], Coeff] = {}
        for e, c in self._terms.items():
            key = (0,) + e[1:]
            out[key] = out.get(key, 0) + c * value ** e[0]
        return MultiPoly(self.arity, out)

    def divide_q_power(self, k: int) -> "MultiPoly":
        if any(e[0] < k for e in self._terms):
            raise ArithmeticError(f"polynomial is not divisible by q^{k}")
        return MultiPoly(self.arity, {(e[0] - k,) + e[1:]: c for e, c in self._terms.items()})

    def restrict(self, keep: int) -> "MultiPoly":
        """Set ``t_e = 0`` for every edge ``e`` whose bit is clear in ``keep``."""
        out = {}
        for e, c in self._terms.items():
            if all(not x or keep >> i & 1 for i, x in enumerate(e[1:])):
                out[e] = c
        return MultiPoly(self.arity, out)

    def t_homogeneous_part(self, degree: int) -> "MultiPoly":
        return MultiPoly(self.arity, {e: c for e, c in self._terms.items() if sum(e[1:]) == degree})

    def lowest_t_part(self) -> "MultiPoly":
        if self.is_zero():
            return self
        return self.t_homogeneous_part(min(self.t_homogeneous_degrees()))

    def drop_variable(self, index: int) -> "MultiPoly":
        """Remove edge variable ``index``; it must not occur."""
        if self.t_degree(index):
            raise ValueError(f"t{index + 1} occurs in the polynomial")
        return MultiPoly(
            self.arity - 1, {e[: index + 1] + e[index + 2 :]: c for e, c in self._terms.items()}
        )

    def coefficient_in(self, index: int) -> tuple["MultiPoly", "MultiPoly"]:
        """Split a polynomial of degree <= 1 in ``t_index`` as ``(A, B)`` with ``f = A*t + B``."""
        a, b = {}, {}
        for e, c in self._terms.items():
            d = e[index + 1]
            if d > 1:
                raise ValueError(f"degree {d} in t{index + 1}")
            key = e[: index + 1] + (0,) + e[index + 2 :]
            (a if d else b)[key] = c
        return MultiPoly(self.arity, a), MultiPoly(self.arity, b)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, q, t):
        """Evaluate at ``q`` and the sequence ``t`` (any ring supporting + * **)."""
        if len(t) != self.arity:
            raise ValueError(f"expected {self.arity} edge values, got {len(t)}")
        total = 0
        for e, c in self._terms.items():
            term = c * q ** e[0] if e[0] else c
            for x, d in zip(t, e[1:]):
                if d:
                    term = term * x**d
            total = total + term
        return total

    # -- serialization ----------------------------------------------------
    @staticmethod
    def _order_key(exps: tuple[int, ...]):
        # graded lex, higher degree first; q compared last
        return (-sum(exps), tuple(-x for x in exps[1:]), -exps[0])

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Coeff]]:
        return sorted(self._terms.items(), key=lambda kv: self._order_key(kv[0]))

    def to_records(self) -> list[dict]:
        return [{"coeff": str(c), "q": e[0], "t": list(e[1:])} for e, c in self.sorted_terms()]

    def to_json(self) -> str:
        return json.dumps({"arity": self.arity, "terms": self.to_records()}, separators=(",", ":"))

    @classmethod
    def from_records(cls, records: Iterable[Mapping], arity: int) -> "MultiPoly":
        terms = {}
        for rec in records:
            c = Fraction(rec["coeff"])
            terms[(int(rec["q"]),) + tuple(int(x) for x in rec["t"])] = c
        return cls(arity, terms)

    @classmethod
    def from_json(cls, text: str) -> "MultiPoly":
        data = json.loads(text)
        return cls.from_records(data["terms"], int(data["arity"]))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def to_text(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            if e[0]:
                factors.append("q" if e[0] == 1 else f"q^{e[0]}")
            for i, d in enumerate(e[1:]):
                if d:
                    factors.append(f"{var}{i + 1}" if d == 1 else f"{var}{i + 1}^{d}")
            mono = "*".join(factors)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()!r}, arity={self.arity})"

    __str__ = to_text


# -- parsing ---------------------------------------------------------------

def parse_polynomial(text: str, arity: int) -> MultiPoly:
    """Parse an expression over ``q`` and ``t1..tm`` (``x1..xm`` also accepted).

    Supports ``+ - * /`` (division by constants only), integer powers and
    rational constants. Exponentiation may be written ``**`` or ``^``.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def walk(node) -> MultiPoly | Fraction:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Fraction(str(node.value))
        if isinstance(node, ast.Name):
            name = node.id
            if name == "q":
                return MultiPoly.q(arity)
            if name[0] in "tx" and name[1:].isdigit():
                index = int(name[1:]) - 1
                if not 0 <= index < arity:
                    raise ValueError(f"variable {name} out of range for {arity} edges")
                return MultiPoly.t(index, arity)
            raise ValueError(f"unknown variable {name!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if isinstance(right, MultiPoly):
                    raise ValueError("division by a non-constant")
                return left * (1 / right) if isinstance(left, MultiPoly) else left / right
            if isinstance(node.op, ast.Pow):
                if isinstance(right, MultiPoly) or right.denominator != 1 or right < 0:
                    raise ValueError("exponents must be non-negative integer constants")
                return left ** int(right)
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    result = walk(tree)
    if not isinstance(result, MultiPoly):
        result = MultiPoly.constant(result, arity)
    return result


# -- graph polynomials -------------------------------------------------------

def _check_cap(g: Graph, cap: int) -> None:
    if g.edge_count > cap:
        raise EdgeCapExceeded(f"{g.edge_count} edges exceeds the cap of {cap}")


def _subset_exponent(a: int, m: int, qdeg: int) -> tuple[int, ...]:
    return (qdeg,) + tuple(a >> e & 1 for e in range(m))


def tutte_subset(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    """Multivariate Tutte polynomial by summing over all 2^m spanning subgraphs."""
    _check_cap(g, cap)
    m = g.edge_count
    return MultiPoly(m, {_subset_exponent(a, m, components_count(g, a)): 1 for a in range(1 << m)})


def tutte_delcon(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    """Same polynomial via ``Z_G = Z_{G-e} + t_e Z_{G/e}``, memoized on labelled subgraphs."""
    _check_cap(g, cap)
    m = g.edge_count
    memo: dict[tuple, MultiPoly] = {}
    lock = threading.Lock()

    def canonical(n: int, edges: tuple[tuple[int, int, int], ...]):
        order: dict[int, int] = {}
        for u, v, _ in edges:
            for x in (u, v):
                if x not in order:
                    order[x] = len(order)
        isolated = n - len(order)
        return isolated, tuple((order[u], order[v], lab) for u, v, lab in edges)

    def rec(n: int, edges: tuple[tuple[int, int, int], ...]) -> MultiPoly:
        isolated, key_edges = canonical(n, edges)
        if isolated:
            return rec(n - isolated, key_edges) * MultiPoly.q(m) ** isolated
        key = (n, key_edges)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if not key_edges:
            result = MultiPoly.q(m) ** n
        else:
            u, v, lab = key_edges[-1]
            rest = key_edges[:-1]
            z_del = rec(n, rest)
            if u == v:
                z_con = z_del
            else:
                keep, gone = min(u, v), max(u, v)

                def relabel(x: int) -> int:
                    x = keep if x == gone else x
                    return x - 1 if x > gone else x

                z_con = rec(n - 1, tuple((relabel(a), relabel(b), la) for a, b, la in rest))
            result = z_del + MultiPoly.t(lab, m) * z_con
        with lock:
            memo.setdefault(key, result)
        return result

    return rec(g.vertex_count, tuple((u, v, e) for e, (u, v) in enumerate(g.edges)))


def tutte(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    return tutte_delcon(g, cap)


def kirchhoff(g: Graph) -> MultiPoly:
    """Sum over maximal spanning forests of the product of edge variables *outside* the forest."""
    m = g.edge_count
    full = g.full_subset()
    return MultiPoly(m, {_subset_exponent(full ^ f, m, 0): 1 for f in spanning_structures(g)})


def phi(g: Graph) -> MultiPoly:
    """Sum over maximal spanning forests of the product of edge variables *in* the forest."""
    m = g.edge_count
    return MultiPoly(m, {_subset_exponent(f, m, 0): 1 for f in spanning_structures(g)})


def normalized_tutte(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    k = components_count(g)
    try:
        return tutte(g, cap).divide_q_power(k)
    except ArithmeticError as exc:  # k(A) >= k(E) for every A, so this is a bug
        raise AssertionError(f"Z_G not divisible by q^{k}") from exc


def lowest_part_at_q0(g: Graph, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    if components_count(g) != 1:
        raise ValueError("graph must be connected")
    return normalized_tutte(g, cap).specialize_q(0).lowest_t_part()


def second_polynomial(g: Graph, f: MultiPoly, cap: int = DEFAULT_EDGE_CAP) -> MultiPoly:
    """``sum_A q^k(A) F(t_A) prod_{e in A} t_e`` for an observable ``F`` in the edge variables."""
    _check_cap(g, cap)
    m = g.edge_count
    if f.arity != m:
        raise ValueError(f"observable has arity {f.arity}, graph has {m} edges")
    if f.has_q():
        raise ValueError("observable must not involve q")
    # group F's monomials by their support so F(t_A) is a sum over supports inside A
    by_support: dict[int, dict] = {}
    for e, c in f.items():
        support = sum(1 << i for i, x in enumerate(e[1:]) if x)
        by_support.setdefault(support, {})[e[1:]] = c
    out: dict[tuple[int, ...], Coeff] = {}
    for a in range(1 << m):
        inside = [s for s in by_support if s & ~a == 0]
        if not inside:
            continue
        k = components_count(g, a)
        ta = tuple(a >> i & 1 for i in range(m))
        for s in inside:
            for texps, c in by_support[s].items():
                key = (k,) + tuple(x + y for x, y in zip(texps, ta))
                out[key] = out.get(key, 0) + c
    return MultiPoly(m, out)


def cremona_identity_check(g: Graph) -> bool:
    """Check ``Psi_G(t) == Phi_G(1/t) * prod_e t_e`` as polynomials."""
    m = g.edge_count
    psi = kirchhoff(g)
    mapped = {}
    for e, c in phi(g).items():
        flipped = tuple(1 - x for x in e[1:])
        if any(x < 0 for x in flipped):
            return False
        mapped[(0,) + flipped] = c
    return MultiPoly(m, mapped) == psi


def observable(text: str, g: Graph | int) -> MultiPoly:
    arity = g if isinstance(g, int) else g.edge_count
    f = parse_polynomial(text, arity)
    if f.has_q():
        raise ValueError("observables are polynomials in the edge variables only")
    return f


__all__ = [
    "MultiPoly",
    "EdgeCapExceeded",
    "parse_polynomial",
    "tutte_subset",
    "tutte_delcon",
    "tutte",
    "kirchhoff",
    "phi",
    "normalized_tutte",
    "lowest_part_at_q0",
    "second_polynomial",
    "cremona_identity_check",
    "observable",
    "subset_members",
]
