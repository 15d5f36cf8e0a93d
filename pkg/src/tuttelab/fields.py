"""Prime and extension finite fields.

Elements of ``F_{p^r}`` are coefficient vectors over ``F_p`` modulo a monic
irreducible polynomial. Internally an element is also encoded as the integer
``sum c_i p^i`` (``c_i`` the coefficient of ``x^i``), which is what the
vectorized kernels in :class:`FieldArith` operate on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

DEFAULT_FIELD_BOUND = 2**20
DEFAULT_ENUMERATION_BUDGET = 2 * 10**9
TABLE_LIMIT = 2**12


class BudgetExceeded(RuntimeError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- dense polynomials over F_p (coefficient lists, low degree first) -------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _monic_polys(degree: int, p: int) -> Iterator[list[int]]:
    """Monic polynomials of ``degree`` in ascending order of their lower-coefficient code."""
    for code in range(p**degree):
        coeffs = [(code // p**i) % p for i in range(degree)]
        yield coeffs + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim([c % p for c in poly])
    n = len(poly) - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for divisor in _monic_polys(d, p):
            if not _poly_mod(poly, divisor, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    r: int = 1
    modulus: tuple[int, ...] = ()  # low degree first, monic, length r+1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.r < 1:
            raise ValueError("extension degree must be >= 1")
        modulus = tuple(self.modulus) or ((0, 1) if self.r == 1 else ())
        if len(modulus) != self.r + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree r")
        if self.r > 1 and not is_irreducible(modulus, self.p):
            raise ValueError(f"modulus {modulus} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", modulus)

    @property
    def order(self) -> int:
        return self.p**self.r

    @property
    def is_prime_field(self) -> bool:
        return self.r == 1

    def modulus_text(self) -> str:
        terms = []
        for i in range(self.r, -1, -1):
            c = self.modulus[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and mono else f"{c}{mono}")
        return " + ".join(terms)

    def __str__(self) -> str:
        if self.r == 1:
            return f"F_{self.p}"
        return f"F_{{{self.p}^{self.r}}} mod {self.modulus_text()}"

    def to_dict(self) -> dict:
        return {"p": self.p, "r": self.r, "modulus": list(self.modulus)}

    # -- elements -----------------------------------------------------------
    def element(self, value) -> "FieldElement":
        """Element from an int/Fraction (mapped through the prime subfield) or a coefficient vector."""
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, Fraction):
            num = self.element(value.numerator)
            return num * self.element(value.denominator).inv()
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, int(value) % self.p)
        coeffs = list(value)
        if len(coeffs) > self.r:
            raise ValueError("too many coefficients")
        return FieldElement(self, sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def from_code(self, code: int) -> "FieldElement":
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} out of range")
        return FieldElement(self, code)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, c) for c in range(self.order)]

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def arith(self) -> "FieldArith":
        return _arith(self)


def make_field(p: int, r: int = 1, bound: int = DEFAULT_FIELD_BOUND) -> FieldSpec:
    """F_{p^r} with the first monic irreducible modulus in ascending coefficient order."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if r < 1:
        raise ValueError("extension degree must be >= 1")
    if p**r > bound:
        raise BudgetExceeded(f"field size {p}^{r} exceeds bound {bound}")
    if r == 1:
        return FieldSpec(p, 1)
    for cand in _monic_polys(r, p):
        if is_irreducible(cand, p):
            return FieldSpec(p, r, tuple(cand))
    raise AssertionError("no irreducible polynomial found")  # impossible for r >= 1


def field_of_order(order: int) -> FieldSpec:
    for p in range(2, order + 1):
        if is_prime(p):
            r, n = 0, order
            while n % p == 0:
                n //= p
                r += 1
            if n == 1:
                return make_field(p, r)
            if r:
                break
    raise ValueError(f"{order} is not a prime power")


# -- scalar arithmetic on codes ----------------------------------------------

def _digits(code: int, p: int, r: int) -> list[int]:
    return [(code // p**i) % p for i in range(r)]


def _undigits(coeffs: Sequence[int], p: int) -> int:
    return sum((c % p) * p**i for i, c in enumerate(coeffs))


def _add_codes(f: FieldSpec, a: int, b: int) -> int:
    if f.r == 1:
        return (a + b) % f.p
    return _undigits([x + y for x, y in zip(_digits(a, f.p, f.r), _digits(b, f.p, f.r))], f.p)


def _neg_code(f: FieldSpec, a: int) -> int:
    if f.r == 1:
        return -a % f.p
    return _undigits([-x for x in _digits(a, f.p, f.r)], f.p)


def _mul_codes(f: FieldSpec, a: int, b: int) -> int:
    p = f.p
    if f.r == 1:
        return a * b % p
    x, y = _digits(a, p, f.r), _digits(b, p, f.r)
    prod = [0] * (2 * f.r - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                prod[i + j] += xi * yj
    rem = _poly_mod(prod, f.modulus, p) if len(prod) > f.r else prod
    return _undigits(rem, p)


def _pow_code(f: FieldSpec, a: int, n: int) -> int:
    result, base = 1, a
    while n:
        if n & 1:
            result = _mul_codes(f, result, base)
        base = _mul_codes(f, base, base)
        n >>= 1
    return result


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(_digits(self.code, self.field.p, self.field.r))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements from different fields")
            return other.code
        return self.field.element(other).code

    def __add__(self, other):
        return FieldElement(self.field, _add_codes(self.field, self.code, self._other(other)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, _neg_code(self.field, self.code))

    def __sub__(self, other):
        return self + (-FieldElement(self.field, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self._other(other)) - self

    def __mul__(self, other):
        return FieldElement(self.field, _mul_codes(self.field, self.code, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return FieldElement(self.field, _pow_code(self.field, self.code, n))

    def inv(self) -> "FieldElement":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * FieldElement(self.field, self._other(other)).inv()

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, Fraction)):
            return self.code == self.field.element(other).code
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.code))

    def __repr__(self) -> str:
        if self.field.r == 1:
            return f"{self.code} (mod {self.field.p})"
        return f"{list(self.coeffs)} in {self.field}"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


# -- enumeration -------------------------------------------------------------

def check_budget(field: FieldSpec, arity: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> int:
    total = field.order**arity
    if total > budget:
        raise BudgetExceeded(f"{field.order}^{arity} = {total} points exceeds budget {budget}")
    return total


def point_codes(field: FieldSpec, arity: int, index: int) -> tuple[int, ...]:
    """Codes of the ``index``-th point in lexicographic order (first coordinate most significant)."""
    q = field.order
    out = []
    for _ in range(arity):
        index, digit = divmod(index, q)
        out.append(digit)
    return tuple(reversed(out))


def enumerate_points(
    field: FieldSpec,
    arity: int,
    start: int = 0,
    stop: int | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Iterator[tuple[FieldElement, ...]]:
    """All points of ``field^arity`` in lexicographic order, or the index range ``[start, stop)``."""
    total = check_budget(field, arity, budget)
    stop = total if stop is None else min(stop, total)
    if start == 0 and stop == total:
        elems = field.elements()
        yield from itertools.product(elems, repeat=arity)
        return
    for index in range(start, stop):
        yield tuple(FieldElement(field, c) for c in point_codes(field, arity, index))


def split_range(total: int, chunks: int) -> list[tuple[int, int]]:
    chunks = max(1, min(chunks, total)) if total else 1
    bounds = [total * i // chunks for i in range(chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(chunks)]


def eval_poly(poly, q_value, point: Sequence[FieldElement]) -> FieldElement:
    """Value of a :class:`~tuttelab.polynomials.MultiPoly` at ``q_value`` and ``point``."""
    if len(point) != poly.arity:
        raise ValueError(f"polynomial has arity {poly.arity}, point has {len(point)} coordinates")
    field = point[0].field if point else (q_value.field if isinstance(q_value, FieldElement) else None)
    if field is None:
        raise ValueError("cannot infer the field; pass q_value as a FieldElement")
    qv = field.element(q_value)
    total = field.zero()
    for exps, c in poly.items():
        term = field.element(c)
        if exps[0]:
            term = term * qv ** exps[0]
        for x, d in zip(point, exps[1:]):
            if d:
                term = term * x**d
        total = total + term
    return total


# -- vectorized kernels --------------------------------------------------------

class FieldArith:
    """Elementwise arithmetic on numpy arrays of element codes."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.p = field.p
        self.order = field.order
        self.prime = field.r == 1
        if not self.prime:
            if self.order > TABLE_LIMIT:
                raise BudgetExceeded(f"vectorized tables limited to fields of size <= {TABLE_LIMIT}")
            q = self.order
            codes = range(q)
            self.add_table = np.array(
                [[_add_codes(field, a, b) for b in codes] for a in codes], dtype=np.int64
            )
            self.mul_table = np.array(
                [[_mul_codes(field, a, b) for b in codes] for a in codes], dtype=np.int64
            )
            self.neg_table = np.array([_neg_code(field, a) for a in codes], dtype=np.int64)

    def const(self, c) -> int:
        return self.field.element(c).code

    def add(self, a, b):
        if self.prime:
            return (a + b) % self.p
        return self.add_table[a, b]

    def mul(self, a, b):
        if self.prime:
            return (a * b) % self.p
        return self.mul_table[a, b]

    def neg(self, a):
        if self.prime:
            return (-a) % self.p
        return self.neg_table[a]

    def power_matrix(self, max_degree: int) -> np.ndarray:
        """Array ``V[x, k] = code(x^k)`` over every field element ``x``."""
        q = self.order
        out = np.empty((q, max_degree + 1), dtype=np.int64)
        out[:, 0] = 1
        xs = np.arange(q, dtype=np.int64)
        for k in range(1, max_degree + 1):
            out[:, k] = self.mul(out[:, k - 1], xs)
        return out


@lru_cache(maxsize=64)
def _arith(field: FieldSpec) -> FieldArith:
    return FieldArith(field)
