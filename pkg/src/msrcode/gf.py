"""Exact arithmetic in GF(p^e).

Elements are stored as a canonical residue: an integer in [0, p) for prime
fields, otherwise the coefficient vector (c_0, ..., c_{e-1}) of a polynomial
of degree < e reduced modulo a fixed irreducible polynomial.  Internally the
coefficient vector is packed into the integer ``sum(c_j * p**j)``; that packed
code is what matrices and shards carry around.

Vectorised helpers (``FieldTables``) expose add/mul tables over the packed
codes so the linear algebra layer can work on numpy arrays.  The tables are
filled from the residue arithmetic below, once per field.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FieldSpec",
    "FieldElement",
    "FieldMismatchError",
    "GF",
    "add",
    "mul",
    "inv",
    "power",
    "primitive_element",
    "is_irreducible",
    "prime_powers",
]

# One irreducible polynomial per (p, e) used by the codes, low degree first.
CANONICAL_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),  # x^3 + x + 1
    (3, 2): (1, 0, 1),  # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
}

MAX_ORDER = 256


class FieldMismatchError(ValueError):
    """Operands come from different fields."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_divmod_p(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of num / den over GF(p); coefficient lists are low degree first."""
    num = list(num)
    while den and den[-1] == 0:
        den = den[:-1]
    lead_inv = pow(den[-1], p - 2, p) if p > 2 else 1
    dd = len(den) - 1
    for shift in range(len(num) - 1 - dd, -1, -1):
        coef = num[shift + dd] * lead_inv % p
        if coef:
            for j, c in enumerate(den):
                num[shift + j] = (num[shift + j] - coef * c) % p
    rem = num[:dd] if dd > 0 else []
    while rem and rem[-1] == 0:
        rem.pop()
    return rem


def is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Exhaustive irreducibility test: no monic factor of degree <= deg/2 divides."""
    coeffs = [c % p for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            cand = [(low // p**j) % p for j in range(d)] + [1]
            if not _poly_divmod_p(coeffs, cand, p):
                return False
    return True


def _first_irreducible(p: int, e: int) -> tuple[int, ...]:
    for low in range(p**e):
        cand = tuple((low // p**j) % p for j in range(e)) + (1,)
        if cand[0] != 0 and is_irreducible(p, cand):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {e} over GF({p})")  # pragma: no cover


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1 or not _is_prime(p):
                break
            return p, e
    raise ValueError(f"{q} is not a prime power")


def prime_powers(lo: int = 2, hi: int = MAX_ORDER) -> Iterator[int]:
    """Prime powers in [lo, hi], ascending."""
    for q in range(max(lo, 2), hi + 1):
        try:
            _factor_prime_power(q)
        except ValueError:
            continue
        yield q


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^e) with a fixed defining polynomial.

    ``modulus`` lists the coefficients of a monic irreducible polynomial of
    degree ``e``, lowest degree first.  It is ignored (and normalised to
    ``(0, 1)``) for prime fields.
    """

    p: int
    e: int = 1
    modulus: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.e < 1:
            raise ValueError("extension degree must be >= 1")
        if self.p**self.e > MAX_ORDER:
            raise ValueError(f"fields with q > {MAX_ORDER} are not supported")
        if self.e == 1:
            object.__setattr__(self, "modulus", (0, 1))
            return
        mod = tuple(int(c) % self.p for c in self.modulus) or CANONICAL_MODULI.get(
            (self.p, self.e)
        ) or _first_irreducible(self.p, self.e)
        if len(mod) != self.e + 1 or mod[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {self.e}")
        if not is_irreducible(self.p, mod):
            raise ValueError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def tables(self) -> "FieldTables":
        return _tables(self.p, self.e, self.modulus)

    def __call__(self, value: "int | Sequence[int] | FieldElement") -> "FieldElement":
        return FieldElement(self, value)

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.q}; {_poly_str(self.modulus)})"

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        """All elements in canonical (packed-integer) order."""
        return [FieldElement(self, v) for v in range(self.q)]

    def nonzero(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(1, self.q)]

    # -- residue-level arithmetic, used to fill the tables -----------------

    def digits(self, code: int) -> tuple[int, ...]:
        return tuple((code // self.p**j) % self.p for j in range(self.e))

    def pack(self, digits: Sequence[int]) -> int:
        return sum((int(d) % self.p) * self.p**j for j, d in enumerate(digits))

    def _add_codes(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return self.pack([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def _mul_codes(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] = (prod[i + j] + xi * yj) % self.p
        rem = _poly_divmod_p(prod, list(self.modulus), self.p)
        return self.pack(rem)


def GF(q: int, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Field of order ``q`` using the canonical modulus unless one is given."""
    p, e = _factor_prime_power(q)
    return FieldSpec(p, e, tuple(modulus) if modulus is not None else ())


def _poly_str(coeffs: Sequence[int]) -> str:
    terms = []
    for j in range(len(coeffs) - 1, -1, -1):
        c = coeffs[j]
        if not c:
            continue
        mono = "1" if j == 0 else ("x" if j == 1 else f"x^{j}")
        if j == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) or "0"


class FieldTables:
    """Dense lookup tables over packed codes for vectorised arithmetic."""

    def __init__(self, spec: FieldSpec) -> None:
        q = spec.q
        self.spec = spec
        self.p = spec.p
        self.e = spec.e
        self.q = q
        self.add = np.empty((q, q), dtype=np.int64)
        self.mul = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                s = spec._add_codes(a, b)
                m = spec._mul_codes(a, b)
                self.add[a, b] = self.add[b, a] = s
                self.mul[a, b] = self.mul[b, a] = m
        self.neg = np.argmin(self.add, axis=1)  # a + neg[a] == 0
        self.sub = self.add[:, self.neg]
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.nonzero(self.mul[a] == 1)[0][0])
        self.digits = np.array([spec.digits(v) for v in range(q)], dtype=np.int64)
        self.weights = np.array([self.p**j for j in range(self.e)], dtype=np.int64)
        for arr in (self.add, self.mul, self.neg, self.sub, self.inv, self.digits):
            arr.setflags(write=False)

    def sum(self, arr: np.ndarray, axis: int) -> np.ndarray:
        """Field sum of ``arr`` along ``axis``."""
        axis = axis % arr.ndim
        if arr.shape[axis] == 0:
            shape = arr.shape[:axis] + arr.shape[axis + 1 :]
            return np.zeros(shape, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(arr, axis=axis)
        if self.e == 1:
            return arr.sum(axis=axis) % self.p
        digit_sums = self.digits[arr].sum(axis=axis) % self.p
        return digit_sums @ self.weights


@functools.lru_cache(maxsize=None)
def _tables(p: int, e: int, modulus: tuple[int, ...]) -> FieldTables:
    return FieldTables(FieldSpec(p, e, modulus))


class FieldElement:
    """An element of a ``FieldSpec``; immutable and hashable."""

    __slots__ = ("field", "value")

    field: FieldSpec
    value: int

    def __init__(self, field: FieldSpec, value: "int | Sequence[int] | FieldElement") -> None:
        if isinstance(value, FieldElement):
            if value.field != field:
                raise FieldMismatchError(f"{value.field} vs {field}")
            code = value.value
        elif isinstance(value, (int, np.integer)):
            code = int(value)
            if field.e == 1:
                code %= field.p
            elif not 0 <= code < field.q:
                raise ValueError(f"packed code {code} out of range for {field}")
        else:
            digits = list(value)
            if len(digits) != field.e:
                raise ValueError(f"expected {field.e} coefficients, got {len(digits)}")
            code = field.pack(digits)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", code)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("FieldElement is immutable")

    @property
    def rep(self) -> "int | tuple[int, ...]":
        """Canonical residue: an int for prime fields, else the coefficient vector."""
        if self.field.e == 1:
            return self.value
        return self.field.digits(self.value)

    def _coerce(self, other: object) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, np.integer)) and self.field.e == 1:
            return FieldElement(self.field, int(other))
        if isinstance(other, (int, np.integer)) and other in (0, 1):
            return FieldElement(self.field, int(other))
        return None

    def __add__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, int(self.field.tables.add[self.value, o.value]))

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.tables.neg[self.value]))

    def __sub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, int(self.field.tables.sub[self.value, o.value]))

    def __rsub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, int(self.field.tables.mul[self.value, o.value]))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return FieldElement(self.field, int(self.field.tables.inv[self.value]))

    def __truediv__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            o = self._coerce(other)
            return o is not None and o.value == self.value
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.field!r}({self})"

    def __str__(self) -> str:
        if self.field.e == 1:
            return str(self.value)
        return _poly_str(self.field.digits(self.value))

    def order(self) -> int:
        """Multiplicative order, by repeated multiplication."""
        if self.value == 0:
            raise ValueError("zero has no multiplicative order")
        acc, n = self, 1
        while acc.value != 1:
            acc = acc * self
            n += 1
        return n


def _check_same(a: FieldElement, b: FieldElement) -> None:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, n: int) -> FieldElement:
    return a**n


def primitive_element(spec: FieldSpec) -> FieldElement:
    """Smallest element (in packed-code order) of multiplicative order q - 1.

    GF(2) is accepted and yields 1, whose order is q - 1 = 1.
    """
    return _primitive(spec)


@functools.lru_cache(maxsize=None)
def _primitive(spec: FieldSpec) -> FieldElement:
    for v in range(1, spec.q):
        el = FieldElement(spec, v)
        if el.order() == spec.q - 1:
            return el
    raise ValueError(f"{spec} has no primitive element")  # pragma: no cover
