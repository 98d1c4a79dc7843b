"""Dense matrices over GF(q) backed by numpy arrays of packed residue codes.

Elimination is exact: the pivot for each column is the first nonzero entry
at or below the current row.  No tolerance is involved anywhere.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .gf import FieldElement, FieldMismatchError, FieldSpec

__all__ = [
    "Matrix",
    "ColumnVector",
    "SingularMatrixError",
    "rank",
    "inverse",
    "mat_mul",
    "mat_vec",
    "stack",
    "solve",
    "same_row_space",
]


class SingularMatrixError(ValueError):
    """Raised when a matrix that must be invertible (or of full column rank) is not."""


def _codes(field: FieldSpec, entries: Iterable) -> list[int]:
    out = []
    for x in entries:
        if isinstance(x, FieldElement):
            if x.field != field:
                raise FieldMismatchError(f"{x.field} vs {field}")
            out.append(x.value)
        else:
            out.append(FieldElement(field, int(x)).value)
    return out


class Matrix:
    """An immutable rows x cols matrix over one field."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data: np.ndarray) -> None:
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError("entries must be packed codes in [0, q)")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(field, np.array([_codes(field, r) for r in rows], dtype=np.int64).reshape(len(rows), width))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    def __getitem__(self, idx: tuple[int, int]) -> FieldElement:
        r, c = idx
        return FieldElement(self.field, int(self.data[r, c]))

    def to_lists(self) -> list[list[int]]:
        return self.data.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.field, self.data.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.field!r}, {self.to_lists()})"

    def _same(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix(self.field, self.field.tables.add[self.data, other.data])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix(self.field, self.field.tables.sub[self.data, other.data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def scale(self, c: FieldElement) -> "Matrix":
        return Matrix(self.field, self.field.tables.mul[c.value, self.data])

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T)

    def row_nnz(self) -> np.ndarray:
        return np.count_nonzero(self.data, axis=1)

    def col_nnz(self) -> np.ndarray:
        return np.count_nonzero(self.data, axis=0)


class ColumnVector:
    """A column of field symbols (node data f_i, or a whole file f)."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data: Iterable) -> None:
        arr = np.array(list(data) if not isinstance(data, np.ndarray) else data, dtype=np.int64).reshape(-1)
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError("entries must be packed codes in [0, q)")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("ColumnVector is immutable")

    @classmethod
    def of(cls, field: FieldSpec, entries: Iterable) -> "ColumnVector":
        return cls(field, np.array(_codes(field, entries), dtype=np.int64))

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def __getitem__(self, i: int) -> FieldElement:
        return FieldElement(self.field, int(self.data[i]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColumnVector):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.field, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"ColumnVector({self.field!r}, {self.data.tolist()})"

    def as_matrix(self) -> Matrix:
        return Matrix(self.field, self.data.reshape(-1, 1))


def _product(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    t = field.tables
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    prods = t.mul[a[:, :, None], b[None, :, :]]
    return t.sum(prods, axis=1)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    a._same(b)
    return Matrix(a.field, _product(a.field, a.data, b.data))


def mat_vec(a: Matrix, v: ColumnVector) -> ColumnVector:
    if a.field != v.field:
        raise FieldMismatchError(f"{a.field} vs {v.field}")
    return ColumnVector(a.field, _product(a.field, a.data, v.data.reshape(-1, 1))[:, 0])


def stack(top: Matrix, bottom: Matrix) -> Matrix:
    top._same(bottom)
    if top.cols != bottom.cols:
        raise ValueError(f"column mismatch {top.cols} vs {bottom.cols}")
    return Matrix(top.field, np.vstack([top.data, bottom.data]))


def _rref(field: FieldSpec, arr: np.ndarray, pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan reduction; pivots are searched in the first ``pivot_cols`` columns."""
    t = field.tables
    m = np.array(arr, dtype=np.int64, copy=True)
    nrows, ncols = m.shape
    limit = ncols if pivot_cols is None else pivot_cols
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = t.mul[t.inv[m[r, c]], m[r]]
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        if others.size:
            scaled = t.mul[m[others, c][:, None], m[r][None, :]]
            m[others] = t.sub[m[others], scaled]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    """Row rank via Gaussian elimination over GF(q)."""
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(_rref(a.field, a.data)[1])


def inverse(a: Matrix) -> Matrix:
    if a.rows != a.cols:
        raise ValueError(f"inverse of non-square {a.shape} matrix")
    n = a.rows
    aug = np.hstack([a.data, np.eye(n, dtype=np.int64)])
    red, pivots = _rref(a.field, aug, pivot_cols=n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix is singular (rank {len(pivots)} < {n})")
    return Matrix(a.field, red[:, n:])


def solve(a: Matrix, y: "ColumnVector | Matrix") -> "ColumnVector | Matrix":
    """Unique x with a @ x == y; ``a`` must have full column rank.

    ``y`` may be a single column or a matrix of right-hand sides.
    """
    rhs = y.data.reshape(-1, 1) if isinstance(y, ColumnVector) else y.data
    if a.field != y.field:
        raise FieldMismatchError(f"{a.field} vs {y.field}")
    if rhs.shape[0] != a.rows:
        raise ValueError(f"right-hand side has {rhs.shape[0]} rows, expected {a.rows}")
    n = a.cols
    red, pivots = _rref(a.field, np.hstack([a.data, rhs]), pivot_cols=n)
    if len(pivots) < n:
        raise SingularMatrixError(f"system is rank deficient (rank {len(pivots)} < {n} unknowns)")
    if np.any(red[n:, n:]):
        raise SingularMatrixError("system is inconsistent")
    x = red[:n, n:]
    if isinstance(y, ColumnVector):
        return ColumnVector(a.field, x[:, 0])
    return Matrix(a.field, x)


def same_row_space(a: Matrix, b: Matrix) -> bool:
    """span(a) == span(b) as row spaces."""
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(stack(a, b))
