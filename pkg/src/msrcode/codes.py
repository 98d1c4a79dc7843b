"""(k+2, k) MSR codes built from typed invariant-subspace blocks.

Every code here stores ``f_1..f_k`` on the systematic nodes, ``f_{k+1} = sum f_i``
on the first parity and ``f_{k+2} = sum A_i f_i`` on the second.  Node ``i``
works on partition axis ``axis_of(i, m)``.  Row ``x`` of ``A_i`` is the image of
basis row ``e_x``; for each pair ``(x, x')`` with ``x`` in V_{axis,0} and
``x'`` its partner in V_{axis,1}, the 2x2 block ``(a, b; c, d)`` means::

    e_x  A_i = a e_x + b e_x'
    e_x' A_i = c e_x + d e_x'

Node indices are 1-based on the public surface.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .gf import FieldElement, FieldSpec, GF, prime_powers, primitive_element
from .linalg import Matrix, SingularMatrixError, inverse, mat_mul
from .partition import Partition, axis_of, standard_partition

__all__ = [
    "PairType",
    "RepairKind",
    "RepairForm",
    "NodeParams",
    "ConstructionParams",
    "CodeId",
    "CodeSpec",
    "ConstructionError",
    "Table1Row",
    "build_generic",
    "node_matrices",
    "build_c1",
    "build_c2",
    "build_c3",
    "build_c4",
    "build_modified_zigzag",
    "build_long_mds",
    "build_code",
    "theorem_table",
    "params_from_table",
    "table_from_params",
    "free_keys",
    "minimal_field",
    "table1_report",
    "format_table1",
    "is_access_optimal",
    "is_update_optimal",
    "dumps",
    "loads",
    "dumps_table",
    "loads_table",
]

Coef = Union[FieldElement, tuple[FieldElement, ...]]
CoefficientTable = dict[tuple, Coef]


class ConstructionError(ValueError):
    """Coefficients or field do not satisfy a construction's preconditions."""


class PairType(str, Enum):
    """Action of a coding matrix on a basis pair (e_x, e_x')."""

    I = "I"  # (a e_x ; d e_x')
    II = "II"  # (b e_x' ; c e_x)
    III = "III"  # (a e_x ; c e_x + d e_x')
    IV = "IV"  # (b e_x' ; c e_x + d e_x')
    III_SWAPPED = "III'"  # (a e_x + b e_x' ; d e_x'), type III with the pair reversed


class RepairKind(str, Enum):
    V0 = "V0"
    V1 = "V1"
    COMBO = "V0+tV1"


@dataclass(frozen=True)
class RepairForm:
    kind: RepairKind
    t: Coef | None = None

    def __post_init__(self) -> None:
        if (self.kind is RepairKind.COMBO) != (self.t is not None):
            raise ValueError("t is required exactly for the V0+tV1 form")


def _coef_at(c: Coef, s: int) -> FieldElement:
    return c[s] if isinstance(c, tuple) else c


def _coef_nonzero(c: Coef) -> bool:
    return all(x.value for x in c) if isinstance(c, tuple) else bool(c.value)


@dataclass(frozen=True)
class NodeParams:
    pair_type: PairType
    lam0: Coef
    lam1: Coef
    k: Coef | None = None
    repair: RepairForm = RepairForm(RepairKind.V0)

    def block(self, s: int, zero: FieldElement) -> tuple[FieldElement, FieldElement, FieldElement, FieldElement]:
        l0, l1 = _coef_at(self.lam0, s), _coef_at(self.lam1, s)
        kk = _coef_at(self.k, s) if self.k is not None else zero
        pt = self.pair_type
        if pt is PairType.I:
            return l0, zero, zero, l1
        if pt is PairType.II:
            return zero, l1, l0, zero
        if pt is PairType.III:
            return l0, zero, kk, l1
        if pt is PairType.IV:
            return zero, l1, l0, kk
        return l0, kk, zero, l1


class CodeId(str, Enum):
    CUSTOM = "CUSTOM"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    ZIGZAG = "ZIGZAG"
    LONGMDS = "LONGMDS"

    @property
    def byte(self) -> int:
        return list(CodeId).index(self)

    @classmethod
    def from_byte(cls, b: int) -> "CodeId":
        members = list(cls)
        if not 0 <= b < len(members):
            raise ValueError(f"unknown code id byte {b}")
        return members[b]


@dataclass(frozen=True)
class ConstructionParams:
    code_id: CodeId
    m: int
    field: FieldSpec
    nodes: tuple[NodeParams, ...]

    @property
    def k(self) -> int:
        return len(self.nodes)


def is_access_optimal(S: Matrix) -> bool:
    """Every row of S is a standard basis row."""
    d = S.data
    return bool(np.all(np.count_nonzero(d, axis=1) == 1) and np.all(d.max(axis=1) == 1) and np.all((d == 0) | (d == 1)))


def is_update_optimal(A: Matrix) -> bool:
    """Every column of A holds exactly one nonzero entry."""
    return bool(np.all(np.count_nonzero(A.data, axis=0) == 1))


@dataclass(frozen=True, eq=False)
class CodeSpec:
    code_id: CodeId
    m: int
    field: FieldSpec
    A: tuple[Matrix, ...]
    S: tuple[Matrix, ...]
    axes: tuple[int, ...]
    repair_forms: tuple[RepairForm, ...]
    pair_types: tuple[PairType | None, ...]
    params: ConstructionParams | None = dc_field(default=None)

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return self.k + 2

    @property
    def d(self) -> int:
        return self.n - 1

    @property
    def alpha(self) -> int:
        return 1 << self.m

    @property
    def beta(self) -> int:
        return self.alpha // 2

    @property
    def repair_bandwidth(self) -> int:
        """Symbols downloaded per stripe to repair one systematic node: d * beta."""
        return self.d * self.beta

    @functools.cached_property
    def access_optimal(self) -> tuple[bool, ...]:
        return tuple(is_access_optimal(s) for s in self.S)

    @functools.cached_property
    def update_optimal(self) -> tuple[bool, ...]:
        return tuple(is_update_optimal(a) for a in self.A)

    @functools.cached_property
    def partition(self) -> Partition:
        return standard_partition(self.m)

    def coding_matrix(self, i: int) -> Matrix:
        return self.A[i - 1]

    def repair_matrix(self, i: int) -> Matrix:
        return self.S[i - 1]

    @functools.cached_property
    def _maps(self) -> dict:
        return {}

    def interference_map(self, i: int, j: int) -> Matrix:
        """M with S_i A_j = M S_i (cached); raises SingularMatrixError if none exists."""
        key = (i, j)
        if key not in self._maps:
            self._maps[key] = _interference_map(self.S[i - 1], self.A[j - 1])
        result = self._maps[key]
        if isinstance(result, Exception):
            raise result
        return result

    def repair_decoder(self, i: int) -> Matrix:
        """Inverse of stack(S_i, S_i A_i) (cached)."""
        key = ("dec", i)
        if key not in self._maps:
            S, A = self.S[i - 1], self.A[i - 1]
            try:
                self._maps[key] = inverse(Matrix(self.field, np.vstack([S.data, mat_mul(S, A).data])))
            except SingularMatrixError as exc:
                self._maps[key] = exc
        result = self._maps[key]
        if isinstance(result, Exception):
            raise result
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodeSpec):
            return NotImplemented
        return (
            self.code_id == other.code_id
            and self.m == other.m
            and self.field == other.field
            and self.A == other.A
            and self.S == other.S
            and self.axes == other.axes
            and self.repair_forms == other.repair_forms
            and self.pair_types == other.pair_types
            and self.params == other.params
        )

    def __hash__(self) -> int:
        return hash((self.code_id, self.m, self.field, self.A, self.S))


def _interference_map(S: Matrix, A: Matrix) -> "Matrix | SingularMatrixError":
    field = S.field
    SA = mat_mul(S, A)
    # Columns where S is invertible: the pivot columns of S.
    from .linalg import _rref

    _, pivots = _rref(field, S.data)
    if len(pivots) < S.rows:
        return SingularMatrixError("repair matrix is rank deficient")
    sub = Matrix(field, S.data[:, pivots])
    try:
        M = mat_mul(Matrix(field, SA.data[:, pivots]), inverse(sub))
    except SingularMatrixError as exc:  # pragma: no cover - pivots guarantee invertibility
        return exc
    if mat_mul(M, S) != SA:
        return SingularMatrixError("span(S_i A_j) is not contained in span(S_i)")
    return M


# -- generic construction ----------------------------------------------------


def node_matrices(node: NodeParams, i: int, m: int, field: FieldSpec) -> tuple[Matrix, Matrix]:
    """Coding and repair matrices of node ``i`` alone."""
    part = standard_partition(m)
    alpha = part.alpha
    zero = field.zero
    for c in (node.lam0, node.lam1):
        if isinstance(c, tuple) and len(c) != alpha // 2:
            raise ConstructionError(f"node {i}: diagonal coefficient needs {alpha // 2} entries")
        if not _coef_nonzero(c):
            raise ConstructionError(f"node {i}: lambda coefficients must be nonzero")
    axis = axis_of(i, m)
    a_data = np.zeros((alpha, alpha), dtype=np.int64)
    s_data = np.zeros((alpha // 2, alpha), dtype=np.int64)
    for s, (x, y) in enumerate(zip(part.V(axis, 0), part.V(axis, 1))):
        a, b, c, d = node.block(s, zero)
        if a * d - b * c == zero:
            raise ConstructionError(f"node {i}: singular 2x2 block at pair ({x}, {y})")
        a_data[x, x], a_data[x, y] = a.value, b.value
        a_data[y, x], a_data[y, y] = c.value, d.value
        form = node.repair
        if form.kind is RepairKind.V0:
            s_data[s, x] = 1
        elif form.kind is RepairKind.V1:
            s_data[s, y] = 1
        else:
            s_data[s, x] = 1
            s_data[s, y] = _coef_at(form.t, s).value
    return Matrix(field, a_data), Matrix(field, s_data)


def build_generic(params: ConstructionParams) -> CodeSpec:
    """Realise coding and repair matrices from typed blocks and repair forms."""
    m, field = params.m, params.field
    per_axis: dict[int, int] = {}
    A, S, axes = [], [], []
    for i, node in enumerate(params.nodes, start=1):
        axis = axis_of(i, m)
        per_axis[axis] = per_axis.get(axis, 0) + 1
        if per_axis[axis] > 3:
            raise ConstructionError(
                f"node {i}: more than three repair matrices on axis {axis} (at most k = 3m nodes)"
            )
        a, s = node_matrices(node, i, m, field)
        A.append(a)
        S.append(s)
        axes.append(axis)
    return CodeSpec(
        code_id=params.code_id,
        m=m,
        field=field,
        A=tuple(A),
        S=tuple(S),
        axes=tuple(axes),
        repair_forms=tuple(n.repair for n in params.nodes),
        pair_types=tuple(n.pair_type for n in params.nodes),
        params=params,
    )


# -- coefficient tables, indexed as in the constructions ---------------------
#
# keys: ("lam", i, s) for node i and s in {0, 1}; ("k", j); ("t", j).


def _node_count(code_id: CodeId, m: int) -> int:
    if code_id in (CodeId.C1, CodeId.LONGMDS):
        return 3 * m
    if code_id in (CodeId.C2, CodeId.C3, CodeId.C4):
        return 2 * m
    if code_id is CodeId.ZIGZAG:
        return m
    raise ValueError(f"{code_id} has no fixed node layout")


def free_keys(code_id: CodeId, m: int) -> list[tuple]:
    """Free coefficients of a construction, indexed as in the construction."""
    k = _node_count(code_id, m)
    keys: list[tuple] = [("lam", i, s) for i in range(1, k + 1) for s in (0, 1)]
    if code_id is CodeId.C1:
        keys += [("k", j) for j in range(1, 2 * m + 1)] + [("t", j) for j in range(1, 2 * m + 1)]
    elif code_id is CodeId.C2:
        keys += [("k", j) for j in range(1, m + 1)] + [("t", j) for j in range(1, m + 1)]
    elif code_id is CodeId.C3:
        keys += [("t", j) for j in range(1, m + 1)]
    elif code_id is CodeId.C4:
        keys += [("t", j) for j in range(1, 2 * m + 1)]
    return keys


def node_keys(code_id: CodeId, m: int, i: int) -> list[tuple]:
    """Keys of ``free_keys`` that shape node ``i``."""
    keys = [("lam", i, 0), ("lam", i, 1)]
    if code_id in (CodeId.C1, CodeId.C2) and i > m:
        keys += [("k", i - m), ("t", i - m)]
    elif code_id is CodeId.C3 and i > m:
        keys += [("t", i - m)]
    elif code_id is CodeId.C4:
        keys += [("t", i)]
    return keys


def _node_from_table(code_id: CodeId, m: int, field: FieldSpec, table: Mapping[tuple, Coef], i: int) -> NodeParams:
    lam0, lam1 = table[("lam", i, 0)], table[("lam", i, 1)]
    combo = RepairKind.COMBO
    if code_id in (CodeId.C1, CodeId.C2):
        if i <= m:
            return NodeParams(PairType.II, lam0, lam1, repair=RepairForm(RepairKind.V0))
        j = i - m
        return NodeParams(PairType.III, lam0, lam1, table[("k", j)], RepairForm(combo, table[("t", j)]))
    if code_id is CodeId.C3:
        if i <= m:
            return NodeParams(PairType.II, lam0, lam1, repair=RepairForm(RepairKind.V0))
        return NodeParams(PairType.I, lam0, lam1, repair=RepairForm(combo, table[("t", i - m)]))
    if code_id is CodeId.C4:
        return NodeParams(PairType.II, lam0, lam1, repair=RepairForm(combo, table[("t", i)]))
    if code_id is CodeId.ZIGZAG:
        return NodeParams(PairType.II, lam0, lam1, repair=RepairForm(RepairKind.V0))
    if code_id is CodeId.LONGMDS:
        if i <= m:
            return NodeParams(PairType.III_SWAPPED, lam0, lam1, _diff(lam0, lam1), RepairForm(RepairKind.V0))
        if i <= 2 * m:
            return NodeParams(PairType.III, lam0, lam1, _diff(lam1, lam0), RepairForm(RepairKind.V1))
        return NodeParams(PairType.I, lam0, lam1, repair=RepairForm(combo, field.one))
    raise ValueError(f"{code_id} has no coefficient table layout")


def _diff(a: Coef, b: Coef) -> Coef:
    if isinstance(a, tuple) or isinstance(b, tuple):
        n = len(a) if isinstance(a, tuple) else len(b)  # type: ignore[arg-type]
        return tuple(_coef_at(a, s) - _coef_at(b, s) for s in range(n))
    return a - b


def params_from_table(code_id: CodeId, m: int, field: FieldSpec, table: Mapping[tuple, Coef]) -> ConstructionParams:
    k = _node_count(code_id, m)
    nodes = tuple(_node_from_table(code_id, m, field, table, i) for i in range(1, k + 1))
    return ConstructionParams(code_id, m, field, nodes)


def table_from_params(params: ConstructionParams) -> CoefficientTable:
    code_id, m = params.code_id, params.m
    table: CoefficientTable = {}
    for i, node in enumerate(params.nodes, start=1):
        table[("lam", i, 0)] = node.lam0
        table[("lam", i, 1)] = node.lam1
        if code_id in (CodeId.C1, CodeId.C2) and i > m:
            table[("k", i - m)] = node.k  # type: ignore[assignment]
            table[("t", i - m)] = node.repair.t  # type: ignore[assignment]
        elif code_id is CodeId.C3 and i > m:
            table[("t", i - m)] = node.repair.t  # type: ignore[assignment]
        elif code_id is CodeId.C4:
            table[("t", i)] = node.repair.t  # type: ignore[assignment]
    return table


def theorem_table(code_id: CodeId, m: int, field: FieldSpec) -> CoefficientTable:
    """The concrete coefficients each construction's theorem prescribes."""
    g = primitive_element(field)
    one = field.one
    t: CoefficientTable = {}
    for i in range(1, m + 1):
        gi = g**i
        if code_id is CodeId.C1:
            t[("lam", i, 0)] = t[("lam", i, 1)] = gi
            t[("lam", i + m, 0)], t[("lam", i + m, 1)] = gi, -gi
            t[("lam", i + 2 * m, 0)], t[("lam", i + 2 * m, 1)] = -gi, gi
            t[("k", i)] = t[("k", i + m)] = -(gi + gi)
            t[("t", i)], t[("t", i + m)] = -one, one
        elif code_id is CodeId.C2:
            for key in (("lam", i, 0), ("lam", i, 1), ("lam", i + m, 0), ("lam", i + m, 1)):
                t[key] = gi
            t[("t", i)] = t[("k", i)] = one
        elif code_id is CodeId.C3:
            t[("lam", i, 0)] = t[("lam", i, 1)] = t[("lam", i + m, 0)] = gi
            t[("lam", i + m, 1)] = g ** (field.q // 2 + i)
            t[("t", i)] = one
        elif code_id is CodeId.C4:
            t[("lam", i, 0)], t[("lam", i, 1)] = gi, g ** (i + 2)
            t[("lam", i + m, 0)] = t[("lam", i + m, 1)] = g ** (i + 1)
            t[("t", i)], t[("t", i + m)] = one, g
        else:
            raise ValueError(f"no theorem coefficients for {code_id}")
    return t


# -- named builders ----------------------------------------------------------


def _check_m(m: int) -> None:
    if not 1 <= m <= 6:
        raise ConstructionError(f"m must be in [1, 6], got {m}")


def _build_named(code_id: CodeId, m: int, field: FieldSpec, table: Mapping[tuple, Coef] | None) -> CodeSpec:
    table = dict(theorem_table(code_id, m, field) if table is None else table)
    return build_generic(params_from_table(code_id, m, field, table))


def build_c1(m: int, field: FieldSpec, table: Mapping[tuple, Coef] | None = None) -> CodeSpec:
    """k = 3m code from type II and type III blocks; needs odd q >= 2m + 1."""
    _check_m(m)
    if field.p == 2:
        raise ConstructionError("C1 requires a field of odd characteristic")
    if field.q < 2 * m + 1:
        raise ConstructionError(f"C1 requires q >= 2m+1 = {2 * m + 1}, got q = {field.q}")
    return _build_named(CodeId.C1, m, field, table)


def build_c2(m: int, field: FieldSpec, table: Mapping[tuple, Coef] | None = None) -> CodeSpec:
    """k = 2m code (C1 without its last m nodes); needs characteristic 2 and q >= m + 1."""
    _check_m(m)
    if field.p != 2:
        raise ConstructionError("C2 requires a field of characteristic 2")
    if field.q < m + 1:
        raise ConstructionError(f"C2 requires q >= m+1 = {m + 1}, got q = {field.q}")
    return _build_named(CodeId.C2, m, field, table)


def build_c3(m: int, field: FieldSpec, table: Mapping[tuple, Coef] | None = None) -> CodeSpec:
    _check_m(m)
    if field.q < 2 * m + 1:
        raise ConstructionError(f"C3 requires q >= 2m+1 = {2 * m + 1}, got q = {field.q}")
    return _build_named(CodeId.C3, m, field, table)


def build_c4(m: int, field: FieldSpec, table: Mapping[tuple, Coef] | None = None) -> CodeSpec:
    """k = 2m code, all type II.  q = 2 is rejected: t_{i+m} = gamma = 1 = t_i."""
    _check_m(m)
    if field.p != 2:
        raise ConstructionError("C4 requires a field of characteristic 2")
    if field.q < m + 1:
        raise ConstructionError(f"C4 requires q >= m+1 = {m + 1}, got q = {field.q}")
    if table is None and field.q == 2:
        raise ConstructionError("C4 over GF(2): t_i = 1 and t_{i+m} = gamma = 1 coincide")
    return _build_named(CodeId.C4, m, field, table)


def build_modified_zigzag(
    m: int, field: FieldSpec, diag_coeffs: Sequence[tuple[Sequence[FieldElement] | FieldElement, Sequence[FieldElement] | FieldElement]]
) -> CodeSpec:
    """Zigzag code minus its first node: m type II nodes with diagonal coefficients.

    ``diag_coeffs[i-1] = (Lambda_{i,0}, Lambda_{i,1})``; each is either a
    scalar or the alpha/2 diagonal entries.
    """
    _check_m(m)
    if len(diag_coeffs) != m:
        raise ConstructionError(f"modified Zigzag needs {m} coefficient pairs, got {len(diag_coeffs)}")
    table: CoefficientTable = {}
    for i, (l0, l1) in enumerate(diag_coeffs, start=1):
        table[("lam", i, 0)] = _as_coef(field, l0)
        table[("lam", i, 1)] = _as_coef(field, l1)
    return build_generic(params_from_table(CodeId.ZIGZAG, m, field, table))


def build_long_mds(m: int, field: FieldSpec, lam: Sequence[tuple[FieldElement, FieldElement]]) -> CodeSpec:
    """Long MDS code: 3m nodes with k-coefficients derived from the lambdas."""
    _check_m(m)
    if len(lam) != 3 * m:
        raise ConstructionError(f"long MDS code needs {3 * m} lambda pairs, got {len(lam)}")
    table: CoefficientTable = {}
    for i, (l0, l1) in enumerate(lam, start=1):
        table[("lam", i, 0)] = _as_coef(field, l0)
        table[("lam", i, 1)] = _as_coef(field, l1)
    return build_generic(params_from_table(CodeId.LONGMDS, m, field, table))


def _as_coef(field: FieldSpec, c) -> Coef:
    if isinstance(c, FieldElement):
        return c
    if isinstance(c, int):
        return FieldElement(field, c)
    return tuple(FieldElement(field, x) for x in c)


def minimal_field(code_id: CodeId, m: int) -> FieldSpec:
    """Smallest field over which the named builder's theorem coefficients apply."""
    if code_id is CodeId.C1:
        q = next(q for q in prime_powers(2 * m + 1) if q % 2)
    elif code_id is CodeId.C3:
        q = next(prime_powers(2 * m + 1))
    elif code_id is CodeId.C2:
        q = next(q for q in prime_powers(m + 1) if q & (q - 1) == 0)
    elif code_id is CodeId.C4:
        q = next(q for q in prime_powers(max(m + 1, 4)) if q & (q - 1) == 0)
    else:
        raise ValueError(f"{code_id} has no theorem-determined field size")
    return GF(q)


BUILDERS = {
    CodeId.C1: build_c1,
    CodeId.C2: build_c2,
    CodeId.C3: build_c3,
    CodeId.C4: build_c4,
}


def build_code(code_id: CodeId, m: int, field: FieldSpec | None = None, table: Mapping[tuple, Coef] | None = None) -> CodeSpec:
    """Build any named construction.

    C1..C4 default to their theorem coefficients; the modified Zigzag and long
    MDS codes need an explicit ``table`` and ``field``.
    """
    if code_id in BUILDERS:
        return BUILDERS[code_id](m, field or minimal_field(code_id, m), table)
    if code_id in (CodeId.ZIGZAG, CodeId.LONGMDS):
        if table is None or field is None:
            raise ConstructionError(f"{code_id.value} needs a field and a coefficient table")
        _check_m(m)
        return build_generic(params_from_table(code_id, m, field, table))
    raise ValueError(f"cannot build {code_id.value} by name")


# -- property counts -----------------------------------------------------------


@dataclass(frozen=True)
class Table1Row:
    code_id: CodeId
    m: int
    k: int
    k_access: int
    k_update: int
    k_both: int
    q: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.k, self.k_access, self.k_update, self.k_both)


def table1_report(codes: Iterable[CodeSpec]) -> list[Table1Row]:
    """Per code: k, k_A, k_U, k_{A&U} and q, counted from the structural flags."""
    rows = []
    for code in codes:
        acc, upd = code.access_optimal, code.update_optimal
        rows.append(
            Table1Row(
                code_id=code.code_id,
                m=code.m,
                k=code.k,
                k_access=sum(acc),
                k_update=sum(upd),
                k_both=sum(a and u for a, u in zip(acc, upd)),
                q=code.field.q,
            )
        )
    return rows


def format_table1(rows: Sequence[Table1Row]) -> str:
    lines = [f"{'code':<8} {'m':>2} {'k':>3} {'k_A':>4} {'k_U':>4} {'k_A&U':>6} {'q':>4}"]
    for r in rows:
        lines.append(f"{r.code_id.value:<8} {r.m:>2} {r.k:>3} {r.k_access:>4} {r.k_update:>4} {r.k_both:>6} {r.q:>4}")
    return "\n".join(lines)


# -- text serialisation --------------------------------------------------------

_HEADER = "msrcode-spec 1"


def _fmt_coef(c: Coef) -> str:
    if isinstance(c, tuple):
        return ",".join(str(x.value) for x in c) + ("," if len(c) == 1 else "")
    return str(c.value)


def _parse_coef(field: FieldSpec, s: str) -> Coef:
    if "," in s:
        return tuple(FieldElement(field, int(x)) for x in s.split(",") if x)
    return FieldElement(field, int(s))


def dumps(code: CodeSpec) -> str:
    """Serialise a code to the line-oriented text format (see README)."""
    f = code.field
    out = [
        _HEADER,
        f"code_id {code.code_id.value}",
        f"m {code.m}",
        f"field p={f.p} e={f.e} modulus={','.join(map(str, f.modulus))}",
        f"k {code.k}",
    ]
    for i in range(1, code.k + 1):
        form = code.repair_forms[i - 1]
        ptype = code.pair_types[i - 1]
        line = f"node {i} axis={code.axes[i - 1]} type={ptype.value if ptype else '-'} repair={form.kind.value}"
        if form.t is not None:
            line += f" t={_fmt_coef(form.t)}"
        out.append(line)
    if code.params is not None:
        for i, node in enumerate(code.params.nodes, start=1):
            line = f"coeff {i} lam0={_fmt_coef(node.lam0)} lam1={_fmt_coef(node.lam1)}"
            if node.k is not None:
                line += f" k={_fmt_coef(node.k)}"
            out.append(line)
    for name, mats in (("A", code.A), ("S", code.S)):
        for i, mat in enumerate(mats, start=1):
            out.append(f"{name} {i}")
            out.extend(" ".join(str(v) for v in row) for row in mat.to_lists())
    out.append("end")
    return "\n".join(out) + "\n"


def loads(text: str) -> CodeSpec:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != _HEADER:
        raise ValueError("not an msrcode spec file")
    it = iter(lines[1:])
    kv: dict[str, str] = {}
    for _ in range(4):
        key, _, val = next(it).partition(" ")
        kv[key] = val
    fparts = dict(p.split("=") for p in kv["field"].split())
    field = FieldSpec(int(fparts["p"]), int(fparts["e"]), tuple(int(x) for x in fparts["modulus"].split(",")))
    code_id, m, k = CodeId(kv["code_id"]), int(kv["m"]), int(kv["k"])
    alpha = 1 << m
    axes, forms, ptypes = [], [], []
    coeffs: dict[int, dict[str, str]] = {}
    A: list[Matrix] = []
    S: list[Matrix] = []
    for line in it:
        head, *rest = line.split()
        if head == "node":
            attrs = dict(r.split("=", 1) for r in rest[1:])
            axes.append(int(attrs["axis"]))
            ptypes.append(None if attrs["type"] == "-" else PairType(attrs["type"]))
            kind = RepairKind(attrs["repair"])
            forms.append(RepairForm(kind, _parse_coef(field, attrs["t"]) if "t" in attrs else None))
        elif head == "coeff":
            coeffs[int(rest[0])] = dict(r.split("=", 1) for r in rest[1:])
        elif head in ("A", "S"):
            nrows = alpha if head == "A" else alpha // 2
            rows = [[int(v) for v in next(it).split()] for _ in range(nrows)]
            (A if head == "A" else S).append(Matrix.from_rows(field, rows))
        elif head == "end":
            break
        else:
            raise ValueError(f"unexpected line in spec: {line!r}")
    if not (len(A) == len(S) == len(axes) == k):
        raise ValueError("spec file is truncated or inconsistent")
    params = None
    if coeffs:
        nodes = []
        for i in range(1, k + 1):
            c = coeffs[i]
            nodes.append(
                NodeParams(
                    ptypes[i - 1],  # type: ignore[arg-type]
                    _parse_coef(field, c["lam0"]),
                    _parse_coef(field, c["lam1"]),
                    _parse_coef(field, c["k"]) if "k" in c else None,
                    forms[i - 1],
                )
            )
        params = ConstructionParams(code_id, m, field, tuple(nodes))
        rebuilt = build_generic(params)
        if rebuilt.A != tuple(A) or rebuilt.S != tuple(S):
            raise ValueError("spec coefficients do not reproduce its matrices")
    return CodeSpec(code_id, m, field, tuple(A), tuple(S), tuple(axes), tuple(forms), tuple(ptypes), params)


def with_table(params: ConstructionParams, table: Mapping[tuple, Coef]) -> ConstructionParams:
    """Params of the same construction with coefficients taken from ``table``."""
    return params_from_table(params.code_id, params.m, params.field, table)


def dumps_table(table: Mapping[tuple, Coef]) -> str:
    """Coefficient table as ``lam i s v`` / ``k j v`` / ``t j v`` lines."""
    order = {"lam": 0, "k": 1, "t": 2}
    lines = []
    for key in sorted(table, key=lambda k: (order[k[0]], k[1:])):
        lines.append(" ".join(str(x) for x in key) + " " + _fmt_coef(table[key]))
    return "\n".join(lines) + "\n"


def loads_table(text: str, field: FieldSpec) -> CoefficientTable:
    table: CoefficientTable = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "lam" and len(parts) == 4:
            table[("lam", int(parts[1]), int(parts[2]))] = _parse_coef(field, parts[3])
        elif parts[0] in ("k", "t") and len(parts) == 3:
            table[(parts[0], int(parts[1]))] = _parse_coef(field, parts[2])
        else:
            raise ValueError(f"bad coefficient line: {raw!r}")
    return table
