"""Verification of the repair/MDS conditions and coefficient search.

Two independent paths are provided.  Rank checks work on the realised
matrices (``check_mds``, ``check_repair``); theorem predicates work on the
coefficient tables alone (``check_theorem_conditions``).  The two should
always agree on the constructions they cover.

R1: every A_i and A_i - A_j invertible.
R2: rank [S_i; S_i A_j] = alpha/2 for j != i.
R3: rank [S_i; S_i A_i] = alpha.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .codes import (
    CodeId,
    CodeSpec,
    ConstructionError,
    ConstructionParams,
    NodeParams,
    RepairKind,
    build_generic,
    free_keys,
    node_keys,
    node_matrices,
    table_from_params,
    theorem_table,
    _node_from_table,
)
from .gf import FieldElement, FieldSpec
from .linalg import Matrix, mat_mul, rank
from .partition import axis_of, quad_split, selector_matrix

__all__ = [
    "CheckReport",
    "TheoremReport",
    "LemmaReport",
    "ReconstructionReport",
    "SearchResult",
    "check_mds",
    "check_repair",
    "check_access",
    "check_update",
    "access_report",
    "update_report",
    "theorem_conditions",
    "check_theorem_conditions",
    "perturbed_table",
    "block_rank_oracle",
    "check_block_ranks",
    "verify_reconstruction_exhaustive",
    "search_coefficients",
    "search_minimal_field",
]


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    witnesses: tuple[tuple, ...] = ()
    detail: str = ""

    def line(self) -> str:
        """Tab-separated ``name PASS|FAIL witnesses`` line."""
        wit = ";".join(",".join(str(x) for x in w) for w in self.witnesses) or "-"
        out = f"{self.name}\t{'PASS' if self.passed else 'FAIL'}\t{wit}"
        return out + (f"\t{self.detail}" if self.detail else "")

    def __bool__(self) -> bool:
        return self.passed


def _full_rank(field: FieldSpec, data: np.ndarray, want: int) -> bool:
    return rank(Matrix(field, data)) == want


def _r1_pair(code: CodeSpec, i: int, j: int) -> bool:
    return rank(code.A[i - 1] - code.A[j - 1]) == code.alpha


def _r2_pair(field: FieldSpec, S: Matrix, A: Matrix) -> bool:
    return _full_rank(field, np.vstack([S.data, mat_mul(S, A).data]), S.rows)


def _r3(field: FieldSpec, S: Matrix, A: Matrix) -> bool:
    return _full_rank(field, np.vstack([S.data, mat_mul(S, A).data]), 2 * S.rows)


def check_mds(code: CodeSpec) -> CheckReport:
    bad: list[tuple] = []
    for i in range(1, code.k + 1):
        if rank(code.A[i - 1]) != code.alpha:
            bad.append(("A", i))
    for i, j in itertools.combinations(range(1, code.k + 1), 2):
        if not _r1_pair(code, i, j):
            bad.append((i, j))
    return CheckReport("mds", not bad, tuple(bad))


def check_repair(code: CodeSpec) -> CheckReport:
    bad: list[tuple] = []
    f = code.field
    for i in range(1, code.k + 1):
        S = code.S[i - 1]
        if rank(S) != code.beta:
            bad.append(("S", i))
            continue
        if not _r3(f, S, code.A[i - 1]):
            bad.append(("R3", i))
        for j in range(1, code.k + 1):
            if j != i and not _r2_pair(f, S, code.A[j - 1]):
                bad.append(("R2", i, j))
    return CheckReport("repair", not bad, tuple(bad))


def check_access(code: CodeSpec) -> tuple[bool, ...]:
    """Per node: every row of S_i is a standard basis row."""
    return code.access_optimal


def check_update(code: CodeSpec) -> tuple[bool, ...]:
    """Per node: every column of A_i has exactly one nonzero."""
    return code.update_optimal


def access_report(code: CodeSpec) -> CheckReport:
    flags = check_access(code)
    return CheckReport("access", True, tuple((i,) for i, f in enumerate(flags, 1) if f), f"k_A={sum(flags)}")


def update_report(code: CodeSpec) -> CheckReport:
    flags = check_update(code)
    return CheckReport("update", True, tuple((i,) for i, f in enumerate(flags, 1) if f), f"k_U={sum(flags)}")


# -- theorem predicates --------------------------------------------------------


def _distinct_all(a: Sequence[FieldElement], b: Sequence[FieldElement]) -> bool:
    return all(x != y for x in a for y in b)


def theorem_conditions(code_id: CodeId, m: int, field: FieldSpec, table: Mapping[tuple, FieldElement]) -> tuple[list[str], list[str]]:
    """Violated MDS items and violated repair items for C1..C4 coefficients.

    All coefficients are assumed nonzero.  Each returned string names the
    item and the node indices involved.
    """
    L = lambda i, s: table[("lam", i, s)]  # noqa: E731
    K = lambda j: table[("k", j)]  # noqa: E731
    T = lambda j: table[("t", j)]  # noqa: E731
    prod = lambda i: L(i, 0) * L(i, 1)  # noqa: E731
    lams = lambda i: (L(i, 0), L(i, 1))  # noqa: E731
    mds: list[str] = []
    rep: list[str] = []

    if code_id is CodeId.C4:
        for i, j in itertools.combinations(range(1, 2 * m + 1), 2):
            if j != i + m and prod(i) == prod(j):
                mds.append(f"mds(i) {i},{j}")
        for i in range(1, m + 1):
            for s in (0, 1):
                if L(i, s) == L(i + m, s):
                    mds.append(f"mds(ii) {i},{i + m}")
                    break
        for i in range(1, m + 1):
            if L(i, 1) != T(i + m) ** 2 * L(i, 0):
                rep.append(f"repair(i) {i},{i + m}")
            if L(i + m, 1) != T(i) ** 2 * L(i + m, 0):
                rep.append(f"repair(i) {i + m},{i}")
        for i in range(1, 2 * m + 1):
            if L(i, 1) == T(i) ** 2 * L(i, 0):
                rep.append(f"repair(ii) {i}")
        return mds, rep

    if code_id not in (CodeId.C1, CodeId.C2, CodeId.C3):
        raise ValueError(f"no theorem conditions for {code_id}")

    k = 3 * m if code_id is CodeId.C1 else 2 * m
    # (i) the type II nodes
    for i, j in itertools.combinations(range(1, m + 1), 2):
        if prod(i) == prod(j):
            mds.append(f"mds(i) {i},{j}")
    # (ii) among the remaining nodes
    for i, j in itertools.combinations(range(m + 1, k + 1), 2):
        if code_id is CodeId.C1 and j == i + m:
            ok = L(i, 0) != L(j, 0) and L(i, 1) != L(j, 1)
        else:
            ok = _distinct_all(lams(i), lams(j))
        if not ok:
            mds.append(f"mds(ii) {i},{j}")
    # (iii) type II against the rest
    for i in range(1, m + 1):
        for j in range(m + 1, k + 1):
            if axis_of(i, m) == axis_of(j, m):
                if code_id is CodeId.C3:
                    ok = prod(i) != prod(j)
                else:
                    ok = L(i, 1) * (L(i, 0) - K(j - m)) != prod(j)
            else:
                ok = prod(i) != L(j, 0) ** 2 and prod(i) != L(j, 1) ** 2
            if not ok:
                mds.append(f"mds(iii) {i},{j}")

    for i in range(1, m + 1):
        if L(i, 1) != T(i) ** 2 * L(i, 0):
            rep.append(f"repair(i) {i}")
    if code_id is CodeId.C1:
        for i in range(1, m + 1):
            if T(i) != -T(i + m):
                rep.append(f"repair(i) t{i},t{i + m}")
        for i in range(m + 1, 2 * m + 1):
            if L(i, 1) != L(i, 0) + T(i) * K(i - m):
                rep.append(f"repair(ii) {i}")
            if L(i + m, 1) != L(i + m, 0) + T(i - m) * K(i):
                rep.append(f"repair(ii) {i + m}")
        if field.p == 2:
            rep.append("repair(iii) characteristic 2")
    elif code_id is CodeId.C2:
        for i in range(m + 1, 2 * m + 1):
            if L(i, 1) == L(i, 0) + T(i - m) * K(i - m):
                rep.append(f"repair(ii) {i}")
    else:
        for i in range(m + 1, 2 * m + 1):
            if L(i, 0) == L(i, 1):
                rep.append(f"repair(ii) {i}")
    return mds, rep


@dataclass(frozen=True)
class TheoremReport:
    code_id: CodeId
    mds_violations: tuple[str, ...]
    repair_violations: tuple[str, ...]
    matrix_mds: bool
    matrix_repair: bool

    @property
    def theorem_mds(self) -> bool:
        return not self.mds_violations

    @property
    def theorem_repair(self) -> bool:
        return not self.repair_violations

    @property
    def verdict(self) -> bool:
        return self.theorem_mds and self.theorem_repair

    @property
    def matrix_verdict(self) -> bool:
        return self.matrix_mds and self.matrix_repair

    @property
    def agrees(self) -> bool:
        """Theorem and rank verdicts match, for MDS and repair separately."""
        return self.theorem_mds == self.matrix_mds and self.theorem_repair == self.matrix_repair

    def line(self) -> str:
        wit = ";".join(self.mds_violations + self.repair_violations) or "-"
        status = "PASS" if self.verdict else "FAIL"
        return f"theorem[{self.code_id.value}]\t{status}\t{wit}\tagrees={self.agrees}"


def check_theorem_conditions(code_id: CodeId, params: ConstructionParams) -> TheoremReport:
    if params.code_id is not code_id:
        raise ValueError(f"params describe {params.code_id}, not {code_id}")
    table = table_from_params(params)
    mds, rep = theorem_conditions(code_id, params.m, params.field, table)
    code = build_generic(params)
    return TheoremReport(code_id, tuple(mds), tuple(rep), check_mds(code).passed, check_repair(code).passed)


def perturbed_table(
    code_id: CodeId, m: int, field: FieldSpec, rng: np.random.Generator, max_changes: int = 3
) -> dict:
    """Theorem coefficients with 1..max_changes entries redrawn uniformly from F_q^*."""
    table = dict(theorem_table(code_id, m, field))
    keys = free_keys(code_id, m)
    nonzero = field.nonzero()
    n = int(rng.integers(1, max_changes + 1))
    for idx in rng.choice(len(keys), size=min(n, len(keys)), replace=False):
        table[keys[int(idx)]] = nonzero[int(rng.integers(len(nonzero)))]
    return table


# -- block rank oracle ------------------------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    i: int
    j: int
    rank_diff: int
    rank_diff_split: int
    rank_diff_quad: int
    rank_repair: int
    rank_repair_quad: int

    @property
    def holds(self) -> bool:
        return self.rank_diff == self.rank_diff_split == self.rank_diff_quad and self.rank_repair == self.rank_repair_quad

    def line(self) -> str:
        return (
            f"block_rank\t{'PASS' if self.holds else 'FAIL'}\t{self.i},{self.j}\t"
            f"diff={self.rank_diff}/{self.rank_diff_split}/{self.rank_diff_quad} "
            f"repair={self.rank_repair}/{self.rank_repair_quad}"
        )


def _repair_coeffs(code: CodeSpec, i: int) -> tuple[FieldElement, FieldElement | Sequence[FieldElement]]:
    form = code.repair_forms[i - 1]
    f = code.field
    if form.kind is RepairKind.V0:
        return f.one, f.zero
    if form.kind is RepairKind.V1:
        return f.zero, f.one
    return f.one, form.t  # type: ignore[return-value]


def block_rank_oracle(code: CodeSpec, i: int, j: int) -> LemmaReport:
    """Both sides of the quad-split rank identities for nodes i and j.

    (i)  rank(A_i - A_j) = rank([V_{i,0}; V_{i,1}](A_i - A_j))
         = rank([V_{i,j,0,0}; V_{i,j,0,1}; V_{i,j,1,0}; V_{i,j,1,1}](A_i - A_j))
    (ii) rank([S_i; S_i A_j]) equals the rank of the same rows rebuilt from
         V_{i,j,0,t} + u V_{i,j,1,t}, with S_i = a V_{i,0} + u V_{i,1}.
    """
    m, f, alpha = code.m, code.field, code.alpha
    ai, aj = axis_of(i, m), axis_of(j, m)
    if ai == aj:
        raise ValueError(f"nodes {i} and {j} share axis {ai}")
    part = code.partition
    D = code.A[i - 1] - code.A[j - 1]
    split = Matrix(f, np.vstack([selector_matrix(f, alpha, part.V(ai, 0)).data, selector_matrix(f, alpha, part.V(ai, 1)).data]))
    quad = quad_split(part, ai, aj)
    qsel = Matrix(f, np.vstack([selector_matrix(f, alpha, quad[key]).data for key in ((0, 0), (0, 1), (1, 0), (1, 1))]))

    a, u = _repair_coeffs(code, i)
    S = code.S[i - 1]
    Aj = code.A[j - 1]
    # u may be per-pair; the pair index of x in V_{i,0} is its rank there
    v0 = part.V(ai, 0)
    pos = {x: s for s, x in enumerate(v0)}

    def half(t: int) -> Matrix:
        rows = quad[(0, t)]
        data = np.zeros((len(rows), alpha), dtype=np.int64)
        for r, x in enumerate(rows):
            y = part.flip(x, ai)
            ux = u[pos[x]] if isinstance(u, tuple) else u
            data[r, x] = a.value
            data[r, y] = ux.value
        return Matrix(f, data)

    h0, h1 = half(0), half(1)
    quad_repair = np.vstack([h0.data, h1.data, mat_mul(h0, Aj).data, mat_mul(h1, Aj).data])
    return LemmaReport(
        i,
        j,
        rank(D),
        rank(mat_mul(split, D)),
        rank(mat_mul(qsel, D)),
        rank(Matrix(f, np.vstack([S.data, mat_mul(S, Aj).data]))),
        rank(Matrix(f, quad_repair)),
    )


def check_block_ranks(code: CodeSpec) -> CheckReport:
    bad = []
    count = 0
    for i in range(1, code.k + 1):
        for j in range(1, code.k + 1):
            if i != j and axis_of(i, code.m) != axis_of(j, code.m):
                count += 1
                if not block_rank_oracle(code, i, j).holds:
                    bad.append((i, j))
    return CheckReport("block_rank", not bad, tuple(bad), f"pairs={count}")


# -- reconstruction ---------------------------------------------------------------


@dataclass(frozen=True)
class ReconstructionReport:
    passed: bool
    subsets: int
    trials: int
    seed: int
    failures: tuple[tuple[int, ...], ...] = ()

    def line(self) -> str:
        wit = ";".join(",".join(map(str, s)) for s in self.failures) or "-"
        return f"reconstruction\t{'PASS' if self.passed else 'FAIL'}\t{wit}\tsubsets={self.subsets} trials={self.trials} seed={self.seed}"


def verify_reconstruction_exhaustive(code: CodeSpec, trials: int = 50, seed: int = 0, max_len: int = 256) -> ReconstructionReport:
    """Encode ``trials`` random files and decode each from every k-subset of shards."""
    from .codec import encode, reconstruct

    rng = np.random.default_rng(seed)
    files = [rng.integers(0, 256, size=int(rng.integers(0, max_len + 1)), dtype=np.uint8).tobytes() for _ in range(trials)]
    encoded = [encode(data, code) for data in files]
    subsets = list(itertools.combinations(range(1, code.n + 1), code.k))
    failures = []
    for subset in subsets:
        for data, shards in zip(files, encoded):
            try:
                ok = reconstruct([shards[i - 1] for i in subset], code) == data
            except Exception:
                ok = False
            if not ok:
                failures.append(subset)
                break
    return ReconstructionReport(not failures, len(subsets), trials, seed, tuple(failures))


# -- coefficient search ----------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    code_id: CodeId
    m: int
    field: FieldSpec
    found: tuple[ConstructionParams, ...]
    complete: bool
    explored: int

    @property
    def exhausted_empty(self) -> bool:
        """No assignment exists in the enumerated family (search ran to the end)."""
        return self.complete and not self.found


def _key_values(field: FieldSpec, key: tuple, alpha: int, code_id: CodeId) -> list:
    nonzero = field.nonzero()
    if code_id is CodeId.ZIGZAG and key[0] == "lam":
        return [tuple(c) for c in itertools.product(nonzero, repeat=alpha // 2)]
    return nonzero


@dataclass
class _Candidate:
    node: NodeParams
    A: Matrix
    S: Matrix


def _candidates(code_id: CodeId, m: int, field: FieldSpec, i: int) -> list[_Candidate]:
    alpha = 1 << m
    keys = node_keys(code_id, m, i)
    pools = [_key_values(field, key, alpha, code_id) for key in keys]
    out = []
    for combo in itertools.product(*pools):
        table = dict(zip(keys, combo))
        node = _node_from_table(code_id, m, field, table, i)
        try:
            A, S = node_matrices(node, i, m, field)
        except ConstructionError:
            continue
        if rank(A) != alpha or not _r3(field, S, A):
            continue
        out.append(_Candidate(node, A, S))
    return out


def search_coefficients(
    code_id: CodeId,
    m: int,
    field: FieldSpec,
    budget: int = 1_000_000,
    all_solutions: bool = False,
) -> SearchResult:
    """Backtracking over the free coefficients of one construction's layout.

    Pair types and repair-form kinds stay those of ``code_id``; every free
    coefficient ranges over F_q^* (diagonal entries independently for the
    modified Zigzag code).  Pruning uses the pairwise conditions R1 and R2
    between the node being placed and those already placed; R3 and
    invertibility of A_i filter each node's candidates up front.  ``budget``
    caps the number of pair checks; ``complete`` reports whether the space was
    exhausted.
    """
    k = {CodeId.C1: 3 * m, CodeId.LONGMDS: 3 * m, CodeId.C2: 2 * m, CodeId.C3: 2 * m, CodeId.C4: 2 * m, CodeId.ZIGZAG: m}[code_id]
    cands = [_candidates(code_id, m, field, i) for i in range(1, k + 1)]
    alpha = 1 << m
    cache: dict[tuple[int, int, int, int], bool] = {}
    explored = 0
    found: list[ConstructionParams] = []
    budget_hit = False

    def compatible(i: int, ci: int, j: int, cj: int) -> bool:
        nonlocal explored
        key = (i, ci, j, cj)
        if key not in cache:
            explored += 1
            a, b = cands[i][ci], cands[j][cj]
            ok = (
                rank(a.A - b.A) == alpha
                and _r2_pair(field, a.S, b.A)
                and _r2_pair(field, b.S, a.A)
            )
            cache[key] = ok
        return cache[key]

    chosen: list[int] = []

    def extend(i: int) -> bool:
        nonlocal budget_hit
        if i == k:
            nodes = tuple(cands[t][c].node for t, c in enumerate(chosen))
            found.append(ConstructionParams(code_id, m, field, nodes))
            return not all_solutions
        for ci in range(len(cands[i])):
            if explored >= budget:
                budget_hit = True
                return True
            if all(compatible(j, cj, i, ci) for j, cj in enumerate(chosen)):
                chosen.append(ci)
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    extend(0)
    return SearchResult(code_id, m, field, tuple(found), not budget_hit, explored)


def search_minimal_field(code_id: CodeId, m: int, budget: int = 1_000_000) -> SearchResult:
    """First field (by order) where ``search_coefficients`` finds an assignment."""
    from .gf import GF, prime_powers

    for q in prime_powers(2):
        result = search_coefficients(code_id, m, GF(q), budget)
        if result.found:
            return result
    raise ValueError(f"no field up to q = 256 admits {code_id.value} with m = {m}")
