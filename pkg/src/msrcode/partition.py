"""Binary partitions of the standard basis of F_q^(2^m).

Index ``j`` of a basis row ``e_j`` is read as an m-bit word; axis 1 is the
most significant bit.  ``V(i, t)`` collects the indices whose bit on axis
``i`` equals ``t``.  Pairing the s-th entries of ``V(i, 0)`` and ``V(i, 1)``
(both sorted) therefore pairs ``j`` with ``j`` with bit ``i`` flipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import FieldElement, FieldSpec
from .linalg import Matrix

__all__ = ["Partition", "standard_partition", "axis_of", "quad_split", "selector_matrix", "MAX_M"]

MAX_M = 6


@dataclass(frozen=True)
class Partition:
    m: int
    sets: dict[tuple[int, int], tuple[int, ...]]

    @property
    def alpha(self) -> int:
        return 1 << self.m

    def V(self, axis: int, bit: int) -> tuple[int, ...]:
        return self.sets[(axis_of(axis, self.m), bit)]

    def bit(self, index: int, axis: int) -> int:
        return (index >> (self.m - axis_of(axis, self.m))) & 1

    def flip(self, index: int, axis: int) -> int:
        return index ^ (1 << (self.m - axis_of(axis, self.m)))

    def __hash__(self) -> int:
        return hash(self.m)


def standard_partition(m: int) -> Partition:
    if not 1 <= m <= MAX_M:
        raise ValueError(f"m must be in [1, {MAX_M}], got {m}")
    alpha = 1 << m
    sets = {}
    for axis in range(1, m + 1):
        shift = m - axis
        for bit in (0, 1):
            sets[(axis, bit)] = tuple(j for j in range(alpha) if (j >> shift) & 1 == bit)
    return Partition(m, sets)


def axis_of(i: int, m: int) -> int:
    """Partition axis used by node ``i`` (1-based): V_{i+sm,t} = V_{i,t}."""
    if i < 1:
        raise ValueError(f"node index must be >= 1, got {i}")
    return (i - 1) % m + 1


def quad_split(part: Partition, axis_a: int, axis_b: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """The four intersections V_{a,s} ∩ V_{b,t}, keyed by (s, t)."""
    a, b = axis_of(axis_a, part.m), axis_of(axis_b, part.m)
    if a == b:
        raise ValueError(f"axes {axis_a} and {axis_b} coincide modulo m={part.m}")
    out = {}
    for s in (0, 1):
        for t in (0, 1):
            vb = set(part.V(b, t))
            out[(s, t)] = tuple(j for j in part.V(a, s) if j in vb)
    return out


def selector_matrix(
    field: FieldSpec,
    alpha: int,
    indices: Sequence[int],
    coefficients: "FieldElement | Sequence[FieldElement] | None" = None,
) -> Matrix:
    """Rows c_s * e_{indices[s]}; a scalar coefficient is applied to every row."""
    if any(not 0 <= j < alpha for j in indices):
        raise ValueError(f"indices must lie in [0, {alpha})")
    if coefficients is None:
        coefs = [1] * len(indices)
    elif isinstance(coefficients, FieldElement):
        coefs = [coefficients.value] * len(indices)
    else:
        coefs = [FieldElement(field, c).value for c in coefficients]
        if len(coefs) != len(indices):
            raise ValueError("one coefficient per index required")
    data = np.zeros((len(indices), alpha), dtype=np.int64)
    for s, (j, c) in enumerate(zip(indices, coefs)):
        data[s, j] = c
    return Matrix(field, data)
