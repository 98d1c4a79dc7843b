"""Encoding, reconstruction and single-node repair on byte streams.

A file becomes a stream of field symbols, cut into stripes of ``k * alpha``
symbols.  In stripe ``s`` node ``i <= k`` stores symbols
``[s*k*alpha + (i-1)*alpha, s*k*alpha + i*alpha)``; node ``k+1`` stores their
sum and node ``k+2`` stores ``sum A_i f_i``.  Every shard keeps ``alpha``
symbols per stripe, stripe-major.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import CodeId, CodeSpec
from .gf import FieldSpec
from .linalg import ColumnVector, Matrix, inverse

__all__ = [
    "Shard",
    "HelperStats",
    "RepairTranscript",
    "ShardFormatError",
    "bytes_to_symbols",
    "symbols_to_bytes",
    "digits_per_byte",
    "encode",
    "reconstruct",
    "repair_systematic",
    "repair_parity",
    "update_cost",
]

MAGIC = b"MSRS"
VERSION = 1
_HEAD = struct.Struct(">4sBBBBB")
_TAIL = struct.Struct(">HQI")


class ShardFormatError(ValueError):
    pass


# -- byte <-> symbol mapping ---------------------------------------------------


def digits_per_byte(q: int) -> int:
    """Base-q digits needed for one byte when q is odd."""
    d = 1
    while q**d < 256:
        d += 1
    return d


def bytes_to_symbols(data: bytes, field: FieldSpec) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    if field.p == 2:
        e = field.e
        bits = np.unpackbits(raw, bitorder="little")
        pad = (-bits.size) % e
        if pad:
            bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
        return (bits.reshape(-1, e).astype(np.int64) << np.arange(e)).sum(axis=1)
    q = field.q
    d = digits_per_byte(q)
    vals = raw.astype(np.int64)[:, None] // (q ** np.arange(d)) % q
    return vals.reshape(-1)


def symbols_to_bytes(symbols: np.ndarray, field: FieldSpec, length: int) -> bytes:
    sym = np.asarray(symbols, dtype=np.int64)
    if field.p == 2:
        e = field.e
        need = math.ceil(8 * length / e)
        bits = ((sym[:need, None] >> np.arange(e)) & 1).astype(np.uint8).reshape(-1)[: 8 * length]
        return np.packbits(bits, bitorder="little").tobytes()
    q = field.q
    d = digits_per_byte(q)
    digits = sym[: d * length].reshape(length, d)
    vals = (digits * (q ** np.arange(d))).sum(axis=1)
    if np.any(vals > 255):
        raise ValueError("symbol stream does not decode to bytes")
    return vals.astype(np.uint8).tobytes()


def symbol_count(length: int, field: FieldSpec) -> int:
    if field.p == 2:
        return math.ceil(8 * length / field.e)
    return digits_per_byte(field.q) * length


# -- shards ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Shard:
    node_index: int
    code_id: CodeId
    m: int
    field: FieldSpec
    original_length: int
    payload: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.payload, dtype=np.int64).reshape(-1)
        if arr.size % (1 << self.m):
            raise ValueError("payload length must be a multiple of alpha")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise ValueError("payload symbols out of range")
        arr.setflags(write=False)
        object.__setattr__(self, "payload", arr)

    @property
    def alpha(self) -> int:
        return 1 << self.m

    @property
    def stripe_count(self) -> int:
        return self.payload.size // self.alpha

    def stripes(self) -> np.ndarray:
        """Payload as a (stripes, alpha) array."""
        return self.payload.reshape(-1, self.alpha)

    def stripe(self, s: int) -> ColumnVector:
        return ColumnVector(self.field, self.stripes()[s])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Shard):
            return NotImplemented
        return (
            self.node_index == other.node_index
            and self.code_id == other.code_id
            and self.m == other.m
            and self.field == other.field
            and self.original_length == other.original_length
            and np.array_equal(self.payload, other.payload)
        )

    def __hash__(self) -> int:
        return hash((self.node_index, self.code_id, self.m, self.field, self.original_length, self.payload.tobytes()))

    def to_bytes(self) -> bytes:
        f = self.field
        head = _HEAD.pack(MAGIC, VERSION, self.code_id.byte, self.m, f.p, f.e)
        tail = _TAIL.pack(self.node_index, self.original_length, self.stripe_count)
        return head + bytes(f.modulus) + tail + self.payload.astype(np.uint8).tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "Shard":
        if len(blob) < _HEAD.size:
            raise ShardFormatError("shard too short")
        magic, version, cid, m, p, e = _HEAD.unpack_from(blob)
        if magic != MAGIC:
            raise ShardFormatError("bad magic")
        if version != VERSION:
            raise ShardFormatError(f"unsupported shard version {version}")
        off = _HEAD.size
        modulus = tuple(blob[off : off + e + 1])
        off += e + 1
        if len(blob) < off + _TAIL.size:
            raise ShardFormatError("shard header truncated")
        node, length, stripes = _TAIL.unpack_from(blob, off)
        off += _TAIL.size
        body = np.frombuffer(blob, dtype=np.uint8, offset=off)
        alpha = 1 << m
        if body.size != stripes * alpha:
            raise ShardFormatError(f"payload has {body.size} symbols, header says {stripes * alpha}")
        try:
            field = FieldSpec(p, e, modulus)
            code_id = CodeId.from_byte(cid)
        except ValueError as exc:
            raise ShardFormatError(str(exc)) from exc
        return cls(node, code_id, m, field, length, body)

    def write(self, path: "str | Path") -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path: "str | Path") -> "Shard":
        return cls.from_bytes(Path(path).read_bytes())


def _apply(field: FieldSpec, M: np.ndarray, X: np.ndarray, chunk_elems: int = 1 << 22) -> np.ndarray:
    """M @ X over the field, chunked along the columns of X."""
    t = field.tables
    rows, inner = M.shape
    cols = X.shape[1]
    out = np.zeros((rows, cols), dtype=np.int64)
    step = max(1, chunk_elems // max(1, rows * inner))
    for c0 in range(0, cols, step):
        xs = X[:, c0 : c0 + step]
        out[:, c0 : c0 + step] = t.sum(t.mul[M[:, :, None], xs[None, :, :]], axis=1)
    return out


def _check_code(shard: Shard, code: CodeSpec) -> None:
    if shard.m != code.m or shard.field != code.field or shard.code_id != code.code_id:
        raise ValueError(f"shard {shard.node_index} does not belong to this code")
    if not 1 <= shard.node_index <= code.n:
        raise ValueError(f"node index {shard.node_index} out of range 1..{code.n}")


# -- encode --------------------------------------------------------------------------


def encode(data: bytes, code: CodeSpec) -> list[Shard]:
    """Split ``data`` into the n shards of ``code`` (systematic first)."""
    f, k, alpha = code.field, code.k, code.alpha
    sym = bytes_to_symbols(data, f)
    width = k * alpha
    stripes = math.ceil(sym.size / width)
    padded = np.zeros(stripes * width, dtype=np.int64)
    padded[: sym.size] = sym
    F = padded.reshape(stripes, k, alpha)
    X = F.transpose(1, 2, 0).reshape(width, stripes)
    p1 = f.tables.sum(F, axis=1)
    bigA = np.hstack([a.data for a in code.A])
    p2 = _apply(f, bigA, X).T
    blocks = [F[:, i, :] for i in range(k)] + [p1, p2]
    return [Shard(i, code.code_id, code.m, f, len(data), b.reshape(-1)) for i, b in enumerate(blocks, start=1)]


# -- reconstruct ------------------------------------------------------------------


def _decoder(code: CodeSpec, missing: tuple[int, ...], parities: tuple[int, ...]) -> Matrix:
    key = ("rec", missing, parities)
    if key not in code._maps:
        f, alpha = code.field, code.alpha
        rows = []
        for p in parities:
            if p == code.k + 1:
                rows.append(np.hstack([np.eye(alpha, dtype=np.int64)] * len(missing)))
            else:
                rows.append(np.hstack([code.A[i - 1].data for i in missing]))
        code._maps[key] = inverse(Matrix(f, np.vstack(rows)))
    return code._maps[key]


def reconstruct(shards: Sequence[Shard], code: CodeSpec) -> bytes:
    """Original bytes from any k distinct shards of one file."""
    by_node: dict[int, Shard] = {}
    for s in shards:
        _check_code(s, code)
        by_node.setdefault(s.node_index, s)
    if len(by_node) < code.k:
        raise ValueError(f"need {code.k} distinct shards, got {len(by_node)}")
    first = next(iter(by_node.values()))
    length, stripes = first.original_length, first.stripe_count
    if any(s.original_length != length or s.stripe_count != stripes for s in by_node.values()):
        raise ValueError("shards come from different files")
    f, k, alpha = code.field, code.k, code.alpha
    t = f.tables
    known = [i for i in range(1, k + 1) if i in by_node]
    missing = tuple(i for i in range(1, k + 1) if i not in by_node)
    F = np.zeros((stripes, k, alpha), dtype=np.int64)
    for i in known:
        F[:, i - 1, :] = by_node[i].stripes()
    if missing:
        avail = [p for p in (k + 1, k + 2) if p in by_node]
        parities = tuple(avail[: len(missing)])
        rhs = []
        Xk = F[:, [i - 1 for i in known], :]
        for p in parities:
            P = by_node[p].stripes()
            if p == k + 1:
                known_part = t.sum(Xk, axis=1)
            else:
                bigA = np.hstack([code.A[i - 1].data for i in known]) if known else np.zeros((alpha, 0), dtype=np.int64)
                known_part = _apply(f, bigA, Xk.transpose(1, 2, 0).reshape(len(known) * alpha, stripes)).T
            rhs.append(t.sub[P, known_part].T)
        dec = _decoder(code, missing, parities)
        sol = _apply(f, dec.data, np.vstack(rhs))
        for n, i in enumerate(missing):
            F[:, i - 1, :] = sol[n * alpha : (n + 1) * alpha].T
    sym = F.reshape(-1)
    return symbols_to_bytes(sym, f, length)


# -- repair ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HelperStats:
    """Per-stripe cost at one helper node."""

    node: int
    symbols_downloaded: int
    symbols_read: int
    field_ops: int


@dataclass(frozen=True)
class RepairTranscript:
    failed: int
    helpers: tuple[HelperStats, ...]
    stripes: int
    recovered: Shard

    @property
    def download_per_stripe(self) -> int:
        return sum(h.symbols_downloaded for h in self.helpers)

    @property
    def total_download(self) -> int:
        return self.download_per_stripe * self.stripes

    @property
    def reads_per_stripe(self) -> int:
        return sum(h.symbols_read for h in self.helpers)

    @property
    def helper_ops_per_stripe(self) -> int:
        return sum(h.field_ops for h in self.helpers)

    def to_dict(self) -> dict:
        return {
            "failed": self.failed,
            "stripes": self.stripes,
            "download_per_stripe": self.download_per_stripe,
            "total_download": self.total_download,
            "reads_per_stripe": self.reads_per_stripe,
            "helper_field_ops_per_stripe": self.helper_ops_per_stripe,
            "helpers": [
                {"node": h.node, "downloaded": h.symbols_downloaded, "read": h.symbols_read, "field_ops": h.field_ops}
                for h in self.helpers
            ],
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _projection_ops(S: Matrix) -> int:
    """Multiplications by non-unit coefficients plus additions to form S f."""
    d = S.data
    nnz = np.count_nonzero(d, axis=1)
    mults = int(np.count_nonzero((d != 0) & (d != 1)))
    return mults + int(np.maximum(nnz - 1, 0).sum())


def repair_systematic(i: int, helpers: Sequence[Shard], code: CodeSpec) -> RepairTranscript:
    """Rebuild systematic node ``i`` from beta symbols per stripe of each other node."""
    k, alpha, f = code.k, code.alpha, code.field
    if not 1 <= i <= k:
        raise ValueError(f"node {i} is not systematic (1..{k})")
    by_node = {}
    for s in helpers:
        _check_code(s, code)
        by_node[s.node_index] = s
    need = [j for j in range(1, code.n + 1) if j != i]
    lacking = [j for j in need if j not in by_node]
    if lacking:
        raise ValueError(f"missing helper shards {lacking}")
    ref = by_node[need[0]]
    stripes, length = ref.stripe_count, ref.original_length
    t = f.tables
    S = code.S[i - 1]
    # what each helper sends: S_i f_j, shape (beta, stripes)
    w = {j: _apply(f, S.data, by_node[j].stripes().T) for j in need}
    r1 = w[k + 1]
    r2 = w[k + 2]
    for j in range(1, k + 1):
        if j == i:
            continue
        r1 = t.sub[r1, w[j]]
        r2 = t.sub[r2, _apply(f, code.interference_map(i, j).data, w[j])]
    fi = _apply(f, code.repair_decoder(i).data, np.vstack([r1, r2]))
    recovered = Shard(i, code.code_id, code.m, f, length, fi.T.reshape(-1))
    beta = code.beta
    read = beta if code.access_optimal[i - 1] else alpha
    ops = _projection_ops(S)
    stats = tuple(HelperStats(j, beta, read, ops) for j in need)
    return RepairTranscript(i, stats, stripes, recovered)


def repair_parity(p: int, systematic: Sequence[Shard], code: CodeSpec) -> RepairTranscript:
    """Recompute parity node ``p`` by downloading every systematic shard in full."""
    k, alpha, f = code.k, code.alpha, code.field
    if p not in (k + 1, k + 2):
        raise ValueError(f"node {p} is not a parity node ({k + 1} or {k + 2})")
    by_node = {}
    for s in systematic:
        _check_code(s, code)
        by_node[s.node_index] = s
    lacking = [j for j in range(1, k + 1) if j not in by_node]
    if lacking:
        raise ValueError(f"missing systematic shards {lacking}")
    ref = by_node[1]
    stripes = ref.stripe_count
    F = np.stack([by_node[j].stripes() for j in range(1, k + 1)], axis=1)
    if p == k + 1:
        block = f.tables.sum(F, axis=1)
    else:
        bigA = np.hstack([a.data for a in code.A])
        block = _apply(f, bigA, F.transpose(1, 2, 0).reshape(k * alpha, stripes)).T
    shard = Shard(p, code.code_id, code.m, f, ref.original_length, block.reshape(-1))
    stats = tuple(HelperStats(j, alpha, alpha, 0) for j in range(1, k + 1))
    return RepairTranscript(p, stats, stripes, shard)


def update_cost(i: int, position: int, code: CodeSpec) -> int:
    """Parity symbols touched when symbol ``position`` of node ``i`` changes.

    One on the sum parity plus the nonzeros of column ``position`` of A_i.
    """
    if not 1 <= i <= code.k:
        raise ValueError(f"node {i} is not systematic (1..{code.k})")
    if not 0 <= position < code.alpha:
        raise ValueError(f"position must lie in [0, {code.alpha})")
    return 1 + int(np.count_nonzero(code.A[i - 1].data[:, position]))
