import itertools

import numpy as np
import pytest

from msrcode.codec import (
    Shard,
    ShardFormatError,
    bytes_to_symbols,
    digits_per_byte,
    encode,
    reconstruct,
    repair_parity,
    repair_systematic,
    symbols_to_bytes,
    update_cost,
)
from msrcode.codes import CodeId, build_c1, build_c3, build_c4, build_code
from msrcode.gf import GF

F5, F4 = GF(5), GF(4)


def random_bytes(rng, n):
    return rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()


def test_digits_per_byte():
    assert [digits_per_byte(q) for q in (3, 5, 7, 9)] == [6, 4, 3, 3]


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 256])
def test_symbol_mapping_round_trip(q):
    F = GF(q)
    data = random_bytes(np.random.default_rng(q), 41)
    sym = bytes_to_symbols(data, F)
    assert sym.min() >= 0 and sym.max() < q
    assert symbols_to_bytes(sym, F, len(data)) == data


def test_symbol_mapping_layout():
    # GF(4): two bits per symbol, low bits first
    assert bytes_to_symbols(b"\x1b", F4).tolist() == [3, 2, 1, 0]
    # GF(5): base-5 digits, least significant first; 7 = 2 + 1*5
    assert bytes_to_symbols(b"\x07", F5).tolist() == [2, 1, 0, 0]


def test_zero_file_gives_zero_shards():
    code = build_c1(2, F5)
    for shard in encode(bytes(50), code):
        assert not shard.payload.any()


def test_single_unit_stripe():
    code = build_c1(2, F5)
    # one byte 1 in GF(5) gives digits (1, 0, 0, 0) = f_1 = e_0; everything else zero
    shards = encode(b"\x01", code)
    assert shards[0].stripe(0).data.tolist() == [1, 0, 0, 0]
    assert shards[6].stripe(0).data.tolist() == [1, 0, 0, 0]
    assert shards[7].stripe(0).data.tolist() == [0, 0, 2, 0]


def test_empty_file():
    code = build_c3(2, F5)
    shards = encode(b"", code)
    assert all(s.stripe_count == 0 for s in shards)
    assert reconstruct(shards[2:], code) == b""


def test_reconstruct_examples():
    code = build_c3(2, F5)
    data = random_bytes(np.random.default_rng(1), 100)
    shards = encode(data, code)
    k = code.k
    assert reconstruct(shards[:k], code) == data
    assert reconstruct(shards[1:k + 1], code) == data
    assert reconstruct(shards[: k - 2] + shards[k:], code) == data
    for subset in itertools.combinations(shards, k):
        assert reconstruct(list(subset), code) == data


def test_reconstruct_errors():
    code = build_c3(2, F5)
    shards = encode(b"hello", code)
    with pytest.raises(ValueError):
        reconstruct(shards[:3], code)
    with pytest.raises(ValueError):
        reconstruct(shards[:3] + [shards[0]], code)
    other = encode(b"hello", build_c1(2, F5))
    with pytest.raises(ValueError):
        reconstruct(other[:4], code)


def test_repair_c1_node1():
    code = build_c1(2, F5)
    shards = encode(random_bytes(np.random.default_rng(2), 300), code)
    tr = repair_systematic(1, shards[1:], code)
    assert tr.recovered == shards[0]
    assert tr.download_per_stripe == 14
    assert tr.total_download == 14 * shards[0].stripe_count
    assert all(h.field_ops == 0 and h.symbols_read == 2 for h in tr.helpers)


def test_repair_c4_last_node_costs_helper_work():
    code = build_c4(2, F4)
    shards = encode(random_bytes(np.random.default_rng(3), 200), code)
    tr = repair_systematic(4, [s for s in shards if s.node_index != 4], code)
    assert tr.recovered == shards[3]
    assert any(h.field_ops > 0 for h in tr.helpers)
    assert all(h.symbols_read == code.alpha for h in tr.helpers)


def test_repair_errors():
    code = build_c1(2, F5)
    shards = encode(b"abc", code)
    with pytest.raises(ValueError):
        repair_systematic(7, shards, code)
    with pytest.raises(ValueError):
        repair_systematic(1, shards[2:], code)


def test_repair_parity():
    code = build_c1(2, F5)
    shards = encode(random_bytes(np.random.default_rng(4), 90), code)
    for p in (7, 8):
        tr = repair_parity(p, shards[:6], code)
        assert tr.recovered == shards[p - 1]
        assert tr.download_per_stripe == code.k * code.alpha
    with pytest.raises(ValueError):
        repair_parity(3, shards[:6], code)


def test_update_cost():
    c3 = build_c3(2, F5)
    assert all(update_cost(3, pos, c3) == 2 for pos in range(4))
    c1 = build_c1(2, F5)
    # A_3 = (2e0, 2e1, e0 + 3e2, e1 + 3e3): columns 0, 1 hold two nonzeros
    assert [update_cost(3, pos, c1) for pos in range(4)] == [3, 3, 2, 2]
    assert all(update_cost(1, pos, c1) == 2 for pos in range(4))
    with pytest.raises(ValueError):
        update_cost(7, 0, c1)


def test_shard_format():
    code = build_c4(2, F4)
    shard = encode(b"shard", code)[5]
    blob = shard.to_bytes()
    assert blob[:4] == b"MSRS"
    assert blob[4:9] == bytes([1, 4, 2, 2, 2])  # version, C4, m, p, e
    assert blob[9:12] == bytes([1, 1, 1])  # modulus x^2 + x + 1
    assert blob[12:14] == (6).to_bytes(2, "big")
    assert blob[14:22] == (5).to_bytes(8, "big")
    assert blob[22:26] == shard.stripe_count.to_bytes(4, "big")
    assert len(blob) == 26 + shard.stripe_count * 4
    assert Shard.from_bytes(blob) == shard


def test_shard_format_errors(tmp_path):
    code = build_c1(2, F5)
    shard = encode(b"abc", code)[0]
    path = tmp_path / "s.shard"
    shard.write(path)
    assert Shard.read(path) == shard
    blob = shard.to_bytes()
    with pytest.raises(ShardFormatError):
        Shard.from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ShardFormatError):
        Shard.from_bytes(blob[:-1])
    with pytest.raises(ShardFormatError):
        Shard.from_bytes(blob[:4] + b"\x02" + blob[5:])


@pytest.mark.parametrize("code_id", [CodeId.C1, CodeId.C2, CodeId.C3, CodeId.C4])
def test_repair_every_node_m3(code_id):
    code = build_code(code_id, 3)
    shards = encode(random_bytes(np.random.default_rng(9), 500), code)
    for i in range(1, code.k + 1):
        tr = repair_systematic(i, [s for s in shards if s.node_index != i], code)
        assert tr.recovered == shards[i - 1]
        assert tr.download_per_stripe == (code.k + 1) * code.alpha // 2
