import numpy as np
import pytest

from msrcode.checker import check_mds, check_repair
from msrcode.codes import (
    CodeId,
    ConstructionError,
    ConstructionParams,
    NodeParams,
    PairType,
    RepairForm,
    RepairKind,
    build_c1,
    build_c2,
    build_c3,
    build_c4,
    build_code,
    build_generic,
    build_long_mds,
    build_modified_zigzag,
    dumps,
    dumps_table,
    free_keys,
    loads,
    loads_table,
    minimal_field,
    table1_report,
    theorem_table,
)
from msrcode.gf import GF
from msrcode.linalg import Matrix, mat_mul, rank, same_row_space

from golden import EXAMPLE1, EXAMPLE2, EXAMPLE3, EXAMPLE4, dense

F5, F4 = GF(5), GF(4)


def assert_matches(code, example):
    alpha = code.alpha
    for i, rows in enumerate(example["A"], start=1):
        assert code.A[i - 1] == Matrix.from_rows(code.field, dense(rows, alpha)), f"A_{i}"
    for i, rows in enumerate(example["S"], start=1):
        assert code.S[i - 1] == Matrix.from_rows(code.field, dense(rows, alpha)), f"S_{i}"


def test_example1():
    assert_matches(build_c1(2, F5), EXAMPLE1)


def test_example2():
    assert_matches(build_c2(3, F4), EXAMPLE2)


def test_example3():
    assert_matches(build_c3(2, F5), EXAMPLE3)


def test_example4():
    assert_matches(build_c4(2, F4), EXAMPLE4)


def test_generic_blocks():
    one = F5.one
    node = NodeParams(PairType.I, one, one)
    code = build_generic(ConstructionParams(CodeId.CUSTOM, 2, F5, (node,)))
    assert code.A[0] == Matrix.identity(F5, 4)
    ii = NodeParams(PairType.II, F5(2), F5(2))
    code = build_generic(ConstructionParams(CodeId.CUSTOM, 2, F5, (ii,)))
    assert code.A[0].to_lists() == dense(EXAMPLE1["A"][0], 4)
    iii = NodeParams(PairType.III, F5(2), F5(3), F5(1), RepairForm(RepairKind.COMBO, F5(4)))
    code = build_generic(ConstructionParams(CodeId.CUSTOM, 2, F5, (iii,)))
    assert code.A[0].to_lists() == dense(EXAMPLE1["A"][2], 4)


def test_type_iv_block():
    node = NodeParams(PairType.IV, F5(2), F5(3), F5(1))
    A = build_generic(ConstructionParams(CodeId.CUSTOM, 1, F5, (node,))).A[0]
    assert A.to_lists() == [[0, 3], [2, 1]]


def test_generic_errors():
    one = F5.one
    node = NodeParams(PairType.I, one, one)
    with pytest.raises(ConstructionError):
        build_generic(ConstructionParams(CodeId.CUSTOM, 1, F5, (node,) * 4))  # four on one axis
    with pytest.raises(ConstructionError):
        build_generic(ConstructionParams(CodeId.CUSTOM, 1, F5, (NodeParams(PairType.I, F5(0), one),)))
    with pytest.raises(ValueError):
        RepairForm(RepairKind.COMBO)


def test_builder_preconditions():
    with pytest.raises(ConstructionError):
        build_c1(2, GF(3))
    with pytest.raises(ConstructionError):
        build_c1(1, GF(4))
    with pytest.raises(ConstructionError):
        build_c2(3, GF(2))
    with pytest.raises(ConstructionError):
        build_c2(1, GF(3))
    with pytest.raises(ConstructionError):
        build_c3(2, GF(4))
    with pytest.raises(ConstructionError):
        build_c4(1, GF(2))
    with pytest.raises(ConstructionError):
        build_c4(2, GF(5))
    with pytest.raises(ConstructionError):
        build_c1(7, GF(16))


@pytest.mark.parametrize(
    "builder, m, q",
    [(build_c1, 1, 3), (build_c2, 1, 2), (build_c3, 1, 3), (build_c4, 1, 4), (build_c1, 3, 7), (build_c2, 4, 8)],
)
def test_small_builds_pass_checks(builder, m, q):
    code = builder(m, GF(q))
    assert check_mds(code).passed
    assert check_repair(code).passed


def test_minimal_fields():
    assert minimal_field(CodeId.C1, 2).q == 5
    assert minimal_field(CodeId.C1, 4).q == 9
    assert minimal_field(CodeId.C2, 3).q == 4
    assert minimal_field(CodeId.C2, 1).q == 2
    assert minimal_field(CodeId.C3, 2).q == 5
    assert minimal_field(CodeId.C4, 2).q == 4
    assert minimal_field(CodeId.C4, 1).q == 4
    with pytest.raises(ValueError):
        minimal_field(CodeId.ZIGZAG, 2)


@pytest.mark.parametrize("code_id", [CodeId.C1, CodeId.C2, CodeId.C3, CodeId.C4])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_structural_invariants(code_id, m):
    code = build_code(code_id, m)
    assert len(set(code.S)) == code.k
    for axis in range(1, m + 1):
        forms = {code.S[i] for i in range(code.k) if code.axes[i] == axis}
        assert len(forms) <= 3
    for i in range(code.k):
        assert rank(code.S[i]) == code.beta
        for j in range(code.k):
            if i != j:
                assert same_row_space(mat_mul(code.S[i], code.A[j]), code.S[i])


def test_table1_small():
    rows = table1_report([build_c1(2, F5), build_c3(2, F5), build_c4(2, F4)])
    assert rows[0].as_tuple() == (6, 2, 2, 2) and rows[0].q == 5
    assert rows[1].as_tuple() == (4, 2, 4, 2)
    assert rows[2].as_tuple() == (4, 0, 4, 0)


@pytest.mark.parametrize("code_id, m", [(CodeId.C1, 2), (CodeId.C2, 3), (CodeId.C4, 2), (CodeId.C1, 4)])
def test_serialisation_round_trip(code_id, m):
    code = build_code(code_id, m)
    text = dumps(code)
    back = loads(text)
    assert back == code
    assert dumps(back) == text


def test_serialisation_rejects_inconsistent_coefficients():
    text = dumps(build_c1(2, F5)).replace("coeff 1 lam0=2 lam1=2", "coeff 1 lam0=3 lam1=2")
    with pytest.raises(ValueError):
        loads(text)
    with pytest.raises(ValueError):
        loads("not a spec")


def test_zigzag_and_long_mds_builders():
    F3 = GF(3)
    z = build_modified_zigzag(2, F3, [((1, 1), (1, 1)), ((1, 1), (2, 2))])
    assert z.k == 2 and all(z.access_optimal) and all(z.update_optimal)
    assert loads(dumps(z)) == z
    with pytest.raises(ConstructionError):
        build_modified_zigzag(2, F3, [((1,), (1, 1)), ((1, 1), (2, 2))])
    lam = [(F5(a), F5(b)) for a, b in [(1, 2), (1, 2), (1, 3), (1, 3), (2, 4), (2, 4)]]
    long_code = build_long_mds(2, F5, lam)
    assert long_code.pair_types[:2] == (PairType.III_SWAPPED,) * 2
    # derived off-diagonal coefficients
    assert long_code.params.nodes[0].k == F5(1) - F5(2)
    assert long_code.params.nodes[2].k == F5(3) - F5(1)
    assert [f.kind for f in long_code.repair_forms] == [RepairKind.V0] * 2 + [RepairKind.V1] * 2 + [RepairKind.COMBO] * 2
    with pytest.raises(ConstructionError):
        build_long_mds(2, F5, lam[:5])


def test_coefficient_table_text_round_trip():
    table = theorem_table(CodeId.C1, 2, F5)
    assert set(table) == set(free_keys(CodeId.C1, 2))
    assert loads_table(dumps_table(table), F5) == table
    with pytest.raises(ValueError):
        loads_table("bogus 1 2", F5)


def test_theorem_coefficients_c1():
    t = theorem_table(CodeId.C1, 2, F5)
    assert t[("k", 1)] == F5(-4) and t[("k", 3)] == F5(-4)
    assert t[("t", 1)] == F5(4) and t[("t", 3)] == F5(1)
    assert t[("lam", 4, 1)] == -(F5(2) ** 2)


def test_override_table_is_used():
    t = dict(theorem_table(CodeId.C3, 2, F5))
    t[("lam", 3, 1)] = t[("lam", 3, 0)]
    code = build_c3(2, F5, t)
    assert code.A[2].to_lists() == [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]
    assert not check_repair(code).passed
