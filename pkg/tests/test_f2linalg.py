import json
import random

import pytest

from f2qec.f2linalg import BitMatrix, parity, vector_from_bits, vector_to_bits

from conftest import gauss_rank


def random_matrix(rng, rows, cols):
    return BitMatrix.from_rows([[rng.randint(0, 1) for _ in range(cols)] for _ in range(rows)])


def test_rank_identity_and_zero():
    assert BitMatrix.identity(3).rank() == 3
    assert BitMatrix.zeros(2, 5).rank() == 0


def test_rank_of_banded_parent_check_matrix():
    # 3x5 chain of checks; elimination by hand gives three independent rows
    h = BitMatrix.from_strings(["11000", "01110", "00011"])
    assert h.rank() == 3


def test_rref_identity_and_single_row():
    red, piv = BitMatrix.identity(3).rref()
    assert red == BitMatrix.identity(3)
    assert piv == (0, 1, 2)
    red, piv = BitMatrix.from_strings(["11"]).rref()
    assert red.row_strings() == ["11"]
    assert piv == (0,)


def test_rref_of_two_row_generator():
    g = BitMatrix.from_strings(["11100", "11011"])
    red, piv = g.rref()
    # already echelon up to identification of its pivot pair
    assert piv == (0, 2)
    assert red.rank() == 2
    assert red.row_space_equal(g)


def test_kernel_of_single_parity_row_enumerated():
    h = BitMatrix.from_strings(["111"])
    kernel = h.kernel_basis()
    # oracle: all 8 vectors
    expected = {v for v in range(8) if bin(v).count("1") % 2 == 0}
    spanned = {0}
    for r in kernel.data:
        spanned |= {s ^ r for s in spanned}
    assert spanned == expected
    assert kernel.rows == 2


def test_kernel_identity_is_empty():
    assert BitMatrix.identity(4).kernel_basis().rows == 0


def test_kernel_matches_row_space_of_generator():
    h = BitMatrix.from_strings(["11000", "01110", "00011"])
    g = BitMatrix.from_strings(["11100", "11011"])
    prod = h @ g.transpose()
    assert all(r == 0 for r in prod.data)
    assert h.kernel_basis().row_space_equal(g)


def test_row_space_equal_is_equivalence():
    a = BitMatrix.identity(2)
    b = BitMatrix.from_strings(["01", "11"])  # row-permuted and summed
    c = BitMatrix.from_strings(["01"])
    assert a.row_space_equal(b)
    assert b.row_space_equal(a)
    assert not a.row_space_equal(c)
    with pytest.raises(ValueError):
        a.row_space_equal(BitMatrix.identity(3))


def test_solve_identity_and_underdetermined():
    ident = BitMatrix.identity(4)
    assert ident.solve(0b1010) == 0b1010
    m = BitMatrix.from_strings(["11"])
    x = m.solve(1)
    assert x in (0b01, 0b10)
    assert m.mul_vec(x) == 1


def test_solve_inconsistent_returns_none():
    m = BitMatrix.from_strings(["11", "11"])
    assert m.solve(0b01) is None


def test_rank_nullity_and_solution_invariants():
    rng = random.Random(7)
    for _ in range(40):
        rows = rng.randint(1, 6)
        cols = rng.randint(1, 8)
        m = random_matrix(rng, rows, cols)
        assert m.rank() == gauss_rank(m.to_lists())
        assert m.rank() + m.kernel_basis().rows == cols
        # kernel rows are independent and annihilated
        k = m.kernel_basis()
        if k.rows:
            assert k.rank() == k.rows
            for r in k.data:
                assert m.mul_vec(r) == 0
        # any solvable syndrome is solved exactly
        target = m.mul_vec(rng.getrandbits(cols))
        x = m.solve(target)
        assert x is not None and m.mul_vec(x) == target


def test_rref_rank_agrees_with_rank():
    rng = random.Random(3)
    for _ in range(20):
        m = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 7))
        red, piv = m.rref()
        assert len(piv) == m.rank() == red.rank()
        assert list(piv) == sorted(piv)


def test_matmul_transpose_kron_against_lists():
    rng = random.Random(11)
    a = random_matrix(rng, 3, 4)
    b = random_matrix(rng, 4, 2)
    prod = (a @ b).to_lists()
    al, bl = a.to_lists(), b.to_lists()
    for i in range(3):
        for j in range(2):
            assert prod[i][j] == sum(al[i][t] * bl[t][j] for t in range(4)) % 2
    att = a.transpose().transpose()
    assert att == a
    k = BitMatrix.identity(2).kron(a)
    assert k.rows == 6 and k.cols == 8
    assert k.to_lists()[0][:4] == al[0]
    assert k.to_lists()[3][4:] == al[0]


def test_json_round_trip_bit_exact():
    rng = random.Random(5)
    m = random_matrix(rng, 4, 9)
    obj = json.loads(m.dumps())
    assert obj["rows"] == 4 and obj["cols"] == 9
    assert all(set(s) <= {"0", "1"} for s in obj["data"])
    assert BitMatrix.loads(m.dumps()) == m


def test_vector_helpers_round_trip():
    bits = [1, 0, 1, 1, 0]
    v = vector_from_bits(bits)
    assert vector_to_bits(v, 5) == bits
    assert parity(v, v) == (sum(bits) % 2)


def test_permute_and_delete_columns():
    m = BitMatrix.from_strings(["1100", "0011"])
    p = m.permute_columns([3, 2, 1, 0])
    assert p.row_strings() == ["0011", "1100"]
    d = m.delete_columns([1, 3])
    assert d.row_strings() == ["10", "01"]


def test_solve_single_error_syndrome_residual_in_kernel():
    from f2qec.code_factory import build_25_4_3

    hx = build_25_4_3().hx
    kernel = hx.kernel_basis()
    for q in range(25):
        s = hx.mul_vec(1 << q)
        x = hx.solve(s)
        assert x is not None and hx.mul_vec(x) == s
        assert kernel.in_row_space(x ^ (1 << q))
