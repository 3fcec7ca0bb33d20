import random

import pytest
from hypothesis import given, strategies as st

from morsehom.errors import CompositionNonzero, DimensionMismatch
from morsehom.int_linalg import HomologyGroup, IntMatrix, homology_at, smith_normal_form

from oracles import bareiss_det, gcd_of_minors, homology_oracle, sympy_invariants


def small_matrices(max_dim=5, bound=9):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    )


def check_decomposition(rows):
    A = IntMatrix.from_rows(rows)
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.D
    assert abs(s.U.determinant()) == 1 and abs(bareiss_det(s.U.to_rows())) == 1
    assert abs(s.V.determinant()) == 1 and abs(bareiss_det(s.V.to_rows())) == 1
    for i in range(s.D.rows):
        for j in range(s.D.cols):
            if i != j:
                assert s.D[i, j] == 0
    d = s.diag
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[: len(nz)] == tuple(nz), "zeros must trail"
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    prod = 1
    for k, x in enumerate(d, start=1):
        prod *= x
        assert prod == gcd_of_minors(rows, k)
    return s


def test_zero_matrix_gives_identities():
    s = smith_normal_form(IntMatrix.zeros(2, 2))
    assert s.D.is_zero()
    assert s.U == IntMatrix.identity(2) and s.V == IntMatrix.identity(2)


def test_identity():
    s = smith_normal_form(IntMatrix.identity(3))
    assert s.D == IntMatrix.identity(3)
    assert s.diag == (1, 1, 1)


def test_two_by_two_example():
    # gcd of entries 2, |det| = 8, so d1 = 2 and d1 d2 = 8
    assert gcd_of_minors([[2, 4], [6, 8]], 1) == 2
    assert abs(bareiss_det([[2, 4], [6, 8]])) == 8
    s = check_decomposition([[2, 4], [6, 8]])
    assert s.diag == (2, 4)


def test_deterministic():
    A = IntMatrix.from_rows([[3, -6, 9], [12, 0, 4]])
    assert smith_normal_form(A) == smith_normal_form(A)


def test_large_entries_stay_exact():
    big = 2**80 + 1
    s = check_decomposition([[big, 2 * big], [3, 5]])
    assert s.U @ IntMatrix.from_rows([[big, 2 * big], [3, 5]]) @ s.V == s.D


def test_degenerate_shapes():
    for shape in [(0, 3), (3, 0), (0, 0)]:
        s = smith_normal_form(IntMatrix.zeros(*shape))
        assert s.D.shape == shape and s.diag == ()


@given(small_matrices())
def test_snf_properties(rows):
    check_decomposition(rows)


@given(small_matrices(max_dim=4, bound=5))
def test_snf_matches_sympy(rows):
    s = smith_normal_form(IntMatrix.from_rows(rows))
    assert s.invariant_factors == sympy_invariants(rows, (len(rows), len(rows[0])))


def test_bool_entries_rejected():
    with pytest.raises(TypeError):
        IntMatrix(1, 1, (True,))


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        IntMatrix(2, 2, (1, 2, 3))


# -- homology_at -------------------------------------------------------------

def test_multiplication_by_two():
    h = homology_at(IntMatrix.zeros(1, 1), IntMatrix.from_rows([[2]]))
    assert h == HomologyGroup(0, (2,))


def test_zero_maps_rank_one():
    h = homology_at(IntMatrix.zeros(0, 1), IntMatrix.zeros(1, 0))
    assert h == HomologyGroup(1)


def test_composition_checked():
    with pytest.raises(CompositionNonzero):
        homology_at(IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]))


def test_shapes_checked():
    with pytest.raises(DimensionMismatch):
        homology_at(IntMatrix.zeros(1, 2), IntMatrix.zeros(3, 1))


def _random_pair(rnd):
    """d_k, d_{k+1} with d_k d_{k+1} = 0: d_{k+1} random, d_k's rows chosen
    in the rational left kernel (scaled to integers)."""
    from oracles import _left_kernel

    a, n, b = rnd.randint(0, 4), rnd.randint(1, 4), rnd.randint(0, 4)
    lower = [[rnd.randint(-3, 3) for _ in range(b)] for _ in range(n)]
    ker = _left_kernel(lower, n, b)
    upper = []
    for _ in range(a):
        if ker and rnd.random() < 0.6:
            v, c = rnd.choice(ker), rnd.choice([-1, 1])
            upper.append([c * x for x in v])
        else:
            upper.append([0] * n)
    return IntMatrix.from_rows(upper, n), IntMatrix.from_rows(lower, b)


@given(st.randoms(use_true_random=False))
def test_homology_matches_oracle(rnd):
    dk, dk1 = _random_pair(rnd)
    h = homology_at(dk, dk1)
    free, tors = homology_oracle(dk.to_rows(), dk.shape, dk1.to_rows(), dk1.shape)
    assert (h.free_rank, h.torsion) == (free, tors)


def test_homology_group_validation():
    with pytest.raises(ValueError):
        HomologyGroup(0, (2, 3))
    with pytest.raises(ValueError):
        HomologyGroup(-1)
    assert str(HomologyGroup(2, (2, 4))) == "Z^2 + Z/2 + Z/4"
    assert str(HomologyGroup(0)) == "0"


def test_seeded_batch():
    rnd = random.Random(7)
    for _ in range(40):
        dk, dk1 = _random_pair(rnd)
        h = homology_at(dk, dk1)
        assert (h.free_rank, h.torsion) == homology_oracle(dk.to_rows(), dk.shape, dk1.to_rows(), dk1.shape)
