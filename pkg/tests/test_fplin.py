import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subproj.fplin import (
    FpMatrix,
    all_combinations,
    coordinates_in_rows,
    hstack,
    image_basis,
    inv_mod,
    is_prime,
    iter_vectors,
    kernel_basis,
    kron,
    rank,
    rref,
    solve,
    solve_left,
    solve_matrix,
    subspace_contains,
    vstack,
)


def M(p, rows):
    return FpMatrix(p, rows)


primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def fp_matrices(draw, max_dim=5):
    p = draw(primes)
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    entries = draw(
        st.lists(
            st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
            min_size=r,
            max_size=r,
        )
    )
    return FpMatrix(p, np.array(entries, dtype=np.int64).reshape(r, c))


def test_prime_validation():
    assert is_prime(2) and is_prime(65521)
    with pytest.raises(ValueError):
        FpMatrix(4, [[1]])
    with pytest.raises(ValueError):
        FpMatrix(1 << 17, [[1]])


def test_inv_mod():
    for p in (2, 3, 5, 101):
        for a in range(1, p):
            assert (a * inv_mod(a, p)) % p == 1


def test_rref_identity():
    i2 = FpMatrix.identity(2, 2)
    red, pivots, rk = rref(i2)
    assert red == i2 and pivots == (0, 1) and rk == 2


def test_rref_zero():
    z = FpMatrix.zeros(3, 3, 2)
    red, pivots, rk = rref(z)
    assert red == z and pivots == () and rk == 0


def test_rref_rank_one():
    red, pivots, rk = rref(M(2, [[1, 1], [1, 1]]))
    assert red == M(2, [[1, 1], [0, 0]])
    assert pivots == (0,) and rk == 1


def test_solve_identity():
    a = FpMatrix.identity(3, 2)
    b = M(3, [[2], [1]])
    x, ker = solve(a, b)
    assert x == b
    assert ker.rows == 0


def test_solve_inconsistent():
    assert solve(FpMatrix.zeros(2, 1, 1), [1]) is None


def test_solve_underdetermined():
    # all 4 vectors of F_2^2: solutions of [1 1].x = 0 are (0,0) and (1,1)
    a = M(2, [[1, 1]])
    x, ker = solve(a, [0])
    assert x == M(2, [[0], [0]])
    assert ker == M(2, [[1, 1]])
    sols = [v for v in iter_vectors(2, 2) if (a.a @ v) % 2 == 0]
    assert sorted(map(tuple, sols)) == [(0, 0), (1, 1)]


def test_kernel_image_trivial():
    assert kernel_basis(FpMatrix.identity(5, 3)).rows == 0
    assert image_basis(FpMatrix.zeros(5, 3, 2)).rows == 0


def test_subspace_contains():
    span = M(2, [[1, 1]])
    assert not subspace_contains(span, [1, 0])
    assert subspace_contains(span, [1, 1])
    assert subspace_contains(span, [0, 0])
    # span of [1,1] over F_2 has exactly 2 elements
    members = [tuple(v) for v in iter_vectors(2, 2) if subspace_contains(span, v)]
    assert members == [(0, 0), (1, 1)]


def test_coordinates_in_rows():
    span = M(3, [[1, 0, 2], [0, 1, 1]])
    coeffs = coordinates_in_rows(span, [2, 1, 2])
    assert coeffs is not None
    assert list((coeffs @ span.a) % 3) == [2, 1, 2]
    assert coordinates_in_rows(span, [0, 0, 1]) is None


def test_stack_and_kron():
    a = M(2, [[1, 0]])
    b = M(2, [[1, 1]])
    assert vstack([a, b]) == M(2, [[1, 0], [1, 1]])
    assert hstack([a, b]) == M(2, [[1, 0, 1, 1]])
    assert kron(M(2, [[1, 1]]), M(2, [[1, 0]])) == M(2, [[1, 0, 1, 0]])


def test_zero_dimensional_shapes():
    z = FpMatrix.zeros(2, 0, 3)
    assert z.rows == 0 and z.cols == 3
    red, pivots, rk = rref(z)
    assert rk == 0
    assert kernel_basis(z).rows == 3  # everything is in the kernel
    i0 = FpMatrix.identity(2, 0)
    assert (i0 @ FpMatrix.zeros(2, 0, 4)).shape == (0, 4)


def test_all_combinations_order():
    combos = all_combinations(2, 2)
    assert combos.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert all_combinations(3, 0).shape == (1, 0)


@settings(max_examples=150, deadline=None)
@given(fp_matrices())
def test_kernel_annihilates_and_rank_nullity(m):
    ker = kernel_basis(m)
    assert (m.a @ ker.a.T % m.p == 0).all()
    assert rank(m) + ker.rows == m.cols


@settings(max_examples=150, deadline=None)
@given(fp_matrices())
def test_rref_idempotent(m):
    red, _, _ = rref(m)
    red2, _, _ = rref(red)
    assert red == red2


@settings(max_examples=100, deadline=None)
@given(fp_matrices(max_dim=4), st.randoms(use_true_random=False))
def test_rref_canonical_under_row_ops(m, rng):
    # shuffling rows and adding multiples of rows preserves the row space,
    # hence the RREF
    a = m.a.copy()
    for _ in range(6):
        if a.shape[0] < 2:
            break
        i, j = rng.randrange(a.shape[0]), rng.randrange(a.shape[0])
        if i != j:
            a[i] = (a[i] + rng.randrange(m.p) * a[j]) % m.p
    if a.shape[0]:
        a = a[rng.sample(range(a.shape[0]), a.shape[0])]
    assert rref(FpMatrix(m.p, a, cols=m.cols))[0] == rref(m)[0]


@settings(max_examples=150, deadline=None)
@given(fp_matrices(), st.data())
def test_solve_exactness(m, data):
    # build a consistent rhs from a random x, check the recovered solution
    x = np.array(
        data.draw(st.lists(st.integers(0, m.p - 1), min_size=m.cols, max_size=m.cols)),
        dtype=np.int64,
    )
    b = (m.a @ x) % m.p if m.cols else np.zeros(m.rows, dtype=np.int64)
    res = solve(m, FpMatrix(m.p, b.reshape(-1, 1), cols=1))
    assert res is not None
    got, ker = res
    assert ((m.a @ got.a) % m.p == b.reshape(-1, 1)).all()
    # difference of the two solutions lies in the kernel
    diff = (x - got.a.reshape(-1)) % m.p
    if m.cols:
        assert subspace_contains(ker, diff) if ker.rows else not diff.any()


@settings(max_examples=100, deadline=None)
@given(fp_matrices(max_dim=4))
def test_solve_matrix_matches_columnwise(m):
    b = FpMatrix(m.p, (m.a @ np.ones((m.cols, 2), dtype=np.int64)) % m.p, cols=2)
    x = solve_matrix(m, b)
    assert x is not None and (m @ x) == b


def test_solve_left():
    a = M(3, [[1, 2], [0, 1]])
    b = M(3, [[2, 2]])
    x = solve_left(a, b)
    assert x is not None and (x @ a) == b


def test_determinism_bit_identical():
    entries = [[3, 1, 4], [1, 5, 9], [2, 6, 5]]
    a = rref(M(7, entries))
    b = rref(M(7, entries))
    assert a[0].a.tobytes() == b[0].a.tobytes() and a[1] == b[1]
