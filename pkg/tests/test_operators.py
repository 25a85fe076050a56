"""Tests for operator construction and algebra."""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from symmkernel.operators import (
    DimensionError,
    HilbertSpace,
    Operator,
    add,
    anticommutator,
    basis_projector,
    commutator,
    dagger,
    dump_operator,
    embed,
    identity,
    jordan_wigner,
    kron,
    load_operator,
    mul,
    pauli,
    scale,
    sub,
)

X, Y, Z = pauli("x"), pauli("y"), pauli("z")
I2 = identity(2)


def rand_op(rng, d):
    return Operator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complex_matrices = st.integers(1, 4).flatmap(
    lambda d: st.tuples(arrays(float, (d, d), elements=finite), arrays(float, (d, d), elements=finite))
).map(lambda t: Operator(t[0] + 1j * t[1]))


def test_hilbert_space_invariants():
    sp = HilbertSpace((2, 3), ("a", "b", "c", "d", "e", "f"))
    assert sp.dim == 6 and sp.num_sites == 2
    with pytest.raises(ValueError):
        HilbertSpace((2, 2), ("a", "a", "b", "c"))
    with pytest.raises(ValueError):
        HilbertSpace((2, 0))
    with pytest.raises(ValueError):
        HilbertSpace((2,), ("a", "b", "c"))


def test_operator_rejects_bad_entries():
    with pytest.raises(ValueError):
        Operator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        Operator(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ValueError):
        Operator(np.array([[np.inf, 0], [0, 1]]))


def test_arith_examples():
    assert add(I2, -I2) == Operator(np.zeros((2, 2)))
    assert mul(X, X) == I2
    assert scale(I2, 2 + 0j) == Operator(np.diag([2.0, 2.0]))
    assert sub(I2, I2).max_abs() == 0


def test_arith_dimension_mismatch():
    with pytest.raises(DimensionError):
        add(I2, identity(3))
    with pytest.raises(DimensionError):
        mul(I2, identity(3))
    with pytest.raises(DimensionError):
        commutator(I2, identity(4))


def test_dagger_examples():
    assert dagger(Y) == Y
    assert dagger(basis_projector(0, 1, 2)) == basis_projector(1, 0, 2)
    A = rand_op(np.random.default_rng(3), 4)
    assert dagger(dagger(A)) == A


@given(complex_matrices, finite, finite)
def test_dagger_antilinear(A, re, im):
    c = complex(re, im)
    assert dagger(scale(A, c)).allclose(scale(dagger(A), np.conj(c)))
    assert dagger(dagger(A)) == A


def test_commutator_examples():
    assert commutator(X, Y).allclose(2j * Z)
    A = rand_op(np.random.default_rng(0), 3)
    assert commutator(A, identity(3)).max_abs() < 1e-12
    # S^2 and S^z on two spins, built by hand from 4x4 products
    sx = [np.kron(X.dense(), np.eye(2)), np.kron(np.eye(2), X.dense())]
    sy = [np.kron(Y.dense(), np.eye(2)), np.kron(np.eye(2), Y.dense())]
    sz = [np.kron(Z.dense(), np.eye(2)), np.kron(np.eye(2), Z.dense())]
    Sx, Sy, Sz = (sum(s) for s in (sx, sy, sz))
    S2 = Sx @ Sx + Sy @ Sy + Sz @ Sz
    assert commutator(Operator(S2), Operator(Sz)).max_abs() < 1e-12


def test_kron_examples():
    rng = np.random.default_rng(1)
    A = rand_op(rng, 2)
    K = kron(I2, A).dense()
    np.testing.assert_array_equal(K[:2, :2], A.dense())
    np.testing.assert_array_equal(K[2:, 2:], A.dense())
    np.testing.assert_array_equal(K[:2, 2:], 0)
    B3 = kron(identity(3), I2)
    assert B3.shape == (6, 6) and B3.space.site_dims == (3, 2)
    A, B, C, D = (rand_op(rng, 2) for _ in range(4))
    assert (kron(A, B) @ kron(C, D)).allclose(kron(A @ C, B @ D))


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    A, B, C = rand_op(rng, 2), rand_op(rng, 3), rand_op(rng, 2)
    assert kron(kron(A, B), C).allclose(kron(A, kron(B, C)))


def test_embed_examples():
    sp = HilbertSpace.uniform(2, 2)
    assert embed(Z, 1, sp) == kron(Z, I2)
    assert embed(Z, 2, sp) == kron(I2, Z)
    assert commutator(embed(X, 1, sp), embed(Y, 2, sp)).max_abs() == 0


def test_embed_errors():
    sp = HilbertSpace.uniform(2, 2)
    with pytest.raises(ValueError):
        embed(Z, 0, sp)
    with pytest.raises(ValueError):
        embed(Z, 3, sp)
    with pytest.raises(ValueError):
        embed(identity(3), 1, sp)


def test_embed_disjoint_commute():
    rng = np.random.default_rng(5)
    sp = HilbertSpace((2, 3, 2))
    for i, j in [(1, 2), (1, 3), (2, 3)]:
        A = rand_op(rng, sp.site_dims[i - 1])
        B = rand_op(rng, sp.site_dims[j - 1])
        a, b = embed(A, i, sp), embed(B, j, sp)
        assert (a @ b).allclose(b @ a)


def test_sparse_dense_agree():
    rng = np.random.default_rng(2)
    A = rand_op(rng, 4)
    S = A.to_sparse()
    assert S.is_sparse and not A.is_sparse
    np.testing.assert_array_equal(S.dense(), A.dense())
    # products may differ from BLAS only in summation order
    np.testing.assert_allclose((S @ S).dense(), (A @ A).dense(), rtol=0, atol=1e-14)
    np.testing.assert_array_equal(dagger(S).dense(), dagger(A).dense())
    np.testing.assert_array_equal(kron(S, S).dense(), kron(A, A).dense())


def test_jordan_wigner_examples():
    for m in range(1, 5):
        c = jordan_wigner(m, 4)
        assert anticommutator(c, c.dag()) == identity(c.space)
    c1, c2 = jordan_wigner(1, 2), jordan_wigner(2, 2)
    assert anticommutator(c1, c2).max_abs() == 0
    n = jordan_wigner(3, 4).dag() @ jordan_wigner(3, 4)
    assert n.is_diagonal()
    assert set(np.round(np.diag(n.dense()).real, 12)) == {0.0, 1.0}
    with pytest.raises(ValueError):
        jordan_wigner(0, 3)
    with pytest.raises(ValueError):
        jordan_wigner(4, 3)


def test_jordan_wigner_single_mode_is_lowering():
    # sigma^- = |0><1| with |0> empty
    np.testing.assert_array_equal(jordan_wigner(1, 1).dense(), [[0, 1], [0, 0]])


@pytest.mark.parametrize("num_modes", range(1, 7))
def test_jordan_wigner_car_exhaustive(num_modes):
    cs = [jordan_wigner(m, num_modes, sparse=True) for m in range(1, num_modes + 1)]
    eye = identity(cs[0].space)
    for (m, a), (n, b) in product(enumerate(cs), repeat=2):
        assert anticommutator(a, b).max_abs() == 0
        want = eye if m == n else eye * 0
        assert (anticommutator(a, b.dag()) - want).max_abs() == 0


def test_dump_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    A = rand_op(rng, 3).dense()
    A[0, 1] = 0
    path = tmp_path / "op.txt"
    dump_operator(Operator(A), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "3 8"
    coords = [tuple(int(t) for t in ln.split()[:2]) for ln in lines[1:]]
    assert coords == sorted(coords)
    assert load_operator(path) == Operator(A)
