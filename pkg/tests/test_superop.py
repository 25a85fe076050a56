"""Tests for Liouvillian assembly, kernels, sectors and time evolution."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symmkernel.models import (
    HubbardParams,
    NetworkParams,
    RandomDissipationSpec,
    exchange_operator,
    hubbard_number_ops,
    hubbard_symmetry_ops,
    hubbard_system,
    network_system,
    total_spin_ops,
    xxx_system_casimir,
    xxx_system_random,
)
from symmkernel.operators import Operator, basis_projector, identity, pauli
from symmkernel.superop import (
    BudgetError,
    OpenSystem,
    SymmetryError,
    adjoint_liouvillian,
    apply_liouvillian,
    charge_sectors,
    degeneracy,
    devectorize,
    evolve,
    is_strong_symmetry,
    kernel_basis,
    liouvillian,
    nullity,
    sector_split,
    vectorize,
)

SM = pauli("+")  # |0><1|
DAMPING = OpenSystem(Operator(np.zeros((2, 2))), ((SM, 1.0),))


def random_system(rng, d, num_jumps=2) -> OpenSystem:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    jumps = tuple(
        (Operator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))), float(rng.uniform(0.1, 2)))
        for _ in range(num_jumps)
    )
    return OpenSystem(Operator(A + A.conj().T), jumps)


def rand_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def model_fixtures():
    return {
        "network5": network_system(NetworkParams.table_default(5)),
        "xxx-random3": xxx_system_random(3, RandomDissipationSpec(seed=11)),
        "xxx-casimir3": xxx_system_casimir(3, gamma=0.7),
        "hubbard2": hubbard_system(HubbardParams(2)),
    }


# -- vectorization ---------------------------------------------------------------

def test_vectorize_examples():
    np.testing.assert_array_equal(vectorize(identity(2)), [1, 0, 0, 1])
    np.testing.assert_array_equal(vectorize(basis_projector(0, 1, 2)), [0, 1, 0, 0])
    R = rand_matrix(np.random.default_rng(0), 3)
    np.testing.assert_array_equal(devectorize(vectorize(Operator(R)), 3).dense(), R)


def test_devectorize_rejects_non_square_length():
    with pytest.raises(ValueError):
        devectorize(np.zeros(5))


# -- Liouvillian -----------------------------------------------------------------

def test_amplitude_damping_action():
    M = liouvillian(DAMPING).dense()
    got = M @ vectorize(basis_projector(1, 1, 2))
    want = vectorize(Operator(np.diag([2.0, -2.0])))
    np.testing.assert_allclose(got, want, atol=1e-15)
    np.testing.assert_allclose(M @ vectorize(basis_projector(0, 0, 2)), 0, atol=1e-15)


def test_non_hermitian_hamiltonian_rejected():
    with pytest.raises(ValueError):
        OpenSystem(Operator(np.array([[0, 1], [0, 0]])), ())


def test_negative_rate_rejected():
    with pytest.raises(ValueError):
        OpenSystem(Operator(np.zeros((2, 2))), ((SM, -1.0),))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_matrix_matches_master_equation(seed, d):
    rng = np.random.default_rng(seed)
    sys = random_system(rng, d)
    rho = Operator(rand_matrix(rng, d))
    got = liouvillian(sys).dense() @ vectorize(rho)
    want = vectorize(apply_liouvillian(sys, rho))
    np.testing.assert_allclose(got, want, atol=1e-10 * max(1, np.abs(want).max()))


def test_sparse_assembly_matches_dense():
    sys = random_system(np.random.default_rng(4), 3)
    np.testing.assert_allclose(liouvillian(sys, sparse=True).dense(), liouvillian(sys).dense(), atol=1e-13)


def test_adjoint_is_conjugate_transpose():
    sys = random_system(np.random.default_rng(1), 2)
    np.testing.assert_allclose(adjoint_liouvillian(sys).dense(), liouvillian(sys).dense().conj().T, atol=1e-13)


def test_adjoint_matches_heisenberg_form():
    rng = np.random.default_rng(8)
    sys = random_system(rng, 3)
    O = rand_matrix(rng, 3)
    H = sys.H.dense()
    want = 1j * (H @ O - O @ H)
    for L, g in sys.jumps:
        L = L.dense()
        LdL = L.conj().T @ L
        want += g * (2 * L.conj().T @ O @ L - LdL @ O - O @ LdL)
    got = adjoint_liouvillian(sys).dense() @ vectorize(Operator(O))
    np.testing.assert_allclose(got, want.reshape(-1), atol=1e-10)


def test_adjoint_annihilates_identity_network_figure():
    sys = network_system(NetworkParams.figure_default())
    res = adjoint_liouvillian(sys).dense() @ vectorize(identity(sys.space))
    assert np.abs(res).max() <= 1e-12 * np.abs(liouvillian(sys).dense()).max()


def test_exchange_operator_is_left_null_vector():
    # baths on sites 4, 5 leave sites 1, 2 free
    sys = network_system(NetworkParams.table_default(5))
    res = adjoint_liouvillian(sys).dense() @ vectorize(exchange_operator(1, 2, 5))
    assert np.abs(res).max() < 1e-12 * 100


@pytest.mark.parametrize("name", list(model_fixtures()))
def test_trace_and_hermiticity_preservation(name):
    sys = model_fixtures()[name]
    M = liouvillian(sys).dense()
    scale = np.abs(M).max()
    res = adjoint_liouvillian(sys).dense() @ vectorize(identity(sys.space))
    assert np.abs(res).max() <= 1e-12 * scale
    rng = np.random.default_rng(0)
    rho = rand_matrix(rng, sys.dim)
    d = sys.dim
    lhs = (M @ rho.reshape(-1)).reshape(d, d).conj().T
    rhs = (M @ rho.conj().T.reshape(-1)).reshape(d, d)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * scale)


# -- strong symmetries -----------------------------------------------------------

def test_strong_symmetry_examples():
    cas = xxx_system_casimir(3)
    assert is_strong_symmetry(cas, total_spin_ops(3)[0])
    hub = hubbard_system(HubbardParams(2))
    ops = hubbard_symmetry_ops(2)
    assert is_strong_symmetry(hub, ops["eta+"])
    assert not is_strong_symmetry(hub, ops["S+"])
    for sys in model_fixtures().values():
        assert is_strong_symmetry(sys, identity(sys.space))


def test_zero_rate_jump_ignored_by_symmetry_check():
    sys = OpenSystem(Operator(np.zeros((2, 2))), ((SM, 0.0),))
    assert is_strong_symmetry(sys, pauli("x"))


# -- nullity ---------------------------------------------------------------------

def test_nullity_trivial_matrices():
    z = nullity(np.zeros((9, 9)))
    assert z.nullity == 9 and not z.uncertain
    e = nullity(np.eye(16))
    assert e.nullity == 0 and e.gap_ratio == np.inf


def test_nullity_network_five():
    res = nullity(liouvillian(network_system(NetworkParams.table_default(5))))
    assert res.nullity == 5
    assert res.gap_ratio > 1e3 and not res.uncertain
    assert len(res.dropped_singulars) == 5


def test_nullity_flags_missing_gap():
    # threshold 3e-10 drops only 1e-11, leaving a gap of just 100
    M = np.diag([1.0, 1e-9, 1e-11])
    res = nullity(M, dim=3)
    assert res.nullity == 1
    assert res.gap_ratio == pytest.approx(100)
    assert res.uncertain


def test_kernel_basis_spans_kernel():
    sys = OpenSystem(Operator(np.zeros((2, 2))), ())
    assert kernel_basis(liouvillian(sys)).shape == (4, 4)
    sys = network_system(NetworkParams.table_default(5))
    M = liouvillian(sys).dense()
    K = kernel_basis(liouvillian(sys))
    assert K.shape[1] == 5
    assert np.abs(M @ K).max() < 1e-10
    np.testing.assert_allclose(K.conj().T @ K, np.eye(5), atol=1e-12)


# -- sectors ---------------------------------------------------------------------

def test_sector_split_no_charges_is_full():
    sys = xxx_system_random(2, RandomDissipationSpec(seed=3))
    blocks = sector_split(sys)
    assert len(blocks) == 1
    np.testing.assert_allclose(blocks[0].block, liouvillian(sys).dense(), atol=1e-14)


def test_sector_split_hubbard_two():
    sys = hubbard_system(HubbardParams(2))
    charges = hubbard_number_ops(2)
    sectors = charge_sectors(charges)
    assert len(sectors) == 9
    blocks = sector_split(sys, charges)
    assert len(blocks) == 81
    assert sum(b.block.shape[0] for b in blocks) == 16**2
    assert degeneracy(sys, charges).nullity == 20


def test_sector_blocks_are_restrictions():
    sys = hubbard_system(HubbardParams(2))
    M = liouvillian(sys).dense()
    d = sys.dim
    covered = np.zeros_like(M, dtype=bool)
    for b in sector_split(sys, hubbard_number_ops(2)):
        idx = b.full_indices(d)
        np.testing.assert_allclose(b.block, M[np.ix_(idx, idx)], atol=1e-14)
        covered[np.ix_(idx, idx)] = True
    assert not np.any(np.abs(M[~covered]) > 0)


def test_sector_split_xxx_four():
    sys = xxx_system_random(4, RandomDissipationSpec(seed=2))
    assert degeneracy(sys, [total_spin_ops(4)[2]]).nullity == 35


def test_sector_split_rejects_non_diagonal_charge():
    sys = xxx_system_casimir(2)
    with pytest.raises(SymmetryError, match="simultaneous_eigenbasis"):
        sector_split(sys, [total_spin_ops(2)[0]])


def test_sector_split_rejects_broken_symmetry():
    sys = network_system(NetworkParams.table_default(3))
    with pytest.raises(SymmetryError):
        sector_split(sys, [basis_projector(1, 1, sys.space)])


@pytest.mark.parametrize("name,charges", [
    ("hubbard2", lambda: hubbard_number_ops(2)),
    ("xxx-random3", lambda: [total_spin_ops(3)[2]]),
    ("xxx-casimir3", lambda: [total_spin_ops(3)[2]]),
])
def test_sector_sum_equals_full_nullity(name, charges):
    sys = model_fixtures()[name]
    split = degeneracy(sys, charges())
    full = degeneracy(sys)
    assert split.nullity == full.nullity
    assert sum(s.nullity for s in split.sectors) == split.nullity


@pytest.mark.parametrize("name", list(model_fixtures()))
def test_kernel_dimensions_of_adjoint_agree(name):
    sys = model_fixtures()[name]
    if sys.dim > 16:
        pytest.skip("d > 16")
    assert nullity(liouvillian(sys)).nullity == nullity(adjoint_liouvillian(sys)).nullity


def test_degeneracy_examples():
    assert degeneracy(network_system(NetworkParams.table_default(3))).nullity == 1
    assert degeneracy(xxx_system_casimir(2)).nullity == 10


def test_degeneracy_hubbard_three_sectors():
    sys = hubbard_system(HubbardParams(3))
    assert degeneracy(sys, hubbard_number_ops(3)).nullity == 50


def test_degeneracy_budget():
    sys = hubbard_system(HubbardParams(2))
    with pytest.raises(BudgetError):
        degeneracy(sys, max_block=100)


def test_degeneracy_threaded_matches_serial():
    sys = xxx_system_random(4, RandomDissipationSpec(seed=5))
    charges = [total_spin_ops(4)[2]]
    a = degeneracy(sys, charges, workers=1)
    b = degeneracy(sys, charges, workers=3)
    assert a.nullity == b.nullity and a.sectors == b.sectors


# -- evolution -------------------------------------------------------------------

def test_evolve_amplitude_damping():
    rho = evolve(DAMPING, basis_projector(1, 1, 2), T=10.0, dt=0.005)
    np.testing.assert_allclose(rho.dense(), np.diag([1.0, 0.0]), atol=1e-6)


def test_evolve_fixed_point_unchanged():
    rho0 = basis_projector(0, 0, 2)
    rho = evolve(DAMPING, rho0, T=1.0, dt=0.01)
    assert np.abs(rho.dense() - rho0.dense()).max() < 1e-9


def test_evolve_network_trace():
    sys = network_system(NetworkParams.table_default(5))
    rho = evolve(sys, basis_projector(2, 2, sys.space), T=10.0, dt=0.005)
    assert abs(rho.trace() - 1) <= 1e-9


def test_evolve_rejects_non_density_matrix():
    with pytest.raises(ValueError):
        evolve(DAMPING, Operator(np.diag([2.0, 0.0])), T=1.0, dt=0.1)


def test_evolve_reports_instability():
    sys = network_system(NetworkParams.table_default(5))
    with pytest.raises(RuntimeError, match="dt"):
        evolve(sys, basis_projector(1, 1, sys.space), T=5.0, dt=0.5)
