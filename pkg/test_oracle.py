"""Tests for the brute-force oracle, the samplers and the equivalence fuzzer."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from controllers.criteria_controller import criterion_I_lhs, criterion_II_lhs, m_linear_lhs_from_copies
from controllers.oracle_controller import (
    PermutationSpec, criterion_I_lhs_naive, criterion_II_lhs_naive, duplicate_is_invariant,
    fuzz_equivalence, m_linear_lhs_naive, permutation_operator, random_density, random_product_vector,
    sample_biseparable,
)
from controllers.state_controller import ghz, ghz_vector
from models.density_matrix import DensityMatrix
from models.probe import Bipartition, ProductVector
from utils.error_handler import CapacityError, ValidationError
from utils.partitions import enumerate_bipartitions

FUZZ_CONFIGS = [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (3, 3, 2)]


def test_permutation_operator_examples():
    swap = permutation_operator([2, 2], PermutationSpec(2, (1, 2)))
    assert_allclose(swap @ swap, np.eye(16))
    a, b = np.array([1, 2, 3, 4.0]), np.array([5, 6, 7, 8.0])
    assert_allclose(swap @ np.kron(a, b), np.kron(b, a))
    assert_allclose(permutation_operator([2, 2], PermutationSpec(2, ())), np.eye(16))
    cycle = permutation_operator([2], PermutationSpec(3, (1,)))
    assert_allclose(np.linalg.matrix_power(cycle, 3), np.eye(8))
    assert not np.allclose(cycle, np.eye(8))


def test_permutation_operator_shifts_copies():
    # copy i receives copy i+1 on the shifted parties
    e = np.eye(2)
    op = permutation_operator([2], PermutationSpec(3, (1,)))
    assert_allclose(op @ np.kron(np.kron(e[0], e[1]), e[1]), np.kron(np.kron(e[1], e[1]), e[0]))


@pytest.mark.parametrize('dims,m', [([2, 2], 2), ([2, 3], 2), ([2, 2], 3)])
def test_permutation_operator_is_unitary_with_order_m(dims, m):
    for part in enumerate_bipartitions(len(dims)):
        op = permutation_operator(dims, PermutationSpec(m, part.subset_a))
        assert_allclose(op.conj().T @ op, np.eye(op.shape[0]))
        assert_allclose(np.linalg.matrix_power(op, m), np.eye(op.shape[0]))


def test_permutation_operator_capacity():
    with pytest.raises(CapacityError):
        permutation_operator([2] * 6, PermutationSpec(2, (1,)))
    with pytest.raises(ValidationError):
        PermutationSpec(1, (1,))


def test_criterion_II_naive_examples(rng):
    rho = ghz(2, 2)
    zeros, ones = ProductVector.basis([2, 2], (0, 0)), ProductVector.basis([2, 2], (1, 1))
    assert criterion_II_lhs_naive(rho, zeros, ones) == pytest.approx(0.5)
    assert criterion_II_lhs_naive(rho, zeros, ones) == pytest.approx(criterion_II_lhs(rho, zeros, ones).lhs)
    noise = DensityMatrix.from_matrix(np.eye(8) / 8, [2, 2, 2])
    phi1, phi2 = random_product_vector([2, 2, 2], rng), random_product_vector([2, 2, 2], rng)
    assert criterion_II_lhs_naive(noise, phi1, phi2) == pytest.approx(criterion_II_lhs(noise, phi1, phi2).lhs)


def test_reduced_forms_match_naive_on_random_states(rng):
    dims = [2, 2, 2]
    for _ in range(10):
        rho = random_density(dims, rng)
        phi1, phi2 = random_product_vector(dims, rng), random_product_vector(dims, rng)
        assert abs(criterion_II_lhs(rho, phi1, phi2).lhs - criterion_II_lhs_naive(rho, phi1, phi2)) < 1e-10
        for part in enumerate_bipartitions(3):
            assert abs(criterion_I_lhs(rho, part, phi1, phi2).lhs
                       - criterion_I_lhs_naive(rho, part, phi1, phi2)) < 1e-10


def test_three_copy_form_matches_naive(rng):
    part = Bipartition((1,), 2)
    for _ in range(10):
        rho = random_density([2, 2], rng)
        copies = [random_product_vector([2, 2], rng) for _ in range(3)]
        assert abs(m_linear_lhs_from_copies(rho, part, copies).lhs
                   - m_linear_lhs_naive(rho, part, copies)) < 1e-10


def test_three_copy_naive_bound_on_separable_states(rng):
    part = Bipartition((1,), 2)
    for _ in range(10):
        rho = sample_biseparable([2, 2], part=part, k=4, seed=int(rng.integers(1 << 30)))
        copies = [random_product_vector([2, 2], rng) for _ in range(3)]
        assert m_linear_lhs_naive(rho, part, copies) <= 1e-12


def test_sample_biseparable(rng):
    first = sample_biseparable([2, 2, 2], k=20, seed=5)
    assert_allclose(first.mat, sample_biseparable([2, 2, 2], k=20, seed=5).mat)
    assert first.validation_report().passed
    single = sample_biseparable([2, 2, 2], part=Bipartition((1,), 3), k=1, seed=6)
    assert single.purity() == pytest.approx(1.0)
    for _ in range(10):
        phi1, phi2 = random_product_vector([2, 2, 2], rng), random_product_vector([2, 2, 2], rng)
        assert criterion_II_lhs(single, phi1, phi2).lhs <= 1e-9
    with pytest.raises(ValidationError):
        sample_biseparable([2, 2], k=0)


def test_duplicated_states_are_invariant(rng):
    dims = [2, 3, 2]
    vec = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    vec /= np.linalg.norm(vec)
    assert duplicate_is_invariant(vec, dims, (1, 2, 3))
    part = Bipartition((1, 3), 3)
    product = sample_biseparable(dims, part=part, k=1, seed=9)
    eigenvalues, eigenvectors = np.linalg.eigh(product.mat)
    across = eigenvectors[:, -1]
    assert duplicate_is_invariant(across, dims, part.subset_a)
    assert not duplicate_is_invariant(ghz_vector(2, 3), [2, 2, 2], (1,))


@pytest.mark.parametrize('n,d,m', FUZZ_CONFIGS)
def test_fuzz_equivalence(n, d, m):
    summary = fuzz_equivalence(n, d, m, trials=20, seed=2024)
    assert summary['passed']
    assert summary['max_deviation'] < 1e-10
    assert set(summary['per_criterion']) == ({'MLIN', 'I', 'II'} if m == 2 else {'MLIN'})


@pytest.mark.slow
@pytest.mark.parametrize('n,d,m', FUZZ_CONFIGS)
def test_fuzz_equivalence_full(n, d, m):
    assert fuzz_equivalence(n, d, m, trials=100, seed=99, workers=4)['max_deviation'] < 1e-10


def test_fuzz_is_reproducible():
    first = fuzz_equivalence(2, 2, 2, trials=1, seed=17)
    second = fuzz_equivalence(2, 2, 2, trials=1, seed=17)
    assert first['max_deviation'] == second['max_deviation']
    threaded = fuzz_equivalence(2, 2, 2, trials=6, seed=17, workers=3)
    serial = fuzz_equivalence(2, 2, 2, trials=6, seed=17)
    assert threaded['per_criterion'] == serial['per_criterion']


def test_fuzz_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        fuzz_equivalence(1, 2, 2, trials=1, seed=0)
    with pytest.raises(CapacityError):
        fuzz_equivalence(4, 3, 2, trials=1, seed=0)
