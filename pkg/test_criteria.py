"""Tests for the reduced-form criterion evaluators."""
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import config
from controllers.criteria_controller import (
    best_criterion_III, criterion_I_lhs, criterion_II_lhs, criterion_III_lhs, criterion_III_lhs_vectors,
    level_pairs, m_linear_lhs, m_linear_lhs_from_copies, ppt_min_eigenvalue, ppt_report,
)
from controllers.oracle_controller import (
    m_linear_lhs_naive, random_density, random_product_vector, sample_biseparable,
)
from controllers.optimizer_controller import ProbeOptimizer
from controllers.state_controller import ghz, ghz_noise, w_noise
from models.density_matrix import DensityMatrix
from models.probe import Bipartition, ProductVector
from models.report import Criterion, OptimizerConfig
from utils.error_handler import DimensionMismatchError, ValidationError
from utils.partitions import enumerate_bipartitions

QUBITS3 = [2, 2, 2]


def basis(dims, *levels):
    return ProductVector.basis(dims, levels)


def product_state(rng, dims_a, dims_b):
    rho_a = random_density(dims_a, rng).mat
    rho_b = random_density(dims_b, rng).mat
    return DensityMatrix.from_matrix(np.kron(rho_a, rho_b), list(dims_a) + list(dims_b))


# Criterion I and the m-linear form

def test_criterion_I_bell_state(bell):
    part = Bipartition((1,), 2)
    report = criterion_I_lhs(bell, part, basis([2, 2], 0, 1), basis([2, 2], 1, 0))
    assert report.lhs == pytest.approx(0.5)
    assert report.violated
    assert report.partition == 'A={1}|B={2}'
    unswapped = criterion_I_lhs(bell, part, basis([2, 2], 0, 0), basis([2, 2], 1, 1))
    assert unswapped.lhs == pytest.approx(-0.5)


def test_criterion_I_maximally_mixed():
    rho = DensityMatrix.from_matrix(np.eye(4) / 4, [2, 2])
    report = criterion_I_lhs(rho, Bipartition((1,), 2), basis([2, 2], 0, 1), basis([2, 2], 1, 0))
    assert report.lhs == pytest.approx(-0.25)
    assert not report.violated


def test_criterion_I_never_fires_on_product_states(rng):
    part = Bipartition((1,), 2)
    for _ in range(50):
        rho = product_state(rng, [2], [3])
        phi1, phi2 = random_product_vector([2, 3], rng), random_product_vector([2, 3], rng)
        assert criterion_I_lhs(rho, part, phi1, phi2).lhs <= 1e-12


def test_m_linear_reduces_to_criterion_I(rng):
    for _ in range(20):
        rho = random_density(QUBITS3, rng)
        part = Bipartition((1, 3), 3)
        phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
        bilinear = criterion_I_lhs(rho, part, phi1, phi2).lhs
        assert m_linear_lhs_from_copies(rho, part, [phi1, phi2]).lhs == pytest.approx(bilinear, abs=1e-14)


def test_m_linear_three_copies_on_product_states(rng):
    part = Bipartition((1,), 2)
    for _ in range(20):
        rho = product_state(rng, [2], [2])
        copies = [random_product_vector([2, 2], rng) for _ in range(3)]
        assert m_linear_lhs_from_copies(rho, part, copies).lhs <= 1e-12


def test_m_linear_bell_matches_naive(bell):
    part = Bipartition((1,), 2)
    alphas = [basis([2], 0), basis([2], 1), basis([2], 0)]
    betas = [basis([2], 0), basis([2], 1), basis([2], 0)]
    reduced = m_linear_lhs(bell, part, alphas, betas)
    copies = [ProductVector([a.locals[0], b.locals[0]]) for a, b in zip(alphas, betas)]
    assert reduced.lhs == pytest.approx(m_linear_lhs_naive(bell, part, copies), abs=1e-10)
    assert reduced.terms['m'] == 3


def test_m_linear_needs_matching_halves(bell):
    with pytest.raises(ValidationError):
        m_linear_lhs(bell, Bipartition((1,), 2), [basis([2], 0)], [basis([2], 0)])


def test_criterion_I_dimension_mismatch(bell):
    with pytest.raises(DimensionMismatchError):
        criterion_I_lhs(bell, Bipartition((1,), 3), basis([2, 2], 0, 0), basis([2, 2], 1, 1))


# Criterion II

def test_criterion_II_ghz(ghz3):
    report = criterion_II_lhs(ghz3, basis(QUBITS3, 0, 0, 0), basis(QUBITS3, 1, 1, 1))
    assert report.terms['x'] == pytest.approx(0.5)
    assert all(k == pytest.approx(0.0) for k in report.terms['K'].values())
    assert len(report.terms['K']) == 3
    assert report.lhs == pytest.approx(0.5)
    assert report.recombined() == pytest.approx(report.lhs, abs=1e-12)


def test_criterion_II_equal_probes_never_fire(rng):
    rho = random_density(QUBITS3, rng)
    phi = random_product_vector(QUBITS3, rng)
    report = criterion_II_lhs(rho, phi, phi)
    x = report.terms['x']
    assert report.lhs == pytest.approx(x - 3 * x)
    assert not report.violated


@pytest.mark.parametrize('p', [0.0, 0.2, 3 / 7, 0.6, 1.0])
def test_criterion_II_ghz_noise_closed_form(p):
    rho = ghz_noise(2, 3, p)
    report = criterion_II_lhs(rho, basis(QUBITS3, 0, 0, 0), basis(QUBITS3, 1, 1, 1))
    assert report.lhs == pytest.approx(p / 2 - 3 * (1 - p) / 8, abs=1e-12)


# Criterion III

def test_criterion_III_pure_w(w3):
    report = criterion_III_lhs(w3, 0, 1)
    assert report.terms['sum_x'] == pytest.approx(2.0)
    assert report.terms['sum_y_offdiag'] == pytest.approx(0.0)
    assert report.terms['sum_y_diag'] == pytest.approx(1.0)
    assert report.lhs == pytest.approx(1.0)


@pytest.mark.parametrize('p', [0.0, 0.3, 8 / 17, 0.7])
def test_criterion_III_w_noise_closed_form(p):
    assert criterion_III_lhs(w_noise(3, p), 0, 1).lhs == pytest.approx((1 - p) - 9 * p / 8, abs=1e-12)


def test_criterion_III_maximally_mixed():
    rho = DensityMatrix.from_matrix(np.eye(8) / 8, QUBITS3)
    assert criterion_III_lhs(rho, 0, 1).lhs == pytest.approx(-9 / 8)


def test_criterion_III_vector_form_matches_levels(w3):
    by_levels = criterion_III_lhs(w3, 1, 0)
    by_vectors = criterion_III_lhs_vectors(w3, [0, 1], [1, 0])
    assert by_vectors.lhs == pytest.approx(by_levels.lhs, abs=1e-14)


def test_best_criterion_III_scans_level_pairs():
    assert len(level_pairs(3)) == 6
    rho = ghz(3, 3)
    best = best_criterion_III(rho)
    assert best.lhs == pytest.approx(max(criterion_III_lhs(rho, x, y).lhs for x, y in level_pairs(3)))


def test_criterion_III_preconditions(bell, w3):
    with pytest.raises(ValidationError):
        criterion_III_lhs(bell, 0, 1)
    with pytest.raises(ValidationError):
        criterion_III_lhs(w3, 1, 1)
    with pytest.raises(ValidationError):
        criterion_III_lhs(w3, 0, 2)


# PPT comparator

def test_ppt_examples(rng, bell):
    assert ppt_min_eigenvalue(product_state(rng, [2], [3]), Bipartition((1,), 2)) >= -config.TOL_EIG
    assert ppt_min_eigenvalue(bell, Bipartition((1,), 2)) == pytest.approx(-0.5)


@pytest.mark.parametrize('p', [0.1, 0.19, 0.21, 0.5])
def test_ppt_ghz_noise_boundary(p):
    report = ppt_report(ghz_noise(2, 3, p), Bipartition((1,), 3))
    assert report.terms['min_eigenvalue'] == pytest.approx((1 - p) / 8 - p / 2, abs=1e-12)
    assert report.violated == (p > 0.2)


# Properties

def test_reports_recombine_and_decide(rng):
    rho = random_density(QUBITS3, rng)
    phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
    part = Bipartition((1, 2), 3)
    reports = [
        criterion_I_lhs(rho, part, phi1, phi2),
        m_linear_lhs_from_copies(rho, part, [phi1, phi2, phi1]),
        criterion_II_lhs(rho, phi1, phi2),
        criterion_III_lhs(rho, 0, 1),
        ppt_report(rho, part),
    ]
    for report in reports:
        assert abs(report.recombined() - report.lhs) < 1e-12
        assert report.violated == (report.lhs > config.DECISION_TOL)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 16),
       st.lists(st.floats(min_value=0, max_value=2 * np.pi), min_size=6, max_size=6))
def test_probe_phase_invariance(seed, phases):
    rng = np.random.default_rng(seed)
    rho = random_density(QUBITS3, rng)
    phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
    rot1 = ProductVector([v * np.exp(1j * a) for v, a in zip(phi1.locals, phases[:3])], normalize=True)
    rot2 = ProductVector([v * np.exp(1j * a) for v, a in zip(phi2.locals, phases[3:])], normalize=True)
    part = Bipartition((1, 3), 3)
    assert criterion_II_lhs(rho, rot1, rot2).lhs == pytest.approx(criterion_II_lhs(rho, phi1, phi2).lhs, abs=1e-12)
    assert criterion_I_lhs(rho, part, rot1, rot2).lhs == pytest.approx(
        criterion_I_lhs(rho, part, phi1, phi2).lhs, abs=1e-12)


def _convexity_cases(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        rho1, rho2 = random_density(QUBITS3, rng), random_density(QUBITS3, rng)
        lam = float(rng.random())
        mixed = DensityMatrix.from_matrix(lam * rho1.mat + (1 - lam) * rho2.mat, QUBITS3)
        phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
        yield rho1, rho2, mixed, lam, phi1, phi2


def _check_convexity(count, seed):
    for rho1, rho2, mixed, lam, phi1, phi2 in _convexity_cases(count, seed):
        for f in (lambda r: criterion_II_lhs(r, phi1, phi2).lhs,
                  lambda r: criterion_III_lhs(r, 0, 1).lhs):
            assert f(mixed) <= lam * f(rho1) + (1 - lam) * f(rho2) + 1e-10


def test_mixing_convexity():
    _check_convexity(40, seed=7)


@pytest.mark.slow
def test_mixing_convexity_full():
    _check_convexity(200, seed=8)


def _check_soundness(count, seed, settings_):
    optimizer = ProbeOptimizer(settings_)
    rng = np.random.default_rng(seed)
    for trial in range(count):
        rho = sample_biseparable(QUBITS3, k=int(rng.integers(1, 31)), seed=seed * 100000 + trial)
        optimum = optimizer.optimize_violation(rho, Criterion.II)
        assert optimum.lhs <= config.DECISION_TOL
        phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
        assert criterion_II_lhs(rho, phi1, phi2).lhs <= config.DECISION_TOL
        assert best_criterion_III(rho).lhs <= config.DECISION_TOL


def test_soundness_on_biseparable_states():
    _check_soundness(10, seed=3, settings_=OptimizerConfig(restarts=4, iterations=60, basis_seeds=2))


@pytest.mark.slow
def test_soundness_on_biseparable_states_full():
    start = time.perf_counter()
    _check_soundness(500, seed=4, settings_=OptimizerConfig())
    assert time.perf_counter() - start < 300


def test_soundness_on_single_cut_products():
    for part in enumerate_bipartitions(3):
        rho = sample_biseparable(QUBITS3, part=part, k=1, seed=11)
        rng = np.random.default_rng(12)
        for _ in range(20):
            phi1, phi2 = random_product_vector(QUBITS3, rng), random_product_vector(QUBITS3, rng)
            assert criterion_II_lhs(rho, phi1, phi2).lhs <= config.DECISION_TOL
            assert criterion_I_lhs(rho, part, phi1, phi2).lhs <= config.DECISION_TOL


@pytest.mark.slow
def test_criterion_II_ten_qubits_is_fast():
    rho = ghz(2, 10)
    dims = [2] * 10
    zeros, ones = basis(dims, *[0] * 10), basis(dims, *[1] * 10)
    criterion_II_lhs(rho, zeros, ones)
    start = time.perf_counter()
    report = criterion_II_lhs(rho, zeros, ones)
    elapsed = time.perf_counter() - start
    assert len(report.terms['K']) == 511
    assert report.lhs == pytest.approx(0.5)
    assert elapsed < 0.05
