#!/usr/bin/env python3
"""
Oracle Controller for Qudit GME
===============================

Brute-force evaluators that build rho^(x)m and explicit permutation
operators on the copied space, random samplers, and the fuzzing loop that
compares them with the reduced forms in criteria_controller.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import config
from controllers.criteria_controller import (
    criterion_I_lhs, criterion_II_lhs, m_linear_lhs_from_copies,
)
from models.density_matrix import ComplexMatrix, DensityMatrix, LocalDims
from models.probe import Bipartition, ProductVector
from utils.error_handler import CapacityError, ValidationError
from utils.partitions import enumerate_bipartitions
from utils.tensor_core import kron

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class PermutationSpec:
    """Cyclic shift of the given 1-based parties across m copies."""

    m: int
    subset: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.m < 2:
            raise ValidationError(f"permutations need m >= 2 copies, got {self.m}", ["m"])
        object.__setattr__(self, 'subset', tuple(sorted(set(int(k) for k in self.subset))))


def _dims(dims: Union[LocalDims, Sequence[int]]) -> Tuple[int, ...]:
    return tuple(dims.dims) if isinstance(dims, LocalDims) else tuple(int(d) for d in dims)


def _check_capacity(size: int, what: str) -> None:
    if size * size > config.ORACLE_MAX_ENTRIES:
        raise CapacityError(f"{what} of dimension {size} exceeds oracle cap of "
                            f"{config.ORACLE_MAX_ENTRIES} entries")


def permutation_operator(dims: Union[LocalDims, Sequence[int]], spec: PermutationSpec) -> ComplexMatrix:
    """0/1 matrix sending copy i the subset-party content of copy i+1 (mod m)."""
    dims = _dims(dims)
    n, m = len(dims), spec.m
    if any(not 1 <= k <= n for k in spec.subset):
        raise ValidationError(f"subset {spec.subset} out of range 1..{n}", ["subset"])
    full_dims = dims * m
    size = int(np.prod(full_dims, dtype=np.int64))
    _check_capacity(size, "permutation operator")

    digits = np.array(np.unravel_index(np.arange(size), full_dims)).reshape(m, n, size)
    out = digits.copy()
    for k in spec.subset:
        out[:, k - 1, :] = np.roll(digits[:, k - 1, :], -1, axis=0)
    target = np.ravel_multi_index(tuple(out.reshape(m * n, size)), full_dims)

    op = np.zeros((size, size), dtype=complex)
    op[target, np.arange(size)] = 1.0
    return op


def tensor_copies(rho: DensityMatrix, m: int) -> ComplexMatrix:
    _check_capacity(rho.size ** m, f"{m}-fold tensor copy")
    return reduce(lambda acc, _: kron(acc, rho.mat), range(m - 1), rho.mat)


def _copies_vector(copies: Sequence[ProductVector]) -> np.ndarray:
    return reduce(np.kron, [c.full() for c in copies])


def m_linear_lhs_naive(rho: DensityMatrix, part: Bipartition,
                       copies: Sequence[ProductVector]) -> float:
    """sqrt|Re <Phi|(1 x Pi_B)^+ rho^(x)m (Pi_A x 1)|Phi>| - sqrt(<Phi|rho^(x)m|Phi>), literally."""
    m = len(copies)
    rho_m = tensor_copies(rho, m)
    phi = _copies_vector(copies)
    pi_a = permutation_operator(rho.dims, PermutationSpec(m, part.subset_a))
    pi_b = permutation_operator(rho.dims, PermutationSpec(m, part.complement))
    cross = np.vdot(pi_b @ phi, rho_m @ (pi_a @ phi))
    diag = np.vdot(phi, rho_m @ phi).real
    return float(np.sqrt(abs(cross.real)) - np.sqrt(max(diag, 0.0)))


def criterion_I_lhs_naive(rho: DensityMatrix, part: Bipartition,
                          phi1: ProductVector, phi2: ProductVector) -> float:
    return m_linear_lhs_naive(rho, part, [phi1, phi2])


def criterion_II_lhs_naive(rho: DensityMatrix, phi1: ProductVector, phi2: ProductVector) -> float:
    """sqrt(<Phi|rho^(x)2 Pi|Phi>) - sum_i sqrt(<Phi|P_i^+ rho^(x)2 P_i|Phi>), literally."""
    rho_2 = tensor_copies(rho, 2)
    phi = _copies_vector([phi1, phi2])
    everything = tuple(range(1, rho.n + 1))
    global_pi = permutation_operator(rho.dims, PermutationSpec(2, everything))
    first = np.vdot(phi, rho_2 @ (global_pi @ phi))
    lhs = float(np.sqrt(abs(first.real)))
    for part in enumerate_bipartitions(rho.n):
        p_i = permutation_operator(rho.dims, PermutationSpec(2, part.subset_a))
        shifted = p_i @ phi
        lhs -= float(np.sqrt(max(np.vdot(shifted, rho_2 @ shifted).real, 0.0)))
    return lhs


def duplicate_is_invariant(vec: Sequence[complex], dims: Union[LocalDims, Sequence[int]],
                           subset: Sequence[int], atol: float = 1e-12) -> bool:
    """Whether (Pi_subset x 1)|v>|v> = |v>|v>."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    doubled = np.kron(vec, vec)
    op = permutation_operator(dims, PermutationSpec(2, tuple(subset)))
    return bool(np.allclose(op @ doubled, doubled, atol=atol))


# Samplers

def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Complex standard normal vector, normalized."""
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def random_product_vector(dims: Union[LocalDims, Sequence[int]], rng: np.random.Generator,
                          basis_probability: float = 0.0) -> ProductVector:
    """Random product probe; each local is a basis vector with the given probability."""
    vectors = []
    for d in _dims(dims):
        if basis_probability and rng.random() < basis_probability:
            vec = np.zeros(d, dtype=complex)
            vec[rng.integers(d)] = 1.0
        else:
            vec = random_unit_vector(d, rng)
        vectors.append(vec)
    return ProductVector(vectors, normalize=True)


def random_density(dims: Union[LocalDims, Sequence[int]], rng: np.random.Generator,
                   rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre state G G^+ / tr(G G^+)."""
    if not isinstance(dims, LocalDims):
        dims = LocalDims(tuple(dims))
    size = dims.total
    rank = size if rank is None else rank
    g = rng.standard_normal((size, rank)) + 1j * rng.standard_normal((size, rank))
    mat = g @ g.conj().T
    mat = (mat + mat.conj().T) / 2
    return DensityMatrix.from_matrix(mat / np.trace(mat).real, dims)


def random_bipartition(n: int, rng: np.random.Generator) -> Bipartition:
    parts = enumerate_bipartitions(n)
    return parts[int(rng.integers(len(parts)))]


def _product_across(part: Bipartition, dims: Tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    side_a, side_b = part.subset_a, part.complement
    dims_a = [dims[k - 1] for k in side_a]
    dims_b = [dims[k - 1] for k in side_b]
    a = random_unit_vector(int(np.prod(dims_a)), rng).reshape(dims_a)
    b = random_unit_vector(int(np.prod(dims_b)), rng).reshape(dims_b)
    order = list(side_a) + list(side_b)
    joint = np.multiply.outer(a, b).transpose(np.argsort(order))
    return joint.reshape(-1)


def sample_biseparable(dims: Union[LocalDims, Sequence[int]], part: Optional[Bipartition] = None,
                       k: int = 1, seed: int = 0) -> DensityMatrix:
    """sum_j p_j |a_j><a_j| x |b_j><b_j| with each component product across a cut.

    With ``part`` given every component uses that cut; otherwise each
    component draws its own cut, covering the full biseparable set.
    """
    if k < 1:
        raise ValidationError(f"need at least one component, got k={k}", ["k"])
    if not isinstance(dims, LocalDims):
        dims = LocalDims(tuple(dims))
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(k))
    mat = np.zeros((dims.total, dims.total), dtype=complex)
    for weight in weights:
        cut = part if part is not None else random_bipartition(dims.n, rng)
        vec = _product_across(cut, dims.dims, rng)
        mat += weight * np.outer(vec, vec.conj())
    return DensityMatrix.from_matrix(mat, dims)


# Fuzzing

def _fuzz_case(n: int, d: int, m: int, seed: int, trial: int) -> Dict[str, float]:
    rng = np.random.default_rng([seed, trial])
    dims = LocalDims.uniform(d, n)
    rho = random_density(dims, rng, rank=int(rng.integers(1, dims.total + 1)))
    part = random_bipartition(n, rng)
    copies = [random_product_vector(dims, rng, basis_probability=0.25) for _ in range(m)]
    deviations = {
        'MLIN': abs(m_linear_lhs_from_copies(rho, part, copies).lhs
                    - m_linear_lhs_naive(rho, part, copies)),
    }
    if m == 2:
        phi1, phi2 = copies
        deviations['I'] = abs(criterion_I_lhs(rho, part, phi1, phi2).lhs
                              - criterion_I_lhs_naive(rho, part, phi1, phi2))
        deviations['II'] = abs(criterion_II_lhs(rho, phi1, phi2).lhs
                               - criterion_II_lhs_naive(rho, phi1, phi2))
    return deviations


def fuzz_equivalence(n: int, d: int, m: int, trials: int, seed: int,
                     workers: int = 1, tol: float = ORACLE_TOL) -> Dict[str, object]:
    """Compare reduced and naive evaluators on random states and probes."""
    if n < 2 or d < 2 or m < 2 or trials < 1:
        raise ValidationError(f"invalid oracle check parameters n={n}, d={d}, m={m}, trials={trials}",
                              ["parameters"])
    _check_capacity(d ** (n * m), f"{m}-copy space")
    logger.info(f"Oracle fuzzing n={n} d={d} m={m} trials={trials} seed={seed}")

    def run(trial):
        return _fuzz_case(n, d, m, seed, trial)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(trial) for trial in range(trials)]

    per_criterion: Dict[str, float] = {}
    for result in results:
        for name, dev in result.items():
            per_criterion[name] = max(per_criterion.get(name, 0.0), dev)
    max_dev = max(per_criterion.values())
    summary = {
        'n': n, 'd': d, 'm': m, 'trials': trials, 'seed': seed,
        'cases': len(results), 'max_deviation': max_dev,
        'per_criterion': per_criterion, 'tolerance': tol, 'passed': max_dev <= tol,
    }
    logger.info(f"Oracle max deviation {max_dev:.3e} over {len(results)} cases")
    return summary
