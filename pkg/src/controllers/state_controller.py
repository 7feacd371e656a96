#!/usr/bin/env python3
"""
State Controller for Qudit GME
==============================

Constructors for every state family used by the detection examples and
scans, plus the string-keyed family registry the CLI and the scanner use.

Families:
- ghz / ghz_noise: p*|GHZ_dn><GHZ_dn| + (1-p) I/d^n (p = visibility, default 1)
- w: (p/2^n) I + (1-p) |W_n><W_n| (p = noise weight, default 0)
- ghz_w_mix: (1-a-b)/8 I + a GHZ + b W on three qubits
- gghz_qutrit_mix: (1-a-b)/27 I + a bisep + b gGHZ on three qutrits
- smolin: (1-a-b)/d^4 I + (a/d) sum_i gGHZ1(i) + (b/d) sum_i gGHZ2(i)
- bisep_qutrit: |0><0| x |phi+><phi+| on three qutrits
- custom-file: a JSON state file
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from config import config
from models.density_matrix import DensityMatrix, LocalDims, ValidationReport, load_density_matrix
from models.probe import ProductVector
from models.state_family import StateFamily
from utils.error_handler import UsageError, ValidationError
from utils.tensor_core import flat_index

logger = logging.getLogger(__name__)

ProbePair = Tuple[ProductVector, ProductVector]


def pure_density(v: Sequence[complex], dims: Union[LocalDims, Sequence[int]],
                 normalize: bool = False) -> DensityMatrix:
    """Rank-one projector |v><v|."""
    if not isinstance(dims, LocalDims):
        dims = LocalDims(tuple(dims))
    vec = np.asarray(v, dtype=complex).reshape(-1)
    if vec.size != dims.total:
        raise ValidationError(f"state vector of length {vec.size} does not match D={dims.total}", ["length"])
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValidationError("state vector is zero", ["norm"])
    if normalize:
        vec = vec / norm
    elif abs(norm - 1.0) > config.TOL_NORM:
        raise ValidationError(f"state vector has norm {norm:.12g}; pass normalize=True", ["norm"])
    return DensityMatrix.from_matrix(np.outer(vec, vec.conj()), dims)


def ghz_vector(d: int, n: int) -> np.ndarray:
    dims = LocalDims.uniform(d, n)
    vec = np.zeros(dims.total, dtype=complex)
    for i in range(d):
        vec[flat_index(dims, [i] * n)] = 1.0
    return vec / np.sqrt(d)


def ghz(d: int, n: int) -> DensityMatrix:
    """Generalized GHZ projector (1/d) sum_ij |i..i><j..j|."""
    if d < 2 or n < 2:
        raise ValidationError(f"ghz needs d >= 2 and n >= 2, got d={d}, n={n}", ["d", "n"])
    return pure_density(ghz_vector(d, n), LocalDims.uniform(d, n))


def w_vector(n: int) -> np.ndarray:
    dims = LocalDims.uniform(2, n)
    vec = np.zeros(dims.total, dtype=complex)
    for slot in range(n):
        levels = [0] * n
        levels[slot] = 1
        vec[flat_index(dims, levels)] = 1.0
    return vec / np.sqrt(n)


def w_state(n: int) -> DensityMatrix:
    """Qubit W projector, equal superposition of the n single-excitation states."""
    if n < 2:
        raise ValidationError(f"w_state needs n >= 2, got {n}", ["n"])
    return pure_density(w_vector(n), LocalDims.uniform(2, n))


def bisep_qutrit() -> DensityMatrix:
    """|0><0|_A x |phi+><phi+|_BC with |phi+> = (|00>+|11>+|22>)/sqrt(3)."""
    dims = LocalDims.uniform(3, 3)
    vec = np.zeros(dims.total, dtype=complex)
    for i in range(3):
        vec[flat_index(dims, (0, i, i))] = 1.0
    return pure_density(vec / np.sqrt(3), dims)


def _check_weights(weights: Sequence[float]) -> None:
    if any(w < 0 for w in weights):
        raise ValidationError(f"mixture weights must be non-negative, got {list(weights)}", ["weights"])
    if sum(weights) > 1.0 + 1e-12:
        raise ValidationError(f"mixture weights sum to {sum(weights)} > 1", ["weights"])


def noise_mix(components: Sequence[Tuple[float, DensityMatrix]],
              dims: Union[LocalDims, Sequence[int]]) -> DensityMatrix:
    """sum_i w_i rho_i + (1 - sum_i w_i) I/D."""
    if not isinstance(dims, LocalDims):
        dims = LocalDims(tuple(dims))
    weights = [float(w) for w, _ in components]
    _check_weights(weights)
    mat = np.eye(dims.total, dtype=complex) * ((1.0 - sum(weights)) / dims.total)
    for weight, rho in components:
        if rho.dims != dims:
            raise ValidationError(f"component dims {rho.dims.dims} differ from {dims.dims}", ["dims"])
        mat = mat + weight * rho.mat
    return DensityMatrix.from_matrix(mat, dims)


def smolin_vector(d: int, x: int, i: int) -> np.ndarray:
    """sum_k |k, k+x, k+i, k+i+x>/sqrt(d), addition mod d."""
    dims = LocalDims.uniform(d, 4)
    vec = np.zeros(dims.total, dtype=complex)
    for k in range(d):
        vec[flat_index(dims, (k, (k + x) % d, (k + i) % d, (k + i + x) % d))] = 1.0
    return vec / np.sqrt(d)


def smolin_family(d: int, alpha: float, beta: float) -> DensityMatrix:
    """Four-qudit Smolin-type mixture; the inner sums run over i = 0..d-1."""
    if d < 2:
        raise ValidationError(f"smolin_family needs d >= 2, got {d}", ["d"])
    _check_weights([alpha, beta])
    dims = LocalDims.uniform(d, 4)
    components = []
    for x, weight in ((1, alpha), (2, beta)):
        for i in range(d):
            components.append((weight / d, pure_density(smolin_vector(d, x % d, i), dims)))
    return noise_mix(components, dims)


def ghz_noise(d: int, n: int, p: float) -> DensityMatrix:
    return noise_mix([(p, ghz(d, n))], LocalDims.uniform(d, n))


def w_noise(n: int, p: float) -> DensityMatrix:
    return noise_mix([(1.0 - p, w_state(n))], LocalDims.uniform(2, n))


def ghz_w_mix(alpha: float, beta: float) -> DensityMatrix:
    return noise_mix([(alpha, ghz(2, 3)), (beta, w_state(3))], LocalDims.uniform(2, 3))


def gghz_qutrit_mix(alpha: float, beta: float) -> DensityMatrix:
    return noise_mix([(alpha, bisep_qutrit()), (beta, ghz(3, 3))], LocalDims.uniform(3, 3))


def validate(rho: DensityMatrix) -> ValidationReport:
    """Hermiticity deviation, trace deviation and minimum eigenvalue."""
    return rho.validation_report()


# Coherence pairs: the off-diagonal elements a family is built around. They
# are the default probes of the fixed probe policy.

def ghz_pairs(dims: Sequence[int]) -> List[ProbePair]:
    levels = min(dims)
    n = len(dims)
    return [(ProductVector.basis(dims, [i] * n), ProductVector.basis(dims, [j] * n))
            for i in range(levels) for j in range(i + 1, levels)]


def w_pairs(n: int) -> List[ProbePair]:
    dims = [2] * n

    def excitation(slot):
        levels = [0] * n
        levels[slot] = 1
        return ProductVector.basis(dims, levels)

    return [(excitation(i), excitation(j)) for i in range(n) for j in range(i + 1, n)]


def bisep_pairs() -> List[ProbePair]:
    dims = [3, 3, 3]
    return [(ProductVector.basis(dims, (0, i, i)), ProductVector.basis(dims, (0, j, j)))
            for i in range(3) for j in range(i + 1, 3)]


def smolin_pairs(d: int) -> List[ProbePair]:
    dims = [d] * 4
    pairs = []
    for x in sorted({1 % d, 2 % d}):
        for i in range(d):
            kets = [ProductVector.basis(dims, (k, (k + x) % d, (k + i) % d, (k + i + x) % d))
                    for k in range(d)]
            pairs.extend((kets[a], kets[b]) for a in range(d) for b in range(a + 1, d))
    return pairs


@dataclass(frozen=True)
class FamilyInfo:
    """Registry entry: builder, used parameters and default probes."""

    build: Callable[[StateFamily], DensityMatrix]
    params: Tuple[str, ...]
    pairs: Callable[[StateFamily, DensityMatrix], List[ProbePair]]
    description: str


def _p(family: StateFamily, default: float) -> float:
    return default if family.p is None else float(family.p)


FAMILY_REGISTRY: Dict[str, FamilyInfo] = {
    'ghz': FamilyInfo(
        build=lambda f: ghz_noise(f.d, f.n, _p(f, 1.0)),
        params=('d', 'n', 'p'),
        pairs=lambda f, rho: ghz_pairs(rho.dims.dims),
        description='p*GHZ(d,n) + (1-p) I/d^n, p = visibility',
    ),
    'ghz_noise': FamilyInfo(
        build=lambda f: ghz_noise(f.d, f.n, _p(f, 1.0)),
        params=('d', 'n', 'p'),
        pairs=lambda f, rho: ghz_pairs(rho.dims.dims),
        description='alias of ghz',
    ),
    'w': FamilyInfo(
        build=lambda f: w_noise(f.n, _p(f, 0.0)),
        params=('n', 'p'),
        pairs=lambda f, rho: w_pairs(f.n),
        description='(p/2^n) I + (1-p) W(n), p = noise weight',
    ),
    'ghz_w_mix': FamilyInfo(
        build=lambda f: ghz_w_mix(f.alpha, f.beta),
        params=('alpha', 'beta'),
        pairs=lambda f, rho: ghz_pairs([2, 2, 2]) + w_pairs(3),
        description='(1-a-b)/8 I + a GHZ + b W, three qubits',
    ),
    'gghz_qutrit_mix': FamilyInfo(
        build=lambda f: gghz_qutrit_mix(f.alpha, f.beta),
        params=('alpha', 'beta'),
        pairs=lambda f, rho: ghz_pairs([3, 3, 3]) + bisep_pairs(),
        description='(1-a-b)/27 I + a bisep + b gGHZ, three qutrits',
    ),
    'smolin': FamilyInfo(
        build=lambda f: smolin_family(f.d, f.alpha, f.beta),
        params=('d', 'alpha', 'beta'),
        pairs=lambda f, rho: smolin_pairs(f.d),
        description='four-qudit Smolin-type mixture',
    ),
    'bisep_qutrit': FamilyInfo(
        build=lambda f: bisep_qutrit(),
        params=(),
        pairs=lambda f, rho: bisep_pairs(),
        description='|0><0| x |phi+><phi+| on three qutrits',
    ),
    'custom-file': FamilyInfo(
        build=lambda f: _load_custom(f),
        params=(),
        pairs=lambda f, rho: ghz_pairs(rho.dims.dims),
        description='density matrix read from a JSON state file',
    ),
}


def _load_custom(family: StateFamily) -> DensityMatrix:
    if not family.path:
        raise UsageError("family custom-file needs a state file path")
    return load_density_matrix(family.path)


def family_info(name: str) -> FamilyInfo:
    try:
        return FAMILY_REGISTRY[name]
    except KeyError:
        raise UsageError(f"unknown family '{name}', expected one of {sorted(FAMILY_REGISTRY)}")


def build_family(family: StateFamily) -> DensityMatrix:
    """Construct the family member described by ``family``."""
    rho = family_info(family.family).build(family)
    logger.debug(f"Built {family!r} -> {rho!r}")
    return rho


def default_pairs(family: StateFamily, rho: DensityMatrix) -> List[ProbePair]:
    """Coherence pairs used as fixed probes for this family."""
    return family_info(family.family).pairs(family, rho)
