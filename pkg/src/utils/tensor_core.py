#!/usr/bin/env python3
"""
Tensor Core for Qudit GME
=========================

Dense complex linear algebra and mixed-radix index arithmetic shared by all
criterion evaluators.

Ordering convention: row-major mixed radix, party 1 is the most significant
digit, so |i_1 i_2 ... i_n> sits at flat index
((i_1 * d_2 + i_2) * d_3 + ...) + i_n. Every function in the package uses it.
"""

import logging
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from config import config
from models.density_matrix import ComplexMatrix, DensityMatrix, LocalDims
from models.probe import Bipartition, ProductVector
from utils.error_handler import CapacityError, DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)


def _dims_tuple(dims: Union[LocalDims, Sequence[int]]) -> Tuple[int, ...]:
    return tuple(dims.dims) if isinstance(dims, LocalDims) else tuple(int(d) for d in dims)


def flat_index(dims: Union[LocalDims, Sequence[int]], idx: Sequence[int]) -> int:
    """Mixed-radix row-major index of a multi-index."""
    dims = _dims_tuple(dims)
    if len(idx) != len(dims):
        raise IndexError(f"multi-index {tuple(idx)} has {len(idx)} components for {len(dims)} parties")
    flat = 0
    for d, i in zip(dims, idx):
        if not 0 <= i < d:
            raise IndexError(f"index component {i} out of range for dimension {d}")
        flat = flat * d + int(i)
    return flat


def multi_index(dims: Union[LocalDims, Sequence[int]], flat: int) -> Tuple[int, ...]:
    """Inverse of :func:`flat_index`."""
    dims = _dims_tuple(dims)
    total = int(np.prod(dims, dtype=np.int64))
    if not 0 <= flat < total:
        raise IndexError(f"flat index {flat} out of range [0, {total})")
    digits = []
    for d in reversed(dims):
        flat, digit = divmod(flat, d)
        digits.append(digit)
    return tuple(reversed(digits))


def kron(a: ComplexMatrix, b: ComplexMatrix, max_entries: int = None) -> ComplexMatrix:
    """Kronecker product with a capacity check on the result size."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    limit = config.ORACLE_MAX_ENTRIES if max_entries is None else max_entries
    entries = a.size * b.size
    if entries > limit:
        raise CapacityError(f"Kronecker product with {entries} entries exceeds cap {limit}")
    return np.kron(a, b)


def product_matrix_element(rho: DensityMatrix, bra: ProductVector, ket: ProductVector) -> complex:
    """<bra|rho|ket> for product vectors, restricted to their supports."""
    if bra.dims != rho.dims.dims or ket.dims != rho.dims.dims:
        raise DimensionMismatchError(
            f"probe dims {bra.dims}/{ket.dims} do not match state dims {rho.dims.dims}"
        )
    bra_idx, bra_amp = bra.support()
    ket_idx, ket_amp = ket.support()
    if bra_idx.size == 1 and ket_idx.size == 1:
        return complex(np.conj(bra_amp[0]) * rho.mat[bra_idx[0], ket_idx[0]] * ket_amp[0])
    size = rho.size
    if bra_idx.size * ket_idx.size * 4 <= size * size:
        block = rho.mat[np.ix_(bra_idx, ket_idx)]
        return complex(np.conj(bra_amp) @ block @ ket_amp)
    return complex(np.vdot(bra.full(), rho.mat @ ket.full()))


def _subset_parties(subset: Union[Bipartition, Iterable[int]], n: int) -> Tuple[int, ...]:
    parties = tuple(sorted(set(subset.subset_a if isinstance(subset, Bipartition) else subset)))
    if isinstance(subset, Bipartition) and subset.n != n:
        raise DimensionMismatchError(f"bipartition over {subset.n} parties used on {n}-party state")
    if any(not 1 <= k <= n for k in parties):
        raise DimensionMismatchError(f"parties {parties} out of range 1..{n}")
    return parties


def partial_transpose(rho: Union[DensityMatrix, ComplexMatrix],
                      subset: Union[Bipartition, Iterable[int]],
                      dims: Union[LocalDims, Sequence[int], None] = None) -> ComplexMatrix:
    """Transpose the row and column indices of the parties in ``subset``.

    ``subset`` may be a :class:`Bipartition` (its side A is transposed) or any
    collection of 1-based parties, including all of them.
    """
    if isinstance(rho, DensityMatrix):
        mat, dims = rho.mat, rho.dims.dims
    else:
        if dims is None:
            raise DimensionMismatchError("raw matrices need explicit dims")
        mat, dims = np.asarray(rho, dtype=complex), _dims_tuple(dims)
    size = int(np.prod(dims, dtype=np.int64))
    if mat.shape != (size, size):
        raise DimensionMismatchError(f"matrix shape {mat.shape} does not match dims {dims}")
    n = len(dims)
    parties = _subset_parties(subset, n)

    tensor = mat.reshape(dims + dims)
    axes = list(range(2 * n))
    for k in parties:
        axes[k - 1], axes[n + k - 1] = axes[n + k - 1], axes[k - 1]
    return tensor.transpose(axes).reshape(size, size)


def hermitian_min_eigenvalue(mat: ComplexMatrix, tol_herm: float = None) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    mat = np.asarray(mat, dtype=complex)
    tol = config.TOL_HERM if tol_herm is None else tol_herm
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {mat.shape}")
    deviation = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if deviation > tol:
        raise ValidationError(f"matrix is not Hermitian (deviation {deviation:.3g})", ["hermiticity"])
    return float(np.linalg.eigvalsh(mat)[0])
