#!/usr/bin/env python3
"""
Criteria Controller for Qudit GME
=================================

Reduced-form evaluators. Each returns a CriterionReport whose signed ``lhs``
is <= 0 for every state the criterion cannot rule out; ``lhs > decision_tol``
certifies entanglement:

- I:    bilinear bipartite criterion for one cut
- MLIN: m-linear bipartite criterion for one cut (I is the m=2 case)
- II:   genuine multipartite criterion over all cuts
- III:  tailored multipartite criterion from the |x..xyx..x> probe family
- PPT:  negative partial transpose across one cut (comparator)

No evaluator forms rho^(x)m; every term is a single-copy matrix element.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.density_matrix import DensityMatrix
from models.probe import Bipartition, ProductVector, combine_halves
from models.report import Criterion, CriterionReport
from utils.error_handler import DimensionMismatchError, ValidationError
from utils.partitions import enumerate_bipartitions, swap_on_subset
from utils.tensor_core import hermitian_min_eigenvalue, partial_transpose, product_matrix_element

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def cached_bipartitions(n: int) -> Tuple[Bipartition, ...]:
    return tuple(enumerate_bipartitions(n))


def _diagonal(rho: DensityMatrix, vec: ProductVector) -> float:
    # Clip the rounding noise of a PSD diagonal element.
    return max(product_matrix_element(rho, vec, vec).real, 0.0)


def _check_probe(rho: DensityMatrix, *vectors: ProductVector) -> None:
    for vec in vectors:
        if vec.dims != rho.dims.dims:
            raise DimensionMismatchError(f"probe dims {vec.dims} do not match state dims {rho.dims.dims}")


def _check_part(rho: DensityMatrix, part: Bipartition) -> None:
    if part.n != rho.n:
        raise DimensionMismatchError(f"{part.label} does not fit a {rho.n}-party state")


def criterion_I_lhs(rho: DensityMatrix, part: Bipartition,
                    phi1: ProductVector, phi2: ProductVector) -> CriterionReport:
    """|<t1|rho|t2>| - sqrt(<phi1|rho|phi1><phi2|rho|phi2>), (t1, t2) = side-A swap of (phi1, phi2)."""
    _check_probe(rho, phi1, phi2)
    _check_part(rho, part)
    t1, t2 = swap_on_subset(phi1, phi2, part)
    off = abs(product_matrix_element(rho, t1, t2))
    d1, d2 = _diagonal(rho, phi1), _diagonal(rho, phi2)
    return CriterionReport.build(
        Criterion.I, off, np.sqrt(d1 * d2),
        details={'off_diagonal': off, 'diag1': d1, 'diag2': d2},
        probe={'phi1': phi1.describe(), 'phi2': phi2.describe(),
               'swapped1': t1.describe(), 'swapped2': t2.describe()},
        partition=part.label,
    )


def m_linear_lhs(rho: DensityMatrix, part: Bipartition,
                 alphas: Sequence[ProductVector], betas: Sequence[ProductVector]) -> CriterionReport:
    """sqrt|Re prod_i <a_i b_{i+1}|rho|a_{i+1} b_i>| - sqrt(prod_i <a_i b_i|rho|a_i b_i>), i cyclic mod m.

    ``alphas`` are factors on side A of ``part``, ``betas`` on side B.
    """
    _check_part(rho, part)
    m = len(alphas)
    if m < 2 or len(betas) != m:
        raise ValidationError(f"m-linear form needs m >= 2 matching halves, got {len(alphas)}/{len(betas)}",
                              ["copies"])
    product = 1.0 + 0.0j
    factors = []
    diagonals = []
    for i in range(m):
        nxt = (i + 1) % m
        bra = combine_halves(part, alphas[i], betas[nxt])
        ket = combine_halves(part, alphas[nxt], betas[i])
        _check_probe(rho, bra, ket)
        element = product_matrix_element(rho, bra, ket)
        factors.append(element)
        product *= element
        diagonals.append(_diagonal(rho, combine_halves(part, alphas[i], betas[i])))
    positive = float(np.sqrt(abs(product.real)))
    negative = float(np.sqrt(np.prod(diagonals)))
    return CriterionReport.build(
        Criterion.MLIN, positive, negative,
        details={'m': m, 'cyclic_product_re': product.real, 'cyclic_product_im': product.imag,
                 'diagonals': diagonals},
        probe={'alphas': [a.describe() for a in alphas], 'betas': [b.describe() for b in betas]},
        partition=part.label,
    )


def m_linear_lhs_from_copies(rho: DensityMatrix, part: Bipartition,
                             copies: Sequence[ProductVector]) -> CriterionReport:
    """m-linear form where copy i supplies alpha_i on side A and beta_i on side B."""
    _check_probe(rho, *copies)
    alphas = [c.restricted(part.subset_a) for c in copies]
    betas = [c.restricted(part.complement) for c in copies]
    return m_linear_lhs(rho, part, alphas, betas)


def criterion_II_lhs(rho: DensityMatrix, phi1: ProductVector, phi2: ProductVector,
                     parts: Optional[Sequence[Bipartition]] = None) -> CriterionReport:
    """|<phi1|rho|phi2>| - sum over all cuts of sqrt(<t1|rho|t1><t2|rho|t2>)."""
    _check_probe(rho, phi1, phi2)
    if rho.n < 2:
        raise ValidationError("criterion II needs at least two parties", ["n"])
    parts = cached_bipartitions(rho.n) if parts is None else parts
    x = abs(product_matrix_element(rho, phi1, phi2))
    k_terms = {}
    total = 0.0
    for part in parts:
        t1, t2 = swap_on_subset(phi1, phi2, part)
        k = float(np.sqrt(_diagonal(rho, t1) * _diagonal(rho, t2)))
        k_terms[part.label] = k
        total += k
    return CriterionReport.build(
        Criterion.II, x, total,
        details={'x': x, 'K': k_terms},
        probe={'phi1': phi1.describe(), 'phi2': phi2.describe()},
    )


def _unit_local(vec: Sequence[complex], d: int, name: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.size != d:
        raise DimensionMismatchError(f"|{name}> has dimension {vec.size}, expected {d}")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValidationError(f"|{name}> is zero", ["norm"])
    return vec / norm


def criterion_III_lhs_vectors(rho: DensityMatrix, x_vec: Sequence[complex],
                              y_vec: Sequence[complex]) -> CriterionReport:
    """sum_{i!=j} x_ij - (n-2) * (sum_{i!=j} y_ij + sum_i y_ii) for arbitrary local |x>, |y>."""
    n = rho.n
    if n < 3:
        raise ValidationError(f"criterion III needs n >= 3, got {n}", ["n"])
    if not rho.dims.is_uniform():
        raise ValidationError(f"criterion III needs a uniform local dimension, got {rho.dims.dims}", ["dims"])
    d = rho.dims[0]
    x_local = _unit_local(x_vec, d, 'x')
    y_local = _unit_local(y_vec, d, 'y')

    def probe(y_slots):
        return ProductVector([y_local if k in y_slots else x_local for k in range(n)], normalize=True)

    all_x = probe(())
    singles = [probe((i,)) for i in range(n)]
    vacuum = _diagonal(rho, all_x)

    x_mat = np.zeros((n, n))
    y_mat = np.zeros((n, n))
    for i in range(n):
        y_mat[i, i] = _diagonal(rho, singles[i])
        for j in range(n):
            if i == j:
                continue
            x_mat[i, j] = abs(product_matrix_element(rho, singles[i], singles[j]))
            if j > i:
                y_mat[i, j] = y_mat[j, i] = np.sqrt(vacuum * _diagonal(rho, probe((i, j))))

    off = ~np.eye(n, dtype=bool)
    positive = float(x_mat[off].sum())
    sum_y_off = float(y_mat[off].sum())
    sum_y_diag = float(np.trace(y_mat))
    negative = (n - 2) * (sum_y_off + sum_y_diag)
    return CriterionReport.build(
        Criterion.III, positive, negative,
        details={'x_ij': x_mat.tolist(), 'y_ij': y_mat.tolist(), 'sum_x': positive,
                 'sum_y_offdiag': sum_y_off, 'sum_y_diag': sum_y_diag, 'n_minus_2': n - 2},
        probe={'x': all_x.describe(), 's_1': singles[0].describe()},
    )


def criterion_III_lhs(rho: DensityMatrix, x_level: int, y_level: int) -> CriterionReport:
    """Criterion III with computational-basis levels for |x> and |y>."""
    if rho.n < 3:
        raise ValidationError(f"criterion III needs n >= 3, got {rho.n}", ["n"])
    d = min(rho.dims)
    if x_level == y_level or not (0 <= x_level < d and 0 <= y_level < d):
        raise ValidationError(f"need distinct levels below {d}, got x={x_level}, y={y_level}", ["levels"])
    x_vec = np.zeros(d, dtype=complex)
    y_vec = np.zeros(d, dtype=complex)
    x_vec[x_level] = 1.0
    y_vec[y_level] = 1.0
    report = criterion_III_lhs_vectors(rho, x_vec, y_vec)
    report.probe.update({'x_level': x_level, 'y_level': y_level})
    return report


def level_pairs(d: int) -> List[Tuple[int, int]]:
    """All ordered (x, y) level pairs with x != y."""
    return [(x, y) for x in range(d) for y in range(d) if x != y]


def best_criterion_III(rho: DensityMatrix) -> CriterionReport:
    """Criterion III maximized over all ordered level pairs."""
    reports = [criterion_III_lhs(rho, x, y) for x, y in level_pairs(min(rho.dims))]
    return max(reports, key=lambda r: r.lhs)


def ppt_min_eigenvalue(rho: DensityMatrix, part: Bipartition) -> float:
    """Minimum eigenvalue of the partial transpose over side A of ``part``."""
    _check_part(rho, part)
    return hermitian_min_eigenvalue(partial_transpose(rho, part))


def ppt_report(rho: DensityMatrix, part: Bipartition) -> CriterionReport:
    """PPT comparator as a report: lhs = -lambda_min, so lhs > 0 means NPT."""
    lam = ppt_min_eigenvalue(rho, part)
    return CriterionReport.build(
        Criterion.PPT, 0.0, lam,
        details={'min_eigenvalue': lam},
        partition=part.label,
    )
