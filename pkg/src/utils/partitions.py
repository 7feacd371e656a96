"""
Bipartition enumeration and the probe swap that realizes the partial
permutation operators on two copies.
"""
import logging
from itertools import combinations
from typing import List, Tuple

from config import config
from models.probe import Bipartition, ProductVector
from utils.error_handler import CapacityError, DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)


def enumerate_bipartitions(n: int) -> List[Bipartition]:
    """All 2^(n-1)-1 canonical bipartitions, ordered by |A| then lexicographically."""
    if n < 2:
        raise ValidationError(f"bipartitions need n >= 2, got {n}", ["n"])
    if n > config.MAX_PARTIES:
        raise CapacityError(f"enumerating bipartitions of {n} parties exceeds cap {config.MAX_PARTIES}")
    parts = []
    others = range(2, n + 1)
    for size in range(1, n):
        for rest in combinations(others, size - 1):
            parts.append(Bipartition((1,) + rest, n))
    return parts


def swap_on_subset(phi1: ProductVector, phi2: ProductVector,
                   part: Bipartition) -> Tuple[ProductVector, ProductVector]:
    """Exchange the side-A local vectors of the two copies; side B is untouched."""
    if phi1.dims != phi2.dims:
        raise DimensionMismatchError(f"probe dims differ: {phi1.dims} vs {phi2.dims}")
    if part.n != phi1.n:
        raise DimensionMismatchError(f"{part.label} does not fit a {phi1.n}-party probe")
    side_a = set(part.subset_a)
    locals1, locals2, sup1, sup2 = [], [], [], []
    for k in range(phi1.n):
        src1, src2 = (phi2, phi1) if (k + 1) in side_a else (phi1, phi2)
        locals1.append(src1.locals[k])
        sup1.append(src1.local_support(k))
        locals2.append(src2.locals[k])
        sup2.append(src2.local_support(k))
    return (ProductVector._trusted(tuple(locals1), tuple(sup1)),
            ProductVector._trusted(tuple(locals2), tuple(sup2)))
