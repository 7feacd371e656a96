"""
Models for probe vectors and bipartitions.

A probe is a fully separable vector: one normalized local vector per party.
A bipartition is stored by its canonical side A, the side containing party 1.
"""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import config
from utils.error_handler import DimensionMismatchError, ValidationError


def _local_support(vec: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    nz = np.flatnonzero(vec)
    return nz, vec[nz]


class ProductVector:
    """Product of normalized local complex vectors, party 1 first."""

    __slots__ = ('_locals', '_supports', '_support', '_full')

    def __init__(self, locals_: Sequence[Sequence[complex]], normalize: bool = False):
        vectors = []
        for k, vec in enumerate(locals_, start=1):
            vec = np.array(vec, dtype=complex).reshape(-1)
            if vec.size < 2:
                raise ValidationError(f"local vector {k} must have dimension >= 2", ["dims"])
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                raise ValidationError(f"local vector {k} is zero", ["norm"])
            if normalize:
                vec = vec / norm
            elif abs(norm - 1.0) > config.TOL_NORM:
                raise ValidationError(f"local vector {k} has norm {norm:.12g}, expected 1", ["norm"])
            vec.setflags(write=False)
            vectors.append(vec)
        if not vectors:
            raise ValidationError("a product vector needs at least one party", ["dims"])
        self._locals = tuple(vectors)
        self._supports = tuple(_local_support(v) for v in vectors)
        self._support = None
        self._full = None

    @classmethod
    def _trusted(cls, locals_: Tuple[np.ndarray, ...],
                 supports: Tuple[Tuple[np.ndarray, np.ndarray], ...]) -> 'ProductVector':
        """Assemble from already validated locals, skipping the norm checks."""
        obj = cls.__new__(cls)
        obj._locals = locals_
        obj._supports = supports
        obj._support = None
        obj._full = None
        return obj

    @classmethod
    def basis(cls, dims: Sequence[int], levels: Sequence[int]) -> 'ProductVector':
        """Computational basis product state |levels[0] levels[1] ...>."""
        dims = tuple(dims)
        if len(dims) != len(levels):
            raise DimensionMismatchError(f"{len(levels)} levels given for {len(dims)} parties")
        vectors = []
        for d, level in zip(dims, levels):
            if not 0 <= level < d:
                raise IndexError(f"level {level} out of range for local dimension {d}")
            vec = np.zeros(d, dtype=complex)
            vec[level] = 1.0
            vectors.append(vec)
        return cls(vectors)

    @property
    def locals(self) -> Tuple[np.ndarray, ...]:
        return self._locals

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(v.size for v in self._locals)

    @property
    def n(self) -> int:
        return len(self._locals)

    def local_support(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """Non-zero indices and amplitudes of the local vector of 0-based party k."""
        return self._supports[k]

    def support(self) -> Tuple[np.ndarray, np.ndarray]:
        """Non-zero flat indices and amplitudes of the full tensor product."""
        if self._support is None:
            if all(nz.size == 1 for nz, _ in self._supports):
                index, amp = 0, 1.0 + 0.0j
                for (nz, vals), d in zip(self._supports, self.dims):
                    index = index * d + int(nz[0])
                    amp *= complex(vals[0])
                self._support = (np.array([index]), np.array([amp]))
            else:
                index = np.zeros(1, dtype=np.int64)
                amp = np.ones(1, dtype=complex)
                for (nz, vals), d in zip(self._supports, self.dims):
                    index = (index[:, None] * d + nz[None, :]).reshape(-1)
                    amp = (amp[:, None] * vals[None, :]).reshape(-1)
                self._support = (index, amp)
        return self._support

    def full(self) -> np.ndarray:
        """Dense vector of length prod(dims)."""
        if self._full is None:
            index, amp = self.support()
            vec = np.zeros(int(np.prod(self.dims)), dtype=complex)
            vec[index] = amp
            vec.setflags(write=False)
            self._full = vec
        return self._full

    def restricted(self, parties: Iterable[int]) -> 'ProductVector':
        """Factor on the given 1-based parties, in party order."""
        chosen = sorted(parties)
        return ProductVector._trusted(
            tuple(self._locals[k - 1] for k in chosen),
            tuple(self._supports[k - 1] for k in chosen),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': list(self.dims),
            'locals': [
                {'re': [float(x) for x in v.real], 'im': [float(x) for x in v.imag]}
                for v in self._locals
            ],
        }

    def describe(self) -> str:
        """Short ket label, e.g. |0 1 1>, or a generic tag for non-basis probes."""
        labels = []
        for nz, vals in self._supports:
            if nz.size == 1 and abs(abs(vals[0]) - 1.0) < config.TOL_NORM:
                labels.append(str(int(nz[0])))
            else:
                labels.append('*')
        return '|' + ' '.join(labels) + '>'

    def __repr__(self):
        return f"<ProductVector{self.describe()} dims={self.dims}>"


def combine_halves(part: 'Bipartition', alpha: ProductVector, beta: ProductVector) -> ProductVector:
    """Interleave an A-side factor and a B-side factor into party order."""
    side_a = part.subset_a
    side_b = part.complement
    if alpha.n != len(side_a) or beta.n != len(side_b):
        raise DimensionMismatchError(
            f"halves of sizes ({alpha.n}, {beta.n}) do not fit {part.label}"
        )
    slots: List[Optional[int]] = [None] * part.n
    source = {}
    for pos, k in enumerate(side_a):
        source[k] = (alpha, pos)
    for pos, k in enumerate(side_b):
        source[k] = (beta, pos)
    locals_, supports = [], []
    for k in range(1, part.n + 1):
        vec, pos = source[k]
        locals_.append(vec.locals[pos])
        supports.append(vec.local_support(pos))
    return ProductVector._trusted(tuple(locals_), tuple(supports))


class Bipartition:
    """Canonical split A|B of parties 1..n with party 1 in A."""

    __slots__ = ('_subset_a', '_n')

    def __init__(self, subset_a: Iterable[int], n: int):
        subset = tuple(sorted(set(int(k) for k in subset_a)))
        if n < 2:
            raise ValidationError("a bipartition needs at least two parties", ["n"])
        if not subset:
            raise ValidationError("side A of a bipartition must be non-empty", ["subset"])
        if subset[0] < 1 or subset[-1] > n:
            raise ValidationError(f"parties {subset} out of range 1..{n}", ["subset"])
        if len(subset) == n:
            raise ValidationError("side B of a bipartition must be non-empty", ["subset"])
        if subset[0] != 1:
            raise ValidationError(f"canonical side A must contain party 1, got {subset}", ["canonical"])
        self._subset_a = subset
        self._n = n

    @classmethod
    def canonical(cls, subset: Iterable[int], n: int) -> 'Bipartition':
        """Bipartition from either side, flipped so that A contains party 1."""
        subset = set(int(k) for k in subset)
        if 1 not in subset:
            subset = set(range(1, n + 1)) - subset
        return cls(subset, n)

    @property
    def subset_a(self) -> Tuple[int, ...]:
        return self._subset_a

    @property
    def complement(self) -> Tuple[int, ...]:
        side_a = set(self._subset_a)
        return tuple(k for k in range(1, self._n + 1) if k not in side_a)

    @property
    def n(self) -> int:
        return self._n

    @property
    def label(self) -> str:
        a = ','.join(str(k) for k in self._subset_a)
        b = ','.join(str(k) for k in self.complement)
        return f"A={{{a}}}|B={{{b}}}"

    def __iter__(self):
        return iter(self._subset_a)

    def __contains__(self, party: int) -> bool:
        return party in self._subset_a

    def __eq__(self, other):
        return isinstance(other, Bipartition) and (self._subset_a, self._n) == (other._subset_a, other._n)

    def __hash__(self):
        return hash((self._subset_a, self._n))

    def __repr__(self):
        return f"<Bipartition {self.label}>"
