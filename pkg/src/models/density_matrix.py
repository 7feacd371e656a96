"""
Models for density matrices and their local dimensions.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from config import config
from utils.error_handler import CapacityError, ValidationError

# Row-major complex matrix; party 1 is the most significant digit.
ComplexMatrix = np.ndarray


@dataclass(frozen=True)
class LocalDims:
    """Local Hilbert-space dimensions d_1..d_n."""

    dims: tuple

    def __post_init__(self):
        try:
            dims = tuple(int(d) for d in self.dims)
        except (TypeError, ValueError):
            raise ValidationError(f"local dimensions must be integers, got {self.dims!r}", ["dims"])
        object.__setattr__(self, 'dims', dims)
        if len(dims) == 0:
            raise ValidationError("at least one party is required", ["dims"])
        if any(d < 2 for d in dims):
            raise ValidationError(f"local dimensions must be >= 2, got {dims}", ["dims"])
        if self.total > config.MAX_DIMENSION:
            raise CapacityError(
                f"total dimension {self.total} exceeds cap {config.MAX_DIMENSION}"
            )

    @classmethod
    def uniform(cls, d: int, n: int) -> 'LocalDims':
        return cls(tuple([d] * n))

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def is_uniform(self) -> bool:
        return len(set(self.dims)) == 1

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)

    def __getitem__(self, item):
        return self.dims[item]

    def __repr__(self):
        return f"<LocalDims{self.dims}>"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking the density-matrix invariants."""

    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    tol_herm: float = field(default=config.TOL_HERM)
    tol_trace: float = field(default=config.TOL_TRACE)
    tol_psd: float = field(default=config.TOL_PSD)

    @classmethod
    def of(cls, mat: ComplexMatrix) -> 'ValidationReport':
        herm = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        trace = float(abs(np.trace(mat) - 1.0))
        # Symmetrize so eigvalsh sees a Hermitian input even when the check fails.
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0])
        return cls(herm, trace, min_eig)

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_deviation <= self.tol_herm

    @property
    def unit_trace(self) -> bool:
        return self.trace_deviation <= self.tol_trace

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue >= -self.tol_psd

    @property
    def passed(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive

    @property
    def failures(self) -> List[str]:
        failed = []
        if not self.hermitian:
            failed.append('hermiticity')
        if not self.unit_trace:
            failed.append('trace')
        if not self.positive:
            failed.append('positivity')
        return failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'hermiticity_deviation': self.hermiticity_deviation,
            'trace_deviation': self.trace_deviation,
            'min_eigenvalue': self.min_eigenvalue,
            'passed': self.passed,
            'failures': self.failures,
        }


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense density matrix together with its local dimensions."""

    dims: LocalDims
    mat: ComplexMatrix

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        size = self.dims.total
        if mat.shape != (size, size):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match dims {self.dims.dims} (D={size})",
                ["shape"],
            )
        mat.setflags(write=False)
        object.__setattr__(self, 'mat', mat)

    @classmethod
    def from_matrix(cls, mat: Union[ComplexMatrix, Sequence], dims: Union[LocalDims, Sequence[int]],
                    validate: bool = True) -> 'DensityMatrix':
        """Build a density matrix, checking the invariants unless told not to."""
        if not isinstance(dims, LocalDims):
            dims = LocalDims(tuple(dims))
        rho = cls(dims, np.asarray(mat, dtype=complex))
        if validate:
            report = rho.validation_report()
            if not report.passed:
                raise ValidationError(
                    f"density matrix failed checks: {', '.join(report.failures)} "
                    f"(herm={report.hermiticity_deviation:.3g}, "
                    f"trace={report.trace_deviation:.3g}, "
                    f"min_eig={report.min_eigenvalue:.3g})",
                    report.failures,
                )
        return rho

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def size(self) -> int:
        return self.dims.total

    def validation_report(self) -> ValidationReport:
        return ValidationReport.of(self.mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def to_json_dict(self) -> Dict[str, Any]:
        flat = self.mat.reshape(-1)
        return {
            'dims': list(self.dims.dims),
            're': [float(v) for v in flat.real],
            'im': [float(v) for v in flat.imag],
        }

    @classmethod
    def from_json_dict(cls, payload: Dict[str, Any], validate: bool = True) -> 'DensityMatrix':
        missing = [key for key in ('dims', 're', 'im') if key not in payload]
        if missing:
            raise ValidationError(f"state file is missing fields: {', '.join(missing)}", missing)
        if not isinstance(payload['dims'], list):
            raise ValidationError(f"dims must be a list, got {payload['dims']!r}", ["dims"])
        dims = LocalDims(tuple(payload['dims']))
        size = dims.total
        try:
            re = np.asarray(payload['re'], dtype=float)
            im = np.asarray(payload['im'], dtype=float)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"matrix entries must be numbers: {e}", ["entries"])
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise ValidationError("matrix entries must be finite numbers", ["entries"])
        if re.size != size * size or im.size != size * size:
            raise ValidationError(
                f"expected {size * size} entries for dims {dims.dims}, got re={re.size}, im={im.size}",
                ["length"],
            )
        mat = (re + 1j * im).reshape(size, size)
        return cls.from_matrix(mat, dims, validate=validate)

    def __repr__(self):
        return f"<DensityMatrix(dims={self.dims.dims}, D={self.size})>"


def load_density_matrix(path: Union[str, Path], validate: bool = True) -> DensityMatrix:
    """Read a density matrix from the JSON state format."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            payload = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"state file not found: {path}", ["file"])
    except json.JSONDecodeError as e:
        raise ValidationError(f"state file is not valid JSON: {e}", ["json"])
    return DensityMatrix.from_json_dict(payload, validate=validate)


def save_density_matrix(rho: DensityMatrix, path: Union[str, Path]) -> Path:
    """Write a density matrix in the JSON state format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(rho.to_json_dict(), f)
    return path
