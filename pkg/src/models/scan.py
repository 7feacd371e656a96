"""
Models for (alpha, beta) grid scans.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from config import config
from models.report import Criterion, OptimizerConfig
from models.state_family import StateFamily
from utils.error_handler import CapacityError, UsageError

PROBE_POLICIES = ('fixed', 'basis', 'optimize')
AXIS_DIGITS = 12


@dataclass(frozen=True)
class AxisSpec:
    """Inclusive arithmetic axis start, start+step, ..., <= stop."""

    param: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise UsageError(f"axis {self.param} needs a positive step, got {self.step}")
        if self.stop < self.start:
            raise UsageError(f"axis {self.param} has stop {self.stop} below start {self.start}")

    @classmethod
    def parse(cls, param: str, text: str) -> 'AxisSpec':
        """Parse ``start:stop:step``."""
        try:
            start, stop, step = (float(part) for part in text.split(':'))
        except ValueError:
            raise UsageError(f"axis {param} must look like start:stop:step, got '{text}'")
        return cls(param, start, stop, step)

    def __len__(self):
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def values(self) -> List[float]:
        return [round(self.start + i * self.step, AXIS_DIGITS) for i in range(len(self))]


def parse_grid(text: str) -> Tuple[AxisSpec, AxisSpec]:
    """Parse ``a0:a1:step,b0:b1:step`` into the alpha and beta axes."""
    pieces = text.split(',')
    if len(pieces) != 2:
        raise UsageError(f"grid must look like a0:a1:step,b0:b1:step, got '{text}'")
    return AxisSpec.parse('alpha', pieces[0]), AxisSpec.parse('beta', pieces[1])


@dataclass(frozen=True)
class ScanSpec:
    """Family, grid, criteria and probe policy of one scan."""

    family: StateFamily
    alpha_axis: AxisSpec
    beta_axis: AxisSpec
    criteria: Tuple[Criterion, ...] = (Criterion.II, Criterion.III)
    policy: str = 'fixed'
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    part: Optional[Tuple[int, ...]] = None
    m: int = 2
    workers: Optional[int] = None

    def __post_init__(self):
        if self.policy not in PROBE_POLICIES:
            raise UsageError(f"unknown probe policy '{self.policy}', expected one of {PROBE_POLICIES}")
        if not self.criteria:
            raise UsageError("a scan needs at least one criterion")
        object.__setattr__(self, 'criteria', tuple(Criterion.parse(c) for c in self.criteria))
        cells = len(self.alpha_axis) * len(self.beta_axis)
        if cells > config.MAX_GRID_CELLS:
            raise CapacityError(f"grid of {cells} cells exceeds cap {config.MAX_GRID_CELLS}")

    def cells(self) -> List[Tuple[float, float]]:
        """Valid grid points (alpha + beta <= 1), row-major over alpha then beta."""
        return [(a, b) for a in self.alpha_axis.values() for b in self.beta_axis.values()
                if a + b <= 1.0 + 1e-12]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family.to_dict(),
            'alpha': [self.alpha_axis.start, self.alpha_axis.stop, self.alpha_axis.step],
            'beta': [self.beta_axis.start, self.beta_axis.stop, self.beta_axis.step],
            'criteria': [c.value for c in self.criteria],
            'policy': self.policy,
            'part': list(self.part) if self.part else None,
            'm': self.m,
        }


@dataclass
class ScanCell:
    """Per-criterion results at one grid point."""

    alpha: float
    beta: float
    lhs: Dict[str, float] = field(default_factory=dict)
    violated: Dict[str, bool] = field(default_factory=dict)
    ppt_min_eigenvalues: Dict[str, float] = field(default_factory=dict)
    # criterion -> cut label -> lhs, for the per-cut criteria I and MLIN
    cut_lhs: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'criteria': {name: {'lhs': self.lhs[name], 'violated': self.violated[name]}
                         for name in self.lhs},
            'ppt_min_eigenvalues': dict(self.ppt_min_eigenvalues),
            'cut_lhs': {name: dict(cuts) for name, cuts in self.cut_lhs.items()},
        }


@dataclass
class ScanResult:
    """All evaluated cells of a scan, in grid order."""

    spec: ScanSpec
    cells: List[ScanCell]

    def rows(self) -> List[Tuple[float, float, str, float, bool]]:
        """Flat (alpha, beta, crit, lhs, violated) records, one per cell per criterion."""
        return [(cell.alpha, cell.beta, name, cell.lhs[name], cell.violated[name])
                for cell in self.cells for name in cell.lhs]

    def violated_cells(self, criterion: str, cut: Optional[str] = None) -> List[Tuple[float, float]]:
        """Grid points where ``criterion`` fires, on one cut when ``cut`` names a bipartition label."""
        if cut is None:
            return [(cell.alpha, cell.beta) for cell in self.cells if cell.violated.get(criterion)]
        return [(cell.alpha, cell.beta) for cell in self.cells
                if cell.cut_lhs.get(criterion, {}).get(cut, -math.inf) > config.DECISION_TOL]

    def cell(self, alpha: float, beta: float) -> ScanCell:
        for cell in self.cells:
            if abs(cell.alpha - alpha) < 1e-9 and abs(cell.beta - beta) < 1e-9:
                return cell
        raise KeyError(f"no cell at ({alpha}, {beta})")

    def to_dict(self) -> Dict[str, Any]:
        return {'spec': self.spec.to_dict(), 'cells': [cell.to_dict() for cell in self.cells]}

    def __len__(self):
        return len(self.cells)
