"""
Models for criterion reports and optimizer results.
"""
import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from config import config
from models.probe import ProductVector
from utils.error_handler import UsageError


class Criterion(enum.Enum):
    """Criterion identifiers."""
    I = "I"
    II = "II"
    III = "III"
    MLIN = "MLIN"
    PPT = "PPT"

    @classmethod
    def parse(cls, value) -> 'Criterion':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise UsageError(f"unknown criterion '{value}', expected one of {[c.value for c in cls]}")


@dataclass
class CriterionReport:
    """Signed left-hand side of one criterion evaluation.

    ``terms`` always holds ``positive`` and ``negative`` with
    ``lhs = positive - negative``; the remaining keys break the two down.
    """

    criterion: Criterion
    lhs: float
    violated: bool
    terms: Dict[str, Any]
    probe: Dict[str, Any] = field(default_factory=dict)
    partition: Optional[str] = None

    @classmethod
    def build(cls, criterion: Criterion, positive: float, negative: float,
              details: Optional[Dict[str, Any]] = None, probe: Optional[Dict[str, Any]] = None,
              partition: Optional[str] = None, decision_tol: Optional[float] = None) -> 'CriterionReport':
        tol = config.DECISION_TOL if decision_tol is None else decision_tol
        lhs = float(positive) - float(negative)
        terms = {'positive': float(positive), 'negative': float(negative)}
        terms.update(details or {})
        return cls(criterion, lhs, lhs > tol, terms, probe or {}, partition)

    def recombined(self) -> float:
        return self.terms['positive'] - self.terms['negative']

    @property
    def label(self) -> str:
        return self.criterion.value if self.partition is None else f"{self.criterion.value}:{self.partition}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'criterion': self.criterion.value,
            'lhs': self.lhs,
            'violated': self.violated,
            'terms': self.terms,
            'probe': self.probe,
            'partition': self.partition,
        }

    def __repr__(self):
        return f"<CriterionReport({self.label}, lhs={self.lhs:.6g}, violated={self.violated})>"


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of the probe hill climber."""

    restarts: int = config.OPT_RESTARTS
    iterations: int = config.OPT_ITERATIONS
    initial_step: float = config.OPT_STEP
    decay: float = config.OPT_DECAY
    tol: float = config.OPT_TOL
    seed: int = config.OPT_SEED
    basis_budget: int = config.OPT_BASIS_BUDGET
    basis_seeds: int = config.OPT_BASIS_SEEDS
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError(f"restarts must be >= 1, got {self.restarts}")
        if not 0 < self.decay < 1:
            raise UsageError(f"decay must lie in (0, 1), got {self.decay}")
        if self.iterations < 0 or self.initial_step <= 0:
            raise UsageError("iterations must be >= 0 and the initial step positive")


@dataclass
class Optimum:
    """Best probe found by the optimizer."""

    copies: List[ProductVector]
    lhs: float
    restart: int
    iterations: int
    criterion: Criterion
    partition: Optional[str] = None
    history: List[float] = field(default_factory=list)

    @property
    def phi1(self) -> ProductVector:
        return self.copies[0]

    @property
    def phi2(self) -> ProductVector:
        return self.copies[1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'criterion': self.criterion.value,
            'partition': self.partition,
            'lhs': self.lhs,
            'restart': self.restart,
            'iterations': self.iterations,
            'history': list(self.history),
            'copies': [copy.to_dict() for copy in self.copies],
        }
