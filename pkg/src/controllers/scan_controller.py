#!/usr/bin/env python3
"""
Scan Controller for Qudit GME
=============================

Single-state detection, (alpha, beta) grid scans, threshold search and the
oracle self-check, on top of the state, criteria and optimizer controllers.

Probe policies:
- fixed:    the family's coherence pairs (see state_controller)
- basis:    computational-basis pairs ranked by |rho_ij|, up to the basis budget
- optimize: the probe optimizer, never worse than the fixed probes

Criterion III always uses the maximum over ordered level pairs, and PPT has
no probe, so the policy only affects I, II and MLIN.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import config
from controllers.criteria_controller import (
    best_criterion_III, cached_bipartitions, ppt_min_eigenvalue, ppt_report,
)
from controllers.optimizer_controller import ProbeOptimizer, evaluate_copies, threshold_bisect
from controllers.oracle_controller import fuzz_equivalence
from controllers.state_controller import build_family, default_pairs
from models.density_matrix import DensityMatrix
from models.probe import Bipartition
from models.report import Criterion, CriterionReport, OptimizerConfig
from models.scan import PROBE_POLICIES, ScanCell, ScanResult, ScanSpec
from models.state_family import StateFamily
from utils.error_handler import UsageError, ValidationError
from utils.partitions import swap_on_subset

logger = logging.getLogger(__name__)


def parse_parties(text: Union[str, Sequence[int]]) -> Tuple[int, ...]:
    if not isinstance(text, str):
        return tuple(int(k) for k in text)
    try:
        return tuple(int(item) for item in text.split(',') if item.strip())
    except ValueError:
        raise UsageError(f"--part must list party numbers like 1,3, got '{text}'")


def parse_part(text: Optional[Union[str, Sequence[int]]], n: int) -> Optional[Bipartition]:
    """Bipartition from a comma-separated party list such as ``1,3``."""
    if text is None or text == '':
        return None
    parties = parse_parties(text)
    if not parties or any(not 1 <= k <= n for k in parties):
        raise UsageError(f"--part {list(parties)} out of range 1..{n}")
    if len(set(parties)) == n:
        raise UsageError(f"--part {list(parties)} covers every party")
    return Bipartition.canonical(parties, n)


def ghz_reference_thresholds(d: int, n: int) -> Dict[str, float]:
    """Closed-form GHZ visibility thresholds for criterion II.

    ``fixed_probe`` is where |0..0>, |1..1> start detecting,
    (2^(n-1) - 1) / (d^(n-1) + 2^(n-1) - 1); ``three_party_formula`` is
    3 / (d^(n-1) + 3). Both agree at n = 3.
    """
    cuts = 2 ** (n - 1) - 1
    return {
        'fixed_probe': cuts / (d ** (n - 1) + cuts),
        'three_party_formula': 3 / (d ** (n - 1) + 3),
    }


PER_CUT = (Criterion.I, Criterion.MLIN)


def reduce_lhs(criterion: Criterion, reports: Sequence[CriterionReport]) -> float:
    """Scalar LHS of per-cut reports.

    I and MLIN take the minimum over cuts (no cut is separable); PPT and the
    single-report criteria take the maximum (some cut is NPT).
    """
    values = [r.lhs for r in reports]
    return min(values) if criterion in PER_CUT else max(values)


class ScanController:
    """Evaluates criteria on family members under a probe policy."""

    def __init__(self, optimizer_config: Optional[OptimizerConfig] = None, workers: Optional[int] = None):
        """
        Initialize the scan controller.

        Args:
            optimizer_config: Settings for the optimize and basis policies
            workers: Thread count for grids and oracle batches
        """
        self.optimizer = ProbeOptimizer(optimizer_config)
        self.workers = config.WORKERS if workers is None else workers

    # Per-criterion reports

    def _best(self, reports: List[CriterionReport]) -> CriterionReport:
        return max(reports, key=lambda r: r.lhs)

    def _fixed_copies(self, family: StateFamily, rho: DensityMatrix, criterion: Criterion,
                      part: Optional[Bipartition], m: int):
        pairs = default_pairs(family, rho)
        if not pairs:
            raise ValidationError(f"family {family.family} has no default probes", ["probes"])
        if criterion is Criterion.II:
            return [list(pair) for pair in pairs]
        copies = []
        for phi1, phi2 in pairs:
            swapped = swap_on_subset(phi1, phi2, part)
            copies.append([swapped[c % 2] for c in range(m)])
        return copies

    def probe_report(self, rho: DensityMatrix, family: StateFamily, criterion: Criterion,
                     policy: str, part: Optional[Bipartition] = None, m: int = 2) -> CriterionReport:
        """Best report of a probe-based criterion (I, II, MLIN) under a policy."""
        if policy not in PROBE_POLICIES:
            raise UsageError(f"unknown probe policy '{policy}', expected one of {PROBE_POLICIES}")
        if criterion is not Criterion.MLIN:
            m = 2
        if policy == 'basis':
            candidates = self.optimizer.basis_candidates(rho, criterion, part, m)
        else:
            candidates = self._fixed_copies(family, rho, criterion, part, m)
        best = self._best([evaluate_copies(rho, criterion, copies, part) for copies in candidates])
        if policy == 'optimize':
            optimum = self.optimizer.optimize_violation(rho, criterion, part=part, m=m)
            optimized = evaluate_copies(rho, criterion, optimum.copies, part)
            if optimized.lhs > best.lhs:
                best = optimized
        return best

    def criterion_reports(self, rho: DensityMatrix, family: StateFamily, criterion,
                          policy: str = 'fixed', part: Optional[Bipartition] = None,
                          m: int = 2) -> List[CriterionReport]:
        """
        Reports for one criterion.

        I, MLIN and PPT give one report per bipartition unless ``part`` picks
        one; II and III give a single report.

        Args:
            rho: State to test
            family: Family the state belongs to, for its default probes
            criterion: Criterion id
            policy: Probe policy
            part: Optional single cut
            m: Copies for MLIN

        Returns:
            List[CriterionReport]: The reports
        """
        criterion = Criterion.parse(criterion)
        if criterion is Criterion.II:
            return [self.probe_report(rho, family, criterion, policy)]
        if criterion is Criterion.III:
            return [best_criterion_III(rho)]
        parts = [part] if part is not None else list(cached_bipartitions(rho.n))
        if criterion is Criterion.PPT:
            return [ppt_report(rho, p) for p in parts]
        return [self.probe_report(rho, family, criterion, policy, p, m) for p in parts]

    def criterion_value(self, rho: DensityMatrix, family: StateFamily, criterion,
                        policy: str = 'fixed', part: Optional[Bipartition] = None, m: int = 2) -> float:
        """Scalar LHS of a criterion; positive means detected. See ``reduce_lhs``."""
        criterion = Criterion.parse(criterion)
        return reduce_lhs(criterion, self.criterion_reports(rho, family, criterion, policy, part, m))

    # Operations

    def load(self, family: StateFamily) -> DensityMatrix:
        rho = build_family(family)
        logger.info(f"Loaded {family.family}: {rho!r}")
        return rho

    def detect(self, family: StateFamily, criteria: Sequence, policy: str = 'fixed',
               part: Optional[Bipartition] = None, m: int = 2) -> List[CriterionReport]:
        """One report per requested criterion, per bipartition for I, MLIN and PPT."""
        rho = self.load(family)
        reports = []
        for criterion in criteria:
            reports.extend(self.criterion_reports(rho, family, criterion, policy, part, m))
        for report in reports:
            logger.info(f"{report.label}: lhs={report.lhs:.9g} violated={report.violated}")
        return reports

    def _scan_cell(self, spec: ScanSpec, part: Optional[Bipartition], point: Tuple[float, float]) -> ScanCell:
        alpha, beta = point
        family = spec.family.with_param('alpha', alpha).with_param('beta', beta)
        rho = build_family(family)
        cell = ScanCell(alpha, beta)
        for criterion in spec.criteria:
            reports = self.criterion_reports(rho, family, criterion, spec.policy, part, spec.m)
            value = reduce_lhs(criterion, reports)
            if criterion in PER_CUT:
                cell.cut_lhs[criterion.value] = {r.partition: r.lhs for r in reports}
            cell.lhs[criterion.value] = value
            cell.violated[criterion.value] = value > config.DECISION_TOL
        for cut in cached_bipartitions(rho.n):
            cell.ppt_min_eigenvalues[cut.label] = ppt_min_eigenvalue(rho, cut)
        return cell

    def scan(self, spec: ScanSpec) -> ScanResult:
        """
        Evaluate every valid grid cell of a scan.

        Args:
            spec: Family, axes, criteria and policy

        Returns:
            ScanResult: Cells in row-major order over alpha then beta
        """
        points = spec.cells()
        part = parse_part(spec.part, build_family(spec.family).n) if spec.part else None
        workers = self.workers if spec.workers is None else spec.workers
        logger.info(f"Scanning {spec.family.family}: {len(points)} cells, "
                    f"criteria {[c.value for c in spec.criteria]}, policy {spec.policy}, {workers} workers")

        def run(point):
            return self._scan_cell(spec, part, point)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                cells = list(pool.map(run, points))
        else:
            cells = [run(point) for point in points]
        for value in (v for cell in cells for v in cell.lhs.values()):
            if not np.isfinite(value):
                raise ValidationError(f"non-finite lhs {value} in scan", ["finite"])
        result = ScanResult(spec, cells)
        for criterion in spec.criteria:
            hits = result.violated_cells(criterion.value)
            logger.info(f"{criterion.value} violated in {len(hits)} of {len(cells)} cells")
        return result

    def threshold(self, family: StateFamily, param: str, lo: float, hi: float, criterion,
                  policy: str = 'fixed', tol: float = 1e-6, part: Optional[Union[str, Sequence[int]]] = None,
                  m: int = 2) -> float:
        """Boundary of detection along ``param`` within [lo, hi]."""
        criterion = Criterion.parse(criterion)
        cut = parse_part(part, build_family(family).n) if part else None

        def value_of(member: StateFamily) -> float:
            return self.criterion_value(build_family(member), member, criterion, policy, cut, m)

        return threshold_bisect(family, param, lo, hi, value_of, tol=tol)

    def oracle_check(self, n: int, d: int, m: int, trials: int, seed: int) -> Dict[str, object]:
        """Max |naive - reduced| over random trials; ``passed`` is False above 1e-10."""
        summary = fuzz_equivalence(n, d, m, trials, seed, workers=self.workers)
        if not summary['passed']:
            logger.error(f"Oracle check failed: max deviation {summary['max_deviation']:.3e}")
        return summary
