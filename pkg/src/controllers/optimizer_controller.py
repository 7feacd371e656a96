#!/usr/bin/env python3
"""
Optimizer Controller for Qudit GME
==================================

Heuristic search for product probes that maximize a criterion LHS, and
bisection of detection thresholds along one family parameter.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config import config
from controllers.criteria_controller import (
    cached_bipartitions, criterion_I_lhs, criterion_II_lhs, m_linear_lhs_from_copies,
)
from models.density_matrix import DensityMatrix
from models.probe import Bipartition, ProductVector
from models.report import Criterion, CriterionReport, OptimizerConfig, Optimum
from models.state_family import StateFamily
from utils.error_handler import BracketError, UsageError
from utils.partitions import swap_on_subset
from utils.tensor_core import multi_index

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-12
OPTIMIZABLE = (Criterion.I, Criterion.II, Criterion.MLIN)
# Complex entries of the largest intermediate per evaluated chunk.
KERNEL_MAX_ENTRIES = 1 << 21


def evaluate_copies(rho: DensityMatrix, criterion: Criterion, copies: Sequence[ProductVector],
                    part: Optional[Bipartition] = None) -> CriterionReport:
    """Evaluate a probe given as its per-copy product vectors."""
    if criterion is Criterion.II:
        return criterion_II_lhs(rho, copies[0], copies[1], parts=cached_bipartitions(rho.n))
    if part is None:
        raise UsageError(f"criterion {criterion.value} needs a bipartition")
    if criterion is Criterion.I:
        return criterion_I_lhs(rho, part, copies[0], copies[1])
    if criterion is Criterion.MLIN:
        return m_linear_lhs_from_copies(rho, part, copies)
    raise UsageError(f"criterion {criterion.value} has no probe to optimize")


class CopyKernel:
    """Batched LHS of criterion I, II or MLIN on raw local vectors.

    One candidate is an array of shape (n, m, d_max): the local vector of every
    party in every copy, zero-padded to the largest local dimension. Each
    product vector a criterion reads is a fixed choice of copy per party,
    so those choices are laid out once as index rows and every evaluation
    is a handful of array operations over a whole batch of candidates.
    """

    def __init__(self, rho: DensityMatrix, criterion, part: Optional[Bipartition] = None, m: int = 2):
        criterion = Criterion.parse(criterion)
        if criterion not in OPTIMIZABLE:
            raise UsageError(f"criterion {criterion.value} cannot be optimized")
        if criterion is not Criterion.II and part is None:
            raise UsageError(f"criterion {criterion.value} needs a bipartition")
        if criterion is not Criterion.MLIN:
            m = 2
        if m < 2:
            raise UsageError(f"need m >= 2 copies, got {m}")
        self.criterion = criterion
        self.dims = rho.dims.dims
        self.size = rho.size
        self.m = m
        self.d_max = max(self.dims)
        self._rho = rho.mat
        self.mask = np.zeros((len(self.dims), 1, self.d_max))
        for k, d in enumerate(self.dims):
            self.mask[k, 0, :d] = 1.0

        rows, pairs, diagonals = self._layout(part)
        self.rows = np.array(rows, dtype=np.intp)
        self.bra = np.array([a for a, _ in pairs], dtype=np.intp)
        self.ket = np.array([b for _, b in pairs], dtype=np.intp)
        self.diag = np.array(diagonals, dtype=np.intp)

    def _layout(self, part: Optional[Bipartition]):
        n, m = len(self.dims), self.m
        if self.criterion is Criterion.II:
            rows = [[0] * n, [1] * n]
            diagonals = []
            for cut in cached_bipartitions(n):
                side_a = [k + 1 in cut for k in range(n)]
                rows.append([1 if a else 0 for a in side_a])
                rows.append([0 if a else 1 for a in side_a])
                diagonals.extend([len(rows) - 2, len(rows) - 1])
            return rows, [(0, 1)], diagonals

        side_a = [k + 1 in part for k in range(n)]
        if self.criterion is Criterion.I:
            rows = [[0] * n, [1] * n,
                    [1 if a else 0 for a in side_a],
                    [0 if a else 1 for a in side_a]]
            return rows, [(2, 3)], [0, 1]

        rows, pairs, diagonals = [], [], []
        for i in range(m):
            nxt = (i + 1) % m
            rows.append([i if a else nxt for a in side_a])
            rows.append([nxt if a else i for a in side_a])
            rows.append([i] * n)
            pairs.append((3 * i, 3 * i + 1))
            diagonals.append(3 * i + 2)
        return rows, pairs, diagonals

    def pack(self, copies: Sequence[ProductVector]) -> np.ndarray:
        probe = np.zeros((len(self.dims), self.m, self.d_max), dtype=complex)
        for c, copy in enumerate(copies):
            for k, vec in enumerate(copy.locals):
                probe[k, c, :vec.size] = vec
        return probe

    def unpack(self, probe: np.ndarray) -> List[ProductVector]:
        return [ProductVector([probe[k, c, :d] for k, d in enumerate(self.dims)], normalize=True)
                for c in range(self.m)]

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        noise = rng.standard_normal((2, len(self.dims), self.m, self.d_max))
        probe = (noise[0] + 1j * noise[1]) * self.mask
        return probe / np.linalg.norm(probe, axis=-1, keepdims=True)

    def perturb(self, probes: np.ndarray, steps: np.ndarray,
                rngs: Sequence[np.random.Generator]) -> np.ndarray:
        """Move every local vector along its own random tangent direction and renormalize."""
        noise = np.stack([rng.standard_normal((2,) + probes.shape[1:]) for rng in rngs])
        direction = (noise[:, 0] + 1j * noise[:, 1]) * self.mask
        direction -= probes * np.sum(probes.conj() * direction, axis=-1, keepdims=True)
        norm = np.linalg.norm(direction, axis=-1, keepdims=True)
        direction = np.divide(direction, norm, out=np.zeros_like(direction), where=norm > 0)
        moved = probes + steps[:, None, None, None] * direction
        return moved / np.linalg.norm(moved, axis=-1, keepdims=True)

    def values(self, probes: np.ndarray) -> np.ndarray:
        """LHS of every probe in a batch of shape (B, n, m, d_max)."""
        chunk = max(1, KERNEL_MAX_ENTRIES // (len(self.rows) * self.size * self.size))
        if len(probes) <= chunk:
            return self._values(probes)
        return np.concatenate([self._values(probes[s:s + chunk]) for s in range(0, len(probes), chunk)])

    def _values(self, probes: np.ndarray) -> np.ndarray:
        batch, count = len(probes), len(self.rows)
        vectors = probes[:, 0][:, self.rows[:, 0], :self.dims[0]]
        for k in range(1, len(self.dims)):
            local = probes[:, k][:, self.rows[:, k], :self.dims[k]]
            vectors = (vectors[:, :, :, None] * local[:, :, None, :]).reshape(batch, count, -1)
        # Every reduction runs along the contiguous last axis, so a row's value
        # does not depend on the batch it is evaluated in.
        applied = np.sum(self._rho * vectors[:, :, None, :], axis=-1)
        off = np.sum(vectors[:, self.bra].conj() * applied[:, self.ket], axis=-1)
        diag = np.sum(vectors[:, self.diag].conj() * applied[:, self.diag], axis=-1).real
        diag = np.maximum(diag, 0.0)

        if self.criterion is Criterion.II:
            return np.abs(off[:, 0]) - np.sqrt(diag[:, 0::2] * diag[:, 1::2]).sum(axis=1)
        if self.criterion is Criterion.I:
            return np.abs(off[:, 0]) - np.sqrt(diag[:, 0] * diag[:, 1])
        product = np.prod(off, axis=1)
        return np.sqrt(np.abs(product.real)) - np.sqrt(np.prod(diag, axis=1))


class ProbeOptimizer:
    """Greedy random-restart hill climber over product probes.

    The search space is one unit vector per party per copy. Each iteration
    moves every local vector by a random tangent step; a move is kept only
    if it raises the LHS, otherwise the step shrinks by ``decay``. The best
    computational-basis pairs seed the first restarts. All restarts of a
    worker climb in lockstep, each drawing from its own generator.
    """

    def __init__(self, settings: Optional[OptimizerConfig] = None):
        """
        Initialize the optimizer.

        Args:
            settings: Search budget and seed; defaults come from config
        """
        self.settings = settings or OptimizerConfig()

    def basis_candidates(self, rho: DensityMatrix, criterion: Criterion,
                         part: Optional[Bipartition] = None, m: int = 2) -> List[List[ProductVector]]:
        """
        Ordered computational-basis pairs, strongest coherence first.

        Pairs (i, j), i != j, are ranked by |rho_ij| and cut at the basis
        budget. For the bipartite criteria the pair is fed through the
        side-A swap so the swapped probes land back on |i>, |j>; extra
        copies for m > 2 repeat the pair cyclically.

        Args:
            rho: State to probe
            criterion: Criterion the candidates are meant for
            part: Cut for criteria I and MLIN
            m: Number of copies

        Returns:
            List[List[ProductVector]]: Candidate probes, each a list of m copies
        """
        size = rho.size
        budget = min(self.settings.basis_budget, size * (size - 1))
        if budget <= 0:
            return []
        weights = np.abs(rho.mat).copy()
        np.fill_diagonal(weights, -1.0)
        flat = weights.reshape(-1)
        if budget < flat.size:
            top = np.argpartition(-flat, budget - 1)[:budget]
        else:
            top = np.arange(flat.size)
        top = top[np.lexsort((top, -flat[top]))]
        dims = rho.dims.dims
        candidates = []
        for index in top[:budget]:
            i, j = divmod(int(index), size)
            pair = (ProductVector.basis(dims, multi_index(dims, i)),
                    ProductVector.basis(dims, multi_index(dims, j)))
            if criterion is not Criterion.II:
                pair = swap_on_subset(pair[0], pair[1], part)
            candidates.append([pair[c % 2] for c in range(m)])
        return candidates

    def _climb(self, kernel: CopyKernel, probes: np.ndarray,
               rngs: Sequence[np.random.Generator]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        settings = self.settings
        values = kernel.values(probes)
        steps = np.full(len(probes), float(settings.initial_step))
        used = np.zeros(len(probes), dtype=int)
        for _ in range(settings.iterations):
            active = np.flatnonzero(steps >= settings.tol)
            if active.size == 0:
                break
            trial = kernel.perturb(probes[active], steps[active], [rngs[i] for i in active])
            trial_values = kernel.values(trial)
            used[active] += 1
            better = trial_values > values[active]
            won = active[better]
            probes[won] = trial[better]
            values[won] = trial_values[better]
            steps[active[~better]] *= settings.decay
        return probes, values, used

    def optimize_violation(self, rho: DensityMatrix, criterion, part: Optional[Bipartition] = None,
                           m: int = 2) -> Optimum:
        """
        Search for the probe with the largest LHS.

        Args:
            rho: State to probe
            criterion: II, I (with part) or MLIN (with part and m)
            part: Cut for criteria I and MLIN
            m: Number of copies for MLIN

        Returns:
            Optimum: Best probe over all restarts, deterministic given the seed
        """
        kernel = CopyKernel(rho, criterion, part, m)
        criterion, m = kernel.criterion, kernel.m
        settings = self.settings

        seeds = []
        if settings.basis_seeds > 0:
            candidates = self.basis_candidates(rho, criterion, part, m)
            if candidates:
                scores = kernel.values(np.stack([kernel.pack(c) for c in candidates]))
                order = np.lexsort((np.arange(len(candidates)), -scores))
                seeds = [candidates[i] for i in order[:settings.basis_seeds]]
            logger.debug(f"Evaluated {len(candidates)} basis candidates, seeding {len(seeds)} restarts")

        def run(restarts: np.ndarray):
            rngs = [np.random.default_rng([settings.seed, int(r)]) for r in restarts]
            starts = np.stack([kernel.pack(seeds[r]) if r < len(seeds) else kernel.random_start(rng)
                               for r, rng in zip(restarts, rngs)])
            return self._climb(kernel, starts, rngs)

        workers = min(settings.workers, settings.restarts)
        batches = np.array_split(np.arange(settings.restarts), workers)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, batches))
        else:
            results = [run(batches[0])]
        probes = np.concatenate([r[0] for r in results])
        values = np.concatenate([r[1] for r in results])
        used = np.concatenate([r[2] for r in results])

        history = []
        best_restart = 0
        for restart, value in enumerate(values):
            if value > values[best_restart]:
                best_restart = restart
            history.append(float(values[best_restart]))
        for restart in range(settings.restarts):
            logger.debug(f"Restart {restart}: lhs={values[restart]:.6g} after {used[restart]} iterations")

        copies = kernel.unpack(probes[best_restart])
        value = float(values[best_restart])
        check = evaluate_copies(rho, criterion, copies, part).lhs
        if abs(check - value) > CONSISTENCY_TOL:
            logger.warning(f"Optimizer re-check moved lhs from {value!r} to {check!r}")
            value = min(value, check)
        logger.info(f"Optimized {criterion.value}: lhs={value:.6g} (restart {best_restart})")
        return Optimum(
            copies=copies, lhs=value, restart=best_restart, iterations=int(used[best_restart]),
            criterion=criterion, partition=None if part is None else part.label, history=history,
        )


def optimize_violation(rho: DensityMatrix, criterion, settings: Optional[OptimizerConfig] = None,
                       part: Optional[Bipartition] = None, m: int = 2) -> Optimum:
    return ProbeOptimizer(settings).optimize_violation(rho, criterion, part=part, m=m)


def bisect_boundary(status: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Midpoint of a bracket of width <= tol around the point where ``status`` flips."""
    if not lo < hi:
        raise UsageError(f"bracket needs lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise UsageError(f"tolerance must be positive, got {tol}")
    status_lo, status_hi = status(lo), status(hi)
    if status_lo == status_hi:
        raise BracketError(f"detection status is {status_lo} at both ends of [{lo}, {hi}]")
    steps = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            logger.warning(f"Bisection hit float resolution at {mid!r}")
            break
        if status(mid) == status_lo:
            lo = mid
        else:
            hi = mid
        steps += 1
        logger.debug(f"Bisection step {steps}: [{lo:.12g}, {hi:.12g}]")
    return (lo + hi) / 2


def threshold_bisect(family: StateFamily, param: str, lo: float, hi: float,
                     value_of: Callable[[StateFamily], float], tol: float = 1e-6,
                     decision_tol: Optional[float] = None) -> float:
    """
    Family parameter at which detection switches on or off.

    ``value_of`` reduces one family member to its LHS under the chosen
    criterion and probe policy. The LHS is assumed monotone along the ray;
    a member counts as detected when its LHS exceeds ``decision_tol``.

    Args:
        family: Family with every parameter except ``param`` fixed
        param: Parameter to bisect over
        lo: Lower end of the bracket
        hi: Upper end of the bracket
        value_of: Criterion LHS of one family member
        tol: Width of the final bracket
        decision_tol: Detection threshold, config.DECISION_TOL by default

    Returns:
        float: The boundary value
    """
    decision_tol = config.DECISION_TOL if decision_tol is None else decision_tol
    # Unknown parameter names fail before any state is built.
    family.with_param(param, lo)

    def status(x: float) -> bool:
        return value_of(family.with_param(param, x)) > decision_tol

    boundary = bisect_boundary(status, lo, hi, tol)
    logger.info(f"Threshold for {family.family} along {param}: {boundary:.9g}")
    return boundary
