"""Seeded Monte Carlo scenarios: rejection tables, power curves, and power heatmaps.

Replication r always draws from RngStream(seed, r), so results do not depend on
how replications are split into blocks or on the order blocks finish in.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from tcct.core.config import settings
from tcct.models.pvalues import Method
from tcct.models.scenarios import PowerCurve, PowerHeatmap, RejectionRow, RejectionTable, ScenarioConfig
from tcct.services.combiners import combination_service
from tcct.services.hypothesis import ols_slope_tests, one_sided_mean_tests
from tcct.services.kernels import RngStream, sample_beta, sample_exchangeable_normal

CAUCHY_PAIR = (Method.TCCT, Method.CCT)


def balanced_design(n: int) -> np.ndarray:
    """Binary covariate coded -1 for the first n // 2 subjects and +1 for the rest.

    The two group means differ by 2 * effect.
    """
    x = np.ones(n)
    x[: n // 2] = -1.0
    return x


def scenario_replications(effect: float, full_scale: bool = False) -> int:
    """Desk-scale replication count, or the published 100,000 (null) / 10,000 (power)."""
    if not full_scale:
        return settings.DESK_REPLICATIONS
    return settings.FULL_TYPE_I_REPLICATIONS if effect == 0.0 else settings.FULL_POWER_REPLICATIONS


def _rejection_counts(P: np.ndarray, methods: Sequence[Method], alphas: Sequence[float]) -> np.ndarray:
    counts = np.zeros((len(methods), len(alphas)), dtype=np.int64)
    levels = np.asarray(alphas)[None, :]
    for i, method in enumerate(methods):
        p = combination_service.combine_batch(method, P)
        counts[i] = (p[:, None] <= levels).sum(axis=0)
    return counts


def _regression_block(cfg: ScenarioConfig, start: int, stop: int) -> np.ndarray:
    x = balanced_design(cfg.n)
    mean = cfg.effect * x[:, None]
    P = np.empty((stop - start, cfg.d))
    for k, rep in enumerate(range(start, stop)):
        # Subject-level error vectors carry the cross-test correlation.
        errors = sample_exchangeable_normal(RngStream(cfg.seed, rep), cfg.d, cfg.rho, size=cfg.n)
        _, P[k] = ols_slope_tests(x, mean + errors)
    return _rejection_counts(P, cfg.methods, cfg.alpha_levels)


def _curve_block(
    c_grid: Tuple[float, ...], d: int, n: int, level: float, seed: int, start: int, stop: int
) -> np.ndarray:
    P = np.empty((len(c_grid), stop - start, d))
    for k, rep in enumerate(range(start, stop)):
        rng = RngStream(seed, rep)
        for i, c in enumerate(c_grid):
            mu = np.linspace(-c, c, d)
            _, P[i, k] = one_sided_mean_tests(rng.generator.standard_normal((n, d)) + mu)
    return np.stack([_rejection_counts(P[i], CAUCHY_PAIR, [level])[:, 0] for i in range(len(c_grid))])


def _heatmap_block(
    shape1: Tuple[float, ...], shape2: Tuple[float, ...], d: int, level: float, seed: int, start: int, stop: int
) -> np.ndarray:
    a = np.asarray(shape1)[:, None, None]
    b = np.asarray(shape2)[None, :, None]
    cells = (len(shape1), len(shape2))
    counts = np.zeros((len(CAUCHY_PAIR),) + cells, dtype=np.int64)
    for rep in range(start, stop):
        P = sample_beta(RngStream(seed, rep), a, b, size=cells + (d,)).reshape(-1, d)
        for m, method in enumerate(CAUCHY_PAIR):
            counts[m] += (combination_service.combine_batch(method, P) <= level).reshape(cells)
    return counts


class SimulationService:
    """Run replication blocks sequentially or in a process pool and sum their counts."""

    def __init__(self, workers: Optional[int] = None, block_size: Optional[int] = None) -> None:
        self.workers = workers or settings.WORKERS
        self.block_size = block_size or settings.BLOCK_SIZE

    def _run_blocks(self, block: Callable[..., np.ndarray], args: tuple, replications: int) -> np.ndarray:
        spans = [
            (start, min(start + self.block_size, replications))
            for start in range(0, replications, self.block_size)
        ]
        if self.workers > 1 and len(spans) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(block, *args, start, stop) for start, stop in spans]
                parts = [f.result() for f in futures]
        else:
            parts = []
            for start, stop in spans:
                logger.debug(f"Replications {start}..{stop - 1} of {replications}")
                parts.append(block(*args, start, stop))
        return np.sum(parts, axis=0)

    def run_regression_scenario(self, cfg: ScenarioConfig) -> RejectionTable:
        """Rejection rates of combined slope tests for d correlated regressions.

        Each replication fixes a balanced -1/+1 covariate, draws n subject-level
        error vectors with exchangeable correlation rho, and runs one OLS slope
        test per coordinate with response effect * x + error.
        """
        logger.info(
            f"Regression scenario: d={cfg.d}, n={cfg.n}, rho={cfg.rho}, effect={cfg.effect}, "
            f"replications={cfg.replications}, methods={[m.value for m in cfg.methods]}"
        )
        counts = self._run_blocks(_regression_block, (cfg,), cfg.replications)
        rows = [
            RejectionRow(
                effect=cfg.effect, rho=cfg.rho, alpha=alpha, method=method,
                rejections=int(counts[i, j]), replications=cfg.replications,
            )
            for i, method in enumerate(cfg.methods)
            for j, alpha in enumerate(cfg.alpha_levels)
        ]
        return RejectionTable(rows=rows)

    def run_tmin_comparison(self, cfg: ScenarioConfig) -> RejectionTable:
        """T_min against Tippett on the same replications."""
        return self.run_regression_scenario(cfg.model_copy(update={"methods": [Method.TMIN, Method.TIPPETT]}))

    def run_one_sided_curve(
        self,
        c_grid: Sequence[float],
        d: int = 100,
        n: int = 100,
        reps: int = 2000,
        seed: int = 0,
        level: Optional[float] = None,
    ) -> PowerCurve:
        """TCCT and CCT power combining d one-sided mean tests with means spread over [-c, c].

        Data are redrawn for every (c, replication) pair.
        """
        level = settings.FIGURE_LEVEL if level is None else level
        grid = tuple(float(c) for c in c_grid)
        logger.info(f"One-sided power curve: {len(grid)} c values, d={d}, n={n}, replications={reps}")
        counts = self._run_blocks(_curve_block, (grid, d, n, level, seed), reps)
        powers = {method: [float(v) for v in counts[:, m] / reps] for m, method in enumerate(CAUCHY_PAIR)}
        return PowerCurve(c_grid=list(grid), level=level, replications=reps, powers=powers)

    def run_beta_heatmap(
        self,
        shape_grid: Sequence[float],
        d: int = 100,
        reps: int = 2000,
        alpha_level: Optional[float] = None,
        seed: int = 0,
        shape2_grid: Optional[Sequence[float]] = None,
    ) -> PowerHeatmap:
        """TCCT and CCT power for d iid Beta(a, b) p-values over a shape grid.

        Both methods see the same draws in every cell, so the gain layer is
        never negative.
        """
        level = settings.FIGURE_LEVEL if alpha_level is None else alpha_level
        shape1 = tuple(float(a) for a in shape_grid)
        shape2 = shape1 if shape2_grid is None else tuple(float(b) for b in shape2_grid)
        logger.info(f"Beta power heatmap: {len(shape1)}x{len(shape2)} cells, d={d}, replications={reps}")
        counts = self._run_blocks(_heatmap_block, (shape1, shape2, d, level, seed), reps)
        layers: List[List[List[float]]] = [(counts[m] / reps).tolist() for m in range(len(CAUCHY_PAIR))]
        return PowerHeatmap(
            shape1=list(shape1), shape2=list(shape2), level=level, replications=reps,
            tcct=layers[0], cct=layers[1],
        )


simulation_service = SimulationService()
