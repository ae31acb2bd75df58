"""Elementary per-coordinate tests whose p-values feed the combiners."""

from typing import Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy import special

from tcct.core.config import settings
from tcct.core.errors import DegenerateSampleError, DomainError
from tcct.models.outcomes import OutcomeNote, Sample, Sidedness, TestOutcome
from tcct.services.kernels import normal_cdf, student_t_sf

_DEGENERATE_SCALE = 1e-12  # Relative size below which sums of squares count as zero


def _ols_columns(x: np.ndarray, Y: np.ndarray):
    """Slope, SE, t, SSE and total SS of y ~ 1 + x for each column of Y."""
    n = x.shape[0]
    xc = x - x.mean()
    sxx = xc @ xc
    Yc = Y - Y.mean(axis=0)
    slope = (xc @ Yc) / sxx
    resid = Yc - xc[:, None] * slope[None, :]
    sse = (resid * resid).sum(axis=0)
    syy = (Yc * Yc).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        se = np.sqrt(sse / (n - 2) / sxx)
        t = slope / se
    return slope, se, t, sse, syy


def ols_slope_tests(x: ArrayLike, Y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Two-sided slope t-tests of every column of Y on a shared covariate x.

    Returns (t statistics, p-values) without degenerate-case handling; the
    simulation harness uses it on continuous responses.
    """
    x = np.asarray(x, dtype=float)
    Y = np.asarray(Y, dtype=float).reshape(x.shape[0], -1)
    _, _, t, _, _ = _ols_columns(x, Y)
    p = 2.0 * np.asarray(student_t_sf(np.abs(np.nan_to_num(t, nan=0.0)), x.shape[0] - 2))
    return t, np.minimum(p, 1.0)


def one_sided_mean_tests(Y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """One-sample t-tests of H0: mu <= 0 for every column of Y."""
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[0]
    t = np.sqrt(n) * Y.mean(axis=0) / Y.std(axis=0, ddof=1)
    return t, np.asarray(student_t_sf(t, n - 1))


class HypothesisTestService:
    """OLS slope, one-sided mean, logistic Wald, and two-part tests.

    Degenerate logistic fits resolve to p = 1 with a note rather than raising,
    so their p-values keep flowing into the combiners.
    """

    def __init__(self) -> None:
        """Read Newton-Raphson and two-part tuning from config."""
        self.max_iter = settings.LOGIT_MAX_ITER
        self.tolerance = settings.LOGIT_TOLERANCE
        self.separation_bound = settings.SEPARATION_BOUND
        self.min_nonzero = settings.MIN_NONZERO

    def ols_slope_test(self, sample: Sample) -> TestOutcome:
        """Two-sided t-test of the slope in y = a + b x + e.

        Zero residual variance yields note CONSTANT_RESPONSE with p = 0 for a
        nonzero slope and p = 1 otherwise.

        Raises:
            DomainError: the covariate is constant.
        """
        x, y = sample.arrays()
        if np.ptp(x) == 0.0:
            raise DomainError("covariate is constant; the slope is not identified")
        n = x.shape[0]
        slope, _, t, sse, syy = (float(v[0]) for v in _ols_columns(x, y[:, None]))
        tolerance = n * (_DEGENERATE_SCALE * np.abs(y).max()) ** 2
        if syy <= tolerance:
            return TestOutcome(
                statistic=0.0, p_value=1.0, sided=Sidedness.TWO_SIDED, df=n - 2,
                note=OutcomeNote.CONSTANT_RESPONSE,
            )
        if sse <= tolerance:
            return TestOutcome(
                statistic=float(np.copysign(np.inf, slope)), p_value=0.0,
                sided=Sidedness.TWO_SIDED, df=n - 2, note=OutcomeNote.CONSTANT_RESPONSE,
            )
        p = min(1.0, 2.0 * student_t_sf(abs(t), n - 2))
        return TestOutcome(statistic=t, p_value=p, sided=Sidedness.TWO_SIDED, df=n - 2)

    def one_sided_mean_test(self, y: Sequence[float]) -> TestOutcome:
        """One-sample t-test of H0: mu <= 0 against mu > 0.

        Raises:
            DegenerateSampleError: fewer than 2 observations or zero variance.
        """
        arr = np.asarray(y, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DegenerateSampleError("a one-sample t-test needs at least 2 observations")
        if np.isnan(arr).any():
            raise DomainError("samples must not contain NaN")
        s = arr.std(ddof=1)
        if s <= _DEGENERATE_SCALE * np.abs(arr).max():
            raise DegenerateSampleError("sample variance is zero")
        n = arr.shape[0]
        t = float(np.sqrt(n) * arr.mean() / s)
        return TestOutcome(
            statistic=t, p_value=student_t_sf(t, n - 1),
            sided=Sidedness.ONE_SIDED_GREATER, df=n - 1,
        )

    def logistic_wald_test(self, sample: Sample) -> TestOutcome:
        """Wald test of the slope in logit P(y=1) = a + b x, fitted by Newton-Raphson.

        A constant response returns p = 1 (CONSTANT_RESPONSE). If any coefficient
        passes the separation bound before convergence the fit is clamped there
        and flagged SEPARATION.

        Raises:
            DomainError: response not binary or covariate constant.
        """
        x, y = sample.arrays()
        if not np.isin(y, (0.0, 1.0)).all():
            raise DomainError("logistic regression needs a 0/1 response")
        if np.ptp(x) == 0.0:
            raise DomainError("covariate is constant; the slope is not identified")
        if np.ptp(y) == 0.0:
            return TestOutcome(
                statistic=0.0, p_value=1.0, sided=Sidedness.TWO_SIDED,
                note=OutcomeNote.CONSTANT_RESPONSE,
            )

        X = np.column_stack([np.ones_like(x), x])
        beta = np.zeros(2)
        note = None
        for _ in range(self.max_iter):
            mu = special.expit(X @ beta)
            score = X.T @ (y - mu)
            if np.abs(score).max() < self.tolerance:
                break
            information = (X * (mu * (1.0 - mu))[:, None]).T @ X
            beta = beta + np.linalg.solve(information, score)
            if np.abs(beta).max() > self.separation_bound:
                logger.warning(f"Logistic fit separated (beta={beta.tolist()}); clamping at +/-{self.separation_bound}")
                beta = np.clip(beta, -self.separation_bound, self.separation_bound)
                note = OutcomeNote.SEPARATION
                break
        else:
            mu = special.expit(X @ beta)
            if np.abs(X.T @ (y - mu)).max() >= self.tolerance:
                logger.warning(f"Logistic fit did not converge in {self.max_iter} iterations")
                note = OutcomeNote.NOT_CONVERGED

        mu = special.expit(X @ beta)
        information = (X * (mu * (1.0 - mu))[:, None]).T @ X
        try:
            se = float(np.sqrt(np.linalg.inv(information)[1, 1]))
        except np.linalg.LinAlgError as e:
            raise DegenerateSampleError(f"logistic information matrix is singular: {e}") from e
        z = float(beta[1] / se)
        return TestOutcome(
            statistic=z, p_value=min(1.0, 2.0 * normal_cdf(-abs(z))),
            sided=Sidedness.TWO_SIDED, note=note,
        )

    def two_part_test(self, sample: Sample) -> Tuple[TestOutcome, TestOutcome]:
        """Hurdle test: logistic on the zero/nonzero pattern, OLS on the nonzero values.

        Part 2 returns p = 1 with TOO_FEW_NONZERO when fewer than MIN_NONZERO
        responses are nonzero or their covariate is constant.
        """
        x, y = sample.arrays()
        nonzero = y != 0.0
        part1 = self.logistic_wald_test(Sample.of(nonzero.astype(float), x))
        if nonzero.sum() < self.min_nonzero or np.ptp(x[nonzero]) == 0.0:
            part2 = TestOutcome(
                statistic=0.0, p_value=1.0, sided=Sidedness.TWO_SIDED,
                note=OutcomeNote.TOO_FEW_NONZERO,
            )
        else:
            part2 = self.ols_slope_test(Sample.of(y[nonzero], x[nonzero]))
        return part1, part2

hypothesis_service = HypothesisTestService()
