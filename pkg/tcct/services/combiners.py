"""P-value combination: TCCT, CCT, Fisher, Tippett, and T_min."""

import math
from typing import Callable, Dict, Optional, Set

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from tcct.core.errors import IndeterminateStatisticError
from tcct.models.pvalues import (
    CombinedResult,
    Method,
    PValueVector,
    ResultFlag,
    WeightVector,
    resolve_weights,
)
from tcct.services.kernels import cauchy_survival, cauchy_transform, chisq_even_sf


def _tcct_statistic(P: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Strict p < 0.5: everything else contributes exactly 0.
    keep = (P < 0.5) & (w > 0.0)
    scores = cauchy_transform(np.where(keep, P, 0.25))
    return np.where(keep, w * scores, 0.0).sum(axis=-1)


def _cct_statistic(P: np.ndarray, w: np.ndarray) -> np.ndarray:
    scores = cauchy_transform(P)
    with np.errstate(invalid="ignore"):
        return np.where(w > 0.0, w * scores, 0.0).sum(axis=-1)


def _fisher_statistic(P: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -2.0 * np.log(P).sum(axis=-1)


def _tmin_statistic(P: np.ndarray) -> np.ndarray:
    return np.asarray(cauchy_transform(P.min(axis=-1))) / P.shape[-1]


def _tippett_p(P: np.ndarray) -> np.ndarray:
    # 1 - (1 - m)^d without losing small m to rounding
    with np.errstate(divide="ignore"):
        return -np.expm1(P.shape[-1] * np.log1p(-P.min(axis=-1)))


def _survival_or_nan(stat: np.ndarray) -> np.ndarray:
    undefined = np.isnan(stat)
    p = np.asarray(cauchy_survival(np.where(undefined, 0.0, stat)))
    return np.where(undefined, np.nan, p)


class CombinationService:
    """Combine p-values into one global p-value for the intersection null.

    TCCT and CCT accept weights (uniform when omitted); Fisher, Tippett and T_min
    are unweighted. The scalar methods validate their inputs and return a
    CombinedResult; combine_batch runs the same statistics over the rows of an
    (R, d) matrix for Monte Carlo use.
    """

    def tcct(self, p: PValueVector, w: Optional[WeightVector] = None) -> CombinedResult:
        """Truncated Cauchy combination: terms with p_i >= 0.5 contribute 0."""
        w = resolve_weights(p, w)
        P, W = p.as_array(), w.as_array()
        flags: Set[ResultFlag] = set()
        if not ((P < 0.5) & (W > 0.0)).any():
            flags.add(ResultFlag.ALL_TRUNCATED)
        statistic = float(_tcct_statistic(P, W))
        return self._finish(Method.TCCT, statistic, cauchy_survival(statistic), flags)

    def cct(self, p: PValueVector, w: Optional[WeightVector] = None) -> CombinedResult:
        """Cauchy combination over all terms.

        Raises:
            IndeterminateStatisticError: weighted p-values of exactly 0 and exactly 1
                both occur, so the statistic would be inf - inf.
        """
        w = resolve_weights(p, w)
        P, W = p.as_array(), w.as_array()
        active = W > 0.0
        if (active & (P == 0.0)).any() and (active & (P == 1.0)).any():
            logger.warning("CCT statistic undefined: weighted p-values of exactly 0 and 1 both present")
            raise IndeterminateStatisticError(
                "CCT statistic is undefined when weighted p-values of exactly 0 and 1 both occur"
            )
        statistic = float(_cct_statistic(P, W))
        return self._finish(Method.CCT, statistic, cauchy_survival(statistic), set())

    def fisher(self, p: PValueVector) -> CombinedResult:
        """Fisher's method: -2 sum(ln p_i) against chi-square with 2d degrees of freedom."""
        P = p.as_array()
        statistic = float(_fisher_statistic(P))
        return self._finish(Method.FISHER, statistic, chisq_even_sf(statistic, 2 * len(p)), set())

    def tippett(self, p: PValueVector) -> CombinedResult:
        """Tippett's minimum p-value: 1 - (1 - min p)^d."""
        P = p.as_array()
        return self._finish(Method.TIPPETT, float(P.min()), float(_tippett_p(P)), set())

    def t_min(self, p: PValueVector) -> CombinedResult:
        """Cauchy score of the minimum p-value divided by d."""
        statistic = float(_tmin_statistic(p.as_array()))
        return self._finish(Method.TMIN, statistic, cauchy_survival(statistic), set())

    def combine(
        self, method: Method, p: PValueVector, w: Optional[WeightVector] = None
    ) -> CombinedResult:
        """Dispatch to one method; weights are ignored by the unweighted methods."""
        if method.weighted:
            return self.tcct(p, w) if method is Method.TCCT else self.cct(p, w)
        unweighted: Dict[Method, Callable[[PValueVector], CombinedResult]] = {
            Method.FISHER: self.fisher,
            Method.TIPPETT: self.tippett,
            Method.TMIN: self.t_min,
        }
        return unweighted[method](p)

    def combine_batch(
        self, method: Method, P: ArrayLike, weights: Optional[ArrayLike] = None
    ) -> np.ndarray:
        """Combined p-values for each row of P.

        Rows where CCT is indeterminate come back as NaN, which never compares
        <= alpha and so never counts as a rejection.
        """
        P = np.atleast_2d(np.asarray(P, dtype=float))
        d = P.shape[-1]
        w = np.full(d, 1.0 / d) if weights is None else np.asarray(weights, dtype=float)
        if method is Method.TCCT:
            p = _survival_or_nan(_tcct_statistic(P, w))
        elif method is Method.CCT:
            p = _survival_or_nan(_cct_statistic(P, w))
        elif method is Method.FISHER:
            p = np.asarray(chisq_even_sf(_fisher_statistic(P), 2 * d))
        elif method is Method.TIPPETT:
            p = _tippett_p(P)
        else:
            p = _survival_or_nan(_tmin_statistic(P))
        return np.clip(p, 0.0, 1.0)

    @staticmethod
    def _finish(
        method: Method, statistic: float, p_value: float, flags: Set[ResultFlag]
    ) -> CombinedResult:
        if math.isinf(statistic):
            flags.add(ResultFlag.INFINITE_STAT)
        clamped = min(max(float(p_value), 0.0), 1.0)
        if clamped != p_value:
            flags.add(ResultFlag.CLAMPED)
        return CombinedResult(
            method=method, statistic=statistic, p_combined=clamped, flags=frozenset(flags)
        )

combination_service = CombinationService()
