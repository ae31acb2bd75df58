"""P-value vectors, weights, and combined results."""

import math
from tcct._compat import StrEnum
from typing import FrozenSet, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

WEIGHT_SUM_TOLERANCE = 1e-9


class Method(StrEnum):
    """Combination methods."""

    TCCT = "tcct"
    CCT = "cct"
    FISHER = "fisher"
    TIPPETT = "tippett"
    TMIN = "tmin"

    @property
    def cauchy_family(self) -> bool:
        return self in (Method.TCCT, Method.CCT, Method.TMIN)

    @property
    def weighted(self) -> bool:
        return self in (Method.TCCT, Method.CCT)


class ResultFlag(StrEnum):
    ALL_TRUNCATED = "ALL_TRUNCATED"
    INFINITE_STAT = "INFINITE_STAT"
    DEGENERATE_INPUT = "DEGENERATE_INPUT"
    CLAMPED = "CLAMPED"


def parse_methods(raw: str) -> List[Method]:
    """Parse a comma-separated method list, keeping first-seen order."""
    methods: List[Method] = []
    for token in raw.split(","):
        token = token.strip().lower()
        if not token:
            continue
        method = Method(token)
        if method not in methods:
            methods.append(method)
    if not methods:
        raise ValueError("at least one method is required")
    return methods


class PValueVector(BaseModel):
    """The unit of combination: d >= 1 p-values in [0, 1]."""

    model_config = ConfigDict(frozen=True)

    values: List[float]

    @field_validator("values")
    @classmethod
    def _check_values(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("a p-value vector needs at least one entry")
        for i, p in enumerate(values):
            if math.isnan(p) or not 0.0 <= p <= 1.0:
                raise ValueError(f"p-value at position {i} is not in [0, 1]: {p}")
        return values

    @classmethod
    def of(cls, values: Sequence[float]) -> "PValueVector":
        return cls(values=[float(v) for v in values])

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


class WeightVector(BaseModel):
    """Nonnegative weights summing to 1."""

    model_config = ConfigDict(frozen=True)

    weights: List[float]

    @field_validator("weights")
    @classmethod
    def _check_weights(cls, weights: List[float]) -> List[float]:
        if not weights:
            raise ValueError("a weight vector needs at least one entry")
        if any(math.isnan(w) or w < 0.0 for w in weights):
            raise ValueError("weights must be nonnegative numbers")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {math.fsum(weights)}")
        return weights

    @classmethod
    def uniform(cls, d: int) -> "WeightVector":
        return cls(weights=[1.0 / d] * d)

    @classmethod
    def normalized(cls, raw: Sequence[float]) -> "WeightVector":
        """Scale raw nonnegative weights to sum 1; equal raw weights give exactly uniform()."""
        raw = [float(w) for w in raw]
        if any(math.isnan(w) or w < 0.0 for w in raw):
            raise ValueError("weights must be nonnegative numbers")
        total = math.fsum(raw)
        if total <= 0.0:
            raise ValueError("weights must not all be zero")
        if all(w == raw[0] for w in raw):
            return cls.uniform(len(raw))
        return cls(weights=[w / total for w in raw])

    def __len__(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


class CombinedResult(BaseModel):
    """Outcome of one combination: statistic, combined p-value, diagnostic flags."""

    model_config = ConfigDict(frozen=True)

    method: Method
    statistic: float
    p_combined: float
    flags: FrozenSet[ResultFlag] = frozenset()

    @model_validator(mode="after")
    def _check_result(self) -> "CombinedResult":
        if math.isnan(self.p_combined) or not 0.0 <= self.p_combined <= 1.0:
            raise ValueError(f"combined p-value outside [0, 1]: {self.p_combined}")
        if self.method.cauchy_family and (self.statistic == math.inf) != (self.p_combined == 0.0):
            raise ValueError("an infinite Cauchy statistic must pair with a zero p-value")
        return self

    def flag_text(self) -> str:
        return ";".join(sorted(self.flags))


def resolve_weights(p: PValueVector, w: Optional[WeightVector]) -> WeightVector:
    """Default to uniform weights and check the lengths agree."""
    if w is None:
        return WeightVector.uniform(len(p))
    if len(w) != len(p):
        raise ValueError(f"length mismatch: {len(p)} p-values but {len(w)} weights")
    return w
