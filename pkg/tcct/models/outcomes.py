"""Samples fed to the elementary tests and the outcomes they produce."""

import math
from tcct._compat import StrEnum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Sidedness(StrEnum):
    ONE_SIDED_GREATER = "ONE_SIDED_GREATER"
    TWO_SIDED = "TWO_SIDED"


class OutcomeNote(StrEnum):
    CONSTANT_RESPONSE = "CONSTANT_RESPONSE"
    SEPARATION = "SEPARATION"
    TOO_FEW_NONZERO = "TOO_FEW_NONZERO"
    INSUFFICIENT_DATA = "INSUFFICIENT_DATA"
    NOT_CONVERGED = "NOT_CONVERGED"


class Sample(BaseModel):
    """Paired response and covariate observations, n >= 3."""

    model_config = ConfigDict(frozen=True)

    response: List[float]
    covariate: List[float]

    @field_validator("response", "covariate")
    @classmethod
    def _no_nan(cls, values: List[float]) -> List[float]:
        if any(math.isnan(v) for v in values):
            raise ValueError("samples must not contain NaN")
        return values

    @model_validator(mode="after")
    def _check_shape(self) -> "Sample":
        if len(self.response) != len(self.covariate):
            raise ValueError(
                f"response has {len(self.response)} values but covariate has {len(self.covariate)}"
            )
        if len(self.response) < 3:
            raise ValueError(f"a sample needs at least 3 observations, got {len(self.response)}")
        return self

    @classmethod
    def of(cls, response, covariate) -> "Sample":
        return cls(response=[float(v) for v in response], covariate=[float(v) for v in covariate])

    def arrays(self):
        return np.asarray(self.covariate, dtype=float), np.asarray(self.response, dtype=float)


class TestOutcome(BaseModel):
    """Statistic and p-value of one elementary test."""

    __test__ = False  # not a pytest class

    model_config = ConfigDict(frozen=True)

    statistic: float
    p_value: float
    sided: Sidedness
    df: Optional[int] = None
    note: Optional[OutcomeNote] = None

    @field_validator("p_value")
    @classmethod
    def _check_p(cls, p: float) -> float:
        if math.isnan(p) or not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value outside [0, 1]: {p}")
        return p
