"""Monte Carlo scenario descriptions and their estimated rejection rates."""

import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from tcct.models.pvalues import Method


def binomial_se(rate: float, replications: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / replications)


class ScenarioConfig(BaseModel):
    """One correlated-regression experiment: d tests of n subjects each."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(default=100, ge=1)
    n: int = Field(default=100, ge=3)
    rho: float = Field(default=0.0, ge=0.0, le=1.0)
    effect: float = 0.0
    alpha_levels: List[float] = Field(default_factory=lambda: [0.05, 0.01])
    replications: int = Field(default=2000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    methods: List[Method] = Field(
        default_factory=lambda: [Method.TCCT, Method.CCT, Method.FISHER, Method.TIPPETT]
    )

    @field_validator("alpha_levels")
    @classmethod
    def _check_alphas(cls, alphas: List[float]) -> List[float]:
        if not alphas:
            raise ValueError("at least one alpha level is required")
        for a in alphas:
            if not 0.0 < a < 1.0:
                raise ValueError(f"alpha levels must lie in (0, 1), got {a}")
        return alphas

    @field_validator("methods")
    @classmethod
    def _check_methods(cls, methods: List[Method]) -> List[Method]:
        if not methods:
            raise ValueError("at least one method is required")
        return list(dict.fromkeys(methods))


class RejectionRow(BaseModel):
    """Rejection count of one method at one alpha level."""

    model_config = ConfigDict(frozen=True)

    effect: float
    rho: float
    alpha: float
    method: Method
    rejections: int = Field(ge=0)
    replications: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_counts(self) -> "RejectionRow":
        if self.rejections > self.replications:
            raise ValueError("more rejections than replications")
        return self

    @computed_field
    @property
    def rate(self) -> float:
        return self.rejections / self.replications

    @computed_field
    @property
    def se(self) -> float:
        return binomial_se(self.rate, self.replications)


class RejectionTable(BaseModel):
    """Rows keyed by (effect, rho, alpha, method)."""

    model_config = ConfigDict(frozen=True)

    rows: List[RejectionRow]

    def sorted_rows(self) -> List[RejectionRow]:
        """Effect, rho ascending; alpha descending; then method name."""
        return sorted(self.rows, key=lambda r: (r.effect, r.rho, -r.alpha, r.method.value))

    def merge(self, other: "RejectionTable") -> "RejectionTable":
        return RejectionTable(rows=[*self.rows, *other.rows])

    def lookup(self, rho: float, alpha: float, method: Method, effect: Optional[float] = None) -> RejectionRow:
        for row in self.rows:
            if (
                math.isclose(row.rho, rho)
                and math.isclose(row.alpha, alpha)
                and row.method is method
                and (effect is None or math.isclose(row.effect, effect))
            ):
                return row
        raise KeyError((rho, alpha, method, effect))


class PowerCurve(BaseModel):
    """Power of each method along a strictly increasing c grid."""

    model_config = ConfigDict(frozen=True)

    c_grid: List[float]
    level: float
    replications: int = Field(ge=1)
    powers: Dict[Method, List[float]]

    @model_validator(mode="after")
    def _check_curve(self) -> "PowerCurve":
        if any(b <= a for a, b in zip(self.c_grid, self.c_grid[1:])):
            raise ValueError("c grid must be strictly increasing")
        for method, values in self.powers.items():
            if len(values) != len(self.c_grid):
                raise ValueError(f"{method} has {len(values)} powers for {len(self.c_grid)} grid points")
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise ValueError("powers must lie in [0, 1]")
        return self

    def se(self, method: Method) -> List[float]:
        return [binomial_se(v, self.replications) for v in self.powers[method]]


class PowerHeatmap(BaseModel):
    """TCCT and CCT power over a grid of Beta shapes, with the TCCT - CCT gain layer.

    Layers are indexed [i][j] for shape1[i], shape2[j].
    """

    model_config = ConfigDict(frozen=True)

    shape1: List[float]
    shape2: List[float]
    level: float
    replications: int = Field(ge=1)
    tcct: List[List[float]]
    cct: List[List[float]]

    @model_validator(mode="after")
    def _check_grid(self) -> "PowerHeatmap":
        for axis in (self.shape1, self.shape2):
            if any(v <= 0.0 or v > 2.0 for v in axis):
                raise ValueError("Beta shapes must lie in (0, 2]")
        for layer in (self.tcct, self.cct):
            if len(layer) != len(self.shape1) or any(len(r) != len(self.shape2) for r in layer):
                raise ValueError("power layers must match the shape grid")
            if any(not 0.0 <= v <= 1.0 for r in layer for v in r):
                raise ValueError("powers must lie in [0, 1]")
        return self

    @computed_field
    @property
    def gain(self) -> List[List[float]]:
        return [[t - c for t, c in zip(tr, cr)] for tr, cr in zip(self.tcct, self.cct)]

    def cell(self, a: float, b: float) -> Dict[str, float]:
        i = next(k for k, v in enumerate(self.shape1) if math.isclose(v, a))
        j = next(k for k, v in enumerate(self.shape2) if math.isclose(v, b))
        return {"tcct": self.tcct[i][j], "cct": self.cct[i][j], "gain": self.gain[i][j]}
