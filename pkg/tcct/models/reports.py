"""Tables read by the CLI and the reports it writes."""

import math
from collections import OrderedDict
from tcct._compat import StrEnum
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tcct.models.outcomes import OutcomeNote
from tcct.models.pvalues import CombinedResult, Method, ResultFlag


class PipelineMode(StrEnum):
    """Per-cell test of the longitudinal pipeline."""

    ONE_PART = "one-part"
    TWO_PART = "two-part"


class GroupedPRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: str
    test_id: str
    p: float = Field(ge=0.0, le=1.0)
    weight: Optional[float] = Field(default=None, ge=0.0)


class GroupedPTable(BaseModel):
    """P-values keyed by group, e.g. SNPs by chromosome."""

    model_config = ConfigDict(frozen=True)

    rows: List[GroupedPRow]
    weighted: bool = False

    @model_validator(mode="after")
    def _check_weights(self) -> "GroupedPTable":
        if self.weighted and any(r.weight is None for r in self.rows):
            raise ValueError("every row needs a weight when the table is weighted")
        return self

    def groups(self) -> "OrderedDict[str, Tuple[List[float], Optional[List[float]]]]":
        """P-values (and raw weights when weighted) per group, in first-seen order."""
        grouped: "OrderedDict[str, Tuple[List[float], Optional[List[float]]]]" = OrderedDict()
        for row in self.rows:
            ps, ws = grouped.setdefault(row.group, ([], [] if self.weighted else None))
            ps.append(row.p)
            if ws is not None:
                ws.append(row.weight)
        return grouped


class LongitudinalRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    unit_id: str
    timepoint: int
    feature: str
    response: float
    covariate: float
    block: Optional[str] = None

    @field_validator("response", "covariate")
    @classmethod
    def _finite(cls, v: float) -> float:
        if math.isnan(v):
            raise ValueError("responses and covariates must be numbers")
        return v


class LongitudinalTable(BaseModel):
    """Repeated measurements of many features on the same units.

    (unit_id, timepoint, feature) is unique.
    """

    model_config = ConfigDict(frozen=True)

    rows: List[LongitudinalRow]

    @model_validator(mode="after")
    def _check_unique(self) -> "LongitudinalTable":
        seen = set()
        for row in self.rows:
            key = (row.unit_id, row.timepoint, row.feature)
            if key in seen:
                raise ValueError(f"duplicate measurement for unit {row.unit_id}, timepoint {row.timepoint}, feature {row.feature}")
            seen.add(key)
        return self

    def has_binary_covariate(self) -> bool:
        return all(r.covariate in (0.0, 1.0) for r in self.rows)

    def cells(self) -> Dict[Tuple[str, str, int], Tuple[List[float], List[float]]]:
        """(block, feature, timepoint) -> (responses, covariates), sorted by key."""
        cells: Dict[Tuple[str, str, int], Tuple[List[float], List[float]]] = {}
        for row in self.rows:
            ys, xs = cells.setdefault((row.block or "all", row.feature, row.timepoint), ([], []))
            ys.append(row.response)
            xs.append(row.covariate)
        return dict(sorted(cells.items()))


class CellResult(BaseModel):
    """One elementary test in the longitudinal pipeline."""

    model_config = ConfigDict(frozen=True)

    block: str
    feature: str
    timepoint: int
    part: int = Field(ge=1, le=2)
    statistic: float
    p_value: float = Field(ge=0.0, le=1.0)
    note: Optional[OutcomeNote] = None


class ReportRow(BaseModel):
    """One (group, method) line of a report.

    statistic and p_combined are None only when the combination is undefined,
    in which case DEGENERATE_INPUT is flagged.
    """

    model_config = ConfigDict(frozen=True)

    group: str
    method: Method
    n_tests: int = Field(ge=1)
    statistic: Optional[float] = None
    p_combined: Optional[float] = None
    flags: FrozenSet[ResultFlag] = frozenset()

    @model_validator(mode="after")
    def _check_row(self) -> "ReportRow":
        if (self.p_combined is None) != (ResultFlag.DEGENERATE_INPUT in self.flags):
            raise ValueError("a missing p-value must be flagged DEGENERATE_INPUT")
        return self

    @classmethod
    def from_result(cls, group: str, n_tests: int, result: CombinedResult) -> "ReportRow":
        return cls(
            group=group, method=result.method, n_tests=n_tests,
            statistic=result.statistic, p_combined=result.p_combined, flags=result.flags,
        )

    @classmethod
    def degenerate(cls, group: str, n_tests: int, method: Method) -> "ReportRow":
        return cls(group=group, method=method, n_tests=n_tests, flags=frozenset({ResultFlag.DEGENERATE_INPUT}))

    def flag_text(self) -> str:
        return ";".join(sorted(self.flags))


class RunReport(BaseModel):
    """Combined rows of one command plus the metadata needed to reproduce it."""

    model_config = ConfigDict(frozen=True)

    command: str
    methods: List[Method]
    weights: str
    version: str
    seed: Optional[int] = None
    source: Optional[str] = None
    rows: List[ReportRow]

    @model_validator(mode="after")
    def _one_row_per_group_and_method(self) -> "RunReport":
        keys = [(r.group, r.method) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("a report has one row per group and method")
        groups = {g for g, _ in keys}
        if len(keys) != len(groups) * len(self.methods):
            raise ValueError("every group needs a row for every requested method")
        return self

    def sorted_rows(self) -> List[ReportRow]:
        return sorted(self.rows, key=lambda r: (r.group, r.method.value))

    def row(self, group: str, method: Method) -> ReportRow:
        return next(r for r in self.rows if r.group == group and r.method is method)

    def metadata(self) -> Dict[str, object]:
        return {
            "command": self.command,
            "methods": [m.value for m in self.methods],
            "weights": self.weights,
            "version": self.version,
            "seed": self.seed,
            "source": self.source,
            "groups": len({r.group for r in self.rows}),
        }
