"""CSV ingestion pipelines: grouped p-value combination and longitudinal two-part testing."""

import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from tcct.core.config import settings
from tcct.core.errors import (
    DataError,
    IndeterminateStatisticError,
    MissingColumnError,
    UnparseablePValueError,
    UsageError,
)
from tcct.models.outcomes import OutcomeNote, Sample, Sidedness, TestOutcome
from tcct.models.pvalues import Method, PValueVector, WeightVector
from tcct.models.reports import (
    CellResult,
    GroupedPRow,
    GroupedPTable,
    LongitudinalRow,
    LongitudinalTable,
    PipelineMode,
    ReportRow,
    RunReport,
)
from tcct.services.combiners import combination_service
from tcct.services.hypothesis import hypothesis_service

LONGITUDINAL_COLUMNS = ("unit_id", "timepoint", "feature", "response", "covariate")
FLOAT_FORMAT = "%.10g"
_HEADER_LINES = 1  # data row i sits on file line i + 2


def read_csv(path: Path) -> pd.DataFrame:
    """Read every cell as text; numeric parsing is done per column so errors carry line numbers."""
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as e:
        raise UsageError(f"Input file not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise DataError(f"Input file has no header row: {path}") from e
    except UnicodeDecodeError as e:
        raise DataError(f"Input file is not valid UTF-8: {path} (byte {e.start})") from e
    except pd.errors.ParserError as e:
        raise DataError(f"Input file is not well-formed CSV: {path}: {e}") from e


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def meta_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.meta.json")


def write_meta(path: Path, metadata: Dict[str, object]) -> None:
    """Write the JSON sidecar of an output file with sorted keys."""
    meta_path(path).write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _require(frame: pd.DataFrame, columns: Sequence[str]) -> None:
    for column in columns:
        if column not in frame.columns:
            raise MissingColumnError(column)


def _numeric(frame: pd.DataFrame, column: str) -> pd.Series:
    return pd.to_numeric(frame[column].str.strip(), errors="coerce")


def _first_bad(mask: pd.Series) -> Optional[int]:
    hits = np.flatnonzero(mask.to_numpy())
    return int(hits[0]) if hits.size else None


def _line(i: int) -> int:
    return i + _HEADER_LINES + 1


class IngestService:
    """Reads input tables, runs the combiners over them, and writes reports."""

    def read_grouped(
        self, path: Path, group_col: str, p_col: str, weight_col: Optional[str] = None
    ) -> GroupedPTable:
        """Load (group, p, weight) rows; test ids are the file line numbers.

        Raises:
            MissingColumnError: a requested column is absent.
            UnparseablePValueError: a p-value is not a number in [0, 1].
            DataError: a weight is not a nonnegative number.
        """
        frame = read_csv(path)
        _require(frame, [group_col, p_col] + ([weight_col] if weight_col else []))

        p = _numeric(frame, p_col)
        bad = _first_bad(p.isna() | (p < 0.0) | (p > 1.0))
        if bad is not None:
            raise UnparseablePValueError(row=_line(bad), value=frame[p_col].iloc[bad])

        weights: List[Optional[float]] = [None] * len(frame)
        if weight_col:
            w = _numeric(frame, weight_col)
            bad = _first_bad(w.isna() | (w < 0.0) | np.isinf(w))
            if bad is not None:
                raise DataError(
                    f"Row {_line(bad)}: weight {frame[weight_col].iloc[bad]!r} is not a nonnegative number"
                )
            weights = [float(v) for v in w]

        rows = [
            GroupedPRow(group=g, test_id=str(_line(i)), p=float(pv), weight=wv)
            for i, (g, pv, wv) in enumerate(zip(frame[group_col], p, weights))
        ]
        table = GroupedPTable(rows=rows, weighted=weight_col is not None)
        logger.info(f"Read {len(rows)} p-values in {len(table.groups())} groups from {path}")
        return table

    def combine_groups(self, table: GroupedPTable, methods: Sequence[Method]) -> List[ReportRow]:
        """One row per group and method; supplied weights are normalized within each group."""
        rows: List[ReportRow] = []
        for group, (ps, raw_weights) in table.groups().items():
            p = PValueVector.of(ps)
            try:
                w = WeightVector.normalized(raw_weights) if raw_weights is not None else None
            except ValueError as e:
                raise DataError(f"Group {group}: {e}") from e
            rows.extend(self._combine_all(group, p, w, methods))
        return rows

    def run_combine(
        self,
        input_path: Path,
        group_col: str,
        p_col: str,
        methods: Sequence[Method],
        output_path: Path,
        weight_col: Optional[str] = None,
    ) -> RunReport:
        """Grouped combination from CSV to CSV plus a JSON sidecar."""
        logger.info(f"Combining {input_path} by {group_col} with {[m.value for m in methods]}")
        table = self.read_grouped(input_path, group_col, p_col, weight_col)
        report = RunReport(
            command="combine",
            methods=list(methods),
            weights=f"normalized:{weight_col}" if weight_col else "uniform",
            version=settings.VERSION,
            source=input_path.name,
            rows=self.combine_groups(table, methods),
        )
        self.write_report(report, output_path)
        return report

    def read_longitudinal(self, path: Path, block_col: Optional[str] = None) -> LongitudinalTable:
        """Load unit_id, timepoint, feature, response, covariate (and optional block) columns.

        Raises:
            MissingColumnError: a required column is absent.
            DataError: a non-numeric value, a non-integer timepoint, or a repeated
                (unit_id, timepoint, feature) measurement.
        """
        frame = read_csv(path)
        _require(frame, list(LONGITUDINAL_COLUMNS) + ([block_col] if block_col else []))

        numeric: Dict[str, pd.Series] = {}
        for column in ("timepoint", "response", "covariate"):
            values = _numeric(frame, column)
            invalid = values.isna() | np.isinf(values)
            if column == "timepoint":
                invalid |= values != values.round()
            bad = _first_bad(invalid)
            if bad is not None:
                raise DataError(f"Row {_line(bad)}: {column} {frame[column].iloc[bad]!r} is not a valid number")
            numeric[column] = values

        repeated = _first_bad(frame.duplicated(subset=["unit_id", "timepoint", "feature"]))
        if repeated is not None:
            raise DataError(f"Row {_line(repeated)}: repeated measurement of unit, timepoint and feature")

        blocks = frame[block_col] if block_col else [None] * len(frame)
        rows = [
            LongitudinalRow(
                unit_id=u, timepoint=int(t), feature=f, response=float(y), covariate=float(x), block=b,
            )
            for u, t, f, y, x, b in zip(
                frame["unit_id"], numeric["timepoint"], frame["feature"],
                numeric["response"], numeric["covariate"], blocks,
            )
        ]
        logger.info(f"Read {len(rows)} measurements from {path}")
        return LongitudinalTable(rows=rows)

    def longitudinal_cells(self, table: LongitudinalTable, mode: PipelineMode) -> List[CellResult]:
        """Run the elementary test(s) of every (block, feature, timepoint) cell.

        Cells that cannot support a test resolve to p = 1 with note INSUFFICIENT_DATA.
        """
        if mode is PipelineMode.TWO_PART and not table.has_binary_covariate():
            raise DataError("two-part mode needs a binary covariate")
        cells: List[CellResult] = []
        for (block, feature, timepoint), (ys, xs) in table.cells().items():
            for part, outcome in enumerate(self._test_cell(ys, xs, mode, f"{block}/{feature}/{timepoint}"), start=1):
                cells.append(
                    CellResult(
                        block=block, feature=feature, timepoint=timepoint, part=part,
                        statistic=outcome.statistic, p_value=outcome.p_value, note=outcome.note,
                    )
                )
        logger.info(f"Tested {len(cells)} cells in {mode.value} mode")
        return cells

    def combine_cells(self, cells: Sequence[CellResult], methods: Sequence[Method]) -> List[ReportRow]:
        """Pool every cell p-value of a block into one vector and combine it."""
        pooled: Dict[str, List[float]] = {}
        for cell in cells:
            pooled.setdefault(cell.block, []).append(cell.p_value)
        rows: List[ReportRow] = []
        for block, ps in pooled.items():
            rows.extend(self._combine_all(block, PValueVector.of(ps), None, methods))
        return rows

    def run_longitudinal(
        self,
        input_path: Path,
        mode: PipelineMode,
        methods: Sequence[Method],
        output_path: Path,
        block_col: Optional[str] = None,
    ) -> RunReport:
        """Longitudinal pipeline from CSV to a combined report plus a per-cell side CSV."""
        logger.info(f"Longitudinal pipeline on {input_path}: mode={mode.value}, blocks={block_col or 'none'}")
        table = self.read_longitudinal(input_path, block_col)
        cells = self.longitudinal_cells(table, mode)
        report = RunReport(
            command=f"longitudinal {mode.value}",
            methods=list(methods),
            weights="uniform",
            version=settings.VERSION,
            source=input_path.name,
            rows=self.combine_cells(cells, methods),
        )
        self.write_report(report, output_path)
        self.write_cells(cells, output_path.with_name(f"{output_path.stem}.cells.csv"))
        return report

    def write_report(self, report: RunReport, path: Path) -> None:
        frame = pd.DataFrame(
            [
                {
                    "group": r.group,
                    "method": r.method.value,
                    "n_tests": r.n_tests,
                    "statistic": r.statistic,
                    "p_combined": r.p_combined,
                    "flags": r.flag_text(),
                }
                for r in report.sorted_rows()
            ],
            columns=["group", "method", "n_tests", "statistic", "p_combined", "flags"],
        )
        write_csv(frame, path)
        write_meta(path, report.metadata())
        logger.info(f"Wrote {len(frame)} report rows to {path}")

    def write_cells(self, cells: Sequence[CellResult], path: Path) -> None:
        frame = pd.DataFrame(
            [
                {
                    "block": c.block,
                    "feature": c.feature,
                    "timepoint": c.timepoint,
                    "part": c.part,
                    "statistic": c.statistic,
                    "p_value": c.p_value,
                    "note": c.note.value if c.note else "",
                }
                for c in cells
            ],
            columns=["block", "feature", "timepoint", "part", "statistic", "p_value", "note"],
        )
        write_csv(frame, path)

    def _combine_all(
        self, group: str, p: PValueVector, w: Optional[WeightVector], methods: Sequence[Method]
    ) -> List[ReportRow]:
        rows: List[ReportRow] = []
        for method in methods:
            try:
                result = combination_service.combine(method, p, w)
            except IndeterminateStatisticError:
                logger.warning(f"Group {group}: {method.value} undefined, reported as DEGENERATE_INPUT")
                rows.append(ReportRow.degenerate(group, len(p), method))
            else:
                rows.append(ReportRow.from_result(group, len(p), result))
        return rows

    def _test_cell(self, ys: List[float], xs: List[float], mode: PipelineMode, label: str) -> List[TestOutcome]:
        parts = 1 if mode is PipelineMode.ONE_PART else 2
        try:
            sample = Sample.of(ys, xs)
            if mode is PipelineMode.ONE_PART:
                return [hypothesis_service.ols_slope_test(sample)]
            return list(hypothesis_service.two_part_test(sample))
        except ValueError as e:
            # DomainError and pydantic's ValidationError are both ValueErrors
            logger.warning(f"Cell {label}: {e}; reporting p = 1")
            return [
                TestOutcome(statistic=0.0, p_value=1.0, sided=Sidedness.TWO_SIDED, note=OutcomeNote.INSUFFICIENT_DATA)
            ] * parts


ingest_service = IngestService()
