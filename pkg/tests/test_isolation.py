"""Group isolation test: verify one group's p-values never leak into another's result."""

from pathlib import Path

import pandas as pd
from loguru import logger

from tcct.models.pvalues import Method
from tcct.services.ingest import ingest_service


def test_group_isolation(tmp_path: Path) -> None:
    """Combine group A alone, then alongside group B; A's rows must not change.

    Group B holds a p-value of exactly 1, which would pin CCT at 1 if it
    reached group A, and a p-value of exactly 0, which would pin both methods at 0.
    """
    logger.info("Starting Group Isolation Test...")
    methods = [Method.TCCT, Method.CCT]

    # Data for group A only
    group_a = pd.DataFrame({"CHR": ["A"] * 4, "P": [0.012, 0.3, 0.7, 0.05]})
    alone = tmp_path / "alone.csv"
    group_a.to_csv(alone, index=False)
    report_alone = ingest_service.run_combine(alone, "CHR", "P", methods, tmp_path / "alone.out.csv")
    logger.info("Group A combined on its own.")

    # Interleave group B's extreme p-values with A's rows
    group_b = pd.DataFrame({"CHR": ["B", "B"], "P": [1.0, 0.0]})
    mixed = tmp_path / "mixed.csv"
    pd.concat([group_b.iloc[:1], group_a, group_b.iloc[1:]]).to_csv(mixed, index=False)
    logger.info("Combining group A alongside group B...")
    report_mixed = ingest_service.run_combine(mixed, "CHR", "P", methods, tmp_path / "mixed.out.csv")

    for method in methods:
        assert report_mixed.row("A", method) == report_alone.row("A", method), f"{method} leaked across groups"
    assert report_mixed.row("B", Method.TCCT).p_combined == 0.0
    logger.success("ISOLATION VERIFIED: group A's results are unchanged by group B.")
