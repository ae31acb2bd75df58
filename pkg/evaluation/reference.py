"""Published rejection rates and application p-values used as acceptance targets."""

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Dict, List

from tcct.models.pvalues import Method

TABLES_PATH = Path(__file__).with_name("paper_tables.json")


@lru_cache(maxsize=1)
def load_tables() -> Dict[str, List[dict]]:
    with TABLES_PATH.open(encoding="utf-8") as f:
        return json.load(f)


def rejection_rate(table: str, rho: float, alpha: float, method: Method, effect: float = None) -> float:
    """Published rate of `method` in table1, table2 or tableA1.

    tableA1 holds both effects; pass `effect` to choose type I error (0) or power.
    """
    for record in load_tables()[table]:
        if (
            math.isclose(record["rho"], rho)
            and math.isclose(record["alpha"], alpha)
            and (effect is None or math.isclose(record["effect"], effect))
            and method.value in record
        ):
            return float(record[method.value])
    raise KeyError((table, rho, alpha, method.value, effect))


def chromosome_pvalues() -> Dict[str, Dict[Method, float]]:
    """Per-chromosome CCT and TCCT p-values of the GWAS application."""
    return {
        r["chromosome"]: {Method.CCT: float(r["cct"]), Method.TCCT: float(r["tcct"])}
        for r in load_tables()["table3"]
    }
