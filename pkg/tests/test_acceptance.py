"""Reproductions of the published tables and figures (opt-in: pytest --runslow).

Simulated rates are compared with the published ones using the binomial
standard errors of both estimates.
"""

import math
import os
from pathlib import Path

import pandas as pd
import pytest

from evaluation.reference import chromosome_pvalues, rejection_rate
from tcct.core.config import settings
from tcct.models.pvalues import Method
from tcct.models.scenarios import ScenarioConfig, binomial_se
from tcct.services.ingest import ingest_service
from tcct.services.simulation import SimulationService

pytestmark = pytest.mark.slow

RHOS = (0.0, 0.3, 0.6, 0.9)
ALPHAS = (0.05, 0.01)
CLASSICAL = (Method.TCCT, Method.CCT, Method.FISHER, Method.TIPPETT)
GWAS_DEFAULT = Path(__file__).with_name("fixtures") / "gwasResults.csv"


@pytest.fixture(scope="module")
def runner() -> SimulationService:
    return SimulationService(workers=settings.WORKERS)


def combined_se(rate: float, replications: int, published: float, published_replications: int) -> float:
    se = math.hypot(binomial_se(rate, replications), binomial_se(published, published_replications))
    return max(se, 1.0 / replications)


def assert_close(row, published: float, published_replications: int) -> None:
    se = combined_se(row.rate, row.replications, published, published_replications)
    assert abs(row.rate - published) <= 3 * se, (
        f"{row.method.value} rho={row.rho} alpha={row.alpha}: {row.rate:.5f} vs {published:.5f} (se {se:.5f})"
    )


@pytest.mark.parametrize("rho", RHOS)
def test_type_one_error_table(runner, rho):
    cfg = ScenarioConfig(rho=rho, effect=0.0, alpha_levels=list(ALPHAS), replications=10_000,
                         seed=settings.DEFAULT_SEED, methods=list(CLASSICAL))
    table = runner.run_regression_scenario(cfg)
    for alpha in ALPHAS:
        for method in CLASSICAL:
            assert_close(table.lookup(rho, alpha, method), rejection_rate("table1", rho, alpha, method), 100_000)


def test_fisher_inflates_under_correlation(runner):
    cfg = ScenarioConfig(rho=0.6, effect=0.0, alpha_levels=[0.001], replications=2000,
                         seed=settings.DEFAULT_SEED, methods=[Method.FISHER])
    assert runner.run_regression_scenario(cfg).lookup(0.6, 0.001, Method.FISHER).rate > 0.1


@pytest.mark.parametrize("rho", RHOS)
def test_power_table(runner, rho):
    cfg = ScenarioConfig(rho=rho, effect=0.25, alpha_levels=list(ALPHAS), replications=2000,
                         seed=settings.DEFAULT_SEED, methods=list(CLASSICAL))
    table = runner.run_regression_scenario(cfg)
    for alpha in ALPHAS:
        for method in CLASSICAL:
            assert_close(table.lookup(rho, alpha, method), rejection_rate("table2", rho, alpha, method), 10_000)
        # shared draws: truncation never loses power
        assert table.lookup(rho, alpha, Method.TCCT).rate >= table.lookup(rho, alpha, Method.CCT).rate


@pytest.mark.parametrize("effect", [0.0, 0.25])
@pytest.mark.parametrize("rho", RHOS)
def test_minimum_p_comparison(runner, rho, effect):
    cfg = ScenarioConfig(rho=rho, effect=effect, alpha_levels=list(ALPHAS), replications=2000,
                         seed=settings.DEFAULT_SEED)
    table = runner.run_tmin_comparison(cfg)
    for alpha in ALPHAS:
        tmin = table.lookup(rho, alpha, Method.TMIN, effect)
        tippett = table.lookup(rho, alpha, Method.TIPPETT, effect)
        for row in (tmin, tippett):
            assert_close(row, rejection_rate("tableA1", rho, alpha, row.method, effect), 10_000)
        assert abs(tmin.rate - tippett.rate) <= 0.01 + 3 * max(tmin.se, tippett.se)


def test_one_sided_power_curve(runner):
    curve = runner.run_one_sided_curve(settings.c_grid, reps=2000, seed=settings.DEFAULT_SEED)
    tcct, cct = curve.powers[Method.TCCT], curve.powers[Method.CCT]
    assert tcct[-1] >= 0.9
    assert cct[-1] <= 0.55
    assert 0.02 <= cct[0] <= 0.10
    assert 0.02 <= tcct[0] <= 0.10
    se = curve.se(Method.TCCT)
    for k in range(1, len(tcct)):
        assert tcct[k] >= tcct[k - 1] - 3 * max(se[k], se[k - 1])


def test_beta_power_heatmap(runner):
    heatmap = runner.run_beta_heatmap([0.1, 0.2, 1.0], reps=2000, seed=settings.DEFAULT_SEED)
    assert all(g >= 0.0 for row in heatmap.gain for g in row)
    assert heatmap.cell(0.2, 0.1)["gain"] >= 0.4

    # Beta(1, 1) is the iid uniform null: CCT sits at the level, TCCT at its published size
    null = heatmap.cell(1.0, 1.0)
    tcct_size = rejection_rate("table1", 0.0, heatmap.level, Method.TCCT)
    assert abs(null["cct"] - heatmap.level) <= 3 * binomial_se(heatmap.level, 2000)
    assert abs(null["tcct"] - tcct_size) <= 3 * binomial_se(tcct_size, 2000)
    gain_se = math.hypot(binomial_se(tcct_size, 2000), binomial_se(heatmap.level, 2000))
    assert abs(null["gain"] - (tcct_size - heatmap.level)) <= 3 * gain_se


def gwas_results() -> Path:
    path = Path(os.environ.get("TCCT_GWAS_RESULTS", GWAS_DEFAULT))
    if not path.exists():
        pytest.skip(f"GWAS results table not found at {path}; set TCCT_GWAS_RESULTS to run this check")
    return path


def test_chromosome_combination(tmp_path):
    path = gwas_results()
    frame = pd.read_csv(path)
    counts = frame["CHR"].value_counts()
    assert len(frame) == 16_470
    assert len(counts) == 22
    assert (counts[22], counts[1]) == (535, 1500)

    report = ingest_service.run_combine(path, "CHR", "P", [Method.TCCT, Method.CCT], tmp_path / "chromosomes.csv")
    for chromosome, published in chromosome_pvalues().items():
        for method, value in published.items():
            got = report.row(chromosome, method).p_combined
            if value < 1e-3:
                assert got == pytest.approx(value, rel=0.01), f"chr{chromosome} {method.value}"
            else:
                assert got == pytest.approx(value, abs=1e-3), f"chr{chromosome} {method.value}"
