"""Monte Carlo harness: determinism, block independence, and small-scale sanity."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from tcct.core.config import settings
from tcct.models.pvalues import Method
from tcct.models.scenarios import PowerCurve, PowerHeatmap, RejectionRow, RejectionTable, ScenarioConfig
from tcct.services.simulation import SimulationService, balanced_design, scenario_replications


def small_config(**overrides) -> ScenarioConfig:
    values = dict(d=20, n=30, rho=0.3, effect=0.0, replications=120, seed=5)
    values.update(overrides)
    return ScenarioConfig(**values)


def counts(table: RejectionTable):
    return [(r.method, r.alpha, r.rejections) for r in table.sorted_rows()]


class TestScenarioModels:
    @pytest.mark.parametrize(
        "overrides",
        [{"rho": 1.5}, {"rho": -0.1}, {"d": 0}, {"n": 2}, {"alpha_levels": [1.0]}, {"alpha_levels": []}, {"methods": []}],
    )
    def test_invalid_config(self, overrides):
        with pytest.raises(ValidationError):
            small_config(**overrides)

    def test_duplicate_methods_collapse(self):
        assert small_config(methods=[Method.TCCT, Method.TCCT, Method.CCT]).methods == [Method.TCCT, Method.CCT]

    def test_row_rate_and_se(self):
        row = RejectionRow(effect=0.0, rho=0.0, alpha=0.05, method=Method.TCCT, rejections=30, replications=400)
        assert row.rate == 0.075
        assert row.se == pytest.approx(math.sqrt(0.075 * 0.925 / 400))

    def test_row_counts_checked(self):
        with pytest.raises(ValidationError):
            RejectionRow(effect=0.0, rho=0.0, alpha=0.05, method=Method.CCT, rejections=5, replications=4)

    def test_table_order_and_lookup(self):
        rows = [
            RejectionRow(effect=0.0, rho=rho, alpha=alpha, method=m, rejections=1, replications=10)
            for rho in (0.6, 0.0)
            for alpha in (0.01, 0.05)
            for m in (Method.TIPPETT, Method.CCT)
        ]
        table = RejectionTable(rows=rows)
        ordered = [(r.rho, r.alpha, r.method.value) for r in table.sorted_rows()]
        assert ordered[:3] == [(0.0, 0.05, "cct"), (0.0, 0.05, "tippett"), (0.0, 0.01, "cct")]
        assert table.lookup(0.6, 0.01, Method.CCT).rho == 0.6
        with pytest.raises(KeyError):
            table.lookup(0.3, 0.01, Method.CCT)

    def test_curve_grid_must_increase(self):
        with pytest.raises(ValidationError):
            PowerCurve(c_grid=[0.1, 0.1], level=0.05, replications=10, powers={Method.TCCT: [0.1, 0.2]})

    def test_heatmap_shapes_bounded(self):
        with pytest.raises(ValidationError):
            PowerHeatmap(shape1=[2.5], shape2=[1.0], level=0.05, replications=1, tcct=[[0.0]], cct=[[0.0]])

    def test_heatmap_cell(self):
        heatmap = PowerHeatmap(
            shape1=[0.5, 1.0], shape2=[1.0], level=0.05, replications=10,
            tcct=[[0.9], [0.1]], cct=[[0.6], [0.1]],
        )
        assert heatmap.cell(0.5, 1.0) == pytest.approx({"tcct": 0.9, "cct": 0.6, "gain": 0.3})


class TestHelpers:
    def test_balanced_design(self):
        assert balanced_design(5).tolist() == [-1.0, -1.0, 1.0, 1.0, 1.0]
        assert balanced_design(100).sum() == 0

    def test_group_means_differ_by_twice_the_effect(self):
        mean = 0.25 * balanced_design(100)
        assert mean[50:].mean() - mean[:50].mean() == pytest.approx(0.5)

    def test_replication_counts(self):
        assert scenario_replications(0.0) == settings.DESK_REPLICATIONS
        assert scenario_replications(0.0, full_scale=True) == 100_000
        assert scenario_replications(0.25, full_scale=True) == 10_000


class TestRegressionScenario:
    def test_single_replication(self):
        table = SimulationService().run_regression_scenario(small_config(replications=1))
        assert all(r.rate in (0.0, 1.0) for r in table.rows)
        assert len(table.rows) == 4 * 2

    def test_deterministic(self):
        svc = SimulationService()
        assert counts(svc.run_regression_scenario(small_config())) == counts(svc.run_regression_scenario(small_config()))

    def test_seed_changes_draws(self):
        svc = SimulationService()
        a = svc.run_regression_scenario(small_config(replications=300, seed=1))
        b = svc.run_regression_scenario(small_config(replications=300, seed=2))
        assert counts(a) != counts(b)

    def test_block_split_does_not_matter(self):
        cfg = small_config()
        assert counts(SimulationService(block_size=7).run_regression_scenario(cfg)) == counts(
            SimulationService(block_size=1000).run_regression_scenario(cfg)
        )

    def test_process_pool_matches_sequential(self):
        cfg = small_config()
        pooled = SimulationService(workers=2, block_size=30).run_regression_scenario(cfg)
        assert counts(pooled) == counts(SimulationService(workers=1).run_regression_scenario(cfg))

    def test_tmin_comparison_uses_same_draws(self):
        svc = SimulationService()
        cfg = small_config()
        direct = svc.run_regression_scenario(cfg.model_copy(update={"methods": [Method.TMIN, Method.TIPPETT]}))
        assert counts(svc.run_tmin_comparison(cfg)) == counts(direct)

    def test_effect_raises_power(self):
        svc = SimulationService()
        null = svc.run_regression_scenario(small_config(replications=200))
        alt = svc.run_regression_scenario(small_config(replications=200, effect=1.0))
        for method in (Method.TCCT, Method.CCT):
            assert alt.lookup(0.3, 0.05, method).rate > null.lookup(0.3, 0.05, method).rate


class TestPowerCurve:
    def test_cct_stalls_while_tcct_climbs(self):
        curve = SimulationService().run_one_sided_curve([0.0, 0.45], reps=1000, seed=3)
        assert 0.025 <= curve.powers[Method.TCCT][0] <= 0.13
        assert 0.01 <= curve.powers[Method.CCT][0] <= 0.11
        assert curve.powers[Method.TCCT][1] >= 0.9
        assert curve.powers[Method.CCT][1] <= 0.55

    def test_deterministic_and_block_free(self):
        a = SimulationService(block_size=11).run_one_sided_curve([0.1, 0.2], d=10, n=20, reps=40, seed=9)
        b = SimulationService().run_one_sided_curve([0.1, 0.2], d=10, n=20, reps=40, seed=9)
        assert a == b

    def test_se(self):
        curve = SimulationService().run_one_sided_curve([0.3], d=10, n=20, reps=50, seed=1)
        p = curve.powers[Method.TCCT][0]
        assert curve.se(Method.TCCT) == [pytest.approx(math.sqrt(p * (1 - p) / 50))]


class TestBetaHeatmap:
    def test_gain_never_negative(self):
        heatmap = SimulationService().run_beta_heatmap([0.3, 1.0, 2.0], d=50, reps=150, seed=4)
        assert all(g >= 0.0 for row in heatmap.gain for g in row)
        assert np.asarray(heatmap.tcct).shape == (3, 3)

    def test_small_shape1_is_powerful(self):
        heatmap = SimulationService().run_beta_heatmap([0.2], d=100, reps=100, seed=4, shape2_grid=[1.0])
        assert heatmap.cell(0.2, 1.0)["tcct"] >= 0.95

    def test_rectangular_grid(self):
        heatmap = SimulationService().run_beta_heatmap([0.5, 1.0], d=10, reps=20, shape2_grid=[1.0, 1.5, 2.0])
        assert heatmap.shape2 == [1.0, 1.5, 2.0]
        assert np.asarray(heatmap.cct).shape == (2, 3)
