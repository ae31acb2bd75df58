"""`simulate`: seeded reproductions of the rejection tables and power figures."""

import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd
from loguru import logger
from pydantic import ValidationError

from tcct.cli import float_list, method_list
from tcct.core.config import settings
from tcct.core.errors import ConfigError
from tcct.models.scenarios import PowerCurve, PowerHeatmap, RejectionTable, ScenarioConfig
from tcct.services.ingest import write_csv, write_meta
from tcct.services.plots import render_heatmap, render_power_curve, save_svg
from tcct.services.simulation import scenario_replications, simulation_service

EXPERIMENTS = ("table1", "table2", "tableA1", "figure1", "figure2")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "simulate",
        help="run a seeded Monte Carlo experiment",
        description=(
            "table1: type I error (effect 0); table2: power; tableA1: T_min against Tippett at both; "
            "figure1: one-sided power curve over c; figure2: power over a Beta shape grid."
        ),
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--d", type=int, default=None, help="number of combined tests")
    parser.add_argument("--n", type=int, default=None, help="sample size of each test")
    parser.add_argument("--rho", type=float_list, default=None, help="exchangeable correlations")
    parser.add_argument("--effect", type=float, default=None, help="regression slope for power runs")
    parser.add_argument("--alpha", type=float_list, default=None, help="significance levels")
    parser.add_argument("--reps", type=int, default=None, help="Monte Carlo replications")
    parser.add_argument("--seed", type=int, default=None, help="defaults to TCCT_DEFAULT_SEED")
    parser.add_argument("--methods", type=method_list, default=None)
    parser.add_argument("--full-scale", action="store_true", help="use the published replication counts")
    parser.add_argument("--c", dest="c_grid", type=float_list, default=None, help="figure1 c grid")
    parser.add_argument("--shapes", type=float_list, default=None, help="figure2 Beta shape grid")
    parser.add_argument("--level", type=float, default=None, help="figure significance level")
    parser.add_argument("--output-dir", type=Path, default=Path("results"))
    parser.set_defaults(handler=handle)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _pick(value, default):
    return default if value is None else value


def _seed(args: argparse.Namespace) -> int:
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    _require(0 <= seed < 2**64, f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _scenario_configs(
    args: argparse.Namespace, effects: List[float], replications: Callable[[float], int]
) -> List[ScenarioConfig]:
    alphas = args.alpha or (settings.full_alpha_levels if args.full_scale else settings.desk_alpha_levels)
    extra = {"methods": args.methods} if args.methods else {}
    try:
        return [
            ScenarioConfig(
                d=_pick(args.d, settings.N_TESTS),
                n=_pick(args.n, settings.SAMPLE_SIZE),
                rho=rho,
                effect=effect,
                alpha_levels=alphas,
                replications=args.reps if args.reps is not None else replications(effect),
                seed=_seed(args),
                **extra,
            )
            for effect in effects
            for rho in args.rho or settings.rho_grid
        ]
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario override: {e}") from e


def _table_frame(table: RejectionTable) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "effect": r.effect, "rho": r.rho, "alpha": r.alpha, "method": r.method.value,
                "rejections": r.rejections, "replications": r.replications, "rate": r.rate, "se": r.se,
            }
            for r in table.sorted_rows()
        ],
        columns=["effect", "rho", "alpha", "method", "rejections", "replications", "rate", "se"],
    )


def _run_tables(args: argparse.Namespace, effects: List[float], tmin: bool) -> RejectionTable:
    if tmin:
        full = settings.FULL_POWER_REPLICATIONS if args.full_scale else settings.DESK_REPLICATIONS
        configs = _scenario_configs(args, effects, lambda effect: full)
    else:
        configs = _scenario_configs(args, effects, lambda effect: scenario_replications(effect, args.full_scale))
    run = simulation_service.run_tmin_comparison if tmin else simulation_service.run_regression_scenario
    table = RejectionTable(rows=[])
    for cfg in configs:
        table = table.merge(run(cfg))
    return table


def _figure1(args: argparse.Namespace) -> PowerCurve:
    grid = args.c_grid or settings.c_grid
    _require(all(b > a for a, b in zip(grid, grid[1:])), "c grid must be strictly increasing")
    _require(all(c >= 0.0 for c in grid), "c values must be nonnegative")
    d, n = _pick(args.d, settings.N_TESTS), _pick(args.n, settings.SAMPLE_SIZE)
    reps = args.reps if args.reps is not None else (
        settings.FULL_POWER_REPLICATIONS if args.full_scale else settings.DESK_REPLICATIONS
    )
    level = settings.FIGURE_LEVEL if args.level is None else args.level
    _require(d >= 1 and n >= 2 and reps >= 1, "figure1 needs d >= 1, n >= 2 and reps >= 1")
    _require(0.0 < level < 1.0, f"level must lie in (0, 1), got {level}")
    return simulation_service.run_one_sided_curve(grid, d=d, n=n, reps=reps, seed=_seed(args), level=level)


def _figure2(args: argparse.Namespace) -> PowerHeatmap:
    grid = args.shapes or settings.shape_grid
    _require(all(0.0 < s <= 2.0 for s in grid), "Beta shapes must lie in (0, 2]")
    d = _pick(args.d, settings.N_TESTS)
    reps = args.reps if args.reps is not None else (
        settings.FULL_POWER_REPLICATIONS if args.full_scale else settings.DESK_REPLICATIONS
    )
    level = settings.FIGURE_LEVEL if args.level is None else args.level
    _require(d >= 1 and reps >= 1, "figure2 needs d >= 1 and reps >= 1")
    _require(0.0 < level < 1.0, f"level must lie in (0, 1), got {level}")
    return simulation_service.run_beta_heatmap(grid, d=d, reps=reps, alpha_level=level, seed=_seed(args))


def _write(args: argparse.Namespace, frame: pd.DataFrame, parameters: Dict[str, object], svg: Optional[str]) -> None:
    path = args.output_dir / f"{args.experiment}.csv"
    write_csv(frame, path)
    write_meta(path, {"experiment": args.experiment, "version": settings.VERSION, **parameters})
    logger.info(f"Wrote {len(frame)} rows to {path}")
    if svg is not None:
        save_svg(svg, path.with_suffix(".svg"))


def handle(args: argparse.Namespace) -> int:
    seed = _seed(args)
    if args.experiment in ("table1", "table2", "tableA1"):
        effect = settings.EFFECT_SIZE if args.effect is None else args.effect
        effects = {"table1": [0.0], "table2": [effect], "tableA1": [0.0, effect]}[args.experiment]
        table = _run_tables(args, effects, tmin=args.experiment == "tableA1")
        _write(args, _table_frame(table), {"seed": seed, "effects": effects, "full_scale": args.full_scale}, None)
    elif args.experiment == "figure1":
        curve = _figure1(args)
        frame = pd.DataFrame(
            [
                {"c": c, "method": method.value, "power": curve.powers[method][k], "se": curve.se(method)[k]}
                for k, c in enumerate(curve.c_grid)
                for method in sorted(curve.powers, key=lambda m: m.value)
            ],
            columns=["c", "method", "power", "se"],
        )
        parameters = {"seed": seed, "level": curve.level, "replications": curve.replications}
        _write(args, frame, parameters, render_power_curve(curve))
    else:
        heatmap = _figure2(args)
        frame = pd.DataFrame(
            [
                {"shape1": a, "shape2": b, "tcct": heatmap.tcct[i][j], "cct": heatmap.cct[i][j], "gain": heatmap.gain[i][j]}
                for i, a in enumerate(heatmap.shape1)
                for j, b in enumerate(heatmap.shape2)
            ],
            columns=["shape1", "shape2", "tcct", "cct", "gain"],
        )
        parameters = {"seed": seed, "level": heatmap.level, "replications": heatmap.replications}
        _write(args, frame, parameters, render_heatmap(heatmap))
    return 0
