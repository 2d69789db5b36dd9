"""Command-line surface: solvers, oracles, and plottable CSV/JSON emission.

Subcommands:

    solve-section    stationary law and measures of one section
    solve-tandem     throughput fixed point of a two-section scenario
    distributions    speed / travel-time law as value,probability CSV
    sweep            arrival-rate sweep as CSV (tandem or single section)
    simulate         seeded Monte Carlo run vs the analytical law
    compare          analytical vs exact-solve vs simulated, with TV distances
    fit-exponential  congestion-curve fit from two anchor points
    figure-data      canned comparison datasets (fig4..fig10 presets)

Exit codes: 0 success, 2 configuration or usage errors, 3 numerical
failures (singular model, non-convergence, oracle residual), 4 file I/O
failures.  Nothing is written on a nonzero exit.

CSV numbers carry 12 significant digits for regression-diff stability.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .config import (
    EXPONENTIAL,
    LINEAR,
    TRIANGULAR,
    Scenario,
    load_scenario,
)
from .congestion import FitAnchors, LinearCongestionModel, fit_exponential
from .ctmc import (
    OracleError,
    birth_death_chain,
    decomposition_diagnostic,
    exact_stationary,
    simulate,
    tv_distance,
)
from .distributions import (
    MODES,
    PAPER_GRID,
    PUSHFORWARD,
    DiscreteDistribution,
    speed_dist_linear,
    speed_dist_triangular,
    travel_time_dist_linear,
    travel_time_dist_triangular,
)
from .fundamental import CONVENTIONS, RoadSection, service_rates
from .queueing import (
    OccupancyDistribution,
    SingularModelError,
    jain_smith_rates,
    measures,
    solve_birth_death,
)
from .tandem import ConvergenceError, scan_roots, solve_fixed_point, tandem_measures

SPEED = "speed"
TRAVEL_TIME = "travel-time"
FIGURES = ("fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10")

_FIGURE_SWEEP = np.linspace(0.1, 2.0, 40)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _csv(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(
            ",".join(
                str(cell) if isinstance(cell, int) else _fmt(cell)
                for cell in row
            )
        )
    return "\n".join(lines) + "\n"


def _json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _probs(dist) -> list[float]:
    return [float(p) for p in dist.probs]


def _scenario(args) -> Scenario:
    """Load the config and fold in command-line overrides."""
    scenario = load_scenario(args.config)
    overrides = {}
    for field in ("convention", "model", "beta", "gamma"):
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    return scenario


def _section_rates(scenario: Scenario, index: int) -> tuple[RoadSection, np.ndarray]:
    """A section and its per-state service rates under the scenario model."""
    section = scenario.section(index)
    if scenario.model == TRIANGULAR:
        rates = np.asarray(service_rates(section, scenario.convention))
    else:
        model = scenario.congestion_model(index)
        rates = jain_smith_rates(section.L, model)
    return section, rates


def _measures_payload(meas) -> dict:
    return {
        "blocking": meas.blocking,
        "throughput": meas.throughput,
        "expected_count": meas.expected_count,
        "expected_travel_time": meas.expected_travel_time,
        "free_flow_fallback": meas.free_flow_fallback,
    }


def _cmd_solve_section(args) -> str:
    scenario = _scenario(args)
    section, rates = _section_rates(scenario, args.section)
    dist = solve_birth_death(args.lam, rates)
    meas = measures(dist, args.lam, rates)
    payload = {
        "lambda": args.lam,
        "section": args.section,
        "model": scenario.model,
        "convention": scenario.convention,
        "distribution": _probs(dist),
        **_measures_payload(meas),
    }
    return _json(payload)


def _cmd_solve_tandem(args) -> str:
    scenario = _scenario(args)
    config = scenario.tandem()
    result = solve_fixed_point(
        config, args.lam, tol=args.tol, max_iter=args.max_iter
    )
    meas = tandem_measures(result, args.lam)
    payload = {
        "lambda": args.lam,
        "convention": config.convention,
        "theta": result.theta,
        "residual": result.residual,
        "iterations": result.iterations,
        **_measures_payload(meas),
        "marginal": _probs(result.marginal),
        "downstream": _probs(result.downstream),
        "tv_vs_exact_2d": decomposition_diagnostic(
            config, args.lam, result.marginal.probs
        ),
        "root_brackets": (
            [[lo, hi] for lo, hi in scan_roots(config, args.lam)]
            if args.scan_roots
            else None
        ),
    }
    return _json(payload)


def _occupancy_for_distributions(
    scenario: Scenario, args
) -> tuple[OccupancyDistribution, RoadSection]:
    """Occupancy law feeding the pushforward: tandem marginal when the
    scenario has two sections and no explicit --section, else the single
    section's own law."""
    if len(scenario.sections) == 2 and args.section is None:
        config = scenario.tandem()
        result = solve_fixed_point(config, args.lam)
        return result.marginal, config.section1
    index = args.section or 1
    section, rates = _section_rates(scenario, index)
    return solve_birth_death(args.lam, rates), section


def _cmd_distributions(args) -> str:
    scenario = _scenario(args)
    if scenario.model == TRIANGULAR:
        if args.mode == PAPER_GRID:
            raise ValueError(
                "mode 'paper-grid' applies to the linear model only"
            )
        occupancy, section = _occupancy_for_distributions(scenario, args)
        if args.kind == SPEED:
            dist = speed_dist_triangular(occupancy, section, scenario.convention)
        else:
            dist = travel_time_dist_triangular(
                occupancy, section, scenario.convention
            )
    elif scenario.model == LINEAR:
        index = args.section or 1
        section = scenario.section(index)
        model = scenario.congestion_model(index)
        maker = speed_dist_linear if args.kind == SPEED else travel_time_dist_linear
        dist = maker(args.lam, model, section.L, mode=args.mode)
    else:
        raise ValueError(
            "distributions support the triangular and linear models only"
        )
    return _csv("value,probability", zip(dist.support, dist.probs))


def _sweep_grid(args) -> np.ndarray:
    if args.steps < 2:
        raise ValueError(f"--steps must be at least 2, got {args.steps}")
    if not args.lambda_from < args.lambda_to:
        raise ValueError("--lambda-from must be below --lambda-to")
    if args.lambda_from < 0:
        raise ValueError("--lambda-from must be nonnegative")
    return np.linspace(args.lambda_from, args.lambda_to, args.steps)


def _cmd_sweep(args) -> str:
    scenario = _scenario(args)
    grid = _sweep_grid(args)
    if len(scenario.sections) == 2 and args.section is None:
        config = scenario.tandem()
        rows = []
        for lam in grid:
            result = solve_fixed_point(config, float(lam))
            meas = tandem_measures(result, float(lam))
            rows.append(
                (
                    float(lam),
                    result.theta,
                    meas.blocking,
                    meas.expected_count,
                    meas.expected_travel_time,
                    decomposition_diagnostic(
                        config, float(lam), result.marginal.probs
                    ),
                )
            )
        return _csv(
            "lambda,theta,blocking,expected_count,travel_time,tv_vs_exact_2d",
            rows,
        )
    index = args.section or 1
    _, rates = _section_rates(scenario, index)
    rows = []
    for lam in grid:
        dist = solve_birth_death(float(lam), rates)
        meas = measures(dist, float(lam), rates)
        rows.append(
            (
                float(lam),
                meas.blocking,
                meas.throughput,
                meas.expected_count,
                meas.expected_travel_time,
            )
        )
    return _csv("lambda,blocking,throughput,expected_count,travel_time", rows)


def _cmd_simulate(args) -> str:
    scenario = _scenario(args)
    _, rates = _section_rates(scenario, args.section)
    result = simulate(args.lam, rates, seed=args.seed, max_events=args.events)
    try:
        analytical = solve_birth_death(args.lam, rates)
        tv = tv_distance(result.empirical, analytical)
    except SingularModelError:
        tv = None  # no stationary law to compare against
    payload = {
        "lambda": args.lam,
        "section": args.section,
        "model": scenario.model,
        "convention": scenario.convention,
        "seed": result.seed,
        "events": result.events,
        "algorithm": result.algorithm,
        "elapsed_model_time": result.elapsed_model_time,
        "absorbed": result.absorbed,
        "empirical": _probs(result.empirical),
        "tv_vs_analytical": tv,
    }
    return _json(payload)


def _cmd_compare(args) -> str:
    scenario = _scenario(args)
    _, rates = _section_rates(scenario, args.section)
    analytical = solve_birth_death(args.lam, rates)
    exact = exact_stationary(birth_death_chain(args.lam, rates))
    sim = simulate(args.lam, rates, seed=args.seed, max_events=args.events)
    payload = {
        "lambda": args.lam,
        "section": args.section,
        "model": scenario.model,
        "convention": scenario.convention,
        "events": sim.events,
        "seed": sim.seed,
        "analytical": _probs(analytical),
        "exact": [float(p) for p in exact],
        "empirical": _probs(sim.empirical),
        "tv_analytical_vs_exact": tv_distance(analytical.probs, exact),
        "tv_empirical_vs_analytical": tv_distance(sim.empirical, analytical),
    }
    return _json(payload)


def _cmd_fit_exponential(args) -> str:
    if args.fit_vf is not None:
        v_f = args.fit_vf
    else:
        v_f = load_scenario(args.config).section(1).diagram.v_f
    anchors = FitAnchors(
        a=args.fit_a, v_a=args.fit_va, b=args.fit_b, v_b=args.fit_vb, v_f=v_f
    )
    beta, gamma = fit_exponential(anchors)
    return _json({"beta": beta, "gamma": gamma})


def _figure_distribution_csv(dist: DiscreteDistribution) -> str:
    return _csv("value,probability", zip(dist.support, dist.probs))


def _cmd_figure_data(args) -> str:
    scenario = _scenario(args)
    figure = args.figure
    if args.kind is not None and figure not in ("fig8", "fig9", "fig10"):
        raise ValueError("--kind applies to fig8, fig9, and fig10 only")
    if args.metric is not None and figure != "fig5":
        raise ValueError("--metric applies to fig5 only")
    kind = args.kind or SPEED

    if figure in ("fig4", "fig5", "fig6", "fig7", "fig9", "fig10"):
        config = scenario.tandem()  # raises on 1-section scenarios
        s1 = config.section1
        js_model = LinearCongestionModel(v_f=s1.diagram.v_f, c=s1.c)
        js_rates = jain_smith_rates(s1.L, js_model)

    if figure == "fig4":
        rows = []
        for lam in (0.5, 1.0, 1.5):
            ours = solve_fixed_point(config, lam).marginal
            js = solve_birth_death(lam, js_rates)
            for n in range(s1.c + 1):
                rows.append((lam, n, ours[n], js[n]))
        return _csv("lambda,n,ours,jain_smith", rows)

    if figure in ("fig5", "fig6", "fig7"):
        metric = args.metric or "count"
        rows = []
        for lam in _FIGURE_SWEEP:
            lam = float(lam)
            ours = tandem_measures(solve_fixed_point(config, lam), lam)
            js_dist = solve_birth_death(lam, js_rates)
            js = measures(js_dist, lam, js_rates)
            if figure == "fig5":
                pair = (
                    (ours.expected_count, js.expected_count)
                    if metric == "count"
                    else (ours.blocking, js.blocking)
                )
            elif figure == "fig6":
                pair = (ours.expected_travel_time, js.expected_travel_time)
            else:
                pair = (ours.throughput, js.throughput)
            rows.append((lam, pair[0], pair[1]))
        return _csv("lambda,ours,jain_smith", rows)

    if figure == "fig8":
        index = args.section or 1
        section = scenario.section(index)
        model = LinearCongestionModel(v_f=section.diagram.v_f, c=section.c)
        maker = speed_dist_linear if kind == SPEED else travel_time_dist_linear
        return _figure_distribution_csv(
            maker(0.8, model, section.L, mode=PAPER_GRID)
        )

    # fig9 / fig10: tandem-marginal pushforward at the preset arrival rate
    lam = 0.8 if figure == "fig9" else 2.0
    marginal = solve_fixed_point(config, lam).marginal
    if kind == SPEED:
        dist = speed_dist_triangular(marginal, s1, config.convention)
    else:
        dist = travel_time_dist_triangular(marginal, s1, config.convention)
    return _figure_distribution_csv(dist)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        default=None,
        help="scenario JSON path, '-' for stdin (default: bundled scenario)",
    )
    parser.add_argument(
        "--output", default=None, help="output path (default: stdout)"
    )


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--convention", choices=CONVENTIONS, default=None)
    parser.add_argument(
        "--model",
        choices=(TRIANGULAR, LINEAR, EXPONENTIAL),
        default=None,
        help="override the scenario's service-rate model",
    )
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)


def _add_lambda(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        required=True,
        help="arrival rate [veh/s]",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadqueue",
        description="Finite-capacity road-traffic queueing models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-section", help="stationary law of one section")
    _add_common(p)
    _add_lambda(p)
    _add_model_options(p)
    p.add_argument("--section", type=int, default=1)
    p.set_defaults(handler=_cmd_solve_section)

    p = sub.add_parser("solve-tandem", help="two-section throughput fixed point")
    _add_common(p)
    _add_lambda(p)
    p.add_argument("--convention", choices=CONVENTIONS, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument(
        "--scan-roots",
        action="store_true",
        help="also report every residual sign change on a 1000-point grid",
    )
    p.set_defaults(handler=_cmd_solve_tandem, model=None, beta=None, gamma=None)

    p = sub.add_parser("distributions", help="speed / travel-time law as CSV")
    _add_common(p)
    _add_lambda(p)
    _add_model_options(p)
    p.add_argument("--kind", choices=(SPEED, TRAVEL_TIME), default=SPEED)
    p.add_argument("--mode", choices=MODES, default=PUSHFORWARD)
    p.add_argument(
        "--section",
        type=int,
        default=None,
        help="use this section's own law instead of the tandem marginal",
    )
    p.set_defaults(handler=_cmd_distributions)

    p = sub.add_parser("sweep", help="arrival-rate sweep as CSV")
    _add_common(p)
    _add_model_options(p)
    p.add_argument("--lambda-from", dest="lambda_from", type=float, required=True)
    p.add_argument("--lambda-to", dest="lambda_to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument(
        "--section",
        type=int,
        default=None,
        help="sweep this single section instead of the tandem system",
    )
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("simulate", help="seeded Monte Carlo of one section")
    _add_common(p)
    _add_lambda(p)
    _add_model_options(p)
    p.add_argument("--events", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--section", type=int, default=1)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser(
        "compare", help="analytical vs exact vs simulated, with TV distances"
    )
    _add_common(p)
    _add_lambda(p)
    _add_model_options(p)
    p.add_argument("--events", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--section", type=int, default=1)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser(
        "fit-exponential", help="fit (beta, gamma) from two anchor points"
    )
    _add_common(p)
    p.add_argument("--fit-a", type=float, required=True, help="first anchor count")
    p.add_argument("--fit-va", type=float, required=True, help="speed at a")
    p.add_argument("--fit-b", type=float, required=True, help="second anchor count")
    p.add_argument("--fit-vb", type=float, required=True, help="speed at b")
    p.add_argument(
        "--fit-vf",
        type=float,
        default=None,
        help="free speed (default: section 1's v_f from the config)",
    )
    p.set_defaults(handler=_cmd_fit_exponential)

    p = sub.add_parser(
        "figure-data", help="canned comparison datasets for plotting"
    )
    _add_common(p)
    _add_model_options(p)
    p.add_argument("--figure", choices=FIGURES, required=True)
    p.add_argument(
        "--kind",
        choices=(SPEED, TRAVEL_TIME),
        default=None,
        help="fig8/fig9/fig10: which distribution to emit (default speed)",
    )
    p.add_argument(
        "--metric",
        choices=("count", "blocking"),
        default=None,
        help="fig5: which panel to emit (default count)",
    )
    p.add_argument("--section", type=int, default=None)
    p.set_defaults(handler=_cmd_figure_data)

    return parser


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = args.handler(args)
    except SingularModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    try:
        _emit(payload, args.output)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
