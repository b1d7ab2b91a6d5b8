"""Command-line front end.

Three verbs: `simulate` runs the scheme x seed scenario grid and writes the
result files, `generate` emits a synthetic dataset CSV, and `report`
aggregates one or more results CSVs into a per-scheme summary table.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import BUDGET_MODES, NOISE_MODES, SCHEME_CHOICES, SimulationConfig, load_config
from .data import generate_synthetic, read_results_csv, write_dataset_csv
from .errors import DpnctError
from .metrics import TrialResult, average_trials
from .simulation import run_scenario

SUMMARY_COLUMNS = (
    "scheme",
    "trials",
    "mae_total_mean",
    "mae_total_std",
    "mae_bill_mean",
    "mae_bill_std",
    "correlation_mean",
    "abs_correlation_mean",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpnct",
        description=(
            "Smart-meter load simulator: differentially private reporting with "
            "periodic noise cancellation, group noise aggregation, and dynamic billing."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the configured scheme x seed scenario grid")
    sim.add_argument("--config", help="JSON config file; flags override its values")
    sim.add_argument("--epsilon", type=float, help="privacy budget in (0, 1]")
    sim.add_argument("--schemes", nargs="+", choices=SCHEME_CHOICES, help="schemes to simulate")
    sim.add_argument("--households", type=int, help="synthetic dataset household count")
    sim.add_argument("--days", type=int, help="simulation horizon in days")
    sim.add_argument("--groups", type=int, help="number of meter groups")
    sim.add_argument("--granularity-minutes", type=int, dest="granularity_minutes")
    sim.add_argument("--max-units", type=float, dest="max_allowed_units", help="billing cap, kWh per period")
    sim.add_argument("--unit-price", type=float, dest="unit_price")
    sim.add_argument("--surcharge-price", type=float, dest="surcharge_price")
    sim.add_argument("--seeds", nargs="+", type=int, help="trial seeds (one trial per scheme per seed)")
    sim.add_argument("--budget-mode", choices=BUDGET_MODES, dest="budget_mode")
    sim.add_argument("--noise-mode", choices=NOISE_MODES, dest="noise_mode")
    sim.add_argument("--data", dest="data_csv", help="input dataset CSV instead of synthetic data")
    sim.add_argument("--data-seed", type=int, dest="data_seed", help="seed for synthetic data generation")
    sim.add_argument("--profile-household", type=int, dest="profile_household")
    sim.add_argument("--profile-day", type=int, dest="profile_day")
    sim.add_argument("--outdir", dest="output_dir", help="output directory (default: results)")
    sim.add_argument(
        "--emit-load-reports",
        action="store_const",
        const=True,
        default=None,
        dest="emit_load_reports",
        help="write per-timestep reconstruction CSVs per trial",
    )
    sim.add_argument(
        "--emit-bills",
        action="store_const",
        const=True,
        default=None,
        dest="emit_bills",
        help="write all billing statements to bills.csv",
    )

    gen = sub.add_parser("generate", help="emit a synthetic dataset CSV")
    gen.add_argument("--households", type=int, default=200)
    gen.add_argument("--days", type=int, default=30)
    gen.add_argument("--seed", type=int, default=7)
    gen.add_argument("--granularity-minutes", type=int, default=10, dest="granularity_minutes")
    gen.add_argument("--out", default="data.csv", help="output CSV path")

    rep = sub.add_parser("report", help="summarise results CSVs per scheme")
    rep.add_argument("results", nargs="+", help="results CSV files from `simulate`")
    rep.add_argument("--out", help="also write the summary table to this CSV path")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    overrides = {
        key: getattr(args, key)
        for key in (
            "epsilon",
            "schemes",
            "households",
            "days",
            "groups",
            "granularity_minutes",
            "max_allowed_units",
            "unit_price",
            "surcharge_price",
            "seeds",
            "budget_mode",
            "noise_mode",
            "data_csv",
            "data_seed",
            "profile_household",
            "profile_day",
            "output_dir",
            "emit_load_reports",
            "emit_bills",
        )
    }
    config = load_config(args.config, overrides)
    scenario = run_scenario(config)
    print(f"wrote {scenario.results_path} ({len(scenario.rows)} metric rows)")
    _print_summary_table(scenario.summaries)
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    dataset = generate_synthetic(args.households, args.days, rng, args.granularity_minutes)
    write_dataset_csv(dataset, args.out)
    print(f"wrote {args.out}: {dataset.households} households x {dataset.timesteps} timesteps")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    results = []
    for path in args.results:
        by_trial: dict[tuple[str, int], dict[str, float]] = {}
        for scheme, seed, metric, value in read_results_csv(path):
            by_trial.setdefault((scheme, seed), {})[metric] = value
        for (scheme, seed), metric_values in sorted(by_trial.items()):
            results.append(
                TrialResult(
                    scheme=scheme,
                    seed=seed,
                    mae_total_consumption=metric_values["mae_total_consumption"],
                    mae_bill=metric_values["mae_bill"],
                    correlation=metric_values["correlation"],
                )
            )
    summaries = average_trials(results)
    lines = _print_summary_table(summaries)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def _print_summary_table(summaries) -> list[str]:
    lines = [",".join(SUMMARY_COLUMNS)]
    for scheme in sorted(summaries):
        summary = summaries[scheme]
        lines.append(
            ",".join(
                (
                    summary.scheme,
                    str(summary.trials),
                    f"{summary.mae_total_mean:.6f}",
                    f"{summary.mae_total_std:.6f}",
                    f"{summary.mae_bill_mean:.6f}",
                    f"{summary.mae_bill_std:.6f}",
                    f"{summary.correlation_mean:.6f}",
                    f"{summary.abs_correlation_mean:.6f}",
                )
            )
        )
    print("\n".join(lines))
    return lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"simulate": _cmd_simulate, "generate": _cmd_generate, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except DpnctError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
