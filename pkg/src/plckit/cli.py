"""Command-line front end: simulate, fit, compete, sizedist, volume, substitute.

Each subcommand writes delimited output into the target directory and
renders a matching figure next to it.  Exit code 0 means success, 2 a
validation problem with the inputs, 3 a fit or simulation that failed to
converge.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from . import plots
from .competition import MarketState, fisher_pry, run_replicator
from .config import load_config
from .dataio import Dataset, emit, load_csv
from .errors import ConvergenceError, PlcError
from .fitting import fit_pipeline
from .gibrat import GibratConfig, gibrat_simulate, lognormal_pdf, normality_test
from .income_market import MarketVolumeParams, market_volume
from .scenarios import BUILTIN_SCENARIOS, Scenario, assemble
from .series import SalesSeries

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plckit",
        description="Life-cycle simulation and fitting for durable goods markets.",
    )
    parser.add_argument("--config", help="INI file with scenario sections")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--out", default=".", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="assemble a full sales life cycle")
    p.add_argument("--scenario", required=True, help="builtin name or config section")
    p.add_argument("--horizon", type=float, default=32.0, help="years past launch")
    p.add_argument("--dt", type=float, default=0.05, help="grid spacing in years")

    p = sub.add_parser("fit", help="estimate scenario parameters from CSV series")
    p.add_argument("--prices", help="price CSV, header t,value")
    p.add_argument("--penetration", help="penetration CSV, header t,value")
    p.add_argument("--sales", help="sales CSV, header t,value")
    p.add_argument(
        "--channels",
        choices=["auto", "one", "two"],
        default="auto",
        help="first-purchase structure: single pool, price-driven add-on, or pick by fit",
    )

    p = sub.add_parser("compete", help="brand competition with emergent price decline")
    p.add_argument("--brands", type=int, default=50)
    p.add_argument("--steps", type=int, default=2500)
    p.add_argument("--dtau", type=float, default=1.0)
    p.add_argument("--offset", type=float, default=0.5, help="initial mean above floor")
    p.add_argument("--variance", type=float, default=4e-4, help="initial price variance")
    p.add_argument("--jump-sigma", type=float, default=5e-3)

    p = sub.add_parser("sizedist", help="multiplicative-growth size distribution")
    p.add_argument("--units", type=int, default=10000)
    p.add_argument("--horizon", type=int, default=400)
    p.add_argument("--drift", type=float, default=0.0)
    p.add_argument("--volatility", type=float, default=0.05)
    p.add_argument("--increment", choices=["normal", "uniform"], default="normal")

    p = sub.add_parser("volume", help="market volume against real price")
    p.add_argument("--potential", type=float, default=1.0)
    p.add_argument("--upper", type=float, default=0.0)
    p.add_argument("--natural-price", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--mu-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=501)

    p = sub.add_parser("substitute", help="logistic share takeover between two brands")
    p.add_argument("--advantage", type=float, default=0.5)
    p.add_argument("--offset", type=float, default=-4.0)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=401)
    return parser


def _resolve_scenario(args) -> Scenario:
    if args.config:
        scenarios = load_config(args.config)
        if args.scenario in scenarios:
            return scenarios[args.scenario]
    if args.scenario in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[args.scenario]
    raise PlcError(f"unknown scenario {args.scenario!r}")


def _cmd_simulate(args, out: Path) -> int:
    sc = _resolve_scenario(args)
    components = assemble(sc, args.horizon, args.dt)
    emit(components, out / f"{sc.name}_plc.csv", "csv")
    plots.plot_components(
        components,
        out / f"{sc.name}_plc.png",
        title=sc.name,
        ylabel="sales (fraction of market potential per year)",
    )
    return EXIT_OK


def _cmd_fit(args, out: Path) -> int:
    datasets = {}
    if args.prices:
        datasets["prices"] = load_csv(args.prices, kind="price")
    if args.penetration:
        datasets["penetration"] = load_csv(args.penetration, kind="penetration")
    if args.sales:
        datasets["sales"] = load_csv(args.sales, kind="sales")
    two = {"auto": None, "one": False, "two": True}[args.channels]
    result = fit_pipeline(**datasets, two_channel=two)
    emit(result, out / "fit_result.csv", "csv")
    if "penetration" in datasets:
        data = datasets["penetration"].series
        p = result.parameters
        t = data.times - data.t0
        from .diffusion import BassParams, bass_cumulative

        model = bass_cumulative(t, BassParams(p["A"], p["B"], p["n_B0"]))
        if "n_G0" in p:
            model = model + p["n_G0"] * np.exp(
                -p["k"] * np.exp(-2.0 * p["a"] * (t - p.get("delay", 0.0)))
            )
        plots.plot_fit(
            data,
            data.with_values(model),
            out / "fit_penetration.png",
            title="penetration fit",
        )
    if not result.converged:
        print("fit did not converge; best-so-far written", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_compete(args, out: Path) -> int:
    mv = MarketVolumeParams(1.0, 0.0, 1.0, 1.0)
    n = args.brands
    quantiles = (np.arange(n) + 0.5) / n
    prices = stats.norm.ppf(
        quantiles, loc=mv.natural_price + args.offset, scale=np.sqrt(args.variance)
    )
    state = MarketState(
        prices=prices,
        preferences=np.ones(n),
        reproductions=np.ones(n),
        stocks=np.zeros(n),
        sales=np.full(n, 1.0 / n),
        volume_params=mv,
    )
    history = run_replicator(
        state,
        args.dtau,
        args.steps,
        record_every=max(1, args.steps // 1000),
        jump_rate=1.0,
        jump_sigma=args.jump_sigma,
        recenter_jumps=True,
        hold_price_variance=True,
        rng=np.random.default_rng(args.seed),
    )
    series = SalesSeries(
        history["tau"][0],
        history["tau"][1] - history["tau"][0],
        history["mean_price"],
    )
    emit(series, out / "compete_mean_price.csv", "csv")
    plots.plot_xy(
        history["tau"],
        history["mean_price"],
        out / "compete_mean_price.png",
        xlabel="scaled time",
        ylabel="mean price",
        title="mean price under brand competition",
    )
    return EXIT_OK


def _cmd_sizedist(args, out: Path) -> int:
    cfg = GibratConfig(
        n_units=args.units,
        horizon=args.horizon,
        drift=args.drift,
        volatility=args.volatility,
        seed=args.seed,
        increment=args.increment,
    )
    sample = gibrat_simulate(cfg)
    import csv as _csv

    with open(out / "sizes.csv", "w", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["unit_id", "size"])
        for i, size in enumerate(sample.sizes):
            writer.writerow([i, format(float(size), ".12g")])
    report = normality_test(sample)
    with open(out / "sizedist_report.csv", "w", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["statistic", "value"])
        for key in (
            "n",
            "mean_log",
            "std_log",
            "skewness",
            "excess_kurtosis",
            "ks_distance",
            "ks_critical_95",
        ):
            writer.writerow([key, format(getattr(report, key), ".12g")])
        writer.writerow(["passed", int(report.passed)])
    log_sizes = np.log(sample.sizes)
    x = np.linspace(log_sizes.min(), log_sizes.max(), 400)
    pdf = lognormal_pdf(np.exp(x), args.horizon, cfg) * np.exp(x)
    plots.plot_size_histogram(
        sample.sizes,
        out / "sizedist.png",
        pdf_x=x,
        pdf_y=pdf,
        title="unit size distribution",
    )
    return EXIT_OK


def _cmd_volume(args, out: Path) -> int:
    mv = MarketVolumeParams(args.potential, args.upper, args.natural_price, args.width)
    mu = np.linspace(0.0, args.mu_max, args.points)
    v = market_volume(mu, mv)
    emit(SalesSeries(0.0, mu[1] - mu[0], v), out / "volume.csv", "csv")
    plots.plot_xy(
        mu,
        v,
        out / "volume.png",
        xlabel="real price",
        ylabel="market volume",
        title="market volume against real price",
    )
    return EXIT_OK


def _cmd_substitute(args, out: Path) -> int:
    t = np.linspace(0.0, args.t_max, args.points)
    share = fisher_pry(t, args.advantage, args.offset)
    emit(SalesSeries(0.0, t[1] - t[0], share), out / "substitute.csv", "csv")
    plots.plot_xy(
        t,
        share,
        out / "substitute.png",
        xlabel="time",
        ylabel="market share of the fitter brand",
        title="logistic substitution",
    )
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "compete": _cmd_compete,
    "sizedist": _cmd_sizedist,
    "volume": _cmd_volume,
    "substitute": _cmd_substitute,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args, out)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except PlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
