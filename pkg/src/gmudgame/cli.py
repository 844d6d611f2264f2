"""Command-line front end.

    gmudgame enumerate --players 3
    gmudgame stability --config scenario.cfg [--out payoffs.csv]
    gmudgame sweep --config sweep.cfg --out results.csv
    gmudgame preset --name fig2 --out fig2.csv [--seed 7]
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from .channel import run_stream
from .config import PRESETS, Config, ConfigError, load_config, preset_config
from .experiment import SweepSpec, emit_results, run_sweep
from .game import core
from .partition import MAX_PLAYERS, enumerate_structures, parse_structure


def cmd_enumerate(n: int, out=None) -> int:
    out = out or sys.stdout
    structures = enumerate_structures(n)
    for s in structures:
        print(s.label(), file=out)
    print(f"count: {len(structures)}", file=out)
    return 0


def _db(x):
    return 10.0 * math.log10(x)


def stability_text(config: Config) -> str:
    scenario = config.scenario
    powers = scenario.received_powers(run_stream(scenario.seed, 0))
    lines = []
    for st in scenario.stations:
        p = powers[st.id]
        n = p.n_known
        structures = None
        if config.structures:
            structures = [parse_structure(s, n) for s in config.structures]
        report = core(scenario.system, p, structures)
        lines.append(f"station {st.id}: {n} known user(s), SNR {config.snr_db:g} dB, "
                     f"unknown interference {p.unknown_total:.6g}, seed {scenario.seed}, run 0")
        width = max(9, n * 2 + 1)
        lines.append(f"  {'structure':<{width}}  {'sinr (linear)':<{12 * n}}  "
                     f"{'sinr (dB)':<{9 * n}}  {'total':>12}  IR  core")
        core_set = set(report.core_members)
        for ev in report.evaluations:
            lin = " ".join(f"{v:11.5g}" for v in ev.payoffs)
            db = " ".join(f"{_db(v):8.2f}" for v in ev.payoffs)
            lines.append(f"  {ev.structure.label():<{width}}  {lin:<{12 * n}}  {db:<{9 * n}}  "
                         f"{ev.group_total:12.6g}  {'y' if ev.individually_rational else 'n':>2}  "
                         f"{'y' if ev.structure in core_set else 'n':>4}")
        labels = ", ".join(s.label() for s in report.core_members) or "(empty)"
        lines.append(f"  core: {labels}")
        lines.append("  max group payoff: "
                     + ", ".join(s.label() for s in report.max_total_structures()))
        stable = ", ".join(s.label() for s in report.stable_structures()) or "(none)"
        lines.append(f"  stable (individually rational, group rational, in core): {stable}")
        if report.blocking:
            lines.append("  blocked structures:")
            for structure, witness in report.blocking.items():
                lines.append(f"    {structure.label()}: {witness.describe(n)}")
    return "\n".join(lines) + "\n"


def cmd_stability(config: Config, out_path: str | None = None, out=None) -> int:
    out = out or sys.stdout
    out.write(stability_text(config))
    out_path = out_path or config.output
    if out_path:
        scenario = replace(config.scenario, mc_runs=1)
        result = run_sweep(scenario, SweepSpec("snr_db", (config.snr_db,)), config.structures)
        emit_results(result, out_path)
        print(f"wrote {out_path}", file=out)
    return 0


def sweep_summary(result) -> str:
    lines = []
    values = result.spec.values
    for st in result.stations:
        totals = st.group_totals()
        for p in (0, len(values) - 1):
            best = st.structures[int(totals[p].argmax())]
            lines.append(f"{st.station_id}: {result.spec.variable} = {values[p]:g}: "
                         f"max group payoff {best.label()} ({totals[p].max():.6g})")
            if len(values) == 1:
                break
    return "\n".join(lines) + "\n"


def cmd_sweep(config: Config, out_path: str | None = None, out=None) -> int:
    out = out or sys.stdout
    if config.sweep is None:
        raise ConfigError(f"{config.source}: key 'sweep.variable': a sweep spec is required")
    out_path = out_path or config.output
    if not out_path:
        raise ConfigError(f"{config.source}: key 'output': no output file given "
                          "(use --out or the 'output' key)")
    result = run_sweep(config.scenario, config.sweep, config.structures)
    emit_results(result, out_path, presentation_offset=True)
    print(f"wrote {out_path}", file=out)
    out.write(sweep_summary(result))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmudgame",
        description="Coalition structures, SINR payoffs and core stability "
                    "for group multiuser detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list every coalition structure of N players")
    p.add_argument("--players", type=int, required=True, metavar="N")

    p = sub.add_parser("stability", help="payoffs, rationality and core for one realization")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="also write the payoffs as CSV")

    p = sub.add_parser("sweep", help="run the configured parameter sweep and write CSV")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("preset", help="run one of the built-in figure sweeps")
    p.add_argument("--name", required=True, choices=sorted(PRESETS))
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "enumerate":
            if not 1 <= args.players <= MAX_PLAYERS:
                parser.error(f"--players must be in 1..{MAX_PLAYERS}")
            return cmd_enumerate(args.players)
        if args.command == "stability":
            return cmd_stability(load_config(args.config), args.out)
        if args.command == "sweep":
            return cmd_sweep(load_config(args.config), args.out)
        if args.command == "preset":
            if args.seed is not None and args.seed < 0:
                parser.error("--seed must be non-negative")
            return cmd_sweep(preset_config(args.name, args.seed), args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
