"""
Command-line front end.

Every command writes a table (CSV with a ``#`` metadata preamble) or a JSON
document ``{"meta": ..., "data": ...}``. Metadata holds the version, the
command, the seed and all resolved parameters, and nothing run-dependent,
so identical invocations produce identical bytes.

Exit status: 0 on success, 2 for usage errors, 3 for domain errors such
as infeasible problem instances or failed self-checks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import beamforming as bf
from . import power
from . import random_access as ra
from . import uplink
from .channel import FadingSpec
from .downlink import DownlinkScenario, achievable_rate
from .errors import NomaError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3

STDOUT = "-"

COMMANDS = ("fig1", "fig3", "fig4", "fig6", "uplink", "alloc", "selfcheck")

REQUIRED = {
    "fig1": ("gains", "total_power", "targets", "grid"),
    "fig3": ("antennas", "trials", "g1_db", "g2_db", "clusters", "distances", "exponent", "noise"),
    "fig4": ("users", "grid"),
    "fig6": ("users", "levels", "subcarriers", "trials", "model", "grid"),
    "uplink": ("gains", "powers"),
    "alloc": ("gains", "targets"),
    "selfcheck": (),
}

DEFAULT_FORMAT = {"uplink": "json", "alloc": "json"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_path: str = STDOUT
    format: str = "csv"
    seed: int = 0
    figure_path: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        missing = [k for k in REQUIRED[self.command] if k not in self.params]
        if missing:
            raise UsageError(f"{self.command}: missing parameters {', '.join(missing)}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if self.figure_path is not None and self.command not in ("fig1", "fig3", "fig4", "fig6"):
            raise UsageError(f"{self.command} has no figure")


# -- formatting ---------------------------------------------------------


def _cell(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def _meta(config: RunConfig) -> dict:
    return {
        "tool": "nomakit",
        "version": __version__,
        "command": config.command,
        "seed": config.seed,
        "params": config.params,
    }


def render(config: RunConfig, columns, rows, data=None) -> str:
    """Serialize ``rows`` (list of dicts keyed by ``columns``).

    ``data`` overrides the JSON payload for non-tabular results.
    """
    meta = _meta(config)
    if config.format == "json":
        payload = {"meta": meta, "data": rows if data is None else data}
        return json.dumps(_json_safe(payload), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# {meta['tool']} {meta['version']}\n")
    buf.write(f"# command: {config.command}\n")
    buf.write(f"# seed: {config.seed}\n")
    for key, value in config.params.items():
        buf.write(f"# {key}: {json.dumps(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


# -- commands -----------------------------------------------------------


def _fig1(config):
    p = config.params
    curve = power.rate_region_boundary(p["gains"], p["total_power"], p["grid"])
    rows = [
        {"P1": float(a), "P2": float(b), "R1": float(c), "R2": float(d), "point": "boundary"}
        for a, b, c, d in curve
    ]
    sol = power.min_power_allocation(p["gains"], p["targets"])
    scen = DownlinkScenario(tuple(p["gains"]), sol.powers)
    rows.append(
        {
            "P1": sol.powers[0],
            "P2": sol.powers[1],
            "R1": achievable_rate(scen, 1, 1),
            "R2": achievable_rate(scen, 2, 2),
            "point": "solution",
        }
    )
    return ["P1", "P2", "R1", "R2", "point"], rows, None


def _fig3(config):
    p = config.params
    spec = FadingSpec(
        antenna_count=max(p["antennas"]),
        user_distances=tuple(p["distances"]) * p["clusters"] if len(p["distances"]) == 2 else tuple(p["distances"]),
        path_loss_exponent=p["exponent"],
        seed=config.seed,
    )
    table = bf.fig3_experiment(
        p["antennas"],
        p["trials"],
        spec,
        bf.db_to_linear(p["g1_db"]),
        bf.db_to_linear(p["g2_db"]),
        clusters=p["clusters"],
        noise=p["noise"],
    )
    rows = [
        {
            "L": r.antennas,
            "noma_mean_power": r.noma_mean_power,
            "oma_mean_power": r.oma_mean_power,
            "infeasible_rate": r.infeasible_rate,
        }
        for r in table
    ]
    return ["L", "noma_mean_power", "oma_mean_power", "infeasible_rate"], rows, None


def _fig4(config):
    p = config.params
    k = p["users"]
    rows = [
        {"p_a": float(x), "aloha_T": ra.aloha_throughput(k, float(x)), "noma_T": ra.noma_aloha_throughput_2level(k, float(x))}
        for x in ra.default_grid(p["grid"])
    ]
    return ["p_a", "aloha_T", "noma_T"], rows, None


def _fig6(config):
    p = config.params
    models = list(ra.DecodingModel) if p["model"] == "both" else [ra.DecodingModel(p["model"])]
    grid = np.linspace(0.0, p.get("p_max", 1.0), p["grid"])
    per_model = {m: [] for m in models}
    for x in grid:
        cfg = ra.RaConfig(p["users"], float(x), p["levels"], p["subcarriers"], models[0], p["trials"], config.seed)
        successes = ra.simulate_models(cfg, models)
        for m in models:
            mean, se = ra.mean_stderr(successes[m])
            per_model[m].append({"p_a": float(x), "mean_T": mean, "stderr": se, "model": m.value})
    rows = [row for m in models for row in per_model[m]]
    return ["p_a", "mean_T", "stderr", "model"], rows, None


def _uplink(config):
    p = config.params
    scen = uplink.UplinkScenario(tuple(p["gains"]), tuple(p["powers"]), p.get("order"))
    rates = uplink.sic_rates(scen)
    total = uplink.total_mutual_information(scen)
    step = {u: i + 1 for i, u in enumerate(scen.order)}
    rows = [{"user": k + 1, "decode_step": step[k + 1], "rate": rates[k]} for k in range(scen.users)]
    data = {
        "order": list(scen.order),
        "rates": rates,
        "sum_rate": math.fsum(rates),
        "total_mutual_information": total,
    }
    if "rates" in p:
        data["feasible"] = uplink.feasible_rate_tuple(scen, p["rates"])
    return ["user", "decode_step", "rate"], rows, data


def _alloc(config):
    p = config.params
    sol = power.min_power_allocation(p["gains"], p["targets"], cap=p.get("cap"))
    rows = [
        {"user": k + 1, "gain": float(g), "target": float(r), "power": sol.powers[k]}
        for k, (g, r) in enumerate(zip(p["gains"], p["targets"]))
    ]
    return ["user", "gain", "target", "power"], rows, sol.to_dict()


def _selfcheck(config):
    from .selfcheck import run_checks

    results = run_checks()
    rows = [{"check": name, "passed": ok, "detail": detail} for name, ok, detail in results]
    return ["check", "passed", "detail"], rows, None


HANDLERS = {
    "fig1": _fig1,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig6": _fig6,
    "uplink": _uplink,
    "alloc": _alloc,
    "selfcheck": _selfcheck,
}


def execute(config: RunConfig) -> tuple[str, list]:
    """Run a validated config; returns the serialized artifact and the rows."""
    config.validate()
    columns, rows, data = HANDLERS[config.command](config)
    return render(config, columns, rows, data), rows


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``config``, write its artifact, and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        text, rows = execute(config)
    except UsageError as exc:
        print(f"nomakit: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (NomaError, ValueError, IndexError) as exc:
        print(f"nomakit: {config.command}: {exc}", file=stderr)
        return EXIT_DOMAIN
    if config.output_path == STDOUT:
        stdout.write(text)
    else:
        Path(config.output_path).write_text(text)
    if config.figure_path is not None:
        from .figures import RENDERERS

        RENDERERS[config.command](rows, config.figure_path)
    if config.command == "selfcheck" and not all(r["passed"] for r in rows):
        print("nomakit: selfcheck: some checks failed", file=stderr)
        return EXIT_DOMAIN
    return EXIT_OK


# -- argument parsing ---------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_options(p: argparse.ArgumentParser, suppress: bool):
    # Subcommands accept the global flags too; SUPPRESS keeps them from
    # overwriting values given before the subcommand.
    seed, output = (argparse.SUPPRESS,) * 2 if suppress else (0, STDOUT)
    fmt = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=seed, help="RNG seed (default 0)")
    p.add_argument("--output", default=output, help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default=fmt, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nomakit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nomakit {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, figure=False):
        p = sub.add_parser(name, help=help_text)
        _global_options(p, suppress=True)
        if figure:
            p.add_argument("--figure", dest="figure_path", help="also render a PNG figure to this path")
        return p

    p = add("fig1", "two-user rate-region boundary and min-power point", figure=True)
    p.add_argument("--gains", type=_floats, default=[1.0, 0.25])
    p.add_argument("--total-power", type=float, default=10.0)
    p.add_argument("--targets", type=_floats, default=[2.0, 1.0])
    p.add_argument("--grid", type=int, default=101)

    p = add("fig3", "NOMA vs OMA transmit power against antenna count", figure=True)
    p.add_argument("--antennas", type=_ints, default=[5, 6, 7, 8, 9, 10])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--g1-db", type=float, default=10.0)
    p.add_argument("--g2-db", type=float, default=6.0)
    p.add_argument("--clusters", type=int, default=3)
    p.add_argument("--distances", type=_floats, default=[1.0, 2.0], help="strong,weak distances (or one pair per cluster)")
    p.add_argument("--exponent", type=float, default=3.5, help="path-loss exponent")
    p.add_argument("--noise", type=float, default=1.0)

    p = add("fig4", "analytic ALOHA and two-level NOMA-ALOHA throughput", figure=True)
    p.add_argument("--users", type=int, default=10)
    p.add_argument("--grid", type=int, default=101)

    p = add("fig6", "simulated multichannel NOMA-ALOHA throughput", figure=True)
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--subcarriers", type=int, default=6)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--model", choices=[m.value for m in ra.DecodingModel] + ["both"], default="both")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--p-max", type=float, default=1.0, help="upper end of the p_a grid")

    p = add("uplink", "uplink SIC rates for a decoding order")
    p.add_argument("--scenario", help="JSON file with gains, powers and optional order ('-' for stdin)")
    p.add_argument("--gains", type=_floats)
    p.add_argument("--powers", type=_floats)
    p.add_argument("--order", type=_ints, help="1-based decoding order, first decoded first")
    p.add_argument("--rates", type=_floats, help="rate tuple to test for feasibility")

    p = add("alloc", "closed-form minimum-power allocation")
    p.add_argument("--gains", type=_floats, required=True)
    p.add_argument("--targets", type=_floats, required=True)
    p.add_argument("--cap", type=float, help="optional total power cap")

    add("selfcheck", "run the worked-example checks")
    return parser


_GLOBAL_KEYS = {"command", "seed", "output", "format", "figure_path", "scenario"}


def config_from_args(args: argparse.Namespace, stdin=None) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in _GLOBAL_KEYS and v is not None}
    if args.command == "uplink" and getattr(args, "scenario", None):
        text = (stdin or sys.stdin).read() if args.scenario == STDOUT else Path(args.scenario).read_text()
        try:
            scen = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid scenario JSON: {exc}")
        for key in ("gains", "powers", "order", "rates"):
            if key in scen and key not in params:
                params[key] = scen[key]
    fmt = args.format or DEFAULT_FORMAT.get(args.command, "csv")
    return RunConfig(
        command=args.command,
        params=params,
        output_path=args.output,
        format=fmt,
        seed=args.seed,
        figure_path=getattr(args, "figure_path", None),
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except UsageError as exc:
        print(f"nomakit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nomakit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
