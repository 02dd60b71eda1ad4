"""``wva-lab`` command line: regenerate figure data and scheme reports.

Usage::

    wva-lab <curves|qfi|nonlinearity|compare|servo> [--config FILE] [--out DIR]
            [--format csv|json] [--seed N] [--theta-grid SPEC] [--aw LIST]
            [--eta-grid SPEC] [--set KEY=VALUE ...]

Parameter precedence is command-line flag > config file > built-in default.
Every output file starts with the effective configuration.

Exit codes: 0 success, 2 bad arguments, 3 I/O error, 4 numeric-domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import bench
from . import servo as sv
from .errors import WvaLabError
from .noise import NoiseParams, Scheme
from .optical_train import TrainConfig

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

TWO_PI = repr(2 * math.pi)

DEFAULTS: dict[str, dict[str, str]] = {
    "curves": {
        "theta_grid": "log:1e-6:0.3:200",
        "aw": "1,10,50,100",
        "epsilon": "0.0",
        "input_intensity": "1.0",
    },
    "qfi": {
        "eta_grid": "lin:0:0.5:51",
        "theta": "0.001",
        "aw": "100,100+10j",
        "n_repeats": "1",
        "convention": "linear",
    },
    "nonlinearity": {
        "theta_grid": "log:1e-6:0.3:200",
        "aw": "10,50,100",
        "threshold_ppm": "100.0",
    },
    "compare": {
        "gamma": "0.01",
        "epsilon": "0.001",
        "omega0_dt": "10000.0",
        "alpha": "1.0",
        "beta": "0.01",
        "i0": "1e12",
        "i_max": "10000.0",
        "theta": "0.001",
        "phi_min": "1e-06",
        "modulator_range": TWO_PI,
        "d_threshold": "0.0001",
        "eta": "0.0",
    },
    "servo": {
        "theta": "0.001",
        "gamma": "0.01",
        "scheme": "DWM",
        "phi_min": "1e-06",
        "gain": "1.0",
        "modulator_range": TWO_PI,
        "max_iterations": "10000",
        "epsilon": "0.0",
        "input_intensity": "1.0",
        "alpha": "0.0",
        "beta": "0.0",
    },
}
COMMON = {"format": "csv", "seed": "0"}
HELP = {
    "aw": "comma-separated weak values, e.g. 100,100+10i",
    "theta_grid": "log:a:b:n, lin:a:b:n or a comma list",
    "eta_grid": "log:a:b:n, lin:a:b:n or a comma list",
}


class ConfigError(ValueError):
    pass


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` text; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def effective_config(command: str, file_values: dict[str, str], flag_values: dict[str, str]) -> dict[str, str]:
    known = {**COMMON, **DEFAULTS[command]}
    for key in list(file_values) + list(flag_values):
        if key not in known:
            raise ConfigError(f"unknown parameter {key!r} for {command}")
    return {**known, **file_values, **flag_values}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(command: str, config: dict[str, str], columns, rows, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema": bench.SCHEMA_VERSION,
            "command": command,
            "config": dict(sorted(config.items())),
            "columns": list(columns),
            "rows": [{c: _json_value(row[c]) for c in columns} for row in rows],
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# wva-lab {command} schema={bench.SCHEMA_VERSION}\n")
    for key, value in sorted(config.items()):
        buf.write(f"# {key} = {value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _label(a_w: complex) -> str:
    a_w = complex(a_w)
    if a_w.imag == 0:
        return f"{a_w.real:g}"
    return f"{a_w.real:g}{a_w.imag:+g}j".replace("+", "p").replace("-", "m")


def run_command(command: str, config: dict[str, str]) -> dict[str, tuple]:
    """Compute every output of ``command``; returns ``{file stem: (columns, rows)}``."""
    c = config
    if command == "curves":
        thetas = bench.make_grid(c["theta_grid"])
        wvs = bench.parse_weak_values(c["aw"])
        eps, i0 = float(c["epsilon"]), float(c["input_intensity"])
        out = {}
        rows_all = []
        for a_w in wvs:
            rows = bench.curves_rows(thetas, [a_w], eps, i0)
            out[f"curves_aw{_label(a_w)}"] = (bench.CURVES_COLUMNS, rows)
            rows_all.extend(rows)
        out["curves"] = (bench.CURVES_COLUMNS, rows_all)
        return out
    if command == "qfi":
        rows = bench.qfi_rows(
            bench.make_grid(c["eta_grid"]),
            float(c["theta"]),
            bench.parse_weak_values(c["aw"]),
            int(c["n_repeats"]),
            c["convention"],
        )
        return {"qfi": (bench.QFI_COLUMNS, rows)}
    if command == "nonlinearity":
        rows, limits = bench.nonlinearity_rows(
            bench.make_grid(c["theta_grid"]), bench.parse_weak_values(c["aw"]), float(c["threshold_ppm"])
        )
        return {
            "nonlinearity": (bench.NONLINEARITY_COLUMNS, rows),
            "nonlinearity_limits": (bench.LIMITS_COLUMNS, limits),
        }
    if command == "compare":
        p = bench.CompareParams(**{k: float(c[k]) for k in DEFAULTS["compare"]})
        return {"compare": (bench.COMPARE_COLUMNS, bench.compare_rows(p))}
    if command == "servo":
        gamma = float(c["gamma"])
        train = TrainConfig(
            theta=float(c["theta"]),
            delta=math.atan(gamma),
            epsilon=float(c["epsilon"]),
            input_intensity=float(c["input_intensity"]),
        )
        alpha, beta = float(c["alpha"]), float(c["beta"])
        noise = NoiseParams(alpha, beta) if (alpha > 0 or beta > 0) else None
        cfg = sv.ServoConfig(
            scheme=Scheme(c["scheme"].upper()),
            gain=float(c["gain"]),
            phi_min=float(c["phi_min"]),
            modulator_range=float(c["modulator_range"]),
            max_iterations=int(c["max_iterations"]),
            noise=noise,
            seed=int(c["seed"]),
        )
        trace = sv.run_servo(float(c["theta"]), train, cfg)
        summary = [
            dict(
                theta=float(c["theta"]),
                theta_hat=trace.theta_hat,
                phi_hat=trace.phi_final,
                iterations=len(trace.phi_hat),
                converged=int(trace.converged),
                precision=sv.closed_loop_precision(cfg.scheme, gamma, cfg.phi_min),
            )
        ]
        return {
            "servo": (sv.TRACE_COLUMNS, trace.rows()),
            "servo_summary": (("theta", "theta_hat", "phi_hat", "iterations", "converged", "precision"), summary),
        }
    raise ConfigError(f"unknown command {command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wva-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, params in DEFAULTS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE", help="override any parameter"
        )
        for key in params:
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, default=None, help=HELP.get(key, f"default {params[key]}"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        file_values = read_config_file(args.config) if args.config else {}
    except OSError as exc:
        print(f"wva-lab: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"wva-lab: {exc}", file=sys.stderr)
        return EXIT_ARGS

    flags = {k: str(v) for k, v in vars(args).items() if k in DEFAULTS[command] and v is not None}
    if args.format is not None:
        flags["format"] = args.format
    if args.seed is not None:
        flags["seed"] = str(args.seed)
    for item in args.set:
        if "=" not in item:
            print(f"wva-lab: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_ARGS
        k, v = item.split("=", 1)
        flags[k.strip().replace("-", "_")] = v.strip()

    try:
        config = effective_config(command, file_values, flags)
        if config["format"] not in ("csv", "json"):
            raise ConfigError(f"unknown format {config['format']!r}")
        int(config["seed"])
    except (ConfigError, ValueError) as exc:
        print(f"wva-lab: {exc}", file=sys.stderr)
        return EXIT_ARGS

    try:
        outputs = run_command(command, config)
    except (WvaLabError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"wva-lab: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"wva-lab: bad parameter: {exc}", file=sys.stderr)
        return EXIT_ARGS

    fmt = config["format"]
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for stem, (columns, rows) in outputs.items():
            path = out_dir / f"{stem}.{fmt}"
            path.write_text(render(command, config, columns, rows, fmt))
    except OSError as exc:
        print(f"wva-lab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
