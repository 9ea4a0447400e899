"""Command-line front end for the capacity sweeps.

Exit codes: 0 success, 1 configuration error, 2 at least one grid point failed
numerically (the CSV is still written, failed rows marked).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .sweep import (
    build_config,
    emit_csv,
    figure_configs,
    load_config_file,
    resolve_workers,
    run_many,
    run_sweep,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2

SUBCOMMANDS = {
    "grid-ja": ("grid_j_alpha", 20, "capacities on a (J, alpha) grid at fixed gamma, h"),
    "line-j": ("line_j", 40, "capacities along J at fixed alpha, gamma, h"),
    "grid-ga": ("grid_gamma_alpha", 20, "field-averaged multiport capacity on a (gamma, alpha) grid at fixed J"),
    "avg-h": ("field_average_line", 40, "field-averaged multiport capacity along J at fixed alpha, gamma"),
}

# flag dest -> settings key shared with the config file
FLAG_KEYS = {
    "n": "n",
    "j": "j",
    "alpha": "alpha",
    "gamma": "gamma",
    "h": "h",
    "steps": "steps",
    "out": "out",
    "m_field_samples": "m_field_samples",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value file; flags override its values")
    p.add_argument("--n", type=int, help="number of spins (default 10)")
    p.add_argument("--steps", type=int, help="grid points per swept axis")
    p.add_argument("--out", type=Path, help="output CSV path")
    p.add_argument("--workers", type=int, help="worker processes (env DENSECODING_WORKERS if absent)")
    p.add_argument("--m-field-samples", type=int, help="field samples for averaged modes (default 100)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densecoding", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        _common(p)
        for coupling in ("j", "alpha", "gamma", "h"):
            p.add_argument(f"--{coupling}", type=float, help=f"fixed value of {coupling}")
        p.add_argument(
            "--range",
            action="append",
            default=[],
            metavar="NAME=START:STOP[:STEPS]",
            help="override the default range of a swept parameter",
        )
    rp = sub.add_parser("reproduce", help="emit the CSV behind one figure's panels")
    rp.add_argument("figure", help="fig1 .. fig5")
    _common(rp)
    return parser


def _settings(args) -> dict[str, str]:
    settings = load_config_file(args.config) if args.config else {}
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            settings[key] = str(value)
    for item in getattr(args, "range", []):
        if "=" not in item:
            raise ConfigError("range", f"expected NAME=START:STOP[:STEPS], got {item!r}")
        name, spec = item.split("=", 1)
        settings[f"{name.strip().lower()}_range"] = spec.strip()
    return settings


def _parse_figure(text: str) -> int:
    digits = text.lower().removeprefix("fig")
    if not digits.isdigit():
        raise ConfigError("figure", f"expected fig1..fig5, got {text!r}")
    return int(digits)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = _settings(args)
        workers = resolve_workers(args.workers, settings.get("workers"))
        if args.command == "reproduce":
            figure = _parse_figure(args.figure)
            configs = figure_configs(
                figure,
                n_sites=int(settings.get("n", 10)),
                steps=int(settings["steps"]) if "steps" in settings else None,
                workers=workers,
                field_samples=int(settings.get("m_field_samples", 100)),
            )
            for c in configs:
                c.validate()
            out = Path(settings.get("out", f"fig{figure}.csv"))
            records = run_many(configs)
        else:
            mode, default_steps, _ = SUBCOMMANDS[args.command]
            config = build_config(mode, settings, default_steps=default_steps, workers=workers)
            out = config.output_path or Path(f"{mode}.csv")
            records = run_sweep(config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    emit_csv(records, out)
    failed = [r for r in records if r.failed]
    for r in failed:
        print(f"failed point {r.params}: {r.error}", file=sys.stderr)
    print(f"wrote {len(records)} records to {out}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
