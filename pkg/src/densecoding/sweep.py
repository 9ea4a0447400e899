"""Parameter sweeps over the chain couplings and their CSV output."""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .capacity import (
    DEFAULT_FIELD_SAMPLES,
    CapacityRecord,
    classical_capacity,
    evaluate_field_average,
    evaluate_point,
)
from .errors import ConfigError, DenseCodingError, InputError
from .hamiltonian import SpinChainParams

log = logging.getLogger(__name__)

PARAM_NAMES = ("j", "alpha", "gamma", "h")

# mode -> (swept parameters in row-major order, fixed parameters, field averaged)
MODES: dict[str, tuple[tuple[str, ...], tuple[str, ...], bool]] = {
    "grid_j_alpha": (("j", "alpha"), ("gamma", "h"), False),
    "line_j": (("j",), ("alpha", "gamma", "h"), False),
    "grid_gamma_alpha": (("gamma", "alpha"), ("j",), True),
    "field_average_line": (("j",), ("alpha", "gamma"), True),
}

DEFAULT_RANGES = {
    "j": (0.05, 4.0),
    "alpha": (0.05, 2.0),
    "gamma": (0.0, 1.0),
    "h": (0.0, 1.0),
}

CSV_HEADER = (
    "n_sites",
    "J",
    "alpha",
    "gamma",
    "h",
    "c_single_nn",
    "c_multiport",
    "c_exclusion",
    "c_classical",
    "npt_nn",
    "ground_degenerate",
    "avg_mode",
)

WORKERS_ENV = "DENSECODING_WORKERS"


@dataclass
class SweepConfig:
    mode: str
    fixed: dict[str, float]
    ranges: dict[str, tuple[float, float, int]]
    n_sites: int = 10
    output_path: Optional[Path] = None
    parallel_workers: int = 1
    field_samples: int = DEFAULT_FIELD_SAMPLES

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError("mode", f"unknown mode {self.mode!r}; expected one of {sorted(MODES)}")
        swept, fixed, averaged = MODES[self.mode]
        if int(self.n_sites) != self.n_sites or self.n_sites < 3:
            raise ConfigError("n_sites", f"must be an integer >= 3, got {self.n_sites!r}")
        for name in swept:
            if name not in self.ranges:
                raise ConfigError(name, f"mode {self.mode} sweeps {name} but no range was given")
            start, stop, steps = self.ranges[name]
            if int(steps) != steps or steps < 2:
                raise ConfigError(f"{name}.steps", f"need at least 2 steps, got {steps!r}")
            if not (np.isfinite(start) and np.isfinite(stop)):
                raise ConfigError(name, "range bounds must be finite")
        for name in set(self.ranges) - set(swept):
            raise ConfigError(name, f"mode {self.mode} does not sweep {name}")
        for name in fixed:
            if name not in self.fixed:
                raise ConfigError(name, f"mode {self.mode} needs a fixed value for {name}")
            if not np.isfinite(self.fixed[name]):
                raise ConfigError(name, "fixed value must be finite")
        for name in self.fixed:
            if name in swept:
                raise ConfigError(name, "parameter is both fixed and swept")
            if name not in PARAM_NAMES:
                raise ConfigError(name, "unknown parameter")
        if int(self.parallel_workers) != self.parallel_workers or self.parallel_workers < 1:
            raise ConfigError("parallel_workers", f"must be a positive integer, got {self.parallel_workers!r}")
        if averaged and (int(self.field_samples) != self.field_samples or self.field_samples < 1):
            raise ConfigError("field_samples", f"must be a positive integer, got {self.field_samples!r}")

    @property
    def averaged(self) -> bool:
        return MODES[self.mode][2]


def sweep_points(config: SweepConfig) -> list[SpinChainParams]:
    """Grid points in row-major order over the mode's swept parameters."""
    config.validate()
    swept, fixed, averaged = MODES[config.mode]
    axes = []
    for name in swept:
        start, stop, steps = config.ranges[name]
        axes.append([float(v) for v in np.linspace(start, stop, int(steps))])
    base = {name: float(config.fixed[name]) for name in fixed}
    if averaged:
        base["h"] = 0.0
    points = []
    for values in product(*axes):
        couplings = dict(base, **dict(zip(swept, values)))
        points.append(SpinChainParams(n_sites=int(config.n_sites), **couplings))
    return points


def _failed_record(params: SpinChainParams, exc: Exception, field_samples) -> CapacityRecord:
    return CapacityRecord(
        params=params,
        c_single_nn=None,
        c_multiport=None,
        c_exclusion=None,
        classical_capacity=classical_capacity(params.n_sites - 1, 1),
        npt_nn=None,
        ground_degenerate=None,
        field_samples=field_samples,
        error=f"{type(exc).__name__}: {exc}",
    )


def evaluate_safe(params: SpinChainParams, field_samples: Optional[int] = None) -> CapacityRecord:
    """Evaluate one point; numerical failures become a failed record instead of raising."""
    try:
        if field_samples is None:
            return evaluate_point(params)
        return evaluate_field_average(params, field_samples)
    except (DenseCodingError, np.linalg.LinAlgError, ArithmeticError) as exc:
        log.warning("point %s failed: %s", params, exc)
        return _failed_record(params, exc, field_samples)


def _init_worker() -> None:
    # Pin BLAS to one thread so results do not depend on the pool size.
    global _worker_limits
    _worker_limits = threadpool_limits(limits=1)


def run_sweep(config: SweepConfig) -> list[CapacityRecord]:
    """Evaluate every grid point; records come back in row-major grid order."""
    points = sweep_points(config)
    fn = partial(evaluate_safe, field_samples=config.field_samples if config.averaged else None)
    workers = min(int(config.parallel_workers), len(points))
    if workers <= 1:
        with threadpool_limits(limits=1):
            return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
        return list(pool.map(fn, points, chunksize=1))


def _fmt_float(x: Optional[float]) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def _fmt_bool(b: Optional[bool]) -> str:
    if b is None:
        return ""
    return "true" if b else "false"


def record_row(rec: CapacityRecord) -> list[str]:
    p = rec.params
    avg_mode = f"h_mean_m{rec.field_samples}" if rec.averaged else "none"
    if rec.failed:
        nan = "nan"
        return [
            str(p.n_sites), _fmt_float(p.j), _fmt_float(p.alpha), _fmt_float(p.gamma),
            "" if rec.averaged else _fmt_float(p.h),
            nan, nan, nan, _fmt_float(rec.classical_capacity), "failed", "failed", avg_mode,
        ]
    return [
        str(p.n_sites),
        _fmt_float(p.j),
        _fmt_float(p.alpha),
        _fmt_float(p.gamma),
        "" if rec.averaged else _fmt_float(p.h),
        _fmt_float(rec.c_single_nn),
        _fmt_float(rec.c_multiport),
        _fmt_float(rec.c_exclusion),
        _fmt_float(rec.classical_capacity),
        _fmt_bool(rec.npt_nn),
        _fmt_bool(rec.ground_degenerate),
        avg_mode,
    ]


def emit_csv(records: Sequence[CapacityRecord], path) -> None:
    """Write records as UTF-8 CSV in the given order."""
    if not records:
        raise InputError("no records to write")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(record_row(rec))


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        out[key.lower().replace("-", "_")] = value
    return out


def load_config_file(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    return parse_config_text(text)


def parse_range(name: str, text: str, default_steps: int) -> tuple[float, float, int]:
    """``start:stop`` or ``start:stop:steps``."""
    parts = text.split(":")
    try:
        if len(parts) == 2:
            return float(parts[0]), float(parts[1]), int(default_steps)
        if len(parts) == 3:
            return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        pass
    raise ConfigError(f"{name}_range", f"expected start:stop[:steps], got {text!r}")


def resolve_workers(flag: Optional[int], file_value: Optional[str] = None, env: Mapping[str, str] = os.environ) -> int:
    """Flag wins; the environment override applies only when the flag is absent."""
    if flag is not None:
        return flag
    raw = env.get(WORKERS_ENV) or file_value
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("workers", f"not an integer: {raw!r}") from None


def build_config(
    mode: str,
    settings: Mapping[str, str],
    *,
    default_steps: int,
    workers: int = 1,
) -> SweepConfig:
    """Turn flat string settings (file values already merged with flags) into a config."""
    swept, fixed_names, _ = MODES.get(mode, ((), (), False))
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode {mode!r}")

    def number(key, cast=float):
        try:
            return cast(settings[key])
        except ValueError:
            raise ConfigError(key, f"not a number: {settings[key]!r}") from None

    steps = number("steps", int) if "steps" in settings else default_steps
    fixed = {}
    for name in fixed_names:
        if name in settings:
            fixed[name] = number(name)
    ranges = {}
    for name in swept:
        key = f"{name}_range"
        if key in settings:
            ranges[name] = parse_range(name, settings[key], steps)
        else:
            start, stop = DEFAULT_RANGES[name]
            ranges[name] = (start, stop, steps)
    if MODES[mode][2] and "h" in settings:
        raise ConfigError("h", f"mode {mode} averages over the field; h cannot be fixed")
    for name in PARAM_NAMES:
        if name in settings and name in swept:
            raise ConfigError(name, f"mode {mode} sweeps {name}; give {name}_range instead of a fixed value")
        if f"{name}_range" in settings and name not in swept:
            raise ConfigError(f"{name}_range", f"mode {mode} does not sweep {name}")
    config = SweepConfig(
        mode=mode,
        fixed=fixed,
        ranges=ranges,
        n_sites=number("n", int) if "n" in settings else 10,
        output_path=Path(settings["out"]) if "out" in settings else None,
        parallel_workers=workers,
        field_samples=number("m_field_samples", int) if "m_field_samples" in settings else DEFAULT_FIELD_SAMPLES,
    )
    config.validate()
    return config


def figure_configs(
    figure: int,
    *,
    n_sites: int = 10,
    steps: Optional[int] = None,
    workers: int = 1,
    field_samples: int = DEFAULT_FIELD_SAMPLES,
) -> list[SweepConfig]:
    """Sweep configurations behind each figure's panels, in panel order.

    Figures 1 and 2 share the (J, alpha) grids; 1 plots the pair channel,
    2 the multiport channel.
    """

    def rng(name, n):
        start, stop = DEFAULT_RANGES[name]
        return (start, stop, n)

    if figure in (1, 2):
        n = steps or 20
        return [
            SweepConfig("grid_j_alpha", {"gamma": g, "h": h}, {"j": rng("j", n), "alpha": rng("alpha", n)},
                        n_sites, None, workers, field_samples)
            for g, h in ((0.0, 0.4), (0.0, 0.9), (0.7, 0.4), (0.7, 0.9))
        ]
    if figure == 3:
        n = steps or 40
        return [
            SweepConfig("line_j", {"alpha": a, "gamma": g, "h": h}, {"j": rng("j", n)},
                        n_sites, None, workers, field_samples)
            for a, g in ((0.6, 0.0), (0.6, 0.7), (1.8, 0.0), (1.8, 0.7))
            for h in (0.0, 0.4, 0.9)
        ]
    if figure == 4:
        n = steps or 40
        return [
            SweepConfig("field_average_line", {"alpha": a, "gamma": g}, {"j": rng("j", n)},
                        n_sites, None, workers, field_samples)
            for g in (0.0, 0.7)
            for a in (0.6, 1.8)
        ]
    if figure == 5:
        n = steps or 20
        return [
            SweepConfig("grid_gamma_alpha", {"j": 0.6}, {"gamma": rng("gamma", n), "alpha": rng("alpha", n)},
                        n_sites, None, workers, field_samples)
        ]
    raise ConfigError("figure", f"no figure {figure}; expected 1-5")


def run_many(configs: Iterable[SweepConfig]) -> list[CapacityRecord]:
    records: list[CapacityRecord] = []
    for config in configs:
        records.extend(run_sweep(config))
    return records
