"""Command-line driver.

    slmspec fringes --n 2 --phi-range 0:6.2832 --points 4001
    slmspec baseline --kind nslit --n 10
    slmspec sensitivity --n 10 --delta-i 0.01
    slmspec wavemeter --n 10 --delta-f 0.1 --auto-scan
    slmspec sweep --n 2 10 100
    slmspec --config run.json

Phases are in radians; the half-wave plate angle is given in degrees.
Exit codes: 0 success, 2 configuration error, 3 numerical/scan error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import io
from .baselines import FabryPerotModel, NSlitModel, fabry_perot_trace, nslit_trace
from .correlation import CorrelationTrace, ScanGrid, correlation_trace, fringe_metrics
from .eraser import eraser_intensities, make_slm, sample_counts
from .errors import ConfigError, NumericalError
from .optics import ApparatusConfig
from .sensitivity import UNIT_PERIOD, gain_curve, nslit_slope, phase_error, quantum_slope
from .spectrometer import (
    BeatScanConfig,
    auto_scan,
    beat_traces,
    count_beats,
    estimate_frequency,
    noisy_trace,
)

OUTPUT_ENV = "SLMSPEC_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
COMMANDS = ("fringes", "baseline", "sensitivity", "wavemeter", "sweep")


@dataclass
class RunConfig:
    command: str
    n: int | list = 2
    phi_range: list = field(default_factory=lambda: [0.0, 2 * np.pi])
    points: int | None = None
    amplitude: float = 1.0
    hwp_angle_deg: float = 22.5
    allow_coarse: bool = False
    normalize: bool = True
    noise: dict | None = None
    output_dir: str = "slmspec-out"
    frequency_convention: str = "angular"
    record_timing: bool = False
    kind: str = "nslit"
    beta: float = 0.0
    reflectance: float = 0.9
    window: list = field(default_factory=lambda: list(UNIT_PERIOD))
    delta_i: float = 0.01
    f0: float = 1.0
    delta_f: float = 0.1
    min_delta_f: float | None = None
    auto_scan: bool = False
    pipeline: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        try:
            io.validate(data, io.CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config invalid at {where}: {exc.message}") from None
        config = cls(**data)
        config.check()
        return config

    def to_dict(self) -> dict:
        return io.jsonable(asdict(self))

    def check(self):
        if self.command in ("fringes", "baseline", "sensitivity", "wavemeter") and not isinstance(self.n, int):
            raise ConfigError(f"{self.command} takes a single integer n")
        if self.command == "sweep":
            ns = self.n if isinstance(self.n, list) else [self.n]
            if not ns:
                raise ConfigError("sweep needs a nonempty N list")
        if self.noise is not None and self.command not in ("fringes", "wavemeter"):
            raise ConfigError(f"noise is not supported by {self.command}")
        lo, hi = self.phi_range
        if not hi > lo:
            raise ConfigError(f"phi_range must be increasing, got {self.phi_range}")
        lo, hi = self.window
        if not hi > lo:
            raise ConfigError(f"window must be increasing, got {self.window}")
        if self.command == "wavemeter" and self.delta_f == 0 and self.auto_scan and not self.min_delta_f:
            raise ConfigError("auto_scan needs a nonzero delta_f or min_delta_f")


@dataclass
class RunSummary:
    command: str
    config: dict
    result: dict
    files: list
    duration_s: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "schema": io.SUMMARY_SCHEMA_TAG,
            "command": self.command,
            "config": self.config,
            "result": io.jsonable(self.result),
            "files": list(self.files),
        }
        if include_timing:
            doc["duration_s"] = float(self.duration_s)
        return doc


def _grid(config: RunConfig, n: int) -> ScanGrid:
    lo, hi = config.phi_range
    if config.points is None:
        return ScanGrid.for_order(n, lo, hi)
    return ScanGrid(lo, hi, config.points)


def _grid_dict(grid: ScanGrid) -> dict:
    return {"phi_min": grid.phi_min, "phi_max": grid.phi_max, "n_points": grid.n_points}


def _metrics_dict(trace: CorrelationTrace) -> dict:
    m = fringe_metrics(trace)
    return {"peak_count": m.peak_count, "mean_period": m.mean_period,
            "resolution_delta": m.resolution_delta}


def _noisy_fringe_trace(apparatus, slm, grid, noise) -> CorrelationTrace:
    ia, ib = eraser_intensities(apparatus, slm, grid.phi)
    counts = sample_counts(np.stack([ia, ib]), noise["exposure"], noise["seed"])
    with np.errstate(divide="ignore"):
        logs = np.sum(np.log(counts / noise["exposure"]), axis=(0, 1))
    return CorrelationTrace.from_log(grid, logs, 2 * slm.pixel_count)


def _run_fringes(config):
    n = config.n
    grid = _grid(config, n)
    apparatus = ApparatusConfig(config.amplitude, np.deg2rad(config.hwp_angle_deg), 0.0, n)
    slm = make_slm(n)
    if config.noise is None:
        trace = correlation_trace(apparatus, slm, grid, allow_coarse=config.allow_coarse)
    else:
        grid.check_resolution(n, config.allow_coarse)
        trace = _noisy_fringe_trace(apparatus, slm, grid, config.noise)
    files = {f"fringes_N{n}.csv": io.csv_bytes(
        ["phi", "normalized", "log_value"], [grid.phi, trace.normalized_values, trace.log_values])}
    result = {"kind": "fringes", "n": n, "order": trace.order, "grid": _grid_dict(grid),
              "metrics": _metrics_dict(trace)}
    return result, files


def _run_baseline(config):
    n = config.n
    if config.kind == "nslit":
        model = NSlitModel(n, config.beta)
        grid = _grid(config, n)
        trace = nslit_trace(model, grid)
        params = {"slit_count": n, "beta": config.beta}
    else:
        model = FabryPerotModel(config.reflectance)
        lo, hi = config.phi_range
        grid = ScanGrid(lo, hi, config.points or 20001)
        trace = fabry_perot_trace(model, grid)
        params = {"reflectance": model.reflectance,
                  "coefficient_of_finesse": model.coefficient_of_finesse,
                  "finesse": model.finesse, "exact_finesse": model.exact_finesse}
    values = trace.values
    normalized = values / (n**2 * model.envelope) if config.kind == "nslit" and config.normalize \
        else trace.normalized_values
    files = {f"baseline_{config.kind}_N{n}.csv" if config.kind == "nslit" else "baseline_fabry-perot.csv":
             io.csv_bytes(["phi", "value", "normalized"], [grid.phi, values, normalized])}
    result = {"kind": config.kind, "model": params, "grid": _grid_dict(grid),
              "metrics": _metrics_dict(trace)}
    return result, files


def _run_sensitivity(config):
    n = config.n
    window = tuple(config.window)
    q = quantum_slope(n, window)
    c = nslit_slope(n, window)
    q_report = phase_error(q, config.delta_i, window)
    c_report = phase_error(c, config.delta_i, window)
    files = {
        f"sensitivity_quantum_N{n}.csv": io.csv_bytes(["phi", "slope"], [q.phi, q.slope_values]),
        f"sensitivity_nslit_N{n}.csv": io.csv_bytes(["phi", "slope"], [c.phi, c.slope_values]),
    }
    result = {"kind": "sensitivity", "n": n, "window": list(window), "delta_i": config.delta_i,
              "quantum_gain": q_report.mean_abs_slope, "classical_gain": c_report.mean_abs_slope,
              "min_phase_error": q_report.min_phase_error, "best_phi": q_report.best_phi}
    return result, files


def _run_wavemeter(config):
    n, f0 = config.n, config.f0
    f = f0 * (1 + config.delta_f)
    if config.auto_scan:
        smallest = config.min_delta_f or abs(config.delta_f)
        grid = auto_scan(n, smallest * f0, max(smallest, abs(config.delta_f)) * f0, f0)
    else:
        lo, hi = config.phi_range
        points = config.points or ScanGrid.for_order(n * max(f / f0, 1.0), lo, hi).n_points
        grid = ScanGrid(lo, hi, points)
    scan = BeatScanConfig(f0, f, n, grid)
    unknown, reference = beat_traces(scan, pipeline=config.pipeline)
    measured = unknown
    if config.noise is not None:
        measured = noisy_trace(unknown, config.noise["exposure"], config.noise["seed"])
    estimate = estimate_frequency(measured, f0, n)
    beats = count_beats(measured, reference) if config.noise is None else estimate.beat_count
    scale = 1 / (2 * np.pi) if config.frequency_convention == "cyclical" else 1.0
    product = measured.normalized_values * reference.normalized_values
    files = {f"wavemeter_N{n}.csv": io.csv_bytes(
        ["tau", "unknown", "reference", "product"],
        [grid.phi / f0, measured.normalized_values, reference.normalized_values, product])}
    result = {
        "kind": "wavemeter", "n": n, "convention": config.frequency_convention,
        "f0": f0 * scale, "true_f": f * scale,
        "delta_f": estimate.delta_f_magnitude * scale,
        "candidates": [c * scale for c in estimate.candidates],
        "beat_count": beats, "uncertainty": estimate.relative_uncertainty,
        "grid": _grid_dict(grid),
    }
    return result, files


def _run_sweep(config):
    ns = config.n if isinstance(config.n, list) else [config.n]
    window = tuple(config.window)
    rows = gain_curve(ns, window)
    files = {}
    for n in ns:
        q = quantum_slope(n, window)
        files[f"sweep_quantum_N{n}.csv"] = io.csv_bytes(["phi", "slope"], [q.phi, q.slope_values])
    result = {"kind": "sweep", "window": list(window),
              "rows": [{"n": n, "quantum_gain": qg, "classical_gain": cg} for n, qg, cg in rows]}
    return result, files


_RUNNERS = {"fringes": _run_fringes, "baseline": _run_baseline, "sensitivity": _run_sensitivity,
            "wavemeter": _run_wavemeter, "sweep": _run_sweep}


def run(config: RunConfig, write: bool = True) -> RunSummary:
    """Execute one command; files are written only after every computation succeeds."""
    start = time.perf_counter()
    result, files = _RUNNERS[config.command](config)
    summary_name = f"{config.command}_summary.json"
    summary = RunSummary(config.command, config.to_dict(), io.jsonable(result),
                         sorted(files) + [summary_name])
    summary.duration_s = time.perf_counter() - start
    doc = summary.to_dict(include_timing=config.record_timing)
    io.validate(doc, io.SUMMARY_SCHEMA)
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, payload in sorted(files.items()):
            (out / name).write_bytes(payload)
        (out / summary_name).write_bytes(io.json_bytes(doc))
    return summary


def sweep(config: RunConfig, write: bool = True) -> RunSummary:
    if config.command != "sweep":
        config = RunConfig(**{**asdict(config), "command": "sweep"})
    return run(config, write)


def _range(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None
    return [lo, hi]


def _range_deg(text: str):
    return [float(np.deg2rad(v)) for v in _range(text)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--convention", dest="frequency_convention", choices=["angular", "cyclical"])
    common.add_argument("--record-timing", dest="record_timing", action="store_true")
    common.add_argument("--phi-range", dest="phi_range", type=_range, help="radians, MIN:MAX")
    common.add_argument("--phi-range-deg", dest="phi_range", type=_range_deg, help="degrees, MIN:MAX")
    common.add_argument("--points", type=int)
    common.add_argument("--allow-coarse", dest="allow_coarse", action="store_true")
    common.add_argument("--grid-normalize", dest="normalize", action="store_false",
                        help="normalize N-slit values by the grid maximum instead of N^2")
    common.add_argument("--exposure", type=float, help="Poisson noise: counts at unit intensity")
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="slmspec", description=__doc__.split("\n\n")[0],
                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--config", dest="config_file", help="JSON file mirroring RunConfig")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--record-timing", dest="record_timing", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("fringes", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--n", type=int)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--hwp-angle-deg", dest="hwp_angle_deg", type=float)

    p = sub.add_parser("baseline", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--kind", choices=["nslit", "fabry-perot"])
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--reflectance", type=float)

    p = sub.add_parser("sensitivity", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--n", type=int)
    p.add_argument("--window", type=_range)
    p.add_argument("--delta-i", dest="delta_i", type=float)

    p = sub.add_parser("wavemeter", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--n", type=int)
    p.add_argument("--f0", type=float)
    p.add_argument("--delta-f", dest="delta_f", type=float, help="relative offset (f - f0)/f0")
    p.add_argument("--min-delta-f", dest="min_delta_f", type=float)
    p.add_argument("--auto-scan", dest="auto_scan", action="store_true")
    p.add_argument("--pipeline", action="store_true", help="use the pixel-product route")

    p = sub.add_parser("sweep", parents=[common], argument_default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, nargs="*")
    p.add_argument("--window", type=_range)
    return parser


def config_from_args(argv) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    if args.get("command") is None:
        args.pop("command", None)
    data = {}
    path = args.pop("config_file", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    exposure, seed = args.pop("exposure", None), args.pop("seed", None)
    if exposure is not None or seed is not None:
        noise = dict(data.get("noise") or {})
        if exposure is not None:
            noise["exposure"] = exposure
        noise.setdefault("seed", 0)
        if seed is not None:
            noise["seed"] = seed
        args["noise"] = noise
    explicit_out = "output_dir" in args
    data.update(args)
    if not explicit_out and os.environ.get(OUTPUT_ENV):
        data["output_dir"] = os.environ[OUTPUT_ENV]
    if "command" not in data:
        raise ConfigError(f"no command given; choose one of {', '.join(COMMANDS)}")
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = config_from_args(argv)
        summary = run(config)
    except ConfigError as exc:
        print(f"slmspec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"slmspec: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(summary.to_dict(), sort_keys=True))
    print(f"wrote {len(summary.files)} files to {config.output_dir} in {summary.duration_s:.3f} s",
          file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
