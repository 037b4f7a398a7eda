"""Command-line front end: ``debroglie {hom,fringe,packet,oracle-check}``.

Settings resolve as command-line flags over a ``--config`` file of
``key=value`` lines over the built-in defaults of the 810 nm experiment.
Every run prints a JSON status object on stdout and exits 0 on success,
2 on a configuration error and 3 on a numerical or convergence failure.
"""

import argparse
import json
import logging
import re
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import experiments
from .analysis import extract_envelope
from .exceptions import ConfigurationError, NumericalError, OracleCheckFailed, ScanConfigError
from .experiments import ScanRange, SourceKind
from .logging import configure_logging
from .models import EnvelopeReport, RateCurve
from .oracle import OracleConfig
from .settings import settings
from .sources import SourceModel
from .spectra import coherence_length, fwhm_to_gaussian_width

logger = logging.getLogger("debroglie.cli")

Command = Literal["hom", "fringe", "packet", "oracle-check"]

UNITS = {"nm": 1e-9, "um": 1e-6, "μm": 1e-6, "mm": 1e-3, "m": 1.0}
LENGTH_PATTERN = re.compile(
    r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(nm|um|μm|mm|m)?\s*$"
)
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off", ""}

MIN_SAMPLES_PER_PERIOD = 16
MIN_HOM_SAMPLES_PER_COHERENCE = 4
CSV_FORMAT = "%.12g"

# display unit of the scanned axis per command
AXIS_UNIT = {"hom": "um", "fringe": "nm", "packet": "um"}
DEFAULT_OUTPUT = {
    "hom": "hom.csv",
    "fringe": "fringe.csv",
    "packet": "packet.csv",
    "oracle-check": "oracle_check.json",
}


def parse_length(text: str, default_unit: str) -> float:
    """Length in metres from ``"62um"``, ``"2.8 mm"`` or a bare number in ``default_unit``."""
    match = LENGTH_PATTERN.match(str(text))
    if not match:
        raise ScanConfigError(f"cannot read a length from {text!r}")
    value, unit = match.groups()
    return float(value) * UNITS[unit or default_unit]


def parse_scan(text: str, default_unit: str) -> ScanRange:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ScanConfigError(f"scan must be start:stop:step, got {text!r}")
    start, stop, step = (parse_length(p, default_unit) for p in parts)
    try:
        return ScanRange(start=start, stop=stop, step=step)
    except ValidationError as e:
        raise ScanConfigError(f"invalid scan {text!r}: {e.errors()[0]['msg']}")


def parse_flag(text: str) -> bool:
    word = str(text).strip().lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ScanConfigError(f"expected a boolean, got {text!r}")


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Command
    source: SourceKind = "spdc"
    center_wavelength: float = Field(default=experiments.CENTER_WAVELENGTH, gt=0.0)
    filter_fwhm: float = Field(default=experiments.FILTER_FWHM, gt=0.0)
    pump_fwhm: float | None = Field(default=None, ge=0.0)
    x1: float | None = None
    scan: ScanRange | None = None
    oracle: bool = False
    oracle_config: OracleConfig = OracleConfig()
    out: Path | None = None
    visibility_factor: float = Field(default=1.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    points: int = Field(default=experiments.ORACLE_CHECK_POINTS, ge=1)
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)

    @model_validator(mode="after")
    def check_scan_resolution(self) -> "RunConfig":
        if self.scan is None:
            return self
        if self.command in ("fringe", "packet"):
            period = self.center_wavelength / 2.0
            if self.scan.step > period / MIN_SAMPLES_PER_PERIOD * (1 + 1e-9):
                raise ValueError(
                    f"x2 step {self.scan.step:.4g} m exceeds fringe period/{MIN_SAMPLES_PER_PERIOD}"
                )
        if self.command == "hom":
            width = fwhm_to_gaussian_width(self.filter_fwhm, self.center_wavelength)
            limit = coherence_length(width) / MIN_HOM_SAMPLES_PER_COHERENCE
            if self.scan.step > limit:
                raise ValueError(f"x1 step {self.scan.step:.4g} m does not resolve the dip")
        return self

    @property
    def resolved_pump_fwhm(self) -> float:
        if self.pump_fwhm is not None:
            return self.pump_fwhm
        if self.command == "packet":
            return experiments.PACKET_PUMP_FWHM
        return experiments.HOM_PUMP_FWHM

    @property
    def x1_values(self) -> tuple[float, ...]:
        if self.x1 is not None:
            return (self.x1,)
        if self.command == "packet":
            return experiments.PACKET_X1_VALUES
        return experiments.FRINGE_X1_VALUES

    def build_source(self) -> SourceModel:
        return experiments.build_source(
            self.source, self.center_wavelength, self.filter_fwhm, self.resolved_pump_fwhm
        )

    def oracle_or_none(self) -> OracleConfig | None:
        return self.oracle_config if self.oracle else None

    def output_path(self) -> Path:
        return settings.resolve_output(self.out or DEFAULT_OUTPUT[self.command])


# -- configuration assembly -------------------------------------------------


def _normalise_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key=value`` lines with ``#`` comments; keys follow the flag names."""
    path = Path(path)
    if not path.is_file():
        raise ScanConfigError(f"config file {path} does not exist")
    return {_normalise_key(k): v for k, v in dotenv_values(path).items() if v is not None}


def _convert(command: str, raw: dict[str, Any]) -> dict[str, Any]:
    axis_unit = AXIS_UNIT.get(command, "um")
    fields: dict[str, Any] = {"command": command}
    oracle_overrides: dict[str, Any] = {}
    for key, value in raw.items():
        if key == "source":
            fields["source"] = str(value).strip()
        elif key == "lambda0":
            fields["center_wavelength"] = parse_length(value, "nm")
        elif key == "filter_fwhm":
            fields["filter_fwhm"] = parse_length(value, "nm")
        elif key == "pump_fwhm":
            fields["pump_fwhm"] = parse_length(value, "nm")
        elif key == "x1":
            fields["x1"] = parse_length(value, "um")
        elif key == "scan":
            fields["scan"] = parse_scan(value, axis_unit)
        elif key == "oracle":
            fields["oracle"] = value if isinstance(value, bool) else parse_flag(value)
        elif key == "out":
            fields["out"] = Path(value)
        elif key == "vis_degrade":
            fields["visibility_factor"] = float(value)
        elif key in ("seed", "points", "workers"):
            fields[key] = int(value)
        elif key.startswith("oracle_") and key[len("oracle_") :] in OracleConfig.model_fields:
            oracle_overrides[key[len("oracle_") :]] = value
        else:
            raise ScanConfigError(f"unknown setting {key!r}")
    if oracle_overrides:
        fields["oracle_config"] = OracleConfig(**oracle_overrides)
    return fields


def build_run_config(args: argparse.Namespace) -> RunConfig:
    raw: dict[str, Any] = load_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("command", "config", "log_level") or value is None:
            continue
        if key == "oracle" and value is False:
            continue
        raw[key] = value
    try:
        fields = _convert(args.command, raw)
    except ScanConfigError:
        raise
    except ValueError as e:
        raise ScanConfigError(f"invalid setting: {e}")
    return RunConfig(**fields)


# -- output -----------------------------------------------------------------


def _panel_path(base: Path, x1: float, panels: int) -> Path:
    if panels == 1:
        return base
    return base.with_name(f"{base.stem}_x1_{x1 * 1e6:g}um{base.suffix}")


def write_curve_csv(curve: RateCurve, path: Path, unit: str) -> Path:
    columns = [curve.axis / UNITS[unit], curve.rates]
    header = [f"axis_{unit}", "rate"]
    if curve.oracle_rates is not None:
        columns.append(curve.oracle_rates)
        header.append("oracle_rate")
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path,
        np.column_stack(columns),
        delimiter=",",
        header=",".join(header),
        comments="",
        fmt=CSV_FORMAT,
    )
    return path


def write_envelope_csv(
    envelope: EnvelopeReport, model: tuple[np.ndarray, np.ndarray], path: Path, unit: str
) -> Path:
    upper = np.asarray(envelope.upper)
    lower = np.asarray(envelope.lower)
    model_upper, model_lower = model
    scale = UNITS[unit]
    data = np.column_stack(
        [upper[:, 0] / scale, upper[:, 1], lower[:, 0] / scale, lower[:, 1], model_upper, model_lower]
    )
    header = f"upper_axis_{unit},upper,lower_axis_{unit},lower,model_upper,model_lower"
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=CSV_FORMAT)
    return path


def write_report(report: BaseModel | dict[str, Any], path: Path) -> Path:
    payload = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")
    return path


# -- commands ---------------------------------------------------------------


def cmd_hom(config: RunConfig) -> list[Path]:
    source = config.build_source()
    curve = experiments.hom_scan(source, config.scan, config.oracle_or_none(), config.workers)
    path = config.output_path()
    report = experiments.analyse_hom(curve)
    return [
        write_curve_csv(curve, path, AXIS_UNIT["hom"]),
        write_report(report, path.with_suffix(".json")),
    ]


def cmd_fringe(config: RunConfig) -> list[Path]:
    source = config.build_source()
    base = config.output_path()
    panels = config.x1_values
    written = []
    for x1 in panels:
        curve = experiments.fringe_scan(
            source, x1, config.scan, config.visibility_factor, config.oracle_or_none(), config.workers
        )
        path = _panel_path(base, x1, len(panels))
        report = experiments.analyse_fringe(curve)
        written.append(write_curve_csv(curve, path, AXIS_UNIT["fringe"]))
        written.append(write_report(report, path.with_suffix(".json")))
    return written


def cmd_packet(config: RunConfig) -> list[Path]:
    source = config.build_source()
    base = config.output_path()
    panels = config.x1_values
    written = []
    for x1 in panels:
        curve = experiments.packet_scan(
            source, x1, config.scan, config.visibility_factor, config.oracle_or_none(), config.workers
        )
        path = _panel_path(base, x1, len(panels))
        envelope = extract_envelope(curve)
        report = experiments.analyse_packet(curve, envelope)
        written.append(write_curve_csv(curve, path, AXIS_UNIT["packet"]))
        model = experiments.envelope_model(source, curve, envelope)
        envelope_path = path.with_name(f"{path.stem}_envelope.csv")
        written.append(write_envelope_csv(envelope, model, envelope_path, AXIS_UNIT["packet"]))
        written.append(write_report(report, path.with_suffix(".json")))
    return written


def cmd_oracle_check(config: RunConfig) -> list[Path]:
    report = experiments.oracle_check(
        seed=config.seed,
        points=config.points,
        cfg=config.oracle_config,
        center_wavelength=config.center_wavelength,
        workers=config.workers,
    )
    path = write_report(
        {**report.model_dump(mode="json"), "passed": report.passed},
        config.output_path().with_suffix(".json"),
    )
    if not report.passed:
        failed = [e.quantity for e in report.entries if not e.passed]
        raise OracleCheckFailed(f"oracle check failed for {', '.join(failed)}; report at {path}")
    return [path]


COMMANDS = {
    "hom": cmd_hom,
    "fringe": cmd_fringe,
    "packet": cmd_packet,
    "oracle-check": cmd_oracle_check,
}


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--source", choices=["spdc", "separable", "distinguishable"])
    common.add_argument("--lambda0", help="center wavelength (default unit nm, default 810)")
    common.add_argument("--filter-fwhm", help="filter FWHM (default unit nm, default 5)")
    common.add_argument("--pump-fwhm", help="pump FWHM (default unit nm; 0.67, or 2 for packet)")
    common.add_argument("--oracle", action="store_true", default=False, help="add an oracle column")
    common.add_argument("--out", help="output path; relative paths land in DEBROGLIE_OUTPUT_DIR")
    common.add_argument("--config", help="file of key=value settings below the flags")
    common.add_argument("--workers", type=int, help="threads for oracle points")
    common.add_argument("--log-level", help="override DEBROGLIE_LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="debroglie", description="Two-photon de Broglie wave interference in a Mach-Zehnder"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    hom = sub.add_parser("hom", parents=[common], help="HOM dip against x1")
    hom.add_argument("--scan", help="x1 range start:stop:step (default unit um)")

    for name, unit, text in (
        ("fringe", "nm", "de Broglie fringes against x2"),
        ("packet", "um", "de Broglie wave packet against x2"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--x1", help="fixed x1 (default unit um); omit for the four reference panels")
        p.add_argument("--scan", help=f"x2 range start:stop:step (default unit {unit})")
        p.add_argument("--vis-degrade", type=float, help="fringe visibility factor in [0, 1]")

    check = sub.add_parser("oracle-check", parents=[common], help="closed forms against the oracle")
    check.add_argument("--seed", type=int, help="sweep seed (default 0)")
    check.add_argument("--points", type=int, help="parameter sets per quantity (default 50)")
    return parser


def _status(status: str, **fields: Any) -> None:
    print(json.dumps({"status": status, **fields}, indent=2))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = build_run_config(args)
        written = COMMANDS[config.command](config)
    except (ValidationError, ConfigurationError) as e:
        logger.error("Invalid configuration", extra={"event": "cli.config_error", "error": str(e)})
        _status("config_error", command=args.command, error=str(e))
        return ConfigurationError.exit_code
    except NumericalError as e:
        logger.error("Numerical failure", extra={"event": "cli.numeric_error", "error": str(e)})
        _status("numeric_error", command=args.command, error=str(e))
        return NumericalError.exit_code
    _status("ok", command=args.command, outputs=[str(p) for p in written])
    return 0


if __name__ == "__main__":
    sys.exit(main())
