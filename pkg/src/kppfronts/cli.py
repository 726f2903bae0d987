"""Command-line entry point: config parsing, validation, dispatch."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field, asdict
from pathlib import Path

from . import harness
from .errors import KppFrontsError, ParseError, ValidationError
from .solver import SolverConfig

EXPERIMENTS = (
    "simulate",
    "media-preview",
    "theorem1",
    "liminf-probe",
    "verify-bounds",
    "speed",
    "zlatos",
)

_MEDIA_KEYS = {"mu_minus", "mu_plus", "regime", "transition", "sequence", "left_rate", "right_rate"}
_SEQUENCE_KEYS = {"kind", "params", "n_max"}
_SOLVER_KEYS = {
    "dx",
    "dt",
    "scheme",
    "right_margin",
    "extension_threshold",
    "extension_chunk",
    "bound_check_stride",
    "memory_cap_cells",
    "trim_enabled",
    "trim_threshold",
    "trim_margin",
    "trim_stride",
}
_TOP_KEYS = {
    "media",
    "solver",
    "levels",
    "experiment",
    "horizon",
    "output_dir",
    "preset",
    "sample_interval",
    "probe_sigma",
    "snapshot_interval",
    "preview_resolution",
    "speed_window",
}

_DEFAULTS = {
    "media": {"mu_minus": 1.0, "mu_plus": 4.0, "regime": "theorem1", "transition": "smooth-exp"},
    "solver": {},
    "levels": [0.5],
    "experiment": "simulate",
    "horizon": 100.0,
    "output_dir": "out",
    "preset": None,
    "sample_interval": 0.5,
    "probe_sigma": 3.0,
    "snapshot_interval": 5.0,
    "preview_resolution": 0.25,
    "speed_window": [40.0, 80.0],
}


@dataclass
class RunConfig:
    """Validated effective configuration for one experiment run."""

    media: dict
    solver: dict = dc_field(default_factory=dict)
    levels: list = dc_field(default_factory=lambda: [0.5])
    experiment: str = "simulate"
    horizon: float = 100.0
    output_dir: str = "out"
    preset: str | None = None
    sample_interval: float = 0.5
    probe_sigma: float = 3.0
    snapshot_interval: float = 5.0
    preview_resolution: float = 0.25
    speed_window: list = dc_field(default_factory=lambda: [40.0, 80.0])

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def effective_dict(self) -> dict:
        return asdict(self)


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"unknown key(s) {sorted(unknown)} in {where}")


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Assemble the effective config: defaults <- preset <- file <- flag overrides."""
    overrides = dict(overrides or {})
    file_cfg: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ParseError(f"config file not found: {p}")
        try:
            file_cfg = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}: line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
        if not isinstance(file_cfg, dict):
            raise ParseError(f"{p}: top level must be a JSON object")

    preset_name = overrides.get("preset", file_cfg.get("preset"))
    cfg = dict(_DEFAULTS)
    cfg["media"] = dict(_DEFAULTS["media"])
    if preset_name is not None:
        if preset_name not in harness.PRESETS:
            raise ValidationError(f"unknown preset {preset_name!r}")
        cfg = _merge(cfg, harness.PRESETS[preset_name])
        cfg["preset"] = preset_name
    cfg = _merge(cfg, file_cfg)
    cfg = _merge(cfg, {k: v for k, v in overrides.items() if v is not None})

    _check_keys(cfg, _TOP_KEYS, "top level")
    _check_keys(cfg["media"], _MEDIA_KEYS, "media")
    if cfg["media"].get("sequence"):
        _check_keys(cfg["media"]["sequence"], _SEQUENCE_KEYS, "media.sequence")
    _check_keys(cfg.get("solver", {}), _SOLVER_KEYS, "solver")

    config = RunConfig(**cfg)
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.experiment not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {config.experiment!r}")
    if not config.horizon > 0:
        raise ValidationError("horizon must be positive")
    for g in config.levels:
        if not (0.0 < g < 1.0):
            raise ValidationError(f"levels must lie in (0,1); got {g}")
    if config.sample_interval <= 0:
        raise ValidationError("sample_interval must be positive")
    scfg = config.solver_config()  # raises on bad solver keys/values
    mu_plus = float(config.media.get("mu_plus", 0.0))
    if scfg.dt * mu_plus > 0.5 + 1e-12:
        raise ValidationError(
            f"dt*mu_plus = {scfg.dt * mu_plus:.4g} violates dt*mu_plus <= 1/2"
        )
    if len(config.speed_window) != 2 or not config.speed_window[0] < config.speed_window[1]:
        raise ValidationError("speed_window must be [t1, t2] with t1 < t2")


_RUNNERS = {
    "simulate": harness.run_simulate,
    "media-preview": harness.run_media_preview,
    "theorem1": harness.run_theorem1,
    "liminf-probe": harness.liminf_probe,
    "verify-bounds": harness.verify_all_bounds,
    "speed": harness.run_speed,
    "zlatos": harness.run_zlatos,
}


def dispatch(config: RunConfig) -> int:
    """Run the selected experiment.  Exit 0 on pass, 1 on bound violation or
    required-gate failure, 2 on runtime error."""
    from .reporting import write_json

    out = Path(config.output_dir)
    try:
        write_json(out / "config.echo.json", config.effective_dict())
        outcome = _RUNNERS[config.experiment](config)
    except KppFrontsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if not outcome.passed:
        print(f"{config.experiment}: FAILED (see {out / 'report.json'})", file=sys.stderr)
        return 1
    print(f"{config.experiment}: ok ({len(outcome.artifacts)} artifacts in {out})", file=sys.stderr)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kppfronts",
        description="Fisher-KPP fronts in slowly varying media: simulation and bound checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON configuration file")
        p.add_argument("--preset", type=str, default=None, help="named preset (ci, desk, zlatos, homogeneous)")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--gamma", type=float, action="append", default=None, help="tracked level (repeatable)")
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--dx", type=float, default=None)
        p.add_argument("--dt", type=float, default=None)
        if name == "liminf-probe":
            p.add_argument("--sigma", type=float, default=None, help="probe speed > 2 sqrt(mu_minus)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides: dict = {"experiment": args.command}
    if args.preset is not None:
        overrides["preset"] = args.preset
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.gamma is not None:
        overrides["levels"] = args.gamma
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    solver_over = {}
    if args.dx is not None:
        solver_over["dx"] = args.dx
    if args.dt is not None:
        solver_over["dt"] = args.dt
    if solver_over:
        overrides["solver"] = solver_over
    if getattr(args, "sigma", None) is not None:
        overrides["probe_sigma"] = args.sigma
    try:
        config = parse_config(args.config, overrides)
    except KppFrontsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return dispatch(config)


if __name__ == "__main__":
    raise SystemExit(main())
