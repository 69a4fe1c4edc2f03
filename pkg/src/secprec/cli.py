"""Command-line front end.

Subcommands: ``solve`` (one scheme, one realization, JSON record on stdout),
``sweep`` / ``ser`` / ``robust`` (CSV sweeps plus a JSON run manifest).

Config files are flat ``key=value`` text; ``#`` starts a comment. Unknown
keys are rejected. Exit codes: 0 success/optimal, 1 usage or config error,
2 infeasible, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from .channels import channels_from_csv
from .designs import (SCHEME_CONSTRUCTIVE, SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
                      SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONSTRUCTIVE,
                      SCHEME_ROBUST_CONVENTIONAL, outcome_to_json,
                      solve_scheme)
from .experiments import (ExperimentConfig, run_power_sweep, run_robust_probe,
                          run_ser)
from .presets import PRESET_NAMES, make_preset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3

STATUS_EXIT_CODES = {
    "optimal": EXIT_OK,
    "infeasible": EXIT_INFEASIBLE,
    "numerical_failure": EXIT_NUMERICAL,
    "unbounded": EXIT_NUMERICAL,
}

SCHEME_ALIASES = {
    "conv": SCHEME_CONVENTIONAL,
    "conventional": SCHEME_CONVENTIONAL,
    "const": SCHEME_CONSTRUCTIVE,
    "constructive": SCHEME_CONSTRUCTIVE,
    "const-dest": SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
    "cd": SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
    "constructive_destructive": SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
    "robust-conv": SCHEME_ROBUST_CONVENTIONAL,
    "robust_conventional": SCHEME_ROBUST_CONVENTIONAL,
    "robust-const": SCHEME_ROBUST_CONSTRUCTIVE,
    "robust_constructive": SCHEME_ROBUST_CONSTRUCTIVE,
}


class ConfigError(Exception):
    pass


def _parse_modulation(text: str) -> int:
    t = text.strip().lower()
    named = {"bpsk": 2, "qpsk": 4, "8psk": 8, "16psk": 16}
    if t in named:
        return named[t]
    if t.endswith("psk"):
        try:
            return int(t[:-3])
        except ValueError:
            pass
    raise ConfigError(f"cannot parse modulation {text!r} (use e.g. qpsk, 8psk)")


def _parse_schemes(text: str) -> tuple[str, ...]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item not in SCHEME_ALIASES:
            raise ConfigError(f"unknown scheme {item!r} "
                              f"(choices: {', '.join(sorted(set(SCHEME_ALIASES)))})")
        out.append(SCHEME_ALIASES[item])
    if not out:
        raise ConfigError("schemes list is empty")
    return tuple(out)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


_KEY_PARSERS = {
    "n_t": int,
    "k_eves": int,
    "n_an": int,
    "modulation": _parse_modulation,
    "gamma_d_db": _floats,
    "gamma_e_db": _floats,
    "sigma_d2": float,
    "sigma_e2": float,
    "eps_d": float,
    "eps_e": float,
    "realizations": int,
    "slots": int,
    "seed": int,
    "schemes": _parse_schemes,
    "distances": _floats,
    "pathloss_exponent": float,
}


def parse_config_text(text: str) -> dict:
    """Parse flat key=value config text; unknown keys are an error."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"unknown config key: {key}")
        if key in values:
            raise ConfigError(f"duplicate config key: {key}")
        try:
            values[key] = _KEY_PARSERS[key](val.strip())
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
    return values


def experiment_config_from_values(values: dict) -> ExperimentConfig:
    kwargs = dict(values)
    if "modulation" in kwargs:
        kwargs["modulation_order"] = kwargs.pop("modulation")
    try:
        return ExperimentConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    return experiment_config_from_values(parse_config_text(Path(path).read_text()))


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent, capture_output=True,
            text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "n_t": cfg.n_t, "k_eves": cfg.k_eves, "n_an": cfg.n_an,
        "modulation_order": cfg.modulation_order,
        "gamma_d_db": list(cfg.gamma_d_db), "gamma_e_db": list(cfg.gamma_e_db),
        "sigma_d2": cfg.sigma_d2, "sigma_e2": cfg.sigma_e2,
        "eps_d": cfg.eps_d, "eps_e": cfg.eps_e,
        "realizations": cfg.realizations, "slots": cfg.slots,
        "violation_samples": cfg.violation_samples,
        "schemes": list(cfg.schemes), "seed": cfg.seed,
        "distances": list(cfg.distances) if cfg.distances else None,
        "pathloss_exponent": cfg.pathloss_exponent,
    }


def _write_manifest(out_dir: Path, command: str, configs: dict,
                    outputs: list[str], wall_time: float) -> None:
    manifest = {
        "command": command,
        "configs": configs,
        "git_describe": _git_describe(),
        "wall_time_s": round(wall_time, 3),
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                      sort_keys=True) + "\n")


def cmd_solve(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if len(cfg.gamma_d_db) != 1 or len(cfg.gamma_e_db) != 1:
        raise ConfigError("solve needs scalar gamma_d_db and gamma_e_db")
    if args.channels:
        ch = channels_from_csv(args.channels)
        from dataclasses import replace
        cfg = replace(cfg, n_t=ch.n_t, k_eves=ch.k, fixed_channels=ch)
    else:
        from .channels import sample_channels
        ch = sample_channels(cfg.channel_config, 0)
    scheme = cfg.schemes[0]
    _, targets = cfg.grid()[0]
    unc = cfg.uncertainty if scheme.startswith("robust") else None
    out = solve_scheme(scheme, ch, targets, cfg.constellation, cfg.n_an,
                       uncertainty=unc, rng=np.random.default_rng(cfg.seed))
    print(outcome_to_json(out))
    return STATUS_EXIT_CODES[out.status]


_RUNNERS = {"power": run_power_sweep, "ser": run_ser, "robust": run_robust_probe}


def _run_sweep_command(kind: str, args) -> int:
    t0 = time.monotonic()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = args.threads if args.threads else (os.cpu_count() or 1)

    runs: list[tuple[str, ExperimentConfig]] = []
    if args.preset:
        preset = make_preset(args.preset, realizations=args.realizations,
                             slots=args.slots, seed=args.seed or 0)
        if preset.kind != kind:
            raise ConfigError(f"preset {args.preset} is a {preset.kind} "
                              f"experiment, not {kind}")
        runs = list(preset.runs)
        stem = preset.name
    else:
        cfg = load_config(args.config)
        from dataclasses import replace
        overrides = {}
        if args.realizations:
            overrides["realizations"] = args.realizations
        if args.slots:
            overrides["slots"] = args.slots
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = replace(cfg, **overrides)
        stem = Path(args.config).stem
        runs = [("", cfg)]

    outputs = []
    configs = {}
    for label, cfg in runs:
        result = _RUNNERS[kind](cfg, workers=workers)
        name = f"{stem}_{label}.csv" if label else f"{stem}.csv"
        result.to_csv(out_dir / name)
        outputs.append(name)
        configs[name] = _config_echo(cfg)
    _write_manifest(out_dir, kind, configs, outputs, time.monotonic() - t0)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secprec",
        description="Secure-precoding laboratory: power, SER, and robustness "
                    "experiments for AN-aided MISO downlinks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one scheme on one realization")
    p_solve.add_argument("--config", help="key=value config file")
    p_solve.add_argument("--channels", help="channel fixture CSV")

    for name, kind in (("sweep", "power"), ("ser", "ser"), ("robust", "robust")):
        p = sub.add_parser(name, help=f"run a {kind} experiment")
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--config", help="key=value config file")
        group.add_argument("--preset", choices=PRESET_NAMES)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--realizations", type=int, default=None)
        p.add_argument("--slots", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="worker processes (default: machine parallelism)")
        p.set_defaults(kind=kind)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "solve":
            return cmd_solve(args)
        return _run_sweep_command(args.kind, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
