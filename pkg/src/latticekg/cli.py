"""Command-line front end: config parsing, study dispatch, result files.

Configs are TOML documents with one ``[study.<name>]`` table per study and
an optional ``[run]`` table.  Every run writes the study CSVs plus a
``manifest.json`` with the normalized config echo, timestamps, accuracy
certificates, and a checksum for each output file.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .dispersion import ResolutionError
from .evolution import InstabilityError
from .experiments import (
    ConfigError,
    InitialData,
    ReferenceValidationError,
    StudyConfig,
    conjecture_study,
    convergence_study,
    decay_study,
    default_config,
    growth_study,
    linear_flow_error_study,
    simulate_study,
    validate_config,
)
from .transfer import QuadratureError

__all__ = ["parse_config", "run", "main"]

SUBCOMMANDS = {
    "simulate": "simulate",
    "converge": "convergence",
    "linear": "linear",
    "growth": "growth",
    "decay": "decay",
    "conjecture": "conjecture",
}

CSV_NAMES = {
    "simulate": "energy.csv",
    "convergence": "convergence.csv",
    "linear": "linear.csv",
    "growth": "growth.csv",
    "decay": "decay.csv",
    "conjecture": "conjecture.csv",
}

_NUMERICAL_ERRORS = (
    InstabilityError,
    QuadratureError,
    ResolutionError,
    ReferenceValidationError,
)

_SCALAR_KEYS = {
    "kind": str, "d": int, "p": float, "s": float, "T": float, "dt": float,
    "reference_refinement": int, "k": int, "envelope_gamma": float,
    "obs_interval": float, "include_d3": bool, "v_box": float,
    "v_grid_n": int, "method": str,
}
_TUPLE_KEYS = {"h_list", "t_grid", "models", "tau_grid"}
_KEY_ALIASES = {"h_chain": "h_list", "r": "reference_refinement", "gamma": "envelope_gamma"}


def _initial_from_table(tbl: dict) -> InitialData:
    allowed = {"amplitude", "width", "center", "modulation"}
    unknown = set(tbl) - allowed
    if unknown:
        raise ConfigError(f"unknown initial-data keys: {sorted(unknown)}")
    kwargs = dict(tbl)
    for key in ("center", "modulation"):
        if key in kwargs:
            kwargs[key] = tuple(float(x) for x in kwargs[key])
    return InitialData(**kwargs)


def _study_from_table(name: str, tbl: dict) -> StudyConfig:
    tbl = dict(tbl)
    kind = tbl.pop("kind", name)
    kwargs = {"kind": kind, "name": name}
    if "initial" in tbl:
        kwargs["initial"] = _initial_from_table(tbl.pop("initial"))
    if "phi1" in tbl:
        kwargs["phi1"] = _initial_from_table(tbl.pop("phi1"))
    for key, value in tbl.items():
        key = _KEY_ALIASES.get(key, key)
        if key in _TUPLE_KEYS:
            kwargs[key] = tuple(
                float(x) if not isinstance(x, str) else x for x in value
            )
        elif key in _SCALAR_KEYS:
            kwargs[key] = _SCALAR_KEYS[key](value)
        else:
            raise ConfigError(f"unknown config key {key!r} in [study.{name}]")
    try:
        cfg = StudyConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return validate_config(cfg)


def parse_config(path) -> list:
    """Parse and validate a TOML config; returns one StudyConfig per section.

    Defaults are filled per study kind before validation, so a minimal
    section like ``[study.convergence]`` is complete on its own.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    studies = doc.get("study", {})
    if not isinstance(studies, dict) or not studies:
        raise ConfigError(f"{path} defines no [study.<name>] section")
    configs = []
    for name, tbl in studies.items():
        if not isinstance(tbl, dict):
            raise ConfigError(f"[study.{name}] is not a table")
        base = default_config(tbl.get("kind", name))
        cfg = _study_from_table(name, {**_table_defaults(base), **tbl})
        configs.append(cfg)
    return configs


def _table_defaults(cfg: StudyConfig) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        if f.name in ("name", "initial", "phi1"):
            continue
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name in _TUPLE_KEYS:
            out[f.name] = list(value)
        else:
            out[f.name] = value
    return out


def _normalized(cfg: StudyConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in echo.items()}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def _execute(cfg: StudyConfig, threads: int, d3: bool):
    """Run one study; returns (table, certificates dict)."""
    if cfg.kind == "simulate":
        return simulate_study(cfg).table, {}
    if cfg.kind == "convergence":
        res = convergence_study(cfg, threads=threads)
        return res.table, {
            "reference_check": res.reference_check,
            "reference_budget": res.reference_budget,
            "fitted_orders": {repr(t): o for t, o in res.orders.items()},
        }
    if cfg.kind == "linear":
        res = linear_flow_error_study(cfg)
        return res.table, {
            "fitted_orders": {repr(t): list(o) for t, o in res.orders.items()}
        }
    if cfg.kind == "growth":
        res = growth_study(cfg)
        return res.table, {
            "stabilization_slope": res.stabilization_slope,
            "stabilization_slope_k": res.stabilization_slope_k,
        }
    if cfg.kind == "decay":
        if d3 and not cfg.include_d3:
            cfg = dataclasses.replace(cfg, include_d3=True)
        return decay_study(cfg, threads=threads).table, {}
    if cfg.kind == "conjecture":
        res = conjecture_study(cfg, threads=threads)
        return res.table, {
            "worst_quadrature_certificate": max(
                (r.worst_certificate for r in res.rows), default=0.0
            )
        }
    raise ConfigError(f"unknown study kind {cfg.kind!r}")


def run(subcommand: str, config: str | None, out_dir: str, threads: int = 1,
        d3: bool = False) -> int:
    """Execute the studies matching ``subcommand``; write tables + manifest."""
    if subcommand not in SUBCOMMANDS:
        print(f"error: unknown subcommand {subcommand!r}; "
              f"expected one of {sorted(SUBCOMMANDS)}", file=sys.stderr)
        return 2
    kind = SUBCOMMANDS[subcommand]
    started = datetime.now(timezone.utc).isoformat()
    try:
        if config is not None:
            configs = [c for c in parse_config(config) if c.kind == kind]
            if not configs:
                raise ConfigError(
                    f"config defines no study of kind {kind!r} for "
                    f"subcommand {subcommand!r}"
                )
        else:
            configs = [validate_config(default_config(kind))]
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "version": __version__,
        "started_utc": started,
        "subcommand": subcommand,
        "config": {cfg.name or cfg.kind: _normalized(cfg) for cfg in configs},
        "studies": {},
        "files": {},
    }
    status = 0
    for cfg in configs:
        label = cfg.name or cfg.kind
        csv_name = CSV_NAMES[cfg.kind]
        if len(configs) > 1:
            csv_name = f"{Path(csv_name).stem}-{label}.csv"
        try:
            table, certificates = _execute(cfg, threads, d3)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            manifest["studies"][label] = {"status": "config-error", "error": str(exc)}
            status = 2
            break
        except _NUMERICAL_ERRORS as exc:
            print(f"numerical abort: {exc}", file=sys.stderr)
            manifest["studies"][label] = {"status": "aborted", "error": str(exc)}
            status = 3
            break
        csv_path = out / csv_name
        table.write_csv(csv_path)
        manifest["studies"][label] = {
            "status": "ok",
            "files": [csv_name],
            "certificates": certificates,
        }
        manifest["files"][csv_name] = _sha256(csv_path)
        print(f"{label}: wrote {csv_path}")
    manifest["finished_utc"] = datetime.now(timezone.utc).isoformat()
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"manifest: {manifest_path}")
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="latticekg",
        description="Spectral simulation laboratory for the lattice "
        "nonlinear Klein-Gordon equation",
    )
    parser.add_argument("subcommand", choices=sorted(SUBCOMMANDS),
                        help="study to run")
    parser.add_argument("--config", default=None, help="TOML config path")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="max parallel study cells")
    parser.add_argument("--d3", action="store_true",
                        help="include the d=3 rows in the decay study")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.threads, args.d3)


if __name__ == "__main__":
    sys.exit(main())
