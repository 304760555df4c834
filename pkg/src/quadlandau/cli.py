"""Command-line interface: spectrum, verify, fields-check, scan.

Configuration is an INI file with one section per module; every key is
optional and any command-line flag overrides the file. Exit codes: 0 for
success (all rows pass), 1 for runtime or verification failure, 2 for a
configuration error (reported as a JSON record on stderr).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .core import (
    ConfigError,
    PhysicalParams,
    QuantumNumbers,
    Scenario,
    ScenarioKind,
    parse_kind,
    validate,
)
from .fields import check_identities, observed_order, sample_grid
from .numsolve import (
    DEFAULT_POINTS,
    RadialGrid,
    build_hamiltonian,
    default_rho_max,
    overlap,
    solve_lowest,
)
from .specfun import truncation_residual
from .spectra import (
    NoRootsWarning,
    TRUNCATION_TOL,
    allowed_frequency,
    analytic_wavefunction,
    closed_form_frequency,
    hardwall_energy_approx,
    hardwall_energy_exact,
    landau_energy,
    potential_energy_level,
    variant_for,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
REL_EPS = 1e-300

COLUMNS = {
    "spectrum": ["scenario", "n", "l", "root_index", "frequency", "energy", "method", "note"],
    "verify": [
        "scenario", "n", "l", "root_index", "frequency", "energy_analytic", "energy_numeric",
        "abs_diff", "rel_diff", "method", "overlap_with_numeric", "numeric_index",
        "truncation_residual", "approx_rel_error", "approx_trend_ok", "passed", "note",
    ],
    "fields-check": ["quantity", "h", "max_residual", "observed_order", "threshold", "passed"],
    "scan": [
        "scenario", "n", "l", "root_index", "frequency", "residual", "closed_form",
        "closed_form_rel_dev", "warning",
    ],
}

DEFAULT_TOL = {"spectrum": 1e-12, "verify": 1e-3, "fields-check": 1e-8, "scan": 1e-10}


@dataclass
class RunConfig:
    command: str
    scenario: str = "landau"
    m: float = 1.0
    M: float = 1.0
    b: float = 1.0
    alpha: Optional[float] = None
    eta: Optional[float] = None
    rho0: Optional[float] = None
    n_min: Optional[int] = None
    n_max: Optional[int] = None
    l_min: int = -2
    l_max: int = 2
    varpi: Optional[float] = None
    points: int = DEFAULT_POINTS
    rho_max: Optional[float] = None
    tol: Optional[float] = None
    overlap_min: float = 0.999
    out: Optional[str] = None
    format: str = "csv"
    extent: float = 2.0
    count: int = 10
    z_values: list = field(default_factory=lambda: [-1.0, 0.0, 1.0])
    h_values: list = field(default_factory=lambda: [1e-3, 5e-4])
    t: float = 1.0

    @property
    def kind(self) -> ScenarioKind:
        return parse_kind(self.scenario)

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(self.m, self.M, self.b, self.alpha, self.eta)

    @property
    def scenario_obj(self) -> Scenario:
        return Scenario(self.kind, self.rho0)

    def n_values(self):
        return range(self.n_min, self.n_max + 1)

    def l_values(self):
        return range(self.l_min, self.l_max + 1)


# keys accepted per config section, with their parsers
_SECTIONS = {
    "core": {"scenario": str, "m": float, "M": float, "b": float, "alpha": float,
             "eta": float, "rho0": float},
    "spectra": {"n_min": int, "n_max": int, "l_min": int, "l_max": int, "varpi": float},
    "numsolve": {"points": int, "rho_max": float},
    "fields": {"extent": float, "count": int, "z_values": "floats", "h_values": "floats",
               "t": float},
    "cli": {"out": str, "format": str, "tol": float, "overlap_min": float},
}


def _parse_value(kind, raw: str, key: str):
    try:
        if kind == "floats":
            return [float(v) for v in raw.replace(",", " ").split()]
        if kind is int:
            return int(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep m and M distinct
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[key] = _parse_value(allowed[key], raw, key)
    return values


def resolve_config(command: str, file_values: dict, overrides: dict) -> RunConfig:
    values = dict(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(command=command, **values)
    kind = cfg.kind
    cfg.scenario = kind.value

    if cfg.n_min is None:
        cfg.n_min = 1 if kind.is_potential else 0
    if cfg.n_max is None:
        cfg.n_max = cfg.n_min if kind.is_potential else cfg.n_min + 3
    if cfg.tol is None:
        cfg.tol = DEFAULT_TOL[command]
    if cfg.n_max < cfg.n_min:
        raise ConfigError("empty n range")
    if cfg.l_max < cfg.l_min:
        raise ConfigError("empty l range")
    if not (cfg.tol > 0 and math.isfinite(cfg.tol)):
        raise ConfigError("tol must be > 0")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if not 0 < cfg.overlap_min <= 1:
        raise ConfigError("overlap_min must be in (0, 1]")
    if command == "scan" and not kind.is_potential:
        raise ConfigError("scan needs an inverse_radial or linear scenario")
    if command == "fields-check":
        if not cfg.h_values or any(not h > 0 for h in cfg.h_values):
            raise ConfigError("h_values must be positive")
        if cfg.count < 2:
            raise ConfigError("count must be >= 2")
        return cfg

    report = validate(cfg.params, QuantumNumbers(cfg.n_min, cfg.l_min), cfg.scenario_obj)
    report.raise_if_invalid()
    if cfg.points < 16:
        raise ConfigError("points must be >= 16")
    return cfg


# ---------------------------------------------------------------- output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(command: str, cfg: RunConfig, rows: list) -> str:
    columns = COLUMNS[command]
    if cfg.format == "json":
        meta = {"command": command, "version": __version__, "config": asdict(cfg)}
        doc = {
            "meta": meta,
            "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), REL_EPS)


def _frequencies(cfg: RunConfig, n: int, l: int):
    """(frequencies, note) for a potential scenario row group."""
    if cfg.varpi is not None:
        return [cfg.varpi], "varpi override"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoRootsWarning)
        roots = allowed_frequency(variant_for(cfg.kind), n, l, cfg.params)
    return roots, ("" if roots else "no allowed frequency in scan window")


# ------------------------------------------------------------- commands


def cmd_spectrum(cfg: RunConfig) -> tuple[list, bool]:
    rows = []
    params = cfg.params
    kind = cfg.kind
    for n in cfg.n_values():
        for l in cfg.l_values():
            qn = QuantumNumbers(n, l)
            base = {"scenario": kind.value, "n": n, "l": l, "root_index": 0, "note": ""}
            if kind is ScenarioKind.LANDAU:
                lv = landau_energy(params, qn)
                rows.append({**base, "frequency": lv.frequency, "energy": lv.energy, "method": lv.method.value})
            elif kind is ScenarioKind.HARDWALL:
                for lv in (
                    hardwall_energy_exact(params, cfg.rho0, qn, cfg.tol),
                    hardwall_energy_approx(params, cfg.rho0, qn),
                ):
                    rows.append({**base, "frequency": lv.frequency, "energy": lv.energy, "method": lv.method.value})
            else:
                variant = variant_for(kind)
                roots, note = _frequencies(cfg, n, l)
                if not roots:
                    rows.append({**base, "root_index": None, "method": "none", "note": note})
                for i, w in enumerate(roots):
                    lv = potential_energy_level(variant, n, l, w, params)
                    rows.append({**base, "root_index": i, "frequency": w, "energy": lv.energy,
                                 "method": lv.method.value, "note": note})
    return rows, True


def _numeric_match(cfg, scenario, params, qn, grid, analytic, energy):
    H = build_hamiltonian(scenario, params, qn.l, grid)
    count = min(grid.n_points // 4, max(8, qn.n_radial + 2 * abs(qn.l) + 8))
    res = solve_lowest(H, count)
    idx = int(np.argmin(np.abs(res.energies - energy)))
    ov = abs(overlap(analytic, res.solution(idx)))
    return float(res.energies[idx]), idx, ov


def cmd_verify(cfg: RunConfig) -> tuple[list, bool]:
    rows = []
    params = cfg.params
    kind = cfg.kind
    scenario = cfg.scenario_obj
    all_pass = True
    prev_approx: dict[int, float] = {}
    for n in cfg.n_values():
        for l in cfg.l_values():
            qn = QuantumNumbers(n, l)
            base = {"scenario": kind.value, "n": n, "l": l, "root_index": 0, "note": ""}
            if kind.is_potential:
                roots, note = _frequencies(cfg, n, l)
                if not roots:
                    rows.append({**base, "root_index": None, "passed": False, "note": note})
                    all_pass = False
                    continue
                targets = [(i, w, params.tuned(w)) for i, w in enumerate(roots)]
            else:
                targets = [(0, None, params)]
            for i, w, p in targets:
                row = dict(base, root_index=i)
                try:
                    if kind is ScenarioKind.HARDWALL:
                        grid = RadialGrid(cfg.rho0, cfg.points)
                    else:
                        grid = RadialGrid(cfg.rho_max or default_rho_max(p), cfg.points)
                    if kind is ScenarioKind.LANDAU:
                        lv = landau_energy(params, qn)
                    elif kind is ScenarioKind.HARDWALL:
                        lv = hardwall_energy_exact(params, cfg.rho0, qn)
                        approx = hardwall_energy_approx(params, cfg.rho0, qn).energy
                        err = _rel(lv.energy, approx)
                        row["approx_rel_error"] = err
                        row["approx_trend_ok"] = l not in prev_approx or err < prev_approx[l]
                        prev_approx[l] = err
                    else:
                        lv = potential_energy_level(variant_for(kind), n, l, w, params)
                        row["truncation_residual"] = truncation_residual(variant_for(kind), n, l, w, params)
                    analytic = analytic_wavefunction(scenario, params, qn, w, grid, strict=False)
                    e_num, idx, ov = _numeric_match(cfg, scenario, p, qn, grid, analytic, lv.energy)
                    row.update(
                        frequency=lv.frequency,
                        energy_analytic=lv.energy,
                        energy_numeric=e_num,
                        abs_diff=abs(lv.energy - e_num),
                        rel_diff=_rel(lv.energy, e_num),
                        method=lv.method.value,
                        overlap_with_numeric=ov,
                        numeric_index=idx,
                    )
                    ok = row["rel_diff"] < cfg.tol and ov >= cfg.overlap_min
                    if kind.is_potential and abs(row["truncation_residual"]) > TRUNCATION_TOL:
                        ok = False
                        row["note"] = "not an allowed frequency"
                    row["passed"] = ok
                except Exception as exc:  # recorded per row
                    row["passed"] = False
                    row["note"] = f"{type(exc).__name__}: {exc}"
                all_pass = all_pass and row["passed"]
                rows.append(row)
    return rows, all_pass


def cmd_fields_check(cfg: RunConfig) -> tuple[list, bool]:
    points = sample_grid(cfg.extent, cfg.count, tuple(cfg.z_values), cfg.t)
    checks = [check_identities(points, cfg.M, cfg.b, h, cfg.t) for h in cfg.h_values]
    rows = []
    ok = True
    quantities = [
        ("faraday", lambda c: c.faraday_max),
        ("moment_dot", lambda c: c.moment_dot_max),
        ("effective_spread", lambda c: c.effective_spread),
    ]
    for name, get in quantities:
        for i, c in enumerate(checks):
            value = get(c)
            order = observed_order(get(checks[i - 1]), value, checks[i - 1].h / c.h) if i else None
            passed = value < cfg.tol
            ok = ok and passed
            rows.append({"quantity": name, "h": c.h, "max_residual": value,
                         "observed_order": order, "threshold": cfg.tol, "passed": passed})
    for c in checks:
        rows.append({"quantity": "effective_bz_mean", "h": c.h, "max_residual": float(c.effective_mean[2]),
                     "observed_order": None, "threshold": None, "passed": None})
    return rows, ok


def cmd_scan(cfg: RunConfig) -> tuple[list, bool]:
    rows = []
    params = cfg.params
    variant = variant_for(cfg.kind)
    for n in cfg.n_values():
        for l in cfg.l_values():
            base = {"scenario": cfg.kind.value, "n": n, "l": l}
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NoRootsWarning)
                roots = allowed_frequency(variant, n, l, params)
            closed = closed_form_frequency(variant, l, params) if n == 1 else None
            if not roots:
                rows.append({**base, "root_index": None, "closed_form": closed, "warning": "no_roots"})
            for i, w in enumerate(roots):
                res = truncation_residual(variant, n, l, w, params)
                rows.append({
                    **base,
                    "root_index": i,
                    "frequency": w,
                    "residual": res,
                    "closed_form": closed,
                    "closed_form_rel_dev": _rel(closed, w) if closed is not None else None,
                    "warning": "residual_above_tol" if abs(res) > cfg.tol else "",
                })
    return rows, True


COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "fields-check": cmd_fields_check,
    "scan": cmd_scan,
}


# --------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _config_error(message)


def _config_error(message: str):
    sys.stderr.write(json.dumps({"error": "config", "message": message}) + "\n")
    raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--scenario", help="landau | hardwall | inverse-radial | linear")
    common.add_argument("--m", type=float, dest="m")
    common.add_argument("--M", type=float, dest="M")
    common.add_argument("--b", type=float, dest="b")
    common.add_argument("--alpha", type=float)
    common.add_argument("--eta", type=float)
    common.add_argument("--rho0", type=float)
    common.add_argument("--n-min", type=int, dest="n_min")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--l-min", type=int, dest="l_min")
    common.add_argument("--l-max", type=int, dest="l_max")
    common.add_argument("--varpi", type=float, help="fix the frequency instead of solving for it")
    common.add_argument("--points", type=int, help="finite-difference grid points")
    common.add_argument("--rho-max", type=float, dest="rho_max")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", type=float)

    parser = _Parser(prog="quadlandau", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_OVERRIDE_KEYS = ("scenario", "m", "M", "b", "alpha", "eta", "rho0", "n_min", "n_max", "l_min",
                  "l_max", "varpi", "points", "rho_max", "out", "format", "tol")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
        cfg = resolve_config(args.command, file_values, overrides)
    except (ConfigError, TypeError) as exc:
        _config_error(str(exc))
    try:
        rows, ok = COMMANDS[args.command](cfg)
        emit(render(args.command, cfg, rows), cfg.out)
    except ConfigError as exc:
        _config_error(str(exc))
    except Exception as exc:
        sys.stderr.write(json.dumps({"error": "runtime", "message": f"{type(exc).__name__}: {exc}"}) + "\n")
        return EXIT_FAIL
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
