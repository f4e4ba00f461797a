"""Command-line front end: ``gammaspaces {norm,kfunc,interp,verify}``.

Exit status: 0 success, 1 hard verification failure, 2 parameter or
configuration error, 3 evaluation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import jsonschema
import numpy as np

from . import harness
from . import interpolation as ip
from . import kfunctional as kf
from .errors import EvaluationError, ParameterError
from .grids import DEFAULT_CELLS, DEFAULT_DEGREE, DEFAULT_U_MAX, LogGrid, make_log_grid
from .rearrangement import (PowerLog, Rearrangement, SampledFunction, Step, Tabulated,
                            decreasing_rearrangement, indicator, zero)
from .spaces import norm, space_from_dict, space_to_dict

log = logging.getLogger("gammaspaces")

EXIT_OK, EXIT_FAILED, EXIT_PARAM, EXIT_EVAL = 0, 1, 2, 3
ENV_CELLS = "GAMMASPACES_GRID_CELLS"
ENV_U_MAX = "GAMMASPACES_GRID_U_MAX"
COMMANDS = ("norm", "kfunc", "interp", "verify")

_NUM = {"oneOf": [{"type": "number"}, {"enum": ["inf", "Infinity"]}]}
_NUM_LIST = {"type": "array", "items": {"type": "number"}}

FUNCTION_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {"properties": {"kind": {"const": "powerlog"}, "a": {"type": "number"},
                        "b": {"type": "number"}, "scale": {"type": "number"},
                        "support": {"type": "number"}},
         "required": ["a"], "additionalProperties": False},
        {"properties": {"kind": {"const": "step"}, "breaks": _NUM_LIST, "values": _NUM_LIST},
         "required": ["breaks", "values"], "additionalProperties": False},
        {"properties": {"kind": {"const": "indicator"}, "a": {"type": "number"}},
         "required": ["a"], "additionalProperties": False},
        {"properties": {"kind": {"const": "tabulated"}, "u": _NUM_LIST, "values": _NUM_LIST},
         "required": ["u", "values"], "additionalProperties": False},
        {"properties": {"kind": {"const": "samples"}, "values": _NUM_LIST},
         "required": ["values"], "additionalProperties": False},
        {"properties": {"kind": {"const": "csv"}, "path": {"type": "string"}},
         "required": ["path"], "additionalProperties": False},
        {"properties": {"kind": {"const": "zero"}}, "additionalProperties": False},
    ],
}

COUPLE_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"properties": {"tag": {"enum": list(kf.CLOSED_FORM_TAGS) + ["weak-small"]},
                        "p": {"type": "number"}, "alpha": {"type": "number"},
                        "beta": {"type": "number"}},
         "required": ["tag", "p"], "additionalProperties": False},
        {"properties": {"tag": {"type": "string"}, "x0": {"type": "object"},
                        "x1": {"type": "object"}},
         "required": ["x0", "x1"], "additionalProperties": False},
    ],
}

GRID_SCHEMA = {
    "type": "object",
    "properties": {"u_max": {"type": "number"}, "cells": {"type": "integer"},
                   "degree": {"type": "integer"}},
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {"scenario": {"type": "string"}, "params": {"type": "object"},
                   "family": {"type": "string"}, "grid": GRID_SCHEMA},
    "required": ["scenario"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "function": FUNCTION_SCHEMA,
        "space": {"oneOf": [{"type": "object"}, {"type": "array", "items": {"type": "object"}}]},
        "couple": COUPLE_SCHEMA,
        "t_grid": {"oneOf": [_NUM_LIST, {
            "type": "object", "properties": {"min": {"type": "number"}, "max": {"type": "number"},
                                             "n": {"type": "integer"}},
            "required": ["min", "max", "n"], "additionalProperties": False}]},
        "interp": {"type": "object",
                   "properties": {"theta": {"type": "number"}, "r": _NUM,
                                  "alpha": {"type": "number"},
                                  "domain": {"enum": ["unit", "halfline"]}},
                   "required": ["theta", "r"], "additionalProperties": False},
        "k_method": {"enum": ["search", "closed-form"]},
        "levels": {"type": "integer"},
        "scenarios": {"type": "array", "items": SCENARIO_SCHEMA},
        "grid": GRID_SCHEMA,
        "out": {"type": ["string", "null"]},
        "format": {"enum": ["csv", "json"]},
        "jobs": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    command: str = "norm"
    function: dict | None = None
    space: object = None
    couple: dict | None = None
    t_grid: object = None
    interp: dict | None = None
    k_method: str = "search"
    levels: int = 200
    scenarios: list | None = None
    grid: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    jobs: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
            raise ParameterError(f"invalid config at {where}: {exc.message}") from None
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {f.name: d[f.name] for f in fields(self)
                if d[f.name] is not None or f.name == "out"}


# --------------------------------------------------------------- functions
def read_samples_csv(path: str) -> SampledFunction:
    """One nonnegative real per line; blank lines and '#' comments are skipped."""
    vals = []
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.reader(fh), 1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                x = float(row[0])
            except ValueError:
                raise ParameterError(f"{path}:{n}: not a number: {row[0]!r}") from None
            if not (x >= 0 and math.isfinite(x)):
                raise ParameterError(f"{path}:{n}: values must be finite and nonnegative")
            vals.append(x)
    if not vals:
        raise ParameterError(f"{path}: no samples")
    return SampledFunction(tuple(vals))


def function_from_dict(d: dict) -> Rearrangement:
    try:
        jsonschema.validate(d, FUNCTION_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParameterError(f"invalid function descriptor: {exc.message}") from None
    kind = d["kind"]
    if kind == "powerlog":
        return PowerLog(d["a"], d.get("b", 0.0), d.get("scale", 1.0), d.get("support", 1.0))
    if kind == "step":
        return Step(tuple(d["breaks"]), tuple(d["values"]))
    if kind == "indicator":
        return indicator(d["a"])
    if kind == "tabulated":
        return Tabulated(tuple(d["u"]), tuple(d["values"]))
    if kind == "samples":
        if any(v < 0 for v in d["values"]):
            raise ParameterError("samples must be nonnegative")
        return decreasing_rearrangement(SampledFunction(tuple(d["values"])))
    if kind == "csv":
        return decreasing_rearrangement(read_samples_csv(d["path"]))
    return zero()


def couple_from_dict(d: dict) -> kf.CoupleSpec:
    if "x0" in d:
        return kf.CoupleSpec.from_dict(d)
    return kf.couple(d["tag"], d["p"], d.get("alpha"), d.get("beta"))


def resolve_grid(cfg_grid: dict | None, env=None) -> LogGrid:
    """Config values win over the environment, which wins over defaults."""
    env = os.environ if env is None else env
    cfg_grid = cfg_grid or {}

    def pick(key, var, default, conv):
        if key in cfg_grid:
            return cfg_grid[key]
        if env.get(var):
            try:
                return conv(env[var])
            except ValueError:
                raise ParameterError(f"{var} must be a number, got {env[var]!r}") from None
        return default

    return make_log_grid(pick("u_max", ENV_U_MAX, DEFAULT_U_MAX, float),
                         pick("cells", ENV_CELLS, DEFAULT_CELLS, int),
                         cfg_grid.get("degree", DEFAULT_DEGREE))


def resolve_t_grid(spec) -> np.ndarray:
    if spec is None:
        return np.asarray(harness.T_GRID)
    if isinstance(spec, dict):
        if not (0 < spec["min"] <= spec["max"]) or spec["n"] < 1:
            raise ParameterError("t_grid needs 0 < min <= max and n >= 1")
        return np.geomspace(spec["min"], spec["max"], spec["n"])
    t = np.asarray(spec, dtype=float)
    if t.size == 0 or not np.all(t > 0):
        raise ParameterError("t_grid values must be positive")
    return t


def _num(x) -> str:
    """12 significant digits, '.' decimal separator regardless of locale."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _table(columns, rows, fmt: str) -> str:
    if fmt == "json":
        recs = [{c: (v if isinstance(v, str) else _jnum(v)) for c, v in zip(columns, r)}
                for r in rows]
        return json.dumps(recs, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([v if isinstance(v, str) else _num(v) for v in r])
    return buf.getvalue()


def _jnum(x):
    x = float(x)
    return x if math.isfinite(x) else _num(x)


def _emit(text: str, cfg: RunConfig):
    if cfg.out:
        harness.atomic_write(cfg.out, text)
    else:
        sys.stdout.write(text)


def _need(cfg: RunConfig, *keys):
    for k in keys:
        if getattr(cfg, k) is None:
            raise ParameterError(f"command {cfg.command!r} needs '{k}' in the config")


# ---------------------------------------------------------------- commands
def cmd_norm(cfg: RunConfig) -> int:
    _need(cfg, "function", "space")
    f = function_from_dict(cfg.function)
    grid = resolve_grid(cfg.grid)
    specs = cfg.space if isinstance(cfg.space, list) else [cfg.space]
    rows = []
    for d in specs:
        sp = space_from_dict(d)
        rows.append((sp.family, json.dumps(space_to_dict(sp), sort_keys=True),
                     norm(sp, f, grid)))
    _emit(_table(("family", "space", "value"), rows, cfg.format), cfg)
    return EXIT_OK


def cmd_kfunc(cfg: RunConfig) -> int:
    _need(cfg, "function", "couple")
    f = function_from_dict(cfg.function)
    cpl = couple_from_dict(cfg.couple)
    grid = resolve_grid(cfg.grid)
    t = resolve_t_grid(cfg.t_grid)
    ks = np.atleast_1d(kf.k_search(f, cpl, t, cfg.levels, grid))
    if cpl.tag in kf.CLOSED_FORM_TAGS:
        kc = np.atleast_1d(kf.k_closed(f, cpl, t, grid))
    else:
        kc = np.full_like(ks, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = ks / kc
    rows = list(zip(t, ks, kc, ratio))
    _emit(_table(("t", "K_search", "K_closed", "ratio"), rows, cfg.format), cfg)
    return EXIT_OK


def cmd_interp(cfg: RunConfig) -> int:
    _need(cfg, "function", "couple", "interp")
    f = function_from_dict(cfg.function)
    cpl = couple_from_dict(cfg.couple)
    grid = resolve_grid(cfg.grid)
    spec = ip.InterpSpec(float(cfg.interp["theta"]), float(cfg.interp["r"]),
                         cfg.interp.get("alpha", 0.0), cfg.interp.get("domain", "unit"))
    val = ip.interp_norm(f, cpl, spec, cfg.k_method, grid, cfg.levels)
    rows = [(cpl.tag, spec.theta, spec.r, spec.domain, cfg.k_method, val)]
    _emit(_table(("couple", "theta", "r", "domain", "k_method", "value"), rows, cfg.format), cfg)
    return EXIT_OK


def _run_one(job):
    entry, grid_cfg = job
    grid = resolve_grid({**grid_cfg, **entry.get("grid", {})})
    params = entry.get("params")
    if "family" in entry:
        params = dict(params if params is not None
                      else harness.REGISTRY[entry["scenario"]].defaults[0])
        params["family"] = entry["family"]
    return harness.run_scenario(entry["scenario"], params, None, grid)


def scenario_jobs(cfg: RunConfig) -> list:
    given = cfg.scenarios if cfg.scenarios is not None else [
        {"scenario": sid} for sid in sorted(harness.REGISTRY)]
    entries = []
    for e in given:
        if e["scenario"] not in harness.REGISTRY:
            raise ParameterError(f"unknown scenario {e['scenario']!r}")
        if "params" in e:
            entries.append(e)
        else:
            # no params: every default parameter set of the scenario
            entries += [dict(e, params=dict(p)) for p in harness.REGISTRY[e["scenario"]].defaults]
    return [(e, cfg.grid or {}) for e in entries]


def cmd_verify(cfg: RunConfig) -> int:
    jobs = scenario_jobs(cfg)
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_run_one, jobs))
    else:
        reports = [_run_one(j) for j in jobs]
    _emit(harness.render_report(reports, cfg.format), cfg)
    bad = [r for r in reports if r.failures]
    for r in bad:
        for msg in r.failures:
            log.error("%s %s: %s", r.scenario, json.dumps(r.params, sort_keys=True), msg)
    return EXIT_FAILED if bad else EXIT_OK


HANDLERS = {"norm": cmd_norm, "kfunc": cmd_kfunc, "interp": cmd_interp, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gammaspaces",
                                 description="Norms, K-functionals and interpolation norms of "
                                             "rearrangement-invariant spaces on (0, 1).")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output file (written atomically); default stdout")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--jobs", type=int, help="worker processes for verify")
    ap.add_argument("--dump-config", action="store_true",
                    help="print the resolved configuration and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def load_config(args) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"{args.config}: malformed JSON ({exc.msg})") from None
        except OSError as exc:
            raise ParameterError(f"cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise ParameterError("config must be a JSON object")
    raw = dict(raw)
    if raw.get("command", args.command) != args.command:
        raise ParameterError(f"config is for {raw['command']!r}, not {args.command!r}")
    raw["command"] = args.command
    for key in ("out", "format", "jobs"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return RunConfig.from_dict(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        if args.dump_config:
            sys.stdout.write(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
            return EXIT_OK
        return HANDLERS[cfg.command](cfg)
    except ParameterError as exc:
        log.error("parameter error: %s", exc)
        return EXIT_PARAM
    except EvaluationError as exc:
        log.error("evaluation error: %s", exc)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
