"""Command-line entry point, config parsing and artifact serialization.

Configs are strict JSON documents; unknown keys are rejected so that typos
fail loudly.  All numeric output is written with 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import InitialDataSpec, Problem
from .pde_solver import RunReport, evolve, make_grid
from .scenarios import (
    ScenarioResult,
    run_blowup_scenario,
    run_comparison_scenario,
    run_fsp_scenario,
    run_no_localization_scenario,
    run_threshold_scenario,
)
from .selfsimilar import (
    SelfSimilarProfile,
    find_compact_subsolution_profile,
    profile_residual,
)
from .stationary_phase import (
    PhaseOrbit,
    StationaryProfile,
    check_orbit_asymptotics,
    phase_orbit_from_P0,
    unit_stationary_profile,
)

DEFAULT_GRID = (10.0, 2000)
DEFAULT_TOLERANCES = {
    "u_cap": 1e6,
    "eps_supp": 1e-10,
    "f_floor": 1e-12,
    "residual_tol": 1e-4,
}
SCENARIOS = ("threshold", "blowup", "fsp", "no_localization", "comparison")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    problem: Problem
    grid: tuple[float, int]
    initial_data: InitialDataSpec
    scenario: str | None
    tolerances: dict
    output_dir: str
    cadence: float
    t_end: float
    scenario_args: dict
    sweep: dict
    # which keys the user actually wrote, so downstream consumers can tell
    # explicit choices from filled defaults
    explicit: frozenset = field(default=frozenset(), compare=False)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def dumps_17(obj, indent: int = 0) -> str:
    """JSON text with every number at 17 significant digits."""
    pad = " " * indent
    pad_in = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _fmt(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad_in}{json.dumps(str(k))}: {dumps_17(v, indent + 2)}"
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = ", ".join(dumps_17(v, indent + 2) for v in seq)
        return "[" + items + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _check_keys(d: dict, allowed, where: str):
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def parse_config(text: str) -> Config:
    """Strict JSON config with defaults filled; raises ConfigError with the
    offending field or line."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config syntax error at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(
        raw,
        ("problem", "grid", "initial_data", "scenario", "tolerances",
         "output_dir", "cadence", "t_end", "scenario_args", "sweep"),
        "config",
    )
    if "problem" not in raw:
        raise ConfigError("missing required key: problem")
    pr = raw["problem"]
    _check_keys(pr, ("m", "p", "sigma", "N"), "problem")
    for k in ("m", "p", "sigma", "N"):
        if k not in pr:
            raise ConfigError(f"problem is missing field {k!r}")
    try:
        problem = Problem(m=float(pr["m"]), p=float(pr["p"]),
                          sigma=float(pr["sigma"]), dim=int(pr["N"]))
    except ValueError as e:
        raise ConfigError(str(e)) from e

    gr = raw.get("grid", {})
    _check_keys(gr, ("r_max", "cells"), "grid")
    grid = (float(gr.get("r_max", DEFAULT_GRID[0])), int(gr.get("cells", DEFAULT_GRID[1])))
    if grid[0] <= 0 or grid[1] < 16:
        raise ConfigError("grid requires r_max > 0 and cells >= 16")

    idd = raw.get("initial_data", {"kind": "compact_bump"})
    _check_keys(idd, ("kind", "amplitude", "radius", "tail_coeff", "table"), "initial_data")
    try:
        spec = InitialDataSpec(
            kind=idd.get("kind", "compact_bump"),
            amplitude=float(idd.get("amplitude", 1.0)),
            radius=float(idd.get("radius", 1.0)),
            tail_coeff=float(idd.get("tail_coeff", 1.0)),
            table=tuple(map(tuple, idd.get("table", ()))),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e

    scenario = raw.get("scenario")
    if scenario is not None and scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")

    tol = dict(DEFAULT_TOLERANCES)
    user_tol = raw.get("tolerances", {})
    _check_keys(user_tol, DEFAULT_TOLERANCES, "tolerances")
    for k, v in user_tol.items():
        if not float(v) > 0:
            raise ConfigError(f"tolerance {k} must be positive, got {v}")
        tol[k] = float(v)

    cadence = float(raw.get("cadence", 0.01))
    t_end = float(raw.get("t_end", 10.0))
    if cadence <= 0 or t_end <= 0:
        raise ConfigError("cadence and t_end must be positive")

    return Config(
        problem=problem,
        grid=grid,
        initial_data=spec,
        scenario=scenario,
        tolerances=tol,
        output_dir=str(raw.get("output_dir", "out")),
        cadence=cadence,
        t_end=t_end,
        scenario_args=dict(raw.get("scenario_args", {})),
        sweep=dict(raw.get("sweep", {})),
        explicit=frozenset(raw),
    )


def config_to_dict(cfg: Config) -> dict:
    p = cfg.problem
    d = {
        "problem": {"m": p.m, "p": p.p, "sigma": p.sigma, "N": p.dim},
        "grid": {"r_max": cfg.grid[0], "cells": cfg.grid[1]},
        "initial_data": {
            "kind": cfg.initial_data.kind,
            "amplitude": cfg.initial_data.amplitude,
            "radius": cfg.initial_data.radius,
            "tail_coeff": cfg.initial_data.tail_coeff,
        },
        "scenario": cfg.scenario,
        "tolerances": dict(cfg.tolerances),
        "output_dir": cfg.output_dir,
        "cadence": cfg.cadence,
        "t_end": cfg.t_end,
        "scenario_args": cfg.scenario_args,
        "sweep": cfg.sweep,
    }
    if cfg.initial_data.table:
        d["initial_data"]["table"] = [list(row) for row in cfg.initial_data.table]
    return d


def echo_config(cfg: Config, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "config_echo.json"
    path.write_text(dumps_17(config_to_dict(cfg)) + "\n")
    return path


def _write_csv(path: Path, header: list[str], columns: list) -> Path:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _problem_dict(prob: Problem) -> dict:
    return {"m": prob.m, "p": prob.p, "sigma": prob.sigma, "N": prob.dim}


def write_run_report(report: RunReport, out_dir, stem: str = "run") -> dict:
    """CSV `t,sup_norm,mass,zeta` plus a JSON sidecar with termination and
    blow-up fit data."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _write_csv(
        out_dir / f"{stem}.csv",
        ["t", "sup_norm", "mass", "zeta"],
        [report.times, report.sup_norm, report.mass, report.zeta],
    )
    sidecar = {
        "termination": report.termination,
        "blowup_time_estimate": report.blowup_time_estimate,
        "blowup_time_ci": list(report.blowup_time_ci) if report.blowup_time_ci else None,
        "problem": _problem_dict(report.problem),
        "grid": {"r_max": report.grid.r_max, "cells": report.grid.cells},
    }
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(dumps_17(sidecar) + "\n")
    return {"csv": str(csv_path), "json": str(json_path)}


def write_profile(profile: SelfSimilarProfile, out_dir, stem: str = "profile") -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _write_csv(out_dir / f"{stem}.csv", ["xi", "f"], [profile.xi_grid, profile.f])
    sidecar = {
        "role": profile.role,
        "xi1": profile.xi1,
        "xi2": profile.xi2,
        "a": profile.a,
        "D": profile.D,
        "problem": _problem_dict(profile.prob),
    }
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(dumps_17(sidecar) + "\n")
    return {"csv": str(csv_path), "json": str(json_path)}


def write_stationary(profile: StationaryProfile, out_dir, stem: str = "stationary") -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _write_csv(out_dir / f"{stem}.csv", ["r", "W"], [profile.r_grid, profile.W])
    sidecar = {
        "D": profile.D,
        "R0": profile.R0,
        "problem": _problem_dict(profile.prob),
    }
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(dumps_17(sidecar) + "\n")
    return {"csv": str(csv_path), "json": str(json_path)}


def write_orbit(orbit: PhaseOrbit, out_dir, stem: str = "orbit", fit=None) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _write_csv(
        out_dir / f"{stem}.csv", ["eta", "Y", "Z"], [orbit.eta_grid, orbit.Y, orbit.Z]
    )
    sidecar = {"problem": _problem_dict(orbit.prob)}
    if fit is not None:
        sidecar["fit"] = {
            "slope": fit.slope,
            "expected_slope": fit.expected_slope,
            "K": fit.K,
            "theta": fit.theta,
        }
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(dumps_17(sidecar) + "\n")
    return {"csv": str(csv_path), "json": str(json_path)}


def write_scenario_result(result: ScenarioResult, out_dir) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    for label, rep in result.reports.items():
        safe = label.replace("=", "_").replace(".", "_")
        artifacts[label] = write_run_report(rep, out_dir, stem=f"run_{safe}")
    for label, prof in result.profiles.items():
        artifacts[label] = write_profile(prof, out_dir, stem=f"profile_{label}")
    doc = {
        "name": result.name,
        "problem": _problem_dict(result.prob),
        "inputs": result.inputs,
        "verdict": result.verdict,
        "metrics": {k: _jsonable(v) for k, v in result.metrics.items()},
        "criteria": {k: bool(v) for k, v in result.criteria.items()},
        "artifacts": artifacts,
    }
    path = out_dir / "result.json"
    path.write_text(dumps_17(doc) + "\n")
    return {"result": str(path), **artifacts}


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def _apply_overrides(text: str, overrides: list[str]) -> str:
    """Apply dotted key=value pairs on top of the raw JSON document."""
    raw = json.loads(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {key!r} crosses a non-object")
        node[parts[-1]] = parsed
    return json.dumps(raw)


def _load_config(args) -> Config:
    text = Path(args.config).read_text()
    if args.override:
        text = _apply_overrides(text, args.override)
    cfg = parse_config(text)
    if args.out:
        cfg = Config(**{**cfg.__dict__, "output_dir": args.out})
    return cfg


def _run_scenario(cfg: Config) -> ScenarioResult:
    prob = cfg.problem
    kw = dict(cfg.scenario_args)
    if "grid" in cfg.explicit:
        kw.setdefault("grid", make_grid(*cfg.grid))
    if "tolerances" in cfg.explicit and "u_cap" not in kw:
        kw["u_cap"] = cfg.tolerances["u_cap"]
    if cfg.scenario == "threshold":
        c_values = kw.pop("c_values", [0.5, 1.0, 2.0])
        return run_threshold_scenario(prob, c_values, **kw)
    if cfg.scenario == "blowup":
        return run_blowup_scenario(prob, cfg.initial_data, **kw)
    if cfg.scenario == "fsp":
        return run_fsp_scenario(prob, cfg.initial_data, **kw)
    if cfg.scenario == "no_localization":
        return run_no_localization_scenario(prob, cfg.initial_data, **kw)
    if cfg.scenario == "comparison":
        high = kw.pop("spec_high", None)
        if high is None:
            hi_spec = InitialDataSpec(
                kind="compact_bump",
                amplitude=2 * cfg.initial_data.amplitude,
                radius=1.5 * cfg.initial_data.radius,
            )
        else:
            hi_spec = InitialDataSpec(**high)
        return run_comparison_scenario(prob, cfg.initial_data, hi_spec, **kw)
    raise ConfigError(f"config has no scenario set")


_EXIT_BY_VERDICT = {"PASS": 0, "FAIL": 1, "ANOMALY": 3}


def _cmd_run(cfg: Config) -> int:
    grid = make_grid(*cfg.grid)
    from .core import similarity_exponents
    fit_alpha = similarity_exponents(cfg.problem).alpha if cfg.problem.p >= 1 else None
    report = evolve(
        cfg.problem, cfg.initial_data, grid, cfg.t_end,
        u_cap=cfg.tolerances["u_cap"], cadence=cfg.cadence,
        eps_supp=cfg.tolerances["eps_supp"], fit_alpha=fit_alpha,
    )
    paths = write_run_report(report, cfg.output_dir)
    print(f"run: termination={report.termination} -> {paths['csv']}")
    return 0


def _cmd_profile(cfg: Config) -> int:
    profile = find_compact_subsolution_profile(cfg.problem)
    res = profile_residual(profile, f_floor=cfg.tolerances["f_floor"])
    paths = write_profile(profile, cfg.output_dir)
    ok = res < cfg.tolerances["residual_tol"]
    print(f"profile: xi1={profile.xi1:.6g} xi2={profile.xi2:.6g} residual={res:.3g} "
          f"-> {paths['csv']}")
    return 0 if ok else 1


def _cmd_stationary(cfg: Config) -> int:
    unit = unit_stationary_profile(cfg.problem)
    paths = write_stationary(unit, cfg.output_dir)
    print(f"stationary: D1={unit.D:.6g} R0={unit.R0:.6g} -> {paths['csv']}")
    return 0


def _cmd_phase(cfg: Config) -> int:
    orbit = phase_orbit_from_P0(cfg.problem)
    fit = check_orbit_asymptotics(orbit)
    paths = write_orbit(orbit, cfg.output_dir, fit=fit)
    ok = abs(fit.slope - fit.expected_slope) <= 0.05 * fit.expected_slope
    print(f"phase: slope={fit.slope:.4g} expected={fit.expected_slope:.4g} "
          f"theta={fit.theta:.4g} -> {paths['csv']}")
    return 0 if ok else 1


def _cmd_verify(cfg: Config) -> int:
    if cfg.scenario is None:
        raise ConfigError("verify requires a scenario in the config")
    result = _run_scenario(cfg)
    write_scenario_result(result, cfg.output_dir)
    print(f"verify {result.name}: {result.verdict}")
    return _EXIT_BY_VERDICT[result.verdict]


def _cmd_sweep(cfg: Config) -> int:
    if cfg.scenario is None:
        raise ConfigError("sweep requires a scenario in the config")
    if not cfg.sweep:
        raise ConfigError("sweep requires a 'sweep' table of parameter lists")
    keys = sorted(cfg.sweep)
    grids = [cfg.sweep[k] for k in keys]
    threads = max(1, int(os.environ.get("BLOWUPLAB_THREADS", "1")))

    jobs = []
    for combo in itertools.product(*grids):
        pd = {"m": cfg.problem.m, "p": cfg.problem.p,
              "sigma": cfg.problem.sigma, "dim": cfg.problem.dim}
        for k, v in zip(keys, combo):
            pd["dim" if k == "N" else k] = int(v) if k == "N" else float(v)
        jobs.append((combo, Config(**{**cfg.__dict__, "problem": Problem(**pd)})))

    def run_one(job):
        combo, job_cfg = job
        tag = "_".join(f"{k}{v:g}" for k, v in zip(keys, combo))
        result = _run_scenario(job_cfg)
        write_scenario_result(result, Path(cfg.output_dir) / f"sweep_{tag}")
        return result.verdict

    with ThreadPoolExecutor(max_workers=threads) as pool:
        verdicts = list(pool.map(run_one, jobs))
    print("sweep verdicts:", ", ".join(verdicts))
    if any(v == "FAIL" for v in verdicts):
        return 1
    if any(v == "ANOMALY" for v in verdicts):
        return 3
    return 0


def dispatch(argv) -> int:
    parser = argparse.ArgumentParser(prog="blowuplab")
    sub = parser.add_subparsers(dest="command")
    for name in ("run", "profile", "stationary", "phase", "verify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--override", action="append", default=[])
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        cfg = _load_config(args)
        echo_config(cfg, Path(cfg.output_dir))
        handler = {
            "run": _cmd_run,
            "profile": _cmd_profile,
            "stationary": _cmd_stationary,
            "phase": _cmd_phase,
            "verify": _cmd_verify,
            "sweep": _cmd_sweep,
        }[args.command]
        return handler(cfg)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"anomaly: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
