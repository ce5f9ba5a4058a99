"""Command-line front end: single solves, shooting, epsilon sweeps,
constants reports and the validation suite.

Configuration is a flat key=value text file plus ``--key value`` overrides
on the command line.  Data files are deterministic: floats are written
with 17 significant digits and wall times go to a separate log.
"""

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, MesofickError, RegimeError
from .fixed_point import outer_solve
from .grid_kernel import Grid, build_kernel
from .linop import DirectSolve, NeumannSeries, gain
from .macroscopic import ModelParams, theory_constants
from .shooting import estimate_jacobian, shoot
from .validate import run_checks

COMMANDS = ("solve", "shoot", "sweep", "constants", "validate")

_FLOAT_KEYS = ("beta", "mu_minus", "mu_plus", "epsilon", "delta_prime",
               "inner_tol", "outer_tol", "shoot_tol", "truncation_tol",
               "jacobian_step")
_INT_KEYS = ("max_inner", "max_outer", "max_shoot", "nodes_per_unit",
             "seed", "workers")
_STR_KEYS = ("resolvent", "output_format")
_BOOL_KEYS = ("sweep_jacobian",)
_LIST_KEYS = ("sweep",)


@dataclass
class RunConfig:
    beta: float = 1.25
    mu_minus: float = 0.8
    mu_plus: float = 0.7
    epsilon: float = 0.02
    delta_prime: float = None
    inner_tol: float = 1e-12
    outer_tol: float = 1e-10
    shoot_tol: float = 1e-8
    truncation_tol: float = 1e-13
    jacobian_step: float = 1e-4
    max_inner: int = 40
    max_outer: int = 200
    max_shoot: int = 20
    nodes_per_unit: int = 20
    seed: int = 0
    workers: int = 0
    resolvent: str = "series"
    output_format: str = "csv"
    sweep_jacobian: bool = False
    sweep: list = field(default_factory=list)

    def params(self, epsilon=None):
        try:
            return ModelParams(
                beta=self.beta, mu_minus=self.mu_minus, mu_plus=self.mu_plus,
                epsilon=self.epsilon if epsilon is None else epsilon,
                delta_prime=self.delta_prime,
                inner_tol=self.inner_tol, outer_tol=self.outer_tol,
                shoot_tol=self.shoot_tol, max_inner=self.max_inner,
                max_outer=self.max_outer, max_shoot=self.max_shoot)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self, epsilon=None):
        try:
            return Grid(self.epsilon if epsilon is None else epsilon,
                        self.nodes_per_unit)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def method(self):
        if self.resolvent == "series":
            return NeumannSeries(self.truncation_tol)
        if self.resolvent == "direct":
            return DirectSolve()
        raise ConfigError(f"resolvent must be 'series' or 'direct', got "
                          f"{self.resolvent!r}")

    def to_dict(self):
        return {
            "beta": self.beta, "mu_minus": self.mu_minus,
            "mu_plus": self.mu_plus, "epsilon": self.epsilon,
            "delta_prime": self.delta_prime, "inner_tol": self.inner_tol,
            "outer_tol": self.outer_tol, "shoot_tol": self.shoot_tol,
            "truncation_tol": self.truncation_tol,
            "jacobian_step": self.jacobian_step,
            "max_inner": self.max_inner, "max_outer": self.max_outer,
            "max_shoot": self.max_shoot,
            "nodes_per_unit": self.nodes_per_unit, "seed": self.seed,
            "workers": self.workers, "resolvent": self.resolvent,
            "output_format": self.output_format,
            "sweep_jacobian": self.sweep_jacobian,
            "sweep": list(self.sweep),
        }


def _convert(key, raw):
    try:
        if key in _FLOAT_KEYS:
            return None if raw.strip() == "" else float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _LIST_KEYS:
            return [float(tok) for tok in raw.replace(",", " ").split()]
        if key in _STR_KEYS:
            return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc
    raise ConfigError(f"unknown configuration key: {key}")


def parse_config_file(path):
    entries = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got "
                              f"{stripped!r}")
        key, _, raw = stripped.partition("=")
        entries[key.strip()] = _convert(key.strip(), raw.strip())
    return entries


def build_config(config_path=None, overrides=None):
    entries = parse_config_file(config_path) if config_path else {}
    entries.update(overrides or {})
    cfg = RunConfig(**entries)
    if cfg.sweep and any(b >= a for a, b in zip(cfg.sweep, cfg.sweep[1:])):
        raise ConfigError("sweep epsilon values must be strictly decreasing")
    if cfg.output_format not in ("csv", "json"):
        raise ConfigError("output_format must be 'csv' or 'json'")
    cfg.method()    # validates the resolvent choice
    return cfg


def _fmt(x):
    if x is None:
        return ""
    return format(float(x), ".17g")


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_profile(out_dir, cfg, report, params, kernel):
    g = gain(params, kernel, report.m, report.h, report.achieved_boundary)
    columns = {
        "x": report.m.grid.x, "m": report.m.values, "m0": report.m0.values,
        "h": report.h.values, "p": g.gain.values,
    }
    if cfg.output_format == "json":
        payload = {k: [float(v) for v in vals] for k, vals in columns.items()}
        (out_dir / "profile.json").write_text(_json_text(payload))
        return
    lines = ["x,m,m0,h,p"]
    for row in zip(*columns.values()):
        lines.append(",".join(_fmt(v) for v in row))
    (out_dir / "profile.csv").write_text("\n".join(lines) + "\n")


def _write_report(out_dir, cfg, report):
    payload = report.to_dict()
    payload["config"] = cfg.to_dict()
    (out_dir / "report.json").write_text(_json_text(payload))


def _log_timing(out_dir, label, seconds):
    with open(out_dir / "timing.log", "a") as fh:
        fh.write(f"{label} {seconds:.6f}\n")


def run_solve(cfg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    grid = cfg.grid()
    kernel = build_kernel(grid)
    start = time.perf_counter()
    report = outer_solve(params, grid, kernel, method=cfg.method())
    elapsed = time.perf_counter() - start
    _write_profile(out_dir, cfg, report, params, kernel)
    _write_report(out_dir, cfg, report)
    _log_timing(out_dir, "solve", elapsed)
    return report


def run_shoot(cfg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    grid = cfg.grid()
    kernel = build_kernel(grid)
    start = time.perf_counter()
    report = shoot(params, grid, kernel, (cfg.mu_minus, cfg.mu_plus))
    elapsed = time.perf_counter() - start
    _write_profile(out_dir, cfg, report, params.with_boundary(
        *report.prescribed_boundary), kernel)
    _write_report(out_dir, cfg, report)
    _log_timing(out_dir, "shoot", elapsed)
    return report


def _sweep_point(cfg, eps):
    params = cfg.params(epsilon=eps)
    grid = cfg.grid(epsilon=eps)
    kernel = build_kernel(grid)
    start = time.perf_counter()
    report = outer_solve(params, grid, kernel, method=cfg.method())
    row = {
        "epsilon": eps,
        "status": "ok",
        "sup_diff_m0": report.sup_diff_m0,
        "alpha_diff_m0": report.alpha_diff_m0,
        "j": report.j,
        "boundary_drift": report.boundary_drift(),
        "outer_iterations": report.trace.outer_iterations,
        "max_jacobian_deviation": None,
    }
    if cfg.sweep_jacobian:
        jac = estimate_jacobian(params, grid, kernel,
                                (cfg.mu_minus, cfg.mu_plus),
                                step=cfg.jacobian_step)
        row["max_jacobian_deviation"] = jac.deviation
    return row, time.perf_counter() - start


def fit_loglog(eps_values, norms):
    """Least-squares slope of log(norm) against log(eps); returns
    (slope, rms residual of the fit)."""
    lx = np.log(np.asarray(eps_values, dtype=float))
    ly = np.log(np.asarray(norms, dtype=float))
    coeffs, res, *_ = np.polyfit(lx, ly, 1, full=True)
    rms = math.sqrt(res[0] / len(lx)) if len(res) else 0.0
    return float(coeffs[0]), rms


_SWEEP_COLUMNS = ("epsilon", "status", "sup_diff_m0", "alpha_diff_m0", "j",
                  "boundary_drift", "outer_iterations",
                  "max_jacobian_deviation")


def run_sweep(cfg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(cfg.sweep) < 3:
        raise ConfigError("sweep needs at least 3 epsilon values")

    def point(eps):
        try:
            return _sweep_point(cfg, eps)
        except MesofickError as exc:
            row = {k: None for k in _SWEEP_COLUMNS}
            row["epsilon"] = eps
            row["status"] = f"failed:{type(exc).__name__}"
            return row, 0.0

    workers = cfg.workers or min(len(cfg.sweep), 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(point, cfg.sweep))

    rows = [r for r, _ in results]
    ok_rows = [r for r in rows if r["status"] == "ok"]
    fit = None
    if len(ok_rows) >= 2:
        slope, res = fit_loglog([r["epsilon"] for r in ok_rows],
                                [r["sup_diff_m0"] for r in ok_rows])
        fit = {"slope": slope, "residual": res}

    lines = [",".join(_SWEEP_COLUMNS)]
    for r in rows:
        cells = []
        for key in _SWEEP_COLUMNS:
            v = r[key]
            if key == "status":
                cells.append(v)
            elif key == "outer_iterations":
                cells.append("" if v is None else str(v))
            else:
                cells.append(_fmt(v))
        lines.append(",".join(cells))
    (out_dir / "sweep.csv").write_text("\n".join(lines) + "\n")
    (out_dir / "sweep.json").write_text(_json_text(
        {"rows": rows, "fit": fit, "config": cfg.to_dict()}))
    for (row, secs) in results:
        _log_timing(out_dir, f"sweep eps={row['epsilon']}", secs)
    return rows, fit


def run_constants(cfg, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    constants = theory_constants(params)
    payload = {
        "constants": constants.to_dict(),
        "epsilon": params.epsilon,
        "within_inner_regime": params.epsilon < constants.eps_inner_max,
        "within_outer_regime": params.epsilon < constants.eps_outer_max,
        "config": cfg.to_dict(),
    }
    (out_dir / "constants.json").write_text(_json_text(payload))
    return payload


def run_validate(cfg, out_dir, corrupt_kernel=False):
    params = cfg.params()
    grid = cfg.grid()
    passed, rows = run_checks(params, grid, seed=cfg.seed,
                              corrupt_kernel=corrupt_kernel)
    width = max(len(name) for name, _, _ in rows)
    for name, ok, detail in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    if out_dir is not None:
        payload = {"passed": passed,
                   "checks": [{"name": n, "passed": ok, "detail": d}
                              for n, ok, d in rows]}
        (out_dir / "validate.json").write_text(_json_text(payload))
    return passed


def _error_json(out_dir, exc):
    if out_dir is None:
        return
    payload = {"error": type(exc).__name__, "message": str(exc)}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "error.json").write_text(_json_text(payload))
    except OSError:
        pass


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mesofick",
        description="Stationary nonlocal magnetization profiles and their "
                    "diffusive limit.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="key=value file")
    parser.add_argument("--out", default=None, help="output directory")
    args, extra = parser.parse_known_args(argv)

    out_dir = Path(args.out) if args.out else None
    try:
        overrides = {}
        it = iter(extra)
        for tok in it:
            if not tok.startswith("--"):
                raise ConfigError(f"unexpected argument {tok!r}")
            key = tok[2:]
            try:
                raw = next(it)
            except StopIteration:
                raise ConfigError(f"missing value for --{key}") from None
            overrides[key] = _convert(key, raw)
        cfg = build_config(args.config, overrides)

        if args.command == "validate":
            if out_dir is not None:
                out_dir.mkdir(parents=True, exist_ok=True)
            return 0 if run_validate(cfg, out_dir) else 4

        if out_dir is None:
            raise ConfigError(f"--out is required for {args.command}")
        out_dir.mkdir(parents=True, exist_ok=True)

        if args.command == "solve":
            report = run_solve(cfg, out_dir)
            print(f"converged: residual_fixed_point = "
                  f"{report.residual_fixed_point:.3e}, j = {report.j:.6g}")
        elif args.command == "shoot":
            report = run_shoot(cfg, out_dir)
            print(f"hit targets in {report.shoot_steps} step(s); "
                  f"achieved boundary {report.achieved_boundary}")
        elif args.command == "sweep":
            rows, fit = run_sweep(cfg, out_dir)
            n_ok = sum(1 for r in rows if r["status"] == "ok")
            slope = "n/a" if fit is None else f"{fit['slope']:.4f}"
            print(f"sweep finished: {n_ok}/{len(rows)} points ok, "
                  f"log-log slope = {slope}")
        elif args.command == "constants":
            payload = run_constants(cfg, out_dir)
            print(_json_text(payload["constants"]), end="")
        return 0
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RegimeError as exc:
        print(f"solver regime error: {exc}", file=sys.stderr)
        _error_json(out_dir, exc)
        return 3
    except MesofickError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _error_json(out_dir, exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
