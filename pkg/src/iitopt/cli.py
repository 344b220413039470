"""Command line: config-driven experiments emitting CSV/JSON artifacts.

Subcommands:

- ``analytic``: closed-form quantities and burst policies of the scalar
  model (summary JSON + policy CSV).
- ``solve``: run the penalized transcription solver (report JSON +
  trajectory CSV, with costate/switching columns for the scalar model).
- ``verify``: switching-function certificate for a previous solve report
  (certificate JSON + annotated trajectory CSV).
- ``gamma``: high-fecundity reduction experiment (eps vs sup-error CSV).

Exit codes: 0 success, 2 configuration or validation failure, 3 solver
iteration cap reached.  Every run writes a ``manifest.json`` listing the
parsed config, produced files, package versions and wall-clock time; the
manifest is the only output that is not byte-reproducible (it carries the
wall clock).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import feasibility_time, m_star, min_cost_policy, min_cost_time_policy, t_star
from .config import ConfigError, load_config
from .dynamics import FullParams, p_star, theta
from .errors import ModelError
from .integrate import ControlProfile, TimeGrid, integrate_reduced, write_trajectory_csv
from .transcribe import solve
from .verify import (
    check_bang_bang,
    gamma_convergence_experiment,
    reference_terminal_adjoint,
    switching_function,
)

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NO_CONVERGENCE = 3


def _versions() -> dict:
    import numba
    import scipy

    return {
        "iitopt": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": ".".join(map(str, sys.version_info[:3])),
    }


def _write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finish(out_dir: Path, command: str, cfg, artifacts, summary, started, notes=()):
    manifest = {
        "command": command,
        "config": cfg.echo,
        "artifacts": sorted(a.name for a in artifacts),
        "versions": _versions(),
        "wall_clock_s": time.perf_counter() - started,
        "summary": summary,
        "notes": list(notes),
    }
    path = out_dir / "manifest.json"
    _write_json(path, manifest)
    missing = [a for a in artifacts if not a.exists()]
    if missing:
        raise ModelError(f"artifacts missing at exit: {missing}")
    return manifest


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.run.get("out_dir") or f"runs/{args.command}"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_analytic(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config, args.override)
    if cfg.kind != "reduced":
        raise ConfigError("the analytic subcommand needs a reduced-model config")
    out = _out_dir(args, cfg)
    params = cfg.params
    M = cfg.problem["m"]
    th = theta(params)
    ps = p_star(params)
    ms = m_star(params)
    ts = t_star(M, params)

    feas = []
    for frac in (1.0, 0.75, 0.5, 0.25):
        rate = frac * M
        if rate > ms * 1.000001:
            feas.append({"rate": rate, "crossing_time": feasibility_time(rate, params)})

    if cfg.problem["mode"] == "fixed":
        horizon = cfg.problem["t"]
    else:
        horizon = max(2.0 * ts, cfg.problem["t0"])
    policy = min_cost_policy(0.0, horizon, M, params)

    alphas = sorted({cfg.problem.get("alpha", 0.01), 0.5, 1.0})
    free_rows = []
    for alpha in alphas:
        _, value = min_cost_time_policy(alpha, M, params)
        free_rows.append(
            {
                "alpha": alpha,
                "final_time": ts,
                "release_cost": value.release_cost,
                "combined": value.combined,
            }
        )

    summary = {
        "theta": th,
        "p_star": ps,
        "m_star": ms,
        "t_star": ts,
        "M": M,
        "feasibility": feas,
        "fixed_horizon": {
            "horizon": policy.horizon,
            "offset": policy.xi,
            "duration": policy.duration,
            "release_cost": policy.release_cost,
        },
        "free_horizon": free_rows,
    }
    _write_json(out / "summary.json", summary)

    n = cfg.problem["n"]
    profile = policy.profile(n)
    with open(out / "policy.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,u\n")
        ts_nodes = profile.grid.nodes()
        uu = np.concatenate([profile.values, profile.values[-1:]])
        for t, u in zip(ts_nodes, uu):
            fh.write(f"{float(t)!r},{float(u)!r}\n")

    print(f"theta     = {th:.9f}")
    print(f"p_star    = {ps:.9f}")
    print(f"m_star    = {ms:.9f}")
    print(f"t_star(M) = {ts:.9f}  (M = {M})")
    for row in feas:
        print(f"crossing time at rate {row['rate']:8.3f}: {row['crossing_time']:.9f}")
    for row in free_rows:
        print(
            f"free horizon alpha={row['alpha']:<5}: T={row['final_time']:.7f} "
            f"value={row['combined']:.7f}"
        )
    _finish(out, "analytic", cfg, [out / "summary.json", out / "policy.csv"], summary, started)
    return _EXIT_OK


def cmd_solve(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config, args.override)
    out = _out_dir(args, cfg)
    spec = cfg.problem_spec()
    seed = args.seed if args.seed is not None else cfg.run.get("seed", 0)
    report = solve(
        spec,
        u0=cfg.run.get("u0"),
        max_iters=cfg.run.get("max_iters", 5000),
        tol=cfg.run.get("tol", 1e-6),
        starts=cfg.run.get("starts"),
        seed=seed,
        slide=cfg.run.get("slide", True),
    )

    traj = report.trajectory
    if cfg.kind == "reduced":
        # annotate with the costate and switching function implied by the
        # terminal-penalty gradient (fall back to the structural anchor when
        # the final state already meets the target and the gradient vanishes)
        short = theta(cfg.params) - float(traj.states[-1])
        qT = 2.0 * short / spec.penalty_eps if short > 0.0 else 0.0
        if qT <= 0.0:
            qT = reference_terminal_adjoint(report.control, cfg.params, alpha=report.alpha)
        cert = switching_function(
            report.control, cfg.params, report.alpha, qT, p0=float(spec.initial_state)
        )
        traj = cert.trajectory

    report.write_json(out / "report.json")
    write_trajectory_csv(out / "trajectory.csv", traj, report.control)
    structure = check_bang_bang(report.control)
    summary = {
        "final_time": report.final_time,
        "release_cost": report.release_cost,
        "penalty_value": report.penalty_value,
        "combined_objective": report.combined_objective,
        "iterations": report.iterations,
        "converged": report.converged,
        "termination": report.termination,
        "bang_bang_fraction": structure.fraction,
        "single_block": structure.single_block,
    }
    _finish(
        out,
        "solve",
        cfg,
        [out / "report.json", out / "trajectory.csv"],
        summary,
        started,
    )
    print(
        f"final_time={report.final_time:.6g} release_cost={report.release_cost:.6g} "
        f"penalty={report.penalty_value:.3g} iterations={report.iterations} "
        f"termination={report.termination}"
    )
    if report.termination == "max_iters":
        return _EXIT_NO_CONVERGENCE
    return _EXIT_OK


def cmd_verify(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config, args.override)
    if cfg.kind != "reduced":
        raise ConfigError(
            "switching-function certificates are defined for the reduced model only"
        )
    out = _out_dir(args, cfg)
    report_path = Path(args.report or (out / "report.json"))
    if not report_path.exists():
        raise ConfigError(f"solve report {report_path} not found")
    try:
        with open(report_path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        cdata = payload["control"]
        grid = TimeGrid(cdata["t0"], cdata["t1"], cdata["n"])
        control = ControlProfile(grid, np.array(cdata["values"]), cdata["M"])
        alpha = float(payload.get("alpha", 0.0))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse solve report {report_path}: {exc}") from exc

    spec = cfg.problem_spec()
    p0 = float(spec.initial_state)
    traj = integrate_reduced(control, p0, cfg.params)
    short = theta(cfg.params) - float(traj.states[-1])
    anchor = "penalty_gradient"
    qT = 2.0 * short / spec.penalty_eps if short > 0.0 else 0.0
    if qT <= 0.0:
        qT = reference_terminal_adjoint(control, cfg.params, alpha=alpha, p0=p0)
        anchor = "switch_structure"
    cert = switching_function(control, cfg.params, alpha, qT, p0=p0)
    payload_out = cert.to_json_dict()
    payload_out["terminal_adjoint"] = qT
    payload_out["terminal_adjoint_anchor"] = anchor
    _write_json(out / "certificate.json", payload_out)
    write_trajectory_csv(out / "certified_trajectory.csv", cert.trajectory, control)
    summary = {
        "verdict": cert.verdict,
        "max_violation": cert.max_violation,
        "n_violations": len(cert.violations),
        "terminal_adjoint_anchor": anchor,
    }
    _finish(
        out,
        "verify",
        cfg,
        [out / "certificate.json", out / "certified_trajectory.csv"],
        summary,
        started,
    )
    print(f"certificate: {cert.verdict} (max violation {cert.max_violation:.4g})")
    return _EXIT_OK


def cmd_gamma(args) -> int:
    started = time.perf_counter()
    cfg = load_config(args.config, args.override)
    if cfg.kind != "reduced":
        raise ConfigError("the gamma subcommand needs a reduced-model config")
    if cfg.gamma is None:
        raise ConfigError("missing [gamma] section")
    out = _out_dir(args, cfg)
    gamma = cfg.gamma
    eps_values = gamma.get("eps_values", [0.1, 0.05, 0.025, 0.0125])
    horizon = gamma.get("t", cfg.problem.get("t", 0.5))
    n = gamma.get("n", cfg.problem["n"])
    M = cfg.problem["m"]
    params = cfg.params

    # default: a constant sub-maximal rate; a full-rate burst releases a
    # K-sized fraction of the population within the crossing time and its
    # total-population distortion decays too slowly over the usual ladder
    kind = gamma.get("policy", "constant")
    grid = TimeGrid(0.0, horizon, n)
    if kind == "burst":
        u = min_cost_policy(0.0, horizon, M, params).profile(n)
    elif kind == "constant":
        u = ControlProfile.constant(gamma.get("level", 1.0), grid, M)
    elif kind == "zero":
        u = ControlProfile(grid, np.zeros(n), M)
    else:
        raise ConfigError(
            f"[gamma] policy must be 'burst', 'constant' or 'zero', got {kind!r}"
        )

    template = FullParams(
        b1=params.b1_0 / eps_values[0],
        b2=params.b2_0 / eps_values[0],
        d1=gamma.get("d1", params.d1),
        d2=gamma.get("d2", params.d2),
        K=gamma.get("k", params.K),
        s_h=gamma.get("s_h", params.s_h),
    )
    report = gamma_convergence_experiment(
        u, params, template, eps_values, substeps=gamma.get("substeps")
    )
    report.write_csv(out / "reduction.csv")
    _write_json(out / "reduction.json", report.to_json_dict())
    summary = report.to_json_dict()
    _finish(
        out,
        "gamma",
        cfg,
        [out / "reduction.csv", out / "reduction.json"],
        summary,
        started,
    )
    for e, s in zip(report.eps_values, report.sup_errors):
        print(f"eps={e:<8} sup|proportion - p| = {s:.6g}")
    return _EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="iitopt",
        description="Minimal-cost release strategies for mosquito population replacement",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("analytic", cmd_analytic),
        ("solve", cmd_solve),
        ("verify", cmd_verify),
        ("gamma", cmd_gamma),
    ):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="config file or preset name")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override a config entry (repeatable)",
        )
        sp.add_argument("--seed", type=int, default=None, help="override run.seed")
        if name == "verify":
            sp.add_argument("--report", default=None, help="path to a solve report.json")
        sp.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
