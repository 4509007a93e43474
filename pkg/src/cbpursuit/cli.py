"""Command line interface: simulate, analyze, and parameter sweeps."""

from __future__ import annotations

import argparse
import copy
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .behavior import classify_behavior, predict_behavior
from .equilibria import (
    EquilibriumReport,
    StabilityVerdict,
    circling_equilibrium,
    classify_stability_3agent,
    pure_shape_equilibria,
    rectilinear_equilibrium,
)
from .errors import (
    CBPursuitError,
    ConfigParseError,
    GraphError,
    InadmissibleEquilibriumError,
    InvalidConfigError,
)
from .integrate import Termination, Trajectory, integrate
from .io import write_json, write_shape_csv, write_svg_curves, write_trajectory_csv
from .presets import get_preset, preset_names
from .scenario import Scenario, graph_params_from_config, scenario_from_config
from .shape import shape_series
from .systems import FullStateSystem


def _arc_label(arc) -> str:
    return f"{arc[0] + 1},{arc[1] + 1}"


@dataclass
class SimulationResult:
    """Everything computed by one simulate run."""

    scenario: Scenario
    trajectory: Trajectory
    positions: np.ndarray
    headings: np.ndarray
    controls: np.ndarray
    kappa: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    cost: np.ndarray
    behavior: str
    outputs: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.trajectory.times

    @property
    def termination(self) -> Termination:
        return self.trajectory.termination


def run_simulate(scenario: Scenario, out_dir=None, echo=None) -> SimulationResult:
    """Integrate a scenario, classify the motion, optionally write artifacts."""
    graph, params = scenario.graph, scenario.params
    system = FullStateSystem(graph, params)
    trajectory = integrate(
        system.derivative,
        system.pack(scenario.initial),
        scenario.config,
        stepper=system.stepper,
        min_separation=system.min_separation,
    )
    k = len(trajectory)
    n = graph.n
    positions = trajectory.samples[:, : 2 * n].reshape(k, n, 2)
    headings = trajectory.samples[:, 2 * n :].reshape(k, n, 2)

    kappa, theta, rho = shape_series(positions, headings, graph)
    tails = [i for (i, _) in graph.arcs]
    alpha_t = params.alpha[tails]
    mu_t = params.mu[tails]
    cost = -np.cos(kappa - alpha_t)
    u_arcs = mu_t * np.sin(kappa - alpha_t) + (np.sin(kappa) + np.sin(theta)) / rho
    controls = np.empty((k, n))
    controls[:, tails] = u_arcs

    behavior = classify_behavior(trajectory.times, positions, headings, graph, params)

    outputs = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        outputs["trajectory_csv"] = str(out / "trajectory.csv")
        write_trajectory_csv(
            outputs["trajectory_csv"], trajectory.times, positions, headings, controls
        )
        outputs["shape_csv"] = str(out / "shape.csv")
        write_shape_csv(
            outputs["shape_csv"], trajectory.times, graph.arcs, kappa, theta, rho, cost
        )
        outputs["svg"] = str(out / "trajectory.svg")
        write_svg_curves(
            outputs["svg"],
            [positions[:, i] for i in range(n)],
            labels=[f"agent {i + 1}" for i in range(n)],
        )
        outputs["summary_json"] = str(out / "summary.json")
        write_json(
            outputs["summary_json"],
            {
                "name": scenario.name,
                "targets": [t + 1 for t in graph.targets],
                "alpha": list(params.alpha),
                "mu": list(params.mu),
                "t_end": float(trajectory.times[-1]),
                "termination": trajectory.termination.value,
                "behavior": behavior,
                "final_cost": {
                    _arc_label(arc): float(cost[-1, a])
                    for a, arc in enumerate(graph.arcs)
                },
                "outputs": outputs,
            },
        )

    if echo is not None:
        cyc = ", ".join(str(c + 1) for c in graph.cycle_members)
        br = ", ".join(str(b + 1) for b in graph.branch_members) or "none"
        echo(f"[simulate] {scenario.name}: {n} agents, cycle ({cyc}), branches: {br}")
        echo(
            f"[simulate] {trajectory.termination.value} at t = {trajectory.times[-1]:g}, "
            f"behavior: {behavior}"
        )
        echo(
            f"[simulate] bearing cost at end: min {cost[-1].min():.6f}, "
            f"max {cost[-1].max():.6f}"
        )
        for key in ("trajectory_csv", "shape_csv", "svg", "summary_json"):
            if key in outputs:
                echo(f"[simulate] wrote {outputs[key]}")

    result = SimulationResult(
        scenario=scenario,
        trajectory=trajectory,
        positions=positions,
        headings=headings,
        controls=controls,
        kappa=kappa,
        theta=theta,
        rho=rho,
        cost=cost,
        behavior=behavior,
        outputs=outputs,
    )
    return result


def _report_payload(report: EquilibriumReport, arcs) -> dict:
    payload = {
        "kind": report.kind,
        "admissible": report.admissible,
        "reason": report.reason,
    }
    if report.strict_mod_2pi is not None:
        payload["strict_mod_2pi"] = report.strict_mod_2pi
        payload["relaxed_mod_pi"] = report.relaxed_mod_pi
    if report.theta is not None:
        payload["theta"] = {_arc_label(a): report.theta[a] for a in arcs}
    if report.rho_tilde is not None:
        payload["rho_tilde"] = {_arc_label(a): report.rho_tilde[a] for a in arcs}
    if report.circling_radius is not None:
        payload["circling_radius_per_unit_rho"] = report.circling_radius
    if report.tau is not None:
        payload["tau"] = report.tau
        payload["k"] = report.k
    if report.log_scale_rate is not None:
        payload["log_scale_rate"] = report.log_scale_rate
    return payload


def _verdict_payload(verdict: StabilityVerdict) -> dict:
    return {
        "classification": verdict.classification,
        "eigenvalues": list(verdict.eigenvalues),
        "trace_sign_quantity": verdict.trace_sign_quantity,
        "theta_star": verdict.theta_star,
        "rho_tilde_star": verdict.rho_tilde_star,
    }


def run_analyze(name, graph, params, out_dir=None, echo=None) -> dict:
    """Evaluate every equilibrium family and, when available, branch stability."""
    arcs = graph.arcs
    rect = rectilinear_equilibrium(params, graph)
    circ = circling_equilibrium(params, graph)
    pure = pure_shape_equilibria(params, graph)

    payload = {
        "name": name,
        "targets": [t + 1 for t in graph.targets],
        "alpha": list(params.alpha),
        "mu": list(params.mu),
        "rectilinear": _report_payload(rect, arcs),
        "circling": _report_payload(circ, arcs),
        "pure_shape": [_report_payload(rep, arcs) for rep in pure],
    }

    is_pair_plus_branch = (
        graph.n == 3 and len(graph.cycle_members) == 2 and len(graph.branch_members) == 1
    )
    if is_pair_plus_branch:
        stability = {}
        for kind in ("circling", "pure_shape"):
            try:
                stability[kind] = _verdict_payload(classify_stability_3agent(params, kind))
            except InadmissibleEquilibriumError as exc:
                stability[kind] = {"admissible": False, "reason": str(exc)}
        payload["branch_stability"] = stability

    payload["predicted_behavior"] = predict_behavior(graph, params)

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload["outputs"] = {"analysis_json": str(out / "analysis.json")}
        write_json(out / "analysis.json", payload)

    if echo is not None:
        echo(f"[analyze] {name}: targets {[t + 1 for t in graph.targets]}")
        for label, rep in (("rectilinear", rect), ("circling", circ)):
            state = "admissible" if rep.admissible else "inadmissible"
            echo(f"[analyze] {label}: {state} ({rep.reason})")
            if rep.admissible and rep.theta is not None:
                vals = ", ".join(
                    f"theta[{_arc_label(a)}]={rep.theta[a]:+.6f}" for a in arcs
                )
                echo(f"[analyze]   {vals}")
            if rep.admissible and rep.rho_tilde is not None:
                vals = ", ".join(
                    f"rho~[{_arc_label(a)}]={rep.rho_tilde[a]:.6f}" for a in arcs
                )
                echo(f"[analyze]   {vals}")
        for rep in pure:
            state = "admissible" if rep.admissible else "inadmissible"
            rate = f", log-scale rate {rep.log_scale_rate:+.6f}" if rep.admissible else ""
            echo(f"[analyze] pure shape k={rep.k}: {state} (tau={rep.tau:+.6f}{rate})")
        if "branch_stability" in payload:
            for kind, verdict in payload["branch_stability"].items():
                if "classification" in verdict:
                    eigs = ", ".join(
                        f"{complex(v).real:+.6f}{complex(v).imag:+.6f}j"
                        for v in verdict["eigenvalues"]
                    )
                    echo(
                        f"[analyze] branch {kind}: {verdict['classification']} "
                        f"(eigenvalues {eigs}; sign quantity "
                        f"{verdict['trace_sign_quantity']:+.6f})"
                    )
                else:
                    echo(f"[analyze] branch {kind}: inadmissible ({verdict['reason']})")
        echo(f"[analyze] predicted behavior: {payload['predicted_behavior']}")
        if out_dir is not None:
            echo(f"[analyze] wrote {payload['outputs']['analysis_json']}")
    return payload


def _parse_values(text: str) -> list:
    """Parse sweep values: either "start:stop:count" or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigParseError("range must look like start:stop:count")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError as exc:
            raise ConfigParseError(f"bad range {text!r}: {exc}") from exc
        if count < 1:
            raise ConfigParseError("range count must be at least 1")
        return [float(v) for v in np.linspace(start, stop, count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigParseError(f"bad value list {text!r}: {exc}") from exc


def _set_param(doc: dict, path: str, value: float):
    parts = path.split(".")
    if parts[0] in ("alpha", "mu"):
        if len(parts) != 2:
            raise ConfigParseError(f"use {parts[0]}.<agent index> (1-based)")
        try:
            idx = int(parts[1]) - 1
        except ValueError as exc:
            raise ConfigParseError(f"bad agent index in {path!r}") from exc
        field_list = doc.get(parts[0])
        if parts[0] == "mu" and field_list is None:
            field_list = [1.0] * len(doc.get("alpha", []))
            doc["mu"] = field_list
        if not isinstance(field_list, list) or not 0 <= idx < len(field_list):
            raise ConfigParseError(f"agent index out of range in {path!r}")
        field_list[idx] = value
        return
    key = parts[-1]
    if (len(parts) == 1 or parts[0] == "integrator") and key in (
        "t_final",
        "dt",
        "record_stride",
        "rho_floor",
        "divergence_ceiling",
    ):
        doc.setdefault("integrator", {})[key] = value
        return
    raise ConfigParseError(
        f"unsupported sweep parameter {path!r}; use alpha.<i>, mu.<i>, or integrator fields"
    )


def run_sweep(doc: dict, param: str, values, out_dir, workers: int = 4, echo=None) -> dict:
    """Run one scenario per parameter value; returns the sweep index payload."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def job(idx_value):
        idx, value = idx_value
        run_dir = out / f"run_{idx:03d}"
        variant = copy.deepcopy(doc)
        variant["name"] = f"{doc.get('name', 'scenario')}_{param}_{value:.6g}"
        try:
            _set_param(variant, param, value)
            scenario = scenario_from_config(variant)
            result = run_simulate(scenario, run_dir)
            return {
                "value": value,
                "dir": str(run_dir),
                "termination": result.termination.value,
                "behavior": result.behavior,
            }
        except (CBPursuitError, GraphError) as exc:
            return {"value": value, "dir": str(run_dir), "error": str(exc)}

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        runs = list(pool.map(job, enumerate(values)))

    payload = {"param": param, "values": list(values), "runs": runs}
    write_json(out / "sweep.json", payload)
    if echo is not None:
        echo(f"[sweep] {param} over {len(values)} values -> {out}")
        for run in runs:
            if "error" in run:
                echo(f"[sweep] {run['value']:>12.6g}  error: {run['error']}")
            else:
                echo(
                    f"[sweep] {run['value']:>12.6g}  {run['termination']:<10} "
                    f"{run['behavior']:<12} {run['dir']}"
                )
        echo(f"[sweep] wrote {out / 'sweep.json'}")
    return payload


def _load_doc(args) -> dict:
    if getattr(args, "preset", None) and getattr(args, "config", None):
        raise ConfigParseError("give either --preset or --config, not both")
    if getattr(args, "preset", None):
        try:
            return get_preset(args.preset)
        except KeyError as exc:
            raise ConfigParseError(str(exc)) from exc
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigParseError(f"cannot read {path}: {exc}") from exc
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    raise ConfigParseError("a scenario is required: use --preset or --config")


def _apply_overrides(doc: dict, args):
    integ = doc.setdefault("integrator", {})
    if getattr(args, "t_final", None) is not None:
        integ["t_final"] = args.t_final
    if getattr(args, "dt", None) is not None:
        integ["dt"] = args.dt
    if getattr(args, "record_stride", None) is not None:
        integ["record_stride"] = args.record_stride


def _add_source_args(parser):
    parser.add_argument(
        "--preset", help=f"bundled scenario, one of: {', '.join(preset_names())}"
    )
    parser.add_argument("--config", help="path to a scenario JSON file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbpursuit",
        description="Constant-bearing pursuit on cycle-with-branches graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario and write artifacts")
    _add_source_args(sim)
    sim.add_argument("--out", default="out", help="output root (default: out)")
    sim.add_argument("--no-artifacts", action="store_true", help="skip file output")
    sim.add_argument("--t-final", type=float, dest="t_final")
    sim.add_argument("--dt", type=float)
    sim.add_argument("--record-stride", type=int, dest="record_stride")

    ana = sub.add_parser("analyze", help="evaluate equilibria and stability")
    _add_source_args(ana)
    ana.add_argument("--out", default=None, help="also write analysis.json under this root")

    swp = sub.add_parser("sweep", help="run a scenario across parameter values")
    _add_source_args(swp)
    swp.add_argument("--param", required=True, help="alpha.<i>, mu.<i>, or integrator field")
    swp.add_argument("--range", dest="values", required=True,
                     help="start:stop:count or a comma-separated list")
    swp.add_argument("--out", default="out/sweep")
    swp.add_argument("--workers", type=int, default=4)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            doc = _load_doc(args)
            _apply_overrides(doc, args)
            scenario = scenario_from_config(doc)
            out_dir = None if args.no_artifacts else Path(args.out) / scenario.name
            result = run_simulate(scenario, out_dir, echo=print)
            return 0 if result.termination is Termination.COMPLETED else 3
        if args.command == "analyze":
            doc = _load_doc(args)
            name, graph, params = graph_params_from_config(doc)
            out_dir = Path(args.out) / name if args.out else None
            run_analyze(name, graph, params, out_dir, echo=print)
            return 0
        doc = _load_doc(args)
        values = _parse_values(args.values)
        # reject unusable parameter paths before launching any runs
        _set_param(copy.deepcopy(doc), args.param, values[0])
        payload = run_sweep(doc, args.param, values, args.out, args.workers, echo=print)
        return 0 if all("error" not in run for run in payload["runs"]) else 3
    except (ConfigParseError, InvalidConfigError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CBPursuitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
