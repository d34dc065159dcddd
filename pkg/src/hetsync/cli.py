"""Batch front end: JSON experiment configs in, CSV/JSON/SVG artifacts out.

Subcommands: simulate, certify, sweep, bound, graph-info. Exit codes: 0 on
success, 2 for validation problems, 3 for numerical failures. Artifacts are
deterministic for a fixed config and seed (runtimes go to stderr, never into
artifacts) and are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .certify import HypothesisViolationError, certificate_to_dict, certify_network
from .dynamics import NodeModel, build_model
from .graph import (
    Graph,
    GraphValidationError,
    algebraic_connectivity,
    build_graph,
    complete_graph,
    is_connected,
    minimum_density,
)
from .measures import FieldEvaluationError
from .simulate import (
    BlowUpError,
    NetworkSystem,
    NotSynchronizedError,
    default_ic_batch,
    estimate_ultimate_bound,
    integrate,
    make_network,
    synchronization_summary,
    write_trajectory_csv,
)
from .svgplot import line_chart_svg


class ConfigError(ValueError):
    """Configuration rejected; the message carries the offending field path."""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_TOP_KEYS = {"nodes", "graph", "graph_d", "gains", "matrices", "integrator",
             "initial_state", "outputs"}


@dataclass
class OutputSpec:
    csv: str = "trajectory.csv"
    summary: str = "summary.json"
    plot: str = "e_tot.svg"
    stride: int = 100
    log_plot: bool = False


@dataclass
class ExperimentConfig:
    """Validated experiment description; see README for the JSON schema."""

    raw: dict
    models: list[NodeModel]
    graph: Graph
    graph_d: Graph
    c: float
    c_d: float
    gamma: np.ndarray | None
    gamma_d: np.ndarray | None
    p: np.ndarray | None
    method: str
    dt: float
    t_end: float
    initial_state: np.ndarray | None
    outputs: OutputSpec

    def network(self) -> NetworkSystem:
        return make_network(
            self.models, self.graph, self.graph_d, self.c, self.c_d,
            gamma=self.gamma, gamma_d=self.gamma_d, p=self.p,
        )


def _check_keys(d: dict, allowed: set[str], required: set[str], path: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s): {', '.join(sorted(unknown))}")
    missing = required - set(d)
    if missing:
        raise ConfigError(f"{path}: missing required key(s): {', '.join(sorted(missing))}")


def _number(value, path: str, minimum: float | None = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if not np.isfinite(v):
        raise ConfigError(f"{path}: must be finite")
    if minimum is not None and (v <= minimum if strict else v < minimum):
        op = ">" if strict else ">="
        raise ConfigError(f"{path}: must be {op} {minimum:g}")
    return v


def _matrix(value, dim: int, path: str) -> np.ndarray:
    try:
        m = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a {dim}x{dim} matrix") from None
    if m.shape != (dim, dim) or not np.all(np.isfinite(m)):
        raise ConfigError(f"{path}: expected a finite {dim}x{dim} matrix")
    return m


def _parse_graph(value, node_count: int, path: str) -> Graph:
    if value == "complete":
        return complete_graph(node_count)
    if isinstance(value, dict):
        _check_keys(value, {"edges"}, {"edges"}, path)
        try:
            return build_graph(node_count, value["edges"])
        except GraphValidationError as err:
            raise ConfigError(f"{path}.edges: {err}") from err
    raise ConfigError(f"{path}: expected \"complete\" or an object with an edge list")


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config document against every module precondition."""
    _check_keys(raw, _TOP_KEYS, {"nodes", "graph", "graph_d", "gains", "integrator"}, "config")

    nodes = raw["nodes"]
    if not isinstance(nodes, list) or not nodes:
        raise ConfigError("config.nodes: expected a nonempty list")
    models = []
    for i, spec in enumerate(nodes):
        path = f"config.nodes[{i}]"
        _check_keys(spec, {"model", "params"}, {"model"}, path)
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{path}.params: expected an object")
        try:
            models.append(build_model(spec["model"], params))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"{path}: {err}") from err
    dims = {m.dimension for m in models}
    if len(dims) != 1:
        raise ConfigError("config.nodes: models must share one state dimension")
    dim = dims.pop()
    n_nodes = len(models)

    graph = _parse_graph(raw["graph"], n_nodes, "config.graph")
    graph_d = _parse_graph(raw["graph_d"], n_nodes, "config.graph_d")

    _check_keys(raw["gains"], {"c", "c_d"}, {"c", "c_d"}, "config.gains")
    c = _number(raw["gains"]["c"], "config.gains.c", minimum=0.0)
    c_d = _number(raw["gains"]["c_d"], "config.gains.c_d", minimum=0.0)

    gamma = gamma_d = p = None
    if "matrices" in raw:
        mats = raw["matrices"]
        _check_keys(mats, {"gamma", "gamma_d", "p"}, set(), "config.matrices")
        if "gamma" in mats:
            gamma = _matrix(mats["gamma"], dim, "config.matrices.gamma")
        if "gamma_d" in mats:
            gamma_d = _matrix(mats["gamma_d"], dim, "config.matrices.gamma_d")
        if "p" in mats:
            p = _matrix(mats["p"], dim, "config.matrices.p")

    integ = raw["integrator"]
    _check_keys(integ, {"method", "dt", "t_end"}, {"dt", "t_end"}, "config.integrator")
    method = integ.get("method", "euler")
    if method not in ("euler", "rk4"):
        raise ConfigError("config.integrator.method: expected \"euler\" or \"rk4\"")
    dt = _number(integ["dt"], "config.integrator.dt", minimum=0.0, strict=True)
    t_end = _number(integ["t_end"], "config.integrator.t_end", minimum=dt)

    initial_state = None
    if "initial_state" in raw:
        state = raw["initial_state"]
        if not isinstance(state, list):
            raise ConfigError("config.initial_state: expected a list of numbers")
        values = [_number(v, f"config.initial_state[{k}]") for k, v in enumerate(state)]
        if len(values) != n_nodes * dim:
            raise ConfigError(
                f"config.initial_state: expected {n_nodes * dim} values "
                f"({n_nodes} nodes x dimension {dim}), got {len(values)}"
            )
        initial_state = np.array(values)

    outputs = OutputSpec()
    if "outputs" in raw:
        out = raw["outputs"]
        _check_keys(out, {"csv", "summary", "plot", "stride", "log_plot"}, set(), "config.outputs")
        for key in ("csv", "summary", "plot"):
            if key in out:
                if not isinstance(out[key], str) or not out[key]:
                    raise ConfigError(f"config.outputs.{key}: expected a nonempty string")
                setattr(outputs, key, out[key])
        if "stride" in out:
            stride = out["stride"]
            if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
                raise ConfigError("config.outputs.stride: expected an integer >= 1")
            outputs.stride = stride
        if "log_plot" in out:
            if not isinstance(out["log_plot"], bool):
                raise ConfigError("config.outputs.log_plot: expected true or false")
            outputs.log_plot = out["log_plot"]

    return ExperimentConfig(
        raw=raw, models=models, graph=graph, graph_d=graph_d, c=c, c_d=c_d,
        gamma=gamma, gamma_d=gamma_d, p=p, method=method, dt=dt, t_end=t_end,
        initial_state=initial_state, outputs=outputs,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    return parse_config(raw)


# ---------------------------------------------------------------------------
# artifact helpers
# ---------------------------------------------------------------------------


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


_SUMMARY_KEYS = {
    "command": str,
    "method": str,
    "dt": float,
    "t_end": float,
    "steps": int,
    "node_count": int,
    "dimension": int,
    "e_tot_final": float,
    "e_tot_tail_max": float,
    "e_tot_tail_min": float,
    "tail_start_time": float,
    "threshold": float,
    "synchronized": bool,
}


def validate_summary(doc: dict) -> None:
    """Check a simulate summary document against the documented schema."""
    if set(doc) != set(_SUMMARY_KEYS):
        raise ValueError(
            f"summary keys {sorted(doc)} do not match schema {sorted(_SUMMARY_KEYS)}"
        )
    for key, kind in _SUMMARY_KEYS.items():
        value = doc[key]
        if kind is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        else:
            ok = isinstance(value, kind)
        if not ok:
            raise ValueError(f"summary field {key!r} has wrong type {type(value).__name__}")


def _run_simulation(cfg: ExperimentConfig):
    if cfg.initial_state is None:
        raise ConfigError("config.initial_state: required for simulation")
    net = cfg.network()
    started = time.perf_counter()
    traj = integrate(net, cfg.initial_state, cfg.dt, cfg.t_end, cfg.method)
    elapsed = time.perf_counter() - started
    summary = {
        "command": "simulate",
        "method": traj.method,
        "dt": traj.dt,
        "t_end": cfg.t_end,
        "steps": len(traj.times) - 1,
        "node_count": traj.node_count,
        "dimension": traj.dim,
        **synchronization_summary(traj),
    }
    return traj, summary, elapsed


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj, summary, elapsed = _run_simulation(cfg)
    validate_summary(summary)

    csv_path = out_dir / cfg.outputs.csv
    tmp = csv_path.with_name(csv_path.name + ".tmp")
    write_trajectory_csv(traj, tmp, stride=cfg.outputs.stride)
    os.replace(tmp, csv_path)

    _write_atomic(out_dir / cfg.outputs.summary, _dump_json(summary))
    svg = line_chart_svg(
        traj.times[:: cfg.outputs.stride],
        traj.e_tot()[:: cfg.outputs.stride],
        title="total synchronization error",
        x_label="t",
        y_label="e_tot",
        log_y=cfg.outputs.log_plot,
    )
    _write_atomic(out_dir / cfg.outputs.plot, svg)
    print(f"simulate: {summary['steps']} steps in {elapsed:.2f}s "
          f"(synchronized={summary['synchronized']})", file=sys.stderr)
    return 0


def cmd_certify(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cert = certify_network(
        cfg.network(), args.radius, quad_mode=args.quad_mode,
        samples=args.samples, seed=args.seed,
    )
    doc = {
        "command": "certify",
        "quad_mode": args.quad_mode,
        "samples": args.samples,
        "seed": args.seed,
        **certificate_to_dict(cert),
    }
    _write_atomic(out_dir / args.output, _dump_json(doc))
    print(f"certify: c_star={cert.c_star:.6g} c_d_star={cert.c_d_star:.6g}",
          file=sys.stderr)
    return 0


def _sweep_row(raw_config: dict, param: str, value: float) -> dict:
    """One sweep run; also the process-pool worker, so it re-parses the config."""
    raw = json.loads(json.dumps(raw_config))
    raw["gains"][param] = value
    row = {"value": value, "e_tot_final": "", "e_tot_tail_max": "",
           "synchronized": "", "error": ""}
    try:
        _, summary, _ = _run_simulation(parse_config(raw))
        row["e_tot_final"] = repr(summary["e_tot_final"])
        row["e_tot_tail_max"] = repr(summary["e_tot_tail_max"])
        row["synchronized"] = "true" if summary["synchronized"] else "false"
    except (ConfigError, BlowUpError, FieldEvaluationError, ValueError, RuntimeError) as err:
        row["error"] = str(err)
    return row


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if cfg.initial_state is None:
        raise ConfigError("config.initial_state: required for sweep")
    values = [
        _number(v, f"--values[{k}]") for k, v in enumerate(_parse_values(args.values))
    ]
    if not values:
        raise ConfigError("--values: expected at least one number")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, [cfg.raw] * len(values),
                                 [args.param] * len(values), values))
    else:
        rows = [_sweep_row(cfg.raw, args.param, v) for v in values]

    lines = ["value,e_tot_final,e_tot_tail_max,synchronized,error"]
    for row in rows:
        error = row["error"].replace('"', "'")
        cell = f'"{error}"' if error else ""
        lines.append(f"{row['value']!r},{row['e_tot_final']},{row['e_tot_tail_max']},"
                     f"{row['synchronized']},{cell}")
    _write_atomic(out_dir / args.output, "\n".join(lines) + "\n")

    failures = sum(1 for row in rows if row["error"])
    print(f"sweep: {len(rows) - failures}/{len(rows)} runs succeeded", file=sys.stderr)
    return 3 if failures == len(rows) else 0


def _parse_values(spec: str) -> list:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    out = []
    for p in parts:
        try:
            out.append(float(p))
        except ValueError:
            raise ConfigError(f"--values: {p!r} is not a number") from None
    return out


def cmd_bound(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    net = cfg.network()
    radii = _parse_values(args.radii)
    if not radii or any(r <= 0 for r in radii):
        raise ConfigError("--radii: expected positive numbers")
    if args.per_radius < 1:
        raise ConfigError("--per-radius: must be >= 1")
    if not 0 < args.tail_fraction <= 1:
        raise ConfigError("--tail-fraction: must be in (0, 1]")
    batch = default_ic_batch(net, seed=args.seed, radii=radii, per_radius=args.per_radius)
    estimate = estimate_ultimate_bound(net, batch, cfg.dt, cfg.t_end, args.tail_fraction)
    doc = {
        "command": "bound",
        "radius": estimate.radius,
        "tail_window": estimate.tail_window,
        "tail_fraction": estimate.tail_fraction,
        "ic_count": estimate.ic_count,
        "per_ic_sup": list(estimate.per_ic_sup),
        "dt": estimate.dt,
        "t_end": estimate.t_end,
        "radii": radii,
        "per_radius": args.per_radius,
        "seed": args.seed,
    }
    _write_atomic(out_dir / args.output, _dump_json(doc))
    print(f"bound: radius={estimate.radius:.6g} over {estimate.ic_count} runs",
          file=sys.stderr)
    return 0


def _graph_report(g: Graph) -> dict:
    connected = is_connected(g)
    try:
        density = minimum_density(g)
    except GraphValidationError:
        density = None
    return {
        "node_count": g.node_count,
        "edge_count": g.edge_count,
        "connected": connected,
        "lambda2": algebraic_connectivity(g),
        "minimum_density": density,
    }


def cmd_graph_info(args) -> int:
    cfg = load_config(args.config)
    doc = {"graph": _graph_report(cfg.graph), "graph_d": _graph_report(cfg.graph_d)}
    print(_dump_json(doc), end="")
    return 0


# ---------------------------------------------------------------------------
# argument parsing / entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetsync",
        description="Simulate and certify synchronization of coupled "
                    "heterogeneous oscillator networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled estimators")
        p.add_argument("--workers", type=int, default=1, help="parallel worker limit")

    p = sub.add_parser("simulate", help="integrate the network and write artifacts")
    common(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("certify", help="compute the critical-gain certificate")
    common(p)
    p.add_argument("--radius", type=float, required=True, help="working ball radius")
    p.add_argument("--quad-mode", choices=("prop2", "sampled"), default="prop2")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--output", default="certificate.json")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("sweep", help="rerun the config over a list of gain values")
    common(p)
    p.add_argument("--param", choices=("c", "c_d"), required=True)
    p.add_argument("--values", required=True, help="comma-separated gain values")
    p.add_argument("--output", default="sweep.csv")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("bound", help="estimate the empirical attractor radius")
    common(p)
    p.add_argument("--radii", default="1,2,4,8", help="comma-separated IC sphere radii")
    p.add_argument("--per-radius", type=int, default=2)
    p.add_argument("--tail-fraction", type=float, default=0.5)
    p.add_argument("--output", default="bound.json")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("graph-info", help="print connectivity and spectral info")
    common(p)
    p.set_defaults(handler=cmd_graph_info)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (BlowUpError, FieldEvaluationError, NotSynchronizedError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except (ConfigError, GraphValidationError, HypothesisViolationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
