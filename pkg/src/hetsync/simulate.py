"""Coupled-network assembly and fixed-step integration through the sign terms.

The coupling law per node is

    u_i = -c   * sum_j L_ij   * Gamma   @ (x_j - x_i)
          -c_d * sum_j L^d_ij * Gamma_d @ sign(x_j - x_i)

with componentwise sign and sign(0) = 0, so the coupling vanishes on the
synchronization manifold. The right-hand side is discontinuous across the
per-edge sign surfaces; small-step explicit Euler is the default integrator
(high-order methods lose their order there), with RK4 available for smooth
(c_d = 0) comparisons. Chattering around the surfaces has amplitude of order
c_d * ||Gamma_d|| * dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import NodeModel, average_field, split_state
from .graph import Graph, incidence, laplacian

#: A run counts as synchronized when e_tot stays below this over the tail.
SYNC_THRESHOLD = 0.05
#: Fraction of the run treated as the tail for the synchronized verdict.
SYNC_TAIL_FRACTION = 0.2

_BLOWUP_CHECK_PERIOD = 256


class BlowUpError(RuntimeError):
    """Integration produced a non-finite state; carries the first bad time."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class NotSynchronizedError(RuntimeError):
    """The trajectory is not synchronized where the check requires it."""


@dataclass(frozen=True)
class NetworkSystem:
    """N node models coupled through two graphs with gains (c, c_d).

    ``gamma``/``gamma_d`` are the inner coupling matrices of the linear and
    sign layers; ``p`` is the quadratic-form matrix used by certification.
    Immutable after construction; safe to share across workers.
    """

    models: tuple[NodeModel, ...]
    graph: Graph
    graph_d: Graph
    c: float
    c_d: float
    gamma: np.ndarray
    gamma_d: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        if not self.models:
            raise ValueError("network needs at least one node model")
        dim = self.models[0].dimension
        if any(m.dimension != dim for m in self.models):
            raise ValueError("all node models must share one state dimension")
        n_nodes = len(self.models)
        for label, g in (("graph", self.graph), ("graph_d", self.graph_d)):
            if g.node_count != n_nodes:
                raise ValueError(
                    f"{label} has {g.node_count} nodes but there are {n_nodes} models"
                )
        if not (np.isfinite(self.c) and self.c >= 0):
            raise ValueError("c must be finite and >= 0")
        if not (np.isfinite(self.c_d) and self.c_d >= 0):
            raise ValueError("c_d must be finite and >= 0")
        for label, mat in (("gamma", self.gamma), ("gamma_d", self.gamma_d), ("p", self.p)):
            m = np.asarray(mat, dtype=float)
            if m.shape != (dim, dim) or not np.all(np.isfinite(m)):
                raise ValueError(f"{label} must be a finite {dim}x{dim} matrix")
            object.__setattr__(self, label, m)
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "c_d", float(self.c_d))

    @property
    def node_count(self) -> int:
        return len(self.models)

    @property
    def dimension(self) -> int:
        return self.models[0].dimension


def make_network(
    models: Sequence[NodeModel],
    graph: Graph,
    graph_d: Graph,
    c: float,
    c_d: float,
    gamma=None,
    gamma_d=None,
    p=None,
) -> NetworkSystem:
    """Build a :class:`NetworkSystem`; coupling matrices default to identity."""
    dim = models[0].dimension if models else 0
    eye = np.eye(dim)
    return NetworkSystem(
        models=tuple(models),
        graph=graph,
        graph_d=graph_d,
        c=c,
        c_d=c_d,
        gamma=eye if gamma is None else gamma,
        gamma_d=eye if gamma_d is None else gamma_d,
        p=eye if p is None else p,
    )


def coupling_input(i: int, x_bar, net: NetworkSystem) -> np.ndarray:
    """Coupling input u_i at node i for the stacked state, per the node-wise sums."""
    states = split_state(x_bar, net.node_count, net.dimension)
    if not 0 <= i < net.node_count:
        raise ValueError(f"node index {i} out of range")
    lap = laplacian(net.graph)
    lap_d = laplacian(net.graph_d)
    u = np.zeros(net.dimension)
    for j in range(net.node_count):
        diff = states[j] - states[i]
        u -= net.c * lap[i, j] * (net.gamma @ diff)
        u -= net.c_d * lap_d[i, j] * (net.gamma_d @ np.sign(diff))
    return u


def stacked_coupling(x_bar, net: NetworkSystem) -> np.ndarray:
    """All coupling inputs at once, rows u_i, as an (N, dim) array.

    Equals :func:`coupling_input` row by row; vectorized via L @ X for the
    linear layer and the incidence matrix for the sign layer.
    """
    states = split_state(x_bar, net.node_count, net.dimension)
    u = np.zeros_like(states)
    if net.c:
        u -= net.c * (laplacian(net.graph) @ states) @ net.gamma.T
    if net.c_d and net.graph_d.edge_count:
        b = incidence(net.graph_d)
        u -= net.c_d * (b @ np.sign(b.T @ states)) @ net.gamma_d.T
    return u


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution of the coupled network.

    ``states[k]`` is the stacked state at ``times[k] = k * dt``.
    """

    times: np.ndarray
    states: np.ndarray
    dt: float
    method: str
    node_count: int
    dim: int

    def node_states(self) -> np.ndarray:
        """States reshaped to (samples, node_count, dim)."""
        return self.states.reshape(len(self.times), self.node_count, self.dim)

    def averages(self) -> np.ndarray:
        """Per-sample average state, shape (samples, dim)."""
        return self.node_states().mean(axis=1)

    def e_tot(self) -> np.ndarray:
        """Per-sample total synchronization error (1/N) sum_i ||x_i - avg||."""
        per_node = self.node_states()
        errors = per_node - self.averages()[:, None, :]
        return np.linalg.norm(errors, axis=2).mean(axis=1)


def _first_bad_time(states: np.ndarray, times: np.ndarray, upto: int) -> float:
    finite = np.isfinite(states[: upto + 1]).all(axis=1)
    return float(times[int(np.argmin(finite))])


def integrate(net: NetworkSystem, x0, dt: float, t_end: float, method: str = "euler") -> Trajectory:
    """Integrate the coupled network with a fixed step from t = 0 to t_end.

    ``method`` is "euler" (default, appropriate for c_d > 0) or "rk4".
    Raises :class:`BlowUpError` naming the first non-finite sample time.
    """
    if method not in ("euler", "rk4"):
        raise ValueError(f"unknown method {method!r}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < dt:
        raise ValueError("t_end must be at least dt")
    n_nodes, dim = net.node_count, net.dimension
    x = split_state(x0, n_nodes, dim).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("initial state must be finite")

    steps = int(round(t_end / dt))
    times = np.arange(steps + 1) * dt
    out = np.empty((steps + 1, n_nodes * dim))
    out[0] = x.reshape(-1)

    fields = [m.field for m in net.models]
    c, c_d = net.c, net.c_d
    lap = laplacian(net.graph) if c else None
    gamma_t = net.gamma.T
    b = incidence(net.graph_d) if (c_d and net.graph_d.edge_count) else None
    b_t = b.T if b is not None else None
    gamma_d_t = net.gamma_d.T
    f_buf = np.empty_like(x)

    def rhs(state: np.ndarray, t: float) -> np.ndarray:
        for idx, f in enumerate(fields):
            f_buf[idx] = f(state[idx], t)
        if lap is not None:
            f_buf -= c * (lap @ state) @ gamma_t
        if b is not None:
            f_buf -= c_d * (b @ np.sign(b_t @ state)) @ gamma_d_t
        return f_buf

    with np.errstate(over="ignore", invalid="ignore"):
        if method == "euler":
            for k in range(steps):
                x += dt * rhs(x, times[k])
                out[k + 1] = x.reshape(-1)
                if k % _BLOWUP_CHECK_PERIOD == 0 and not np.isfinite(x).all():
                    bad = _first_bad_time(out, times, k + 1)
                    raise BlowUpError(f"state became non-finite at t = {bad:g}", bad)
        else:
            half = dt / 2.0
            sixth = dt / 6.0
            for k in range(steps):
                t = times[k]
                k1 = rhs(x, t).copy()
                k2 = rhs(x + half * k1, t + half).copy()
                k3 = rhs(x + half * k2, t + half).copy()
                k4 = rhs(x + dt * k3, t + dt)
                x += sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                out[k + 1] = x.reshape(-1)
                if k % _BLOWUP_CHECK_PERIOD == 0 and not np.isfinite(x).all():
                    bad = _first_bad_time(out, times, k + 1)
                    raise BlowUpError(f"state became non-finite at t = {bad:g}", bad)

    if not np.isfinite(out).all():
        bad = _first_bad_time(out, times, steps)
        raise BlowUpError(f"state became non-finite at t = {bad:g}", bad)
    return Trajectory(
        times=times, states=out, dt=float(dt), method=method, node_count=n_nodes, dim=dim
    )


def synchronization_summary(
    traj: Trajectory,
    threshold: float = SYNC_THRESHOLD,
    tail_fraction: float = SYNC_TAIL_FRACTION,
) -> dict:
    """Tail statistics of e_tot and the synchronized verdict for a run."""
    e = traj.e_tot()
    tail_start = int(np.floor(len(e) * (1.0 - tail_fraction)))
    tail = e[tail_start:]
    return {
        "e_tot_final": float(e[-1]),
        "e_tot_tail_max": float(tail.max()),
        "e_tot_tail_min": float(tail.min()),
        "tail_start_time": float(traj.times[tail_start]),
        "threshold": float(threshold),
        "synchronized": bool(tail.max() < threshold),
    }


@dataclass(frozen=True)
class BoundEstimate:
    """Empirical attractor radius from a batch of integrated trajectories.

    ``radius`` is the max over the batch of the tail-window sup of the
    stacked-state norm ||x(t)||.
    """

    radius: float
    tail_window: float
    ic_count: int
    per_ic_sup: tuple[float, ...]
    dt: float
    t_end: float
    tail_fraction: float


def estimate_ultimate_bound(
    net: NetworkSystem,
    ic_batch: Sequence[np.ndarray],
    dt: float,
    t_end: float,
    tail_fraction: float = 0.5,
) -> BoundEstimate:
    """Integrate each initial condition and bound the tail-window state norm."""
    if not len(ic_batch):
        raise ValueError("initial-condition batch must be nonempty")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    sups = []
    for k, x0 in enumerate(ic_batch):
        try:
            traj = integrate(net, x0, dt, t_end)
        except BlowUpError as err:
            raise BlowUpError(f"initial condition {k}: {err}", err.time) from err
        norms = np.linalg.norm(traj.states, axis=1)
        tail_start = int(np.floor(len(norms) * (1.0 - tail_fraction)))
        sups.append(float(norms[tail_start:].max()))
    return BoundEstimate(
        radius=max(sups),
        tail_window=float(tail_fraction * t_end),
        ic_count=len(ic_batch),
        per_ic_sup=tuple(sups),
        dt=float(dt),
        t_end=float(t_end),
        tail_fraction=float(tail_fraction),
    )


def default_ic_batch(
    net: NetworkSystem,
    seed: int = 0,
    radii: Sequence[float] = (1.0, 2.0, 4.0, 8.0),
    per_radius: int = 2,
) -> list[np.ndarray]:
    """Seeded initial conditions on stacked-state spheres of the given radii."""
    rng = np.random.default_rng(seed)
    stacked_dim = net.node_count * net.dimension
    batch = []
    for r in radii:
        for _ in range(per_radius):
            direction = rng.standard_normal(stacked_dim)
            batch.append(r * direction / np.linalg.norm(direction))
    return batch


@dataclass(frozen=True)
class AverageDynamicsReport:
    """Deviation of the trajectory's average from the averaged-field solution."""

    max_deviation: float
    passed: bool
    tolerance: float
    t_start: float


def verify_average_dynamics(
    traj: Trajectory,
    models: Sequence[NodeModel],
    t_start: float,
    tol: float,
) -> AverageDynamicsReport:
    """Check that, once synchronized, the average state obeys the average field.

    From t_start the report integrates ds/dt = (1/N) sum_i f_i(s) with the
    trajectory's step and method, starting at the trajectory's average state,
    and records the max deviation ||avg(t) - s(t)|| over the remaining
    window. Passes iff the deviation stays below 10 * tol.
    """
    dt = traj.dt
    idx = int(round(t_start / dt))
    if not 0 <= idx < len(traj.times) - 1:
        raise ValueError(f"t_start {t_start:g} is not inside the trajectory")
    e_tot = traj.e_tot()
    if e_tot[idx] >= tol:
        raise NotSynchronizedError(
            f"not synchronized at t = {t_start:g}: e_tot = {e_tot[idx]:.4g} >= {tol:g}"
        )

    averages = traj.averages()
    s = averages[idx].copy()
    n_nodes = traj.node_count

    def avg_rhs(state: np.ndarray, t: float) -> np.ndarray:
        total = np.zeros_like(state)
        for model in models:
            total += model.field(state, t)
        return total / n_nodes

    max_dev = 0.0
    if traj.method == "rk4":
        half = dt / 2.0
        for k in range(idx, len(traj.times) - 1):
            t = traj.times[k]
            k1 = avg_rhs(s, t)
            k2 = avg_rhs(s + half * k1, t + half)
            k3 = avg_rhs(s + half * k2, t + half)
            k4 = avg_rhs(s + dt * k3, t + dt)
            s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            max_dev = max(max_dev, float(np.linalg.norm(averages[k + 1] - s)))
    else:
        for k in range(idx, len(traj.times) - 1):
            s = s + dt * avg_rhs(s, traj.times[k])
            max_dev = max(max_dev, float(np.linalg.norm(averages[k + 1] - s)))

    return AverageDynamicsReport(
        max_deviation=max_dev,
        passed=max_dev < 10.0 * tol,
        tolerance=float(tol),
        t_start=float(t_start),
    )


def write_trajectory_csv(traj: Trajectory, path, stride: int = 100) -> None:
    """Write `t, x_1_1, ..., x_N_n, e_tot` rows, strided, last sample included."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    e = traj.e_tot()
    indices = list(range(0, len(traj.times), stride))
    if indices[-1] != len(traj.times) - 1:
        indices.append(len(traj.times) - 1)
    header = ["t"]
    header += [f"x_{i + 1}_{k + 1}" for i in range(traj.node_count) for k in range(traj.dim)]
    header.append("e_tot")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for idx in indices:
            row = [repr(float(traj.times[idx]))]
            row += [repr(float(v)) for v in traj.states[idx]]
            row.append(repr(float(e[idx])))
            fh.write(",".join(row) + "\n")


def average_trajectory_error(traj: Trajectory) -> float:
    """Convenience: terminal e_tot of a run."""
    return float(traj.e_tot()[-1])
