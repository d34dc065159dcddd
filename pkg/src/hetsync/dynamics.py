"""Node dynamics: the vector-field contract, built-in models, and error splits.

A network state is handled in two layouts: the stacked vector x of length
N*n, and the (N, n) per-node array view. ``split_state``/``stack_states``
convert between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .measures import JacobianBounds


@dataclass(frozen=True)
class NodeModel:
    """A single agent's dynamics dx/dt = field(x, t), x in R^dimension.

    ``field`` must be pure and finite-valued on finite inputs. Built-in
    fields also accept batched input of shape (k, dimension); user fields do
    not have to. ``jacobian_bounds`` (optional) maps a ball radius to
    entrywise Jacobian bounds valid on that ball; ``stability_component``
    (optional) is the scalar h with x^T field(x) = -h(x), used by the
    dissipation residual check.
    """

    dimension: int
    field: Callable[[np.ndarray, float], np.ndarray]
    jacobian_bounds: Callable[[float], JacobianBounds] | None = None
    stability_component: Callable[[np.ndarray], float] | None = None
    name: str = ""


def make_vdp(mu: float, epsilon: float, eta: float) -> NodeModel:
    """Two-dimensional relaxation oscillator with damped first coordinate.

        dx1/dt = x2 - epsilon * x1
        dx2/dt = mu * (1 - x1^2 - eta * x2^2) * x2 - x1

    Carries analytic Jacobian bounds over ||x|| <= r (using |x1*x2| <= r^2/2)
    and the stability component h(x) = epsilon*x1^2 + mu*x2^2*(x1^2 +
    eta*x2^2 - 1), which satisfies x^T f(x) = -h(x) exactly.
    """
    mu, epsilon, eta = float(mu), float(epsilon), float(eta)

    def field(x: np.ndarray, t: float = 0.0) -> np.ndarray:
        if x.ndim == 1:
            x1 = float(x[0])
            x2 = float(x[1])
            return np.array(
                (x2 - epsilon * x1, mu * (1.0 - x1 * x1 - eta * x2 * x2) * x2 - x1)
            )
        x1 = x[..., 0]
        x2 = x[..., 1]
        return np.stack(
            (x2 - epsilon * x1, mu * (1.0 - x1 * x1 - eta * x2 * x2) * x2 - x1),
            axis=-1,
        )

    def h(x: np.ndarray) -> float:
        x1, x2 = float(x[0]), float(x[1])
        return epsilon * x1 * x1 + mu * x2 * x2 * (x1 * x1 + eta * x2 * x2 - 1.0)

    def bounds(radius: float) -> JacobianBounds:
        # df1/dx1 = -epsilon <= 0, |df1/dx2| = 1,
        # |df2/dx1| = |-2 mu x1 x2 - 1| <= mu r^2 + 1,
        # df2/dx2 = mu (1 - x1^2 - 3 eta x2^2) <= mu.
        r2 = float(radius) ** 2
        s = np.array([[0.0, 1.0], [mu * r2 + 1.0, max(mu, 0.0)]])
        return JacobianBounds(entries=s, radius=radius)

    return NodeModel(
        dimension=2,
        field=field,
        jacobian_bounds=bounds,
        stability_component=h,
        name=f"vdp(mu={mu:g}, epsilon={epsilon:g}, eta={eta:g})",
    )


#: Built-in model constructors, keyed by the name used in config files.
MODEL_REGISTRY: dict[str, Callable[..., NodeModel]] = {"vdp": make_vdp}


def build_model(name: str, params: dict) -> NodeModel:
    """Instantiate a registered model from a name and parameter map."""
    try:
        factory = MODEL_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_REGISTRY))
        raise ValueError(f"unknown model {name!r} (known: {known})") from None
    return factory(**params)


def split_state(x_bar, node_count: int, dim: int) -> np.ndarray:
    """Stacked vector of length node_count*dim -> (node_count, dim) array."""
    x_bar = np.asarray(x_bar, dtype=float)
    if x_bar.shape != (node_count * dim,):
        raise ValueError(
            f"stacked state has length {x_bar.size}, expected {node_count} * {dim}"
        )
    return x_bar.reshape(node_count, dim)


def stack_states(states) -> np.ndarray:
    """(node_count, dim) array -> stacked vector."""
    return np.asarray(states, dtype=float).reshape(-1)


@dataclass(frozen=True)
class ErrorDecomposition:
    """Average state, per-node deviations from it, and their mean norm.

    errors[i] = x_i - average; the rows sum to zero by construction and
    e_tot = (1/N) sum_i ||errors[i]||_2.
    """

    average: np.ndarray
    errors: np.ndarray
    e_tot: float


def decompose_errors(x_bar, node_count: int, dim: int) -> ErrorDecomposition:
    """Split a stacked state into average and synchronization errors."""
    states = split_state(x_bar, node_count, dim)
    average = states.mean(axis=0)
    errors = states - average
    e_tot = float(np.linalg.norm(errors, axis=1).mean())
    return ErrorDecomposition(average=average, errors=errors, e_tot=e_tot)


def average_field(models: Sequence[NodeModel], x_bar, t: float = 0.0) -> np.ndarray:
    """(1/N) sum_i f_i(x_i, t) over the stacked state x_bar."""
    if not models:
        raise ValueError("need at least one model")
    dim = models[0].dimension
    if any(m.dimension != dim for m in models):
        raise ValueError("models must share one state dimension")
    states = split_state(x_bar, len(models), dim)
    total = np.zeros(dim)
    for model, state in zip(models, states):
        total += model.field(state, t)
    return total / len(models)
