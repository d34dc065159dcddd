"""Matrix measures and one-sided quadratic (QUAD-type) bounds on vector fields.

The sampled estimators here are certified-by-sampling, not rigorous: they are
deterministic given a seed, report what they explored, and deliver lower
bounds (for the quadratic increment constant) or empirical maxima (for the
field mismatch vector).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

VectorField = Callable[[np.ndarray], np.ndarray]

DEFAULT_SAMPLE_COUNT = 100_000


class FieldEvaluationError(RuntimeError):
    """A vector field returned a non-finite value; carries the input sample."""

    def __init__(self, message: str, sample: np.ndarray):
        super().__init__(message)
        self.sample = np.array(sample)


def _as_square(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def mu_inf_minus(a) -> float:
    """Row diagonal-dominance measure: min_i (A_ii - sum_{j!=i} |A_ij|)."""
    m = _as_square(a)
    off = np.abs(m).sum(axis=1) - np.abs(np.diag(m))
    return float(np.min(np.diag(m) - off))


def sym_part(a) -> np.ndarray:
    """Symmetric part (A + A^T) / 2."""
    m = _as_square(a)
    return (m + m.T) / 2.0


def lambda_min_sym(a) -> float:
    """Smallest eigenvalue of the symmetric part of A."""
    return float(np.linalg.eigvalsh(sym_part(a))[0])


def spectral_norm(a) -> float:
    """Largest singular value of A."""
    return float(np.linalg.norm(_as_square(a), 2))


@dataclass(frozen=True)
class JacobianBounds:
    """Entrywise bounds on a Jacobian over the ball ||x|| <= radius.

    ``entries[i][i]`` upper-bounds df_i/dx_i (signed) and ``entries[i][j]``
    upper-bounds |df_i/dx_j| for i != j; all entries are nonnegative.
    """

    entries: np.ndarray
    radius: float

    def __post_init__(self):
        m = _as_square(self.entries)
        if np.any(m < 0):
            raise ValueError("Jacobian bound entries must be nonnegative")
        if not self.radius > 0:
            raise ValueError("region radius must be positive")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "radius", float(self.radius))


def quad_from_jacobian_bounds(s: JacobianBounds) -> np.ndarray:
    """Diagonal Q with Q_ii = S_ii + sum_{j!=i} (S_ij + S_ji)/2.

    A field whose Jacobian obeys ``s`` on the region satisfies the one-sided
    quadratic increment bound (v1-v2)^T (f(v1)-f(v2)) <= (v1-v2)^T Q (v1-v2)
    there.
    """
    m = s.entries
    off = (m + m.T).sum(axis=1) - 2.0 * np.diag(m)
    return np.diag(np.diag(m) + off / 2.0)


def _check_finite(values: np.ndarray, samples: np.ndarray) -> None:
    finite = np.isfinite(values).all(axis=tuple(range(1, values.ndim)))
    if not finite.all():
        bad = int(np.argmin(finite))
        raise FieldEvaluationError(
            f"vector field returned a non-finite value at sample {samples[bad]}",
            samples[bad],
        )


def _eval_batch(field: VectorField, points: np.ndarray) -> np.ndarray:
    """Evaluate ``field`` on rows of ``points`` (k, n) -> (k, n).

    Tries one broadcast call first; falls back to a row loop when the field
    does not handle batched input.
    """
    k, n = points.shape
    try:
        out = np.asarray(field(points), dtype=float)
        if out.shape == (k, n) and np.allclose(
            out[0], np.asarray(field(points[0]), dtype=float), equal_nan=True
        ):
            return out
    except Exception:
        pass
    out = np.empty((k, n))
    for row in range(k):
        out[row] = field(points[row])
    return out


def _ball_samples(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    """Uniform draws from the closed ball of the given radius."""
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def _sphere_samples(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return radius * directions


def estimate_quad_sampled(
    field: VectorField,
    dim: int,
    radius: float,
    pair_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
) -> float:
    """Sampled scalar quadratic-increment constant of ``field`` on a ball.

    Returns the max over sampled pairs (v1, v2), ||v1||,||v2|| <= radius, of
    (v1-v2)^T (f(v1)-f(v2)) / ||v1-v2||^2 -- a lower bound on the tightest
    scalar q with (v1-v2)^T (f(v1)-f(v2)) <= q ||v1-v2||^2 on the ball.

    Half the pairs are independent draws; half are short-separation pairs,
    which probe the local symmetric-Jacobian extremes that dominate the
    supremum for smooth fields. Deterministic given ``seed``.
    """
    if pair_count < 1:
        raise ValueError("pair_count must be >= 1")
    if not radius > 0:
        raise ValueError("radius must be positive")
    rng = np.random.default_rng(seed)

    n_far = pair_count // 2
    n_near = pair_count - n_far
    v1_far = _ball_samples(rng, n_far, dim, radius)
    v2_far = _ball_samples(rng, n_far, dim, radius)
    # Short-separation pairs: base point kept off the boundary so the
    # perturbed point stays inside the ball.
    margin = 1e-3
    base = _ball_samples(rng, n_near, dim, radius * (1.0 - margin))
    steps = _sphere_samples(rng, n_near, dim, 1.0)
    eps = radius * margin * rng.random(n_near)[:, None]
    v1 = np.vstack([v1_far, base])
    v2 = np.vstack([v2_far, base + eps * steps])

    f1 = _eval_batch(field, v1)
    _check_finite(f1, v1)
    f2 = _eval_batch(field, v2)
    _check_finite(f2, v2)

    diff = v1 - v2
    norms_sq = np.einsum("ij,ij->i", diff, diff)
    valid = norms_sq > 0
    ratios = np.einsum("ij,ij->i", diff[valid], (f1 - f2)[valid]) / norms_sq[valid]
    return float(np.max(ratios))


def estimate_mismatch_bound(
    fields: Sequence[VectorField],
    dim: int,
    radius: float,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
) -> np.ndarray:
    """Componentwise bound m on |f_i(avg state) - average field| over a ball.

    Samples stacked states x = (x_1, ..., x_N) with ||x|| <= radius and
    returns the componentwise max over samples and i of

        | f_i(mean_j x_j) - (1/N) sum_j f_j(x_j) |.

    The sample mix combines uniform draws from the stacked ball, draws from
    its boundary sphere, single-node boundary draws (all mass on one node's
    block, where the mismatch typically peaks), and deterministic
    coordinate-extreme probes at +-radius e_k. Deterministic given ``seed``.
    """
    if not fields:
        raise ValueError("need at least one vector field")
    if not radius > 0:
        raise ValueError("radius must be positive")
    n_models = len(fields)
    stacked_dim = n_models * dim
    rng = np.random.default_rng(seed)

    probes = np.vstack([radius * np.eye(stacked_dim), -radius * np.eye(stacked_dim)])
    remaining = max(sample_count - len(probes), 0)
    n_ball = remaining // 2
    n_sphere = (remaining - n_ball) // 2
    n_block = remaining - n_ball - n_sphere

    blocks = np.zeros((n_block, stacked_dim))
    if n_block:
        node_for = np.arange(n_block) % n_models
        local = _sphere_samples(rng, n_block, dim, radius)
        for k in range(n_models):
            rows = node_for == k
            blocks[rows, k * dim : (k + 1) * dim] = local[rows]

    samples = np.vstack(
        [
            probes,
            _ball_samples(rng, n_ball, stacked_dim, radius),
            _sphere_samples(rng, n_sphere, stacked_dim, radius),
            blocks,
        ]
    )

    per_node = samples.reshape(-1, n_models, dim)
    averages = per_node.mean(axis=1)

    mean_field = np.zeros_like(averages)
    at_average = []
    for i, field in enumerate(fields):
        f_own = _eval_batch(field, per_node[:, i, :])
        _check_finite(f_own, per_node[:, i, :])
        mean_field += f_own
        f_avg = _eval_batch(field, averages)
        _check_finite(f_avg, averages)
        at_average.append(f_avg)
    mean_field /= n_models

    m = np.zeros(dim)
    for f_avg in at_average:
        np.maximum(m, np.abs(f_avg - mean_field).max(axis=0), out=m)
    return m


def semipassivity_residual(h: Callable[[np.ndarray], float], field: VectorField, x) -> float:
    """Residual x^T f(x) + h(x) of the quadratic-storage dissipation identity.

    Zero certifies that V(x) = ||x||^2 / 2 satisfies dV/dt = -h(x) + x^T u
    along the uncoupled dynamics at the point x.
    """
    x = np.asarray(x, dtype=float)
    return float(x @ np.asarray(field(x), dtype=float) + h(x))
