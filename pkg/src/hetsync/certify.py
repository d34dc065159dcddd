"""Critical coupling gains and end-to-end gain certificates.

The two thresholds are

    c_star   = max_i ||Q_i||_2 / (lambda2(L) * lambda_min(sym P @ Gamma))
    c_d_star = || |P| @ m ||_inf / (delta(G_d) * mu_inf_minus(P @ Gamma_d))

where Q_i is a quadratic-increment bound matrix for node i on the working
ball, lambda2 is the algebraic connectivity of the linear layer, delta the
minimum density of the sign layer, and m the componentwise bound on the
node-vs-average field mismatch over the ball. Running the linear gain above
c_star and the sign gain at or above c_d_star guarantees asymptotic
synchronization (the thresholds are conservative).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import algebraic_connectivity, is_connected, minimum_density
from .measures import (
    DEFAULT_SAMPLE_COUNT,
    estimate_mismatch_bound,
    estimate_quad_sampled,
    lambda_min_sym,
    mu_inf_minus,
    quad_from_jacobian_bounds,
    spectral_norm,
)
from .simulate import NetworkSystem


class HypothesisViolationError(ValueError):
    """A precondition of the gain formulas does not hold for this network."""


@dataclass(frozen=True)
class GainCertificate:
    """All intermediate quantities behind a (c_star, c_d_star) pair.

    ``max_q_norm`` is the raw per-node maximum (signed when the sampled
    estimator reports a contraction); c_star clamps negative numerators to 0.
    ``provenance`` records which estimator produced each quantity.
    """

    q_matrices: tuple[np.ndarray, ...]
    max_q_norm: float
    lambda2: float
    lambda_min_sym_pgamma: float
    m: np.ndarray
    big_m: float
    delta: float
    mu_pgd: float
    c_star: float
    c_d_star: float
    radius: float
    provenance: dict[str, str]


def critical_gains(
    max_q_norm: float,
    lambda2: float,
    p,
    gamma,
    m,
    delta: float,
    gamma_d,
) -> tuple[float, float]:
    """Evaluate both gain thresholds from their ingredients.

    Raises :class:`HypothesisViolationError` naming the violated hypothesis
    when a denominator is not positive. A nonpositive ``max_q_norm`` (all
    nodes contracting) clamps c_star to 0.
    """
    p = np.asarray(p, dtype=float)
    m = np.asarray(m, dtype=float)
    if lambda2 <= 0:
        raise HypothesisViolationError("G disconnected: lambda2(L) <= 0")
    if delta <= 0:
        raise HypothesisViolationError("G_d disconnected: minimum density <= 0")
    lam_min = lambda_min_sym(p @ np.asarray(gamma, dtype=float))
    if lam_min <= 0:
        raise HypothesisViolationError("sym(P @ Gamma) not positive definite")
    mu = mu_inf_minus(p @ np.asarray(gamma_d, dtype=float))
    if mu <= 0:
        raise HypothesisViolationError("mu_inf_minus(P @ Gamma_d) <= 0")
    c_star = max(max_q_norm, 0.0) / (lambda2 * lam_min)
    big_m = float(np.max(np.abs(p) @ m)) if m.size else 0.0
    c_d_star = big_m / (delta * mu)
    return c_star, c_d_star


def certify_network(
    net: NetworkSystem,
    radius: float,
    quad_mode: str = "prop2",
    samples: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
) -> GainCertificate:
    """Compute a full gain certificate for a network over the ball ||x|| <= radius.

    ``quad_mode`` selects the per-node quadratic-increment bound: "prop2"
    derives a diagonal Q_i from each model's analytic Jacobian bounds;
    "sampled" estimates a scalar q_i by pair sampling (valid for p =
    identity only). The mismatch vector m is always estimated by sampling
    over the stacked ball of the given radius.
    """
    if quad_mode not in ("prop2", "sampled"):
        raise ValueError(f"unknown quad_mode {quad_mode!r}")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if not is_connected(net.graph):
        raise HypothesisViolationError("G disconnected")
    if not is_connected(net.graph_d):
        raise HypothesisViolationError("G_d disconnected")
    dim = net.dimension

    q_matrices: list[np.ndarray] = []
    if quad_mode == "prop2":
        for i, model in enumerate(net.models):
            if model.jacobian_bounds is None:
                raise ValueError(
                    f"model {i} has no jacobian_bounds; required for quad_mode='prop2'"
                )
            q_matrices.append(quad_from_jacobian_bounds(model.jacobian_bounds(radius)))
        max_q_norm = max(spectral_norm(q) for q in q_matrices)
        q_provenance = f"prop2(radius={radius:g})"
    else:
        if not np.allclose(net.p, np.eye(dim)):
            raise ValueError("quad_mode='sampled' certifies p = identity only")
        q_values = [
            estimate_quad_sampled(
                _frozen_time_field(model.field), dim, radius, samples, seed + i
            )
            for i, model in enumerate(net.models)
        ]
        q_matrices = [q * np.eye(dim) for q in q_values]
        max_q_norm = max(q_values)
        q_provenance = f"sampled(seed={seed}, count={samples})"

    lambda2 = algebraic_connectivity(net.graph)
    delta = minimum_density(net.graph_d)
    fields = [_frozen_time_field(model.field) for model in net.models]
    m = estimate_mismatch_bound(fields, dim, radius, samples, seed)

    c_star, c_d_star = critical_gains(
        max_q_norm, lambda2, net.p, net.gamma, m, delta, net.gamma_d
    )
    return GainCertificate(
        q_matrices=tuple(q_matrices),
        max_q_norm=float(max_q_norm),
        lambda2=lambda2,
        lambda_min_sym_pgamma=lambda_min_sym(net.p @ net.gamma),
        m=m,
        big_m=float(np.max(np.abs(net.p) @ m)) if m.size else 0.0,
        delta=delta,
        mu_pgd=mu_inf_minus(net.p @ net.gamma_d),
        c_star=float(c_star),
        c_d_star=float(c_d_star),
        radius=float(radius),
        provenance={
            "q": q_provenance,
            "lambda2": "dense-eigensolve",
            "delta": "exact-bipartition-enumeration",
            "m": f"sampled(seed={seed}, count={samples})",
        },
    )


def _frozen_time_field(field):
    def frozen(x, _field=field):
        return _field(x, 0.0)

    return frozen


def certificate_to_dict(cert: GainCertificate) -> dict:
    """Serialize a certificate with stable key names (for JSON artifacts)."""
    return {
        "c_star": cert.c_star,
        "c_d_star": cert.c_d_star,
        "max_q_norm": cert.max_q_norm,
        "lambda2": cert.lambda2,
        "lambda_min_sym_pgamma": cert.lambda_min_sym_pgamma,
        "mu_pgd": cert.mu_pgd,
        "delta": cert.delta,
        "big_m": cert.big_m,
        "m": [float(v) for v in cert.m],
        "radius": cert.radius,
        "q_norms": [spectral_norm(q) for q in cert.q_matrices],
        "q_matrices": [[[float(v) for v in row] for row in q] for q in cert.q_matrices],
        "provenance": dict(cert.provenance),
    }
