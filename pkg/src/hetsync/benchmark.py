"""The bundled demo: three heterogeneous relaxation oscillators, all-to-all.

Reference quantities for this network (independently recomputed by the test
suite): with the working ball radius 7.72 and the injected quadratic bound
11.58, the gain thresholds are c_star = 3.86 and c_d_star = 119.93; the
mismatch bound satisfies ||m||_inf ~ 180.
"""

from __future__ import annotations

import numpy as np

from .dynamics import make_vdp
from .graph import complete_graph
from .simulate import NetworkSystem, make_network

#: Damping/limiting parameters shared by the three oscillators.
EPSILON = 0.01
ETA = 0.001
#: Per-node nonlinearity strengths (the source of heterogeneity).
MU_VALUES = (1.0, 2.0, 3.0)

#: Stacked initial state used by the bundled simulate configs.
INITIAL_STATE = np.array([1.5, 1.5, 1.75, 1.75, 2.0, 2.0])

#: Empirical attractor radius of the coupled benchmark (stacked norm).
BOUND_RADIUS = 7.72

#: Gains used by the bundled runs: linear-only vs linear + sign coupling.
GAIN_C = 4.0
GAIN_CD = 120.0


def reference_network(c: float = GAIN_C, c_d: float = GAIN_CD) -> NetworkSystem:
    """Three oscillators with mu = 1, 2, 3 on complete graphs, identity matrices."""
    models = [make_vdp(mu, EPSILON, ETA) for mu in MU_VALUES]
    k3 = complete_graph(len(models))
    return make_network(models, k3, k3, c=c, c_d=c_d)
