"""A single media source that argues back.

Instead of broadcasting a fixed opinion, the source joins the network as an
ordinary FJ node: innate opinion s_M = min((1+gamma) * mean(s), 1), connected
to every node i by an edge of weight beta * (1 + d_i).  Sum conservation on
the augmented graph then caps the influence hard:

    sum(z) + z_M = sum(s) + s_M   =>   sum(z) <= (1 + (1+gamma)/n) * sum(s)

so a persuadable source moves the total by at most a 1/n-sized factor, versus
the n-independent gain a stubborn source achieves.  Only full attachment
(alpha = 1) is modelled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fj import opinion_vector
from .graph import Graph
from .media import MediaConfig
from .numerics import DiagPlusLaplacianOperator, solve_spd

__all__ = ["AugmentedInstance", "augment_with_source", "nonstubborn_equilibrium"]


@dataclass(frozen=True)
class AugmentedInstance:
    """The (n+1)-node FJ instance: base graph + one persuadable source."""

    base: Graph
    media_edge_weights: np.ndarray
    s_M: float

    def __post_init__(self) -> None:
        w = np.asarray(self.media_edge_weights, dtype=np.float64).ravel()
        if w.shape != (self.base.n,):
            raise ValueError("need one media edge weight per base node")
        if np.any(w < 0):
            raise ValueError("media edge weights must be >= 0")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "media_edge_weights", w)

    def build_graph(self) -> Graph:
        """Materialise the augmented graph; source gets id n."""
        n = self.base.n
        keep = self.media_edge_weights > 0.0  # zero-weight edges are no edges
        src_u = np.nonzero(keep)[0].astype(np.int64)
        return Graph(
            n + 1,
            np.concatenate([self.base.edge_u, src_u]),
            np.concatenate([self.base.edge_v, np.full(src_u.size, n, dtype=np.int64)]),
            np.concatenate([self.base.edge_w, self.media_edge_weights[keep]]),
        )


def augment_with_source(graph: Graph, beta: float, s_M: float) -> AugmentedInstance:
    if not (np.isfinite(beta) and beta >= 0.0):
        raise ValueError("beta must be >= 0")
    if not 0.0 <= s_M <= 1.0:
        raise ValueError("s_M must lie in [0, 1]")
    return AugmentedInstance(base=graph,
                             media_edge_weights=beta * (1.0 + graph.degree),
                             s_M=float(s_M))


def nonstubborn_equilibrium(graph: Graph, s: np.ndarray, config: MediaConfig,
                            tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Equilibrium with one non-stubborn source; returns (node opinions, z_M*).

    Builds the (n+1)-node instance and solves plain FJ on it.  Rejects
    alpha != 1: the single-source analysis assumes everyone listens to M.
    """
    if config.alpha != 1.0:
        raise ValueError("non-stubborn mode requires alpha = 1")
    s = opinion_vector(s, graph.n)
    s_M = min((1.0 + config.gamma) * float(s.mean()), 1.0)
    inst = augment_with_source(graph, config.beta, s_M)
    aug = inst.build_graph()
    s_aug = np.concatenate([s, [s_M]])
    op = DiagPlusLaplacianOperator(aug, np.ones(aug.n))
    z = solve_spd(op, s_aug, tol=tol).solution
    return z[:graph.n], float(z[graph.n])
