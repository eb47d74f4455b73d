"""Stubborn external media sources attached to a Friedkin-Johnsen network.

Two sources, M and M', broadcast fixed opinions during an equilibration
period.  A fraction alpha of nodes follows M, the rest follow M'.  A node i
listens to its source through an edge of weight beta*(1 + d_i), so beta
measures media strength relative to a node's total social exposure.  Source
opinions track the innate mean s_bar:

    z_M  = min((1 + gamma) * s_bar, 1)        (capped at the opinion ceiling)
    z_M' = (1 - gamma) * s_bar

With D the degree diagonal, the media-augmented equilibrium solves

    ((1 + beta) I + beta D + L) z = s + beta (I + D) zeta

where zeta_i is the opinion of the source node i follows.  The sources are
never materialised as graph nodes; they enter only through the diagonal and
the right-hand side.

Closed-form consequences implemented here:

- sum_bounds: two-sided bracket for sum(z) in the uncapped regime, collapsing
  to an exact value on d-regular graphs,
      sum(z) = (1 + gamma * beta(d+1)(2 alpha - 1) / (beta(d+1) + 1)) * sum(s)
- truncated_regular_sum: exact regular-graph sum once z_M is capped at 1,
- truncated_lower_bound: the cap never pushes the sum below
      sum(s) * (1 - gamma + alpha * gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fj import opinion_vector
from .graph import Graph, neighbor_sum
from .numerics import DiagPlusLaplacianOperator, fixed_point_iterate, solve_spd

__all__ = [
    "MediaConfig",
    "MediaAssignment",
    "SourceOpinions",
    "SumBounds",
    "assign_media",
    "source_opinions",
    "build_zeta",
    "equilibrium_with_media",
    "sum_bounds",
    "truncated_regular_sum",
    "truncated_lower_bound",
]


@dataclass(frozen=True)
class MediaConfig:
    """Media parameters: follower fraction, strength, and opinion spread.

    alpha in [0, 1], beta >= 0, gamma in [0, 1].  The closed-form bounds are
    proved for beta <= 1; larger beta still solves fine, the bracket is just
    no longer guaranteed.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not (np.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError("beta must be >= 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")


@dataclass(frozen=True)
class MediaAssignment:
    """Which nodes follow source M (the rest follow M')."""

    attached_to_M: np.ndarray
    count_M: int

    def __post_init__(self) -> None:
        mask = np.asarray(self.attached_to_M, dtype=bool).ravel()
        if int(mask.sum()) != self.count_M:
            raise ValueError("count_M does not match the mask")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "attached_to_M", mask)

    @property
    def n(self) -> int:
        return int(self.attached_to_M.size)


@dataclass(frozen=True)
class SourceOpinions:
    """Broadcast opinions for one period; ``truncated`` marks a capped z_M."""

    z_M: float
    z_Mprime: float
    truncated: bool


@dataclass(frozen=True)
class SumBounds:
    """Bracket for sum(z) after one media-augmented period.

    ``exact_if_regular`` is the closed-form value on d-regular graphs (there
    lower == upper == exact) and None otherwise.
    """

    lower: float
    upper: float
    exact_if_regular: float | None


def _round_half_away_from_zero(x: float) -> int:
    # round() would bank 2019.5 to 2020 or 2018.5 to 2018; we always go up
    return int(math.floor(x + 0.5))


def assign_media(graph: Graph, alpha: float, seed: int) -> MediaAssignment:
    """Pick round(alpha * n) nodes uniformly at random to follow M.

    Rounding is half away from zero, so alpha=0.5 on odd n favours M by one
    node.  Deterministic for a fixed seed.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    n = graph.n
    count = _round_half_away_from_zero(alpha * n)
    rng = np.random.default_rng(seed)
    mask = np.zeros(n, dtype=bool)
    if count:
        mask[rng.choice(n, size=count, replace=False)] = True
    return MediaAssignment(attached_to_M=mask, count_M=count)


def source_opinions(s: np.ndarray, gamma: float) -> SourceOpinions:
    """Source opinions for the current innate state.

    z_M pulls the mean up by a factor (1 + gamma) but saturates at 1; z_M'
    pulls it down by (1 - gamma).  ``truncated`` is True only for a strict
    overshoot, so (1 + gamma) * s_bar == 1 exactly still counts as uncapped.
    """
    s = opinion_vector(s)
    if s.size == 0:
        raise ValueError("need at least one opinion")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    s_bar = float(s.mean())
    raw = (1.0 + gamma) * s_bar
    truncated = raw > 1.0
    return SourceOpinions(
        z_M=min(raw, 1.0),
        z_Mprime=(1.0 - gamma) * s_bar,
        truncated=truncated,
    )


def build_zeta(assignment: MediaAssignment, z_M: float, z_Mprime: float) -> np.ndarray:
    """Per-node source opinion: z_M where attached to M, z_M' elsewhere."""
    return np.where(assignment.attached_to_M, float(z_M), float(z_Mprime))


def equilibrium_with_media(graph: Graph, s: np.ndarray, assignment: MediaAssignment,
                           beta: float, zeta: np.ndarray, method: str = "direct-solve",
                           tol: float = 1e-10, max_iter: int | None = None) -> np.ndarray:
    """Equilibrium under media influence.

    Solves ((1+beta) I + beta D + L) z = s + beta (I+D) zeta directly, or
    iterates the augmented averaging map

        z <- (s + W z + beta (1 + d) zeta) / (1 + d + beta (1 + d))

    from z = s until the l-infinity change reaches ``tol``.  beta = 0 reduces
    to the plain FJ equilibrium; s == zeta == c*1 returns the consensus c.
    """
    s = opinion_vector(s, graph.n)
    zeta = np.asarray(zeta, dtype=np.float64).ravel()
    if assignment.n != graph.n or zeta.shape != (graph.n,):
        raise ValueError("assignment and zeta must match the graph size")
    if not (np.isfinite(beta) and beta >= 0.0):
        raise ValueError("beta must be >= 0")
    mask = assignment.attached_to_M
    for side in (mask, ~mask):
        vals = zeta[side]
        if vals.size and np.any(vals != vals[0]):
            raise ValueError("zeta is not constant per media source")
    media_weight = beta * (1.0 + graph.degree)
    if method == "direct-solve":
        # diagonal (1 + beta) + beta d_i written as 1 + beta (1 + d_i)
        op = DiagPlusLaplacianOperator(graph, 1.0 + media_weight)
        return solve_spd(op, s + media_weight * zeta, tol=tol, max_iter=max_iter).solution
    if method == "iterate":
        denom = 1.0 + graph.degree + media_weight
        pull = s + media_weight * zeta
        report = fixed_point_iterate(
            lambda z: (pull + neighbor_sum(graph, z)) / denom, s, tol=tol,
            max_iter=100_000 if max_iter is None else max_iter)
        return report.solution
    raise ValueError(f"method must be 'direct-solve' or 'iterate', got {method!r}")


def sum_bounds(graph: Graph, s: np.ndarray, config: MediaConfig) -> SumBounds:
    """Two-sided bracket for sum of the media-augmented equilibrium.

    Valid only while z_M is uncapped; a truncated instance is rejected
    because the linear growth argument breaks once z_M saturates (use
    :func:`truncated_regular_sum` there).  Proved for beta <= 1.
    """
    s = opinion_vector(s, graph.n)
    if source_opinions(s, config.gamma).truncated:
        raise ValueError("truncated regime: (1 + gamma) * mean(s) > 1; "
                         "sum_bounds only covers the uncapped case")
    sum_s = float(s.sum())
    stats = graph.stats
    alpha, beta, gamma = config.alpha, config.beta, config.gamma
    swing = (2.0 * alpha - 1.0) * gamma + 1.0
    lower = (1.0 + (stats.d_min + 1.0) * beta * swing) / (beta * (stats.d_max + 1.0) + 1.0) * sum_s
    upper = (1.0 + (stats.d_max + 1.0) * beta * swing) / (beta * (stats.d_min + 1.0) + 1.0) * sum_s
    exact = None
    if stats.is_regular:
        d = stats.d_max
        exact = (1.0 + gamma * beta * (d + 1.0) * (2.0 * alpha - 1.0)
                 / (beta * (d + 1.0) + 1.0)) * sum_s
    return SumBounds(lower=lower, upper=upper, exact_if_regular=exact)


def truncated_regular_sum(d: float, n: int, sum_s: float, config: MediaConfig) -> float:
    """Exact equilibrium sum on a d-regular graph once z_M is capped at 1.

    ((1 + beta(1+d)(1-alpha)(1-gamma)) sum_s + alpha beta (1+d) n)
        / (1 + beta(1+d))
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 0:
        raise ValueError("d must be >= 0")
    b = config.beta * (1.0 + d)
    return ((1.0 + b * (1.0 - config.alpha) * (1.0 - config.gamma)) * sum_s
            + config.alpha * b * n) / (1.0 + b)


def truncated_lower_bound(sum_s: float, alpha: float, gamma: float) -> float:
    """Floor on the equilibrium sum in the capped regime.

    sum(z) stays strictly above sum_s * (1 - gamma + alpha*gamma) whenever
    sum_s < n; equality would need every opinion pinned at the ceiling.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    return sum_s * (1.0 - gamma + alpha * gamma)
