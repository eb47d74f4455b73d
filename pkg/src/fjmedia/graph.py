"""Weighted undirected graphs with matrix-free Laplacian products.

A graph is stored as flat edge arrays (one row per undirected edge) plus a
precomputed weighted degree vector.  Nothing here ever materialises an n x n
matrix: ``laplacian_apply`` and ``neighbor_sum`` scatter over the edge arrays,
which is all the solvers need.

Node ids are dense 0..n-1.  ``load_edge_list`` remaps arbitrary integer ids by
first appearance, so external files keep their own labelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphStats",
    "load_edge_list",
    "write_edge_list",
    "gen_barabasi_albert",
    "gen_random_regular",
    "laplacian_apply",
    "neighbor_sum",
]


@dataclass(frozen=True)
class GraphStats:
    """Summary invariants of a graph.

    Attributes
    ----------
    n, m : int
        Node and edge counts.
    d_min, d_max : float
        Extreme weighted degrees.
    is_regular : bool
        True when every weighted degree agrees (up to 1e-12 relative slack,
        so unit-weight generated graphs compare exactly).
    total_edge_weight : float
        Sum of edge weights; degrees sum to twice this.
    """

    n: int
    m: int
    d_min: float
    d_max: float
    is_regular: bool
    total_edge_weight: float


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted undirected graph.

    Edges are stored once with ``edge_u[k] < edge_v[k]``; the degree vector is
    derived at construction.  Arrays are set read-only so instances can be
    shared freely between runs.

    Construct through :meth:`from_edges`, the generators, or
    :func:`load_edge_list` rather than passing raw arrays.
    """

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    degree: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        u = np.asarray(self.edge_u, dtype=np.int64).ravel()
        v = np.asarray(self.edge_v, dtype=np.int64).ravel()
        w = np.asarray(self.edge_w, dtype=np.float64).ravel()
        if not (u.shape == v.shape == w.shape):
            raise ValueError("edge arrays must have identical length")
        if u.size:
            if u.min() < 0 or max(u.max(), v.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            if np.any(~np.isfinite(w)) or np.any(w <= 0):
                raise ValueError("edge weights must be positive and finite")
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            keys = lo * np.int64(self.n) + hi
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edges are not allowed")
            u, v = lo, hi
        deg = np.bincount(u, weights=w, minlength=self.n) + np.bincount(
            v, weights=w, minlength=self.n
        )
        for name, arr in (("edge_u", u), ("edge_v", v), ("edge_w", w), ("degree", deg)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an iterable of ``(u, v)`` or ``(u, v, w)`` tuples."""
        us, vs, ws = [], [], []
        for e in edges:
            if len(e) == 2:
                a, b = e
                c = 1.0
            else:
                a, b, c = e
            us.append(a)
            vs.append(b)
            ws.append(c)
        return cls(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                   np.array(ws, dtype=np.float64))

    @property
    def m(self) -> int:
        return int(self.edge_u.size)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(a), int(b), float(c))
            for a, b, c in zip(self.edge_u, self.edge_v, self.edge_w)
        ]

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # symmetrised adjacency in CSR form, built once on first neighbor query
        ends = np.concatenate([self.edge_u, self.edge_v])
        other = np.concatenate([self.edge_v, self.edge_u])
        wts = np.concatenate([self.edge_w, self.edge_w])
        order = np.lexsort((other, ends))  # by node, then neighbor id
        counts = np.bincount(ends, minlength=self.n)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr, other[order], wts[order]

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        """Neighbors of node ``i`` with edge weights, sorted by neighbor id."""
        if not 0 <= i < self.n:
            raise ValueError(f"node {i} out of range")
        indptr, idx, wts = self._csr
        lo, hi = indptr[i], indptr[i + 1]
        return [(int(j), float(w)) for j, w in zip(idx[lo:hi], wts[lo:hi])]

    @cached_property
    def stats(self) -> GraphStats:
        d_min = float(self.degree.min())
        d_max = float(self.degree.max())
        regular = (d_max - d_min) <= 1e-12 * max(1.0, d_max)
        return GraphStats(
            n=self.n,
            m=self.m,
            d_min=d_min,
            d_max=d_max,
            is_regular=bool(regular),
            total_edge_weight=float(self.edge_w.sum()),
        )


def neighbor_sum(graph: Graph, x: np.ndarray) -> np.ndarray:
    """Weighted neighbor sums ``(W x)_i = sum_j w_ij x_j``, matrix-free."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.n,):
        raise ValueError(f"expected vector of length {graph.n}, got shape {x.shape}")
    if graph.m == 0:
        return np.zeros(graph.n)
    wx = np.bincount(graph.edge_u, weights=graph.edge_w * x[graph.edge_v],
                     minlength=graph.n)
    wx += np.bincount(graph.edge_v, weights=graph.edge_w * x[graph.edge_u],
                      minlength=graph.n)
    return wx


def laplacian_apply(graph: Graph, x: np.ndarray) -> np.ndarray:
    """Apply the combinatorial Laplacian: ``(L x)_i = d_i x_i - (W x)_i``.

    Row sums of L vanish, so ``laplacian_apply`` of a constant vector is zero
    and ``sum(L x) == 0`` for every x (up to roundoff).
    """
    x = np.asarray(x, dtype=np.float64)
    return graph.degree * x - neighbor_sum(graph, x)


# ---------------------------------------------------------------------------
# ingestion


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list.

    Lines are ``u v`` (weight 1.0) or ``u v w``; ``#`` starts a comment line
    and blank lines are skipped.  Ids are arbitrary non-negative integers and
    get remapped to 0..n-1 by first appearance.  Self-loops, duplicate pairs
    (in either orientation), non-positive weights and unparsable tokens are
    rejected with the offending line number.
    """
    ids: dict[int, int] = {}
    seen: set[tuple[int, int]] = set()
    us, vs, ws = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"line {lineno}: expected 'u v' or 'u v w', got {line!r}")
            try:
                a = int(parts[0])
                b = int(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: unparsable node id in {line!r}") from exc
            if a < 0 or b < 0:
                raise ValueError(f"line {lineno}: node ids must be non-negative")
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError as exc:
                    raise ValueError(f"line {lineno}: unparsable weight in {line!r}") from exc
            else:
                w = 1.0
            if not np.isfinite(w) or w <= 0:
                raise ValueError(f"line {lineno}: weight must be positive and finite")
            if a == b:
                raise ValueError(f"line {lineno}: self-loop {a}-{b}")
            for node in (a, b):
                if node not in ids:
                    ids[node] = len(ids)
            i, j = ids[a], ids[b]
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"line {lineno}: duplicate edge {a}-{b}")
            seen.add(key)
            us.append(i)
            vs.append(j)
            ws.append(w)
    if not ids:
        raise ValueError("edge list contains no edges")
    return Graph(len(ids), np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                 np.array(ws, dtype=np.float64))


def write_edge_list(graph: Graph, path, comment: str | None = None) -> None:
    """Write ``u v w`` lines (0-based ids), optionally preceded by a comment."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for a, b, c in zip(graph.edge_u, graph.edge_v, graph.edge_w):
            fh.write(f"{int(a)} {int(b)} {c:.17g}\n")


# ---------------------------------------------------------------------------
# generators


def gen_barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment graph: K_m core, then m distinct edges per node.

    Each node m..n-1 picks m distinct existing targets with probability
    proportional to current degree (sampling without replacement from a
    degree-weighted urn).  Unit weights.  Deterministic for a fixed seed.

    Edge count is m(m-1)/2 + (n-m)m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m >= n:
        raise ValueError("m must be < n")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    urn: list[int] = []  # one entry per unit of degree
    for j in range(m):
        for i in range(j):
            edges.append((i, j))
    for node in range(m):
        urn.extend([node] * (m - 1))
    for source in range(m, n):
        if urn:
            targets: list[int] = []
            chosen: set[int] = set()
            while len(targets) < m:
                t = urn[int(rng.integers(len(urn)))]
                if t not in chosen:
                    chosen.add(t)
                    targets.append(t)
        else:
            # m == 1 leaves K_1 with no degree mass; the only legal target
            targets = list(range(source))
        for t in targets:
            edges.append((t, source))
        urn.extend(targets)
        urn.extend([source] * m)
    arr = np.array(edges, dtype=np.int64)
    return Graph(n, arr[:, 0], arr[:, 1], np.ones(arr.shape[0]))


def gen_random_regular(n: int, d: int, seed: int) -> Graph:
    """Random simple d-regular graph via the pairing model with stub repair.

    All nd stubs are shuffled and paired; pairs that would create a self-loop
    or duplicate edge put their stubs back for the next shuffle.  When the
    leftover stubs cannot be placed at all, everything restarts.  Unit
    weights; deterministic for a fixed seed.  ``n*d`` must be even and
    ``d < n``.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    if d >= n:
        raise ValueError("d must be < n")
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even for a d-regular graph to exist")
    if d == 0:
        return Graph(n, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                     np.empty(0))
    rng = np.random.default_rng(seed)
    while True:
        edges = _pairing_attempt(rng, n, d)
        if edges is not None:
            arr = np.array(edges, dtype=np.int64)
            return Graph(n, arr[:, 0], arr[:, 1], np.ones(arr.shape[0]))


def _pairing_attempt(rng, n: int, d: int):
    edge_set: set[tuple[int, int]] = set()
    edge_list: list[tuple[int, int]] = []
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    while stubs.size:
        rng.shuffle(stubs)
        failed: list[int] = []
        for k in range(0, stubs.size, 2):
            a = int(stubs[k])
            b = int(stubs[k + 1])
            if a > b:
                a, b = b, a
            if a == b or (a, b) in edge_set:
                failed.append(a)
                failed.append(b)
            else:
                edge_set.add((a, b))
                edge_list.append((a, b))
        if not failed:
            return edge_list
        if not _placeable(edge_set, failed):
            return None  # dead end, caller restarts from fresh stubs
        stubs = np.array(failed, dtype=np.int64)
    return edge_list


def _placeable(edge_set, failed) -> bool:
    # is there any pair of leftover stubs that could still become an edge?
    nodes = sorted(set(failed))
    for i, b in enumerate(nodes):
        for a in nodes[:i]:
            if (a, b) not in edge_set:
                return True
    return False
