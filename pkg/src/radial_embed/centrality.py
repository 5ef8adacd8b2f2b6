"""Ground-truth vertex centralities on unweighted undirected graphs.

Normalizations follow the usual network-analysis conventions:

* degree: ``deg(i) / (n-1)``
* betweenness and load: transit counted over unordered pairs, times
  ``2 / ((n-1)(n-2))``
* closeness: ``(n-1) / sum_j dist(i, j)``
* eigenvector: unit Euclidean norm, non-negative
* PageRank: sums to one

Per-source sweeps (betweenness, load, closeness) run in fixed blocks of
sources whose partial sums are added in block order, so the result does not
depend on how many worker processes ``RADIAL_EMBED_THREADS`` allows.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .graphs import Graph, is_connected

__all__ = [
    "Measure",
    "CentralityVector",
    "CentralityError",
    "degree_centrality",
    "betweenness_centrality",
    "closeness_centrality",
    "eigenvector_centrality",
    "pagerank",
    "load_centrality",
    "compute",
    "worker_count",
]

_BLOCK = 64
_PARALLEL_MIN_N = 2000


class Measure(str, Enum):
    degree = "degree"
    betweenness = "betweenness"
    eigenvector = "eigenvector"
    pagerank = "pagerank"
    closeness = "closeness"
    load = "load"


class CentralityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CentralityVector:
    measure: Measure
    scores: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        if not np.all(np.isfinite(self.scores)) or np.any(self.scores < 0):
            raise CentralityError(f"{self.measure.value}: scores must be finite and non-negative")

    def __len__(self):
        return len(self.scores)

    def to_csv(self) -> str:
        lines = ["vertex,score"] + [f"{i},{s:.17g}" for i, s in enumerate(self.scores)]
        return "\n".join(lines) + "\n"


def worker_count() -> int:
    env = os.environ.get("RADIAL_EMBED_THREADS")
    cpus = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cpus))
        except ValueError:
            pass
    return cpus


def _adjacency_matrix(g: Graph) -> sp.csr_matrix:
    return sp.csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.n, g.n))


# ----------------------------------------------------------------- sweeps


def _bfs(adj: list[list[int]], s: int, n: int):
    """Distances, shortest-path counts, predecessors and visit order from ``s``."""
    dist = [-1] * n
    sigma = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    dist[s] = 0
    sigma[s] = 1
    order = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv
                queue.append(w)
            if dist[w] == dv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, preds, order


def _brandes_block(adj, n, sources):
    total = [0.0] * n
    for s in sources:
        _, sigma, preds, order = _bfs(adj, s, n)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                total[w] += delta[w]
    return total


def _load_block(adj, n, sources):
    total = [0.0] * n
    for s in sources:
        _, _, preds, order = _bfs(adj, s, n)
        # every reached vertex emits one packet back toward s, split evenly over predecessors
        flow = [1.0] * n
        for w in reversed(order):
            if w == s:
                break
            share = flow[w] / len(preds[w])
            for v in preds[w]:
                flow[v] += share
        for v in order:
            if v != s:
                total[v] += flow[v] - 1.0
    return total


def _distance_block(adj, n, sources):
    sums = []
    for s in sources:
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        acc = 0
        reached = 1
        while queue:
            v = queue.popleft()
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    acc += dv
                    reached += 1
                    queue.append(w)
        sums.append((acc, reached))
    return sums


def _run_blocks(kernel, g: Graph):
    adj = g.adjacency
    blocks = [range(i, min(i + _BLOCK, g.n)) for i in range(0, g.n, _BLOCK)]
    workers = worker_count()
    if workers > 1 and g.n >= _PARALLEL_MIN_N:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(kernel, [adj] * len(blocks), [g.n] * len(blocks), blocks))
    return [kernel(adj, g.n, b) for b in blocks]


def _sum_blocks(parts, n) -> np.ndarray:
    total = np.zeros(n)
    for part in parts:
        total += np.asarray(part)
    return total


# --------------------------------------------------------------- measures


def degree_centrality(g: Graph) -> CentralityVector:
    if g.n <= 1:
        raise CentralityError("degree centrality needs at least two vertices")
    return CentralityVector(Measure.degree, g.degrees / (g.n - 1))


def betweenness_centrality(g: Graph) -> CentralityVector:
    """Brandes dependency accumulation; pairs in different components add nothing."""
    n = g.n
    if n <= 2:
        return CentralityVector(Measure.betweenness, np.zeros(n))
    ordered = _sum_blocks(_run_blocks(_brandes_block, g), n)
    # ordered-pair sum is twice the unordered one
    return CentralityVector(Measure.betweenness, ordered / ((n - 1) * (n - 2)))


def load_centrality(g: Graph) -> CentralityVector:
    """Goh et al. load: unit packets along shortest paths, split evenly at branch points.

    Packets go between every ordered pair; the total over both directions of
    a pair is halved before the ``2/((n-1)(n-2))`` scaling, so on trees load
    equals betweenness.
    """
    n = g.n
    if n <= 2:
        return CentralityVector(Measure.load, np.zeros(n))
    ordered = _sum_blocks(_run_blocks(_load_block, g), n)
    return CentralityVector(Measure.load, ordered / ((n - 1) * (n - 2)))


def closeness_centrality(g: Graph) -> CentralityVector:
    if g.n <= 1:
        raise CentralityError("closeness needs at least two vertices")
    if not is_connected(g):
        raise CentralityError("closeness is defined here for connected graphs; take the largest component first")
    sums = [pair for part in _run_blocks(_distance_block, g) for pair in part]
    far = np.array([acc for acc, _ in sums], dtype=float)
    return CentralityVector(Measure.closeness, (g.n - 1) / far)


def eigenvector_centrality(g: Graph, tol: float = 1e-10, max_iter: int = 10_000) -> CentralityVector:
    """Dominant eigenvector of ``A`` by power iteration on ``A + I``.

    The shift leaves the eigenvectors unchanged and breaks the +/- symmetry of
    bipartite spectra, which would otherwise stall the iteration.
    """
    if g.n == 0:
        raise CentralityError("empty graph")
    if not is_connected(g):
        raise CentralityError("eigenvector centrality needs a connected graph; take the largest component first")
    A = _adjacency_matrix(g)
    x = np.ones(g.n) / np.sqrt(g.n)
    for _ in range(max_iter):
        nxt = A @ x + x
        nxt /= np.linalg.norm(nxt)
        if np.abs(nxt - x).sum() <= tol:
            return CentralityVector(Measure.eigenvector, np.abs(nxt))
        x = nxt
    raise CentralityError(f"eigenvector centrality did not converge in {max_iter} iterations")


def pagerank(g: Graph, alpha: float = 0.85, tol: float = 1e-12, max_iter: int = 10_000) -> CentralityVector:
    """PageRank with every edge used in both directions.

    Isolated vertices are dangling; their mass is spread uniformly.
    """
    n = g.n
    if n == 0:
        raise CentralityError("empty graph")
    if not 0 <= alpha < 1:
        raise CentralityError("alpha must lie in [0, 1)")
    deg = g.degrees.astype(float)
    dangling = deg == 0
    inv = np.divide(1.0, deg, out=np.zeros(n), where=~dangling)
    # column-stochastic transition on non-dangling columns
    M = _adjacency_matrix(g) @ sp.diags(inv)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = alpha * (M @ x) + (alpha * x[dangling].sum() + 1.0 - alpha) / n
        if np.abs(nxt - x).sum() <= tol:
            return CentralityVector(Measure.pagerank, nxt / nxt.sum())
        x = nxt
    raise CentralityError(f"pagerank did not converge in {max_iter} iterations")


_DISPATCH = {
    Measure.degree: degree_centrality,
    Measure.betweenness: betweenness_centrality,
    Measure.eigenvector: eigenvector_centrality,
    Measure.pagerank: pagerank,
    Measure.closeness: closeness_centrality,
    Measure.load: load_centrality,
}


def compute(g: Graph, measure: Measure | str) -> CentralityVector:
    return _DISPATCH[Measure(measure)](g)
