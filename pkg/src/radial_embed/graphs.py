"""Undirected simple graphs, synthetic generators and SNAP edge-list I/O."""

from __future__ import annotations

import gzip
import io
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from ._rng import derive_rng

__all__ = [
    "Graph",
    "VertexMap",
    "EdgeListParseError",
    "load_edge_list",
    "read_edge_list",
    "dump_edge_list",
    "largest_connected_component",
    "induced_subgraph",
    "is_connected",
    "gen_erdos_renyi",
    "gen_watts_strogatz",
    "gen_powerlaw_cluster",
    "gen_balanced_tree",
    "gen_grid",
    "subsample_vertices",
]


class EdgeListParseError(ValueError):
    """Raised for a malformed edge-list line; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` int64 array with ``u < v`` in every row, rows
    sorted lexicographically and unique.  Build instances with
    :meth:`from_edges`, which enforces that form.
    """

    n: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.edges.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
        arr = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        arr = arr[arr[:, 0] != arr[:, 1]]
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0) if len(arr) else np.empty((0, 2), dtype=np.int64)
        return cls(int(n), np.ascontiguousarray(arr))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, dst[order]

    @property
    def indptr(self) -> np.ndarray:
        return self._csr[0]

    @property
    def indices(self) -> np.ndarray:
        return self._csr[1]

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists, as plain Python lists for tight loops."""
        indptr, indices = self._csr
        flat = indices.tolist()
        bounds = indptr.tolist()
        return [flat[bounds[i]:bounds[i + 1]] for i in range(self.n)]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._csr
        return indices[indptr[i]:indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        j = np.searchsorted(nb, v)
        return bool(j < len(nb) and nb[j] == v)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True, eq=False)
class VertexMap:
    """Compact id -> original id, kept after compaction or subsetting.

    ``original[c]`` is the label that compact vertex ``c`` carried before.
    """

    original: np.ndarray

    @classmethod
    def identity(cls, n: int) -> VertexMap:
        return cls(np.arange(n, dtype=np.int64))

    def to_compact(self) -> dict[int, int]:
        return {int(o): c for c, o in enumerate(self.original)}

    def compose(self, inner: VertexMap) -> VertexMap:
        """Map through ``inner`` first, then this map (``self`` is the outer labelling)."""
        return VertexMap(self.original[inner.original])

    def __len__(self):
        return len(self.original)

    def __eq__(self, other):
        if not isinstance(other, VertexMap):
            return NotImplemented
        return np.array_equal(self.original, other.original)

    __hash__ = None


# --------------------------------------------------------------------- I/O


def load_edge_list(text: str | TextIO) -> tuple[Graph, VertexMap]:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped; every other line
    must hold exactly two integer tokens separated by spaces or tabs.  Pairs
    are read as undirected, duplicates in either direction collapse, and
    self-loops are dropped (their vertex is kept).  Labels are compacted to
    ``0..n-1`` in increasing order of the original integer label.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, line, f"expected 2 tokens, got {len(tokens)}")
        try:
            pairs.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise EdgeListParseError(lineno, line, "non-integer token") from None
    if not pairs:
        return Graph.from_edges(0, []), VertexMap(np.empty(0, dtype=np.int64))
    raw_arr = np.asarray(pairs, dtype=np.int64)
    labels, inverse = np.unique(raw_arr, return_inverse=True)
    g = Graph.from_edges(len(labels), inverse.reshape(-1, 2))
    return g, VertexMap(labels)


def read_edge_list(path: str | Path) -> tuple[Graph, VertexMap]:
    """:func:`load_edge_list` on a file; ``.gz`` files are decompressed."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return load_edge_list(fh)


def dump_edge_list(g: Graph, comments: Iterable[str] = ()) -> str:
    """Serialize to the same format :func:`load_edge_list` reads.

    Isolated vertices cannot be expressed in an edge list; a ``# nodes:``
    header records the count but the loader ignores it.
    """
    out = io.StringIO()
    for c in comments:
        for line in str(c).splitlines() or [""]:
            out.write(f"# {line}\n")
    out.write(f"# nodes: {g.n} edges: {g.m}\n")
    for u, v in g.edges.tolist():
        out.write(f"{u}\t{v}\n")
    return out.getvalue()


# ------------------------------------------------------------ components


def _component_labels(g: Graph) -> tuple[np.ndarray, int]:
    labels = np.full(g.n, -1, dtype=np.int64)
    adj = g.adjacency
    count = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[s] = count
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if labels[w] < 0:
                    labels[w] = count
                    queue.append(w)
        count += 1
    return labels, count


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    return _component_labels(g)[1] == 1


def induced_subgraph(g: Graph, keep: np.ndarray | Iterable[int]) -> tuple[Graph, VertexMap]:
    """Subgraph induced by ``keep``; compact ids follow increasing original id."""
    keep = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep, dtype=np.int64))
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    e = remap[g.edges]
    e = e[(e[:, 0] >= 0) & (e[:, 1] >= 0)]
    return Graph.from_edges(len(keep), e), VertexMap(keep)


def largest_connected_component(g: Graph) -> tuple[Graph, VertexMap]:
    """Induced subgraph on the largest component.

    Ties go to the component holding the smallest vertex id.
    """
    if g.n == 0:
        raise ValueError("empty graph has no connected component")
    labels, count = _component_labels(g)
    sizes = np.bincount(labels, minlength=count)
    # labels are assigned in order of each component's smallest vertex
    best = int(np.argmax(sizes))
    return induced_subgraph(g, np.flatnonzero(labels == best))


# ------------------------------------------------------------ generators


def gen_erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): every unordered pair independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = derive_rng(seed, "graphs.erdos_renyi")
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    return Graph.from_edges(n, np.column_stack([iu[mask], ju[mask]]))


def gen_watts_strogatz(n: int, k: int, beta: float, seed: int = 0) -> Graph:
    """Watts-Strogatz small world.

    Start from a ring where each vertex links to ``k/2`` neighbours per side.
    Lattice edges ``(u, u+j)`` are visited for ``j = 1..k/2`` and ``u = 0..n-1``;
    each is rewired with probability ``beta`` to ``(u, w)`` with ``w`` uniform
    among vertices that are neither ``u`` nor already adjacent to ``u``.  The
    edge count stays ``n*k/2``.  No connectivity retry: callers that need a
    connected graph take the largest component.
    """
    if k % 2 or k < 0:
        raise ValueError(f"k must be even and non-negative, got {k}")
    if k >= n:
        raise ValueError(f"k must be smaller than n (k={k}, n={n})")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    rng = derive_rng(seed, "graphs.watts_strogatz")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            nbrs[u].add(v)
            nbrs[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if v not in nbrs[u] or rng.random() >= beta:
                continue
            if len(nbrs[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(n))
                if w != u and w not in nbrs[u]:
                    break
            nbrs[u].discard(v)
            nbrs[v].discard(u)
            nbrs[u].add(w)
            nbrs[w].add(u)
    pairs = [(u, v) for u in range(n) for v in nbrs[u] if u < v]
    return Graph.from_edges(n, pairs)


def gen_powerlaw_cluster(n: int, m: int, p: float, seed: int = 0) -> Graph:
    """Holme-Kim growth with tunable clustering.

    Seeding convention: vertices ``0..m-1`` start as a clique (for ``m = 1``
    a single isolated vertex).  Each later vertex ``s`` makes ``m`` distinct
    attachments.  The first is preferential (probability proportional to
    degree, uniform over the clique while every degree is zero).  Each further
    attachment is, with probability ``p``, a triad-closure step to a random
    neighbour of the previous target not yet linked to ``s``; otherwise, or
    if no such neighbour exists, another preferential pick.

    The final edge count is ``m*(m-1)/2 + m*(n-m)``.
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = derive_rng(seed, "graphs.powerlaw_cluster")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    # each vertex appears once per incident edge end
    ends: list[int] = []
    for u in range(m):
        for v in range(u + 1, m):
            nbrs[u].add(v)
            nbrs[v].add(u)
            ends.extend((u, v))

    def preferential(source: int) -> int:
        pool = ends if ends else list(range(m))
        while True:
            t = pool[int(rng.integers(len(pool)))]
            if t != source and t not in nbrs[source]:
                return t

    for source in range(m, n):
        target = preferential(source)
        new = [target]
        nbrs[source].add(target)
        while len(new) < m:
            if rng.random() < p:
                closable = sorted(nbrs[target] - nbrs[source] - {source})
                if closable:
                    target = closable[int(rng.integers(len(closable)))]
                    new.append(target)
                    nbrs[source].add(target)
                    continue
            target = preferential(source)
            new.append(target)
            nbrs[source].add(target)
        for t in new:
            nbrs[t].add(source)
            ends.extend((source, t))
    pairs = [(u, v) for u in range(n) for v in nbrs[u] if u < v]
    return Graph.from_edges(n, pairs)


def gen_balanced_tree(r: int, h: int) -> Graph:
    """Complete ``r``-ary tree of height ``h``, vertices numbered breadth-first."""
    if r < 1 or h < 0:
        raise ValueError(f"need r >= 1 and h >= 0, got r={r}, h={h}")
    n = h + 1 if r == 1 else (r ** (h + 1) - 1) // (r - 1)
    child = np.arange(1, n, dtype=np.int64)
    return Graph.from_edges(n, np.column_stack([(child - 1) // r, child]))


def gen_grid(rows: int, cols: int) -> Graph:
    """Lattice of ``rows x cols`` unit squares: ``(rows+1)*(cols+1)`` vertices."""
    if rows < 1 or cols < 1:
        raise ValueError(f"need rows, cols >= 1, got {rows}x{cols}")
    w = cols + 1
    ids = np.arange((rows + 1) * w).reshape(rows + 1, w)
    horiz = np.column_stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()])
    vert = np.column_stack([ids[:-1, :].ravel(), ids[1:, :].ravel()])
    return Graph.from_edges(ids.size, np.vstack([horiz, vert]))


def subsample_vertices(g: Graph, fraction: float, seed: int = 0) -> tuple[Graph, VertexMap]:
    """Uniformly keep ``ceil(fraction*n)`` vertices, then take the largest component."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    k = math.ceil(fraction * g.n)
    if k == 0:
        raise ValueError("subsample of an empty graph is empty")
    if k >= g.n:
        chosen = np.arange(g.n)
    else:
        chosen = np.sort(derive_rng(seed, "graphs.subsample").choice(g.n, size=k, replace=False))
    sub, outer = induced_subgraph(g, chosen)
    lcc, inner = largest_connected_component(sub)
    return lcc, outer.compose(inner)
