"""Force refinement of a spectral layout: springs, crossing repulsion, normalization.

Positions are ``(d, n)`` float arrays; column ``i`` is vertex ``i``.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
from scipy.spatial import cKDTree

from ._rng import derive_rng
from .graphs import Graph
from .spectral import spectral_init

log = logging.getLogger(__name__)

__all__ = [
    "LayoutConfig",
    "CrossingSet",
    "NonFiniteLayoutError",
    "spring_forces",
    "orient",
    "segments_cross",
    "find_crossings_exact",
    "find_crossings_knn",
    "find_crossings",
    "intersection_forces",
    "normalize",
    "step",
    "embed",
    "radial_scores",
    "energy",
    "intersection_load",
    "positions_to_csv",
    "positions_from_csv",
]


class NonFiniteLayoutError(FloatingPointError):
    def __init__(self, vertex: int, iteration: int | None = None):
        where = f" at iteration {iteration}" if iteration is not None else ""
        super().__init__(f"non-finite coordinate for vertex {vertex}{where}; reduce damping or force constants")
        self.vertex = vertex
        self.iteration = iteration


@dataclass(frozen=True)
class LayoutConfig:
    dim: int = 2
    k_attr: float = 0.05
    k_inter: float = 0.1
    l_min: float = 0.1
    eps: float = 1e-6
    iterations: int = 100
    knn_k: int = 15
    # None disables midpoint subsampling
    midpoint_sample_cap: int | None = 50_000
    damping: float = 1.0
    seed: int = 0
    crossing_mode: Literal["exact", "knn"] = "knn"
    projection_plane: tuple[int, int] = (0, 1)
    scale_by_inv_sqrt_lambda: bool = False

    def __post_init__(self):
        for name in ("k_attr", "k_inter", "l_min", "eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.knn_k < 1:
            raise ValueError("knn_k must be at least 1")
        if self.midpoint_sample_cap is not None and self.midpoint_sample_cap < 2:
            raise ValueError("midpoint_sample_cap must be at least 2")
        if self.crossing_mode not in ("exact", "knn"):
            raise ValueError(f"unknown crossing_mode {self.crossing_mode!r}")
        a, b = self.projection_plane
        object.__setattr__(self, "projection_plane", (int(a), int(b)))
        if a == b or not (0 <= a < self.dim and 0 <= b < self.dim):
            raise ValueError("projection_plane needs two distinct indices below dim")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["projection_plane"] = list(self.projection_plane)
        return d


@dataclass(frozen=True)
class CrossingSet:
    """Crossing edge pairs.

    ``pairs`` is ``(K, 2)`` edge indices with ``e < f``, rows sorted;
    ``endpoints`` is ``(K, 4)``, the vertices of ``e`` then ``f``;
    ``midpoints`` is ``(d, K)``, the mean of the four endpoints of each pair.
    """

    pairs: np.ndarray
    endpoints: np.ndarray = field(repr=False)
    midpoints: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.pairs)

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(e), int(f)) for e, f in self.pairs}


def _accumulate(n: int, idx: np.ndarray, vals: np.ndarray) -> np.ndarray:
    # bincount sums in index order: deterministic, unlike threaded scatter-add
    return np.stack([np.bincount(idx, weights=row, minlength=n) for row in vals])


def spring_forces(p: np.ndarray, g: Graph, cfg: LayoutConfig) -> np.ndarray:
    """Hooke attraction toward rest length ``l_min`` along every edge."""
    if g.m == 0:
        return np.zeros_like(p)
    u, v = g.edges[:, 0], g.edges[:, 1]
    delta = p[:, u] - p[:, v]
    dist = np.sqrt(np.einsum("ij,ij->j", delta, delta)) + cfg.eps
    f_u = -cfg.k_attr * (dist - cfg.l_min) / dist * delta
    idx = np.concatenate([u, v])
    return _accumulate(g.n, idx, np.concatenate([f_u, -f_u], axis=1))


def orient(a, b, c) -> float:
    """Twice the signed area of triangle ``abc``; positive when counterclockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(u, v, w, x) -> bool:
    """Proper crossing of ``uv`` and ``wx``.  Touching or collinear contact is not a crossing."""
    return orient(u, v, w) * orient(u, v, x) < 0 and orient(w, x, u) * orient(w, x, v) < 0


def _orient_v(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _cross_mask(xy: np.ndarray, edges: np.ndarray, e: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Vectorized strict crossing test; ``xy`` is ``(2, n)``, ``e``/``f`` edge indices.

    Pairs sharing an endpoint get a zero orientation and so never pass.
    """
    x, y = xy
    u, v = edges[e, 0], edges[e, 1]
    w, z = edges[f, 0], edges[f, 1]
    ux, uy, vx, vy = x[u], y[u], x[v], y[v]
    wx, wy, zx, zy = x[w], y[w], x[z], y[z]
    ok = _orient_v(ux, uy, vx, vy, wx, wy) * _orient_v(ux, uy, vx, vy, zx, zy) < 0
    ok &= _orient_v(wx, wy, zx, zy, ux, uy) * _orient_v(wx, wy, zx, zy, vx, vy) < 0
    # exact coincident endpoints already fail above; ids guard against duplicated coordinates
    ok &= (u != w) & (u != z) & (v != w) & (v != z)
    return ok


def _make_set(p: np.ndarray, edges: np.ndarray, e: np.ndarray, f: np.ndarray, presorted: bool = False) -> CrossingSet:
    if not presorted and len(e):
        order = np.lexsort((f, e))
        e, f = e[order], f[order]
    pairs = np.column_stack([e, f]).astype(np.int64).reshape(-1, 2)
    ends = np.concatenate([edges[e], edges[f]], axis=1).reshape(-1, 4)
    if len(pairs):
        mids = 0.25 * (p[:, ends[:, 0]] + p[:, ends[:, 1]] + p[:, ends[:, 2]] + p[:, ends[:, 3]])
    else:
        mids = np.zeros((p.shape[0], 0))
    return CrossingSet(pairs, ends, mids)


def find_crossings_exact(p: np.ndarray, g: Graph, cfg: LayoutConfig, block: int = 2048) -> CrossingSet:
    """Every crossing edge pair, by testing all ``O(m^2)`` pairs in blocks.

    For ``d > 2`` the test runs on ``cfg.projection_plane``; midpoints keep
    all ``d`` coordinates.
    """
    m = g.m
    q = p[list(cfg.projection_plane)]
    edges = g.edges
    hits_e, hits_f = [], []
    for start in range(0, m, block):
        stop = min(start + block, m)
        rows = np.arange(start, stop)
        for fstart in range(start, m, block):
            fstop = min(fstart + block, m)
            cols = np.arange(fstart, fstop)
            ee, ff = np.meshgrid(rows, cols, indexing="ij")
            ee, ff = ee.ravel(), ff.ravel()
            keep = ee < ff
            ee, ff = ee[keep], ff[keep]
            hit = _cross_mask(q, edges, ee, ff)
            hits_e.append(ee[hit])
            hits_f.append(ff[hit])
    e = np.concatenate(hits_e) if hits_e else np.empty(0, np.int64)
    f = np.concatenate(hits_f) if hits_f else np.empty(0, np.int64)
    return _make_set(p, edges, e, f)


def find_crossings_knn(p: np.ndarray, g: Graph, cfg: LayoutConfig, iteration: int = 0) -> CrossingSet:
    """Crossings among pairs of edges whose midpoints are ``knn_k``-nearest neighbours.

    Midpoints are taken in the projection plane.  With more than
    ``cfg.midpoint_sample_cap`` edges, only a uniform sample of that many
    edges takes part; the sample is drawn from ``(cfg.seed, iteration)``.
    Always a subset of :func:`find_crossings_exact`.
    """
    m = g.m
    if m < 2:
        return _make_set(p, g.edges, np.empty(0, np.int64), np.empty(0, np.int64))
    q = p[list(cfg.projection_plane)]
    edges = g.edges
    cand = np.arange(m)
    cap = cfg.midpoint_sample_cap
    if cap is not None and m > cap:
        rng = derive_rng(cfg.seed, "layout.midpoint_sample", iteration)
        cand = np.sort(rng.choice(m, size=cap, replace=False))
    mids = 0.5 * (q[:, edges[cand, 0]] + q[:, edges[cand, 1]])
    k = min(cfg.knn_k + 1, len(cand))
    _, nn = cKDTree(mids.T).query(mids.T, k=k)
    nn = nn.reshape(len(cand), k)
    e = np.repeat(cand, k)
    f = cand[nn.ravel()]
    lo, hi = np.minimum(e, f), np.maximum(e, f)
    keep = lo < hi
    keys = np.unique(lo[keep] * m + hi[keep])
    e, f = keys // m, keys % m
    hit = _cross_mask(q, edges, e, f)
    return _make_set(p, edges, e[hit], f[hit], presorted=True)


def find_crossings(p: np.ndarray, g: Graph, cfg: LayoutConfig, iteration: int = 0) -> CrossingSet:
    if cfg.crossing_mode == "exact":
        return find_crossings_exact(p, g, cfg)
    return find_crossings_knn(p, g, cfg, iteration)


def intersection_forces(p: np.ndarray, cs: CrossingSet, cfg: LayoutConfig) -> np.ndarray:
    """Push the four endpoints of every crossing pair away from the pair's midpoint.

    Each endpoint ``i`` of a crossing with midpoint ``m`` gets
    ``k_inter * (p_i - m) / (|p_i - m|^2 + eps)``.
    """
    if len(cs) == 0:
        return np.zeros_like(p)
    parts = []
    for j in range(4):
        diff = p[:, cs.endpoints[:, j]] - cs.midpoints
        parts.append(cfg.k_inter * diff / (np.einsum("ij,ij->j", diff, diff) + cfg.eps))
    return _accumulate(p.shape[1], cs.endpoints.T.ravel(), np.concatenate(parts, axis=1))


def normalize(p: np.ndarray, eps: float) -> np.ndarray:
    """Center, then divide by ``sigma + eps`` where ``sigma`` is the RMS radius."""
    centered = p - p.mean(axis=1, keepdims=True)
    sigma = math.sqrt(np.einsum("ij,ij->", centered, centered) / p.shape[1])
    return centered / (sigma + eps)


def step(p: np.ndarray, g: Graph, cfg: LayoutConfig, iteration: int = 0) -> np.ndarray:
    """One refinement step: ``normalize(p + damping * (F_spring + F_cross))``."""
    # overflow surfaces below as a NonFiniteLayoutError, so silence the warnings
    with np.errstate(over="ignore", invalid="ignore"):
        force = spring_forces(p, g, cfg)
        cs = find_crossings(p, g, cfg, iteration)
        if len(cs):
            force += intersection_forces(p, cs, cfg)
        moved = p + cfg.damping * force
    bad = ~np.isfinite(moved).all(axis=0)
    if bad.any():
        raise NonFiniteLayoutError(int(np.flatnonzero(bad)[0]), iteration)
    return normalize(moved, cfg.eps)


def embed(g: Graph, cfg: LayoutConfig, init: np.ndarray | None = None) -> np.ndarray:
    """Spectral start, normalized once, then ``cfg.iterations`` refinement steps.

    ``init`` overrides the spectral start (it is still normalized first).
    """
    if init is None:
        init = spectral_init(g, cfg.dim, cfg.scale_by_inv_sqrt_lambda)
    p = normalize(np.asarray(init, dtype=float), cfg.eps)
    trace = log.isEnabledFor(logging.DEBUG)
    for t in range(cfg.iterations):
        p = step(p, g, cfg, t)
        if trace:
            log.debug("iteration %d energy %.6g", t, energy(p, g, cfg, t))
    return p


def radial_scores(p: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->j", p, p))


def energy(p: np.ndarray, g: Graph, cfg: LayoutConfig, iteration: int = 0) -> float:
    """Spring energy plus inverse-square crossing congestion.

    ``k_attr/2 * sum_edges (|p_i - p_j| - l_min)^2`` plus, for every crossing
    pair and each of its four endpoints, ``k_inter / (|p_i - m|^2 + eps)``.
    """
    if g.m == 0:
        return 0.0
    u, v = g.edges[:, 0], g.edges[:, 1]
    lengths = np.linalg.norm(p[:, u] - p[:, v], axis=0)
    total = 0.5 * cfg.k_attr * float(np.sum((lengths - cfg.l_min) ** 2))
    cs = find_crossings(p, g, cfg, iteration)
    if len(cs):
        diff = p[:, cs.endpoints] - cs.midpoints[:, :, None]
        total += float(np.sum(cfg.k_inter / (np.einsum("ikj,ikj->kj", diff, diff) + cfg.eps)))
    return total


def intersection_load(p: np.ndarray, g: Graph, cfg: LayoutConfig, iteration: int = 0) -> np.ndarray:
    """Number of crossing pairs that have vertex ``i`` as an endpoint."""
    cs = find_crossings(p, g, cfg, iteration)
    if len(cs) == 0:
        return np.zeros(g.n)
    return np.bincount(cs.endpoints.ravel(), minlength=g.n).astype(float)


def positions_to_csv(p: np.ndarray, extra: dict[str, np.ndarray] | None = None) -> str:
    """CSV with header ``vertex,x0,..,x{d-1},radial`` and 17 significant digits."""
    d, n = p.shape
    extra = extra or {}
    out = io.StringIO()
    header = ["vertex"] + [f"x{k}" for k in range(d)] + ["radial"] + list(extra)
    out.write(",".join(header) + "\n")
    r = radial_scores(p)
    cols = [p[k] for k in range(d)] + [r] + [np.asarray(v, dtype=float) for v in extra.values()]
    for i in range(n):
        out.write(str(i) + "," + ",".join(f"{c[i]:.17g}" for c in cols) + "\n")
    return out.getvalue()


def positions_from_csv(text: str) -> np.ndarray:
    """Inverse of :func:`positions_to_csv`; ``#`` comment lines are skipped."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split(",")
    dims = [j for j, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    rows = np.array([[float(ln.split(",")[j]) for j in dims] for ln in lines[1:]])
    return rows.T.reshape(len(dims), -1)
