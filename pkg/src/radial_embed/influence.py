"""Independent Cascade simulation and seed selection (greedy vs. radial)."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ._rng import derive_rng
from .graphs import Graph
from .layout import LayoutConfig, embed, radial_scores

__all__ = [
    "CascadeConfig",
    "CascadeOutcome",
    "ic_simulate",
    "ic_batch",
    "estimate_influence",
    "greedy_seed_selection",
    "embedding_seed_selection",
    "top_k",
    "benchmark_influence",
]


@dataclass(frozen=True)
class CascadeConfig:
    p_ic: float = 0.1
    k_seeds: int = 10
    n_sims: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_ic <= 1.0:
            raise ValueError("p_ic must lie in [0, 1]")
        if self.k_seeds < 1:
            raise ValueError("k_seeds must be at least 1")
        if self.n_sims < 1:
            raise ValueError("n_sims must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CascadeOutcome:
    mean_influence: float
    std_influence: float
    total_simulations: int
    wall_time: float
    counts: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "influence_mean": self.mean_influence,
            "influence_std": self.std_influence,
            "total_simulations": self.total_simulations,
            "wall_time_seconds": self.wall_time,
        }


def _check_seeds(g: Graph, seeds) -> np.ndarray:
    seeds = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if len(seeds) == 0:
        raise ValueError("seed set must be non-empty")
    if seeds[0] < 0 or seeds[-1] >= g.n:
        raise ValueError("seed vertex out of range")
    return seeds


def ic_simulate(g: Graph, seeds, p_ic: float, rng: np.random.Generator) -> int:
    """One cascade: each newly active vertex gets one chance per inactive neighbour."""
    seeds = _check_seeds(g, seeds)
    adj = g.adjacency
    active = np.zeros(g.n, dtype=bool)
    active[seeds] = True
    frontier = seeds.tolist()
    count = len(frontier)
    while frontier:
        nxt = []
        for u in frontier:
            nb = adj[u]
            if not nb:
                continue
            fire = rng.random(len(nb)) < p_ic
            for w, f in zip(nb, fire):
                if f and not active[w]:
                    active[w] = True
                    nxt.append(w)
        count += len(nxt)
        frontier = nxt
    return count


def ic_batch(g: Graph, seeds, p_ic: float, runs: int, rng: np.random.Generator) -> np.ndarray:
    """Final active counts of ``runs`` independent cascades, simulated together.

    A vectorized sampler for large Monte-Carlo checks.  It shares one stream
    across runs, so individual runs are not replayable; seed selection and
    :func:`estimate_influence` use :func:`ic_simulate` instead.

    Each round draws one coin per (run, frontier vertex, neighbour) arc and
    activates the heads that were inactive when the round began; a head hit
    by several arcs in one round is activated once.  That is the same law as
    running :func:`ic_simulate` ``runs`` times.
    """
    seeds = _check_seeds(g, seeds)
    n = g.n
    indptr, indices = g.indptr, g.indices
    deg = np.diff(indptr)
    active = np.zeros((runs, n), dtype=bool)
    active[:, seeds] = True
    run_of = np.repeat(np.arange(runs), len(seeds))
    vert = np.tile(seeds, runs)
    while len(vert):
        lens = deg[vert]
        total = int(lens.sum())
        if total == 0:
            break
        # positions of every outgoing arc of every frontier entry
        offsets = np.repeat(indptr[vert] - np.cumsum(lens) + lens, lens)
        heads = indices[offsets + np.arange(total)]
        tails_run = np.repeat(run_of, lens)
        fire = rng.random(total) < p_ic
        tails_run, heads = tails_run[fire], heads[fire]
        fresh = ~active[tails_run, heads]
        keys = np.unique(tails_run[fresh] * n + heads[fresh])
        run_of, vert = keys // n, keys % n
        active[run_of, vert] = True
    return active.sum(axis=1)


def estimate_influence(g: Graph, seeds, cfg: CascadeConfig, stream: Sequence[int | str] = ()) -> CascadeOutcome:
    """Mean and sample std of the cascade size over ``cfg.n_sims`` runs.

    Run ``r`` draws from its own stream ``(cfg.seed, "influence.run", *stream, r)``,
    so any single cascade can be replayed with :func:`ic_simulate`.
    """
    t0 = time.perf_counter()
    seeds = _check_seeds(g, seeds)
    counts = np.array([
        ic_simulate(g, seeds, cfg.p_ic, derive_rng(cfg.seed, "influence.run", *stream, r))
        for r in range(cfg.n_sims)
    ])
    std = float(np.std(counts, ddof=1)) if cfg.n_sims > 1 else 0.0
    return CascadeOutcome(float(counts.mean()), std, cfg.n_sims, time.perf_counter() - t0, counts)


def greedy_seed_selection(g: Graph, cfg: CascadeConfig, stream: Sequence[int | str] = ()) -> tuple[list[int], int]:
    """Monte-Carlo greedy: ``k`` rounds, each adding the best marginal vertex.

    Every non-selected vertex is scored with ``cfg.n_sims`` fresh cascades of
    (current seeds + vertex); ties go to the smallest id.  Returns the seeds
    in selection order and the number of cascades simulated.
    """
    k = cfg.k_seeds
    if k > g.n:
        raise ValueError(f"k_seeds={k} exceeds n={g.n}")
    chosen: list[int] = []
    taken = np.zeros(g.n, dtype=bool)
    sims = 0
    for rnd in range(k):
        best, best_val = -1, -np.inf
        for v in range(g.n):
            if taken[v]:
                continue
            out = estimate_influence(g, chosen + [v], cfg, (*stream, rnd, v))
            sims += cfg.n_sims
            if out.mean_influence > best_val:
                best, best_val = v, out.mean_influence
        chosen.append(best)
        taken[best] = True
    return chosen, sims


def top_k(scores: np.ndarray, k: int) -> list[int]:
    """Indices of the ``k`` largest scores, ties to the smallest index."""
    order = np.lexsort((np.arange(len(scores)), -np.asarray(scores)))
    return order[:k].tolist()


def embedding_seed_selection(g: Graph, layout_cfg: LayoutConfig, k: int) -> list[int]:
    """The ``k`` vertices farthest from the origin in the refined layout."""
    if k > g.n:
        raise ValueError(f"k={k} exceeds n={g.n}")
    return top_k(radial_scores(embed(g, layout_cfg)), k)


def _summary(outcomes: list[CascadeOutcome], times: list[float], sims: list[int], seeds: list[list[int]], reported: str) -> dict:
    counts = np.concatenate([o.counts for o in outcomes])
    means = np.array([o.mean_influence for o in outcomes])
    selection = int(np.mean(sims))
    evaluation = outcomes[0].total_simulations
    return {
        "influence_mean": float(means.mean()),
        "influence_std": float(np.std(counts, ddof=1)) if len(counts) > 1 else 0.0,
        "influence_mean_per_repeat": means.tolist(),
        "total_simulations": selection if reported == "selection" else evaluation,
        "selection_simulations": selection,
        "evaluation_simulations": evaluation,
        "wall_time_seconds": float(np.mean(times)),
        "wall_time_std": float(np.std(times, ddof=1)) if len(times) > 1 else 0.0,
        "wall_time_per_repeat": times,
        "seeds_per_repeat": seeds,
    }


def benchmark_influence(g: Graph, layout_cfg: LayoutConfig, cascade_cfg: CascadeConfig, repeats: int = 1) -> dict:
    """Greedy vs. radial seed selection, each evaluated on fresh cascades.

    Wall time per method covers selection plus the ``n_sims`` evaluation
    cascades.  ``total_simulations`` follows the usual table accounting: the
    cascades greedy spends choosing seeds, and the evaluation cascades for the
    embedding, which needs none to choose.  Both counts are also reported
    separately.  ``influence_std`` pools every evaluation cascade across
    repeats.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    res = {"greedy": ([], [], [], []), "embedding": ([], [], [], [])}
    for r in range(repeats):
        t0 = time.perf_counter()
        seeds, sims = greedy_seed_selection(g, cascade_cfg, ("greedy", r))
        out = estimate_influence(g, seeds, cascade_cfg, ("eval-greedy", r))
        elapsed = time.perf_counter() - t0
        for lst, val in zip(res["greedy"], (out, elapsed, sims, seeds)):
            lst.append(val)

        t0 = time.perf_counter()
        seeds = embedding_seed_selection(g, layout_cfg, cascade_cfg.k_seeds)
        out = estimate_influence(g, seeds, cascade_cfg, ("eval-embedding", r))
        elapsed = time.perf_counter() - t0
        for lst, val in zip(res["embedding"], (out, elapsed, 0, seeds)):
            lst.append(val)
    return {
        "methods": {
            "greedy": _summary(*res["greedy"], reported="selection"),
            "embedding": _summary(*res["embedding"], reported="evaluation"),
        },
        "repeats": repeats,
        "layout_config": layout_cfg.to_dict(),
        "cascade_config": cascade_cfg.to_dict(),
        "graph": {"n": g.n, "m": g.m},
    }
