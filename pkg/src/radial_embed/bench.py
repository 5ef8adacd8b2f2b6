"""End-to-end benchmark drivers shared by the CLI and the acceptance suite."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import graphs
from .baselines import laplacian_eigenmap, spectral_only_positions
from .centrality import Measure, compute
from .graphs import Graph, VertexMap
from .influence import CascadeConfig, benchmark_influence
from .layout import LayoutConfig, embed, radial_scores
from .stats import correlation_report

__all__ = [
    "GraphSpec",
    "StageError",
    "LAYOUT_KINDS",
    "build_graph",
    "layout_positions",
    "bench_centrality",
    "bench_influence",
]

# force: the refined layout; laplacian-only: the classic Laplacian eigenmap
# control; spectral-only: the refined layout's own starting point
LAYOUT_KINDS = ("force", "laplacian-only", "spectral-only")

FAMILY_DEFAULTS: dict[str, dict[str, Any]] = {
    "er": {"n": 1000, "p": 0.025},
    "ws": {"n": 1000, "k": 10, "beta": 0.1},
    "powerlaw": {"n": 1000, "m": 2, "p": 0.3},
    "tree": {"r": 3, "h": 8},
    "grid": {"rows": 30, "cols": 40},
}


class StageError(RuntimeError):
    """Wraps a failure with the pipeline stage it came from."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class GraphSpec:
    """Either an edge-list path or a generator family with parameters."""

    family: str | None = None
    params: dict = field(default_factory=dict)
    path: str | None = None
    seed: int = 0
    subsample: float | None = None

    def __post_init__(self):
        if (self.family is None) == (self.path is None):
            raise ValueError("give exactly one of an input path or a generator family")
        if self.family is not None and self.family not in FAMILY_DEFAULTS:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILY_DEFAULTS)}")

    def resolved_params(self) -> dict:
        if self.family is None:
            return {}
        out = dict(FAMILY_DEFAULTS[self.family])
        out.update({k: v for k, v in self.params.items() if k in out and v is not None})
        return out

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.resolved_params(),
            "path": self.path,
            "seed": self.seed,
            "subsample": self.subsample,
        }


def generate(family: str, params: dict, seed: int) -> Graph:
    if family == "er":
        return graphs.gen_erdos_renyi(int(params["n"]), float(params["p"]), seed)
    if family == "ws":
        return graphs.gen_watts_strogatz(int(params["n"]), int(params["k"]), float(params["beta"]), seed)
    if family == "powerlaw":
        return graphs.gen_powerlaw_cluster(int(params["n"]), int(params["m"]), float(params["p"]), seed)
    if family == "tree":
        return graphs.gen_balanced_tree(int(params["r"]), int(params["h"]))
    if family == "grid":
        return graphs.gen_grid(int(params["rows"]), int(params["cols"]))
    raise ValueError(f"unknown family {family!r}")


def build_graph(spec: GraphSpec) -> tuple[Graph, VertexMap, dict]:
    """Load or generate, optionally subsample, then keep the largest component.

    Returns the graph, the map back to the source's vertex labels, and a
    provenance record.
    """
    if spec.path is not None:
        g, vmap = graphs.read_edge_list(spec.path)
    else:
        g = generate(spec.family, spec.resolved_params(), spec.seed)
        vmap = VertexMap.identity(g.n)
    source = {"n": g.n, "m": g.m}
    if spec.subsample is not None:
        sub, inner = graphs.subsample_vertices(g, spec.subsample, spec.seed)
    else:
        sub, inner = graphs.largest_connected_component(g)
    prov = {
        **spec.to_dict(),
        "source_n": source["n"],
        "source_m": source["m"],
        "n": sub.n,
        "m": sub.m,
        "edge_fraction_retained": sub.m / source["m"] if source["m"] else 0.0,
    }
    return sub, vmap.compose(inner), prov


def layout_positions(g: Graph, cfg: LayoutConfig, kind: str = "force") -> np.ndarray:
    if kind == "force":
        return embed(g, cfg)
    if kind == "laplacian-only":
        return laplacian_eigenmap(g, cfg.dim)
    if kind == "spectral-only":
        return spectral_only_positions(g, cfg.dim, cfg.eps)
    raise ValueError(f"unknown layout kind {kind!r}; choose from {LAYOUT_KINDS}")


def bench_centrality(
    g: Graph,
    cfg: LayoutConfig,
    measures: Sequence[Measure | str] = tuple(Measure),
    bootstrap_b: int = 1000,
    gamma: float = 0.95,
    seed: int = 0,
    layout: str = "force",
    positions: np.ndarray | None = None,
) -> dict:
    """Spearman of radial distance against each centrality, with bootstrap CI and p."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    try:
        p = positions if positions is not None else layout_positions(g, cfg, layout)
    except Exception as exc:
        raise StageError("embed", exc) from exc
    timings["embed"] = time.perf_counter() - t0
    radial = radial_scores(p)
    echo = {"layout": layout, "layout_config": cfg.to_dict(), "bootstrap_b": bootstrap_b, "gamma": gamma, "seed": seed}
    rows = []
    for m in measures:
        m = Measure(m)
        t0 = time.perf_counter()
        try:
            scores = compute(g, m).scores
        except Exception as exc:
            raise StageError(f"centrality[{m.value}]", exc) from exc
        timings[m.value] = time.perf_counter() - t0
        # every measure is resampled with the same index stream, so the
        # intervals are paired across columns
        try:
            rep = correlation_report(radial, scores, m.value, B=bootstrap_b, gamma=gamma, seed=seed)
        except Exception as exc:
            raise StageError(f"stats[{m.value}]", exc) from exc
        row = rep.to_dict()
        row.pop("config")
        rows.append(row)
    return {
        "rows": rows,
        "config": echo,
        "graph": {"n": g.n, "m": g.m},
        "runtime_seconds": timings,
        "radial": radial,
    }


def bench_influence(g: Graph, layout_cfg: LayoutConfig, cascade_cfg: CascadeConfig, repeats: int = 1) -> dict:
    try:
        return benchmark_influence(g, layout_cfg, cascade_cfg, repeats)
    except Exception as exc:
        raise StageError("influence", exc) from exc


def default_dataset_path(name: str) -> Path | None:
    """Look for a SNAP file under ``$RADIAL_EMBED_DATA`` or ``./data``."""
    import os

    roots = [os.environ.get("RADIAL_EMBED_DATA"), "data", str(Path(__file__).resolve().parents[2] / "data")]
    for root in filter(None, roots):
        for suffix in ("", ".txt", ".txt.gz", ".gz"):
            cand = Path(root) / f"{name}{suffix}"
            if cand.is_file():
                return cand
    return None
