"""Batch command line: generate graphs, embed, benchmark, dump layouts.

Settings resolve in three layers: built-in defaults, then an optional JSON
file given with ``--config`` (flat dotted keys such as ``"layout.dim"``),
then explicit flags.  Every output carries the resolved settings so a run
describes itself.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence

from . import __version__
from .bench import FAMILY_DEFAULTS, LAYOUT_KINDS, GraphSpec, StageError, bench_centrality, bench_influence, build_graph, layout_positions
from .centrality import CentralityError, Measure
from .graphs import EdgeListParseError, dump_edge_list
from .influence import CascadeConfig
from .layout import LayoutConfig, normalize, positions_to_csv
from .spectral import SpectralError, spectral_init
from .stats import UndefinedCorrelationError

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC_ERRORS = (
    FloatingPointError,
    SpectralError,
    CentralityError,
    UndefinedCorrelationError,
    np.linalg.LinAlgError,
    ArpackError,
    ArpackNoConvergence,
)

# dotted config key -> (argparse dest, built-in default)
SETTINGS: dict[str, tuple[str, Any]] = {
    "graph.input": ("input", None),
    "graph.family": ("family", None),
    "graph.n": ("n", None),
    "graph.p": ("p", None),
    "graph.k": ("k", None),
    "graph.beta": ("beta", None),
    "graph.m": ("m", None),
    "graph.r": ("r", None),
    "graph.h": ("h", None),
    "graph.rows": ("rows", None),
    "graph.cols": ("cols", None),
    "graph.fraction": ("fraction", None),
    "layout.kind": ("layout", "force"),
    "layout.dim": ("dim", LayoutConfig.dim),
    "layout.iterations": ("iterations", LayoutConfig.iterations),
    "layout.k_attr": ("k_attr", LayoutConfig.k_attr),
    "layout.k_inter": ("k_inter", LayoutConfig.k_inter),
    "layout.l_min": ("l_min", LayoutConfig.l_min),
    "layout.eps": ("eps", LayoutConfig.eps),
    "layout.knn_k": ("knn_k", LayoutConfig.knn_k),
    "layout.crossing_mode": ("crossing_mode", LayoutConfig.crossing_mode),
    "layout.damping": ("damping", LayoutConfig.damping),
    "layout.midpoint_cap": ("midpoint_cap", LayoutConfig.midpoint_sample_cap),
    "stats.bootstrap_b": ("bootstrap_b", 1000),
    "stats.gamma": ("gamma", 0.95),
    "stats.measures": ("measures", [m.value for m in Measure]),
    "cascade.p_ic": ("p_ic", CascadeConfig.p_ic),
    "cascade.k_seeds": ("k_seeds", CascadeConfig.k_seeds),
    "cascade.n_sims": ("n_sims", CascadeConfig.n_sims),
    "cascade.repeats": ("repeats", 1),
    "seed": ("seed", 0),
    "out": ("out", None),
}
_DEST_TO_KEY = {dest: key for key, (dest, _) in SETTINGS.items()}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ parser


def _graph_flags(p: argparse.ArgumentParser, family_flag: bool = True) -> None:
    g = p.add_argument_group("graph source")
    g.add_argument("--input", help="SNAP edge list (.gz allowed)")
    if family_flag:
        g.add_argument("--family", choices=sorted(FAMILY_DEFAULTS), help="generator family")
    for name, typ in (("n", int), ("p", float), ("k", int), ("beta", float), ("m", int), ("r", int), ("h", int), ("rows", int), ("cols", int)):
        g.add_argument(f"--{name}", type=typ, help="generator parameter")
    g.add_argument("--fraction", type=float, help="keep a random vertex fraction before taking the largest component")


def _layout_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("layout")
    g.add_argument("--layout", choices=LAYOUT_KINDS, help="force (default), laplacian-only or spectral-only")
    g.add_argument("--dim", type=int)
    g.add_argument("--iterations", type=int)
    g.add_argument("--k-attr", dest="k_attr", type=float)
    g.add_argument("--k-inter", dest="k_inter", type=float)
    g.add_argument("--l-min", dest="l_min", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--knn-k", dest="knn_k", type=int)
    g.add_argument("--crossing-mode", dest="crossing_mode", choices=("exact", "knn"))
    g.add_argument("--damping", type=float)
    g.add_argument("--midpoint-cap", dest="midpoint_cap", type=int, help="midpoint sample cap; 0 disables sampling")


def _stats_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("statistics")
    g.add_argument("--bootstrap-b", dest="bootstrap_b", type=int)
    g.add_argument("--gamma", type=float)
    g.add_argument("--measures", type=lambda s: [x.strip() for x in s.split(",") if x.strip()], help="comma-separated subset")


def _cascade_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("cascade")
    g.add_argument("--p-ic", dest="p_ic", type=float)
    g.add_argument("--k-seeds", dest="k_seeds", type=int)
    g.add_argument("--n-sims", dest="n_sims", type=int)
    g.add_argument("--repeats", type=int)


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="global seed for every random stream")
    p.add_argument("--out", help="output directory (output file for generate)")
    p.add_argument("--config", help="JSON file of dotted keys; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radial-embed", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("generate", help="write a generated graph as a SNAP edge list")
    p.add_argument("family", nargs="?", choices=sorted(FAMILY_DEFAULTS))
    p.add_argument("--family", dest="family_flag", choices=sorted(FAMILY_DEFAULTS), help=argparse.SUPPRESS)
    _graph_flags(p, family_flag=False)
    _common_flags(p)

    p = sub.add_parser("embed", help="embed a graph and write positions")
    _graph_flags(p)
    _layout_flags(p)
    _common_flags(p)

    p = sub.add_parser("bench-centrality", help="radial score vs. centrality correlation table")
    _graph_flags(p)
    _layout_flags(p)
    _stats_flags(p)
    _common_flags(p)

    p = sub.add_parser("bench-influence", help="greedy vs. radial seed selection")
    _graph_flags(p)
    _layout_flags(p)
    _cascade_flags(p)
    _common_flags(p)

    p = sub.add_parser("dump-layout", help="initial and final positions for plotting")
    _graph_flags(p)
    _layout_flags(p)
    _common_flags(p)
    return parser


# ---------------------------------------------------------------- settings


def load_config_file(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(SETTINGS))
    if unknown:
        raise UsageError(f"unknown config keys {unknown}; known keys: {sorted(SETTINGS)}")
    return data


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, config file and flags into one dotted-key mapping."""
    values = {key: default for key, (_, default) in SETTINGS.items()}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for dest, val in vars(args).items():
        if dest in _DEST_TO_KEY and val is not None:
            values[_DEST_TO_KEY[dest]] = val
    return values


def graph_spec(values: dict) -> GraphSpec:
    params = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("graph.") and k not in ("graph.input", "graph.family", "graph.fraction")}
    try:
        return GraphSpec(
            family=values["graph.family"],
            params=params,
            path=values["graph.input"],
            seed=int(values["seed"]),
            subsample=values["graph.fraction"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def layout_config(values: dict) -> LayoutConfig:
    cap = values["layout.midpoint_cap"]
    try:
        return LayoutConfig(
            dim=int(values["layout.dim"]),
            k_attr=float(values["layout.k_attr"]),
            k_inter=float(values["layout.k_inter"]),
            l_min=float(values["layout.l_min"]),
            eps=float(values["layout.eps"]),
            iterations=int(values["layout.iterations"]),
            knn_k=int(values["layout.knn_k"]),
            midpoint_sample_cap=None if not cap else int(cap),
            damping=float(values["layout.damping"]),
            seed=int(values["seed"]),
            crossing_mode=values["layout.crossing_mode"],
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid layout settings: {exc}") from exc


def cascade_config(values: dict) -> CascadeConfig:
    try:
        return CascadeConfig(
            p_ic=float(values["cascade.p_ic"]),
            k_seeds=int(values["cascade.k_seeds"]),
            n_sims=int(values["cascade.n_sims"]),
            seed=int(values["seed"]),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid cascade settings: {exc}") from exc


# ----------------------------------------------------------------- output


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _echo_line(echo: dict) -> str:
    return "# config: " + json.dumps(echo, sort_keys=True, separators=(",", ":"), default=_json_default) + "\n"


def _out_dir(values: dict, command: str) -> Path:
    out = Path(values["out"] or f"radial_embed_{command.replace('-', '_')}")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _echo(command: str, values: dict, **extra) -> dict:
    settings = {k: v for k, v in values.items() if k != "out"}
    return {"command": command, "version": __version__, "settings": settings, **extra}


# --------------------------------------------------------------- commands


def cmd_generate(values: dict) -> int:
    spec = graph_spec(values)
    if spec.family is None:
        raise UsageError("generate needs a family")
    from .bench import generate

    try:
        g = generate(spec.family, spec.resolved_params(), spec.seed)
    except ValueError as exc:
        raise UsageError(f"bad generator parameters: {exc}") from exc
    echo = {"family": spec.family, "params": spec.resolved_params(), "seed": spec.seed, "version": __version__}
    text = dump_edge_list(g, ["radial-embed generate", "config: " + json.dumps(echo, sort_keys=True)])
    if values["out"]:
        path = Path(values["out"])
        path.parent.mkdir(parents=True, exist_ok=True)
        _write(path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _prepare(command: str, values: dict):
    spec = graph_spec(values)
    cfg = layout_config(values)
    kind = values["layout.kind"]
    if kind not in LAYOUT_KINDS:
        raise UsageError(f"unknown layout {kind!r}")
    g, vmap, prov = build_graph(spec)
    if g.n <= cfg.dim + 1:
        raise ValueError(f"largest component has {g.n} vertices; need more than dim+1={cfg.dim + 1}")
    echo = _echo(command, values, graph=prov, layout_config=cfg.to_dict())
    return g, vmap, cfg, kind, echo


def cmd_embed(values: dict) -> int:
    g, vmap, cfg, kind, echo = _prepare("embed", values)
    try:
        p = layout_positions(g, cfg, kind)
    except Exception as exc:
        raise StageError("embed", exc) from exc
    out = _out_dir(values, "embed")
    _write(out / "positions.csv", _echo_line(echo) + positions_to_csv(p, {"label": vmap.original}))
    _write(out / "embed.json", _dumps({"config": echo}))
    return EXIT_OK


def cmd_bench_centrality(values: dict) -> int:
    g, _, cfg, kind, echo = _prepare("bench-centrality", values)
    measures = values["stats.measures"]
    if isinstance(measures, str):
        measures = [m.strip() for m in measures.split(",") if m.strip()]
    try:
        measures = [Measure(m) for m in measures]
    except ValueError as exc:
        raise UsageError(f"unknown measure: {exc}") from exc
    res = bench_centrality(
        g,
        cfg,
        measures,
        bootstrap_b=int(values["stats.bootstrap_b"]),
        gamma=float(values["stats.gamma"]),
        seed=int(values["seed"]),
        layout=kind,
    )
    out = _out_dir(values, "bench-centrality")
    cols = ["measure", "rho", "ci_low", "ci_high", "p_value", "n", "skipped_resamples"]
    lines = [",".join(cols)]
    for row in res["rows"]:
        lines.append(",".join(f"{row[c]:.17g}" if isinstance(row[c], float) else str(row[c]) for c in cols))
    _write(out / "correlations.csv", _echo_line(echo) + "\n".join(lines) + "\n")
    _write(out / "correlations.json", _dumps({"config": echo, "rows": res["rows"], "runtime_seconds": res["runtime_seconds"]}))
    for row in res["rows"]:
        print(f"{row['measure']:<12} rho={row['rho']:+.3f} CI=[{row['ci_low']:+.3f}, {row['ci_high']:+.3f}] p={row['p_value']:.3g}")
    return EXIT_OK


def cmd_bench_influence(values: dict) -> int:
    g, _, cfg, kind, echo = _prepare("bench-influence", values)
    if kind != "force":
        raise UsageError("bench-influence ranks seeds with the force layout only")
    ccfg = cascade_config(values)
    repeats = int(values["cascade.repeats"])
    if repeats < 1:
        raise UsageError("repeats must be at least 1")
    if ccfg.k_seeds > g.n:
        raise ValueError(f"k_seeds={ccfg.k_seeds} exceeds the {g.n} vertices of the largest component")
    res = bench_influence(g, cfg, ccfg, repeats)
    out = _out_dir(values, "bench-influence")
    _write(out / "influence.json", _dumps({"config": echo, **res}))
    for name, m in res["methods"].items():
        print(f"{name:<10} influence={m['influence_mean']:.2f}±{m['influence_std']:.2f} sims={m['total_simulations']} time={m['wall_time_seconds']:.3f}s")
    return EXIT_OK


def _unit_degree(g) -> np.ndarray:
    deg = g.degrees.astype(float)
    span = deg.max() - deg.min()
    return (deg - deg.min()) / span if span > 0 else np.zeros(g.n)


def cmd_dump_layout(values: dict) -> int:
    g, vmap, cfg, kind, echo = _prepare("dump-layout", values)
    try:
        if kind == "force":
            init = normalize(spectral_init(g, cfg.dim, cfg.scale_by_inv_sqrt_lambda), cfg.eps)
            from .layout import embed

            final = embed(g, cfg, init=init)
        else:
            init = final = layout_positions(g, cfg, kind)
    except Exception as exc:
        raise StageError("embed", exc) from exc
    extra = {"degree": _unit_degree(g), "label": vmap.original}
    out = _out_dir(values, "dump-layout")
    _write(out / "layout_initial.csv", _echo_line({**echo, "stage": "initial"}) + positions_to_csv(init, extra))
    _write(out / "layout_final.csv", _echo_line({**echo, "stage": "final"}) + positions_to_csv(final, extra))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "embed": cmd_embed,
    "bench-centrality": cmd_bench_centrality,
    "bench-influence": cmd_bench_influence,
    "dump-layout": cmd_dump_layout,
}


def _exit_code(exc: BaseException) -> int:
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, _NUMERIC_ERRORS):
        return EXIT_NUMERIC
    return EXIT_DATA


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "generate" and getattr(args, "family_flag", None):
        if args.family and args.family != args.family_flag:
            parser.error("family given twice with different values")
        args.family = args.family_flag
    try:
        values = resolve(args)
        return COMMANDS[args.command](values)
    except UsageError as exc:
        print(f"radial-embed: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListParseError) as exc:
        print(f"radial-embed: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - mapped to an exit code
        code = _exit_code(exc)
        kind = "numerical failure" if code == EXIT_NUMERIC else "data error"
        print(f"radial-embed: {kind}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
