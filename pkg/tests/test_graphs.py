from __future__ import annotations

import gzip
import math

import numpy as np
import pytest

from radial_embed.graphs import (
    EdgeListParseError,
    Graph,
    VertexMap,
    dump_edge_list,
    gen_balanced_tree,
    gen_erdos_renyi,
    gen_grid,
    gen_powerlaw_cluster,
    gen_watts_strogatz,
    induced_subgraph,
    is_connected,
    largest_connected_component,
    load_edge_list,
    read_edge_list,
    subsample_vertices,
)


def test_parse_skips_comments():
    g, vmap = load_edge_list("# comment\n0 1\n1 2\n")
    assert g.n == 3
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert vmap == VertexMap.identity(3)


def test_parse_dedup_selfloop_compaction():
    g, vmap = load_edge_list("5 7\n7 5\n5 5\n")
    assert g.n == 2
    assert g.edge_set() == {(0, 1)}
    assert vmap.to_compact() == {5: 0, 7: 1}


def test_parse_tabs_and_blank_lines():
    g, _ = load_edge_list("\n10\t20\n\n20 30\n")
    assert (g.n, g.m) == (3, 2)


@pytest.mark.parametrize("text, lineno", [("0 1\n1 x\n", 2), ("0 1 2\n", 1), ("# ok\n\n3\n", 3)])
def test_parse_errors_name_the_line(text, lineno):
    with pytest.raises(EdgeListParseError) as info:
        load_edge_list(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_read_gz(tmp_path):
    path = tmp_path / "g.txt.gz"
    with gzip.open(path, "wt") as fh:
        fh.write("# snap\n1 2\n2 3\n")
    g, vmap = read_edge_list(path)
    assert (g.n, g.m) == (3, 2)
    assert vmap.original.tolist() == [1, 2, 3]


def test_dump_round_trip():
    g = gen_erdos_renyi(40, 0.1, seed=3)
    g, _ = largest_connected_component(g)
    text = dump_edge_list(g, ["hello"])
    assert text.startswith("# hello\n")
    back, vmap = load_edge_list(text)
    assert back == g
    assert vmap == VertexMap.identity(g.n)


def test_graph_normalizes_edges():
    g = Graph.from_edges(4, [(2, 1), (1, 2), (3, 3), (0, 3)])
    assert g.edges.tolist() == [[0, 3], [1, 2]]
    assert not g.edges.flags.writeable
    assert g.degrees.tolist() == [1, 1, 1, 1]
    assert g.has_edge(3, 0) and not g.has_edge(0, 1)
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 2)])


def test_lcc_tie_goes_to_vertex_zero():
    # triangles {0,4,5} and {1,2,3}: equal size
    g = Graph.from_edges(6, [(1, 2), (2, 3), (1, 3), (0, 4), (4, 5), (0, 5)])
    lcc, vmap = largest_connected_component(g)
    assert vmap.original.tolist() == [0, 4, 5]
    assert lcc.m == 3


def test_lcc_drops_isolated_vertex():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4)])
    lcc, vmap = largest_connected_component(g)
    assert lcc == gen_balanced_tree(1, 4)
    assert vmap.original.tolist() == [0, 1, 2, 3, 4]


def test_lcc_empty_graph_errors():
    with pytest.raises(ValueError):
        largest_connected_component(Graph.from_edges(0, []))


def test_induced_subgraph_and_compose():
    g = gen_grid(2, 2)
    sub, outer = induced_subgraph(g, [0, 1, 3, 4, 8])
    assert sub.edge_set() == {(0, 1), (0, 2), (1, 3), (2, 3)}
    lcc, inner = largest_connected_component(sub)
    assert outer.compose(inner).original.tolist() == [0, 1, 3, 4]


def test_er_extremes():
    assert gen_erdos_renyi(4, 0.0, seed=1).m == 0
    assert gen_erdos_renyi(4, 1.0, seed=1).m == 6


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_er_edge_count_within_four_sigma(seed):
    n, p = 1000, 0.025
    pairs = n * (n - 1) / 2
    g = gen_erdos_renyi(n, p, seed)
    assert abs(g.m - pairs * p) <= 4 * math.sqrt(pairs * p * (1 - p))


def test_generators_deterministic_per_seed():
    assert gen_erdos_renyi(200, 0.05, 7) == gen_erdos_renyi(200, 0.05, 7)
    assert gen_erdos_renyi(200, 0.05, 7) != gen_erdos_renyi(200, 0.05, 8)
    assert gen_watts_strogatz(100, 4, 0.3, 5) == gen_watts_strogatz(100, 4, 0.3, 5)
    assert gen_powerlaw_cluster(100, 2, 0.5, 5) == gen_powerlaw_cluster(100, 2, 0.5, 5)


def test_ws_ring():
    assert gen_watts_strogatz(6, 2, 0.0).edge_set() == {(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)}
    g = gen_watts_strogatz(10, 4, 0.0)
    assert g.m == 20
    assert set(g.degrees.tolist()) == {4}


def test_ws_rewiring_keeps_edge_count():
    assert gen_watts_strogatz(1000, 10, 0.1, seed=4).m == 5000


def test_ws_rejects_k_ge_n():
    with pytest.raises(ValueError):
        gen_watts_strogatz(4, 4, 0.1)


def test_powerlaw_small_case():
    # clique on {0,1}, then vertex 2 links to both
    g = gen_powerlaw_cluster(3, 2, 0.7, seed=0)
    assert g.edge_set() == {(0, 1), (0, 2), (1, 2)}


@pytest.mark.parametrize("seed", [0, 1])
def test_powerlaw_edge_count(seed):
    g = gen_powerlaw_cluster(100, 2, 0.0, seed)
    # the first three vertices always close into a triangle, then 97 vertices add 2 edges each
    e0 = 3
    assert g.m == 2 * (100 - 3) + e0
    assert is_connected(g)


def test_tree_sizes():
    assert gen_balanced_tree(3, 1).edge_set() == {(0, 1), (0, 2), (0, 3)}
    assert gen_balanced_tree(3, 8).n == (3 ** 9 - 1) // 2 == 9841
    assert gen_balanced_tree(1, 5).edge_set() == {(i, i + 1) for i in range(5)}


def test_grid_counts():
    g = gen_grid(1, 1)
    assert (g.n, g.m) == (4, 4)
    g = gen_grid(30, 40)
    assert (g.n, g.m) == (1271, 30 * 41 + 31 * 40)
    g = gen_grid(1, 2)
    assert (g.n, g.m) == (6, 7)


def test_subsample_full_fraction_is_lcc():
    g = gen_erdos_renyi(80, 0.03, seed=2)
    a, amap = subsample_vertices(g, 1.0, seed=9)
    b, bmap = largest_connected_component(g)
    assert a == b and amap == bmap


def test_subsample_complete_graph():
    k10 = gen_erdos_renyi(10, 1.0)
    sub, vmap = subsample_vertices(k10, 0.5, seed=3)
    assert sub.n == 5 and sub.m == 10
    assert len(set(vmap.original.tolist())) == 5
    assert sub == Graph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])


def test_subsample_map_points_to_original_edges():
    g = gen_erdos_renyi(300, 0.02, seed=1)
    sub, vmap = subsample_vertices(g, 0.6, seed=4)
    orig = vmap.original
    assert all(g.has_edge(int(orig[u]), int(orig[v])) for u, v in sub.edges)
    assert is_connected(sub)


def test_subsample_bad_fraction():
    with pytest.raises(ValueError):
        subsample_vertices(gen_grid(2, 2), 0.0)


def test_compaction_order_matches_sorted_labels():
    rng = np.random.default_rng(0)
    labels = rng.choice(10_000, size=30, replace=False)
    pairs = [(labels[i], labels[(i + 1) % 30]) for i in range(30)]
    g, vmap = load_edge_list("".join(f"{a} {b}\n" for a, b in pairs))
    assert vmap.original.tolist() == sorted(labels.tolist())
    comp = vmap.to_compact()
    assert g.edge_set() == {tuple(sorted((comp[a], comp[b]))) for a, b in pairs}
