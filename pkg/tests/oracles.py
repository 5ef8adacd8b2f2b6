"""Brute-force reference implementations, written without the package's code paths."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def adjacency_sets(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def all_pairs_hops(n, edges):
    """Floyd-Warshall hop distances; ``inf`` between components."""
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in edges:
        d[u, v] = d[v, u] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def shortest_paths(adj, dist, s, t):
    """Every shortest s-t path as a vertex tuple, by exhaustive walk."""
    if not np.isfinite(dist[s, t]):
        return []
    out = []

    def walk(path):
        v = path[-1]
        if v == t:
            out.append(tuple(path))
            return
        for w in sorted(adj[v]):
            if dist[w, t] == dist[v, t] - 1:
                walk(path + [w])

    walk([s])
    return out


def betweenness(n, edges):
    """Fraction of shortest paths through each interior vertex, summed over unordered pairs."""
    adj = adjacency_sets(n, edges)
    dist = all_pairs_hops(n, edges)
    total = [Fraction(0)] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = shortest_paths(adj, dist, s, t)
        if not paths:
            continue
        for path in paths:
            for v in path[1:-1]:
                total[v] += Fraction(1, len(paths))
    if n <= 2:
        return np.zeros(n)
    scale = Fraction(2, (n - 1) * (n - 2))
    return np.array([float(x * scale) for x in total])


def load(n, edges):
    """Unit packet from s to t, split evenly over next hops toward t; ordered pairs, halved."""
    adj = adjacency_sets(n, edges)
    dist = all_pairs_hops(n, edges)
    total = [Fraction(0)] * n
    for s in range(n):
        for t in range(n):
            if s == t or not np.isfinite(dist[s, t]):
                continue
            mass = {s: Fraction(1)}
            frontier = [s]
            while frontier:
                nxt = {}
                for v in frontier:
                    if v == t:
                        continue
                    hops = [w for w in sorted(adj[v]) if dist[w, t] == dist[v, t] - 1]
                    for w in hops:
                        nxt[w] = nxt.get(w, Fraction(0)) + mass[v] / len(hops)
                for w, val in nxt.items():
                    if w != t:
                        total[w] += val
                mass = nxt
                frontier = list(nxt)
    if n <= 2:
        return np.zeros(n)
    scale = Fraction(1, (n - 1) * (n - 2))
    return np.array([float(x * scale) for x in total])


def pagerank_dense(n, edges, alpha=0.85):
    """Solve ``(I - alpha M) x = (1 - alpha)/n`` with dangling columns spread uniformly."""
    A = np.zeros((n, n))
    for u, v in edges:
        A[u, v] = A[v, u] = 1
    deg = A.sum(axis=0)
    M = np.where(deg > 0, A / np.where(deg > 0, deg, 1), 1.0 / n)
    x = np.linalg.solve(np.eye(n) - alpha * M, np.full(n, (1 - alpha) / n))
    return x / x.sum()


def proper_crossing(a, b, c, d):
    """Strict segment crossing via signed areas, evaluated in exact rationals."""
    a, b, c, d = ([Fraction(float(z)) for z in pt] for pt in (a, b, c, d))

    def area(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    return area(a, b, c) * area(a, b, d) < 0 and area(c, d, a) * area(c, d, b) < 0


def crossings(xy, edges):
    """All crossing edge-index pairs (e < f) by direct O(E^2) comparison."""
    found = set()
    for e in range(len(edges)):
        for f in range(e + 1, len(edges)):
            u, v = edges[e]
            w, x = edges[f]
            if len({u, v, w, x}) < 4:
                continue
            if proper_crossing(xy[:, u], xy[:, v], xy[:, w], xy[:, x]):
                found.add((e, f))
    return found


def average_ranks(values):
    """1-based ranks with ties sharing their mean rank."""
    values = list(values)
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x, y):
    rx, ry = average_ranks(x), average_ranks(y)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def percentile(values, q):
    v = sorted(values)
    h = (len(v) - 1) * q / 100
    lo = math.floor(h)
    if lo + 1 >= len(v):
        return v[-1]
    return v[lo] + (h - lo) * (v[lo + 1] - v[lo])
