"""Independent reference computations used to check the library.

None of these import the code under test; they are deliberately naive.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np


def levenshtein_recursive(a: str, b: str) -> int:
    """Levenshtein distance straight from its recursive definition."""

    @lru_cache(maxsize=None)
    def lev(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            lev(i - 1, j) + 1,
            lev(i, j - 1) + 1,
            lev(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return lev(len(a), len(b))


def spherical_distance_mp(lat1, lon1, lat2, lon2, radius="6371.0088", dps=50) -> float:
    """Great-circle distance via the atan2 (Vincenty sphere) form at high precision."""
    with mpmath.workdps(dps):
        p1, l1, p2, l2 = (mpmath.radians(mpmath.mpf(str(x))) for x in (lat1, lon1, lat2, lon2))
        dl = l2 - l1
        num = mpmath.sqrt((mpmath.cos(p2) * mpmath.sin(dl)) ** 2
                          + (mpmath.cos(p1) * mpmath.sin(p2)
                             - mpmath.sin(p1) * mpmath.cos(p2) * mpmath.cos(dl)) ** 2)
        den = mpmath.sin(p1) * mpmath.sin(p2) + mpmath.cos(p1) * mpmath.cos(p2) * mpmath.cos(dl)
        return float(mpmath.mpf(radius) * mpmath.atan2(num, den))


def betweenness_bruteforce(nodes, edges) -> dict:
    """Exact betweenness by enumerating every geodesic of every unordered pair.

    Distances come from Floyd-Warshall; geodesics are listed explicitly by
    depth-first search, then each interior node gets its share per pair.
    """
    nodes = list(nodes)
    adj = {v: set() for v in nodes}
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    inf = float("inf")
    dist = {(u, v): (0 if u == v else (1 if v in adj[u] else inf)) for u in nodes for v in nodes}
    for k in nodes:
        for i in nodes:
            for j in nodes:
                if dist[i, k] + dist[k, j] < dist[i, j]:
                    dist[i, j] = dist[i, k] + dist[k, j]

    def geodesics(s, t):
        paths = []

        def walk(path):
            cur = path[-1]
            if cur == t:
                paths.append(list(path))
                return
            for nxt in adj[cur]:
                if dist[s, nxt] == len(path) and dist[nxt, t] == dist[s, t] - len(path):
                    path.append(nxt)
                    walk(path)
                    path.pop()

        walk([s])
        return paths

    score = {v: Fraction(0) for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        if dist[s, t] == inf:
            continue
        paths = geodesics(s, t)
        for v in nodes:
            if v in (s, t):
                continue
            through = sum(1 for p in paths if v in p[1:-1])
            score[v] += Fraction(through, len(paths))
    return score


def pagerank_dense(nodes, edges, directed: bool, damping=0.85, tol=1e-15, max_iter=10_000):
    """Google-matrix power iteration with numpy; dangling columns are uniform."""
    nodes = sorted(nodes)
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    for u, v in edges:
        if u == v:
            continue
        a[idx[v], idx[u]] = 1.0
        if not directed:
            a[idx[u], idx[v]] = 1.0
    out = a.sum(axis=0)
    m = np.where(out > 0, a / np.where(out > 0, out, 1), 1.0 / n)
    google = damping * m + (1 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = google @ x
        if np.abs(nxt - x).sum() < tol:
            x = nxt
            break
        x = nxt
    x = x / x.sum()
    return {v: float(x[idx[v]]) for v in nodes}


def clustering_bruteforce(nodes, edges) -> dict:
    adj = {v: set() for v in nodes}
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    out = {}
    for v in nodes:
        k = len(adj[v])
        if k < 2:
            out[v] = 0.0
            continue
        tri = sum(1 for a, b in itertools.combinations(adj[v], 2) if b in adj[a])
        out[v] = tri / (k * (k - 1) / 2)
    return out
