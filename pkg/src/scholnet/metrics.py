"""Network measures on institution graphs.

Centralities use the binarized, loop-free view of a graph: weights and
self-loops are ignored for degree, clustering, betweenness and PageRank.
Every ordering is by node id so repeated runs give identical output.
"""

from __future__ import annotations

import math
import statistics
import warnings
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyGraph, NoLocatedPairs, ZeroProductivity
from .geo import bin_range, distance_bin, great_circle_distance
from .netbuild import PaperIndex, WeightedGraph
from .resolve import CATEGORY_ORDER, CategoryCode

ALL = "ALL"


class NonConvergence(RuntimeWarning):
    pass


# --- collaboration strength -------------------------------------------------

def collaboration_strength(i: str, j: str, paper_index: PaperIndex) -> float:
    """Common papers of i and j divided by the product of their paper counts."""
    w_i, w_j = paper_index.count(i), paper_index.count(j)
    if w_i == 0:
        raise ZeroProductivity(i)
    if w_j == 0:
        raise ZeroProductivity(j)
    return paper_index.common(i, j) / (w_i * w_j)


# --- knowledge flow ---------------------------------------------------------

@dataclass(frozen=True)
class FlowScore:
    node: str
    f_in: float
    f_out: float
    k_in: int
    k_out: int
    w_in: float
    w_out: float


def flow_score(node: str, k_in: int, k_out: int, w_in: float, w_out: float) -> FlowScore:
    total = w_in + w_out
    if total > 0:
        f_out = k_in * w_in / total
        f_in = -(k_out * w_out / total)
    else:
        f_out = f_in = 0.0
    # normalize -0.0 so CSV output never shows a signed zero
    return FlowScore(node, f_in + 0.0, f_out, k_in, k_out, w_in, w_out)


def knowledge_flow(citation_graph: WeightedGraph) -> list[FlowScore]:
    """Per-node outflow (being cited) and inflow (citing), self-loops excluded.

    f_out is the in-degree scaled by the share of incoming citation weight;
    f_in is minus the out-degree scaled by the outgoing share.
    """
    k_in = {n: 0 for n in citation_graph.nodes}
    k_out = dict(k_in)
    w_in = {n: 0 for n in citation_graph.nodes}
    w_out = dict(w_in)
    for (u, v), w in citation_graph.edges.items():
        if u == v:
            continue
        k_out[u] += 1
        k_in[v] += 1
        w_out[u] += w
        w_in[v] += w
    return [
        flow_score(n, k_in[n], k_out[n], w_in[n], w_out[n])
        for n in citation_graph.sorted_nodes()
    ]


# --- centralities -----------------------------------------------------------

def degrees(g: WeightedGraph) -> dict[str, int]:
    return {n: len(nbrs) for n, nbrs in g.neighbors().items()}


def betweenness_all(g: WeightedGraph, exact: bool = False) -> dict[str, float]:
    """Unnormalized shortest-path betweenness (Brandes), undirected and unweighted.

    Each unordered (s, t) pair is counted once. Sources are processed in
    sorted order so the float result does not depend on dict ordering;
    ``exact=True`` accumulates rational dependencies and returns Fractions.
    """
    adj = g.neighbors()
    order = sorted(adj)
    nbrs = {v: sorted(adj[v]) for v in order}
    zero = Fraction(0) if exact else 0.0
    cb = {v: zero for v in order}
    for s in order:
        stack = []
        preds: dict[str, list[str]] = {v: [] for v in order}
        sigma = dict.fromkeys(order, 0)
        dist = dict.fromkeys(order, -1)
        sigma[s], dist[s] = 1, 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(order, zero)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                if exact:
                    delta[v] += Fraction(sigma[v], sigma[w]) * (1 + delta[w])
                else:
                    delta[v] += sigma[v] / sigma[w] * (1 + delta[w])
            if w != s:
                cb[w] += delta[w]
    return {v: c / 2 for v, c in cb.items()}


def pagerank(g: WeightedGraph, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 200) -> dict[str, float]:
    """Power-iteration PageRank on the unweighted graph.

    Undirected edges count in both directions; dangling nodes spread their
    mass uniformly. Stops when the L1 change drops below ``tol``; if that
    never happens a NonConvergence warning is issued and the last iterate
    is returned.
    """
    if not g.nodes:
        raise EmptyGraph()
    nodes = g.sorted_nodes()
    n = len(nodes)
    out = g.successors()
    incoming: dict[str, list[str]] = {v: [] for v in nodes}
    for u in nodes:
        for v in out[u]:
            incoming[v].append(u)
    outdeg = {u: len(out[u]) for u in nodes}
    dangling = [u for u in nodes if outdeg[u] == 0]
    x = dict.fromkeys(nodes, 1.0 / n)
    for _ in range(max_iter):
        leak = damping * math.fsum(x[u] for u in dangling) / n
        base = (1.0 - damping) / n + leak
        new = {
            v: base + damping * math.fsum(x[u] / outdeg[u] for u in incoming[v])
            for v in nodes
        }
        change = math.fsum(abs(new[v] - x[v]) for v in nodes)
        x = new
        if change < tol:
            break
    else:
        warnings.warn(f"pagerank did not converge in {max_iter} iterations", NonConvergence)
    total = math.fsum(x.values())
    return {v: x[v] / total for v in nodes}


def local_clustering(g: WeightedGraph) -> dict[str, float]:
    adj = g.neighbors()
    result = {}
    for v in sorted(adj):
        nbrs = sorted(adj[v])
        k = len(nbrs)
        if k < 2:
            result[v] = 0.0
            continue
        links = sum(1 for a, u in enumerate(nbrs) for w in nbrs[a + 1:] if w in adj[u])
        result[v] = links / (k * (k - 1) / 2)
    return result


@dataclass(frozen=True)
class NodeMetrics:
    degree: int
    clustering: float
    betweenness: float
    pagerank: float


def node_metrics(g: WeightedGraph, damping: float = 0.85) -> dict[str, NodeMetrics]:
    deg = degrees(g)
    clus = local_clustering(g)
    btw = betweenness_all(g)
    pr = pagerank(g, damping=damping) if g.nodes else {}
    return {n: NodeMetrics(deg[n], clus[n], btw[n], pr[n]) for n in g.sorted_nodes()}


@dataclass(frozen=True)
class CategorySummary:
    members: int
    avg_degree: float
    avg_clustering: float
    avg_betweenness: float
    avg_pagerank: float


def category_centrality_summary(g: WeightedGraph, categories: Mapping[str, object],
                                damping: float = 0.85,
                                metrics: Mapping[str, NodeMetrics] | None = None,
                                ) -> dict[str, CategorySummary]:
    """Mean of each node measure over the members of every category.

    Categories without members in ``g`` simply do not appear.
    """
    if metrics is None:
        metrics = node_metrics(g, damping)
    members: dict[str, list[str]] = {}
    for node in g.sorted_nodes():
        members.setdefault(str(categories[node]), []).append(node)
    summary = {}
    for cat in sorted(members, key=_category_rank):
        ms = [metrics[n] for n in members[cat]]
        size = len(ms)
        summary[cat] = CategorySummary(
            members=size,
            avg_degree=sum(m.degree for m in ms) / size,
            avg_clustering=sum(m.clustering for m in ms) / size,
            avg_betweenness=sum(m.betweenness for m in ms) / size,
            avg_pagerank=sum(m.pagerank for m in ms) / size,
        )
    return summary


def _category_rank(cat: str) -> tuple[int, str]:
    try:
        return CATEGORY_ORDER.index(CategoryCode(cat)), cat
    except ValueError:
        return len(CATEGORY_ORDER), cat


# --- components and hubs ----------------------------------------------------

def connected_components(g: WeightedGraph) -> list[list[str]]:
    """Weakly connected components, each as a sorted node list."""
    adj = g.neighbors()
    seen: set[str] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        seen.add(start)
        comp, queue = [], deque([start])
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def giant_connected_component(g: WeightedGraph) -> set[str]:
    """Largest weak component; ties go to the lexicographically smallest node list."""
    if not g.nodes:
        raise EmptyGraph()
    return set(min(connected_components(g), key=lambda c: (-len(c), c)))


def weighted_in_degree(g: WeightedGraph) -> dict[str, float]:
    win = dict.fromkeys(g.nodes, 0)
    for (u, v), w in g.edges.items():
        if u != v:
            win[v] += w
            if not g.directed:
                win[u] += w
    return win


def top_knowledge_hubs(citation_graph: WeightedGraph, k: int) -> list[tuple[str, float]]:
    if k < 1:
        raise ValueError("k must be at least 1")
    gcc = giant_connected_component(citation_graph)
    win = weighted_in_degree(citation_graph)
    ranked = sorted(gcc, key=lambda n: (-win[n], n))
    return [(n, win[n]) for n in ranked[:k]]


# --- distance profiles ------------------------------------------------------

@dataclass(frozen=True)
class BinStats:
    index: int
    lo_km: float
    hi_km: float
    pair_count: int
    event_weight: float
    mean: float | None
    median: float | None
    q1: float | None
    q3: float | None


@dataclass(frozen=True)
class DistanceProfile:
    bins: tuple[BinStats, ...]
    excluded_unlocated: int
    total_pairs: int

    def by_index(self) -> dict[int, BinStats]:
        return {b.index: b for b in self.bins}


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    if len(values) == 1:
        return values[0], values[0], values[0]
    q1, med, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, med, q3


def _pair_selected(cu: str, cv: str, category_filter) -> bool:
    if category_filter is None:
        return True
    y, x = category_filter
    y, x = str(y), str(x)
    if x == ALL:
        return y in (cu, cv)
    return (cu, cv) in ((y, x), (x, y))


def distance_profile(collab_graph: WeightedGraph, paper_index: PaperIndex,
                     locations: Mapping[str, object], category_filter=None,
                     categories: Mapping[str, object] | None = None) -> DistanceProfile:
    """Bin every collaborating pair by distance and summarize its strength.

    A pair collaborates when it shares an edge in ``collab_graph``
    (self-loops are intra-institution pairs at distance 0). Pairs with an
    unlocated endpoint are dropped and counted. ``category_filter`` is
    ``(Y, X)`` with X a category or ``"ALL"``.
    """
    def cat(n):
        if categories is not None:
            return str(categories[n])
        return str(collab_graph.nodes[n].get("category"))

    per_bin: dict[int, list[tuple[float, float]]] = {}
    excluded = total = 0
    for (u, v), w in sorted(collab_graph.edges.items()):
        if not _pair_selected(cat(u), cat(v), category_filter):
            continue
        total += 1
        pu, pv = locations.get(u), locations.get(v)
        if pu is None or pv is None:
            excluded += 1
            continue
        d = 0.0 if u == v else great_circle_distance(pu, pv)
        strength = collaboration_strength(u, v, paper_index)
        per_bin.setdefault(distance_bin(d), []).append((strength, w))
    if not per_bin:
        raise NoLocatedPairs()
    bins = []
    for k in range(1, max(per_bin) + 1):
        lo, hi = bin_range(k)
        items = per_bin.get(k, [])
        if not items:
            bins.append(BinStats(k, lo, hi, 0, 0, None, None, None, None))
            continue
        values = sorted(s for s, _ in items)
        q1, med, q3 = _quartiles(values)
        bins.append(BinStats(
            k, lo, hi, len(items), sum(w for _, w in items),
            math.fsum(values) / len(values), med, q1, q3,
        ))
    return DistanceProfile(tuple(bins), excluded, total)


# --- category tables --------------------------------------------------------

@dataclass(frozen=True)
class CategoryRow:
    category: str
    papers: int
    institutions: int

    @property
    def papers_per_institute(self) -> Fraction:
        return Fraction(self.papers, self.institutions)


def productivity_table(records, resolution, categories: Mapping[str, object] | None = None,
                       ) -> dict[str, CategoryRow]:
    """Distinct papers, institutions and papers per institute for each category.

    A paper counts once for every category among its institutions.
    """
    if categories is None:
        categories = resolution.categories()
    papers: dict[str, set[str]] = {}
    members: dict[str, set[str]] = {}
    for record in records:
        for cid in resolution.institutions_of(record):
            cat = str(categories[cid]) if cid in categories else str(resolution.category_of(cid))
            papers.setdefault(cat, set()).add(record.paper_id)
            members.setdefault(cat, set()).add(cid)
    return {
        cat: CategoryRow(cat, len(papers[cat]), len(members[cat]))
        for cat in sorted(papers, key=_category_rank)
    }


def productivity_order(table: Mapping[str, CategoryRow]) -> list[str]:
    """Categories by descending papers per institute, ties in table order."""
    return sorted(table, key=lambda c: (-table[c].papers_per_institute, _category_rank(c)))


def category_matrix(super_graph: WeightedGraph, order: list[str]) -> list[tuple[str, str, float]]:
    """Dense (row, column, weight) listing of a super-node graph in ``order``.

    Directed graphs read row -> column.
    """
    return [(r, c, super_graph.weight(r, c)) for r in order for c in order]
