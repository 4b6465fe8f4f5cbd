"""Institution collaboration and citation networks.

``WeightedGraph`` is deliberately small: a node attribute table and a dict
of edge weights. Undirected edges are keyed by the sorted endpoint pair so
each unordered pair (self-loops included) is stored exactly once.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .resolve import ResolutionMap

EDGE_WEIGHT_MODES = ("pairs", "papers")


@dataclass
class WeightedGraph:
    directed: bool
    nodes: dict[str, dict] = field(default_factory=dict)
    edges: dict[tuple[str, str], float] = field(default_factory=dict)

    def key(self, u: str, v: str) -> tuple[str, str]:
        if self.directed or u <= v:
            return (u, v)
        return (v, u)

    def add_node(self, node: str, **attrs) -> None:
        self.nodes.setdefault(node, {}).update(attrs)

    def add_weight(self, u: str, v: str, w: float) -> None:
        if w <= 0:
            raise ValueError("edge weights must be positive")
        self.nodes.setdefault(u, {})
        self.nodes.setdefault(v, {})
        k = self.key(u, v)
        self.edges[k] = self.edges.get(k, 0) + w

    def weight(self, u: str, v: str) -> float:
        return self.edges.get(self.key(u, v), 0)

    def total_weight(self) -> float:
        return sum(self.edges.values())

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def sorted_edges(self) -> list[tuple[str, str, float]]:
        return [(u, v, self.edges[(u, v)]) for u, v in sorted(self.edges)]

    def neighbors(self) -> dict[str, set[str]]:
        """Binarized undirected adjacency without self-loops."""
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def successors(self) -> dict[str, set[str]]:
        """Binarized out-adjacency without self-loops (both ways when undirected)."""
        if not self.directed:
            return self.neighbors()
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            if u != v:
                adj[u].add(v)
        return adj


@dataclass(frozen=True)
class SnapshotSeries:
    snapshots: tuple[tuple[int, WeightedGraph], ...]

    def years(self) -> list[int]:
        return [y for y, _ in self.snapshots]

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self) -> int:
        return len(self.snapshots)


class PaperIndex:
    """Institution id -> set of paper ids with at least one author there."""

    def __init__(self, papers: Mapping[str, Iterable[str]] | None = None):
        self.papers: dict[str, frozenset[str]] = {
            k: frozenset(v) for k, v in (papers or {}).items()
        }

    @classmethod
    def from_records(cls, records, resolution: ResolutionMap) -> "PaperIndex":
        papers: dict[str, set[str]] = {}
        for record in records:
            for cid in resolution.institutions_of(record):
                papers.setdefault(cid, set()).add(record.paper_id)
        return cls(papers)

    def count(self, node: str) -> int:
        return len(self.papers.get(node, ()))

    def common(self, i: str, j: str) -> int:
        return len(self.papers.get(i, frozenset()) & self.papers.get(j, frozenset()))

    def union_count(self, nodes: Iterable[str]) -> int:
        seen: set[str] = set()
        for n in nodes:
            seen |= self.papers.get(n, frozenset())
        return len(seen)


def _node_attrs(cid: str, resolution: ResolutionMap) -> dict:
    inst = resolution.institutions.get(cid)
    if inst is None:
        return {"category": resolution.category_of(cid), "label": cid,
                "lat": None, "lon": None}
    loc = inst.location
    return {
        "category": inst.category,
        "label": inst.display_name,
        "lat": loc.lat if loc else None,
        "lon": loc.lon if loc else None,
    }


def _add_paper_node(g: WeightedGraph, cid: str, resolution: ResolutionMap) -> None:
    if cid not in g.nodes or "paper_count" not in g.nodes[cid]:
        g.add_node(cid, paper_count=0, **_node_attrs(cid, resolution))
    g.nodes[cid]["paper_count"] += 1


def build_collaboration_network(records, resolution: ResolutionMap,
                                edge_weight_mode: str = "pairs") -> WeightedGraph:
    """Undirected institution graph weighted by co-authored author pairs.

    Per paper, with n_i authors at institution i: pair (i, j) gains n_i*n_j
    and i's self-loop gains n_i(n_i-1)/2. In ``papers`` mode every
    co-occurring pair (and every institution with two or more authors)
    gains 1 per paper instead.
    """
    if edge_weight_mode not in EDGE_WEIGHT_MODES:
        raise ValueError(f"edge_weight_mode must be one of {EDGE_WEIGHT_MODES}")
    g = WeightedGraph(directed=False)
    for record in records:
        counts = resolution.institutions_of(record)
        ids = sorted(counts)
        for cid in ids:
            _add_paper_node(g, cid, resolution)
        for a, i in enumerate(ids):
            n_i = counts[i]
            if n_i >= 2:
                g.add_weight(i, i, n_i * (n_i - 1) // 2 if edge_weight_mode == "pairs" else 1)
            for j in ids[a + 1:]:
                g.add_weight(i, j, n_i * counts[j] if edge_weight_mode == "pairs" else 1)
    return g


def build_citation_network(records, resolution: ResolutionMap,
                           stats: dict | None = None, corpus=None) -> WeightedGraph:
    """Directed institution graph; edge i->j counts citing/cited paper pairs.

    Each (citing paper, cited paper) contributes 1 to every pair in
    institutions(citing) x institutions(cited). Citations to papers outside
    ``corpus`` (default ``records``) are skipped and tallied in
    ``stats['external_citations']``.
    """
    by_id = {r.paper_id: r for r in (records if corpus is None else corpus)}
    inst_cache: dict[str, list[str]] = {}

    def insts(record) -> list[str]:
        if record.paper_id not in inst_cache:
            inst_cache[record.paper_id] = sorted(resolution.institutions_of(record))
        return inst_cache[record.paper_id]

    g = WeightedGraph(directed=True)
    external = 0
    for record in records:
        for cid in insts(record):
            _add_paper_node(g, cid, resolution)
    for record in records:
        sources = insts(record)
        for cited_id in record.cited_ids:
            cited = by_id.get(cited_id)
            if cited is None:
                external += 1
                continue
            for j in insts(cited):
                if j not in g.nodes:
                    g.add_node(j, paper_count=0, **_node_attrs(j, resolution))
                for i in sources:
                    g.add_weight(i, j, 1)
    if stats is not None:
        stats["external_citations"] = external
    return g


def aggregate_supernodes(g: WeightedGraph, categories: Mapping[str, object],
                         paper_index: PaperIndex | None = None) -> WeightedGraph:
    """Collapse institutions into one node per category.

    Edge weights between categories are summed; edges inside a category
    (member self-loops included) land on the category's self-loop. With a
    ``paper_index`` the super-node paper_count is the number of distinct
    member papers, otherwise the sum of member counts.
    """
    members: dict[str, list[str]] = {}
    for node in g.nodes:
        members.setdefault(str(categories[node]), []).append(node)
    sg = WeightedGraph(directed=g.directed)
    for cat in sorted(members):
        if paper_index is not None:
            papers = paper_index.union_count(members[cat])
        else:
            papers = sum(g.nodes[n].get("paper_count", 0) for n in members[cat])
        sg.add_node(cat, category=cat, label=cat, paper_count=papers,
                    institutions=len(members[cat]), lat=None, lon=None)
    for (u, v), w in sorted(g.edges.items()):
        sg.add_weight(str(categories[u]), str(categories[v]), w)
    return sg


def cumulative_snapshots(records, resolution: ResolutionMap, kind: str,
                         years: Iterable[int], edge_weight_mode: str = "pairs") -> SnapshotSeries:
    """One graph per year t built from every record with year <= t.

    For citation snapshots the citing paper's year decides inclusion; cited
    papers are looked up in the full corpus.
    """
    years = list(years)
    if any(b <= a for a, b in zip(years, years[1:])):
        raise ValueError("snapshot years must be strictly increasing")
    if kind not in ("collaboration", "citation"):
        raise ValueError(f"unknown network kind {kind!r}")
    records = list(records)
    out = []
    for t in years:
        subset = [r for r in records if r.year <= t]
        if kind == "collaboration":
            g = build_collaboration_network(subset, resolution, edge_weight_mode)
        else:
            g = build_citation_network(subset, resolution, corpus=records)
        out.append((t, g))
    return SnapshotSeries(tuple(out))
