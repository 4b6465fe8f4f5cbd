from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

from scholnet.ingest import AuthorAffiliation, PublicationRecord
from scholnet.netbuild import WeightedGraph
from scholnet.resolve import CategoryCode, Institution, ResolutionMap

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


def rec(pid, year, *authors, cited=()):
    """Record whose authors are given as institution ids (str) or tuples of ids."""
    authorships = []
    for n, aff in enumerate(authors):
        affs = (aff,) if isinstance(aff, str) else tuple(aff)
        authorships.append(AuthorAffiliation(f"{pid}-a{n}", affs))
    return PublicationRecord(pid, year, tuple(authorships), tuple(cited))


def identity_resolution(categories: dict[str, str], locations=None) -> ResolutionMap:
    """Resolution where every raw string is already a canonical id."""
    locations = locations or {}
    res = ResolutionMap()
    for cid, cat in categories.items():
        code = CategoryCode(cat)
        country = cid.lower() if code is CategoryCode.FOREIGN else None
        res.institutions[cid] = Institution(cid, cid, code, country=country,
                                            location=locations.get(cid))
        res.entries[cid] = cid
        res.provenance[cid] = "exact"
    return res


def graph_from_edges(edges, directed=False, nodes=()):
    g = WeightedGraph(directed=directed)
    for n in nodes:
        g.add_node(n)
    for e in edges:
        u, v = e[0], e[1]
        w = e[2] if len(e) > 2 else 1
        g.add_weight(u, v, w)
    return g


def random_connected_graph(rng: random.Random, n: int, p: float):
    """Random spanning tree plus extra edges with probability ``p``."""
    nodes = [f"n{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add((nodes[j], nodes[i]))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((nodes[i], nodes[j]))
    return nodes, sorted(edges)


def random_digraph(rng: random.Random, n: int, p: float):
    nodes = [f"v{i}" for i in range(n)]
    edges = [(u, v) for u in nodes for v in nodes if u != v and rng.random() < p]
    return nodes, edges


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


# acceptance criterion number -> PASS/FAIL line, filled by test_acceptance
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
