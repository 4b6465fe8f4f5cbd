"""Pipeline configuration and the stage runners behind each CLI subcommand.

A config file is plain ``key = value`` lines (``#`` starts a comment).
Relative paths are taken relative to the config file. Recognized keys::

    records, registry, aliases, gazetteer, out,
    threshold, edge_weight_mode, snapshot_years, damping, top

``snapshot_years`` accepts ``1970..2013`` or a comma list.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections.abc import Callable
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

from . import export
from .errors import ConfigError, InvariantViolation
from .geo import locate_all
from .ingest import load_records, validate_corpus
from .metrics import (
    ALL,
    category_centrality_summary,
    category_matrix,
    distance_profile,
    knowledge_flow,
    node_metrics,
    productivity_order,
    productivity_table,
    top_knowledge_hubs,
)
from .netbuild import (
    EDGE_WEIGHT_MODES,
    PaperIndex,
    aggregate_supernodes,
    build_citation_network,
    build_collaboration_network,
    cumulative_snapshots,
)
from .resolve import (
    DEFAULT_THRESHOLD,
    CategoryCode,
    load_aliases,
    load_gazetteer,
    load_registry,
    resolve_corpus,
)

log = logging.getLogger(__name__)

PATH_KEYS = ("records", "registry", "aliases", "gazetteer")
KNOWN_KEYS = set(PATH_KEYS) | {"out", "threshold", "edge_weight_mode", "snapshot_years",
                               "damping", "top"}
LOCK_NAME = ".scholnet.lock"


@dataclass(frozen=True)
class PipelineConfig:
    records: Path
    registry: Path
    out: Path
    aliases: Path | None = None
    gazetteer: Path | None = None
    threshold: float = DEFAULT_THRESHOLD
    edge_weight_mode: str = "pairs"
    snapshot_years: tuple[int, ...] | None = None
    damping: float = 0.85
    top: int = 10
    year_range: tuple[int, int] | None = None
    category_filter: tuple[str, str] | None = None
    # literal path strings as written, used for hashing and the manifest
    path_labels: dict = field(default_factory=dict, compare=False)

    def validate(self) -> "PipelineConfig":
        for key in PATH_KEYS:
            path = getattr(self, key)
            if path is not None and not path.is_file():
                raise ConfigError(f"{key} file not found: {path}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold {self.threshold} outside [0, 1]")
        if not 0.0 < self.damping < 1.0:
            raise ConfigError(f"damping {self.damping} outside (0, 1)")
        if self.edge_weight_mode not in EDGE_WEIGHT_MODES:
            raise ConfigError(f"edge_weight_mode must be one of {', '.join(EDGE_WEIGHT_MODES)}")
        if self.top < 1:
            raise ConfigError("top must be at least 1")
        if self.snapshot_years is not None and any(
                b <= a for a, b in zip(self.snapshot_years, self.snapshot_years[1:])):
            raise ConfigError("snapshot_years must be strictly increasing")
        return self

    def digest(self) -> str:
        """Hash of every setting that can change outputs (the output dir excluded)."""
        payload = {
            "paths": {k: self.path_labels.get(k) for k in PATH_KEYS},
            "threshold": self.threshold,
            "edge_weight_mode": self.edge_weight_mode,
            "snapshot_years": list(self.snapshot_years) if self.snapshot_years else None,
            "damping": self.damping,
            "top": self.top,
            "year_range": list(self.year_range) if self.year_range else None,
            "category_filter": list(self.category_filter) if self.category_filter else None,
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def parse_years(text: str) -> tuple[int, ...]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if hi < lo:
                raise ConfigError(f"empty year range {text!r}")
            return tuple(range(lo, hi + 1))
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"bad year list {text!r}") from None


def parse_year_range(text: str) -> tuple[int, int]:
    years = parse_years(text)
    if not years:
        raise ConfigError(f"bad year range {text!r}")
    return years[0], years[-1]


def parse_category_filter(text: str) -> tuple[str, str]:
    parts = [p.strip().upper() for p in text.split(",")]
    if len(parts) == 1:
        parts.append(ALL)
    if len(parts) != 2:
        raise ConfigError(f"bad category filter {text!r}")
    for p in parts:
        if p != ALL and p not in CategoryCode.__members__:
            raise ConfigError(f"unknown category {p!r}")
    return parts[0], parts[1]


def read_config_file(path: str | Path) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    for line_no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"config line {line_no}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(values: dict[str, str], base_dir: Path = Path(".")) -> PipelineConfig:
    """Turn raw string settings (config file merged with flags) into a config."""
    def path(key, required=True):
        text = values.get(key)
        if not text:
            if required:
                raise ConfigError(f"missing required setting {key!r}")
            return None
        p = Path(text)
        return p if p.is_absolute() else base_dir / p

    def number(key, cast, default):
        if key not in values:
            return default
        try:
            return cast(values[key])
        except ValueError:
            raise ConfigError(f"bad value for {key}: {values[key]!r}") from None

    snapshot = values.get("snapshot_years")
    return PipelineConfig(
        records=path("records"),
        registry=path("registry"),
        out=path("out", required=False) or Path("scholnet-out"),
        aliases=path("aliases", required=False),
        gazetteer=path("gazetteer", required=False),
        threshold=number("threshold", float, DEFAULT_THRESHOLD),
        edge_weight_mode=values.get("edge_weight_mode", "pairs"),
        snapshot_years=parse_years(snapshot) if snapshot else None,
        damping=number("damping", float, 0.85),
        top=number("top", int, 10),
        path_labels={k: values.get(k) for k in PATH_KEYS},
    ).validate()


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@contextmanager
def output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ConfigError(f"output directory {out_dir} is locked by another run") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


class Pipeline:
    """Lazily computed stages shared by the subcommands of one run."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.written: list[Path] = []

    # -- inputs and stages --------------------------------------------------

    @cached_property
    def all_records(self):
        return load_records(self.config.records)

    @cached_property
    def records(self):
        rng = self.config.year_range
        if rng is None:
            return self.all_records
        return [r for r in self.all_records if rng[0] <= r.year <= rng[1]]

    @cached_property
    def resolution(self):
        cfg = self.config
        registry = load_registry(cfg.registry)
        aliases = load_aliases(cfg.aliases) if cfg.aliases else None
        gazetteer = load_gazetteer(cfg.gazetteer) if cfg.gazetteer else None
        resolution = resolve_corpus(self.all_records, registry, cfg.threshold, aliases, gazetteer)
        for record in self.all_records:
            for raw in record.raw_affiliations():
                if raw not in resolution:
                    raise InvariantViolation(f"resolution map is missing {raw!r}")
        missing = resolution.canonical_ids() - set(resolution.institutions)
        if missing:
            raise InvariantViolation(f"resolution points at unknown ids {sorted(missing)[:3]}")
        return resolution

    @cached_property
    def categories(self):
        return {cid: str(cat) for cid, cat in self.resolution.categories().items()}

    @cached_property
    def paper_index(self):
        return PaperIndex.from_records(self.records, self.resolution)

    @cached_property
    def collaboration(self):
        return build_collaboration_network(self.records, self.resolution,
                                           self.config.edge_weight_mode)

    @cached_property
    def citation_stats(self):
        return {}

    @cached_property
    def citation(self):
        return build_citation_network(self.records, self.resolution, self.citation_stats)

    def supernodes(self, g):
        sg = aggregate_supernodes(g, self.categories, self.paper_index)
        if sg.total_weight() != g.total_weight():
            raise InvariantViolation("super-node aggregation changed the total edge weight")
        return sg

    @cached_property
    def table(self):
        return productivity_table(self.records, self.resolution, self.categories)

    # -- writing -----------------------------------------------------------

    def write(self, name: str, text: str) -> Path:
        path = export.write_text(self.config.out / name, text)
        self.written.append(path)
        return path

    def write_json(self, name: str, payload) -> Path:
        return self.write(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def write_manifest(self, subcommand: str) -> Path:
        cfg = self.config
        inputs = {}
        for key in PATH_KEYS:
            path = getattr(cfg, key)
            if path is not None:
                inputs[key] = {"path": cfg.path_labels.get(key) or str(path),
                               "sha256": sha256_file(path)}
        outputs = [
            {"path": p.relative_to(cfg.out).as_posix(), "sha256": sha256_file(p),
             "bytes": p.stat().st_size}
            for p in sorted(self.written)
        ]
        manifest = {
            "subcommand": subcommand,
            "config_sha256": cfg.digest(),
            "inputs": inputs,
            "outputs": outputs,
        }
        path = export.write_text(cfg.out / f"manifest_{subcommand}.json",
                                 json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return path


# -- subcommands -------------------------------------------------------------

def run_resolve(p: Pipeline) -> None:
    res = p.resolution
    summary = validate_corpus(p.all_records)
    p.write("resolution_map.csv", export.csv_string(
        ("raw_string", "canonical_id", "provenance"),
        ((raw, res.entries[raw], res.provenance[raw]) for raw in sorted(res.entries)),
    ))
    used = sorted(res.canonical_ids())
    rows = []
    for cid in used:
        inst = res.institutions[cid]
        loc = inst.location
        rows.append((cid, inst.display_name, inst.category.value, inst.pincode, inst.country,
                     loc.lat if loc else None, loc.lon if loc else None))
    p.write("institutions.csv", export.csv_string(
        ("canonical_id", "display_name", "category", "pincode", "country", "lat", "lon"), rows))
    located, unlocated = locate_all(res.institutions[c] for c in used)
    provenance: dict[str, int] = {}
    for raw in res.entries:
        provenance[res.provenance[raw]] = provenance.get(res.provenance[raw], 0) + 1
    by_category: dict[str, int] = {}
    for cid in used:
        cat = res.institutions[cid].category.value
        by_category[cat] = by_category.get(cat, 0) + 1
    p.write_json("resolve_summary.json", {
        "papers": summary.papers,
        "year_range": list(summary.year_range),
        "raw_affiliations": len(res.entries),
        "canonical_institutions": len(used),
        "by_provenance": provenance,
        "by_category": by_category,
        "located": len(located),
        "unlocated": len([c for c in unlocated if res.institutions[c].country is None]),
        "foreign": len([c for c in used if res.institutions[c].country is not None]),
        "external_citations": summary.external_citation_count,
    })


def _write_graph(p: Pipeline, stem: str, g) -> None:
    p.write(f"{stem}.gexf", export.gexf_string(g))
    p.write(f"{stem}_edges.csv", export.edge_list_csv(g))


def run_build(p: Pipeline) -> None:
    cfg = p.config
    _write_graph(p, "collaboration", p.collaboration)
    _write_graph(p, "citation", p.citation)
    _write_graph(p, "category_collaboration", p.supernodes(p.collaboration))
    _write_graph(p, "category_citation", p.supernodes(p.citation))

    if cfg.year_range is not None:
        years = tuple(range(cfg.year_range[0], cfg.year_range[1] + 1))
    elif cfg.snapshot_years is not None:
        years = cfg.snapshot_years
    else:
        present = sorted({r.year for r in p.records})
        years = tuple(range(present[0], present[-1] + 1)) if present else ()
    summary = []
    for kind in ("collaboration", "citation"):
        series = cumulative_snapshots(p.records, p.resolution, kind, years, cfg.edge_weight_mode)
        previous = None
        for year, g in series:
            if previous is not None and not _grows(previous, g):
                raise InvariantViolation(f"{kind} snapshot {year} shrank")
            previous = g
            p.write(f"snapshots/{kind}_{year}_edges.csv", export.edge_list_csv(g))
            summary.append((kind, year, len(g.nodes), len(g.edges), g.total_weight()))
    p.write("snapshots.csv", export.csv_string(
        ("network", "year", "nodes", "edges", "total_weight"), summary))


def _grows(before, after) -> bool:
    if not set(before.nodes) <= set(after.nodes):
        return False
    return all(after.edges.get(k, 0) >= w for k, w in before.edges.items())


def _distance_rows(profile):
    return [(b.index, b.lo_km, b.hi_km, b.pair_count, b.mean, b.median, b.q1, b.q3,
             b.event_weight) for b in profile.bins]


DISTANCE_HEADER = ("bin", "lo_km", "hi_km", "pair_count", "mean", "median", "q1", "q3",
                   "event_weight")


def _profile(p: Pipeline, category_filter=None):
    located, _ = locate_all(p.resolution.institutions[n] for n in p.collaboration.sorted_nodes())
    return distance_profile(p.collaboration, p.paper_index, located, category_filter,
                            p.categories)


def run_metrics(p: Pipeline) -> None:
    cfg = p.config
    collab = p.collaboration
    nm = node_metrics(collab, cfg.damping)
    total = sum(m.pagerank for m in nm.values())
    if nm and abs(total - 1.0) > 1e-9:
        raise InvariantViolation(f"pagerank sums to {total}")
    p.write("metrics.csv", export.csv_string(
        ("node", "degree", "clustering", "betweenness", "pagerank"),
        ((n, m.degree, m.clustering, m.betweenness, m.pagerank) for n, m in nm.items()),
    ))
    p.write("flow.csv", export.csv_string(
        ("node", "f_in", "f_out", "k_in", "k_out", "w_in", "w_out"),
        ((f.node, f.f_in, f.f_out, f.k_in, f.k_out, f.w_in, f.w_out)
         for f in knowledge_flow(p.citation)),
    ))
    table = p.table
    p.write("category_table.csv", export.csv_string(
        ("category", "papers", "institutions", "papers_per_institute"),
        ((r.category, r.papers, r.institutions, r.papers_per_institute) for r in table.values()),
    ))
    order = productivity_order(table)
    rows = []
    for label, g in (("collaboration", collab), ("citation", p.citation)):
        sg = p.supernodes(g)
        rows += [(label, r, c, w) for r, c, w in category_matrix(sg, order)]
    p.write("category_matrix.csv", export.csv_string(
        ("network", "row_category", "column_category", "weight"), rows))
    summary = category_centrality_summary(collab, p.categories, cfg.damping, nm)
    p.write("category_centrality.csv", export.csv_string(
        ("category", "members", "avg_degree", "avg_clustering", "avg_betweenness",
         "avg_pagerank"),
        ((c, s.members, s.avg_degree, s.avg_clustering, s.avg_betweenness, s.avg_pagerank)
         for c, s in summary.items()),
    ))
    profile = _profile(p)
    p.write("distance_profile.csv", export.csv_string(DISTANCE_HEADER, _distance_rows(profile)))


def run_distance(p: Pipeline) -> None:
    cfg = p.config
    suffix = ""
    if cfg.category_filter is not None:
        suffix += "_" + "-".join(cfg.category_filter)
    if cfg.year_range is not None:
        suffix += f"_{cfg.year_range[0]}-{cfg.year_range[1]}"
    profile = _profile(p, cfg.category_filter)
    p.write(f"distance_profile{suffix}.csv",
            export.csv_string(DISTANCE_HEADER, _distance_rows(profile)))
    p.write_json(f"distance_summary{suffix}.json", {
        "category_filter": list(cfg.category_filter) if cfg.category_filter else None,
        "year_range": list(cfg.year_range) if cfg.year_range else None,
        "total_pairs": profile.total_pairs,
        "located_pairs": sum(b.pair_count for b in profile.bins),
        "excluded_unlocated": profile.excluded_unlocated,
    })


def run_hubs(p: Pipeline) -> None:
    hubs = top_knowledge_hubs(p.citation, p.config.top)
    res = p.resolution
    p.write("hubs.csv", export.csv_string(
        ("rank", "node", "label", "category", "weighted_in_degree"),
        ((rank, n, res.institutions[n].display_name, p.categories[n], w)
         for rank, (n, w) in enumerate(hubs, start=1)),
    ))


def run_countries(p: Pipeline) -> None:
    res = p.resolution
    g = p.collaboration
    rows = []
    for node in g.sorted_nodes():
        inst = res.institutions[node]
        if inst.country is None:
            continue
        weight = 0
        partners = set()
        for (u, v), w in g.edges.items():
            if node not in (u, v) or u == v:
                continue
            other = v if u == node else u
            if res.institutions[other].country is None:
                weight += w
                partners.add(other)
        rows.append((inst.country, g.nodes[node].get("paper_count", 0), weight, len(partners)))
    p.write("countries.csv", export.csv_string(
        ("country", "papers", "domestic_collaboration_weight", "domestic_partners"), rows))


SUBCOMMANDS: dict[str, Callable[[Pipeline], None]] = {
    "resolve": run_resolve,
    "build": run_build,
    "metrics": run_metrics,
    "distance": run_distance,
    "hubs": run_hubs,
    "countries": run_countries,
}


def run(subcommand: str, config: PipelineConfig) -> list[Path]:
    """Run one subcommand; returns the files written, manifest last."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    with output_lock(config.out):
        pipeline = Pipeline(config)
        log.info("running %s into %s", subcommand, config.out)
        SUBCOMMANDS[subcommand](pipeline)
        manifest = pipeline.write_manifest(subcommand)
    return pipeline.written + [manifest]


def with_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None}).validate()

