"""Synthetic corpora for tests, demos and acceptance runs.

Two generators live here:

* :func:`corpus_from_counts` builds a corpus whose per-category paper and
  institution counts are exactly the ones requested, spreading the overlap
  so the total number of papers can be fixed too.
* :func:`synthetic_world` builds a small but messy world (typos, aliases,
  foreign affiliations, unlocated institutes, external citations) and
  :func:`write_world` dumps it as the on-disk inputs the CLI reads.

Run ``python -m scholnet.synthetic OUTDIR`` to write a demo world.
"""

from __future__ import annotations

import argparse
import csv
import random
from pathlib import Path

from .geo import GeoPoint
from .ingest import AuthorAffiliation, PublicationRecord, dump_records
from .resolve import CategoryCode, Institution

CITIES = {
    "Delhi": (28.6139, 77.2090),
    "Mumbai": (19.0760, 72.8777),
    "Kolkata": (22.5726, 88.3639),
    "Chennai": (13.0827, 80.2707),
    "Bangalore": (12.9716, 77.5946),
    "Kanpur": (26.4499, 80.3319),
    "Allahabad": (25.4358, 81.8463),
    "Ahmedabad": (23.0225, 72.5714),
    "Bhubaneswar": (20.2961, 85.8245),
    "Hyderabad": (17.3850, 78.4867),
    "Pune": (18.5204, 73.8567),
    "Chandigarh": (30.7333, 76.7794),
}

FOREIGN_AFFILIATIONS = (
    "Dept. of Physics, Massachusetts Inst. of Tech., Cambridge, USA",
    "CERN, Geneva, Switzerland",
    "Max Planck Institute for Solid State Research, Stuttgart, Germany",
    "Univ. of Tokyo, Japan",
    "Laboratoire de Physique Theorique, Paris, France",
    "Dept. of Physics, University of Oxford, United Kingdom",
)
GAZETTEER = ("USA", "Switzerland", "Germany", "Japan", "France", "United Kingdom", "Italy")

_FIELDS = ("Plasma Physics", "Nuclear Science", "Condensed Matter", "Astrophysics",
           "Theoretical Physics", "Optics", "Materials Science", "Quantum Studies")

_TEMPLATES = {
    CategoryCode.NRI: "Centre for {field} Research {city}",
    CategoryCode.INI: "National Institute of Technology {city}",
    CategoryCode.CU: "Central University of {city}",
    CategoryCode.SU: "{city} State University",
    CategoryCode.SC: "Government Science College {city}",
    CategoryCode.PU: "{city} Private University",
}


def corpus_from_counts(counts, total_papers: int | None = None):
    """Records and registry reproducing per-category paper/institution counts.

    ``counts`` maps category code to ``(papers, institutions)``. Each
    category takes a contiguous run of paper slots, wrapping around a pool of
    ``total_papers`` slots, so categories overlap on shared papers while
    every slot is used. Within a category papers rotate over its
    institutions, so each institution appears at least once.
    """
    demand = sum(p for p, _ in counts.values())
    total = demand if total_papers is None else total_papers
    if total > demand or any(p > total for p, _ in counts.values()):
        raise ValueError("counts cannot fill the requested number of papers")
    if any(i < 1 or p < i for p, i in counts.values()):
        raise ValueError("every institution needs at least one paper")

    registry = []
    slots: list[list[str]] = [[] for _ in range(total)]
    cursor = 0
    for cat, (papers, n_inst) in counts.items():
        code = CategoryCode(cat)
        ids = [f"{code.value.lower()}-{k:04d}" for k in range(n_inst)]
        registry.extend(Institution(cid, f"{code.value} institute {k:04d}", code)
                        for k, cid in enumerate(ids))
        for k in range(papers):
            slots[(cursor + k) % total].append(f"{code.value} institute {k % n_inst:04d}")
        cursor = (cursor + papers) % total

    records = []
    for idx, affs in enumerate(slots):
        authorships = tuple(AuthorAffiliation(f"a{idx}-{n}", (raw,)) for n, raw in enumerate(affs))
        records.append(PublicationRecord(f"p{idx:06d}", 2000, authorships, ()))
    return records, registry


def _typo(rng: random.Random, name: str) -> str:
    letters = [i for i, c in enumerate(name) if c.isalpha()]
    i = rng.choice(letters)
    repl = rng.choice([c for c in "aeiourstn" if c != name[i].lower()])
    return name[:i] + repl + name[i + 1:]


def _variants(rng: random.Random, name: str) -> list[str]:
    out = [name, name.replace("Institute", "Inst.").replace("University", "Univ."), _typo(rng, name)]
    out.append(name.upper() + ", India")
    return out


def synthetic_world(n_records: int = 200, seed: int = 7, start_year: int = 1970,
                    end_year: int = 2013):
    """A small noisy corpus with its registry, aliases and gazetteer."""
    rng = random.Random(seed)
    registry: list[Institution] = []
    cities = list(CITIES)
    plan = [(CategoryCode.NRI, 6), (CategoryCode.INI, 4), (CategoryCode.CU, 3),
            (CategoryCode.SU, 5), (CategoryCode.SC, 5), (CategoryCode.PU, 2)]
    used = set()
    for code, n in plan:
        for k in range(n):
            while True:
                city = rng.choice(cities)
                field = rng.choice(_FIELDS)
                name = _TEMPLATES[code].format(city=city, field=field)
                if name not in used:
                    used.add(name)
                    break
            lat, lon = CITIES[city]
            cid = f"{code.value.lower()}{k + 1:02d}"
            location = GeoPoint(round(lat + rng.uniform(-0.1, 0.1), 4),
                                round(lon + rng.uniform(-0.1, 0.1), 4))
            pincode = f"{rng.randint(110001, 855117):06d}"
            if code is CategoryCode.SC and k == 0:
                location = None  # unlocated institute
            registry.append(Institution(cid, name, code, pincode, None, location))

    aliases = {}
    variants: dict[str, list[str]] = {}
    for inst in registry:
        variants[inst.canonical_id] = _variants(rng, inst.display_name)
        acronym = "".join(w[0] for w in inst.display_name.split() if w[0].isupper())
        if inst.category in (CategoryCode.NRI, CategoryCode.INI) and acronym not in aliases:
            aliases[acronym] = inst.canonical_id
            variants[inst.canonical_id].append(acronym)

    # productive categories attract more authors
    weights = {CategoryCode.NRI: 6, CategoryCode.INI: 4, CategoryCode.CU: 3,
               CategoryCode.SU: 2, CategoryCode.SC: 1, CategoryCode.PU: 1}
    pool = [inst for inst in registry for _ in range(weights[inst.category])]

    records: list[PublicationRecord] = []
    years = sorted(rng.randint(start_year, end_year) for _ in range(n_records))
    for idx, year in enumerate(years):
        authorships = []
        home = rng.choice(pool)
        for _ in range(rng.randint(1, 5)):
            r = rng.random()
            if r < 0.08:
                raws = (rng.choice(FOREIGN_AFFILIATIONS),)
            elif r < 0.12:
                raws = (f"Physics Dept., Unlisted College No. {rng.randint(1, 3)}",)
            else:
                inst = home if rng.random() < 0.5 else rng.choice(pool)
                raws = (rng.choice(variants[inst.canonical_id]),)
                if rng.random() < 0.05:
                    other = rng.choice(pool)
                    if other.canonical_id != inst.canonical_id:
                        raws += (rng.choice(variants[other.canonical_id]),)
            authorships.append(AuthorAffiliation(f"author{rng.randint(0, 3 * n_records)}", raws))
        merged: dict[str, list[str]] = {}
        for au in authorships:
            merged.setdefault(au.author_key, [])
            merged[au.author_key] += [r for r in au.raw_affiliations if r not in merged[au.author_key]]
        cited: list[str] = []
        if idx:
            for _ in range(rng.randint(0, 4)):
                cid = records[rng.randrange(idx)].paper_id
                if cid not in cited:
                    cited.append(cid)
        if rng.random() < 0.1:
            cited.append(f"ext{rng.randint(0, 999):03d}")
        records.append(PublicationRecord(
            f"syn{idx:05d}", year,
            tuple(AuthorAffiliation(k, tuple(v)) for k, v in merged.items()),
            tuple(cited),
        ))
    return records, registry, aliases, list(GAZETTEER)


def write_registry(path: Path, registry) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["canonical_id", "display_name", "category", "pincode", "lat", "lon"])
        for inst in registry:
            loc = inst.location
            writer.writerow([inst.canonical_id, inst.display_name, inst.category.value,
                             inst.pincode or "", loc.lat if loc else "", loc.lon if loc else ""])


def write_aliases(path: Path, aliases) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["raw_string", "canonical_id"])
        for raw, cid in sorted(aliases.items()):
            writer.writerow([raw, cid])


def write_world(out_dir, n_records: int = 200, seed: int = 7) -> Path:
    """Write records, registry, aliases, gazetteer and a config; return the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, registry, aliases, gazetteer = synthetic_world(n_records, seed)
    (out / "records.jsonl").write_text(dump_records(records), encoding="utf-8")
    write_registry(out / "registry.csv", registry)
    write_aliases(out / "aliases.csv", aliases)
    (out / "gazetteer.txt").write_text("\n".join(gazetteer) + "\n", encoding="utf-8")
    years = sorted({r.year for r in records})
    config = out / "scholnet.conf"
    config.write_text(
        "# synthetic demo world\n"
        "records = records.jsonl\n"
        "registry = registry.csv\n"
        "aliases = aliases.csv\n"
        "gazetteer = gazetteer.txt\n"
        "out = output\n"
        "threshold = 0.15\n"
        "edge_weight_mode = pairs\n"
        f"snapshot_years = {years[0]}..{years[-1]}\n"
        "damping = 0.85\n",
        encoding="utf-8",
    )
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="write a synthetic input world")
    parser.add_argument("out_dir")
    parser.add_argument("--records", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    print(write_world(args.out_dir, args.records, args.seed))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
