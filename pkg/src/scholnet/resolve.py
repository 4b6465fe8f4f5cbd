"""Affiliation disambiguation.

Raw affiliation strings are normalized, checked against a curated alias
table, tagged as foreign when they end in a country name, and otherwise
matched to the institution registry by normalized edit distance.
Anything left over becomes an UNCLASSIFIED singleton so dirty data never
stops a run.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AliasTargetMissing,
    EmptyAfterNormalization,
    SchemaViolation,
    UnknownInstitution,
    UnresolvedAffiliation,
)
from .geo import GeoPoint


class CategoryCode(str, enum.Enum):
    NRI = "NRI"
    INI = "INI"
    CU = "CU"
    SU = "SU"
    SC = "SC"
    CC = "CC"
    DU = "DU"
    PU = "PU"
    PI = "PI"
    SRI = "SRI"
    FOREIGN = "FOREIGN"
    UNCLASSIFIED = "UNCLASSIFIED"

    def __str__(self) -> str:
        return self.value


# Table order; used wherever a stable category ordering is needed.
CATEGORY_ORDER = list(CategoryCode)

DEFAULT_ABBREVIATIONS = {
    "inst.": "institute",
    "inst": "institute",
    "instt.": "institute",
    "tech.": "technology",
    "technol.": "technology",
    "univ.": "university",
    "univ": "university",
    "dept.": "department",
    "dept": "department",
    "lab.": "laboratory",
    "labs.": "laboratories",
    "natl.": "national",
    "nat.": "national",
    "res.": "research",
    "sci.": "science",
    "phys.": "physics",
    "ctr.": "centre",
    "cent.": "centre",
    "coll.": "college",
    "govt.": "government",
}
DEFAULT_STOP_TOKENS = frozenset({"of", "the", "and"})
DEFAULT_DOMESTIC = frozenset({"india"})
DEFAULT_THRESHOLD = 0.15

FRESH_PREFIX = "unc:"
FOREIGN_PREFIX = "foreign:"

# everything except word characters, whitespace and the dot that marks abbreviations
_PUNCT = re.compile(r"[^\w\s.]|_")


@dataclass(frozen=True)
class Institution:
    canonical_id: str
    display_name: str
    category: CategoryCode
    pincode: str | None = None
    country: str | None = None
    location: GeoPoint | None = None

    def __post_init__(self):
        if self.pincode is not None and not (len(self.pincode) == 6 and self.pincode.isdigit()):
            raise ValueError(f"pincode must be 6 digits, got {self.pincode!r}")
        if self.country is not None:
            if self.category is not CategoryCode.FOREIGN or self.pincode is not None:
                raise ValueError("foreign institutions have category FOREIGN and no pincode")
        elif self.category is CategoryCode.FOREIGN:
            raise ValueError("FOREIGN category requires a country")

    @property
    def is_foreign(self) -> bool:
        return self.country is not None


@dataclass
class ResolutionMap:
    """Raw affiliation string -> canonical id, with how each match was made.

    ``institutions`` holds every entity an entry can point to: the registry
    plus the foreign and UNCLASSIFIED entities minted during resolution.
    """

    entries: dict[str, str] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    institutions: dict[str, Institution] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, raw: str) -> bool:
        return raw in self.entries

    def resolve(self, raw: str) -> str:
        try:
            return self.entries[raw]
        except KeyError:
            raise UnresolvedAffiliation(raw) from None

    def canonical_ids(self) -> set[str]:
        return set(self.entries.values())

    def category_of(self, canonical_id: str) -> CategoryCode:
        return assign_category(canonical_id, self.institutions)

    def categories(self) -> dict[str, CategoryCode]:
        return {cid: inst.category for cid, inst in self.institutions.items()}

    def institutions_of(self, record) -> dict[str, int]:
        """Institution id -> number of authors of ``record`` affiliated to it.

        An author with several affiliations counts once toward each distinct
        institution they resolve to.
        """
        counts: dict[str, int] = {}
        for authorship in record.authorships:
            ids = {self.resolve(raw) for raw in authorship.raw_affiliations}
            for cid in ids:
                counts[cid] = counts.get(cid, 0) + 1
        return counts


def normalize_name(
    raw: str,
    abbreviations: Mapping[str, str] = DEFAULT_ABBREVIATIONS,
    stop_tokens: Iterable[str] = DEFAULT_STOP_TOKENS,
) -> str:
    """Canonical comparison form of an affiliation string.

    >>> normalize_name("  Indian   Inst. of Tech.,  Kanpur ")
    'indian institute technology kanpur'
    """
    stops = stop_tokens if isinstance(stop_tokens, (set, frozenset)) else set(stop_tokens)
    tokens = []
    for token in _PUNCT.sub(" ", raw.lower()).split():
        token = abbreviations.get(token, token)
        token = token.replace(".", "")
        token = abbreviations.get(token, token)
        if token and token not in stops:
            tokens.append(token)
    if not tokens:
        raise EmptyAfterNormalization(raw)
    return " ".join(tokens)


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def _edit_distance_within(a: str, b: str, limit: int) -> int | None:
    """Levenshtein distance if it is at most ``limit``, else None."""
    if abs(len(a) - len(b)) > limit:
        return None
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a) if len(a) <= limit else None
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        if min(current) > limit:
            return None
        previous = current
    return previous[-1] if previous[-1] <= limit else None


def normalized_edit_distance(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    return edit_distance(a, b) / longest if longest else 0.0


def _country_key(name: str) -> tuple[str, ...]:
    try:
        return tuple(normalize_name(name).split())
    except EmptyAfterNormalization:
        return ()


def tag_foreign(
    raw: str,
    country_gazetteer: Iterable[str],
    domestic: Iterable[str] = DEFAULT_DOMESTIC,
) -> str | None:
    """Country named at the tail of ``raw``, or None for domestic affiliations.

    Trailing postal codes are ignored, and the longest matching country wins
    so that e.g. "Papua New Guinea" beats "Guinea".
    """
    try:
        tokens = normalize_name(raw).split()
    except EmptyAfterNormalization:
        return None
    while tokens and tokens[-1].isdigit():
        tokens.pop()
    domestic_keys = {_country_key(d) for d in domestic}
    best: tuple[str, ...] = ()
    for country in list(country_gazetteer) + list(domestic):
        key = _country_key(country)
        if key and len(key) > len(best) and tuple(tokens[-len(key):]) == key:
            best = key
    if not best or best in domestic_keys:
        return None
    return " ".join(best)


def assign_category(canonical_id: str, registry: Mapping[str, Institution]) -> CategoryCode:
    inst = registry.get(canonical_id)
    if inst is not None:
        return inst.category
    if canonical_id.startswith(FRESH_PREFIX):
        return CategoryCode.UNCLASSIFIED
    if canonical_id.startswith(FOREIGN_PREFIX):
        return CategoryCode.FOREIGN
    raise UnknownInstitution(canonical_id)


def fresh_id(key: str) -> str:
    return FRESH_PREFIX + hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def foreign_institution(country: str) -> Institution:
    return Institution(
        canonical_id=FOREIGN_PREFIX + country.replace(" ", "_"),
        display_name=country,
        category=CategoryCode.FOREIGN,
        country=country,
    )


class _Matcher:
    """Nearest registry name under normalized edit distance."""

    def __init__(self, registry: Iterable[Institution], threshold: float, domestic):
        self.threshold = threshold
        by_name: dict[str, str] = {}
        for inst in registry:
            try:
                name = _strip_domestic_tail(normalize_name(inst.display_name), domestic)
            except EmptyAfterNormalization:
                continue
            if name not in by_name or inst.canonical_id < by_name[name]:
                by_name[name] = inst.canonical_id
        self.by_name = by_name
        self.names = sorted(by_name)

    def exact(self, norm: str) -> str | None:
        return self.by_name.get(norm)

    def nearest(self, norm: str) -> str | None:
        best: tuple[int, int, str] | None = None
        for name in self.names:
            longest = max(len(name), len(norm))
            limit = int(self.threshold * longest + 1e-9)
            d = _edit_distance_within(norm, name, limit)
            if d is None:
                continue
            cid = self.by_name[name]
            if best is None:
                best = (d, longest, cid)
                continue
            bd, blong, bcid = best
            # compare d/longest against bd/blong without floats
            lhs, rhs = d * blong, bd * longest
            if lhs < rhs or (lhs == rhs and cid < bcid):
                best = (d, longest, cid)
        return best[2] if best else None


def cluster_affiliations(
    raws: Iterable[str],
    registry: Iterable[Institution],
    threshold: float = DEFAULT_THRESHOLD,
    alias_map: Mapping[str, str] | None = None,
    gazetteer: Iterable[str] | None = None,
    domestic: Iterable[str] = DEFAULT_DOMESTIC,
) -> ResolutionMap:
    """Resolve raw affiliation strings to canonical institution ids.

    Precedence: alias table, foreign tagging (when a gazetteer is given),
    exact normalized match, nearest registry name within ``threshold``,
    then a fresh UNCLASSIFIED id shared by all raws with the same
    normalized form.
    """
    registry = list(registry)
    if not registry:
        raise ValueError("registry must not be empty")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    institutions = {inst.canonical_id: inst for inst in registry}

    aliases: dict[str, str] = {}
    for key, target in (alias_map or {}).items():
        if target not in institutions:
            raise AliasTargetMissing(target)
        aliases[key] = target
        try:
            aliases.setdefault(normalize_name(key), target)
        except EmptyAfterNormalization:
            pass

    gazetteer = list(gazetteer) if gazetteer is not None else None
    domestic = list(domestic)
    matcher = _Matcher(registry, threshold, domestic)
    result = ResolutionMap(institutions=dict(institutions))
    cache: dict[str, tuple[str, str]] = {}

    for raw in raws:
        if raw in result.entries:
            continue
        if raw in aliases:
            result.entries[raw], result.provenance[raw] = aliases[raw], "alias_map"
            continue
        try:
            norm = normalize_name(raw)
        except EmptyAfterNormalization:
            key = raw.strip().lower()
            cid = fresh_id(key)
            result.institutions.setdefault(
                cid, Institution(cid, raw.strip() or raw, CategoryCode.UNCLASSIFIED))
            result.entries[raw], result.provenance[raw] = cid, "unmatched"
            continue
        if norm not in cache:
            cache[norm] = _resolve_normalized(
                raw, norm, aliases, gazetteer, domestic, matcher, result.institutions)
        result.entries[raw], result.provenance[raw] = cache[norm]
    return result


def _resolve_normalized(raw, norm, aliases, gazetteer, domestic, matcher, institutions):
    if norm in aliases:
        return aliases[norm], "alias_map"
    if gazetteer is not None:
        country = tag_foreign(raw, gazetteer, domestic)
        if country is not None:
            inst = foreign_institution(country)
            institutions.setdefault(inst.canonical_id, inst)
            return inst.canonical_id, "foreign"
    key = _strip_domestic_tail(norm, domestic)
    cid = matcher.exact(key)
    if cid is not None:
        return cid, "exact"
    cid = matcher.nearest(key)
    if cid is not None:
        return cid, "cluster"
    cid = fresh_id(key)
    institutions.setdefault(cid, Institution(cid, key, CategoryCode.UNCLASSIFIED))
    return cid, "unmatched"


def _strip_domestic_tail(norm: str, domestic) -> str:
    """Drop trailing pincodes and domestic country names before matching."""
    tokens = norm.split()
    keys = sorted((_country_key(d) for d in domestic), key=len, reverse=True)
    changed = True
    while changed and len(tokens) > 1:
        changed = False
        if len(tokens[-1]) == 6 and tokens[-1].isdigit():
            tokens.pop()
            changed = True
            continue
        for key in keys:
            if key and len(key) < len(tokens) and tuple(tokens[-len(key):]) == key:
                del tokens[-len(key):]
                changed = True
                break
    return " ".join(tokens) if tokens else norm


def resolve_corpus(records, registry, threshold=DEFAULT_THRESHOLD, alias_map=None,
                   gazetteer=None, domestic=DEFAULT_DOMESTIC) -> ResolutionMap:
    raws: dict[str, None] = {}
    for record in records:
        for raw in record.raw_affiliations():
            raws[raw] = None
    return cluster_affiliations(raws, registry, threshold, alias_map, gazetteer, domestic)


def _opt_float(value: str, line_no: int, name: str) -> float | None:
    value = value.strip()
    if not value:
        return None
    try:
        return float(value)
    except ValueError:
        raise SchemaViolation(line_no, name, "expected decimal degrees") from None


def load_registry(path: str | Path) -> list[Institution]:
    """Read ``canonical_id,display_name,category,pincode,lat,lon`` rows.

    FOREIGN rows use the display name as the country.
    """
    institutions = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for line_no, row in enumerate(reader, start=2):
            cid = (row.get("canonical_id") or "").strip()
            if not cid:
                raise SchemaViolation(line_no, "canonical_id", "missing")
            name = (row.get("display_name") or "").strip()
            try:
                category = CategoryCode((row.get("category") or "").strip().upper())
            except ValueError:
                raise SchemaViolation(line_no, "category", "unknown code") from None
            pincode = (row.get("pincode") or "").strip() or None
            if pincode is not None and not (len(pincode) == 6 and pincode.isdigit()):
                raise SchemaViolation(line_no, "pincode", "expected 6 digits")
            lat = _opt_float(row.get("lat") or "", line_no, "lat")
            lon = _opt_float(row.get("lon") or "", line_no, "lon")
            location = None
            if lat is not None and lon is not None:
                try:
                    location = GeoPoint(lat, lon).validate()
                except ValueError:
                    raise SchemaViolation(line_no, "lat/lon", "out of range") from None
            if category is CategoryCode.FOREIGN:
                institutions.append(Institution(cid, name, category, country=name.lower()))
            else:
                institutions.append(Institution(cid, name, category, pincode, None, location))
    return institutions


def load_aliases(path: str | Path) -> dict[str, str]:
    aliases = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.DictReader(fh), start=2):
            raw, target = row.get("raw_string"), (row.get("canonical_id") or "").strip()
            if not raw or not target:
                raise SchemaViolation(line_no, "raw_string" if not raw else "canonical_id", "missing")
            aliases[raw] = target
    return aliases


def load_gazetteer(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip() and not line.startswith("#")]
