"""Great-circle distances between institutions and 50 km distance bins."""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import NegativeDistance

EARTH_RADIUS_KM = 6371.0088
BIN_WIDTH_KM = 50.0


class GeoPoint(NamedTuple):
    lat: float
    lon: float

    def validate(self) -> "GeoPoint":
        if not (-90.0 <= self.lat <= 90.0) or not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates out of range: {self}")
        return self


def great_circle_distance(p: GeoPoint, q: GeoPoint) -> float:
    """Haversine distance in kilometres on a sphere of mean Earth radius."""
    lat1, lon1 = math.radians(p[0]), math.radians(p[1])
    lat2, lon2 = math.radians(q[0]), math.radians(q[1])
    h = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    # rounding can push h a hair above 1 for antipodes
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, h)))


def distance_bin(d: float) -> int:
    """Index k of the half-open bin [50(k-1), 50k) containing ``d``."""
    if d < 0 or math.isnan(d):
        raise NegativeDistance(d)
    return int(d // BIN_WIDTH_KM) + 1


def bin_range(k: int) -> tuple[float, float]:
    if k < 1:
        raise ValueError("bin index starts at 1")
    return BIN_WIDTH_KM * (k - 1), BIN_WIDTH_KM * k


def locate(institution, registry=None) -> GeoPoint | None:
    """Coordinates of a resolved institution, or None when it cannot be placed.

    ``registry`` may be a mapping of canonical id to Institution; when given,
    the registry entry takes precedence over the institution passed in.
    Foreign institutions are never located.
    """
    if registry is not None:
        institution = registry.get(institution.canonical_id, institution)
    if institution.country is not None:
        return None
    return institution.location


def locate_all(institutions) -> tuple[dict[str, GeoPoint], list[str]]:
    """Split institutions into a location table and the ids left unlocated."""
    located: dict[str, GeoPoint] = {}
    unlocated: list[str] = []
    for inst in institutions:
        point = locate(inst)
        if point is None:
            unlocated.append(inst.canonical_id)
        else:
            located[inst.canonical_id] = point
    return located, sorted(unlocated)
