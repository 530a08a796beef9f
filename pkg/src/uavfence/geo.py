"""Core geometric and kinematic value types.

All types are immutable; every other module builds on them.  Coordinates
are 64-bit decimal degrees on WGS84 unless a different SRID is tagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Sequence, Union

from .errors import (
    DegenerateGeometryError,
    GeometryError,
    InvalidInputError,
)

WGS84_SRID = 4326


def _require_finite(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class GeoPoint:
    """A longitude/latitude pair tagged with its spatial reference id."""

    lon: float
    lat: float
    srid: int = WGS84_SRID

    def __post_init__(self):
        _require_finite(self.lon, "lon")
        _require_finite(self.lat, "lat")
        if not -180.0 <= self.lon <= 180.0:
            raise InvalidInputError(f"longitude {self.lon} outside [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise InvalidInputError(f"latitude {self.lat} outside [-90, 90]")


@dataclass(frozen=True)
class LocalXY:
    """Planar meters east/north of a projection origin."""

    x_m: float
    y_m: float

    def __post_init__(self):
        _require_finite(self.x_m, "x_m")
        _require_finite(self.y_m, "y_m")


@dataclass(frozen=True)
class Ring:
    """A closed sequence of points: first equals last, >= 3 distinct vertices."""

    points: tuple[GeoPoint, ...]

    def __init__(self, points: Sequence[GeoPoint]):
        object.__setattr__(self, "points", tuple(points))
        if len(self.points) < 4:
            raise GeometryError(
                f"ring needs >= 4 stored points (3 distinct vertices), got {len(self.points)}"
            )
        first, last = self.points[0], self.points[-1]
        if first.lon != last.lon or first.lat != last.lat:
            raise GeometryError("ring is not closed: first point != last point")
        srids = {p.srid for p in self.points}
        if len(srids) != 1:
            raise GeometryError(f"ring mixes SRIDs: {sorted(srids)}")
        distinct = {(p.lon, p.lat) for p in self.points}
        if len(distinct) < 3:
            raise DegenerateGeometryError(
                f"ring has only {len(distinct)} distinct vertices"
            )

    @property
    def srid(self) -> int:
        return self.points[0].srid

    @property
    def vertices(self) -> tuple[GeoPoint, ...]:
        """The ring's points without the closing duplicate."""
        return self.points[:-1]


@dataclass(frozen=True)
class PolygonShape:
    """One outer ring plus optional holes (holes are empty after ingestion)."""

    outer: Ring
    holes: tuple[Ring, ...] = ()

    def __init__(self, outer: Ring, holes: Sequence[Ring] = ()):
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", tuple(holes))
        for hole in self.holes:
            if hole.srid != outer.srid:
                raise GeometryError("hole SRID differs from outer ring SRID")

    @property
    def srid(self) -> int:
        return self.outer.srid


@dataclass(frozen=True)
class MultiPolygonShape:
    """A non-empty union of polygons sharing one SRID."""

    polygons: tuple[PolygonShape, ...]

    def __init__(self, polygons: Sequence[PolygonShape]):
        object.__setattr__(self, "polygons", tuple(polygons))
        if not self.polygons:
            raise GeometryError("multipolygon must contain at least one polygon")
        srids = {p.srid for p in self.polygons}
        if len(srids) != 1:
            raise GeometryError(f"multipolygon mixes SRIDs: {sorted(srids)}")

    @property
    def srid(self) -> int:
        return self.polygons[0].srid


@dataclass(frozen=True)
class Polyline:
    """An open run of points (roads, waterways, railways)."""

    points: tuple[GeoPoint, ...]

    def __init__(self, points: Sequence[GeoPoint]):
        object.__setattr__(self, "points", tuple(points))
        if len(self.points) < 2:
            raise GeometryError("polyline needs at least 2 points")
        srids = {p.srid for p in self.points}
        if len(srids) != 1:
            raise GeometryError(f"polyline mixes SRIDs: {sorted(srids)}")

    @property
    def srid(self) -> int:
        return self.points[0].srid


Geometry = Union[PolygonShape, MultiPolygonShape, Polyline]


@dataclass(frozen=True)
class UavState:
    """Position and motion of the vehicle at one instant."""

    position: GeoPoint
    height_m: float
    heading_deg: float
    velocity_ms: float
    last_update: datetime = field(compare=False)

    def __post_init__(self):
        _require_finite(self.height_m, "height_m")
        _require_finite(self.heading_deg, "heading_deg")
        _require_finite(self.velocity_ms, "velocity_ms")
        if not 0.0 <= self.heading_deg < 360.0:
            raise InvalidInputError(
                f"heading {self.heading_deg} outside [0, 360); normalize first"
            )
        if self.velocity_ms < 0.0:
            raise InvalidInputError(f"velocity {self.velocity_ms} must be >= 0")


def normalize_heading(raw_deg: float) -> float:
    """Wrap an angle into [0, 360)."""
    _require_finite(raw_deg, "heading")
    wrapped = math.fmod(raw_deg, 360.0)
    if wrapped < 0.0:
        wrapped += 360.0
    return 0.0 if wrapped == 360.0 else wrapped


def shoelace_area(points: Sequence[LocalXY]) -> float:
    """Signed planar area in m²; positive for counterclockwise order.

    Accepts either a closed run (last == first) or an open one; the
    closing edge is implied.
    """
    if len(points) < 3:
        raise GeometryError("need at least 3 points for an area")
    total = 0.0
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        total += a.x_m * b.y_m - b.x_m * a.y_m
    return total / 2.0


def ring_area_signed(ring: Ring, proj) -> float:
    """Signed area of a ring in m² after projection into LocalXY."""
    xy = [proj.to_local(p) for p in ring.vertices]
    return shoelace_area(xy)


_DEGENERATE_AREA = 1e-24  # deg²; far below any real map feature


def polygon_centroid(poly: PolygonShape) -> GeoPoint:
    """Area-weighted centroid of the outer ring, in the ring's own SRID."""
    verts = poly.outer.vertices
    # Shoelace sums cancel catastrophically for small rings far from the
    # origin; shifting into a frame anchored at the first vertex keeps the
    # full precision of the vertex offsets.
    x0, y0 = verts[0].lon, verts[0].lat
    area2 = 0.0  # twice the signed area
    cx = 0.0
    cy = 0.0
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        ax, ay = a.lon - x0, a.lat - y0
        bx, by = b.lon - x0, b.lat - y0
        cross = ax * by - bx * ay
        area2 += cross
        cx += (ax + bx) * cross
        cy += (ay + by) * cross
    if abs(area2) < _DEGENERATE_AREA:
        raise DegenerateGeometryError("polygon has zero area, centroid undefined")
    return GeoPoint(x0 + cx / (3.0 * area2), y0 + cy / (3.0 * area2), srid=poly.srid)


def _polyline_centroid(line: Polyline) -> GeoPoint:
    # Length-weighted midpoint of the run's segments.
    total = 0.0
    cx = 0.0
    cy = 0.0
    for a, b in zip(line.points, line.points[1:]):
        seg = math.hypot(b.lon - a.lon, b.lat - a.lat)
        total += seg
        cx += seg * (a.lon + b.lon) / 2.0
        cy += seg * (a.lat + b.lat) / 2.0
    if total == 0.0:
        raise DegenerateGeometryError("polyline has zero length")
    return GeoPoint(cx / total, cy / total, srid=line.srid)


def geometry_centroid(geom: Geometry) -> GeoPoint:
    """Centroid of any supported geometry kind."""
    if isinstance(geom, PolygonShape):
        return polygon_centroid(geom)
    if isinstance(geom, MultiPolygonShape):
        # Area-weighted combination of the member centroids.
        total = 0.0
        cx = 0.0
        cy = 0.0
        for poly in geom.polygons:
            c = polygon_centroid(poly)
            verts = poly.outer.vertices
            x0, y0 = verts[0].lon, verts[0].lat
            a2 = 0.0
            for i in range(len(verts)):
                a = verts[i]
                b = verts[(i + 1) % len(verts)]
                a2 += (a.lon - x0) * (b.lat - y0) - (b.lon - x0) * (a.lat - y0)
            w = abs(a2) / 2.0
            total += w
            cx += w * c.lon
            cy += w * c.lat
        if total == 0.0:
            raise DegenerateGeometryError("multipolygon has zero total area")
        return GeoPoint(cx / total, cy / total, srid=geom.srid)
    if isinstance(geom, Polyline):
        return _polyline_centroid(geom)
    raise GeometryError(f"unsupported geometry type {type(geom).__name__}")


BBox = tuple[float, float, float, float]  # (min_lon, min_lat, max_lon, max_lat)


def geometry_bbox(geom: Geometry) -> BBox:
    """Axis-aligned degree-space bounding box of a geometry."""
    if isinstance(geom, PolygonShape):
        pts = geom.outer.points
    elif isinstance(geom, MultiPolygonShape):
        pts = tuple(p for poly in geom.polygons for p in poly.outer.points)
    elif isinstance(geom, Polyline):
        pts = geom.points
    else:
        raise GeometryError(f"unsupported geometry type {type(geom).__name__}")
    lons = [p.lon for p in pts]
    lats = [p.lat for p in pts]
    return (min(lons), min(lats), max(lons), max(lats))


def bbox_intersects(a: BBox, b: BBox) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])
