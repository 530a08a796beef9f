"""In-memory feature store and the geometric predicates the pipeline runs.

Buffer construction, containment, point-in-polygon, distance and azimuth:
the spatial groundwork every tick evaluation stands on.  The store allows
one writer or many readers, never both; tick evaluation only reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

from .crs import LocalProjection
from .errors import (
    DegenerateGeometryError,
    GeometryError,
    InvalidInputError,
    SridMismatchError,
    UndefinedBearingError,
)
from .geo import (
    BBox,
    GeoPoint,
    Geometry,
    LocalXY,
    MultiPolygonShape,
    PolygonShape,
    Polyline,
    Ring,
    geometry_bbox,
    normalize_heading,
    shoelace_area,
)
from .index import RTree
from .ingest import MapFeature


@dataclass(frozen=True)
class BufferZone:
    """Degree-space circle around the UAV, stored with its polygon rim."""

    center: GeoPoint
    radius_deg: float
    ring: Ring

    @property
    def bbox(self) -> BBox:
        return (
            self.center.lon - self.radius_deg,
            self.center.lat - self.radius_deg,
            self.center.lon + self.radius_deg,
            self.center.lat + self.radius_deg,
        )


def build_buffer(center: GeoPoint, radius_deg: float, segments_per_quadrant: int = 8) -> BufferZone:
    """Polygonal approximation of a degree-space circle, counterclockwise.

    ``segments_per_quadrant`` follows the quad_segs convention: the ring
    carries 4 x segments_per_quadrant distinct vertices.
    """
    if not radius_deg > 0.0:
        raise InvalidInputError(f"buffer radius must be > 0, got {radius_deg}")
    if segments_per_quadrant < 1:
        raise InvalidInputError("segments_per_quadrant must be >= 1")
    n = 4 * segments_per_quadrant
    points = []
    for k in range(n):
        theta = 2.0 * math.pi * k / n
        points.append(
            GeoPoint(
                center.lon + radius_deg * math.cos(theta),
                center.lat + radius_deg * math.sin(theta),
                srid=center.srid,
            )
        )
    points.append(points[0])
    return BufferZone(center=center, radius_deg=radius_deg, ring=Ring(points))


def buffer_metrics(zone: BufferZone, proj: LocalProjection) -> tuple[float, float]:
    """(equivalent_radius_m, area_m2) of the zone's projected rim.

    The degree-space circle projects to an ellipse in meters; the
    equivalent radius is sqrt(area/pi), matching how the published meter
    radius was derived from a degree buffer.
    """
    origin = proj.origin
    if math.hypot(origin.lon - zone.center.lon, origin.lat - zone.center.lat) > 1e-6:
        raise InvalidInputError("buffer_metrics requires the projection origin at the zone center")
    xy = [proj.to_local(p) for p in zone.ring.vertices]
    area = abs(shoelace_area(xy))
    return math.sqrt(area / math.pi), area


def _geometry_vertices(geom: Geometry) -> Iterable[GeoPoint]:
    if isinstance(geom, PolygonShape):
        yield from geom.outer.vertices
        for hole in geom.holes:
            yield from hole.vertices
    elif isinstance(geom, MultiPolygonShape):
        for poly in geom.polygons:
            yield from _geometry_vertices(poly)
    elif isinstance(geom, Polyline):
        yield from geom.points
    else:
        raise GeometryError(f"unsupported geometry type {type(geom).__name__}")


def within_buffer(geom: Union[PolygonShape, MultiPolygonShape, Polyline], zone: BufferZone) -> bool:
    """True iff the geometry lies entirely inside the buffer disc.

    The disc is convex, so vertex containment is exact for polygons and
    polylines alike.
    """
    first = next(iter(_geometry_vertices(geom)))
    if first.srid != zone.center.srid:
        raise SridMismatchError(
            f"geometry SRID {first.srid} != zone SRID {zone.center.srid}"
        )
    r2 = zone.radius_deg * zone.radius_deg
    cx, cy = zone.center.lon, zone.center.lat
    for p in _geometry_vertices(geom):
        dx = p.lon - cx
        dy = p.lat - cy
        if dx * dx + dy * dy > r2:
            return False
    return True


_EPS = 1e-12


def _on_segment(px, py, ax, ay, bx, by) -> bool:
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if abs(cross) > _EPS:
        return False
    if min(ax, bx) - _EPS <= px <= max(ax, bx) + _EPS and min(ay, by) - _EPS <= py <= max(ay, by) + _EPS:
        return True
    return False


def _ring_crossings(px, py, ring: Ring) -> int:
    crossings = 0
    verts = ring.vertices
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        ay, by = a.lat, b.lat
        # Half-open rule on y avoids double counting at shared vertices.
        if (ay > py) != (by > py):
            x_at = a.lon + (py - ay) * (b.lon - a.lon) / (by - ay)
            if x_at > px:
                crossings += 1
    return crossings


def point_in_polygon(p: GeoPoint, poly: PolygonShape) -> bool:
    """Even-odd ray-casting containment; boundary points count as inside."""
    px, py = p.lon, p.lat
    for ring in (poly.outer, *poly.holes):
        verts = ring.vertices
        n = len(verts)
        for i in range(n):
            a = verts[i]
            b = verts[(i + 1) % n]
            if _on_segment(px, py, a.lon, a.lat, b.lon, b.lat):
                return True
    crossings = _ring_crossings(px, py, poly.outer)
    for hole in poly.holes:
        crossings += _ring_crossings(px, py, hole)
    return crossings % 2 == 1


def _point_in_geometry(p: GeoPoint, geom: Geometry) -> bool:
    if isinstance(geom, PolygonShape):
        return point_in_polygon(p, geom)
    if isinstance(geom, MultiPolygonShape):
        return any(point_in_polygon(p, poly) for poly in geom.polygons)
    return False  # a polyline has no interior


def _segment_distance(p: LocalXY, a: LocalXY, b: LocalXY) -> float:
    vx, vy = b.x_m - a.x_m, b.y_m - a.y_m
    wx, wy = p.x_m - a.x_m, p.y_m - a.y_m
    seg2 = vx * vx + vy * vy
    if seg2 == 0.0:
        return math.hypot(wx, wy)
    t = max(0.0, min(1.0, (wx * vx + wy * vy) / seg2))
    return math.hypot(wx - t * vx, wy - t * vy)


def _geometry_segments(geom: Geometry):
    if isinstance(geom, PolygonShape):
        verts = geom.outer.vertices
        n = len(verts)
        for i in range(n):
            yield verts[i], verts[(i + 1) % n]
    elif isinstance(geom, MultiPolygonShape):
        for poly in geom.polygons:
            yield from _geometry_segments(poly)
    elif isinstance(geom, Polyline):
        yield from zip(geom.points, geom.points[1:])
    else:
        raise GeometryError(f"unsupported geometry type {type(geom).__name__}")


def distance_to_feature(uav: GeoPoint, geom: Geometry, proj: LocalProjection) -> float:
    """Meters from the UAV to the geometry; zero when the UAV is inside it."""
    if _point_in_geometry(uav, geom):
        return 0.0
    p = proj.to_local(uav)
    best = math.inf
    for a, b in _geometry_segments(geom):
        d = _segment_distance(p, proj.to_local(a), proj.to_local(b))
        if d < best:
            best = d
    if not math.isfinite(best):
        raise DegenerateGeometryError("geometry has no segments")
    return best


def bearing_to(frm: GeoPoint, to: GeoPoint, proj: LocalProjection) -> float:
    """Azimuth from ``frm`` to ``to`` in [0, 360); 0 = north, 90 = east."""
    a = proj.to_local(frm)
    b = proj.to_local(to)
    dx = b.x_m - a.x_m
    dy = b.y_m - a.y_m
    if dx == 0.0 and dy == 0.0:
        raise UndefinedBearingError("bearing undefined between coincident points")
    return normalize_heading(math.degrees(math.atan2(dx, dy)))


class FeatureStore:
    """Id-keyed MapFeature collection with a bbox index over geometries."""

    def __init__(self, features: Iterable[MapFeature] = ()):
        self._features: dict[int, MapFeature] = {}
        self._bboxes: dict[int, BBox] = {}
        self._index = RTree([])
        self.replace_all(features)

    def replace_all(self, features: Iterable[MapFeature]) -> None:
        """Single-writer rebuild: swap in a new feature set and reindex."""
        feats: dict[int, MapFeature] = {}
        for f in features:
            if f.osm_id in feats:
                raise InvalidInputError(f"duplicate osm_id {f.osm_id} in store")
            feats[f.osm_id] = f
        self._features = feats
        self._bboxes = {fid: geometry_bbox(f.geometry) for fid, f in feats.items()}
        self._index = RTree(self._bboxes.items())

    def apply_heights(self, heights: dict[int, float]) -> None:
        from .ingest import apply_heights

        self.replace_all(apply_heights(list(self._features.values()), heights))

    def __len__(self) -> int:
        return len(self._features)

    def __contains__(self, osm_id: int) -> bool:
        return osm_id in self._features

    def get(self, osm_id: int) -> MapFeature:
        return self._features[osm_id]

    def features(self) -> list[MapFeature]:
        return list(self._features.values())

    def ids(self) -> list[int]:
        return sorted(self._features)

    def bbox(self, osm_id: int) -> BBox:
        return self._bboxes[osm_id]

    def query_bbox(self, box: BBox) -> list[int]:
        """Ids of features whose bbox intersects ``box``, ascending."""
        return sorted(self._index.query(box))


def query_candidates(store: FeatureStore, zone: BufferZone) -> list[MapFeature]:
    """Features whose bounding box intersects the zone's bounding box.

    A superset of the within set, in deterministic osm_id order.
    """
    return [store.get(fid) for fid in store.query_bbox(zone.bbox)]
