"""Parsers for every external input.

OSM-style ``map.xml`` documents, construction (configuration) files, UAV
state lines and the osm_id/height CSV join.  All parsers are pure and
reentrant.
"""

from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

from .crs import HelmertParams
from .errors import (
    ConfigError,
    DanglingReferenceError,
    DegenerateGeometryError,
    ParseError,
)
from .geo import (
    GeoPoint,
    Geometry,
    MultiPolygonShape,
    PolygonShape,
    Polyline,
    Ring,
    UavState,
    normalize_heading,
)

logger = logging.getLogger(__name__)

CATEGORIES = ("building", "natural", "landuse", "roads", "waterways", "railways")

# First matching tag wins; OSM data never guarantees a single category tag.
_TAG_PRIORITY = (
    ("building", "building"),
    ("natural", "natural"),
    ("landuse", "landuse"),
    ("waterway", "waterways"),
    ("railway", "railways"),
    ("highway", "roads"),
)

_LINE_CATEGORIES = {"roads", "waterways", "railways"}


@dataclass(frozen=True)
class MapFeature:
    """One map object: identity, classification tags and geometry."""

    osm_id: int
    category: str
    geometry: Geometry
    name: Optional[str] = None
    ftype: Optional[str] = None
    height_m: Optional[float] = None
    tags: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ParseError(f"unknown category {self.category!r} for feature {self.osm_id}")

    def tag(self, key: str) -> Optional[str]:
        if key == "type":
            return self.ftype
        for k, v in self.tags:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class FenceConfig:
    """Construction-file parameters with the engine's defaults."""

    buffer_radius_deg: float = 0.012
    obstacle_categories: frozenset[str] = frozenset({"building"})
    obstacle_type_filters: tuple[tuple[str, str], ...] = ()
    whitelist_ids: frozenset[int] = frozenset()
    default_building_height_m: float = 30.0
    cone_half_angle_deg: float = 10.0
    raster_px: int = 500
    stop_time_s: float = 5.0
    min_separation_m: float = 50.0
    helmert: HelmertParams = HelmertParams.identity()

    def __post_init__(self):
        if not self.buffer_radius_deg > 0.0:
            raise ConfigError(
                f"buffer_radius_deg must be > 0, got {self.buffer_radius_deg}",
                key="buffer_radius_deg",
            )
        if not 0.0 < self.cone_half_angle_deg < 90.0:
            raise ConfigError(
                f"cone_half_angle_deg must be in (0, 90), got {self.cone_half_angle_deg}",
                key="cone_half_angle_deg",
            )
        if not 16 <= self.raster_px <= 4096:
            raise ConfigError(
                f"raster_px must be in [16, 4096], got {self.raster_px}",
                key="raster_px",
            )
        if self.stop_time_s <= 0.0:
            raise ConfigError(
                f"stop_time_s must be > 0, got {self.stop_time_s}", key="stop_time_s"
            )
        if self.min_separation_m < 0.0:
            raise ConfigError(
                f"min_separation_m must be >= 0, got {self.min_separation_m}",
                key="min_separation_m",
            )
        unknown = set(self.obstacle_categories) - set(CATEGORIES)
        if unknown:
            raise ConfigError(
                f"unknown obstacle categories {sorted(unknown)}",
                key="obstacle_categories",
            )


@dataclass
class IngestReport:
    """What the OSM parser skipped or rejected, for operator visibility."""

    skipped_ways: list[int] = field(default_factory=list)
    degenerate_ways: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _parse_height_tag(value: str) -> Optional[float]:
    text = value.strip().lower()
    if text.endswith("m"):
        text = text[:-1].strip()
    try:
        height = float(text)
    except ValueError:
        return None
    return height if math.isfinite(height) else None


def _categorize(tags: dict) -> tuple[Optional[str], Optional[str]]:
    for key, category in _TAG_PRIORITY:
        if key in tags:
            return category, tags[key]
    return None, None


def _feature_from_tags(osm_id, category, ftype, tags, geometry) -> MapFeature:
    height = None
    if "height" in tags:
        height = _parse_height_tag(tags["height"])
    return MapFeature(
        osm_id=osm_id,
        category=category,
        geometry=geometry,
        name=tags.get("name"),
        ftype=ftype,
        height_m=height,
        tags=tuple(sorted(tags.items())),
    )


def parse_osm_xml(document, report: Optional[IngestReport] = None) -> list[MapFeature]:
    """Parse an OSM XML document (bytes or str) into MapFeatures.

    Closed ways with a recognized category tag become polygons; open ways
    tagged as roads/waterways/railways become polylines; everything else
    is skipped and counted in ``report``.  Multipolygon relations are
    ingested outer-ring-only.
    """
    if report is None:
        report = IngestReport()
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(
            f"malformed XML at line {line}, column {col}: {exc}", line=line
        ) from exc

    nodes: dict[int, GeoPoint] = {}
    for node in root.iter("node"):
        nodes[int(node.get("id"))] = GeoPoint(
            float(node.get("lon")), float(node.get("lat"))
        )

    ways: dict[int, tuple[list[int], dict]] = {}
    order: list[int] = []
    for way in root.iter("way"):
        way_id = int(way.get("id"))
        refs = [int(nd.get("ref")) for nd in way.findall("nd")]
        tags = {t.get("k"): t.get("v") for t in way.findall("tag")}
        ways[way_id] = (refs, tags)
        order.append(way_id)

    def way_points(way_id: int, refs: list[int]) -> list[GeoPoint]:
        missing = [r for r in refs if r not in nodes]
        if missing:
            raise DanglingReferenceError(
                f"way {way_id} references missing node(s) {missing}", way_id=way_id
            )
        return [nodes[r] for r in refs]

    features: list[MapFeature] = []
    built_ids: set[int] = set()

    for way_id in order:
        refs, tags = ways[way_id]
        category, ftype = _categorize(tags)
        if category is None or len(refs) < 2:
            report.skipped_ways.append(way_id)
            continue
        points = way_points(way_id, refs)
        closed = len(refs) >= 4 and refs[0] == refs[-1]
        if closed:
            try:
                geometry: Geometry = PolygonShape(Ring(points))
            except DegenerateGeometryError:
                report.degenerate_ways.append(way_id)
                report.warnings.append(f"way {way_id} rejected: degenerate polygon")
                continue
        elif category in _LINE_CATEGORIES:
            geometry = Polyline(points)
        else:
            report.skipped_ways.append(way_id)
            continue
        features.append(_feature_from_tags(way_id, category, ftype, tags, geometry))
        built_ids.add(way_id)

    for rel in root.iter("relation"):
        rel_id = int(rel.get("id"))
        tags = {t.get("k"): t.get("v") for t in rel.findall("tag")}
        if tags.get("type") != "multipolygon":
            continue
        category, ftype = _categorize(tags)
        if category is None:
            continue
        inner_count = 0
        for member in rel.findall("member"):
            if member.get("type") != "way":
                continue
            role = member.get("role", "")
            ref = int(member.get("ref"))
            if role == "inner":
                inner_count += 1
                continue
            if ref not in ways:
                report.warnings.append(
                    f"relation {rel_id}: member way {ref} absent, skipped"
                )
                continue
            refs, way_tags = ways[ref]
            if len(refs) < 4 or refs[0] != refs[-1]:
                report.skipped_ways.append(ref)
                report.warnings.append(
                    f"relation {rel_id}: open outer way {ref} not stitched, skipped"
                )
                continue
            if ref in built_ids:
                continue  # the way already carried its own category tag
            points = way_points(ref, refs)
            try:
                geometry = PolygonShape(Ring(points))
            except DegenerateGeometryError:
                report.degenerate_ways.append(ref)
                continue
            merged = dict(way_tags)
            merged.update(tags)
            features.append(_feature_from_tags(ref, category, ftype, merged, geometry))
            built_ids.add(ref)
        if inner_count:
            report.warnings.append(
                f"relation {rel_id}: dropped {inner_count} inner ring(s), fence is hole-free"
            )

    return features


def normalize_for_fence(geom: Geometry, report: Optional[IngestReport] = None) -> Geometry:
    """Strip holes from polygonal geometry; the fence pipeline is hole-free."""
    if isinstance(geom, PolygonShape) and geom.holes:
        if report is not None:
            report.warnings.append("dropped inner ring(s) during normalization")
        return PolygonShape(geom.outer)
    if isinstance(geom, MultiPolygonShape) and any(p.holes for p in geom.polygons):
        if report is not None:
            report.warnings.append("dropped inner ring(s) during normalization")
        return MultiPolygonShape([PolygonShape(p.outer) for p in geom.polygons])
    return geom


_LIST_SEP = ";"


def _parse_config_value(key: str, value: str, line_no: int):
    try:
        if key == "buffer_radius_deg":
            return float(value)
        if key == "obstacle_categories":
            return frozenset(v.strip() for v in value.split(_LIST_SEP) if v.strip())
        if key == "obstacle_type_filters":
            filters = []
            for pair in value.split(_LIST_SEP):
                pair = pair.strip()
                if not pair:
                    continue
                tag, _, tag_value = pair.partition("=")
                if not tag or not tag_value:
                    raise ValueError(f"filter {pair!r} is not tag=value")
                filters.append((tag.strip(), tag_value.strip()))
            return tuple(filters)
        if key == "whitelist_ids":
            return frozenset(int(v) for v in value.split(_LIST_SEP) if v.strip())
        if key in ("default_building_height_m", "cone_half_angle_deg", "stop_time_s",
                   "min_separation_m"):
            return float(value)
        if key == "raster_px":
            return int(value)
        if key == "helmert":
            return HelmertParams.from_csv(value)
    except (ValueError, ParseError) as exc:
        raise ConfigError(
            f"line {line_no}: bad value for {key}: {exc}", key=key, line=line_no
        ) from exc
    raise AssertionError(f"unhandled key {key}")


_CONFIG_KEYS = frozenset(
    {
        "buffer_radius_deg",
        "obstacle_categories",
        "obstacle_type_filters",
        "whitelist_ids",
        "default_building_height_m",
        "cone_half_angle_deg",
        "raster_px",
        "stop_time_s",
        "min_separation_m",
        "helmert",
    }
)


def parse_construction_file(text: str) -> tuple[FenceConfig, list[str]]:
    """Parse ``key,value`` lines into a FenceConfig.

    Absent keys keep their defaults; unknown keys are returned as warnings
    rather than raised.  The value may itself contain commas (helmert), so
    only the first comma splits.
    """
    values = {}
    warnings: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(",")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {line_no}: expected key,value", line=line_no)
        if key not in _CONFIG_KEYS:
            warnings.append(f"line {line_no}: unknown key {key!r} ignored")
            continue
        values[key] = _parse_config_value(key, value.strip(), line_no)
    try:
        config = FenceConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"construction file invalid: {exc}", key=exc.key) from exc
    return config, warnings


_UAV_FIELDS = ("lat", "lon", "height_m", "heading_deg", "velocity_ms")


def parse_uav_line(text: str, now: Optional[datetime] = None) -> UavState:
    """Parse ``lat,lon,height_m,heading_deg,velocity_ms`` into a UavState."""
    parts = [p.strip() for p in text.strip().split(",")]
    if len(parts) != 5:
        raise ParseError(
            f"UAV line needs 5 comma-separated fields {_UAV_FIELDS}, got {len(parts)}"
        )
    numbers = []
    for index, (name, part) in enumerate(zip(_UAV_FIELDS, parts)):
        try:
            numbers.append(float(part))
        except ValueError:
            raise ParseError(
                f"UAV line field {index} ({name}) is not numeric: {part!r}"
            ) from None
    lat, lon, height, heading, velocity = numbers
    return UavState(
        position=GeoPoint(lon, lat),
        height_m=height,
        heading_deg=normalize_heading(heading),
        velocity_ms=velocity,
        last_update=now if now is not None else datetime.now(timezone.utc),
    )


def load_height_csv(text: str) -> dict[int, float]:
    """Parse a two-column ``osm_id,height_m`` CSV used for the height join."""
    heights: dict[int, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(
                f"height CSV line {line_no}: expected osm_id,height_m", line=line_no
            )
        try:
            heights[int(parts[0])] = float(parts[1])
        except ValueError as exc:
            raise ParseError(f"height CSV line {line_no}: {exc}", line=line_no) from exc
    return heights


def apply_heights(features: list[MapFeature], heights: dict[int, float]) -> list[MapFeature]:
    """Return features with heights joined in by osm_id."""
    return [
        replace(f, height_m=heights[f.osm_id]) if f.osm_id in heights else f
        for f in features
    ]
