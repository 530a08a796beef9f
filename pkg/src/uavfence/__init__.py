"""Self-contained geofencing engine for small UAVs.

Builds virtual fences from map-object attributes, evaluates a moving UAV
against them each tick, and emits situation reports, cone-test diversion
advisories and rasterized obstacle overlays.
"""

from .crs import GeoidModel, HelmertParams, LocalProjection
from .engine import (
    Advisory,
    AdvisoryLevel,
    ObstacleRuleSet,
    SituationEntry,
    TickSnapshot,
    evaluate_tick,
)
from .errors import GeofenceError
from .geo import (
    GeoPoint,
    LocalXY,
    MultiPolygonShape,
    PolygonShape,
    Polyline,
    Ring,
    UavState,
)
from .ingest import FenceConfig, MapFeature, parse_construction_file, parse_osm_xml, parse_uav_line
from .raster import ColorScheme, RasterLayer, composite, export_png, rasterize
from .service import SimSession, serve_http
from .store import BufferZone, FeatureStore, build_buffer
from .wkt import parse_wkt, serialize_wkt

__version__ = "0.1.0"

__all__ = [
    "Advisory",
    "AdvisoryLevel",
    "BufferZone",
    "ColorScheme",
    "FeatureStore",
    "FenceConfig",
    "GeofenceError",
    "GeoidModel",
    "GeoPoint",
    "HelmertParams",
    "LocalProjection",
    "LocalXY",
    "MapFeature",
    "MultiPolygonShape",
    "ObstacleRuleSet",
    "PolygonShape",
    "Polyline",
    "RasterLayer",
    "Ring",
    "SimSession",
    "SituationEntry",
    "TickSnapshot",
    "UavState",
    "build_buffer",
    "composite",
    "evaluate_tick",
    "export_png",
    "parse_construction_file",
    "parse_osm_xml",
    "parse_uav_line",
    "parse_wkt",
    "rasterize",
    "serialize_wkt",
    "serve_http",
]
