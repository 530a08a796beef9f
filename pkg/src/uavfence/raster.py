"""Rasterization of fence geometry into RGBA layers and PNG export.

Pixel-center sampling with even-odd fill, no anti-aliasing: a pixel takes
the layer color iff its center lies inside a polygon.  Geometry union is
performed in raster space by painting every polygon into one mask, which
is pixel-identical to unioning first and painting once.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidExtentError, LayerMismatchError
from .geo import Geometry, MultiPolygonShape, PolygonShape, Ring
from .ingest import FenceConfig
from .store import BufferZone, FeatureStore

RGBA = tuple[int, int, int, int]

TRANSPARENT: RGBA = (0, 0, 0, 0)


@dataclass(frozen=True)
class Extent:
    """Geographic window of a raster: lon/lat min and max."""

    lon_min: float
    lat_min: float
    lon_max: float
    lat_max: float

    def __post_init__(self):
        if not (self.lon_min < self.lon_max and self.lat_min < self.lat_max):
            raise InvalidExtentError(
                f"degenerate extent {self.lon_min},{self.lat_min}..{self.lon_max},{self.lat_max}"
            )

    @classmethod
    def square_around(cls, zone: BufferZone) -> "Extent":
        r = zone.radius_deg
        return cls(
            zone.center.lon - r,
            zone.center.lat - r,
            zone.center.lon + r,
            zone.center.lat + r,
        )


@dataclass
class RasterLayer:
    """Row-major RGBA pixel grid with its geographic extent.

    Row 0 is the northern edge, column 0 the western edge.
    """

    width_px: int
    height_px: int
    extent: Extent
    pixels: np.ndarray  # uint8, shape (height, width, 4)

    @classmethod
    def blank(cls, width_px: int, height_px: int, extent: Extent) -> "RasterLayer":
        if width_px < 1 or height_px < 1:
            raise InvalidExtentError("raster needs at least one pixel per axis")
        return cls(
            width_px=width_px,
            height_px=height_px,
            extent=extent,
            pixels=np.zeros((height_px, width_px, 4), dtype=np.uint8),
        )

    def fill(self, color: RGBA) -> "RasterLayer":
        self.pixels[:, :] = color
        return self

    def painted_count(self) -> int:
        return int(np.count_nonzero(self.pixels[:, :, 3]))


@dataclass(frozen=True)
class ColorScheme:
    """Display colors; red obstacles on a black background, per avionics use."""

    obstacle: RGBA = (255, 0, 0, 255)
    reference: RGBA = (255, 255, 255, 255)
    open_area: RGBA = (0, 255, 0, 255)
    uav_marker: RGBA = (255, 165, 0, 255)
    background: RGBA = (0, 0, 0, 255)

    def __post_init__(self):
        for name in ("obstacle", "reference", "open_area", "uav_marker", "background"):
            color = getattr(self, name)
            if len(color) != 4 or any(not 0 <= c <= 255 for c in color):
                raise ValueError(f"{name} must be 4 channels in 0..255, got {color}")


def _pixel_center_lons(extent: Extent, width: int) -> np.ndarray:
    step = (extent.lon_max - extent.lon_min) / width
    return extent.lon_min + (np.arange(width) + 0.5) * step


def _pixel_center_lats(extent: Extent, height: int) -> np.ndarray:
    step = (extent.lat_max - extent.lat_min) / height
    return extent.lat_max - (np.arange(height) + 0.5) * step


def _ring_edges(ring: Ring) -> list[tuple[float, float, float, float]]:
    verts = ring.vertices
    edges = []
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if a.lat != b.lat:  # horizontal edges never cross a scanline
            edges.append((a.lon, a.lat, b.lon, b.lat))
    return edges


def _paint_polygon(mask: np.ndarray, poly: PolygonShape, extent: Extent) -> None:
    height, width = mask.shape
    lons = _pixel_center_lons(extent, width)
    lats = _pixel_center_lats(extent, height)
    edges = _ring_edges(poly.outer)
    for hole in poly.holes:
        edges.extend(_ring_edges(hole))  # even-odd rule carves holes naturally
    if not edges:
        return
    # Only rows whose center latitude falls inside the polygon's lat span
    # can be painted; lats is descending (north at row 0).
    lat_lo = min(min(e[1], e[3]) for e in edges)
    lat_hi = max(max(e[1], e[3]) for e in edges)
    row_first = int(np.searchsorted(-lats, -lat_hi, side="left"))
    row_last = int(np.searchsorted(-lats, -lat_lo, side="right"))
    for row in range(row_first, min(row_last, height)):
        y = lats[row]
        xs = []
        for ax, ay, bx, by in edges:
            if (ay > y) != (by > y):
                xs.append(ax + (y - ay) * (bx - ax) / (by - ay))
        if not xs:
            continue
        xs.sort()
        for k in range(0, len(xs) - 1, 2):
            left = np.searchsorted(lons, xs[k], side="left")
            right = np.searchsorted(lons, xs[k + 1], side="left")
            mask[row, left:right] = True


def _geometry_mask(geoms, extent: Extent, width: int, height: int) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    for geom in geoms:
        if isinstance(geom, PolygonShape):
            _paint_polygon(mask, geom, extent)
        elif isinstance(geom, MultiPolygonShape):
            for poly in geom.polygons:
                _paint_polygon(mask, poly, extent)
        # polylines have no interior; they are not painted
    return mask


def rasterize(
    geoms: list[Geometry],
    extent: Extent,
    width_px: int,
    height_px: int,
    color: RGBA,
) -> RasterLayer:
    """Paint polygons into a fresh layer; everything else stays transparent."""
    layer = RasterLayer.blank(width_px, height_px, extent)
    mask = _geometry_mask(geoms, extent, width_px, height_px)
    layer.pixels[mask] = color
    return layer


def composite(base: RasterLayer, overlay: RasterLayer) -> RasterLayer:
    """Source-over alpha blend of ``overlay`` onto ``base``."""
    if (base.width_px, base.height_px) != (overlay.width_px, overlay.height_px):
        raise LayerMismatchError(
            f"layer sizes differ: {base.width_px}x{base.height_px} vs "
            f"{overlay.width_px}x{overlay.height_px}"
        )
    if base.extent != overlay.extent:
        raise LayerMismatchError("layer extents differ")
    alpha = overlay.pixels[:, :, 3]
    if bool(((alpha == 0) | (alpha == 255)).all()):
        # Binary alpha: source-over reduces to masked assignment, exactly.
        pixels = base.pixels.copy()
        opaque = alpha == 255
        pixels[opaque] = overlay.pixels[opaque]
        return RasterLayer(base.width_px, base.height_px, base.extent, pixels)
    dst = base.pixels.astype(np.float64) / 255.0
    src = overlay.pixels.astype(np.float64) / 255.0
    src_a = src[:, :, 3:4]
    dst_a = dst[:, :, 3:4]
    out_a = src_a + dst_a * (1.0 - src_a)
    safe = np.where(out_a == 0.0, 1.0, out_a)
    out_rgb = (src[:, :, :3] * src_a + dst[:, :, :3] * dst_a * (1.0 - src_a)) / safe
    out = np.concatenate([out_rgb, out_a], axis=2)
    pixels = np.rint(out * 255.0).astype(np.uint8)
    return RasterLayer(base.width_px, base.height_px, base.extent, pixels)


def _png_chunk(kind: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + kind
        + payload
        + struct.pack(">I", zlib.crc32(kind + payload) & 0xFFFFFFFF)
    )


def export_png(layer: RasterLayer) -> bytes:
    """Encode the layer as an 8-bit RGBA PNG (deterministic bytes)."""
    header = struct.pack(
        ">IIBBBBB", layer.width_px, layer.height_px, 8, 6, 0, 0, 0
    )
    rows = layer.pixels.astype(np.uint8)
    # Filter type 0 on every scanline keeps the encoder trivially verifiable.
    raw = b"".join(b"\x00" + rows[r].tobytes() for r in range(layer.height_px))
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(raw, 6))
        + _png_chunk(b"IEND", b"")
    )


def render_tick_layers(
    snapshot,
    store: FeatureStore,
    scheme: ColorScheme,
    config: FenceConfig,
) -> dict[str, RasterLayer]:
    """Rasterize one tick into named layers over the zone's bounding square.

    ``reference`` paints every in-extent feature, ``obstacles`` the in-zone
    obstacle set, ``open_area`` the zone disc minus obstacles, ``uav`` a
    marker disc at the vehicle position.
    """
    extent = Extent.square_around(snapshot.zone)
    px = config.raster_px
    extent_box = (extent.lon_min, extent.lat_min, extent.lon_max, extent.lat_max)

    reference_geoms = [store.get(fid).geometry for fid in store.query_bbox(extent_box)]
    reference = rasterize(reference_geoms, extent, px, px, scheme.reference)

    obstacle_geoms = [store.get(fid).geometry for fid in snapshot.obstacles_in_zone]
    obstacle_mask = _geometry_mask(obstacle_geoms, extent, px, px)
    obstacles = RasterLayer.blank(px, px, extent)
    obstacles.pixels[obstacle_mask] = scheme.obstacle

    zone_mask = _geometry_mask([PolygonShape(snapshot.zone.ring)], extent, px, px)
    open_area = RasterLayer.blank(px, px, extent)
    open_area.pixels[zone_mask & ~obstacle_mask] = scheme.open_area

    uav = RasterLayer.blank(px, px, extent)
    marker_radius = max(1.0, 0.01 * px)
    col = (snapshot.uav.position.lon - extent.lon_min) / (extent.lon_max - extent.lon_min) * px
    row = (extent.lat_max - snapshot.uav.position.lat) / (extent.lat_max - extent.lat_min) * px
    yy, xx = np.ogrid[0:px, 0:px]
    marker = (xx + 0.5 - col) ** 2 + (yy + 0.5 - row) ** 2 <= marker_radius**2
    uav.pixels[marker] = scheme.uav_marker

    return {
        "reference": reference,
        "obstacles": obstacles,
        "open_area": open_area,
        "uav": uav,
    }


def compose_display(layers: dict[str, RasterLayer], scheme: ColorScheme) -> RasterLayer:
    """Full display image: black background, open area, reference, obstacles, UAV."""
    base = RasterLayer.blank(
        layers["reference"].width_px,
        layers["reference"].height_px,
        layers["reference"].extent,
    ).fill(scheme.background)
    for name in ("open_area", "reference", "obstacles", "uav"):
        base = composite(base, layers[name])
    return base
