"""Well-Known-Text parsing and serialization.

Supports the geometry kinds the fence pipeline ingests: POINT, POLYGON and
MULTIPOLYGON.  Parse errors carry the byte offset where scanning stopped.
"""

from __future__ import annotations

from typing import Union

from .errors import ParseError
from .geo import GeoPoint, MultiPolygonShape, PolygonShape, Ring

WktGeometry = Union[GeoPoint, MultiPolygonShape]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def fail(self, message: str):
        raise ParseError(f"{message} at offset {self.pos}", offset=self.pos)

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        allowed = "+-0123456789.eE"
        while self.pos < len(self.text) and self.text[self.pos] in allowed:
            self.pos += 1
        token = self.text[start : self.pos]
        if not token:
            self.fail("expected a number")
        try:
            return float(token)
        except ValueError:
            self.pos = start
            self.fail(f"bad number {token!r}")

    def coordinate(self, srid: int) -> GeoPoint:
        lon = self.number()
        self.skip_ws()
        # A comma or closing paren here means the pair is incomplete.
        if self.peek() in ",)":
            self.fail("odd coordinate count: expected latitude after longitude")
        lat = self.number()
        return GeoPoint(lon, lat, srid=srid)

    def ring(self, srid: int) -> Ring:
        self.expect("(")
        points = [self.coordinate(srid)]
        while self.peek() == ",":
            self.expect(",")
            points.append(self.coordinate(srid))
        self.expect(")")
        return Ring(points)

    def polygon(self, srid: int) -> PolygonShape:
        self.expect("(")
        outer = self.ring(srid)
        holes = []
        while self.peek() == ",":
            self.expect(",")
            holes.append(self.ring(srid))
        self.expect(")")
        return PolygonShape(outer, holes)

    def end(self):
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail("trailing characters after geometry")


def parse_wkt(text: str, srid: int = 4326) -> WktGeometry:
    """Parse WKT text into geometry types.

    POLYGON is normalized to a single-member MultiPolygonShape so callers
    see one polygonal type; POINT parses to a GeoPoint.
    """
    sc = _Scanner(text)
    sc.skip_ws()
    upper = sc.text[sc.pos :].upper()
    if upper.startswith("MULTIPOLYGON"):
        sc.pos += len("MULTIPOLYGON")
        sc.expect("(")
        polygons = [sc.polygon(srid)]
        while sc.peek() == ",":
            sc.expect(",")
            polygons.append(sc.polygon(srid))
        sc.expect(")")
        sc.end()
        return MultiPolygonShape(polygons)
    if upper.startswith("POLYGON"):
        sc.pos += len("POLYGON")
        poly = sc.polygon(srid)
        sc.end()
        return MultiPolygonShape([poly])
    if upper.startswith("POINT"):
        sc.pos += len("POINT")
        sc.expect("(")
        point = sc.coordinate(srid)
        sc.expect(")")
        sc.end()
        return point
    sc.fail("expected POINT, POLYGON or MULTIPOLYGON keyword")


def _fmt(value: float) -> str:
    # repr() gives the shortest text that round-trips the float exactly.
    return repr(value)


def _ring_text(ring: Ring) -> str:
    return "(" + ",".join(f"{_fmt(p.lon)} {_fmt(p.lat)}" for p in ring.points) + ")"


def _polygon_text(poly: PolygonShape) -> str:
    rings = [_ring_text(poly.outer)] + [_ring_text(h) for h in poly.holes]
    return "(" + ",".join(rings) + ")"


def serialize_wkt(geom) -> str:
    """Serialize a geometry back to WKT; parse(serialize(g)) preserves coordinates."""
    if isinstance(geom, GeoPoint):
        return f"POINT({_fmt(geom.lon)} {_fmt(geom.lat)})"
    if isinstance(geom, PolygonShape):
        return "POLYGON" + _polygon_text(geom)
    if isinstance(geom, MultiPolygonShape):
        return "MULTIPOLYGON(" + ",".join(_polygon_text(p) for p in geom.polygons) + ")"
    raise ParseError(f"cannot serialize {type(geom).__name__} as WKT")
