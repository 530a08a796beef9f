import random

import pytest

from uavfence.errors import ParseError
from uavfence.geo import GeoPoint, MultiPolygonShape, PolygonShape, Ring
from uavfence.wkt import parse_wkt, serialize_wkt

# The boundary string that documents the expected multipolygon layout.
HOUSES_WKT = (
    "MULTIPOLYGON(((13.7244306 51.0336413,13.7245794 51.033782,"
    "13.7248143 51.0336837,13.7246655 51.033543,13.7244306 51.0336413)))"
)


class TestParse:
    def test_houses_multipolygon(self):
        geom = parse_wkt(HOUSES_WKT)
        assert isinstance(geom, MultiPolygonShape)
        assert len(geom.polygons) == 1
        ring = geom.polygons[0].outer
        assert len(ring.points) == 5
        assert ring.points[0] == GeoPoint(13.7244306, 51.0336413)
        assert ring.points[0] == ring.points[-1]

    def test_minimal_triangle_polygon(self):
        geom = parse_wkt("POLYGON((0 0,1 0,1 1,0 0))")
        assert len(geom.polygons) == 1
        assert len(geom.polygons[0].outer.points) == 4

    def test_point(self):
        assert parse_wkt("POINT(-0.627 52.073)") == GeoPoint(-0.627, 52.073)

    def test_polygon_with_hole(self):
        geom = parse_wkt("POLYGON((0 0,4 0,4 4,0 4,0 0),(1 1,2 1,2 2,1 2,1 1))")
        assert len(geom.polygons[0].holes) == 1

    def test_whitespace_tolerated(self):
        geom = parse_wkt("  POLYGON ( ( 0 0 , 1 0 , 1 1 , 0 0 ) ) ")
        assert len(geom.polygons) == 1

    def test_unknown_keyword_rejected(self):
        with pytest.raises(ParseError):
            parse_wkt("LINESTRING(0 0,1 1)")

    def test_unbalanced_parens_report_offset(self):
        with pytest.raises(ParseError) as info:
            parse_wkt("POLYGON((0 0,1 0,1 1,0 0)")
        assert info.value.offset is not None

    def test_odd_coordinate_count_reports_offset(self):
        with pytest.raises(ParseError) as info:
            parse_wkt("POLYGON((0 0,1,1 1,0 0))")
        assert info.value.offset is not None

    def test_trailing_garbage_rejected(self):
        with pytest.raises(ParseError):
            parse_wkt("POINT(0 0)x")


class TestRoundTrip:
    def test_serialize_parse_identity_random_polygons(self):
        rng = random.Random(901)
        for _ in range(100):
            polys = []
            for _ in range(rng.randint(1, 3)):
                x0 = rng.uniform(-170, 160)
                y0 = rng.uniform(-80, 70)
                w = rng.uniform(0.001, 5.0)
                h = rng.uniform(0.001, 5.0)
                ring = Ring(
                    [
                        GeoPoint(x0, y0),
                        GeoPoint(x0 + w, y0),
                        GeoPoint(x0 + w, y0 + h),
                        GeoPoint(x0, y0 + h),
                        GeoPoint(x0, y0),
                    ]
                )
                polys.append(PolygonShape(ring))
            geom = MultiPolygonShape(polys)
            assert parse_wkt(serialize_wkt(geom)) == geom

    def test_point_round_trip(self):
        p = GeoPoint(13.7244306, 51.0336413)
        assert parse_wkt(serialize_wkt(p)) == p

    def test_houses_round_trip_preserves_text_coordinates(self):
        geom = parse_wkt(HOUSES_WKT)
        assert serialize_wkt(geom) == HOUSES_WKT
