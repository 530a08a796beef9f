import random
from datetime import datetime, timezone

import pytest

from uavfence.errors import ConfigError, DanglingReferenceError, ParseError
from uavfence.geo import PolygonShape, Polyline
from uavfence.ingest import (
    CATEGORIES,
    FenceConfig,
    IngestReport,
    apply_heights,
    load_height_csv,
    normalize_for_fence,
    parse_construction_file,
    parse_osm_xml,
    parse_uav_line,
)

MINIMAL_BUILDING = """<?xml version="1.0"?>
<osm>
 <node id="1" lat="52.00" lon="-0.60"/>
 <node id="2" lat="52.00" lon="-0.599"/>
 <node id="3" lat="52.001" lon="-0.599"/>
 <node id="4" lat="52.001" lon="-0.60"/>
 <way id="9">
  <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/>
  <tag k="building" v="yes"/>
 </way>
</osm>
"""


def _synthetic_osm(way_count: int, seed: int) -> tuple[str, int]:
    """A generated document plus an independent count of qualifying ways."""
    rng = random.Random(seed)
    nodes = []
    ways = []
    node_id = 0
    qualifying = 0
    for wid in range(1, way_count + 1):
        lon = rng.uniform(-0.7, -0.5)
        lat = rng.uniform(52.0, 52.2)
        kind = rng.random()
        ids = []
        if kind < 0.6:  # closed building square
            for dx, dy in ((0, 0), (1e-4, 0), (1e-4, 1e-4), (0, 1e-4)):
                node_id += 1
                nodes.append((node_id, lon + dx, lat + dy))
                ids.append(node_id)
            refs = ids + [ids[0]]
            tag = '<tag k="building" v="yes"/>'
            qualifying += 1
        elif kind < 0.8:  # open road
            for i in range(3):
                node_id += 1
                nodes.append((node_id, lon + i * 1e-4, lat + i * 2e-4))
                ids.append(node_id)
            refs = ids
            tag = '<tag k="highway" v="service"/>'
            qualifying += 1
        else:  # untagged -> skipped
            for i in range(2):
                node_id += 1
                nodes.append((node_id, lon + i * 1e-4, lat))
                ids.append(node_id)
            refs = ids
            tag = ""
        nd = "".join(f'<nd ref="{r}"/>' for r in refs)
        ways.append(f'<way id="{wid}">{nd}{tag}</way>')
    node_xml = "".join(
        f'<node id="{nid}" lat="{lat:.7f}" lon="{lon:.7f}"/>' for nid, lon, lat in nodes
    )
    return f"<osm>{node_xml}{''.join(ways)}</osm>", qualifying


class TestParseOsmXml:
    def test_minimal_building(self):
        features = parse_osm_xml(MINIMAL_BUILDING)
        assert len(features) == 1
        feature = features[0]
        assert feature.osm_id == 9
        assert feature.category == "building"
        assert feature.ftype == "yes"
        assert isinstance(feature.geometry, PolygonShape)

    def test_empty_root(self):
        report = IngestReport()
        assert parse_osm_xml("<osm/>", report) == []
        assert not report.skipped_ways and not report.warnings

    def test_bytes_accepted(self):
        assert len(parse_osm_xml(MINIMAL_BUILDING.encode())) == 1

    def test_synthetic_corpus_matches_tag_scan(self):
        document, qualifying = _synthetic_osm(1000, seed=31)
        features = parse_osm_xml(document)
        assert len(features) == qualifying

    def test_deterministic_order(self):
        document, _ = _synthetic_osm(200, seed=32)
        first = parse_osm_xml(document)
        second = parse_osm_xml(document)
        assert [f.osm_id for f in first] == [f.osm_id for f in second]
        assert first == second

    def test_malformed_xml_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_osm_xml("<osm>\n<node id='1' lat='0' lon='0'>\n</osm>")
        assert info.value.line is not None

    def test_dangling_reference_names_way(self):
        doc = MINIMAL_BUILDING.replace('<nd ref="2"/>', '<nd ref="999"/>')
        with pytest.raises(DanglingReferenceError) as info:
            parse_osm_xml(doc)
        assert info.value.way_id == 9

    def test_degenerate_way_rejected_and_reported(self):
        doc = """<osm>
          <node id="1" lat="52.0" lon="-0.6"/>
          <node id="2" lat="52.1" lon="-0.5"/>
          <way id="7"><nd ref="1"/><nd ref="2"/><nd ref="1"/><nd ref="2"/><nd ref="1"/>
            <tag k="building" v="yes"/></way>
        </osm>"""
        report = IngestReport()
        assert parse_osm_xml(doc, report) == []
        assert report.degenerate_ways == [7]

    def test_open_way_with_polygon_tag_skipped(self):
        doc = MINIMAL_BUILDING.replace('<nd ref="1"/>\n  <tag', "<tag")
        report = IngestReport()
        parse_osm_xml(doc, report)
        assert 9 in report.skipped_ways

    def test_open_waterway_becomes_polyline(self):
        doc = """<osm>
          <node id="1" lat="52.0" lon="-0.6"/>
          <node id="2" lat="52.01" lon="-0.59"/>
          <way id="3"><nd ref="1"/><nd ref="2"/><tag k="waterway" v="stream"/></way>
        </osm>"""
        features = parse_osm_xml(doc)
        assert features[0].category == "waterways"
        assert isinstance(features[0].geometry, Polyline)

    def test_category_priority_building_wins(self):
        doc = MINIMAL_BUILDING.replace(
            '<tag k="building" v="yes"/>',
            '<tag k="landuse" v="industrial"/><tag k="building" v="yes"/>',
        )
        assert parse_osm_xml(doc)[0].category == "building"

    def test_height_tag_parsed_with_unit_suffix(self):
        doc = MINIMAL_BUILDING.replace(
            '<tag k="building" v="yes"/>',
            '<tag k="building" v="yes"/><tag k="height" v="18 m"/>',
        )
        assert parse_osm_xml(doc)[0].height_m == pytest.approx(18.0)

    def test_multipolygon_relation_outer_only(self):
        doc = """<osm>
          <node id="1" lat="52.0" lon="-0.6"/><node id="2" lat="52.0" lon="-0.59"/>
          <node id="3" lat="52.01" lon="-0.59"/><node id="4" lat="52.01" lon="-0.6"/>
          <node id="5" lat="52.003" lon="-0.597"/><node id="6" lat="52.003" lon="-0.596"/>
          <node id="7" lat="52.004" lon="-0.596"/><node id="8" lat="52.004" lon="-0.597"/>
          <way id="20"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="1"/></way>
          <way id="21"><nd ref="5"/><nd ref="6"/><nd ref="7"/><nd ref="8"/><nd ref="5"/></way>
          <relation id="30">
            <member type="way" ref="20" role="outer"/>
            <member type="way" ref="21" role="inner"/>
            <tag k="type" v="multipolygon"/><tag k="natural" v="water"/>
          </relation>
        </osm>"""
        report = IngestReport()
        features = parse_osm_xml(doc, report)
        assert [f.osm_id for f in features] == [20]
        assert features[0].category == "natural"
        assert isinstance(features[0].geometry, PolygonShape)
        assert not features[0].geometry.holes
        assert any("inner" in w for w in report.warnings)

    def test_every_polygon_satisfies_ring_invariants(self):
        document, _ = _synthetic_osm(1000, seed=33)
        for feature in parse_osm_xml(document):
            if isinstance(feature.geometry, PolygonShape):
                ring = feature.geometry.outer
                assert ring.points[0] == ring.points[-1]
                assert len(ring.points) >= 4


class TestNormalizeForFence:
    def test_holes_stripped(self):
        from uavfence.wkt import parse_wkt

        geom = parse_wkt("POLYGON((0 0,4 0,4 4,0 4,0 0),(1 1,2 1,2 2,1 2,1 1))")
        report = IngestReport()
        flat = normalize_for_fence(geom, report)
        assert all(not p.holes for p in flat.polygons)
        assert report.warnings


class TestConstructionFile:
    def test_radius_only_keeps_defaults(self):
        config, warnings = parse_construction_file("buffer_radius_deg,0.012\n")
        assert config.buffer_radius_deg == pytest.approx(0.012)
        assert config.default_building_height_m == 30.0
        assert config.cone_half_angle_deg == 10.0
        assert config.raster_px == 500
        assert warnings == []

    def test_empty_file_is_all_defaults(self):
        config, _ = parse_construction_file("")
        assert config == FenceConfig()

    def test_raster_bound_violation_names_key(self):
        with pytest.raises(ConfigError) as info:
            parse_construction_file("raster_px,99999\n")
        assert info.value.key == "raster_px"

    def test_unknown_key_is_warning(self):
        config, warnings = parse_construction_file("frobnicate,1\n")
        assert config == FenceConfig()
        assert len(warnings) == 1 and "frobnicate" in warnings[0]

    def test_bad_value_names_key_and_line(self):
        with pytest.raises(ConfigError) as info:
            parse_construction_file("# comment\nbuffer_radius_deg,abc\n")
        assert info.value.key == "buffer_radius_deg"
        assert info.value.line == 2

    def test_lists_and_filters(self):
        text = (
            "obstacle_categories,building;landuse\n"
            "obstacle_type_filters,type=hospital;amenity=school\n"
            "whitelist_ids,101;107\n"
        )
        config, _ = parse_construction_file(text)
        assert config.obstacle_categories == frozenset({"building", "landuse"})
        assert config.obstacle_type_filters == (("type", "hospital"), ("amenity", "school"))
        assert config.whitelist_ids == frozenset({101, 107})

    def test_helmert_line_seven_decimals(self):
        config, _ = parse_construction_file("helmert,446.448,-125.157,542.06,0,0,0,-20.489\n")
        assert config.helmert.tx_m == pytest.approx(446.448)
        assert config.helmert.s_ppm == pytest.approx(-20.489)

    def test_unknown_category_rejected(self):
        with pytest.raises(ConfigError):
            parse_construction_file("obstacle_categories,skyscrapers\n")


class TestUavLine:
    def test_first_flight_state(self):
        state = parse_uav_line("52.073,-0.627,30,355,8")
        assert state.position.lat == pytest.approx(52.073)
        assert state.position.lon == pytest.approx(-0.627)
        assert state.height_m == 30.0
        assert state.heading_deg == 355.0
        assert state.velocity_ms == 8.0

    def test_heading_wraps(self):
        assert parse_uav_line("0,0,0,360,0").heading_deg == 0.0

    def test_field_count_error(self):
        with pytest.raises(ParseError):
            parse_uav_line("52.073,-0.627,30,355")

    def test_non_numeric_names_field_index(self):
        with pytest.raises(ParseError) as info:
            parse_uav_line("52.073,-0.627,xx,355,8")
        assert "field 2" in str(info.value)

    def test_timestamp_injectable(self):
        now = datetime(2019, 6, 1, tzinfo=timezone.utc)
        assert parse_uav_line("0,0,0,0,0", now=now).last_update == now


class TestHeights:
    def test_csv_join(self):
        features = parse_osm_xml(MINIMAL_BUILDING)
        heights = load_height_csv("# id,height\n9,55.5\n")
        joined = apply_heights(features, heights)
        assert joined[0].height_m == pytest.approx(55.5)

    def test_bad_csv_line(self):
        with pytest.raises(ParseError):
            load_height_csv("9\n")


def test_categories_are_the_closed_set():
    assert CATEGORIES == ("building", "natural", "landuse", "roads", "waterways", "railways")
