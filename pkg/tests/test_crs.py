import random

import pytest

from uavfence.crs import (
    GeoidModel,
    HelmertParams,
    LocalProjection,
    from_local,
    geoid_height,
    helmert_transform,
    knots_to_ms,
    lon_arc_length,
    sexagesimal_to_decimal,
    to_local,
)
from uavfence.errors import (
    GeoidModelError,
    InvalidInputError,
    ParseError,
    ProjectionError,
    SridMismatchError,
)
from uavfence.geo import GeoPoint
from oracles import helmert_matrix_apply


class TestSexagesimal:
    def test_half_degree_is_thirty_minutes(self):
        assert sexagesimal_to_decimal(50, 30, 0) == pytest.approx(50.5)

    def test_zero(self):
        assert sexagesimal_to_decimal(0, 0, 0) == 0.0

    def test_seconds(self):
        assert sexagesimal_to_decimal(10, 0, 36) == pytest.approx(10.01)

    def test_sign_carried_by_degrees(self):
        assert sexagesimal_to_decimal(-50, 30, 0) == pytest.approx(-50.5)

    @pytest.mark.parametrize("minute,sec", [(60, 0), (-1, 0), (0, 60.0), (0, -0.1)])
    def test_out_of_range(self, minute, sec):
        with pytest.raises(InvalidInputError):
            sexagesimal_to_decimal(1, minute, sec)


class TestGeoidHeight:
    AT = GeoPoint(-0.627, 52.073)

    @pytest.mark.parametrize("h,n,expected", [(100, 0, 100), (100, -2.5, 97.5), (52.3, 47.0, 99.3)])
    def test_h_plus_n(self, h, n, expected):
        assert geoid_height(h, GeoidModel.constant(n), self.AT) == pytest.approx(expected)

    def test_lookup_failure_wrapped(self):
        def broken(_p):
            raise RuntimeError("no grid file")

        with pytest.raises(GeoidModelError):
            geoid_height(10.0, GeoidModel(lookup=broken), self.AT)

    def test_implausible_separation_rejected(self):
        with pytest.raises(GeoidModelError):
            geoid_height(10.0, GeoidModel(lookup=lambda _p: 300.0), self.AT)


class TestHelmert:
    def test_zero_params_identity(self):
        assert helmert_transform((1.0, 2.0, 3.0), HelmertParams.identity()) == (1.0, 2.0, 3.0)

    def test_pure_translation(self):
        params = HelmertParams(tx_m=100.0)
        assert helmert_transform((0.0, 0.0, 0.0), params) == (100.0, 0.0, 0.0)

    def test_matches_matrix_oracle(self):
        params = HelmertParams(s_ppm=20.49, ry_rad=1e-6)
        p = (3_875_000.0, -120_000.0, 5_030_000.0)
        got = helmert_transform(p, params)
        want = helmert_matrix_apply(p, params)
        for g, w in zip(got, want):
            assert g == pytest.approx(w, abs=1e-6)

    def test_identity_property_random_triples(self):
        rng = random.Random(555)
        identity = HelmertParams.identity()
        for _ in range(10_000):
            p = (rng.uniform(-7e6, 7e6), rng.uniform(-7e6, 7e6), rng.uniform(-7e6, 7e6))
            assert helmert_transform(p, identity) == p

    def test_affine_linearity(self):
        rng = random.Random(556)
        params = HelmertParams(
            tx_m=446.448, ty_m=-125.157, tz_m=542.06,
            rx_rad=7.28e-7, ry_rad=1.197e-6, rz_rad=4.083e-6, s_ppm=-20.489,
        )
        for _ in range(200):
            a = tuple(rng.uniform(-1e6, 1e6) for _ in range(3))
            b = tuple(rng.uniform(-1e6, 1e6) for _ in range(3))
            fa = helmert_transform(a, params)
            fb = helmert_transform(b, params)
            d = tuple(x - y for x, y in zip(a, b))
            md = helmert_matrix_apply(d, HelmertParams(
                rx_rad=params.rx_rad, ry_rad=params.ry_rad, rz_rad=params.rz_rad,
                s_ppm=params.s_ppm,
            ))
            for i in range(3):
                assert fa[i] - fb[i] == pytest.approx(md[i], abs=1e-6)

    def test_scale_sanity_bound(self):
        with pytest.raises(InvalidInputError):
            HelmertParams(s_ppm=1500.0)

    def test_from_csv(self):
        params = HelmertParams.from_csv("446.448,-125.157,542.06,7.28e-7,1.197e-6,4.083e-6,-20.489")
        assert params.tx_m == pytest.approx(446.448)
        assert params.s_ppm == pytest.approx(-20.489)

    def test_from_csv_wrong_count(self):
        with pytest.raises(ParseError):
            HelmertParams.from_csv("1,2,3")


class TestLonArcLength:
    TABLE = LocalProjection.round_100km(GeoPoint(0, 0))

    @pytest.mark.parametrize(
        "dlon,lat,expected,tol",
        [
            (0.01, 0.0, 1000.0, 1e-9),
            (0.01, 30.0, 870.0, 5.0),
            (0.01, 60.0, 500.0, 1e-9),
            (0.01, 87.5, 43.62, 0.01),
            (0.0001, 0.0, 10.0, 1e-9),
        ],
    )
    def test_round_table_rows(self, dlon, lat, expected, tol):
        assert lon_arc_length(dlon, lat, self.TABLE) == pytest.approx(expected, abs=tol)

    def test_equator_is_exact(self):
        proj = LocalProjection(origin=GeoPoint(0, 0))
        assert lon_arc_length(0.5, 0.0, proj) == 0.5 * proj.meters_per_degree

    def test_polar_latitude_rejected(self):
        with pytest.raises(ProjectionError):
            lon_arc_length(0.01, 89.5, self.TABLE)


class TestLocalProjection:
    ORIGIN = GeoPoint(-0.627, 52.073)

    def test_origin_maps_to_zero(self):
        proj = LocalProjection(origin=self.ORIGIN)
        xy = to_local(self.ORIGIN, proj)
        assert (xy.x_m, xy.y_m) == (0.0, 0.0)

    def test_hundredth_degree_east_at_equator(self):
        proj = LocalProjection(origin=GeoPoint(0, 0))
        xy = to_local(GeoPoint(0.01, 0), proj)
        assert xy.x_m == pytest.approx(1113.2, abs=1e-6)

    def test_round_trip_random_points(self):
        rng = random.Random(557)
        proj = LocalProjection(origin=self.ORIGIN)
        for _ in range(10_000):
            p = GeoPoint(
                self.ORIGIN.lon + rng.uniform(-0.05, 0.05),
                self.ORIGIN.lat + rng.uniform(-0.05, 0.05),
            )
            back = from_local(to_local(p, proj), proj)
            assert back.lon == pytest.approx(p.lon, abs=1e-9)
            assert back.lat == pytest.approx(p.lat, abs=1e-9)

    def test_srid_mismatch_rejected(self):
        proj = LocalProjection(origin=self.ORIGIN)
        with pytest.raises(SridMismatchError):
            to_local(GeoPoint(0, 0, srid=27700), proj)

    def test_polar_origin_rejected(self):
        with pytest.raises(ProjectionError):
            LocalProjection(origin=GeoPoint(0, 89.5))

    def test_round_mode_constant(self):
        assert LocalProjection.round_100km(GeoPoint(0, 0)).meters_per_degree == 100000.0


class TestKnots:
    def test_reference_speed(self):
        assert knots_to_ms(250) == pytest.approx(128.6, abs=0.05)

    def test_zero(self):
        assert knots_to_ms(0) == 0.0

    def test_definition(self):
        assert knots_to_ms(100) == pytest.approx(51.4444, abs=1e-3)

    def test_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            knots_to_ms(-1)
