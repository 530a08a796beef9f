"""Coordinate-reference machinery.

Degree conversion, an equirectangular local projection, the seven-parameter
datum (Helmert) transform, geoid separation, and distance-per-degree
scaling.  Everything here is a pure function over immutable parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import (
    GeoidModelError,
    InvalidInputError,
    ParseError,
    ProjectionError,
    SridMismatchError,
)
from .geo import GeoPoint, LocalXY, _require_finite

# Standard meters per degree of latitude on WGS84.
METERS_PER_DEGREE = 111320.0
# Round 100 km/degree: the constant coarse distance-per-degree tables use.
ROUND_100KM_PER_DEGREE = 100000.0

KNOT_MS = 0.514444

Triple = tuple[float, float, float]


@dataclass(frozen=True)
class HelmertParams:
    """Seven-parameter datum shift: translations, small rotations, scale.

    ``s_ppm`` is the scale factor minus one, in parts per million.
    """

    tx_m: float = 0.0
    ty_m: float = 0.0
    tz_m: float = 0.0
    rx_rad: float = 0.0
    ry_rad: float = 0.0
    rz_rad: float = 0.0
    s_ppm: float = 0.0

    def __post_init__(self):
        for name in ("tx_m", "ty_m", "tz_m", "rx_rad", "ry_rad", "rz_rad", "s_ppm"):
            _require_finite(getattr(self, name), name)
        if abs(self.s_ppm) >= 1000.0:
            raise InvalidInputError(f"scale {self.s_ppm} ppm fails sanity bound |s| < 1000")

    @classmethod
    def identity(cls) -> "HelmertParams":
        return cls()

    @classmethod
    def from_csv(cls, text: str) -> "HelmertParams":
        """Parse seven comma-separated decimals: tx,ty,tz,rx,ry,rz,s_ppm."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 7:
            raise ParseError(f"helmert parameters need 7 values, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"helmert parameters must be decimals: {exc}") from exc
        return cls(*values)


@dataclass(frozen=True)
class GeoidModel:
    """Geoid-ellipsoid separation lookup N(point), in meters."""

    lookup: Callable[[GeoPoint], float]

    @classmethod
    def constant(cls, n_m: float) -> "GeoidModel":
        _require_finite(n_m, "N")
        return cls(lookup=lambda _p: n_m)

    def separation(self, at: GeoPoint) -> float:
        try:
            n = float(self.lookup(at))
        except Exception as exc:
            raise GeoidModelError(f"geoid lookup failed at {at}: {exc}") from exc
        if not math.isfinite(n) or abs(n) > 120.0:
            raise GeoidModelError(f"geoid separation {n} m outside global bound |N| <= 120 m")
        return n


@dataclass(frozen=True)
class LocalProjection:
    """Equirectangular tangent plane centered on ``origin``.

    Accurate to well under 0.5% within a few kilometers of the origin,
    which covers every buffer size this engine uses.  ``round-100km`` mode
    swaps in a round 100 km/degree constant so coarse distance-per-degree
    table arithmetic is reproduced exactly.
    """

    origin: GeoPoint
    mode: str = "standard"
    meters_per_degree: float = 0.0

    def __post_init__(self):
        if self.mode not in ("standard", "round-100km"):
            raise InvalidInputError(f"unknown projection mode {self.mode!r}")
        if self.meters_per_degree == 0.0:
            default = (
                ROUND_100KM_PER_DEGREE
                if self.mode == "round-100km"
                else METERS_PER_DEGREE
            )
            object.__setattr__(self, "meters_per_degree", default)
        if self.meters_per_degree <= 0.0:
            raise InvalidInputError("meters_per_degree must be positive")
        if not -89.0 < self.origin.lat < 89.0:
            raise ProjectionError(
                f"projection undefined at origin latitude {self.origin.lat}"
            )

    @classmethod
    def round_100km(cls, origin: GeoPoint) -> "LocalProjection":
        return cls(origin=origin, mode="round-100km")

    @property
    def _cos_lat(self) -> float:
        return math.cos(math.radians(self.origin.lat))

    def to_local(self, p: GeoPoint) -> LocalXY:
        """Project a point into meters east/north of the origin."""
        if p.srid != self.origin.srid:
            raise SridMismatchError(
                f"point SRID {p.srid} != projection SRID {self.origin.srid}"
            )
        x = (p.lon - self.origin.lon) * self.meters_per_degree * self._cos_lat
        y = (p.lat - self.origin.lat) * self.meters_per_degree
        return LocalXY(x, y)

    def from_local(self, xy: LocalXY) -> GeoPoint:
        """Inverse of :meth:`to_local`."""
        lon = self.origin.lon + xy.x_m / (self.meters_per_degree * self._cos_lat)
        lat = self.origin.lat + xy.y_m / self.meters_per_degree
        return GeoPoint(lon, lat, srid=self.origin.srid)


def sexagesimal_to_decimal(deg: int, minute: int, sec: float) -> float:
    """Convert degrees/minutes/seconds to decimal degrees; sign rides on deg."""
    if not 0 <= minute < 60:
        raise InvalidInputError(f"minutes {minute} outside [0, 60)")
    if not 0.0 <= sec < 60.0:
        raise InvalidInputError(f"seconds {sec} outside [0, 60)")
    magnitude = abs(deg) + minute / 60.0 + sec / 3600.0
    return -magnitude if deg < 0 else magnitude


def geoid_height(h_ellipsoid_m: float, model: GeoidModel, at: GeoPoint) -> float:
    """Orthometric height H = h + N."""
    _require_finite(h_ellipsoid_m, "h_ellipsoid_m")
    return h_ellipsoid_m + model.separation(at)


def helmert_transform(p: Triple, params: HelmertParams) -> Triple:
    """Apply the seven-parameter transform T + M·p.

    M has diagonal (1+s) and small-angle rotation terms off it:

        [ 1+s  -rz   ry ]
        [  rz  1+s  -rx ]
        [ -ry   rx  1+s ]
    """
    x, y, z = (_require_finite(v, n) for v, n in zip(p, "xyz"))
    s = params.s_ppm * 1e-6
    rx, ry, rz = params.rx_rad, params.ry_rad, params.rz_rad
    return (
        params.tx_m + (1.0 + s) * x - rz * y + ry * z,
        params.ty_m + rz * x + (1.0 + s) * y - rx * z,
        params.tz_m - ry * x + rx * y + (1.0 + s) * z,
    )


def lon_arc_length(dlon_deg: float, lat_deg: float, proj: LocalProjection) -> float:
    """Ground distance in meters spanned by ``dlon_deg`` at a given latitude."""
    _require_finite(dlon_deg, "dlon_deg")
    _require_finite(lat_deg, "lat_deg")
    if abs(lat_deg) >= 89.0:
        raise ProjectionError(f"longitude arc undefined at polar latitude {lat_deg}")
    return dlon_deg * proj.meters_per_degree * math.cos(math.radians(lat_deg))


def to_local(p: GeoPoint, proj: LocalProjection) -> LocalXY:
    return proj.to_local(p)


def from_local(xy: LocalXY, proj: LocalProjection) -> GeoPoint:
    return proj.from_local(xy)


def knots_to_ms(v_kn: float) -> float:
    """Knots to meters per second."""
    _require_finite(v_kn, "v_kn")
    if v_kn < 0.0:
        raise InvalidInputError(f"speed {v_kn} kn must be >= 0")
    return v_kn * KNOT_MS
