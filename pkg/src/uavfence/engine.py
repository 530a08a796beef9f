"""Per-tick geofence evaluation.

Classifies obstacles by rule, filters them through the buffer and the
2.5D height rule, produces the sorted situation report and runs the
cone-test advisory.  ``evaluate_tick`` is a pure function of
(store snapshot, rules, config, UAV state).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .crs import LocalProjection
from .errors import UndefinedBearingError
from .geo import UavState, geometry_centroid
from .ingest import FenceConfig, MapFeature
from .store import (
    BufferZone,
    FeatureStore,
    bearing_to,
    build_buffer,
    distance_to_feature,
    query_candidates,
    within_buffer,
)


@dataclass(frozen=True)
class ObstacleRuleSet:
    """Which features count as obstacles; the whitelist always wins."""

    categories: frozenset[str] = frozenset({"building"})
    type_filters: tuple[tuple[str, str], ...] = ()
    whitelist_ids: frozenset[int] = frozenset()
    default_height_m: float = 30.0
    height_rule: bool = True  # 2.5D: obstacle applies iff uav height <= obstacle height

    @classmethod
    def from_config(cls, config: FenceConfig, height_rule: bool = True) -> "ObstacleRuleSet":
        return cls(
            categories=config.obstacle_categories,
            type_filters=config.obstacle_type_filters,
            whitelist_ids=config.whitelist_ids,
            default_height_m=config.default_building_height_m,
            height_rule=height_rule,
        )


@dataclass(frozen=True)
class SituationEntry:
    osm_id: int
    distance_m: float
    bearing_deg: float

    def __post_init__(self):
        if self.distance_m < 0.0:
            raise ValueError(f"distance {self.distance_m} must be >= 0")


class AdvisoryLevel(str, enum.Enum):
    NONE = "NONE"
    CAUTION = "CAUTION"
    STOP = "STOP"


@dataclass(frozen=True)
class Advisory:
    level: AdvisoryLevel
    triggering_ids: tuple[int, ...] = ()
    messages: tuple[str, ...] = ()
    eta_s: Optional[float] = None
    alert_event: bool = False


@dataclass(frozen=True)
class TickSnapshot:
    """Everything one evaluation cycle produced."""

    uav: UavState
    zone: BufferZone
    candidates: tuple[int, ...]
    obstacles_in_zone: tuple[int, ...]
    situation: tuple[SituationEntry, ...]
    advisory: Advisory


SITUATION_LINE = "Object OSM ID: {id} at degree:{bearing:.1f} with distance of {distance:.1f} meter"
ADVISORY_MESSAGE = "Make diversion to avoid going {bearing:.1f} degree"


def format_situation_line(entry: SituationEntry) -> str:
    return SITUATION_LINE.format(
        id=entry.osm_id, bearing=entry.bearing_deg, distance=entry.distance_m
    )


def classify_obstacles(store: FeatureStore, rules: ObstacleRuleSet) -> set[int]:
    """Ids of features matching the obstacle rules, minus the whitelist."""
    matched = set()
    for feature in store.features():
        if feature.category in rules.categories:
            matched.add(feature.osm_id)
            continue
        for tag, value in rules.type_filters:
            if feature.tag(tag) == value:
                matched.add(feature.osm_id)
                break
    return matched - rules.whitelist_ids


def obstacle_height_m(feature: MapFeature, rules: ObstacleRuleSet) -> float:
    return feature.height_m if feature.height_m is not None else rules.default_height_m


def _height_applies(uav: UavState, feature: MapFeature, rules: ObstacleRuleSet) -> bool:
    if not rules.height_rule:
        return True
    return uav.height_m <= obstacle_height_m(feature, rules)


def cone_test(heading_deg: float, bearing_deg: float, half_angle_deg: float) -> bool:
    """True iff the bearing lies strictly within the heading's half-angle cone."""
    diff = abs(heading_deg - bearing_deg)
    circular = min(diff, 360.0 - diff)
    return circular < half_angle_deg


def eta_to_object(distance_m: float, velocity_ms: float) -> Optional[float]:
    """Seconds to reach the object; None signals no-eta at zero velocity."""
    if distance_m < 0.0:
        raise ValueError(f"distance {distance_m} must be >= 0")
    if velocity_ms == 0.0:
        return None
    return distance_m / velocity_ms


def buffer_radius_from_speed(velocity_ms: float, window_s: float, proj: LocalProjection) -> float:
    """Degree radius covering ``window_s`` of flight at ``velocity_ms``.

    Scaled by the longitude axis (the short one), so the degree circle is
    never smaller than the distance flown.  Returns 0 for a parked UAV;
    callers substitute their configured minimum radius.
    """
    if velocity_ms < 0.0 or window_s <= 0.0:
        raise ValueError("velocity must be >= 0 and window > 0")
    radius_m = velocity_ms * window_s
    meters_per_lon_degree = proj.meters_per_degree * math.cos(
        math.radians(proj.origin.lat)
    )
    return radius_m / meters_per_lon_degree


def situation_report(
    obstacles: list[MapFeature], uav: UavState, proj: LocalProjection
) -> list[SituationEntry]:
    """One entry per obstacle, ascending by distance, ties by osm_id."""
    entries = []
    for feature in obstacles:
        distance = distance_to_feature(uav.position, feature.geometry, proj)
        centroid = geometry_centroid(feature.geometry)
        try:
            bearing = bearing_to(uav.position, centroid, proj)
        except UndefinedBearingError:
            bearing = 0.0  # coincident with the centroid; direction is arbitrary
        entries.append(
            SituationEntry(osm_id=feature.osm_id, distance_m=distance, bearing_deg=bearing)
        )
    entries.sort(key=lambda e: (e.distance_m, e.osm_id))
    return entries


def advise(situation: list[SituationEntry], uav: UavState, config: FenceConfig) -> Advisory:
    """Cone-test the situation and grade the alert.

    STOP when a triggering obstacle is inside the stopping window
    (velocity x stop_time, floored at min_separation); CAUTION for any
    other cone hit; NONE otherwise.
    """
    triggering = [
        e
        for e in situation
        if cone_test(uav.heading_deg, e.bearing_deg, config.cone_half_angle_deg)
    ]
    if not triggering:
        return Advisory(level=AdvisoryLevel.NONE)
    stop_distance = max(config.min_separation_m, uav.velocity_ms * config.stop_time_s)
    level = (
        AdvisoryLevel.STOP
        if any(e.distance_m <= stop_distance for e in triggering)
        else AdvisoryLevel.CAUTION
    )
    messages = tuple(ADVISORY_MESSAGE.format(bearing=e.bearing_deg) for e in triggering)
    eta = eta_to_object(min(e.distance_m for e in triggering), uav.velocity_ms)
    return Advisory(
        level=level,
        triggering_ids=tuple(e.osm_id for e in triggering),
        messages=messages,
        eta_s=eta,
        alert_event=level is AdvisoryLevel.STOP,
    )


def evaluate_tick(
    store: FeatureStore,
    rules: ObstacleRuleSet,
    config: FenceConfig,
    uav: UavState,
) -> TickSnapshot:
    """Run one full evaluation cycle for a UAV state."""
    proj = LocalProjection(origin=uav.position)
    zone = build_buffer(uav.position, config.buffer_radius_deg, segments_per_quadrant=8)
    candidates = query_candidates(store, zone)
    obstacle_ids = classify_obstacles(store, rules)
    obstacles = [
        f
        for f in candidates
        if f.osm_id in obstacle_ids
        and within_buffer(f.geometry, zone)
        and _height_applies(uav, f, rules)
    ]
    situation = situation_report(obstacles, uav, proj)
    advisory = advise(situation, uav, config)
    return TickSnapshot(
        uav=uav,
        zone=zone,
        candidates=tuple(f.osm_id for f in candidates),
        obstacles_in_zone=tuple(f.osm_id for f in obstacles),
        situation=tuple(situation),
        advisory=advisory,
    )
