"""Session orchestration, file exports, benchmark harness and the HTTP API.

A single evaluation worker owns the session; HTTP handlers read the most
recent immutable snapshot bundle through an atomically swapped reference,
so every response reflects exactly one tick.
"""

from __future__ import annotations

import json
import logging
import math
import os
import random
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .engine import (
    Advisory,
    AdvisoryLevel,
    ObstacleRuleSet,
    TickSnapshot,
    evaluate_tick,
    format_situation_line,
)
from .errors import BenchPreconditionError, ConfigError, GeofenceError, ParseError
from .geo import GeoPoint, PolygonShape, Ring, UavState, normalize_heading
from .ingest import CATEGORIES, FenceConfig, MapFeature
from .raster import ColorScheme, compose_display, export_png, render_tick_layers
from .store import FeatureStore, build_buffer, query_candidates, within_buffer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TickBundle:
    """A snapshot plus its rendered exports, immutable once built."""

    tick: int
    snapshot: TickSnapshot
    situation_lines: tuple[str, ...]
    png_bytes: dict[str, bytes]


@dataclass
class SimSession:
    """Mutable session state owned by one evaluation worker."""

    store: FeatureStore
    config: FenceConfig
    scheme: ColorScheme = field(default_factory=ColorScheme)
    out_dir: Optional[Path] = None
    render: bool = True
    uav: Optional[UavState] = None
    tick_count: int = 0
    last_snapshot: Optional[TickSnapshot] = None
    timing_log: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._bundle: Optional[TickBundle] = None

    @property
    def bundle(self) -> Optional[TickBundle]:
        return self._bundle

    def submit_uav(self, uav: UavState) -> TickBundle:
        """Evaluate one tick and atomically publish its bundle."""
        with self._lock:
            timings: list[tuple[str, int]] = []
            started = time.perf_counter_ns()
            rules = ObstacleRuleSet.from_config(self.config)
            snapshot = evaluate_tick(self.store, rules, self.config, uav)
            timings.append(("evaluate", (time.perf_counter_ns() - started) // 1000))

            lines = tuple(format_situation_line(e) for e in snapshot.situation)
            pngs: dict[str, bytes] = {}
            if self.render:
                started = time.perf_counter_ns()
                layers = render_tick_layers(snapshot, self.store, self.scheme, self.config)
                pngs = {
                    "reference": export_png(layers["reference"]),
                    "obstacles": export_png(layers["obstacles"]),
                    "composite": export_png(compose_display(layers, self.scheme)),
                }
                timings.append(("render", (time.perf_counter_ns() - started) // 1000))

            self.uav = uav
            self.tick_count += 1
            self.last_snapshot = snapshot
            self.timing_log.extend(timings)
            bundle = TickBundle(
                tick=self.tick_count,
                snapshot=snapshot,
                situation_lines=lines,
                png_bytes=pngs,
            )
            self._bundle = bundle
            if self.out_dir is not None:
                self._write_outputs(bundle)
            return bundle

    def update_config(self, config: FenceConfig) -> Optional[TickBundle]:
        """Swap the fence configuration; re-evaluate if a UAV state exists."""
        with self._lock:
            self.config = config
            uav = self.uav
        if uav is not None:
            return self.submit_uav(uav)
        return None

    def _write_outputs(self, bundle: TickBundle) -> None:
        out = self.out_dir
        out.mkdir(parents=True, exist_ok=True)
        try:
            write_advisory_file(bundle.snapshot.advisory, out / "advisory_out.txt")
            with open(out / "situation.log", "a", encoding="utf-8") as log:
                for line in bundle.situation_lines:
                    log.write(line + "\n")
            for name, data in bundle.png_bytes.items():
                (out / f"{name}.png").write_bytes(data)
        except OSError as exc:
            logger.error("output write failed, tick continues: %s", exc)


def write_advisory_file(advisory: Advisory, path) -> None:
    """Atomically replace the advisory file: LEVEL line, then one message per line."""
    path = Path(path)
    text = "LEVEL:" + advisory.level.value + "\n" + "".join(
        m + "\n" for m in advisory.messages
    )
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        logger.error("advisory write failed, tick continues: %s", exc)


@dataclass(frozen=True)
class BenchResult:
    buffer_radius_deg: float
    mean_ms: float
    runs: int

    def __post_init__(self):
        if self.runs < 5:
            raise ValueError(f"bench needs >= 5 runs, got {self.runs}")


def _within_stage(store: FeatureStore, center: GeoPoint, radius_deg: float) -> int:
    """The timed unit: candidate filter plus exact containment over candidates."""
    zone = build_buffer(center, radius_deg, segments_per_quadrant=8)
    candidates = query_candidates(store, zone)
    return sum(1 for f in candidates if within_buffer(f.geometry, zone))


def bench_buffer_sweep(
    store: FeatureStore,
    center: GeoPoint,
    radii: list[float],
    runs: int = 5,
) -> list[BenchResult]:
    """Time the within stage for each radius over ``runs`` warm repetitions."""
    if len(store) == 0:
        raise BenchPreconditionError("bench requires a loaded feature corpus")
    results = []
    for radius in radii:
        _within_stage(store, center, radius)  # warm-up, not timed
        total = 0.0
        for _ in range(runs):
            started = time.perf_counter()
            _within_stage(store, center, radius)
            total += time.perf_counter() - started
        results.append(
            BenchResult(buffer_radius_deg=radius, mean_ms=total / runs * 1000.0, runs=runs)
        )
    return results


def make_synthetic_corpus(
    count: int,
    center: GeoPoint,
    extent_deg: float = 0.3,
    seed: int = 20180913,
) -> list[MapFeature]:
    """Uniform-density square features around ``center`` for benchmarking."""
    rng = random.Random(seed)
    half = extent_deg / 2.0
    features = []
    for i in range(count):
        lon = center.lon + rng.uniform(-half, half)
        lat = center.lat + rng.uniform(-half, half)
        size = rng.uniform(0.0001, 0.0004)
        ring = Ring(
            [
                GeoPoint(lon, lat),
                GeoPoint(lon + size, lat),
                GeoPoint(lon + size, lat + size),
                GeoPoint(lon, lat + size),
                GeoPoint(lon, lat),
            ]
        )
        features.append(
            MapFeature(
                osm_id=1_000_000 + i,
                category=CATEGORIES[i % len(CATEGORIES)],
                geometry=PolygonShape(ring),
            )
        )
    return features


def _config_to_json(config: FenceConfig) -> dict:
    return {
        "buffer_radius_deg": config.buffer_radius_deg,
        "obstacle_categories": sorted(config.obstacle_categories),
        "obstacle_type_filters": [list(f) for f in config.obstacle_type_filters],
        "whitelist_ids": sorted(config.whitelist_ids),
        "default_building_height_m": config.default_building_height_m,
        "cone_half_angle_deg": config.cone_half_angle_deg,
        "raster_px": config.raster_px,
        "stop_time_s": config.stop_time_s,
        "min_separation_m": config.min_separation_m,
    }


def _config_from_patch(config: FenceConfig, patch: dict) -> FenceConfig:
    kwargs = {}
    for key, value in patch.items():
        if key == "obstacle_categories":
            kwargs[key] = frozenset(value)
        elif key == "whitelist_ids":
            kwargs[key] = frozenset(int(v) for v in value)
        elif key == "obstacle_type_filters":
            kwargs[key] = tuple((str(t), str(v)) for t, v in value)
        elif key in (
            "buffer_radius_deg",
            "default_building_height_m",
            "cone_half_angle_deg",
            "stop_time_s",
            "min_separation_m",
        ):
            kwargs[key] = float(value)
        elif key == "raster_px":
            kwargs[key] = int(value)
        else:
            raise ConfigError(f"unknown config key {key!r}", key=key)
    return replace(config, **kwargs)


def _uav_to_json(uav: Optional[UavState]) -> Optional[dict]:
    if uav is None:
        return None
    return {
        "lat": uav.position.lat,
        "lon": uav.position.lon,
        "height_m": uav.height_m,
        "heading_deg": uav.heading_deg,
        "velocity_ms": uav.velocity_ms,
        "last_update": uav.last_update.isoformat(),
    }


def _uav_from_json(body: dict) -> UavState:
    for index, name in enumerate(("lat", "lon", "height_m", "heading_deg", "velocity_ms")):
        if name not in body:
            raise ParseError(f"missing field {index} ({name})")
        if not isinstance(body[name], (int, float)) or isinstance(body[name], bool):
            raise ParseError(f"field {index} ({name}) is not numeric")
        if not math.isfinite(float(body[name])):
            raise ParseError(f"field {index} ({name}) is not finite")
    return UavState(
        position=GeoPoint(float(body["lon"]), float(body["lat"])),
        height_m=float(body["height_m"]),
        heading_deg=normalize_heading(float(body["heading_deg"])),
        velocity_ms=float(body["velocity_ms"]),
        last_update=datetime.now(timezone.utc),
    )


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "uavfence"

    # Quieter than the default stderr-per-request logging.
    def log_message(self, fmt, *args):
        logger.debug("http: " + fmt, *args)

    @property
    def session(self) -> SimSession:
        return self.server.session  # type: ignore[attr-defined]

    def _send(self, status: int, content_type: str, body: bytes, tick: Optional[int]):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        if tick is not None:
            self.send_header("X-Tick", str(tick))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict, tick: Optional[int]):
        self._send(status, "application/json", json.dumps(payload).encode("utf-8"), tick)

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise ParseError("body must be a JSON object")
        return body

    def do_OPTIONS(self):
        self._send(204, "text/plain", b"", None)

    def do_GET(self):
        session = self.session
        bundle = session.bundle  # one atomic read; everything below uses it
        if self.path == "/state":
            tick = bundle.tick if bundle else 0
            payload = {
                "uav": _uav_to_json(bundle.snapshot.uav if bundle else None),
                "tick": tick,
                "config": _config_to_json(session.config),
            }
            self._send_json(200, payload, tick)
        elif self.path == "/situation":
            tick = bundle.tick if bundle else 0
            entries = [
                {"osm_id": e.osm_id, "distance_m": e.distance_m, "bearing_deg": e.bearing_deg}
                for e in (bundle.snapshot.situation if bundle else ())
            ]
            self._send_json(200, {"tick": tick, "entries": entries}, tick)
        elif self.path == "/advisory":
            tick = bundle.tick if bundle else 0
            advisory = bundle.snapshot.advisory if bundle else Advisory(AdvisoryLevel.NONE)
            payload = {
                "tick": tick,
                "level": advisory.level.value,
                "messages": list(advisory.messages),
                "eta_s": advisory.eta_s,
                "alert_event": advisory.alert_event,
            }
            self._send_json(200, payload, tick)
        elif self.path.startswith("/layers/") and self.path.endswith(".png"):
            name = self.path[len("/layers/") : -len(".png")]
            if bundle is None or name not in bundle.png_bytes:
                self._send_json(404, {"error": f"layer {name!r} not available"}, None)
                return
            self._send(200, "image/png", bundle.png_bytes[name], bundle.tick)
        else:
            self._send_json(404, {"error": f"no such endpoint {self.path}"}, None)

    def do_POST(self):
        session = self.session
        if self.path == "/uav":
            try:
                uav = _uav_from_json(self._read_json())
            except (ParseError, GeofenceError) as exc:
                self._send_json(400, {"error": str(exc)}, None)
                return
            bundle = session.submit_uav(uav)
            self._send_json(
                200,
                {"tick": bundle.tick, "level": bundle.snapshot.advisory.level.value},
                bundle.tick,
            )
        elif self.path == "/config":
            try:
                config = _config_from_patch(session.config, self._read_json())
            except (ParseError, ConfigError, ValueError, TypeError) as exc:
                self._send_json(400, {"error": str(exc)}, None)
                return
            bundle = session.update_config(config)
            tick = bundle.tick if bundle else (session.bundle.tick if session.bundle else 0)
            self._send_json(200, {"tick": tick, "config": _config_to_json(session.config)}, tick)
        else:
            self._send_json(404, {"error": f"no such endpoint {self.path}"}, None)


class GeofenceHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, session: SimSession):
        super().__init__(address, _Handler)
        self.session = session


def serve_http(session: SimSession, port: int, host: str = "127.0.0.1") -> GeofenceHTTPServer:
    """Bind the API server; the caller drives ``serve_forever``."""
    return GeofenceHTTPServer((host, port), session)
