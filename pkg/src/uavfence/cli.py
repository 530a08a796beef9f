"""Command-line entry points: ingest, tick, simulate, bench, serve."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

from .errors import GeofenceError
from .geo import GeoPoint, Polyline
from .ingest import (
    FenceConfig,
    IngestReport,
    apply_heights,
    load_height_csv,
    parse_construction_file,
    parse_osm_xml,
    parse_uav_line,
)
from .service import (
    SimSession,
    bench_buffer_sweep,
    make_synthetic_corpus,
    serve_http,
)
from .store import FeatureStore
from .wkt import serialize_wkt

logger = logging.getLogger(__name__)

USAGE_EXIT = 2
DATA_EXIT = 1


def _load_store(args) -> FeatureStore:
    report = IngestReport()
    features = parse_osm_xml(Path(args.map).read_bytes(), report)
    if getattr(args, "heights", None):
        features = apply_heights(features, load_height_csv(Path(args.heights).read_text()))
    for warning in report.warnings:
        logger.warning("%s", warning)
    if report.skipped_ways:
        logger.info("skipped %d uncategorized/open ways", len(report.skipped_ways))
    return FeatureStore(features)


def _load_config(args) -> FenceConfig:
    if getattr(args, "config", None):
        config, warnings = parse_construction_file(Path(args.config).read_text())
        for warning in warnings:
            logger.warning("construction file: %s", warning)
        return config
    return FenceConfig()


def _make_session(args, render: bool = True) -> SimSession:
    out_dir = Path(args.out) if getattr(args, "out", None) else None
    return SimSession(
        store=_load_store(args),
        config=_load_config(args),
        out_dir=out_dir,
        render=render,
    )


def _print_tick(bundle) -> None:
    for line in bundle.situation_lines:
        print(line)
    advisory = bundle.snapshot.advisory
    print(f"LEVEL:{advisory.level.value}")
    for message in advisory.messages:
        print(message)


def _cmd_ingest(args) -> int:
    report = IngestReport()
    features = parse_osm_xml(Path(args.map).read_bytes(), report)
    if args.heights:
        features = apply_heights(features, load_height_csv(Path(args.heights).read_text()))
    by_category: dict[str, int] = {}
    for feature in features:
        by_category[feature.category] = by_category.get(feature.category, 0) + 1
    print(f"features: {len(features)}")
    for category in sorted(by_category):
        print(f"  {category}: {by_category[category]}")
    print(f"skipped ways: {len(report.skipped_ways)}")
    print(f"degenerate ways: {len(report.degenerate_ways)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        dump = [
            {
                "osm_id": f.osm_id,
                "category": f.category,
                "name": f.name,
                "ftype": f.ftype,
                "height_m": f.height_m,
                "wkt": serialize_wkt(f.geometry) if not _is_line(f) else None,
            }
            for f in features
        ]
        (out / "features.json").write_text(json.dumps(dump, indent=1))
        print(f"wrote {out / 'features.json'}")
    return 0


def _is_line(feature) -> bool:
    return isinstance(feature.geometry, Polyline)


def _cmd_tick(args) -> int:
    session = _make_session(args)
    bundle = session.submit_uav(parse_uav_line(args.uav))
    _print_tick(bundle)
    return 0


def _cmd_simulate(args) -> int:
    session = _make_session(args)
    period = 1.0 / args.rate if args.rate > 0 else 0.0
    for raw in Path(args.uav_file).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        bundle = session.submit_uav(parse_uav_line(line))
        print(f"--- tick {bundle.tick} ---")
        _print_tick(bundle)
        if period:
            time.sleep(period)
    return 0


def _cmd_bench(args) -> int:
    radii = [float(r) for r in args.radii.split(",") if r.strip()]
    if args.map:
        store = _load_store(args)
        box = _store_center(store)
    else:
        center = GeoPoint(-0.627, 52.073)
        store = FeatureStore(make_synthetic_corpus(args.features, center))
        box = center
    results = bench_buffer_sweep(store, box, radii, runs=args.runs)
    print(f"{'radius_deg':>12} {'mean_ms':>10} {'runs':>5}")
    for result in results:
        print(f"{result.buffer_radius_deg:>12g} {result.mean_ms:>10.3f} {result.runs:>5}")
    return 0


def _store_center(store: FeatureStore) -> GeoPoint:
    boxes = [store.bbox(fid) for fid in store.ids()]
    lon = (min(b[0] for b in boxes) + max(b[2] for b in boxes)) / 2.0
    lat = (min(b[1] for b in boxes) + max(b[3] for b in boxes)) / 2.0
    return GeoPoint(lon, lat)


def _cmd_serve(args) -> int:
    session = _make_session(args)
    if args.uav:
        session.submit_uav(parse_uav_line(args.uav))
    try:
        server = serve_http(session, args.port, host=args.host)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return DATA_EXIT
    # flush so supervisors reading a pipe see the bound port immediately
    print(f"serving on http://{args.host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavfence",
        description="Attribute-driven UAV geofence engine: build fences from "
        "map objects, evaluate ticks, emit advisories and obstacle overlays.",
    )
    sub = parser.add_subparsers(dest="command")

    ingest = sub.add_parser("ingest", help="parse map.xml and summarize the features")
    ingest.add_argument("--map", required=True, help="OSM XML map file")
    ingest.add_argument("--heights", help="osm_id,height_m CSV join")
    ingest.add_argument("--out", help="directory for features.json dump")
    ingest.set_defaults(func=_cmd_ingest)

    tick = sub.add_parser("tick", help="evaluate one UAV line and print the report")
    tick.add_argument("--map", required=True)
    tick.add_argument("--heights")
    tick.add_argument("--config", help="construction file (key,value lines)")
    tick.add_argument("--uav", required=True, help='"lat,lon,height_m,heading_deg,velocity_ms"')
    tick.add_argument("--out", help="directory for advisory/situation/PNG outputs")
    tick.set_defaults(func=_cmd_tick)

    simulate = sub.add_parser("simulate", help="replay a UAV-line file at fixed cadence")
    simulate.add_argument("--map", required=True)
    simulate.add_argument("--heights")
    simulate.add_argument("--config")
    simulate.add_argument("--uav-file", required=True, dest="uav_file")
    simulate.add_argument("--rate", type=float, default=1.0, help="ticks per second, 0 = no delay")
    simulate.add_argument("--out")
    simulate.set_defaults(func=_cmd_simulate)

    bench = sub.add_parser("bench", help="time the within stage across buffer radii")
    bench.add_argument("--map", help="corpus map; default is a synthetic corpus")
    bench.add_argument("--heights")
    bench.add_argument("--radii", default="0.002,0.005,0.01,0.02,0.05")
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--features", type=int, default=10000, help="synthetic corpus size")
    bench.set_defaults(func=_cmd_bench)

    serve = sub.add_parser("serve", help="run the HTTP API for the operator panel")
    serve.add_argument("--map", required=True)
    serve.add_argument("--heights")
    serve.add_argument("--config")
    serve.add_argument("--uav", help="optional initial UAV line")
    serve.add_argument("--port", type=int, default=8750)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--out")
    serve.set_defaults(func=_cmd_serve)

    return parser


def run_cli(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage()
        return USAGE_EXIT
    try:
        return args.func(args)
    except GeofenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
