"""Independent oracle implementations the tests check the engine against.

Each oracle deliberately takes a different route than the code under test:
winding numbers instead of ray casting, dense boundary sampling instead of
segment projection, linear scans instead of the R-tree, matrix algebra
instead of expanded arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from uavfence.geo import GeoPoint, MultiPolygonShape, PolygonShape, Polyline, Ring


def winding_number_inside(px: float, py: float, ring: Ring) -> bool:
    """Nonzero winding via summed signed angles; boundary counts as inside."""
    verts = ring.vertices
    n = len(verts)
    total = 0.0
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        ax, ay = a.lon - px, a.lat - py
        bx, by = b.lon - px, b.lat - py
        cross = ax * by - ay * bx
        dot = ax * bx + ay * by
        if abs(cross) < 1e-15 and dot <= 0.0:
            return True  # on the segment between a and b
        total += math.atan2(cross, dot)
    return abs(total) > math.pi  # ~2*pi inside, ~0 outside


def ring_xy(ring: Ring) -> np.ndarray:
    return np.array([(p.lon, p.lat) for p in ring.vertices])


def monte_carlo_area(ring: Ring, samples: int, seed: int) -> float:
    """Area by containment counting over a uniform sample of the bbox."""
    from matplotlib.path import Path

    verts = ring_xy(ring)
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(samples, 2))
    inside = Path(verts).contains_points(pts)
    box_area = float(np.prod(hi - lo))
    return box_area * inside.mean()


def triangle_fan_centroid(ring: Ring) -> tuple[float, float]:
    """Centroid by decomposing the polygon into triangles from vertex 0."""
    verts = ring_xy(ring)
    anchor = verts[0]
    total_area = 0.0
    cx = 0.0
    cy = 0.0
    for i in range(1, len(verts) - 1):
        a, b = verts[i], verts[i + 1]
        area = ((a[0] - anchor[0]) * (b[1] - anchor[1]) - (b[0] - anchor[0]) * (a[1] - anchor[1])) / 2.0
        centroid = (anchor + a + b) / 3.0
        total_area += area
        cx += area * centroid[0]
        cy += area * centroid[1]
    return cx / total_area, cy / total_area


def _boundary_samples(ring: Ring, per_ring: int) -> np.ndarray:
    """Points spread along the ring's edges, proportional to edge length."""
    verts = ring_xy(ring)
    closed = np.vstack([verts, verts[:1]])
    seg = np.diff(closed, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    total = lengths.sum()
    out = []
    for i, (a, d, ln) in enumerate(zip(closed[:-1], seg, lengths)):
        count = max(2, int(round(per_ring * ln / total)))
        t = np.linspace(0.0, 1.0, count, endpoint=False)
        out.append(a + t[:, None] * d)
    return np.vstack(out)


def sampled_min_distance(point_xy: np.ndarray, ring: Ring, samples: int) -> float:
    """Min distance from a planar point to densely sampled boundary points."""
    pts = _boundary_samples(ring, samples)
    d = pts - point_xy
    return float(np.min(np.hypot(d[:, 0], d[:, 1])))


def sampled_within_disc(geom, center: GeoPoint, radius_deg: float, samples: int) -> bool:
    """All sampled boundary points of a geometry within the degree disc."""
    if isinstance(geom, PolygonShape):
        rings = [geom.outer, *geom.holes]
        pts = np.vstack([_boundary_samples(r, samples) for r in rings])
    elif isinstance(geom, MultiPolygonShape):
        return all(
            sampled_within_disc(p, center, radius_deg, samples) for p in geom.polygons
        )
    elif isinstance(geom, Polyline):
        pts = np.array([(p.lon, p.lat) for p in geom.points])
    else:
        raise TypeError(type(geom))
    d = pts - np.array([center.lon, center.lat])
    return bool(np.all(np.hypot(d[:, 0], d[:, 1]) <= radius_deg))


def linear_scan_bbox(features, box) -> list[int]:
    """Brute-force bbox intersection filter, ascending osm_id."""
    from uavfence.geo import bbox_intersects, geometry_bbox

    hits = [f.osm_id for f in features if bbox_intersects(geometry_bbox(f.geometry), box)]
    return sorted(hits)


def helmert_matrix_apply(p, params) -> np.ndarray:
    """The transform as one literal matrix product."""
    s = params.s_ppm * 1e-6
    m = np.array(
        [
            [1.0 + s, -params.rz_rad, params.ry_rad],
            [params.rz_rad, 1.0 + s, -params.rx_rad],
            [-params.ry_rad, params.rx_rad, 1.0 + s],
        ]
    )
    t = np.array([params.tx_m, params.ty_m, params.tz_m])
    return t + m @ np.asarray(p, dtype=float)


def random_simple_ring(rng, center=(0.0, 0.0), radius=1.0, vertices=8, srid=4326) -> Ring:
    """A star-shaped (hence simple) polygon with jittered radii and angles."""
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=vertices))
    # Keep consecutive angles distinct so no edge degenerates.
    angles += np.linspace(0.0, 1e-3, vertices)
    radii = rng.uniform(0.3 * radius, radius, size=vertices)
    pts = [
        GeoPoint(center[0] + r * math.cos(a), center[1] + r * math.sin(a), srid=srid)
        for a, r in zip(angles, radii)
    ]
    pts.append(pts[0])
    return Ring(pts)
