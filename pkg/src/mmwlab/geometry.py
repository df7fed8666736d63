"""Planar geometry for the urban blockage model.

Buildings are a Boolean field of rectangles (fixed footprint, uniform
random orientation). All spatial queries are exact: line-of-sight is a
segment-vs-rectangle intersection test, not a raster approximation.
Distances in meters, densities per km^2, angles in radians.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

_PER_KM2_TO_M2 = 1e-6


class EmptyFieldError(ValueError):
    """Raised when a query needs at least one building and none exist."""


class RegionClass(Enum):
    NEAR = "near"      # outdoor, within d_c of some building
    FAR = "far"        # outdoor, farther than d_c from every building
    INDOOR = "indoor"  # inside a rectangle


@dataclass(frozen=True)
class Window:
    """Square observation window centered on the origin.

    Metrics are evaluated at the origin only; point processes are sampled
    on the window expanded by `margin` on every side so that blockers and
    transmitters near the boundary are not clipped away.
    """

    half_width: float  # [m]
    margin: float      # [m]

    @property
    def sample_half(self) -> float:
        return self.half_width + self.margin

    @property
    def sample_area_m2(self) -> float:
        return (2.0 * self.sample_half) ** 2


@dataclass(frozen=True)
class Wall:
    """One side of a building rectangle, with its owner indices."""

    v1: tuple[float, float]
    v2: tuple[float, float]
    owner: int  # building index within the field
    k: int      # wall index within the building, 0..3

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.v1[0] + self.v2[0]) / 2.0, (self.v1[1] + self.v2[1]) / 2.0)

    @property
    def length(self) -> float:
        return math.hypot(self.v2[0] - self.v1[0], self.v2[1] - self.v1[1])

    @property
    def outward_normal(self) -> tuple[float, float]:
        # Corners are stored counterclockwise, so the outward normal is the
        # edge direction rotated by -90 degrees.
        dx = self.v2[0] - self.v1[0]
        dy = self.v2[1] - self.v1[1]
        n = math.hypot(dx, dy)
        return (dy / n, -dx / n)


@dataclass(frozen=True)
class Building:
    center: tuple[float, float]
    length: float       # [m], along the local x axis
    width: float        # [m], along the local y axis
    orientation: float  # [rad], in [0, pi)

    def corners(self) -> np.ndarray:
        """4x2 world corners, counterclockwise from the local (-L/2, -W/2)."""
        hl, hw = self.length / 2.0, self.width / 2.0
        local = np.array([[-hl, -hw], [hl, -hw], [hl, hw], [-hl, hw]])
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.asarray(self.center)

    def walls(self, owner: int = 0) -> list[Wall]:
        cs = self.corners()
        return [
            Wall(tuple(cs[k]), tuple(cs[(k + 1) % 4]), owner=owner, k=k)
            for k in range(4)
        ]


class BuildingField:
    """A finite realization of the rectangle field, in array form."""

    def __init__(self, buildings: list[Building]):
        self.buildings = list(buildings)
        n = len(self.buildings)
        self.centers = np.array([b.center for b in self.buildings], dtype=float).reshape(n, 2)
        self.half_l = np.array([b.length / 2.0 for b in self.buildings])
        self.half_w = np.array([b.width / 2.0 for b in self.buildings])
        ors = np.array([b.orientation for b in self.buildings])
        self.cos_o = np.cos(ors) if n else np.zeros(0)
        self.sin_o = np.sin(ors) if n else np.zeros(0)

    def __len__(self) -> int:
        return len(self.buildings)

    def to_local(self, points: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of `points` in building i's axis frame."""
        d = np.atleast_2d(points) - self.centers[i]
        u = d[:, 0] * self.cos_o[i] + d[:, 1] * self.sin_o[i]
        v = -d[:, 0] * self.sin_o[i] + d[:, 1] * self.cos_o[i]
        return u, v

    def boundary_distances(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(min distance to any rectangle, indoor mask) for each point.

        Distance is Euclidean to the rectangle boundary, 0 for indoor points.
        Raises EmptyFieldError when the field has no buildings.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if len(self) == 0:
            raise EmptyFieldError("building field is empty")
        best = np.full(len(pts), np.inf)
        indoor = np.zeros(len(pts), dtype=bool)
        for i in range(len(self)):
            u, v = self.to_local(pts, i)
            du = np.maximum(np.abs(u) - self.half_l[i], 0.0)
            dv = np.maximum(np.abs(v) - self.half_w[i], 0.0)
            dist = np.hypot(du, dv)
            indoor |= (np.abs(u) <= self.half_l[i]) & (np.abs(v) <= self.half_w[i])
            best = np.minimum(best, dist)
        return best, indoor

    def nearest_building(self, point) -> int:
        """Index of the rectangle nearest to `point` (ties: smaller index)."""
        pt = np.asarray(point, dtype=float).reshape(1, 2)
        return int(self.nearest_building_many(pt)[0])

    def nearest_building_many(self, points: np.ndarray) -> np.ndarray:
        """Index of the nearest rectangle for each point (ties: smaller index)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if len(self) == 0:
            raise EmptyFieldError("building field is empty")
        best = np.full(len(pts), np.inf)
        best_i = np.zeros(len(pts), dtype=int)
        for i in range(len(self)):
            u, v = self.to_local(pts, i)
            du = np.maximum(np.abs(u) - self.half_l[i], 0.0)
            dv = np.maximum(np.abs(v) - self.half_w[i], 0.0)
            dist = np.hypot(du, dv)
            closer = dist < best
            best = np.where(closer, dist, best)
            best_i = np.where(closer, i, best_i)
        return best_i

    def _cell_grid(self, reach: float):
        """Uniform hash of building centers, keyed by the query reach.

        Cell size >= circumradius + reach guarantees that every rectangle
        within `reach` of a point has its center inside the point's 3x3
        cell neighborhood.
        """
        key = round(reach, 9)
        cache = getattr(self, "_grid_cache", None)
        if cache is not None and cache[0] == key:
            return cache[1], cache[2]
        circum = float(np.max(np.hypot(self.half_l, self.half_w))) if len(self) else 1.0
        cell = max(circum + reach, 1e-6)
        cells: dict[tuple[int, int], list[int]] = {}
        for i in range(len(self)):
            cx = math.floor(self.centers[i, 0] / cell)
            cy = math.floor(self.centers[i, 1] / cell)
            cells.setdefault((cx, cy), []).append(i)
        self._grid_cache = (key, cell, cells)
        return cell, cells

    def near_indoor_masks(self, points: np.ndarray, d_c: float) -> tuple[np.ndarray, np.ndarray]:
        """(within-d_c mask, indoor mask), grid-accelerated but exact.

        Matches boundary_distances semantics: near means boundary distance
        <= d_c; indoor points are also reported in the first mask only if
        their distance (0) passes, so callers should test indoor first.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        near = np.zeros(len(pts), dtype=bool)
        indoor = np.zeros(len(pts), dtype=bool)
        if len(self) == 0 or len(pts) == 0:
            return near, indoor
        cell, cells = self._cell_grid(d_c)
        ix = np.floor(pts[:, 0] / cell).astype(int)
        iy = np.floor(pts[:, 1] / cell).astype(int)
        order = np.lexsort((iy, ix))
        sx, sy = ix[order], iy[order]
        breaks = np.flatnonzero((np.diff(sx) != 0) | (np.diff(sy) != 0)) + 1
        groups = np.split(order, breaks)
        for grp in groups:
            gx, gy = ix[grp[0]], iy[grp[0]]
            cand: list[int] = []
            for ox in (-1, 0, 1):
                for oy in (-1, 0, 1):
                    cand.extend(cells.get((gx + ox, gy + oy), ()))
            if not cand:
                continue
            sub = pts[grp]
            for i in cand:
                u, v = self.to_local(sub, i)
                du = np.maximum(np.abs(u) - self.half_l[i], 0.0)
                dv = np.maximum(np.abs(v) - self.half_w[i], 0.0)
                dist = np.hypot(du, dv)
                near[grp] |= dist <= d_c
                indoor[grp] |= (np.abs(u) <= self.half_l[i]) & (np.abs(v) <= self.half_w[i])
        return near, indoor


def sample_ppp(window: Window, density_per_km2: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on the margin-expanded window. Returns (n, 2) [m]."""
    lam_m2 = density_per_km2 * _PER_KM2_TO_M2
    n = rng.poisson(lam_m2 * window.sample_area_m2)
    h = window.sample_half
    return rng.uniform(-h, h, size=(n, 2))


def sample_buildings(window: Window, params, rng: np.random.Generator,
                     axis_aligned: bool = False) -> BuildingField:
    """Boolean rectangle field: PPP centers, iid orientation uniform [0, pi).

    Every rectangle has the deterministic footprint d_l x d_w. The
    `axis_aligned` flag pins all orientations to 0 for debugging.
    """
    centers = sample_ppp(window, params.lambda_ell, rng)
    n = len(centers)
    orients = np.zeros(n) if axis_aligned else rng.uniform(0.0, math.pi, size=n)
    return BuildingField([
        Building((centers[i, 0], centers[i, 1]), params.d_l, params.d_w, orients[i])
        for i in range(n)
    ])


def classify_points(points: np.ndarray, field: BuildingField, d_c: float) -> np.ndarray:
    """RegionClass for each point: indoor, near (<= d_c of a wall), or far."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(field) == 0:
        return np.array([RegionClass.FAR] * len(pts), dtype=object)
    dist, indoor = field.boundary_distances(pts)
    out = np.where(indoor, RegionClass.INDOOR,
                   np.where(dist <= d_c, RegionClass.NEAR, RegionClass.FAR))
    return out.astype(object)


def classify_point(point, field: BuildingField, d_c: float) -> RegionClass:
    return classify_points(np.asarray(point, dtype=float)[None, :], field, d_c)[0]


def _segment_blocked_by(field: BuildingField, i: int, p: np.ndarray, q: np.ndarray) -> bool:
    """Open segment (p, q) vs solid rectangle i, via slab clipping."""
    up, vp = field.to_local(p[None, :], i)
    uq, vq = field.to_local(q[None, :], i)
    p0 = np.array([up[0], vp[0]])
    d = np.array([uq[0] - up[0], vq[0] - vp[0]])
    half = np.array([field.half_l[i], field.half_w[i]])

    t0, t1 = 0.0, 1.0
    for ax in range(2):
        if abs(d[ax]) < 1e-15:
            if abs(p0[ax]) > half[ax]:
                return False
            continue
        ta = (-half[ax] - p0[ax]) / d[ax]
        tb = (half[ax] - p0[ax]) / d[ax]
        lo, hi = (ta, tb) if ta <= tb else (tb, ta)
        t0 = max(t0, lo)
        t1 = min(t1, hi)
        if t0 > t1:
            return False
    # Endpoint-only contact does not block the open segment.
    return t1 > 0.0 and t0 < 1.0


def los_between(p, q, field: BuildingField) -> bool:
    """True iff the open segment (p, q) meets no rectangle (interior or
    boundary). Zero-length segments are unobstructed by convention."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.array_equal(p, q):
        return True
    for i in range(len(field)):
        if _segment_blocked_by(field, i, p, q):
            return False
    return True


def los_pairs(ps: np.ndarray, qs: np.ndarray, field: BuildingField) -> np.ndarray:
    """Vectorized los_between over paired endpoint arrays (n, 2) and (n, 2).

    A per-building bounding-box rejection keeps the slab arithmetic off
    segments that cannot possibly touch the rectangle.
    """
    ps = np.atleast_2d(np.asarray(ps, dtype=float))
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    if ps.shape[0] == 1 and qs.shape[0] > 1:
        ps = np.broadcast_to(ps, qs.shape)
    n = len(qs)
    blocked = np.zeros(n, dtype=bool)
    if n == 0 or len(field) == 0:
        return ~blocked
    lo_xy = np.minimum(ps, qs)
    hi_xy = np.maximum(ps, qs)
    circum = np.hypot(field.half_l, field.half_w)
    for i in range(len(field)):
        cx, cy = field.centers[i]
        rad = circum[i]
        cand = ~blocked \
            & (lo_xy[:, 0] <= cx + rad) & (hi_xy[:, 0] >= cx - rad) \
            & (lo_xy[:, 1] <= cy + rad) & (hi_xy[:, 1] >= cy - rad)
        if not cand.any():
            continue
        idx = np.flatnonzero(cand)
        up, vp = field.to_local(ps[idx], i)
        uq, vq = field.to_local(qs[idx], i)
        du = uq - up
        dv = vq - vp
        t0 = np.zeros(len(idx))
        t1 = np.ones(len(idx))
        alive = np.ones(len(idx), dtype=bool)
        for comp, half, p0c in ((du, field.half_l[i], up), (dv, field.half_w[i], vp)):
            par = np.abs(comp) < 1e-15
            alive &= ~(par & (np.abs(p0c) > half))
            safe = np.where(par, 1.0, comp)
            ta = (-half - p0c) / safe
            tb = (half - p0c) / safe
            lo = np.minimum(ta, tb)
            hi = np.maximum(ta, tb)
            t0 = np.where(par, t0, np.maximum(t0, lo))
            t1 = np.where(par, t1, np.minimum(t1, hi))
        hit = alive & (t0 <= t1) & (t1 > 0.0) & (t0 < 1.0)
        blocked[idx[hit]] = True
    same = (qs[:, 0] == ps[:, 0]) & (qs[:, 1] == ps[:, 1])
    return ~blocked | same


def los_to_many(p, qs: np.ndarray, field: BuildingField) -> np.ndarray:
    """Vectorized los_between from one point to many endpoints."""
    p = np.asarray(p, dtype=float).reshape(1, 2)
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    return los_pairs(p, qs, field)


def _point_segment_distance(p, a, b) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return math.hypot(px - ax, py - ay)
    s = ((px - ax) * dx + (py - ay) * dy) / ll
    s = min(1.0, max(0.0, s))
    return math.hypot(px - (ax + s * dx), py - (ay + s * dy))


def nearest_wall(point, field: BuildingField) -> Wall:
    """Facing wall of the building nearest to `point`.

    Among the walls of the nearest rectangle whose outward half-plane
    contains the point, picks the smallest point-to-segment distance;
    ties go to the smaller wall index.
    """
    if len(field) == 0:
        raise EmptyFieldError("nearest_wall needs at least one building")
    p = np.asarray(point, dtype=float)
    bi = field.nearest_building(p)
    best: Wall | None = None
    best_d = math.inf
    for wall in field.buildings[bi].walls(owner=bi):
        mx, my = wall.midpoint
        nx, ny = wall.outward_normal
        if (p[0] - mx) * nx + (p[1] - my) * ny <= 0.0:
            continue  # point is behind this wall
        d = _point_segment_distance((p[0], p[1]), wall.v1, wall.v2)
        if d < best_d:
            best, best_d = wall, d
    if best is None:
        # Point is on a boundary line extension; fall back to raw distance.
        walls = field.buildings[bi].walls(owner=bi)
        dists = [_point_segment_distance((p[0], p[1]), w.v1, w.v2) for w in walls]
        best = walls[int(np.argmin(dists))]
    return best


def discovery_angle(bs, wall: Wall, beta: float) -> float:
    """Angle subtended at `bs` by the beta-contracted wall.

    The wall endpoints are pulled toward each other: with bias beta the
    effective endpoints are ((1-beta)*v2 + (1+beta)*v1)/2 and the mirror
    image. beta=0 collapses the wall to its midpoint (angle 0); beta=1
    keeps the full wall. Uses two-argument arctangents so every quadrant
    is handled; the result lies in [0, pi].
    """
    bx, by = float(bs[0]), float(bs[1])
    x1, y1 = wall.v1
    x2, y2 = wall.v2
    p1x = ((1.0 - beta) * x2 + (1.0 + beta) * x1) / 2.0
    p1y = ((1.0 - beta) * y2 + (1.0 + beta) * y1) / 2.0
    p2x = ((1.0 - beta) * x1 + (1.0 + beta) * x2) / 2.0
    p2y = ((1.0 - beta) * y1 + (1.0 + beta) * y2) / 2.0
    a1 = math.atan2(p1y - by, p1x - bx)
    a2 = math.atan2(p2y - by, p2x - bx)
    d = abs(a1 - a2)
    return 2.0 * math.pi - d if d > math.pi else d


def dump_scene_csv(path: str, field: BuildingField, labeled_points) -> None:
    """Write a drop to CSV with a `buildings` section and a `points` section.

    `labeled_points` is an iterable of (x, y, kind) tuples.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["# section", "buildings"])
        w.writerow(["cx", "cy", "length", "width", "orientation"])
        for b in field.buildings:
            w.writerow([f"{b.center[0]:.6f}", f"{b.center[1]:.6f}",
                        f"{b.length:.6f}", f"{b.width:.6f}", f"{b.orientation:.9f}"])
        w.writerow(["# section", "points"])
        w.writerow(["x", "y", "kind"])
        for x, y, kind in labeled_points:
            w.writerow([f"{x:.6f}", f"{y:.6f}", kind])
