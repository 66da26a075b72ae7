"""Distances between channels, compound families and rate regions.

Rate-region distances use the l1 ground metric on ``(R0, R1)``. Two flavours
are provided: :func:`region_distance` on finite point clouds (nearest
neighbour search) and :func:`convex_region_distance` on filled convex polygons,
which is exact because the l1 distance to a convex set is a convex function
and therefore peaks at a vertex.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .channels import BroadcastPair, Channel, CompoundBCC
from .errors import EmptySet, ShapeMismatch


class SetDistance(NamedTuple):
    value: float
    witness: tuple  # (index into a, index into b) achieving the max-min


def channel_distance(w1: Channel, w2: Channel) -> float:
    """``max_x sum_y |W1(y|x) - W2(y|x)|``."""
    if w1.shape != w2.shape:
        raise ShapeMismatch(f"channel shapes {w1.shape} and {w2.shape} differ")
    return float(np.abs(w1.matrix - w2.matrix).sum(axis=1).max())


def pair_distance(p1: BroadcastPair, p2: BroadcastPair) -> float:
    return max(channel_distance(p1.w, p2.w), channel_distance(p1.v, p2.v))


def _distance_table(a: Sequence[Channel], b: Sequence[Channel]) -> np.ndarray:
    if not a or not b:
        raise EmptySet("channel families must be non-empty")
    return np.array([[channel_distance(x, y) for y in b] for x in a])


def directed_set_distance(a: Sequence[Channel], b: Sequence[Channel], direction: int) -> SetDistance:
    """Directed Hausdorff distance between two channel families.

    ``direction=1`` scans ``b`` for its worst-covered element
    (``max_{j in b} min_{i in a}``); ``direction=2`` scans ``a``.
    Ties resolve to the lowest index.
    """
    table = _distance_table(a, b)
    if direction == 1:
        nearest = table.argmin(axis=0)
        j = int(np.argmax(table[nearest, np.arange(table.shape[1])]))
        i = int(nearest[j])
    elif direction == 2:
        nearest = table.argmin(axis=1)
        i = int(np.argmax(table[np.arange(table.shape[0]), nearest]))
        j = int(nearest[i])
    else:
        raise ValueError("direction must be 1 or 2")
    return SetDistance(float(table[i, j]), (i, j))


def compound_distance_report(c1: CompoundBCC, c2: CompoundBCC) -> dict:
    """All four directed distances plus the overall maximum with its witness."""
    if (c1.x_size, c1.y_size, c1.z_size) != (c2.x_size, c2.y_size, c2.z_size):
        raise ShapeMismatch("compound channels use different alphabets")
    parts = {
        "d1_W": directed_set_distance(c1.w_family, c2.w_family, 1),
        "d2_W": directed_set_distance(c1.w_family, c2.w_family, 2),
        "d1_V": directed_set_distance(c1.v_family, c2.v_family, 1),
        "d2_V": directed_set_distance(c1.v_family, c2.v_family, 2),
    }
    key = max(parts, key=lambda k: parts[k].value)
    return {
        "value": parts[key].value,
        "witness": {"term": key, "states": list(parts[key].witness)},
        "terms": {k: v.value for k, v in parts.items()},
    }


def compound_distance(c1: CompoundBCC, c2: CompoundBCC) -> float:
    return compound_distance_report(c1, c2)["value"]


def as_point_set(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise EmptySet("rate point set is empty")
    return pts


def _directed_points(a: np.ndarray, b: np.ndarray) -> tuple[float, int, int]:
    dist, idx = cKDTree(b).query(a, k=1, p=1)
    i = int(np.argmax(dist))
    return float(dist[i]), i, int(idx[i])


def region_distance_report(r1, r2) -> dict:
    a, b = as_point_set(r1), as_point_set(r2)
    d12, i, j = _directed_points(a, b)
    d21, jj, ii = _directed_points(b, a)
    if d12 >= d21:
        value, pair = d12, (a[i], b[j])
    else:
        value, pair = d21, (a[ii], b[jj])
    return {"value": value, "witness": {"from": pair[0].tolist(), "to": pair[1].tolist()}}


def region_distance(r1, r2) -> float:
    """Symmetric l1 Hausdorff distance between two finite sets of rate pairs."""
    return region_distance_report(r1, r2)["value"]


def _l1_point_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    # f(t) = |a + t d - p|_1 is convex piecewise linear; check its kinks and the ends
    d = b - a
    ts = [0.0, 1.0]
    with np.errstate(over="ignore"):
        for k in range(2):
            if d[k] != 0.0:
                ts.append(min(1.0, max(0.0, (p[k] - a[k]) / d[k])))
    return min(float(np.abs(a + t * d - p).sum()) for t in ts)


def _inside_convex(p: np.ndarray, poly: np.ndarray, tol: float = 1e-12) -> bool:
    if len(poly) < 3:
        return False
    e = np.roll(poly, -1, axis=0) - poly
    r = p - poly
    cross = e[:, 0] * r[:, 1] - e[:, 1] * r[:, 0]
    return bool(np.all(cross >= -tol))


def point_to_convex_distance(p, poly) -> float:
    """l1 distance from ``p`` to the filled convex polygon with CCW vertices ``poly``."""
    p = np.asarray(p, dtype=float)
    poly = as_point_set(poly)
    if len(poly) == 1:
        return float(np.abs(poly[0] - p).sum())
    if _inside_convex(p, poly):
        return 0.0
    nxt = np.roll(poly, -1, axis=0)
    return min(_l1_point_segment(p, a, b) for a, b in zip(poly, nxt))


def convex_region_distance(poly1, poly2) -> float:
    """Exact l1 Hausdorff distance between two filled convex polygons (CCW vertex lists)."""
    a, b = as_point_set(poly1), as_point_set(poly2)
    d12 = max(point_to_convex_distance(v, b) for v in a)
    d21 = max(point_to_convex_distance(v, a) for v in b)
    return max(d12, d21)


def rectangle_polygon(rect) -> np.ndarray:
    """CCW vertices of the origin-anchored rectangle ``[0, a0] x [0, a1]``."""
    a0, a1 = float(rect.a0), float(rect.a1)
    if a0 == 0.0 and a1 == 0.0:
        return np.zeros((1, 2))
    if a0 == 0.0 or a1 == 0.0:
        return np.array([(0.0, 0.0), (a0, a1)])
    return np.array([(0.0, 0.0), (a0, 0.0), (a0, a1), (0.0, a1)])


def rectangle_region_distance(r1, r2) -> float:
    """Exact Hausdorff distance between two origin-anchored rectangles."""
    return convex_region_distance(rectangle_polygon(r1), rectangle_polygon(r2))


def rectangle_corner_gap(r1, r2) -> float:
    """``|a0 - a0'| + |a1 - a1'|``; an upper bound on the rectangles' Hausdorff distance."""
    return abs(r1.a0 - r2.a0) + abs(r1.a1 - r2.a1)


def sample_rectangle(a0: float, a1: float, step: float = 1e-3) -> np.ndarray:
    """Dense grid over ``[0, a0] x [0, a1]`` including both far edges."""
    xs = np.unique(np.append(np.arange(0.0, a0, step), a0))
    ys = np.unique(np.append(np.arange(0.0, a1, step), a1))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])
