"""Rate rectangles, their unions over auxiliary chains, and convex-hull inner bounds.

For a chain ``U - V - X^n`` the achievable set is the rectangle
``[0, a0] x [0, a1]`` with

    a0 = (1/n) min_s min(I(U;Y_s^n), I(U;Z_s^n))
    a1 = (1/n) (min_s I(V;Y_s^n|U) - max_s I(V;Z_s^n|U))

both clipped at zero. Unions over chains are approximated by enumerating
auxiliary distributions on a simplex lattice; every reported region is an
inner approximation of the capacity region.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .channels import MAX_ENTRIES, Channel, CompoundBCC, product_channel
from .metrics import point_to_convex_distance
from .errors import DimensionMismatch, DomainError, EmptySet, SizeExceeded
from .info import (
    AuxiliaryInput,
    conditional_mutual_information,
    induced_joint,
    joint_uy,
    mutual_information,
    plogp_sum,
)

INNER_LABEL = "inner approximation"


@dataclass(frozen=True)
class RateRectangle:
    """Origin-anchored rectangle ``[0, a0] x [0, a1]`` of (common, confidential) rates."""

    a0: float
    a1: float
    n: int = 1
    aux: AuxiliaryInput | None = field(default=None, compare=False, repr=False)
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def corner(self) -> tuple[float, float]:
        return (self.a0, self.a1)

    def contains(self, point, tol: float = 1e-12) -> bool:
        r0, r1 = point
        return -tol <= r0 <= self.a0 + tol and -tol <= r1 <= self.a1 + tol


class _ProductCache:
    """n-fold extensions of a compound's marginal channels, built once per n."""

    def __init__(self, c: CompoundBCC, max_entries: int = MAX_ENTRIES):
        self.c = c
        self.max_entries = max_entries
        self._cache: dict[int, tuple[list[Channel], list[Channel]]] = {}

    def __call__(self, n: int) -> tuple[list[Channel], list[Channel]]:
        if n not in self._cache:
            ws = [product_channel(w, n, self.max_entries) for w in self.c.w_family]
            vs = [product_channel(v, n, self.max_entries) for v in self.c.v_family]
            self._cache[n] = (ws, vs)
        return self._cache[n]


def _rectangle_from_terms(iuy, iuz, ivy, ivz, n) -> tuple[float, float, dict]:
    iuy, iuz, ivy, ivz = (np.asarray(t, dtype=float) for t in (iuy, iuz, ivy, ivz))
    sy, sz = int(np.argmin(iuy)), int(np.argmin(iuz))
    if iuy[sy] <= iuz[sz]:
        a0_raw, a0_wit = iuy[sy], {"state": sy, "receiver": "Y"}
    else:
        a0_raw, a0_wit = iuz[sz], {"state": sz, "receiver": "Z"}
    ymin, zmax = int(np.argmin(ivy)), int(np.argmax(ivz))
    a1_raw = ivy[ymin] - ivz[zmax]
    witness = {"a0": a0_wit, "a1_min_y_state": ymin, "a1_max_z_state": zmax}
    return max(0.0, float(a0_raw) / n), max(0.0, float(a1_raw) / n), witness


def rate_rectangle(c: CompoundBCC, aux: AuxiliaryInput, max_entries: int = MAX_ENTRIES,
                   _products: _ProductCache | None = None) -> RateRectangle:
    """Rectangle achieved by ``aux`` on every state of ``c`` simultaneously."""
    n = aux.n
    if aux.xn_size != c.x_size**n:
        raise DimensionMismatch(f"encoder emits {aux.xn_size} symbols, expected |X|^n = {c.x_size ** n}")
    ws, vs = (_products or _ProductCache(c, max_entries))(n)
    iuy, iuz, ivy, ivz = [], [], [], []
    for wn, vn in zip(ws, vs):
        jy, jz = induced_joint(aux, wn), induced_joint(aux, vn)
        iuy.append(mutual_information(joint_uy(jy)))
        iuz.append(mutual_information(joint_uy(jz)))
        ivy.append(conditional_mutual_information(jy))
        ivz.append(conditional_mutual_information(jz))
    a0, a1, witness = _rectangle_from_terms(iuy, iuz, ivy, ivz, n)
    return RateRectangle(a0, a1, n, aux, witness)


# --- batched evaluation -------------------------------------------------------

def _batch_terms(p_uv: np.ndarray, enc: np.ndarray, ch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``I(U;Y)`` and ``I(V;Y|U)`` for a batch of chains through one channel.

    ``p_uv``: (B, U, V); ``enc``: (B, V, Xn); ``ch``: (Xn, Yn).
    """
    v_to_y = enc @ ch
    p = p_uv[..., None] * v_to_y[:, None, :, :]  # (B, U, V, Y)
    p_uy = p.sum(axis=2)
    h_u = plogp_sum(p_uv.sum(axis=2), axis=1)
    h_y = plogp_sum(p_uy.sum(axis=1), axis=1)
    h_uy = plogp_sum(p_uy.reshape(len(p), -1), axis=1)
    h_uv = plogp_sum(p_uv.reshape(len(p), -1), axis=1)
    h_uvy = plogp_sum(p.reshape(len(p), -1), axis=1)
    return h_u + h_y - h_uy, h_uy + h_uv - h_uvy - h_u


def rectangles_batch(products, p_u: np.ndarray, p_vu: np.ndarray, enc: np.ndarray, n: int) -> np.ndarray:
    """Corners ``(a0, a1)`` for a batch of chains; ``products`` is ``(W^n list, V^n list)``."""
    ws, vs = products
    p_uv = p_u[:, :, None] * p_vu
    iuy, ivy = zip(*(_batch_terms(p_uv, enc, w.matrix) for w in ws))
    iuz, ivz = zip(*(_batch_terms(p_uv, enc, v.matrix) for v in vs))
    iuy, ivy, iuz, ivz = (np.stack(t) for t in (iuy, ivy, iuz, ivz))  # (S, B)
    a0 = np.minimum(iuy.min(axis=0), iuz.min(axis=0)) / n
    a1 = (ivy.min(axis=0) - ivz.max(axis=0)) / n
    return np.column_stack([np.maximum(a0, 0.0), np.maximum(a1, 0.0)])


# --- auxiliary grids ----------------------------------------------------------

def simplex_lattice(dim: int, resolution: int) -> np.ndarray:
    """All points of the probability simplex in ``dim`` coordinates with step ``1/resolution``.

    Rows come in lexicographic order of their integer numerators.
    """
    if dim < 1 or resolution < 1:
        raise DomainError("simplex lattice needs dim >= 1 and resolution >= 1")
    pts = []
    for bars in itertools.combinations(range(resolution + dim - 1), dim - 1):
        edges = (-1,) + bars + (resolution + dim - 1,)
        pts.append([edges[i + 1] - edges[i] - 1 for i in range(dim)])
    return np.array(pts, dtype=float) / resolution


@dataclass(frozen=True)
class GridSpec:
    """Lattice used to enumerate auxiliary chains.

    Each of ``P_U``, the rows of ``P_{V|U}`` and the rows of the encoder is
    drawn from the simplex lattice of step ``1/resolution``. ``u_size`` and
    ``v_size`` default to ``|X| + 1``. When the full Cartesian product holds
    more than ``max_aux`` chains a seeded uniform subsample of that many is
    used instead.
    """

    resolution: int = 8
    u_size: int | None = None
    v_size: int | None = None
    max_aux: int = 20000
    seed: int = 0
    batch: int = 4096

    def __post_init__(self):
        if self.resolution < 1:
            raise EmptySet("grid resolution must be >= 1 (two points per simplex edge)")
        if self.max_aux < 1:
            raise EmptySet("grid must contain at least one auxiliary chain")

    @property
    def step(self) -> float:
        return 1.0 / self.resolution

    def sizes(self, x_size: int) -> tuple[int, int]:
        return (self.u_size or x_size + 1, self.v_size or x_size + 1)

    def describe(self, x_size: int, n: int) -> dict:
        u, v = self.sizes(x_size)
        total = grid_size(self, x_size, n)
        return {
            "step": f"1/{self.resolution}",
            "u_size": u,
            "v_size": v,
            "n": n,
            "full_size": total,
            "subsampled": total > self.max_aux,
            "seed": self.seed,
        }


def _lattice_sizes(grid: GridSpec, x_size: int, n: int) -> tuple[int, ...]:
    u, v = grid.sizes(x_size)
    xn = x_size**n
    k = grid.resolution
    return u, v, xn, math.comb(k + u - 1, u - 1), math.comb(k + v - 1, v - 1), math.comb(k + xn - 1, xn - 1)


def grid_size(grid: GridSpec, x_size: int, n: int) -> int:
    u, v, _, mu, mv, me = _lattice_sizes(grid, x_size, n)
    return mu * mv**u * me**v


def iter_aux_grid(grid: GridSpec, x_size: int, n: int) -> Iterator[tuple[list[int], np.ndarray, np.ndarray, np.ndarray]]:
    """Yield batches ``(aux_ids, p_u, p_v_given_u, encoder)`` of grid chains.

    An aux id is the mixed-radix index of the chain in the full product, with
    the ``P_U`` digit most significant, then the ``P_{V|U}`` rows, then the
    encoder rows. Enumeration order is increasing id, so results do not
    depend on how batches are scheduled.
    """
    u, v, xn, mu, mv, me = _lattice_sizes(grid, x_size, n)
    if u * v * xn * grid.batch > MAX_ENTRIES * 4:
        raise SizeExceeded("auxiliary alphabets too large for batched evaluation")
    lu = simplex_lattice(u, grid.resolution)
    lv = simplex_lattice(v, grid.resolution)
    if me > 10**7:
        raise SizeExceeded(f"encoder lattice has {me} rows; lower the resolution or n")
    le = simplex_lattice(xn, grid.resolution)
    radices = [mu] + [mv] * u + [me] * v
    total = grid_size(grid, x_size, n)

    if total <= grid.max_aux:
        def digit_batches():
            for start in range(0, total, grid.batch):
                ids = np.arange(start, min(total, start + grid.batch), dtype=np.int64)
                digits = np.empty((len(ids), len(radices)), dtype=np.int64)
                rem = ids.copy()
                for pos in range(len(radices) - 1, -1, -1):
                    digits[:, pos] = rem % radices[pos]
                    rem //= radices[pos]
                yield digits
    else:
        rng = np.random.default_rng(grid.seed)
        digits_all = np.column_stack([rng.integers(0, r, size=grid.max_aux) for r in radices])
        ids_all = [_encode(d, radices) for d in digits_all.tolist()]
        order = sorted(range(len(ids_all)), key=ids_all.__getitem__)
        unique = [i for k, i in enumerate(order) if k == 0 or ids_all[i] != ids_all[order[k - 1]]]
        digits_all = digits_all[unique]

        def digit_batches():
            for start in range(0, len(digits_all), grid.batch):
                yield digits_all[start:start + grid.batch]

    for digits in digit_batches():
        ids = [_encode(d, radices) for d in digits.tolist()]
        p_u = lu[digits[:, 0]]
        p_vu = lv[digits[:, 1:1 + u]]
        enc = le[digits[:, 1 + u:]]
        yield ids, p_u, p_vu, enc


def _encode(digits, radices) -> int:
    value = 0
    for d, r in zip(digits, radices):
        value = value * r + int(d)
    return value


def aux_from_grid(grid: GridSpec, x_size: int, n: int, aux_id: int) -> AuxiliaryInput:
    """Rebuild the chain with a given id."""
    u, v, xn, mu, mv, me = _lattice_sizes(grid, x_size, n)
    radices = [mu] + [mv] * u + [me] * v
    digits = []
    for r in reversed(radices):
        digits.append(aux_id % r)
        aux_id //= r
    digits.reverse()
    lu, lv, le = (simplex_lattice(d, grid.resolution) for d in (u, v, xn))
    return AuxiliaryInput(
        lu[digits[0]],
        Channel(lv[digits[1:1 + u]]),
        Channel(le[digits[1 + u:]]),
        n,
    )


# --- regions ------------------------------------------------------------------

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull vertices (monotone chain); collinear points are dropped."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptySet("cannot take the hull of an empty set")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) <= 2:
        return np.array(uniq, dtype=float)
    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def hull_contains(hull, point, tol: float = 1e-12) -> bool:
    """Whether ``point`` lies in the filled hull (given as CCW vertices)."""
    return point_to_convex_distance(point, hull) <= tol


@dataclass(frozen=True, eq=False)
class RegionApproximation:
    """Grid-based inner approximation of a union of rate rectangles.

    ``points`` holds one rectangle corner per enumerated chain (``aux_ids``
    aligned with it, ``point_n`` the block length). ``hull`` is the convex
    hull of the corners together with the origin and the axis projections of
    the extreme corners, i.e. of the union of the rectangles.
    """

    points: np.ndarray
    aux_ids: tuple
    point_n: np.ndarray
    hull: np.ndarray
    n_values: tuple[int, ...]
    grid_spec: dict
    label: str = INNER_LABEL

    def contains(self, point, tol: float = 1e-12) -> bool:
        return hull_contains(self.hull, point, tol)

    def hull_dict(self) -> dict:
        return {
            "label": self.label,
            "n_values": list(self.n_values),
            "grid": self.grid_spec,
            "vertices": self.hull.tolist(),
        }


def staircase_hull(corners: np.ndarray) -> np.ndarray:
    corners = np.asarray(corners, dtype=float).reshape(-1, 2)
    extra = np.array([[0.0, 0.0], [corners[:, 0].max(), 0.0], [0.0, corners[:, 1].max()]])
    return convex_hull(np.vstack([corners, extra]))


def region_Mn(c: CompoundBCC, n: int, grid: GridSpec | None = None,
              max_entries: int = MAX_ENTRIES, _products: _ProductCache | None = None) -> RegionApproximation:
    """Union of rate rectangles over the grid chains ``U - V - X^n`` at block length ``n``."""
    grid = grid or GridSpec()
    if n < 1:
        raise DomainError("n must be >= 1")
    products = (_products or _ProductCache(c, max_entries))(n)
    ids, corners = [], []
    for batch_ids, p_u, p_vu, enc in iter_aux_grid(grid, c.x_size, n):
        ids.extend(batch_ids)
        corners.append(rectangles_batch(products, p_u, p_vu, enc, n))
    if not ids:
        raise EmptySet("auxiliary grid is empty")
    pts = np.vstack(corners)
    spec = grid.describe(c.x_size, n)
    spec["enumerated"] = len(ids)
    return RegionApproximation(
        points=pts,
        aux_ids=tuple(ids),
        point_n=np.full(len(pts), n),
        hull=staircase_hull(pts),
        n_values=(n,),
        grid_spec=spec,
    )


def capacity_region_approx(c: CompoundBCC, n_max: int, grid: GridSpec | None = None,
                           max_entries: int = MAX_ENTRIES) -> RegionApproximation:
    """Convex hull of the grid regions for every ``n <= n_max`` (an inner bound)."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    grid = grid or GridSpec()
    cache = _ProductCache(c, max_entries)
    parts = [region_Mn(c, n, grid, max_entries, cache) for n in range(1, n_max + 1)]
    pts = np.vstack([p.points for p in parts])
    return RegionApproximation(
        points=pts,
        aux_ids=tuple(i for p in parts for i in p.aux_ids),
        point_n=np.concatenate([p.point_n for p in parts]),
        hull=staircase_hull(pts),
        n_values=tuple(range(1, n_max + 1)),
        grid_spec={"per_n": [p.grid_spec for p in parts]},
    )
