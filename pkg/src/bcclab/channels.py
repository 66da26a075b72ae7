"""Discrete memoryless channels, broadcast pairs and compound families.

A channel is stored as a row-stochastic ``numpy`` matrix ``W[x, y] = W(y|x)``.
Multi-letter objects index symbol tuples lexicographically with the last
coordinate varying fastest, which is exactly the ordering produced by
``np.kron``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptySet,
    NegativeEntry,
    RowSumViolation,
    SizeExceeded,
)

ROW_TOL = 1e-9
NEG_TOL = 1e-12
MAX_ENTRIES = 2**24


def check_prob_vector(p, tol: float = ROW_TOL) -> np.ndarray:
    """Validate ``p`` as a probability vector and return a renormalized copy."""
    arr = np.array(p, dtype=float).reshape(-1)
    if arr.size == 0:
        raise EmptySet("probability vector is empty")
    if np.any(arr < -NEG_TOL):
        raise NegativeEntry(f"negative entry {arr.min():.3g}")
    total = arr.sum()
    if abs(total - 1.0) > tol:
        raise RowSumViolation(f"entries sum to {total!r}")
    arr = np.clip(arr, 0.0, None)
    return arr / arr.sum()


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix; row ``x`` is the output law given input ``x``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise DimensionMismatch("channel matrix must be 2-D")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def input_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def rows(self) -> list[np.ndarray]:
        return list(self.matrix)

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.shape, self.matrix.tobytes()))

    def __repr__(self):
        return f"Channel({self.matrix.tolist()!r})"

    def to_dict(self) -> dict:
        return {"inputs": self.input_size, "outputs": self.output_size, "rows": self.matrix.tolist()}


def validate_channel(rows, tol: float = ROW_TOL) -> Channel:
    """Build a :class:`Channel` from a rectangular matrix of reals.

    Rows within ``tol`` of summing to one are renormalized; entries in
    ``[-1e-12, 0)`` are clipped to zero.
    """
    try:
        m = np.array(rows, dtype=float)
    except ValueError as exc:
        raise DimensionMismatch("channel rows are not rectangular") from exc
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if np.any(m < -NEG_TOL):
        x, y = np.unravel_index(np.argmin(m), m.shape)
        raise NegativeEntry(f"entry ({x},{y}) = {m[x, y]!r}")
    sums = m.sum(axis=1)
    bad = np.abs(sums - 1.0) > tol
    if np.any(bad):
        x = int(np.argmax(bad))
        raise RowSumViolation(f"row {x} sums to {sums[x]!r}")
    m = np.clip(m, 0.0, None)
    return Channel(m / m.sum(axis=1, keepdims=True))


def identity_channel(k: int) -> Channel:
    return Channel(np.eye(k))


def uniform_channel(k: int, m: int) -> Channel:
    return Channel(np.full((k, m), 1.0 / m))


def bsc(p: float) -> Channel:
    """Binary symmetric channel with crossover probability ``p``."""
    return Channel([[1 - p, p], [p, 1 - p]])


def tensor_channels(channels: Sequence[Channel], max_entries: int = MAX_ENTRIES) -> Channel:
    """Memoryless product of possibly different per-letter channels.

    Coordinate ``i`` of the input/output tuple goes through ``channels[i]``.
    """
    if not channels:
        raise DomainError("need at least one channel")
    rows = int(np.prod([c.input_size for c in channels]))
    cols = int(np.prod([c.output_size for c in channels]))
    if rows * cols > max_entries:
        raise SizeExceeded(f"{rows}x{cols} product matrix exceeds budget of {max_entries} entries")
    return Channel(reduce(np.kron, (c.matrix for c in channels)))


def product_channel(w: Channel, n: int, max_entries: int = MAX_ENTRIES) -> Channel:
    """n-fold memoryless extension ``W^n(y^n|x^n) = prod_i W(y_i|x_i)``."""
    if n < 1:
        raise DomainError(f"block length must be >= 1, got {n}")
    return tensor_channels([w] * n, max_entries=max_entries)


def marginals(joint) -> tuple[Channel, Channel]:
    """Split a broadcast kernel ``Q[x, y, z] = Q(y,z|x)`` into its two marginal channels."""
    q = np.asarray(joint, dtype=float)
    if q.ndim != 3:
        raise DimensionMismatch("joint kernel must have shape (|X|, |Y|, |Z|)")
    flat = validate_channel(q.reshape(q.shape[0], -1)).matrix.reshape(q.shape)
    return Channel(flat.sum(axis=2)), Channel(flat.sum(axis=1))


def independent_joint(w: Channel, v: Channel) -> np.ndarray:
    """Kernel ``Q(y,z|x) = W(y|x) V(z|x)`` with conditionally independent outputs."""
    return w.matrix[:, :, None] * v.matrix[:, None, :]


@dataclass(frozen=True, eq=False)
class BroadcastPair:
    """Channel pair ``(W, V)`` with a common input; ``joint`` is optional."""

    w: Channel
    v: Channel
    joint: np.ndarray | None = None

    def __post_init__(self):
        if self.w.input_size != self.v.input_size:
            raise DimensionMismatch(
                f"W has {self.w.input_size} inputs but V has {self.v.input_size}"
            )
        if self.joint is not None:
            w, v = marginals(self.joint)
            if w.shape != self.w.shape or v.shape != self.v.shape:
                raise DimensionMismatch("joint kernel shape does not match (W, V)")
            if np.max(np.abs(w.matrix - self.w.matrix)) > ROW_TOL or np.max(
                np.abs(v.matrix - self.v.matrix)
            ) > ROW_TOL:
                raise RowSumViolation("joint kernel marginals differ from (W, V)")
            j = np.array(self.joint, dtype=float)
            j.setflags(write=False)
            object.__setattr__(self, "joint", j)

    def __eq__(self, other):
        if not isinstance(other, BroadcastPair):
            return NotImplemented
        return self.w == other.w and self.v == other.v


@dataclass(frozen=True, eq=False)
class CompoundBCC:
    """Finite family of broadcast pairs over shared alphabets."""

    states: tuple[BroadcastPair, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise EmptySet("a compound channel needs at least one state")
        shape = (states[0].w.shape, states[0].v.shape)
        for i, s in enumerate(states):
            if (s.w.shape, s.v.shape) != shape:
                raise DimensionMismatch(f"state {i} alphabets differ from state 0")
        labels = tuple(self.labels) if self.labels else tuple(f"s{i}" for i in range(len(states)))
        if len(labels) != len(states):
            raise DimensionMismatch("one label per state required")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrices(cls, pairs, labels=()) -> "CompoundBCC":
        """Build from an iterable of ``(W_rows, V_rows)``."""
        return cls(
            tuple(BroadcastPair(validate_channel(w), validate_channel(v)) for w, v in pairs),
            tuple(labels),
        )

    def __len__(self):
        return len(self.states)

    @property
    def x_size(self) -> int:
        return self.states[0].w.input_size

    @property
    def y_size(self) -> int:
        return self.states[0].w.output_size

    @property
    def z_size(self) -> int:
        return self.states[0].v.output_size

    @property
    def w_family(self) -> list[Channel]:
        return [s.w for s in self.states]

    @property
    def v_family(self) -> list[Channel]:
        return [s.v for s in self.states]

    def extend(self, pair: BroadcastPair, label: str | None = None) -> "CompoundBCC":
        return CompoundBCC(self.states + (pair,), self.labels + (label or f"s{len(self)}",))


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def perturb_distribution(p, epsilon: float, rng: np.random.Generator, scale: float | None = None) -> np.ndarray:
    """Random distribution within l1 distance ``epsilon`` of ``p``.

    Symmetric Gaussian noise is added and projected onto the simplex; if the
    result leaves the l1 ball it is pulled back along the segment towards
    ``p``. The segment stays inside the simplex, so both constraints hold.
    """
    p = np.asarray(p, dtype=float)
    if scale is None:
        scale = epsilon
    q = project_simplex(p + rng.normal(0.0, scale, size=p.shape))
    dist = np.abs(q - p).sum()
    # shrink a hair below the radius so float rounding cannot push us past it
    limit = epsilon * (1.0 - 1e-9)
    if dist > limit:
        q = p + (q - p) * (limit / dist)
        q = np.clip(q, 0.0, None)
        q /= q.sum()
        if np.abs(q - p).sum() > epsilon:
            return p.copy()
    return q


def perturb_channel(w: Channel, epsilon: float, rng: np.random.Generator, scale: float | None = None) -> Channel:
    return Channel(np.array([perturb_distribution(r, epsilon, rng, scale) for r in w.matrix]))


def perturb_compound(base: CompoundBCC, epsilon: float, seed: int) -> CompoundBCC:
    """Same-shape family with every channel row moved by at most ``epsilon`` in l1."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    rng = np.random.default_rng(seed)
    states = tuple(
        BroadcastPair(perturb_channel(s.w, epsilon, rng), perturb_channel(s.v, epsilon, rng))
        for s in base.states
    )
    return CompoundBCC(states, base.labels)


def random_channel(rng: np.random.Generator, k: int, m: int, alpha: float = 1.0) -> Channel:
    m_ = rng.dirichlet(np.full(m, alpha), size=k)
    return Channel(m_)


def random_compound(
    rng: np.random.Generator, n_states: int, x_size: int, y_size: int, z_size: int, alpha: float = 1.0
) -> CompoundBCC:
    return CompoundBCC(
        tuple(
            BroadcastPair(random_channel(rng, x_size, y_size, alpha), random_channel(rng, x_size, z_size, alpha))
            for _ in range(n_states)
        )
    )
