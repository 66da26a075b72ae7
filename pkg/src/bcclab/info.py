"""Shannon quantities in bits, plus the joint law induced by an auxiliary chain.

Conventions: ``0 log 0 = 0``; total variation is the full l1 sum (range
``[0, 2]``), not the halved version.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Channel, check_prob_vector, validate_channel
from .errors import AxisCountMismatch, DimensionMismatch, DomainError, LengthMismatch


def plogp_sum(p, axis=None) -> np.ndarray | float:
    """``-sum p log2 p`` along ``axis`` with ``0 log 0 = 0``; works on batches."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=axis)


def entropy(p) -> float:
    """Entropy of a probability vector in bits."""
    return float(plogp_sum(check_prob_vector(p)))


def binary_entropy(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"binary entropy needs eps in [0, 1], got {eps}")
    return float(plogp_sum(np.array([eps, 1.0 - eps])))


def total_variation(p, q) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise LengthMismatch(f"lengths {p.size} and {q.size} differ")
    return float(np.abs(p - q).sum())


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability mass over named axes; ``mass`` has one dimension per axis."""

    axes: tuple[tuple[str, int], ...]
    mass: np.ndarray

    def __post_init__(self):
        axes = tuple((str(n), int(s)) for n, s in self.axes)
        shape = tuple(s for _, s in axes)
        m = np.array(self.mass, dtype=float).reshape(shape)
        if np.any(m < -1e-12) or abs(m.sum() - 1.0) > 1e-9:
            raise DomainError("joint mass must be non-negative and sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "mass", m)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axes)

    @property
    def flat(self) -> np.ndarray:
        return self.mass.reshape(-1)

    def marginal(self, *names: str) -> np.ndarray:
        keep = [self.names.index(n) for n in names]
        drop = tuple(i for i in range(len(self.axes)) if i not in keep)
        m = self.mass.sum(axis=drop)
        # sum() keeps the original relative order; reorder to the requested one
        order = np.argsort(np.argsort(keep))
        return np.transpose(m, order) if m.ndim > 1 else m

    def entropy(self, *names: str) -> float:
        return float(plogp_sum(self.marginal(*names))) if names else 0.0


def conditional_mutual_information(joint: JointDistribution) -> float:
    """``I(B;C|A)`` for a three-axis joint ordered ``(A, B, C)``."""
    if len(joint.axes) != 3:
        raise AxisCountMismatch(f"expected 3 axes, got {len(joint.axes)}")
    a, b, c = joint.names
    value = joint.entropy(a, c) + joint.entropy(a, b) - joint.entropy(a, b, c) - joint.entropy(a)
    return max(value, 0.0) if value > -1e-12 else value


def mutual_information(joint: JointDistribution) -> float:
    """``I(A;B)`` for a two-axis joint, via a trivial conditioning axis."""
    if len(joint.axes) != 2:
        raise AxisCountMismatch(f"expected 2 axes, got {len(joint.axes)}")
    axes = (("_", 1),) + joint.axes
    return conditional_mutual_information(JointDistribution(axes, joint.mass[None]))


def conditional_entropy(p_xy) -> float:
    """``H(Y|X)`` for a joint matrix ``p_xy[x, y]``."""
    p = np.asarray(p_xy, dtype=float)
    return float(plogp_sum(p) - plogp_sum(p.sum(axis=1)))


@dataclass(frozen=True, eq=False)
class AuxiliaryInput:
    """Chain ``U - V - X^n``: prior on U, channel U->V, stochastic encoder V->X^n."""

    p_u: np.ndarray
    p_v_given_u: Channel
    encoder: Channel
    n: int = 1

    def __post_init__(self):
        p_u = check_prob_vector(self.p_u)
        p_u.setflags(write=False)
        object.__setattr__(self, "p_u", p_u)
        if not isinstance(self.p_v_given_u, Channel):
            object.__setattr__(self, "p_v_given_u", validate_channel(self.p_v_given_u))
        if not isinstance(self.encoder, Channel):
            object.__setattr__(self, "encoder", validate_channel(self.encoder))
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if p_u.size != self.p_v_given_u.input_size:
            raise DimensionMismatch("len(p_u) != |U| of P_{V|U}")
        if self.p_v_given_u.output_size != self.encoder.input_size:
            raise DimensionMismatch("|V| of P_{V|U} != encoder input size")

    @property
    def u_size(self) -> int:
        return self.p_u.size

    @property
    def v_size(self) -> int:
        return self.encoder.input_size

    @property
    def xn_size(self) -> int:
        return self.encoder.output_size

    def p_uv(self) -> np.ndarray:
        return self.p_u[:, None] * self.p_v_given_u.matrix

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p_u": self.p_u.tolist(),
            "p_v_given_u": self.p_v_given_u.matrix.tolist(),
            "encoder": self.encoder.matrix.tolist(),
        }


def induced_joint(aux: AuxiliaryInput, w: Channel) -> JointDistribution:
    """Joint law of ``(U, V, Y^n)`` when ``X^n`` is sent through ``w`` (a channel on ``X^n``)."""
    if w.input_size != aux.xn_size:
        raise DimensionMismatch(f"channel has {w.input_size} inputs, encoder emits {aux.xn_size}")
    v_to_y = aux.encoder.matrix @ w.matrix
    mass = aux.p_uv()[:, :, None] * v_to_y[None, :, :]
    return JointDistribution((("U", aux.u_size), ("V", aux.v_size), ("Y", w.output_size)), mass)


def joint_uy(joint: JointDistribution) -> JointDistribution:
    """Two-axis ``(U, Y)`` marginal of a ``(U, V, Y)`` joint."""
    u, _, y = joint.axes
    return JointDistribution((u, y), joint.mass.sum(axis=1))


def random_aux(
    rng: np.random.Generator, xn_size: int, n: int = 1, u_size: int = 2, v_size: int = 2, alpha: float = 1.0
) -> AuxiliaryInput:
    """Dirichlet-sampled auxiliary chain; small ``alpha`` gives near-deterministic maps."""
    return AuxiliaryInput(
        rng.dirichlet(np.full(u_size, alpha)),
        Channel(rng.dirichlet(np.full(v_size, alpha), size=u_size)),
        Channel(rng.dirichlet(np.full(xn_size, alpha), size=v_size)),
        n,
    )
