"""Arbitrarily varying channel example with a discontinuity at ``lam = 0``.

A state family ``{W_s}`` is symmetrizable when some stochastic map
``sigma: X -> P(S)`` satisfies, for all inputs ``x, x'`` and outputs ``y``,

    sum_s W_s(y|x) sigma(s|x') == sum_s W_s(y|x') sigma(s|x).

The check solves ``min t`` subject to ``|lhs - rhs| <= t`` on every
constraint, so an infeasible family comes with a positive margin ``t*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import Channel, CompoundBCC, BroadcastPair, validate_channel
from .errors import DomainError, EmptySet, ShapeMismatch
from .info import AuxiliaryInput
from .regions import RateRectangle, rate_rectangle
from .simplex import linprog

SYM_TOL = 1e-9


@dataclass(frozen=True)
class AVCFamily:
    states: tuple[Channel, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise EmptySet("AVC needs at least one state")
        if any(s.shape != states[0].shape for s in states):
            raise ShapeMismatch("AVC states must share input and output alphabets")
        object.__setattr__(self, "states", states)

    @property
    def x_size(self) -> int:
        return self.states[0].input_size

    @property
    def y_size(self) -> int:
        return self.states[0].output_size

    def tensor(self) -> np.ndarray:
        """``T[s, x, y] = W_s(y|x)``."""
        return np.stack([s.matrix for s in self.states])


@dataclass(frozen=True)
class SymmetrizerResult:
    symmetrizable: bool
    sigma: Channel | None
    residual: float


def example_family(lam: float) -> tuple[AVCFamily, Channel]:
    """Receiver-1 state family ``{W1(lam), W2(lam)}`` and receiver-2 channel ``V``.

    The second row of ``W1`` is ``(0, lam, 1 - lam)`` so that it is a
    probability vector.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    w1 = validate_channel([[1.0, 0.0, 0.0], [0.0, lam, 1.0 - lam]])
    w2 = validate_channel([[lam, 0.0, 1.0 - lam], [0.0, 1.0, 0.0]])
    v = validate_channel([[0.5, 0.5], [0.5, 0.5]])
    return AVCFamily((w1, w2)), v


def symmetrizer_residual(fam: AVCFamily, sigma) -> float:
    """Largest violation of the symmetry equations by ``sigma[x, s]``.

    Also counts how far ``sigma`` is from being row-stochastic.
    """
    T = fam.tensor()
    sig = np.asarray(sigma.matrix if isinstance(sigma, Channel) else sigma, dtype=float)
    # mixed[x, x', y] = sum_s W_s(y|x) sigma(s|x')
    mixed = np.einsum("sxy,zs->xzy", T, sig)
    gap = np.abs(mixed - mixed.transpose(1, 0, 2)).max()
    stoch = max(np.abs(sig.sum(axis=1) - 1.0).max(), max(0.0, -sig.min()))
    return float(max(gap, stoch))


def _symmetrizer_lp(fam: AVCFamily):
    T = fam.tensor()
    S, X, Y = T.shape
    nv = S * X + 1  # sigma(s|x) at index x*S + s, then the slack t
    rows = []
    for x in range(X):
        for xp in range(x + 1, X):
            for y in range(Y):
                g = np.zeros(nv)
                for s in range(S):
                    g[xp * S + s] += T[s, x, y]
                    g[x * S + s] -= T[s, xp, y]
                rows.append(g)
    A_ub = []
    for g in rows:
        up, down = g.copy(), -g
        up[-1] = down[-1] = -1.0
        A_ub.extend([up, down])
    A_eq = np.zeros((X, nv))
    for x in range(X):
        A_eq[x, x * S:(x + 1) * S] = 1.0
    c = np.zeros(nv)
    c[-1] = 1.0
    A_ub = np.array(A_ub) if A_ub else None
    b_ub = np.zeros(len(A_ub)) if A_ub is not None else None
    return c, A_ub, b_ub, A_eq, np.ones(X), S, X


def symmetrizability_check(fam: AVCFamily, tol: float = SYM_TOL) -> SymmetrizerResult:
    """Decide symmetrizability; ``residual`` is re-measured on the returned ``sigma``."""
    c, A_ub, b_ub, A_eq, b_eq, S, X = _symmetrizer_lp(fam)
    res = linprog(c, A_ub, b_ub, A_eq, b_eq)
    if res.status != "optimal":  # cannot happen: any stochastic sigma is feasible with large t
        raise RuntimeError(f"symmetrizer LP ended with status {res.status}")
    sig = np.clip(res.x[:-1].reshape(X, S), 0.0, None)
    sig /= sig.sum(axis=1, keepdims=True)
    sigma = Channel(sig)
    residual = symmetrizer_residual(fam, sigma)
    return SymmetrizerResult(residual <= tol, sigma, residual)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    symmetrizable: bool
    residual: float
    rectangle: RateRectangle


def fixed_aux(x_size: int) -> AuxiliaryInput:
    """Constant ``U``, uniform ``V = X``: the chain used for the sweep's context column."""
    return AuxiliaryInput(np.ones(1), Channel(np.full((1, x_size), 1.0 / x_size)), Channel(np.eye(x_size)), 1)


def lambda_sweep(grid: Iterable[float]) -> list[SweepRow]:
    lams = [float(x) for x in grid]
    if not lams:
        raise EmptySet("lambda grid is empty")
    out = []
    for lam in lams:
        fam, v = example_family(lam)
        check = symmetrizability_check(fam)
        single = CompoundBCC((BroadcastPair(fam.states[0], v),))
        rect = rate_rectangle(single, fixed_aux(fam.x_size))
        out.append(SweepRow(lam, check.symmetrizable, check.residual, rect))
    return out


def permuted(fam: AVCFamily, order: Sequence[int]) -> AVCFamily:
    return AVCFamily(tuple(fam.states[i] for i in order))
