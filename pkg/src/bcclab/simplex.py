"""Dense two-phase tableau simplex for small linear programs.

Solves ``min c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``,
``x >= 0``. Bland's rule is used throughout, so the method terminates on
degenerate problems; it is meant for a few dozen variables, not for scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T: np.ndarray, basis: list[int], allowed: int, tol: float, max_iter: int) -> tuple[str, int]:
    """Minimize the objective held in the last row of ``T`` (reduced costs)."""
    m = T.shape[0] - 1
    for it in range(max_iter):
        costs = T[-1, :allowed]
        entering = next((j for j in range(allowed) if costs[j] < -tol), None)
        if entering is None:
            return "optimal", it
        col = T[:m, entering]
        rows = [i for i in range(m) if col[i] > PIVOT_TOL]
        if not rows:
            return "unbounded", it
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        # Bland: among tied rows pick the one whose basic variable has lowest index
        leaving = min((i for i, r in zip(rows, ratios) if r <= best + tol), key=lambda i: basis[i])
        _pivot(T, leaving, entering)
        basis[leaving] = entering
    raise RuntimeError("simplex did not converge")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol: float = 1e-10, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    n_ub, n_eq = len(b_ub), len(b_eq)
    m = n_ub + n_eq

    # standard form: [A_ub I; A_eq 0] [x; s] = b, then artificials on every row
    A = np.zeros((m, nv + n_ub))
    A[:n_ub, :nv] = A_ub
    A[:n_ub, nv:] = np.eye(n_ub)
    A[n_ub:, :nv] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.abs(b)

    n_std = nv + n_ub
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A
    T[:m, n_std:n_std + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n_std, n_std + m))
    # phase 1 objective: sum of artificials, expressed in reduced-cost form
    T[-1, :n_std] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()

    status, it1 = _run(T, basis, n_std + m, tol, max_iter)
    if -T[-1, -1] > 1e-9:
        return LPResult("infeasible", None, None, it1)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n_std:
            col = next((j for j in range(n_std) if abs(T[r, j]) > 1e-9), None)
            if col is not None:
                _pivot(T, r, col)
                basis[r] = col

    keep = [r for r in range(m) if basis[r] < n_std]
    T2 = np.zeros((len(keep) + 1, n_std + 1))
    T2[:-1, :n_std] = T[keep, :n_std]
    T2[:-1, -1] = T[keep, -1]
    basis2 = [basis[r] for r in keep]
    cost = np.concatenate([c, np.zeros(n_ub)])
    T2[-1, :n_std] = cost
    for r, j in enumerate(basis2):
        T2[-1] -= cost[j] * T2[r]

    status, it2 = _run(T2, basis2, n_std, tol, max_iter)
    if status != "optimal":
        return LPResult(status, None, None, it1 + it2)
    x = np.zeros(n_std)
    for r, j in enumerate(basis2):
        x[j] = T2[r, -1]
    x = x[:nv]
    return LPResult("optimal", x, float(c @ x), it1 + it2)
