"""Continuity bounds and randomized checks that the bounds hold.

All bounds use the l1 (sum) total variation convention and logs base 2:

    delta1(e, |Y|)      = 2 e log|Y| + 2 H2(e)
    delta2(e, |Y|)      = 4 e log|Y| + 4 H2(e)
    delta'(e, |Y|, |Z|) = 4 H2(e) + 4 e max(log|Y|, log|Z|)
    delta''(e, |Y|, |Z|) = 4 e log(|Y||Z|) + 8 H2(e)
    delta = delta' + delta''

Every ``verify_*`` routine returns a :class:`ContinuityReport`. Randomized
suites draw trial ``i`` from ``SeedSequence([seed, i])`` and evaluate trials
in order-preserving thread pools, so a fixed seed gives the same report for
any thread count.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channels import (
    Channel,
    CompoundBCC,
    perturb_channel,
    perturb_compound,
    perturb_distribution,
    product_channel,
    random_channel,
    random_compound,
    tensor_channels,
)
from .errors import DimensionMismatch, DomainError, PreconditionViolated
from .info import (
    AuxiliaryInput,
    JointDistribution,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    induced_joint,
    random_aux,
    total_variation,
)
from .metrics import (
    channel_distance,
    compound_distance,
    convex_region_distance,
    rectangle_corner_gap,
    rectangle_region_distance,
)
from .regions import GridSpec, _ProductCache, capacity_region_approx, rate_rectangle

VIOLATION_TOL = 1e-9
THREADS_ENV = "BCC_LAB_THREADS"


def delta1(eps: float, y_size: int) -> float:
    return 2 * eps * math.log2(y_size) + 2 * binary_entropy(eps)


def delta2(eps: float, y_size: int) -> float:
    return 4 * eps * math.log2(y_size) + 4 * binary_entropy(eps)


@dataclass(frozen=True)
class DeltaBundle:
    eps: float
    delta1: float
    delta2_y: float
    delta2_z: float
    delta_prime: float
    delta_dprime: float
    delta_total: float


def delta_bundle(eps: float, y_size: int, z_size: int) -> DeltaBundle:
    """Evaluate every bound at ``eps``; ``eps = 0`` gives the all-zero limit."""
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    if y_size < 1 or z_size < 1:
        raise DomainError("alphabet sizes must be >= 1")
    h = binary_entropy(eps)
    ly, lz = math.log2(y_size), math.log2(z_size)
    dp = 4 * h + 4 * eps * max(ly, lz)
    ddp = 4 * eps * math.log2(y_size * z_size) + 8 * h
    return DeltaBundle(eps, delta1(eps, y_size), delta2(eps, y_size), delta2(eps, z_size), dp, ddp, dp + ddp)


@dataclass
class ContinuityReport:
    """Outcome of checking ``gap <= bound`` on a set of instances.

    ``bound`` is the bound attached to the witness, the instance with the
    largest ``gap / bound`` ratio (``tightness``).
    """

    check: str
    instances: int = 0
    violations: int = 0
    max_gap: float = 0.0
    bound: float = 0.0
    tightness: float = 0.0
    witness: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, gap: float, bound: float, witness: dict | None = None, count: bool = True) -> bool:
        """Add one instance; returns whether it violates the bound."""
        violated = gap > bound + VIOLATION_TOL
        if count:
            self.instances += 1
        self.violations += int(violated)
        self.max_gap = max(self.max_gap, gap)
        ratio = gap / bound if bound > 0 else (0.0 if gap <= VIOLATION_TOL else math.inf)
        if ratio > self.tightness or not self.witness:
            self.tightness = max(self.tightness, ratio)
            self.bound = bound
            self.witness = dict(witness or {}, gap=gap, bound=bound)
        return violated

    def merge(self, other: "ContinuityReport") -> "ContinuityReport":
        self.instances += other.instances
        self.violations += other.violations
        self.max_gap = max(self.max_gap, other.max_gap)
        if other.tightness > self.tightness or (not self.witness and other.witness):
            self.tightness, self.bound, self.witness = other.tightness, other.bound, other.witness
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def run_trials(fn: Callable[[int], ContinuityReport], trials: int, threads: int | None = None) -> list:
    """Evaluate ``fn(0..trials-1)`` and return results in trial order."""
    threads = threads or default_threads()
    if threads == 1 or trials <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _merge_all(check: str, parts: Sequence[ContinuityReport], params: dict) -> ContinuityReport:
    out = ContinuityReport(check, params=params)
    for p in parts:
        out.merge(p)
    return out


# --- entropy continuity -------------------------------------------------------

def verify_entropy_continuity(trials: int, eps: float, y_size: int, x_size: int = 3, seed: int = 0,
                              threads: int | None = None) -> ContinuityReport:
    """Check ``|H(Y|X) - H(Y~|X~)| <= delta1(eps, |Y|)`` on random joint pairs.

    The perturbed joint is drawn inside the l1 ball of radius ``eps`` around
    the base joint; half of the trials use a large noise scale so the pair
    sits on the boundary of the ball.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    bound = delta1(eps, y_size)

    def one(i: int) -> ContinuityReport:
        rng = trial_rng(seed, i)
        alpha = (0.1, 1.0)[i % 2]
        p = rng.dirichlet(np.full(x_size * y_size, alpha))
        q = perturb_distribution(p, eps, rng, scale=eps if i % 4 < 2 else 1.0)
        tv = total_variation(p, q)
        gap = abs(conditional_entropy(p.reshape(x_size, y_size)) - conditional_entropy(q.reshape(x_size, y_size)))
        rep = ContinuityReport("lemma2")
        if tv > eps:
            raise PreconditionViolated(f"sampled pair at distance {tv} > {eps}")
        rep.record(gap, bound, {"trial": i, "tv": tv})
        return rep

    params = {"eps": eps, "y_size": y_size, "x_size": x_size, "trials": trials, "seed": seed}
    return _merge_all("lemma2", run_trials(one, trials, threads), params)


# --- conditional mutual information continuity ---------------------------------

def hybrid_distribution(aux: AuxiliaryInput, w: Channel, w_tilde: Channel, k: int,
                        max_entries: int | None = None) -> JointDistribution:
    """Joint of ``(U, V, Y_1..Y_k, Y~_{k+1}..Y~_n)``: first ``k`` letters through ``w``, the rest through ``w_tilde``."""
    n = aux.n
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in [0, {n}], got {k}")
    if w.shape != w_tilde.shape:
        raise DimensionMismatch("w and w_tilde must have the same shape")
    kwargs = {} if max_entries is None else {"max_entries": max_entries}
    return induced_joint(aux, tensor_channels([w] * k + [w_tilde] * (n - k), **kwargs))


def verify_telescoping(aux: AuxiliaryInput, w: Channel, w_tilde: Channel, eps: float) -> ContinuityReport:
    """Check every step of the hybrid chain between ``W^n`` and ``W~^n``.

    Per step ``k``: consecutive hybrids are within ``eps`` in l1 and their
    conditional mutual informations differ by at most ``delta2``. The total
    difference must be at most ``n * delta2`` and must equal the sum of the
    steps (reported as ``details['telescoping_error']``).
    """
    d = channel_distance(w, w_tilde)
    if d > eps:
        raise PreconditionViolated(f"channel distance {d} exceeds eps {eps}")
    n, y = aux.n, w.output_size
    step_bound = delta2(eps, y)
    hybrids = [hybrid_distribution(aux, w, w_tilde, k) for k in range(n + 1)]
    mi = [conditional_mutual_information(h) for h in hybrids]
    rep = ContinuityReport("telescope", params={"eps": eps, "n": n, "channel_distance": d})
    tv_max = 0.0
    steps = []
    for k in range(n):
        tv = total_variation(hybrids[k + 1].flat, hybrids[k].flat)
        tv_max = max(tv_max, tv)
        if tv > eps + VIOLATION_TOL:
            rep.violations += 1
        step = mi[k + 1] - mi[k]
        steps.append(step)
        rep.record(abs(step), step_bound, {"k": k, "tv": tv})
    total = mi[n] - mi[0]
    rep.record(abs(total), n * step_bound, {"k": "total"}, count=False)
    rep.details = {
        "step_differences": steps,
        "total_difference": total,
        "telescoping_error": abs(sum(steps) - total),
        "max_step_tv": tv_max,
    }
    return rep


def _random_size(rng, choices):
    return int(rng.choice(choices))


def verify_mi_continuity(trials: int, eps: float, n: int = 1, sizes: dict | None = None, seed: int = 0,
                         threads: int | None = None, telescope: bool = True) -> ContinuityReport:
    """Check ``|I(V;Y^n|U) - I(V;Y~^n|U)| <= n delta2(eps, |Y|)`` on random instances.

    ``sizes`` may fix any of ``x``, ``y``, ``u``, ``v``; unfixed sizes are
    drawn per trial (``x, y`` from {2, 3}, ``u, v`` from {1, 2, 3}). With
    ``telescope`` the full hybrid chain of every instance is checked too,
    and the worst telescoping reconstruction error lands in ``details``.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    sizes = dict(sizes or {})

    def one(i: int) -> ContinuityReport:
        rng = trial_rng(seed, i)
        x = sizes.get("x") or _random_size(rng, [2, 3])
        y = sizes.get("y") or _random_size(rng, [2, 3])
        u = sizes.get("u") or _random_size(rng, [1, 2, 3])
        v = sizes.get("v") or _random_size(rng, [1, 2, 3])
        alpha = (0.2, 1.0)[i % 2]
        w = random_channel(rng, x, y, alpha)
        # alternate interior and boundary perturbations
        w_t = perturb_channel(w, eps, rng, scale=eps if i % 4 < 2 else 1.0)
        aux = random_aux(rng, x**n, n, u, v, alpha)
        rep = ContinuityReport("lemma3")
        info = {"trial": i, "sizes": [x, y, u, v], "channel_distance": channel_distance(w, w_t)}
        if telescope:
            tele = verify_telescoping(aux, w, w_t, eps)
            bad = rep.record(abs(tele.details["total_difference"]), n * delta2(eps, y), info)
            if tele.violations and not bad:
                rep.violations += 1
            rep.details = {"telescoping_error": tele.details["telescoping_error"],
                           "max_step_tightness": tele.tightness}
        else:
            wn, wtn = product_channel(w, n), product_channel(w_t, n)
            gap = abs(conditional_mutual_information(induced_joint(aux, wn))
                      - conditional_mutual_information(induced_joint(aux, wtn)))
            rep.record(gap, n * delta2(eps, y), info)
        return rep

    parts = run_trials(one, trials, threads)
    params = {"eps": eps, "n": n, "sizes": sizes, "trials": trials, "seed": seed}
    out = _merge_all("lemma3", parts, params)
    if telescope:
        out.details = {
            "max_telescoping_error": max((p.details["telescoping_error"] for p in parts), default=0.0),
            "max_step_tightness": max((p.details["max_step_tightness"] for p in parts), default=0.0),
        }
    return out


# --- rectangle and region continuity --------------------------------------------

def measured_eps(c1: CompoundBCC, c2: CompoundBCC, eps: float | None = None) -> float:
    """Recompute ``D(c1, c2)``; if a nominal ``eps`` is given it must not be exceeded."""
    d = compound_distance(c1, c2)
    if eps is not None and d > eps + VIOLATION_TOL:
        raise PreconditionViolated(f"compound distance {d} exceeds eps {eps}")
    if d >= 1.0:
        raise PreconditionViolated(f"compound distance {d} is outside (0, 1)")
    return d


def verify_rectangle_continuity(c1: CompoundBCC, c2: CompoundBCC, aux_list: Sequence[AuxiliaryInput],
                                eps: float | None = None) -> ContinuityReport:
    """Per chain: corner gap and exact rectangle distance against delta, component gaps against delta', delta''.

    The bound is evaluated at the measured compound distance.
    """
    d = measured_eps(c1, c2, eps)
    b = delta_bundle(d, c1.y_size, c1.z_size)
    rep = ContinuityReport("lemma4", params={"measured_eps": d, "y_size": c1.y_size, "z_size": c1.z_size})
    cache1, cache2 = _ProductCache(c1), _ProductCache(c2)
    worst_region = 0.0
    for j, aux in enumerate(aux_list):
        r1 = rate_rectangle(c1, aux, _products=cache1)
        r2 = rate_rectangle(c2, aux, _products=cache2)
        gap = rectangle_corner_gap(r1, r2)
        region = rectangle_region_distance(r1, r2)
        worst_region = max(worst_region, region)
        g0, g1 = abs(r1.a0 - r2.a0), abs(r1.a1 - r2.a1)
        rep.record(gap, b.delta_total, {"aux": j, "a0_gap": g0, "a1_gap": g1, "region_distance": region,
                                        "corners": [list(r1.corner), list(r2.corner)]})
        rep.violations += int(region > b.delta_total + VIOLATION_TOL)
        rep.violations += int(g0 > b.delta_prime + VIOLATION_TOL)
        rep.violations += int(g1 > b.delta_dprime + VIOLATION_TOL)
    rep.details = {"max_region_distance": worst_region, "delta_prime": b.delta_prime,
                   "delta_dprime": b.delta_dprime}
    return rep


def verify_capacity_continuity(c1: CompoundBCC, c2: CompoundBCC, n_max: int = 1, grid: GridSpec | None = None,
                               eps: float | None = None, slack: float = 1e-6) -> ContinuityReport:
    """Compare grid inner approximations of both capacity regions built from the same chains.

    The exact l1 Hausdorff distance between the two hulls must not exceed
    ``delta(D) + slack``.
    """
    grid = grid or GridSpec()
    d = measured_eps(c1, c2, eps)
    b = delta_bundle(d, c1.y_size, c1.z_size)
    reg1 = capacity_region_approx(c1, n_max, grid)
    reg2 = capacity_region_approx(c2, n_max, grid)
    if reg1.aux_ids != reg2.aux_ids:
        raise PreconditionViolated("regions were not built from the same auxiliary grid")
    dist = convex_region_distance(reg1.hull, reg2.hull)
    corner = float(np.abs(reg1.points - reg2.points).sum(axis=1).max())
    rep = ContinuityReport(
        "theorem2",
        params={"measured_eps": d, "n_max": n_max, "slack": slack, "label": "matched-grid inner approximation",
                "grid": reg1.grid_spec},
    )
    rep.record(dist, b.delta_total + slack, {"hull_vertices": [len(reg1.hull), len(reg2.hull)]})
    rep.details = {"max_matched_corner_gap": corner, "delta_total": b.delta_total}
    return rep


def random_pair(rng: np.random.Generator, eps: float, max_states: int = 3, max_size: int = 3) -> tuple[CompoundBCC, CompoundBCC]:
    s = int(rng.integers(1, max_states + 1))
    x, y, z = (int(v) for v in rng.integers(2, max_size + 1, size=3))
    base = random_compound(rng, s, x, y, z, alpha=float(rng.choice([0.3, 1.0])))
    return base, perturb_compound(base, eps, int(rng.integers(2**31)))


def lemma4_suite(pairs: int = 50, eps: float = 0.05, aux_per_pair: int = 50, n: int = 1, seed: int = 0,
                 threads: int | None = None, max_states: int = 3, max_size: int = 3) -> ContinuityReport:
    """Random perturbed compound pairs, each checked against random chains."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")

    def one(i: int) -> ContinuityReport:
        rng = trial_rng(seed, i)
        c1, c2 = random_pair(rng, eps, max_states, max_size)
        auxes = []
        for j in range(aux_per_pair):
            u, v = (int(t) for t in rng.integers(1, 4, size=2))
            auxes.append(random_aux(rng, c1.x_size**n, n, u, v, alpha=(0.2, 1.0)[j % 2]))
        rep = verify_rectangle_continuity(c1, c2, auxes, eps)
        rep.witness = dict(rep.witness, pair=i, shape=[len(c1), c1.x_size, c1.y_size, c1.z_size])
        return rep

    params = {"pairs": pairs, "eps": eps, "aux_per_pair": aux_per_pair, "n": n, "seed": seed}
    parts = run_trials(one, pairs, threads)
    out = _merge_all("lemma4", parts, params)
    out.details = {"max_region_distance": max((p.details["max_region_distance"] for p in parts), default=0.0)}
    return out


def theorem2_suite(pairs: int = 10, eps: float = 0.05, n_max: int = 1, grid: GridSpec | None = None, seed: int = 0,
                   threads: int | None = None, max_states: int = 3, max_size: int = 3) -> ContinuityReport:
    grid = grid or GridSpec()

    def one(i: int) -> ContinuityReport:
        rng = trial_rng(seed, i)
        c1, c2 = random_pair(rng, eps, max_states, max_size)
        rep = verify_capacity_continuity(c1, c2, n_max, grid, eps)
        rep.witness = dict(rep.witness, pair=i, shape=[len(c1), c1.x_size, c1.y_size, c1.z_size])
        return rep

    params = {"pairs": pairs, "eps": eps, "n_max": n_max, "resolution": grid.resolution,
              "max_aux": grid.max_aux, "seed": seed, "label": "matched-grid inner approximation"}
    return _merge_all("theorem2", run_trials(one, pairs, threads), params)


def telescope_suite(trials: int = 100, eps: float = 0.1, n: int = 2, seed: int = 0,
                    threads: int | None = None) -> ContinuityReport:
    """Random instances run through :func:`verify_telescoping`."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")

    def one(i: int) -> ContinuityReport:
        rng = trial_rng(seed, i)
        x, y, u, v = (int(t) for t in rng.integers([2, 2, 1, 1], [4, 4, 4, 4]))
        w = random_channel(rng, x, y)
        w_t = perturb_channel(w, eps, rng, scale=1.0)
        rep = verify_telescoping(random_aux(rng, x**n, n, u, v), w, w_t, eps)
        rep.witness = dict(rep.witness, trial=i)
        return rep

    parts = run_trials(one, trials, threads)
    out = _merge_all("telescope", parts, {"trials": trials, "eps": eps, "n": n, "seed": seed})
    out.details = {"max_telescoping_error": max((p.details["telescoping_error"] for p in parts), default=0.0)}
    return out
