import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from bcclab.avc import (
    AVCFamily,
    example_family,
    lambda_sweep,
    permuted,
    symmetrizability_check,
    symmetrizer_residual,
)
from bcclab.channels import Channel, random_channel
from bcclab.errors import DomainError, EmptySet, ShapeMismatch
from bcclab.simplex import linprog

LAMBDAS = [0.01, 0.05, 0.1, 0.25, 0.5, 1.0]


def test_example_family_rows():
    fam, v = example_family(0.3)
    w1, w2 = fam.states
    assert np.allclose(w1.matrix, [[1, 0, 0], [0, 0.3, 0.7]])
    assert np.allclose(w2.matrix, [[0.3, 0, 0.7], [0, 1, 0]])
    assert np.allclose(v.matrix, 0.5)
    with pytest.raises(DomainError):
        example_family(1.5)


def test_family_validation():
    with pytest.raises(EmptySet):
        AVCFamily(())
    with pytest.raises(ShapeMismatch):
        AVCFamily((Channel(np.eye(2)), Channel(np.eye(3))))


def test_lambda_zero_symmetrizable():
    fam, _ = example_family(0.0)
    res = symmetrizability_check(fam)
    assert res.symmetrizable and res.residual <= 1e-12
    assert symmetrizer_residual(fam, res.sigma) <= 1e-12
    # hand check: sigma = identity swaps the roles of the two inputs
    assert symmetrizer_residual(fam, np.eye(2)) == 0.0


@pytest.mark.parametrize("lam", LAMBDAS)
def test_positive_lambda_not_symmetrizable(lam):
    fam, _ = example_family(lam)
    res = symmetrizability_check(fam)
    assert not res.symmetrizable
    assert res.residual == pytest.approx(lam, abs=1e-9)


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.5])
def test_state_order_does_not_matter(lam):
    fam, _ = example_family(lam)
    a = symmetrizability_check(fam)
    b = symmetrizability_check(permuted(fam, [1, 0]))
    assert a.symmetrizable == b.symmetrizable
    assert a.residual == pytest.approx(b.residual, abs=1e-12)


def test_singleton_family_is_symmetrizable(rng):
    # with one state sigma is trivial, so the rows themselves must coincide
    row = rng.dirichlet(np.ones(3))
    res = symmetrizability_check(AVCFamily((Channel(np.tile(row, (2, 1))),)))
    assert res.symmetrizable


def test_singleton_with_distinct_rows_is_not():
    res = symmetrizability_check(AVCFamily((Channel(np.eye(2)),)))
    assert not res.symmetrizable and res.residual == pytest.approx(1.0)


def test_lp_margin_is_optimal_against_scipy(rng):
    from bcclab.avc import _symmetrizer_lp

    for _ in range(10):
        fam = AVCFamily(tuple(random_channel(rng, 3, 3) for _ in range(2)))
        c, A_ub, b_ub, A_eq, b_eq, _, _ = _symmetrizer_lp(fam)
        ref = scipy_linprog(c, A_ub, b_ub, A_eq, b_eq, bounds=(0, None), method="highs")
        res = symmetrizability_check(fam)
        assert res.residual == pytest.approx(ref.fun, abs=1e-9)


def test_sweep_rows():
    rows = lambda_sweep([0.0, 0.5])
    assert [r.symmetrizable for r in rows] == [True, False]
    assert rows[0].rectangle.corner == pytest.approx((0.0, 1.0), abs=1e-12)
    with pytest.raises(EmptySet):
        lambda_sweep([])


def test_sweep_rectangle_values():
    # constant U, uniform V = X, useless eavesdropper: a0 = 0 and a1 = I(X;Y)
    from bcclab.info import JointDistribution, mutual_information

    for r in lambda_sweep([0.0, 0.5, 1.0]):
        w1 = example_family(r.lam)[0].states[0]
        ixy = mutual_information(JointDistribution((("X", 2), ("Y", 3)), 0.5 * w1.matrix))
        assert r.rectangle.a0 == pytest.approx(0.0, abs=1e-12)
        assert r.rectangle.a1 == pytest.approx(ixy, abs=1e-12)


# --- in-house simplex vs scipy --------------------------------------------------

def _compare(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None):
    ours = linprog(c, A_ub, b_ub, A_eq, b_eq)
    ref = scipy_linprog(c, A_ub, b_ub, A_eq, b_eq, bounds=(0, None), method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert ours.status == status
    if status == "optimal":
        assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
        assert ours.x.min() >= -1e-9
        if A_ub is not None:
            assert (np.asarray(A_ub) @ ours.x <= np.asarray(b_ub) + 1e-8).all()
        if A_eq is not None:
            assert np.allclose(np.asarray(A_eq) @ ours.x, b_eq, atol=1e-8)


def test_simplex_matches_scipy_random_bounded(rng):
    for _ in range(40):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        A = rng.normal(size=(m, n))
        b = rng.random(m) + 0.1
        A_eq = np.ones((1, n))
        _compare(rng.normal(size=n), A, b, A_eq, [1.0])


def test_simplex_matches_scipy_random_mixed(rng):
    for _ in range(40):
        m, n = int(rng.integers(1, 5)), int(rng.integers(2, 6))
        _compare(rng.normal(size=n), rng.normal(size=(m, n)), rng.normal(size=m))


def test_simplex_infeasible():
    _compare([1.0, 1.0], A_eq=[[1.0, 1.0]], b_eq=[-1.0])
    _compare([1.0], A_ub=[[1.0]], b_ub=[1.0], A_eq=[[1.0]], b_eq=[2.0])


def test_simplex_unbounded():
    _compare([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])


def test_simplex_degenerate():
    # several constraints tight at the optimum
    _compare([-1.0, -1.0], A_ub=[[1, 0], [0, 1], [1, 1], [1, 1]], b_ub=[1, 1, 2, 2])
