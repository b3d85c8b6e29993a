import itertools

import numpy as np
import pytest

from ssta.simplex import (
    LpInfeasibleError,
    LpProblem,
    LpUnboundedError,
    lp_solve,
)


def brute_force_optimum(p: LpProblem):
    """Enumerate all vertices of {Ax <= b, x >= 0}; return min c'x."""
    m, n = p.A.shape
    # constraint system: A x <= b plus -x_i <= 0
    G = np.vstack([p.A, -np.eye(n)])
    h = np.concatenate([p.b, np.zeros(n)])
    best = None
    for rows in itertools.combinations(range(G.shape[0]), n):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            val = float(p.c @ x)
            if best is None or val < best:
                best = val
    return best


def test_dimension_validation():
    with pytest.raises(ValueError):
        LpProblem(c=[1.0], A=[[1.0, 2.0]], b=[1.0])


def test_minimax_toy_exact():
    # min t s.t. -t <= x - 1 <= t: optimum x=1, t=0
    p = LpProblem(c=[0.0, 1.0], A=[[1.0, -1.0], [-1.0, -1.0]], b=[1.0, -1.0])
    sol = lp_solve(p)
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
    assert sol.x[0] == pytest.approx(1.0, abs=1e-12)


def test_minimax_two_targets():
    # fit scalar x to targets 2 and 5 in sup norm: x = 3.5, t = 1.5
    p = LpProblem(
        c=[0.0, 1.0],
        A=[[1.0, -1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, -1.0]],
        b=[2.0, -2.0, 5.0, -5.0],
    )
    sol = lp_solve(p)
    assert sol.objective == pytest.approx(1.5, abs=1e-12)
    assert sol.x[0] == pytest.approx(3.5, abs=1e-12)


def test_zero_rhs_gives_zero_solution():
    p = LpProblem(c=[0.0, 1.0], A=[[1.0, -1.0], [-1.0, -1.0]], b=[0.0, 0.0])
    sol = lp_solve(p)
    np.testing.assert_allclose(sol.x, 0.0, atol=1e-12)


def test_general_lp_with_negative_costs():
    # max x1 + x2 (min -x1 - x2) s.t. x1 + x2 <= 4, x1 <= 3 -> optimum -4
    p = LpProblem(c=[-1.0, -1.0], A=[[1.0, 1.0], [1.0, 0.0]], b=[4.0, 3.0])
    sol = lp_solve(p)
    assert sol.objective == pytest.approx(-4.0, abs=1e-12)


def test_infeasible_detected():
    # x <= -1 with x >= 0 is empty
    p = LpProblem(c=[1.0], A=[[1.0]], b=[-1.0])
    with pytest.raises(LpInfeasibleError):
        lp_solve(p)


def test_unbounded_detected():
    p = LpProblem(c=[-1.0], A=[[-1.0]], b=[1.0])
    with pytest.raises(LpUnboundedError):
        lp_solve(p)


def test_matches_vertex_enumeration_random():
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 20:
        n = int(rng.integers(2, 4))
        m = int(rng.integers(n, 7))
        A = rng.uniform(-1, 1, size=(m, n))
        b = rng.uniform(0.1, 2, size=m)  # origin feasible
        c = rng.uniform(-1, 1, size=n)
        p = LpProblem(c=c, A=A, b=b)
        ref = brute_force_optimum(p)
        if ref is None:
            continue
        try:
            sol = lp_solve(p)
        except LpUnboundedError:
            continue
        assert sol.objective == pytest.approx(ref, abs=1e-9)
        checked += 1


def test_determinism():
    rng = np.random.default_rng(5)
    A = rng.uniform(-1, 1, size=(12, 4))
    b = rng.uniform(0.1, 2, size=12)
    c = rng.uniform(0.0, 1, size=4)
    s1 = lp_solve(LpProblem(c=c, A=A, b=b))
    s2 = lp_solve(LpProblem(c=c, A=A, b=b))
    assert s1.iterations == s2.iterations
    np.testing.assert_array_equal(s1.x, s2.x)


def test_optimality_certificate_feasibility():
    rng = np.random.default_rng(9)
    A = rng.uniform(-1, 1, size=(10, 3))
    b = rng.uniform(0.5, 2, size=10)
    c = np.array([0.2, 0.7, 1.0])
    sol = lp_solve(LpProblem(c=c, A=A, b=b))
    assert np.all(sol.x >= -1e-12)
    assert np.all(A @ sol.x <= b + 1e-9)
