from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from gmecert import simplex


def random_lp(rng):
    m, n = rng.integers(2, 6), rng.integers(3, 9)
    a = rng.integers(-4, 5, size=(m, n)).astype(float)
    if rng.random() < 0.5:
        # planted feasible point
        b = a @ rng.integers(0, 4, size=n)
    else:
        b = rng.integers(-5, 6, size=m).astype(float)
    if rng.random() < 0.3:
        a = np.vstack([a, a[0] + a[-1]])  # redundant row
        b = np.append(b, b[0] + b[-1])
    c = rng.integers(-3, 4, size=n).astype(float)
    return c, a, b


@pytest.mark.parametrize("exact", [False, True])
def test_agrees_with_highs(exact):
    rng = np.random.default_rng(2024)
    for _ in range(150):
        c, a, b = random_lp(rng)
        ref = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
        res = simplex.solve(c, a, b, exact=exact)
        if ref.status == 2:
            assert res.status == "infeasible"
        elif ref.status == 3:
            assert res.status == "unbounded"
        else:
            assert res.status == "optimal"
            assert float(res.objective) == pytest.approx(ref.fun, abs=1e-7)
            x = np.array([float(v) for v in res.x])
            assert np.all(x >= -1e-12)
            assert np.allclose(a @ x, b, atol=1e-8)


def test_exact_mode_returns_fractions():
    res = simplex.solve([1, 1], [[3, 1]], [1], exact=True)
    assert res.status == "optimal"
    assert isinstance(res.x[0], Fraction)
    assert res.objective == Fraction(1, 3)


def test_inconsistent_equalities():
    res = simplex.solve([0, 0], [[1, 1], [1, 1]], [1, 2])
    assert res.status == "infeasible" and not res.feasible


def test_redundant_rows_dropped():
    rows, inc = simplex.independent_rows(np.array([[1.0, 0], [2, 0], [0, 1]]), [1, 2, 3])
    assert len(rows) == 2 and inc == 0


def test_degenerate_problem_terminates():
    # classic cycling example under the textbook rule, here in equality form
    a = np.array([
        [0.5, -5.5, -2.5, 9, 1, 0, 0],
        [0.5, -1.5, -0.5, 1, 0, 1, 0],
        [1, 0, 0, 0, 0, 0, 1],
    ])
    b = np.array([0, 0, 1.0])
    c = np.array([-10, 57, 9, 24, 0, 0, 0.0])
    res = simplex.solve(c, a, b)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-1)


def test_dimension_mismatch():
    with pytest.raises(simplex.LPError):
        simplex.solve([1, 2, 3], [[1, 1]], [1])
