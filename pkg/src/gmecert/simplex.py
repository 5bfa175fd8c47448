"""Dense two-phase tableau simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Floating point by default. ``exact=True`` runs the same pivots on
``fractions.Fraction`` entries with zero tolerance. Bland's rule throughout,
so degenerate problems terminate.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

PIVOT_TOL = 1e-9


class LPError(ValueError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    objective: float | None
    phase1_objective: float
    iterations: int
    kept_rows: tuple

    @property
    def feasible(self):
        return self.status != "infeasible"


def _to_exact(a, max_denominator):
    conv = np.vectorize(lambda v: Fraction(v).limit_denominator(max_denominator), otypes=[object])
    return conv(np.asarray(a, dtype=float))


def independent_rows(a, b, tol=PIVOT_TOL):
    """Gaussian elimination with partial pivoting on [A | b].

    Returns ``(rows, inconsistency)``: indices of a maximal independent row
    subset, and the largest |b| left on a row whose A part eliminated to zero
    (nonzero means the equality system has no solution at all).
    """
    aug = np.concatenate([a, np.asarray(b).reshape(-1, 1)], axis=1).copy()
    m, n = a.shape
    order = list(range(m))
    rank = 0
    for col in range(n):
        if rank == m:
            break
        mags = np.abs(aug[rank:, col])
        piv = rank + int(np.argmax(mags))
        if mags[piv - rank] <= tol:
            continue
        aug[[rank, piv]] = aug[[piv, rank]]
        order[rank], order[piv] = order[piv], order[rank]
        factors = aug[rank + 1:, col] / aug[rank, col]
        aug[rank + 1:] -= np.outer(factors, aug[rank])
        rank += 1
    leftover = aug[rank:, n]
    inconsistency = float(np.max(np.abs(leftover))) if len(leftover) else 0.0
    return sorted(order[:rank]), inconsistency


def _pivot(t, r, c):
    t[r] = t[r] / t[r, c]
    col = t[:, c].copy()
    col[r] = 0
    if t.dtype == object:
        for i in range(t.shape[0]):
            if col[i] != 0:
                t[i] = t[i] - col[i] * t[r]
    else:
        t -= np.outer(col, t[r])


def _run(t, basis, n_cols, tol, max_iter, allowed):
    """Minimize the objective kept in the last row of tableau ``t`` (reduced costs)."""
    it = 0
    m = t.shape[0] - 1
    while True:
        if it >= max_iter:
            raise LPError(f"simplex did not terminate within {max_iter} pivots")
        obj = t[m, :n_cols]
        entering = next((j for j in range(n_cols) if allowed[j] and obj[j] < -tol), None)
        if entering is None:
            return "optimal", it
        col = t[:m, entering]
        best, leave = None, None
        for i in range(m):
            if col[i] > tol:
                ratio = t[i, -1] / col[i]
                if best is None or ratio < best - tol or (abs(ratio - best) <= tol and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded", it
        _pivot(t, leave, entering)
        basis[leave] = entering
        it += 1


def solve(c, a_eq, b_eq, exact=False, tol=PIVOT_TOL, max_iter=50_000, max_denominator=10**12):
    """Two-phase simplex. Redundant equality rows are removed before phase 1."""
    a = np.asarray(a_eq, dtype=float)
    b = np.asarray(b_eq, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, n = a.shape
    if b.shape != (m,) or c.shape != (n,):
        raise LPError(f"dimension mismatch: A {a.shape}, b {b.shape}, c {c.shape}")

    if exact:
        a, b, c = (_to_exact(v, max_denominator) for v in (a, b, c))
        tol = 0

    rows, inconsistency = independent_rows(a, b, tol if not exact else 0)
    if inconsistency > (tol if not exact else 0):
        return LPResult("infeasible", None, None, inconsistency, 0, tuple(rows))
    a, b = a[rows], b[rows]
    m = len(rows)

    neg = [i for i in range(m) if b[i] < 0]
    a = a.copy()
    b = b.copy()
    a[neg] = -a[neg]
    b[neg] = -b[neg]

    dtype = object if exact else float
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    # columns: n originals, m artificials, rhs
    t = np.full((m + 1, n + m + 1), zero, dtype=dtype)
    t[:m, :n] = a
    for i in range(m):
        t[i, n + i] = one
    t[:m, -1] = b
    # phase-1 objective: sum of artificials, expressed in reduced form
    t[m, :n] = -a.sum(axis=0)
    t[m, -1] = -b.sum()
    basis = [n + i for i in range(m)]

    status, it1 = _run(t, basis, n + m, tol, max_iter, [True] * (n + m))
    phase1 = float(-t[m, -1])
    if phase1 > (tol if not exact else 0) * max(1.0, float(np.max(np.abs(b.astype(float))))):
        return LPResult("infeasible", None, None, phase1, it1, tuple(rows))

    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if abs(t[i, j]) > tol), None)
            if j is not None:
                _pivot(t, i, j)
                basis[i] = j

    # phase 2: original objective in reduced form
    t[m, :] = zero
    t[m, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0:
            t[m] = t[m] - c[basis[i]] * t[i]
    allowed = [True] * n + [False] * m
    status, it2 = _run(t, basis, n + m, tol, max_iter - it1, allowed)

    x = np.zeros(n, dtype=dtype) if exact else np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = t[i, -1]
    if status == "unbounded":
        return LPResult("unbounded", None, None, phase1, it1 + it2, tuple(rows))
    objective = sum(c[j] * x[j] for j in range(n))
    return LPResult("optimal", x, objective, phase1, it1 + it2, tuple(rows))
