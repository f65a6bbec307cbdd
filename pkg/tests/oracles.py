"""Independent reference solvers used by the test suite.

These are deliberately different algorithms from the production code:

* solve_svm_reference: exact box-QP solution of the L1-hinge SVM dual by
  exhaustive enumeration of KKT active sets (3^n cases, so n <= ~10).
* platt_grid_search: two-stage dense grid minimization of the calibration
  objective over (A, B).

Both were written, and their frozen values captured, before the production
solver and calibrator.
"""

import itertools

import numpy as np


def hinge_primal(w, X, y, c):
    """0.5*||w||^2 + c * sum hinge. X rows already carry the bias feature,
    so the bias is regularized exactly like the production formulation."""
    margins = 1.0 - y * (X @ w)
    return 0.5 * float(w @ w) + c * float(np.maximum(margins, 0.0).sum())


def dual_objective(alpha, q):
    return 0.5 * float(alpha @ q @ alpha) - float(alpha.sum())


def solve_svm_reference(X, y, c, feas_tol=1e-9):
    """Exact solution of  min 0.5*a'Qa - sum(a)  s.t. 0 <= a <= c,
    Q_ij = y_i y_j x_i.x_j, by KKT active-set enumeration.

    Returns (w, alpha, primal_objective). X is dense (n, d) with the bias
    column included; n must stay small (3^n cases are enumerated).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n > 10:
        raise ValueError("enumeration oracle is for tiny instances only")
    q = (y[:, None] * X) @ (y[:, None] * X).T

    best = None
    for assign in itertools.product((0, 1, 2), repeat=n):
        assign = np.array(assign)
        at_zero = assign == 0
        interior = assign == 1
        at_c = assign == 2
        alpha = np.zeros(n)
        alpha[at_c] = c
        if interior.any():
            qii = q[np.ix_(interior, interior)]
            rhs = 1.0 - q[np.ix_(interior, at_c)].sum(axis=1) * c
            try:
                sol = np.linalg.solve(qii, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(qii, rhs, rcond=None)
                if not np.allclose(qii @ sol, rhs, atol=feas_tol):
                    continue
            if not np.all((sol > -feas_tol) & (sol < c + feas_tol)):
                continue
            alpha[interior] = np.clip(sol, 0.0, c)
        grad = q @ alpha - 1.0
        if np.any(grad[at_zero] < -feas_tol):
            continue
        if np.any(grad[at_c] > feas_tol):
            continue
        if interior.any() and np.any(np.abs(grad[interior]) > 1e-6):
            continue
        obj = dual_objective(alpha, q)
        if best is None or obj < best[0]:
            best = (obj, alpha)
    if best is None:
        raise RuntimeError("no KKT point found (feasibility tolerances too tight)")

    alpha = best[1]
    w = ((alpha * y)[:, None] * X).sum(axis=0)
    primal = hinge_primal(w, X, y, c)
    # strong duality self-check: primal at the recovered w must meet the dual value
    assert abs(primal + best[0]) <= 1e-6 * max(1.0, abs(primal)), (primal, best[0])
    return w, alpha, primal


def platt_objective(a, b, scores, targets):
    """Calibration negative log-likelihood with smoothed targets, evaluated
    stably. P(y=1|s) = 1 / (1 + exp(a*s + b))."""
    z = a * scores + b
    # log(1 + e^z) - (1 - t) * z, split by sign for stability
    pos = z >= 0
    out = np.empty_like(z)
    out[pos] = targets[pos] * z[pos] + np.log1p(np.exp(-z[pos]))
    out[~pos] = (targets[~pos] - 1.0) * z[~pos] + np.log1p(np.exp(z[~pos]))
    return float(out.sum())


def smoothed_targets(labels):
    labels = np.asarray(labels)
    n_pos = int((labels > 0).sum())
    n_neg = int((labels <= 0).sum())
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    return np.where(labels > 0, hi, lo)


def platt_grid_search(scores, labels):
    """Two-stage dense grid argmin of the calibration objective.

    Stage 1 scans a wide coarse grid, stage 2 refines around the best cell.
    Returns (a, b). Resolution of the final stage is 0.01 on both axes, far
    inside the +/-0.2 acceptance tolerance.
    """
    scores = np.asarray(scores, dtype=np.float64)
    targets = smoothed_targets(labels)

    def scan(a_grid, b_grid):
        best = (np.inf, None, None)
        for a in a_grid:
            for b in b_grid:
                val = platt_objective(a, b, scores, targets)
                if val < best[0]:
                    best = (val, a, b)
        return best

    _, a0, b0 = scan(np.arange(-6.0, 1.0 + 1e-9, 0.1), np.arange(-2.0, 2.0 + 1e-9, 0.1))
    _, a1, b1 = scan(np.arange(a0 - 0.12, a0 + 0.12 + 1e-9, 0.01),
                     np.arange(b0 - 0.12, b0 + 0.12 + 1e-9, 0.01))
    return float(a1), float(b1)
