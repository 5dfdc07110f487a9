"""Sinkhorn and Greenkhorn matrix-scaling baselines, log domain only.

Both scale the kernel ``exp(-C/eta)`` toward the target marginals; the
naive kernel underflows at the penalties this package runs at, so all
scaling state lives in the log domain.  Sinkhorn alternates full row and
column updates; Greenkhorn updates the single row or column with the worst
marginal-violation score.  Both stop when the plan's L1 marginal distance
drops below a tolerance, and both plug into the same smoothing and rounding
pipeline as the stochastic solver so benchmark curves differ only in the
solver.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import TransportPlan, as_matrix, as_weights


@dataclass
class ScalingState:
    log_u: np.ndarray
    log_v: np.ndarray
    log_kernel: np.ndarray
    iteration: int = 0


StopCallback = Callable[[np.ndarray, int], Optional[str]]


def _validate(cost, alpha, beta, eta):
    c = as_matrix(cost)
    a = as_weights(alpha)
    b = as_weights(beta)
    if c.shape != (a.size, b.size):
        raise ValueError("cost and marginal shapes disagree")
    if a.min() <= 0 or b.min() <= 0:
        raise ValueError("scaling baselines require strictly positive marginals")
    if eta <= 0:
        raise ValueError("eta must be positive")
    return c, a, b


def _lse_rows(t: np.ndarray) -> np.ndarray:
    m = t.max(axis=1)
    return m + np.log(np.exp(t - m[:, None]).sum(axis=1))


def sinkhorn(cost, alpha, beta, eta, tol_marginal=1e-9, max_iter=10_000, log=False, stop: StopCallback = None):
    """Alternating log-domain row/column scaling of exp(-C/eta).

    Runs until the current plan's marginal distance to (alpha, beta) falls
    below ``tol_marginal`` or ``max_iter`` sweeps elapse (flagged with a
    warning).  Returns the unrounded plan, plus an info dict when ``log``
    is true (iterations, converged flag, final distance, duals, stop reason).
    """
    c, a, b = _validate(cost, alpha, beta, eta)
    log_k = -c / eta
    log_a = np.log(a)
    log_b = np.log(b)
    state = ScalingState(np.zeros(a.size), np.zeros(b.size), log_k)
    d = np.inf
    reason = None
    plan = np.exp(log_k + state.log_u[:, None] + state.log_v[None, :])
    while state.iteration < max_iter:
        state.log_u = log_a - _lse_rows(log_k + state.log_v[None, :])
        state.log_v = log_b - _lse_rows((log_k + state.log_u[:, None]).T)
        state.iteration += 1
        plan = np.exp(log_k + state.log_u[:, None] + state.log_v[None, :])
        d = float(np.abs(plan.sum(1) - a).sum() + np.abs(plan.sum(0) - b).sum())
        if d <= tol_marginal:
            reason = "marginal-tol"
            break
        if stop is not None:
            reason = stop(plan, state.iteration)
            if reason is not None:
                break
    converged = reason is not None
    if not converged:
        warnings.warn(
            f"sinkhorn hit max_iter={max_iter} with marginal distance {d:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    result = TransportPlan(plan)
    if not log:
        return result
    return result, {
        "iterations": state.iteration,
        "sweeps": state.iteration,
        "converged": converged,
        "marginal_distance": d,
        "stop_reason": reason,
        "log_u": state.log_u,
        "log_v": state.log_v,
    }


def _line_scores(actual: np.ndarray, target: np.ndarray) -> np.ndarray:
    # Bregman-style distance rho(t, s) = s - t + t ln(t/s) of an actual
    # marginal s to its target t, evaluated as t * (x - log1p(x)) with
    # x = (s - t)/t.  The naive form cancels catastrophically for small
    # violations and makes the greedy pick rounding noise; this form is
    # accurate down to the float floor.  An empty line scores +inf.
    x = (actual - target) / target
    with np.errstate(divide="ignore"):
        return target * (x - np.log1p(x))


def greenkhorn(cost, alpha, beta, eta, tol_marginal=1e-9, max_iter=1_000_000, log=False, stop: StopCallback = None):
    """Greedy coordinate version of Sinkhorn.

    Each step rescales the single row or column with the largest
    distance-to-marginal score so that its sum matches the target exactly.
    ``max_iter`` counts coordinate updates; the stop callback is polled every
    n updates.
    """
    c, a, b = _validate(cost, alpha, beta, eta)
    n = a.size
    log_k = -c / eta
    log_a = np.log(a)
    log_b = np.log(b)
    # Start from the mass-1 normalization of the kernel.
    shift = -_lse_rows(log_k.reshape(1, -1))[0]
    state = ScalingState(np.full(n, shift), np.zeros(n), log_k)
    plan = np.exp(log_k + state.log_u[:, None] + state.log_v[None, :])
    r = plan.sum(axis=1)
    col = plan.sum(axis=0)
    d = float(np.abs(r - a).sum() + np.abs(col - b).sum())
    reason = None if d > tol_marginal else "marginal-tol"
    while reason is None and state.iteration < max_iter:
        rows = _line_scores(r, a)
        cols = _line_scores(col, b)
        i = int(np.argmax(rows))
        j = int(np.argmax(cols))
        if rows[i] >= cols[j]:
            state.log_u[i] = log_a[i] - _lse_rows((log_k[i] + state.log_v).reshape(1, -1))[0]
            new_row = np.exp(log_k[i] + state.log_u[i] + state.log_v)
            col += new_row - plan[i]
            plan[i] = new_row
            r[i] = new_row.sum()
        else:
            state.log_v[j] = log_b[j] - _lse_rows((log_k[:, j] + state.log_u).reshape(1, -1))[0]
            new_col = np.exp(log_k[:, j] + state.log_u + state.log_v[j])
            r += new_col - plan[:, j]
            plan[:, j] = new_col
            col[j] = new_col.sum()
        state.iteration += 1
        if state.iteration % n == 0:
            # Refresh incrementally maintained sums to shed rounding drift.
            r = plan.sum(axis=1)
            col = plan.sum(axis=0)
            if stop is not None:
                reason = stop(plan, state.iteration)
                if reason is not None:
                    break
        d = float(np.abs(r - a).sum() + np.abs(col - b).sum())
        if d <= tol_marginal:
            reason = "marginal-tol"
    converged = reason is not None
    if not converged:
        warnings.warn(
            f"greenkhorn hit max_iter={max_iter} with marginal distance {d:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    result = TransportPlan(plan)
    if not log:
        return result
    return result, {
        "iterations": state.iteration,
        "updates": state.iteration,
        "converged": converged,
        "marginal_distance": d,
        "stop_reason": reason,
        "log_u": state.log_u,
        "log_v": state.log_v,
    }
