import warnings
from dataclasses import dataclass

import numpy as np

from .weights import covariance_weights, weighted_log_det

SV_TOL = 1e-10


@dataclass(frozen=True)
class WaterfillResult:
    covariance: np.ndarray
    powers: np.ndarray
    water_level: float
    """p0: the level 1/p0 is shared by every active stream."""
    channel_gains: np.ndarray
    """Squared singular values Sigma_1(i, i)^2 of the weighted channel."""
    degenerate: bool = False


def waterfill_powers(gains_sq, power_budget, max_iter=200):
    """Maximize sum log(1 + p_i g_i) s.t. p >= 0, sum p = power_budget.

    Returns ``(p, p0)`` with p_i = max(1/p0 - 1/g_i, 0). The level 1/p0 is
    bracketed by bisection; once the active set is stable it is solved in
    closed form so the powers sum to the budget up to rounding.
    """
    g = np.asarray(gains_sq, dtype=float)
    inv = 1.0 / g
    lo = float(inv.min())
    hi = lo + power_budget
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.maximum(mid - inv, 0.0).sum() > power_budget:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    level = 0.5 * (lo + hi)
    for _ in range(g.size + 1):
        active = inv < level
        closed = (power_budget + inv[active].sum()) / np.count_nonzero(active)
        if np.array_equal(inv < closed, active):
            level = closed
            break
        level = closed
    p = np.maximum(level - inv, 0.0)
    return p, 1.0 / level


def covariance_objective(q, weights, s):
    """log2 det(I_P + (A_b W^1/2)^H Q (A_b W^1/2)) for diagonal weights W."""
    return weighted_log_det(weights, s.a_b.conj().T @ q @ s.a_b)


def waterfill_weighted(weights, s, power_budget):
    """Water-filling transmit covariance for fixed diagonal ``weights`` (length P)."""
    b = np.sqrt(weights)[:, None] * s.a_b.conj().T
    _, sv, vh = np.linalg.svd(b, full_matrices=False)
    n_b = s.n_b
    if sv.size == 0 or sv[0] <= 0:
        warnings.warn("all weighted singular values are zero; using equal power", RuntimeWarning, stacklevel=2)
        return WaterfillResult(np.eye(n_b) * power_budget / n_b, np.zeros(0), 0.0, np.zeros(0), degenerate=True)
    k = int(np.count_nonzero(sv > SV_TOL * sv[0]))
    gains_sq = sv[:k] ** 2
    p, p0 = waterfill_powers(gains_sq, power_budget)
    v1 = vh[:k].conj().T
    q = (v1 * p[None, :]) @ v1.conj().T
    q = 0.5 * (q + q.conj().T)
    return WaterfillResult(q, p, p0, gains_sq)


def waterfill(s, theta, cfg):
    """Optimal covariance of the surrogate problem with the phases held at ``theta``."""
    return waterfill_weighted(covariance_weights(theta, s, cfg), s, cfg.power_budget)
