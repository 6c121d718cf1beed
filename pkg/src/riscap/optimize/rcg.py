"""Riemannian conjugate gradient for the RIS phase subproblem.

Minimizes f(theta) = -log2 det(I_P + Gamma A_rp^H diag(theta)^H A_rL A_rL^H diag(theta) A_rp)
over unit-modulus ``theta``, where Gamma is a nonnegative diagonal weight.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import DimensionError, NumericError, ValidationError, check_theta
from ..capacity import reflection_gram
from . import manifold

ARMIJO_STEP = 1.0
ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
ARMIJO_MAX_BACKTRACKS = 50


@dataclass
class RcgState:
    point: np.ndarray
    grad: np.ndarray
    direction: np.ndarray
    objective: float
    iter: int


@dataclass
class RcgResult:
    theta: np.ndarray
    trace: list = field(default_factory=list)
    status: str = "converged"
    iterations: int = 0
    grad_norm: float = 0.0


def _inner_factor(theta, weights, s):
    # Omega^{-1} Gamma = C (I + C X^H X C)^{-1} C with C = Gamma^{1/2}; Hermitian PD inner part
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (s.p_paths,):
        raise DimensionError(f"weights has shape {weights.shape}, expected ({s.p_paths},)", key="weights")
    if np.any(weights < 0):
        raise ValidationError("weights must be nonnegative", key="weights")
    x = reflection_gram(theta, s)
    c = np.sqrt(weights)
    with np.errstate(invalid="ignore"):
        m = c[:, None] * (x.conj().T @ x) * c[None, :]
    m = 0.5 * (m + m.conj().T)
    m[np.diag_indices_from(m)] += 1.0
    if not np.all(np.isfinite(m)):
        raise NumericError("Omega has non-finite entries")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError("Omega is not positive definite") from exc
    return x, c, chol


def ris_objective(theta, weights, s):
    """f(theta) = -log2 det(Omega); ``weights`` is the diagonal of Gamma."""
    _, _, chol = _inner_factor(theta, weights, s)
    return float(-2.0 * np.sum(np.log(np.diag(chol).real)) / math.log(2.0))


def euclidean_grad(theta, weights, s):
    """Diagonal of -(1/ln 2) A_rL A_rL^H diag(theta) A_rp Omega^{-1} Gamma A_rp^H.

    This is the Wirtinger derivative df/d(conj theta); the directional
    derivative along ``v`` is 2 Re(grad^H v). Cost O(N_r P L): only the
    diagonal of the N_r x N_r product is formed.
    """
    x, c, chol = _inner_factor(theta, weights, s)
    inv = np.linalg.inv(chol)
    k_inv = inv.conj().T @ inv
    omega_inv_gamma = c[:, None] * k_inv * c[None, :]
    xi1 = x @ omega_inv_gamma
    diag = np.einsum("kl,kl->k", s.a_rL @ xi1, s.a_rp.conj())
    return -diag / math.log(2.0)


def _value_and_rgrad(theta, weights, s):
    f = ris_objective(theta, weights, s)
    g = manifold.riemannian_grad(euclidean_grad(theta, weights, s), theta)
    return f, g


def rcg_optimize(theta0, weights, s, tol_grad=1e-6, max_iter=500, callback=None):
    """Armijo line search with Polak-Ribiere+ directions on the unit-modulus manifold.

    Stops when the Riemannian gradient norm drops to ``tol_grad``
    (``converged``), after ``max_iter`` iterations (``max_iter``), or when no
    step among 1, 1/2, ..., 2^-50 gives sufficient decrease (``stalled``).
    The returned objective trace is non-increasing.
    """
    theta = check_theta(theta0, s.n_r).copy()
    weights = np.asarray(weights, dtype=float)
    f, g = _value_and_rgrad(theta, weights, s)
    eta = -g
    trace = [f]
    status = "converged"
    it = 0
    while True:
        gnorm = math.sqrt(manifold.inner(g, g) / 2.0)
        if callback is not None:
            callback(RcgState(theta, g, eta, f, it))
        if gnorm <= tol_grad:
            status = "converged"
            break
        if it >= max_iter:
            status = "max_iter"
            break
        slope = manifold.inner(g, eta)
        if slope >= 0:
            eta = -g
            slope = manifold.inner(g, eta)
        step = ARMIJO_STEP
        for _ in range(ARMIJO_MAX_BACKTRACKS + 1):
            cand = manifold.retract(theta, step, eta)
            f_cand = ris_objective(cand, weights, s)
            if f_cand <= f + ARMIJO_C * step * slope:
                break
            step *= ARMIJO_SHRINK
        else:
            status = "stalled"
            break
        g_new = manifold.riemannian_grad(euclidean_grad(cand, weights, s), cand)
        eta_moved = manifold.transport(eta, cand)
        g_moved = manifold.transport(g, cand)
        beta = max(0.0, manifold.inner(g_new, g_new - g_moved) / manifold.inner(g, g))
        eta = -g_new + beta * eta_moved
        if manifold.inner(g_new, eta) >= 0:
            eta = -g_new
        theta, f, g = cand, f_cand, g_new
        trace.append(f)
        it += 1
    return RcgResult(theta=theta, trace=trace, status=status, iterations=it, grad_norm=gnorm)
