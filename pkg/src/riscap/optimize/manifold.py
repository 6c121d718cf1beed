"""Complex circle manifold {theta : |theta_i| = 1} as used by the RIS phases.

Tangent vectors at ``theta`` satisfy Re(v * conj(theta)) = 0 elementwise.
The metric is the real inner product <u, v> = 2 Re(u^H v), which makes the
Wirtinger gradient df/d(conj theta) the matching gradient representation.
"""

import numpy as np

from .._validation import NumericError

MAX_SHRINKS = 50


def inner(u, v):
    return 2.0 * float(np.real(np.vdot(u, v)))


def project(v, theta):
    """Orthogonal projection of ``v`` onto the tangent space at ``theta``."""
    return v - np.real(v * theta.conj()) * theta


def riemannian_grad(egrad, theta):
    return project(egrad, theta)


def transport(eta, theta_new):
    """Move a tangent vector to the tangent space at ``theta_new`` by projection."""
    return project(eta, theta_new)


def retract(theta, step, eta):
    """Elementwise normalization of ``theta + step * eta`` back onto the circle.

    If an entry of ``theta + step * eta`` vanishes the step is halved, at most
    50 times. A tangent ``eta`` never triggers this because
    |theta_i + s eta_i|^2 = 1 + s^2 |eta_i|^2.
    """
    if not np.all(np.isfinite(eta)) or not np.isfinite(step):
        raise NumericError("retraction received a non-finite step or direction")
    for _ in range(MAX_SHRINKS + 1):
        y = theta + step * eta
        mag = np.abs(y)
        if np.all(mag > 0):
            return y / mag
        step *= 0.5
    raise NumericError("retraction hit a zero entry after 50 step reductions")


def tangency_residual(v, theta):
    return float(np.max(np.abs(np.real(v * theta.conj())))) if v.size else 0.0
