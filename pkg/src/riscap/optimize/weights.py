"""Per-stream weights of the surrogate subproblems and their validity check."""

import math

import numpy as np

from .._validation import ValidationError
from ..capacity import descending_eigvalsh, harmonic_partial_sums, numerical_rank, reflection_gram


def stream_weights(cfg, n_s):
    """beta_i = H_i(P) H_i(L) N_b N_u N_r^2 / (sigma^2 P L) for i = 1..n_s."""
    return (
        harmonic_partial_sums(cfg.p_paths, n_s) * harmonic_partial_sums(cfg.l_paths, n_s) * cfg.gain_scale
    )


def _pad(values, size):
    out = np.zeros(size)
    out[: values.size] = values
    return out


def covariance_weights(theta, s, cfg):
    """Diagonal of the weight matrix for the covariance step (length P).

    Entry i is beta_i d_u,i d_r,i with d_r taken at ``theta``. The stream count
    ignores the current covariance: it is min(rank A_b, rank A_u^H A_u,
    rank X^H X), so streams switched off by one water-filling pass can return.
    """
    d_u = descending_eigvalsh(s.a_u.conj().T @ s.a_u, "A_u^H A_u")
    x = reflection_gram(theta, s)
    d_r = descending_eigvalsh(x.conj().T @ x, "X^H X")
    d_bb = descending_eigvalsh(s.a_b.conj().T @ s.a_b, "A_b^H A_b")
    n_s = min(numerical_rank(d_bb), numerical_rank(d_u), numerical_rank(d_r))
    return _pad(stream_weights(cfg, n_s) * d_u[:n_s] * d_r[:n_s], cfg.p_paths)


def phase_weights(q, s, cfg):
    """Diagonal of the weight matrix for the phase step (length P).

    Entry i is beta_i d_u,i d_b,i with d_b taken at ``q``; the stream count is
    min(rank A_b^H Q A_b, rank A_u^H A_u, P, L), independent of the phases.
    """
    d_b = descending_eigvalsh(s.a_b.conj().T @ q @ s.a_b, "A_b^H Q A_b")
    d_u = descending_eigvalsh(s.a_u.conj().T @ s.a_u, "A_u^H A_u")
    n_s = min(numerical_rank(d_b), numerical_rank(d_u), cfg.p_paths, cfg.l_paths)
    return _pad(stream_weights(cfg, n_s) * d_u[:n_s] * d_b[:n_s], cfg.p_paths)


def weighted_log_det(weights, gram):
    """log2 det(I + diag(w) M) for Hermitian PSD ``gram`` M, via the symmetric form."""
    c = np.sqrt(weights)
    m = c[:, None] * gram * c[None, :]
    m = 0.5 * (m + m.conj().T)
    m[np.diag_indices_from(m)] += 1.0
    chol = np.linalg.cholesky(m)
    return float(2.0 * np.sum(np.log(np.diag(chol).real)) / math.log(2.0))


def det_inequality_oracle(u, c, s, atol=1e-10):
    """Both sides of det(I + C U^H S U) <= det(I + U^H C S U) for diagonal C, S.

    ``c`` and ``s`` must be nonnegative and descending, ``u`` unitary.
    Returns ``(lhs, rhs)``; the right side equals prod(1 + c_i s_i).
    """
    u = np.asarray(u, dtype=complex)
    c = np.asarray(c, dtype=float)
    s = np.asarray(s, dtype=float)
    n = c.shape[0]
    if u.shape != (n, n) or s.shape != (n,):
        raise ValidationError(f"shapes do not conform: u {u.shape}, c {c.shape}, s {s.shape}", key="u")
    if np.max(np.abs(u.conj().T @ u - np.eye(n))) > atol:
        raise ValidationError("u is not unitary", key="u")
    for name, v in (("c", c), ("s", s)):
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ValidationError(f"{name} must be nonnegative and descending", key=name)
    lhs = np.linalg.det(np.eye(n) + c[:, None] * (u.conj().T @ (s[:, None] * u))).real
    rhs = np.linalg.det(np.eye(n) + u.conj().T @ ((c * s)[:, None] * u)).real
    return float(lhs), float(rhs)
