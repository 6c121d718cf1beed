"""Ergodic capacity: exact Monte-Carlo and the eigenvalue-based expressions.

Every value is in bits/s/Hz. The analytic expressions take an
:class:`EigenTriplet` computed from the steering matrices, the transmit
covariance and the RIS coefficients; only the path gains are averaged out.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import DimensionError, NumericError, ValidationError, check_covariance, check_theta
from .channel import assemble_channels, cascade, complex_normal, sample_realization, steering_set, trial_rng
from .parallel import map_trials, mean_and_stderr
from .special import EULER_GAMMA, mean_log1p_exp_product

RANK_TOL = 1e-10
CLAMP_TOL = 1e-10

KINDS = ("exact_mc", "app_mc", "app_quadrature", "jen1", "jen2", "high_snr_upper")
PAIRINGS = ("unordered", "sorted")


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    std_err: float = 0.0
    trials: int = 0
    kind: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown capacity kind {self.kind!r}", key="kind")
        if self.std_err < 0 or not np.isfinite(self.std_err):
            raise ValidationError("std_err must be finite and >= 0", key="std_err")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class EigenTriplet:
    """Descending eigenvalues of A_b^H Q A_b, A_u^H A_u and X^H X.

    ``d_b`` and ``d_r`` have P entries, ``d_u`` has L; ``n_s`` is the number
    of streams, at most min(P, L).
    """

    d_b: np.ndarray
    d_u: np.ndarray
    d_r: np.ndarray
    n_s: int

    @property
    def products(self):
        """d_b,i d_u,i d_r,i for the ``n_s`` active streams."""
        k = self.n_s
        return self.d_b[:k] * self.d_u[:k] * self.d_r[:k]


def harmonic_partial_sums(n, count=None):
    """H_i(n) = sum_{j=1..i} 1/(n-j+1) for i = 1..count.

    H_i(n) is the mean of the i-th smallest of n i.i.d. Exp(1) variables.
    """
    count = n if count is None else count
    if count > n:
        raise ValidationError(f"order statistic index {count} exceeds sample size {n}", key="count")
    return np.cumsum(1.0 / (n - np.arange(count)))


def descending_eigvalsh(m, name):
    m = 0.5 * (m + m.conj().T)
    try:
        lam = np.linalg.eigvalsh(m)[::-1].copy()
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(m) if np.all(np.isfinite(m)) else np.inf
        raise NumericError(f"eigendecomposition of {name} failed (condition number {cond:.3e})") from exc
    scale = max(1.0, float(lam[0])) if lam.size else 1.0
    if lam.size and lam[-1] < -CLAMP_TOL * scale:
        raise NumericError(f"{name} is not PSD: smallest eigenvalue {lam[-1]:.3e}")
    return np.maximum(lam, 0.0)


def numerical_rank(lam, tol=RANK_TOL):
    """Count of eigenvalues above ``tol`` times the largest."""
    if lam.size == 0 or lam[0] <= 0:
        return 0
    return int(np.count_nonzero(lam > tol * lam[0]))


def reflection_gram(theta, s):
    """X = A_rL^H diag(theta) A_rp (L x P)."""
    return s.a_rL.conj().T @ (theta[:, None] * s.a_rp)


def eigen_triplet(q, theta, s):
    """Eigenvalue sequences that drive every analytic capacity expression."""
    q = check_covariance(q, s.n_b)
    theta = check_theta(theta, s.n_r)
    d_b = descending_eigvalsh(s.a_b.conj().T @ q @ s.a_b, "A_b^H Q A_b")
    d_u = descending_eigvalsh(s.a_u.conj().T @ s.a_u, "A_u^H A_u")
    x = reflection_gram(theta, s)
    d_r = descending_eigvalsh(x.conj().T @ x, "X^H X")
    n_s = min(numerical_rank(d_b), numerical_rank(d_u), numerical_rank(d_r))
    return EigenTriplet(d_b=d_b, d_u=d_u, d_r=d_r, n_s=n_s)


def stream_gains(triplet, cfg):
    """Per-stream SNR factors alpha_i = N_b N_u N_r^2 / (sigma^2 P L) * d_b,i d_u,i d_r,i."""
    return cfg.gain_scale * triplet.products


def log_det_capacity(h, q, noise_var):
    """log2 det(I + H Q H^H / sigma^2) for one channel matrix."""
    m = h @ q @ h.conj().T / noise_var
    m = 0.5 * (m + m.conj().T)
    m[np.diag_indices_from(m)] += 1.0
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        lam = np.linalg.eigvalsh(m)
        if lam[0] <= 1e-10:
            raise NumericError(f"I + HQH^H/sigma^2 is not positive definite (min eigenvalue {lam[0]:.3e})")
        return float(np.sum(np.log2(lam)))
    return float(2.0 * np.sum(np.log(np.diag(chol).real)) / math.log(2.0))


def exact_capacity_mc(cfg, q, theta, trials, seed, steering=None, n_jobs=1, angle_ranges=None):
    """Monte-Carlo mean of log2 det(I + H Q H^H / sigma^2).

    Trial ``i`` draws a realization from ``trial_rng(seed, i)``. When
    ``steering`` is given the angles are held fixed (statistical CSI) and
    only the path gains vary.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1", key="trials")
    q = check_covariance(q, cfg.n_b)
    theta = check_theta(theta, cfg.n_r)
    if steering is not None:
        steering.check_config(cfg)
    if np.trace(q).real == 0:
        return CapacityEstimate(0.0, 0.0, trials, "exact_mc")

    def one(i):
        r = sample_realization(trial_rng(seed, i), cfg, angle_ranges)
        s = steering if steering is not None else steering_set(r, cfg)
        g_mat, t_mat = assemble_channels(r, s, cfg)
        return log_det_capacity(cascade(t_mat, theta, g_mat), q, cfg.noise_var)

    value, err = mean_and_stderr(map_trials(one, trials, n_jobs))
    return CapacityEstimate(value, err, trials, "exact_mc")


def app_summands(alpha, g_abs2, t_abs2, pairing="unordered"):
    """Per-draw value of sum_i log2(1 + alpha_i |g_i|^2 |t_i|^2).

    ``g_abs2`` is (trials, P) and ``t_abs2`` is (trials, L). Under ``sorted``
    both are sorted ascending per draw before stream i takes the i-th entry;
    ``alpha`` is expected in descending order.
    """
    if pairing not in PAIRINGS:
        raise ValidationError(f"pairing must be one of {PAIRINGS}, got {pairing!r}", key="pairing")
    alpha = np.asarray(alpha, dtype=float)
    g_abs2 = np.atleast_2d(np.asarray(g_abs2, dtype=float))
    t_abs2 = np.atleast_2d(np.asarray(t_abs2, dtype=float))
    k = alpha.shape[0]
    if g_abs2.shape[1] < k or t_abs2.shape[1] < k:
        raise DimensionError(f"need at least {k} gain samples per draw", key="gains")
    if pairing == "sorted":
        g_abs2 = np.sort(g_abs2, axis=1)
        t_abs2 = np.sort(t_abs2, axis=1)
    snr = alpha[None, :] * g_abs2[:, :k] * t_abs2[:, :k]
    return np.log1p(snr).sum(axis=1) / math.log(2.0)


_GAIN_BLOCK = 1024


def c_app_mc(cfg, triplet, trials, seed, pairing="unordered", n_jobs=1):
    """Monte-Carlo estimate of the majorization approximation C_app.

    Gains are drawn in fixed blocks of 1024 trials, block ``b`` from
    ``trial_rng(seed, b)``, so results do not depend on ``n_jobs``.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1", key="trials")
    alpha = stream_gains(triplet, cfg)
    if alpha.size == 0 or not np.any(alpha > 0):
        return CapacityEstimate(0.0, 0.0, trials, "app_mc")
    n_blocks = -(-trials // _GAIN_BLOCK)

    def block(b):
        rng = trial_rng(seed, b)
        size = min(_GAIN_BLOCK, trials - b * _GAIN_BLOCK)
        g = np.abs(complex_normal(rng, (size, cfg.p_paths))) ** 2
        t = np.abs(complex_normal(rng, (size, cfg.l_paths))) ** 2
        return app_summands(alpha, g, t, pairing)

    values = np.concatenate(map_trials(block, n_blocks, n_jobs))
    value, err = mean_and_stderr(values)
    return CapacityEstimate(value, err, trials, "app_mc")


def c_app_quadrature(triplet, cfg):
    """C_app with the gain expectation integrated numerically (no sampling)."""
    alpha = stream_gains(triplet, cfg)
    if not np.all(np.isfinite(alpha)):
        raise NumericError(f"non-finite stream gain: {alpha}")
    nats, _ = mean_log1p_exp_product(alpha)
    return CapacityEstimate(math.fsum(nats) / math.log(2.0), 0.0, 0, "app_quadrature")


def c_jen1(triplet, cfg):
    """Jensen bound with unordered gains: sum_i log2(1 + alpha_i)."""
    alpha = stream_gains(triplet, cfg)
    return CapacityEstimate(math.fsum(np.log1p(alpha)) / math.log(2.0), 0.0, 0, "jen1")


def jen2_coefficients(cfg, n_s):
    """H_i(P) H_i(L) for i = 1..n_s."""
    return harmonic_partial_sums(cfg.p_paths, n_s) * harmonic_partial_sums(cfg.l_paths, n_s)


def c_jen2(triplet, cfg):
    """Jensen approximation with ascending-ordered gains paired to descending eigenvalues."""
    alpha = stream_gains(triplet, cfg) * jen2_coefficients(cfg, triplet.n_s)
    return CapacityEstimate(math.fsum(np.log1p(alpha)) / math.log(2.0), 0.0, 0, "jen2")


def c_high_snr_upper(triplet, cfg):
    """High-SNR bound sum_i (ln(alpha_i) - 2 gamma) / ln 2.

    A stream with zero eigenvalue product yields ``-inf``; the bound is only
    meaningful when every one of the ``n_s`` streams is nonzero.
    """
    alpha = stream_gains(triplet, cfg)
    if np.any(alpha <= 0):
        warnings.warn("zero eigenvalue product: high-SNR bound is -inf", RuntimeWarning, stacklevel=2)
        return CapacityEstimate(-math.inf, 0.0, 0, "high_snr_upper")
    value = math.fsum(np.log(alpha) - 2.0 * EULER_GAMMA) / math.log(2.0)
    return CapacityEstimate(value, 0.0, 0, "high_snr_upper")
