"""Alternating maximization of the Jensen approximation over (Q, theta)."""

import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import ValidationError, check_positive_float, check_positive_int
from ..capacity import c_jen2, eigen_triplet, reflection_gram
from ..channel import random_theta
from ..config import SystemConfig
from .rcg import rcg_optimize
from .waterfill import covariance_objective, waterfill_weighted
from .weights import covariance_weights, phase_weights, weighted_log_det


@dataclass
class AoIteration:
    jen2: float
    covariance_surrogate: float
    jen2_after_covariance: float
    phase_surrogate: float
    water_level: float
    rcg_iterations: int
    rcg_status: str
    rcg_trace: list = field(repr=False, default_factory=list)


@dataclass
class AoReport:
    initial_jen2: float
    iterations: list = field(default_factory=list)
    status: str = "max_iter"
    wall_time: float = 0.0

    @property
    def jen2_trace(self):
        return [self.initial_jen2] + [it.jen2 for it in self.iterations]

    def append(self, record):
        self.iterations.append(record)


class JointOptimizer(BaseEstimator):
    """Statistical-CSI design of the transmit covariance and RIS phases.

    Starts from equal power and random phases, then alternates a
    water-filling covariance update and an RCG phase update, each maximizing
    a lower bound of C_Jen2 with the other block frozen. ``fit`` takes the
    :class:`~riscap.channel.SteeringSet` of one angle realization.

    Parameters
    ----------
    config : SystemConfig
    epsilon : float
        Stop once the relative C_Jen2 improvement of an outer iteration is
        below this value.
    max_outer : int
    tol_grad : float
        RCG stops when the Riemannian gradient norm reaches this value.
    max_rcg : int
    optimize_covariance, optimize_phases : bool
        Disable one block to get the "phases only" or "covariance only" designs.
    random_state : int or None
        Seed of the initial phases.

    Attributes
    ----------
    covariance_ : ndarray (N_b, N_b)
    theta_ : ndarray (N_r,)
    report_ : AoReport
    n_iter_ : int
    """

    def __init__(
        self,
        config=None,
        epsilon=1e-4,
        max_outer=30,
        tol_grad=1e-6,
        max_rcg=500,
        optimize_covariance=True,
        optimize_phases=True,
        random_state=None,
    ):
        self.config = config
        self.epsilon = epsilon
        self.max_outer = max_outer
        self.tol_grad = tol_grad
        self.max_rcg = max_rcg
        self.optimize_covariance = optimize_covariance
        self.optimize_phases = optimize_phases
        self.random_state = random_state

    def _validate_params(self):
        cfg = self.config if self.config is not None else SystemConfig()
        if not isinstance(cfg, SystemConfig):
            raise ValidationError("config must be a SystemConfig", key="config")
        check_positive_float(self.epsilon, "epsilon")
        check_positive_int(self.max_outer, "max_outer")
        check_positive_float(self.tol_grad, "tol_grad")
        check_positive_int(self.max_rcg, "max_rcg")
        return cfg

    def fit(self, steering, y=None, theta0=None):
        cfg = self._validate_params()
        steering.check_config(cfg)
        start = time.perf_counter()
        q = np.eye(cfg.n_b, dtype=complex) * (cfg.power_budget / cfg.n_b)
        if theta0 is None:
            theta = random_theta(np.random.default_rng(self.random_state), cfg.n_r)
        else:
            theta = np.asarray(theta0, dtype=complex).copy()
        prev = jen2_value(q, theta, steering, cfg)
        report = AoReport(initial_jen2=prev)
        for _ in range(self.max_outer):
            cov_sur, water = np.nan, np.nan
            if self.optimize_covariance:
                w_cov = covariance_weights(theta, steering, cfg)
                wf = waterfill_weighted(w_cov, steering, cfg.power_budget)
                q, water = wf.covariance, wf.water_level
                cov_sur = covariance_objective(q, w_cov, steering)
            mid = jen2_value(q, theta, steering, cfg)
            ph_sur, rcg_iters, rcg_status, rcg_trace = np.nan, 0, "skipped", []
            if self.optimize_phases:
                w_ph = phase_weights(q, steering, cfg)
                res = rcg_optimize(theta, w_ph, steering, tol_grad=self.tol_grad, max_iter=self.max_rcg)
                theta = res.theta
                rcg_iters, rcg_status, rcg_trace = res.iterations, res.status, res.trace
                x = reflection_gram(theta, steering)
                ph_sur = weighted_log_det(w_ph, x.conj().T @ x)
            cur = jen2_value(q, theta, steering, cfg)
            report.append(AoIteration(cur, cov_sur, mid, ph_sur, water, rcg_iters, rcg_status, rcg_trace))
            if cur - prev < self.epsilon * max(abs(prev), 1e-300):
                report.status = "converged"
                break
            prev = cur
        report.wall_time = time.perf_counter() - start
        self.covariance_ = q
        self.theta_ = theta
        self.report_ = report
        self.n_iter_ = len(report.iterations)
        return self

    def score(self, steering, y=None):
        """C_Jen2 of the fitted design under ``steering``."""
        cfg = self._validate_params()
        return jen2_value(self.covariance_, self.theta_, steering, cfg)


def jen2_value(q, theta, steering, cfg):
    return c_jen2(eigen_triplet(q, theta, steering), cfg).value


def alternating_optimize(cfg, steering, **opts):
    """Functional wrapper: returns ``(Q, theta, report)``."""
    theta0 = opts.pop("theta0", None)
    est = JointOptimizer(config=cfg, **opts).fit(steering, theta0=theta0)
    return est.covariance_, est.theta_, est.report_
