from .alternating import AoIteration, AoReport, JointOptimizer, alternating_optimize
from .manifold import inner, project, retract, riemannian_grad, transport
from .rcg import RcgResult, RcgState, euclidean_grad, rcg_optimize, ris_objective
from .waterfill import WaterfillResult, covariance_objective, waterfill, waterfill_powers, waterfill_weighted
from .weights import covariance_weights, det_inequality_oracle, phase_weights, stream_weights, weighted_log_det

__all__ = [
    "AoIteration", "AoReport", "JointOptimizer", "alternating_optimize",
    "inner", "project", "retract", "riemannian_grad", "transport",
    "RcgResult", "RcgState", "euclidean_grad", "rcg_optimize", "ris_objective",
    "WaterfillResult", "covariance_objective", "waterfill", "waterfill_powers", "waterfill_weighted",
    "covariance_weights", "det_inequality_oracle", "phase_weights", "stream_weights", "weighted_log_det",
]
