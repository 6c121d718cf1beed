"""Error types and input checks shared across the package."""

import numpy as np


class RiscapError(Exception):
    """Base class for every error raised by riscap."""

    kind = "riscap_error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class ValidationError(RiscapError, ValueError):
    kind = "validation_error"

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

    def to_dict(self):
        out = super().to_dict()
        if self.key is not None:
            out["key"] = self.key
        return out


class DimensionError(ValidationError):
    """Operands whose shapes do not conform; ``key`` names the operand."""

    kind = "dimension_error"


class NumericError(RiscapError, ArithmeticError):
    kind = "numeric_error"


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {value!r}", key=name)
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}", key=name)
    return int(value)


def check_positive_float(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise ValidationError(f"{name} must be a number, got {value!r}", key=name)
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be finite and > 0, got {value}", key=name)
    return value


def check_matrix(a, shape, name):
    """Return ``a`` as a complex 2-D array of the given shape."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape != tuple(shape):
        raise DimensionError(f"{name} has shape {a.shape}, expected {tuple(shape)}", key=name)
    return a.astype(complex, copy=False)


def check_theta(theta, n_r=None, atol=1e-10):
    """Validate a unit-modulus reflection vector."""
    theta = np.asarray(theta, dtype=complex)
    if theta.ndim != 1:
        raise DimensionError(f"theta must be 1-D, got shape {theta.shape}", key="theta")
    if n_r is not None and theta.shape[0] != n_r:
        raise DimensionError(f"theta has length {theta.shape[0]}, expected {n_r}", key="theta")
    dev = np.max(np.abs(np.abs(theta) - 1.0)) if theta.size else 0.0
    if not dev <= atol:
        raise ValidationError(f"theta is not unit-modulus (max deviation {dev:.3e})", key="theta")
    return theta


def check_covariance(q, n_b, power_budget=None, atol=1e-10):
    """Validate a Hermitian PSD transmit covariance with optional trace budget."""
    q = check_matrix(q, (n_b, n_b), "q")
    scale = max(1.0, float(np.max(np.abs(q)))) if q.size else 1.0
    herm_err = np.max(np.abs(q - q.conj().T)) if q.size else 0.0
    if herm_err > atol * scale:
        raise ValidationError(f"q is not Hermitian (max asymmetry {herm_err:.3e})", key="q")
    sym = 0.5 * (q + q.conj().T)
    try:
        # Cholesky of the shifted matrix succeeds iff min eigenvalue > -shift; far cheaper than eigvalsh
        np.linalg.cholesky(sym + (atol * scale) * np.eye(n_b))
    except np.linalg.LinAlgError:
        lam_min = np.linalg.eigvalsh(sym)[0]
        raise ValidationError(f"q is not PSD (min eigenvalue {lam_min:.3e})", key="q") from None
    if power_budget is not None:
        tr = float(np.trace(q).real)
        if tr > power_budget + 1e-8 * max(1.0, power_budget):
            raise ValidationError(f"trace(q)={tr:.6g} exceeds power budget {power_budget:.6g}", key="q")
    return q
