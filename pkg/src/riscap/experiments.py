"""Seeded experiment runner: sweeps, approximation checks, optimization runs, figure presets."""

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ._validation import RiscapError, ValidationError
from .capacity import (
    app_summands,
    c_app_quadrature,
    c_high_snr_upper,
    c_jen1,
    c_jen2,
    eigen_triplet,
    log_det_capacity,
    stream_gains,
)
from .channel import assemble_channels, cascade, random_theta, sample_realization, steering_set, trial_rng
from .config import SystemConfig
from .optimize import JointOptimizer
from .parallel import map_trials

log = logging.getLogger(__name__)

QUANTITIES = ("exact_mc", "app_mc", "app_quadrature", "jen1", "jen2", "high_snr_upper")
MODES = ("validate", "sweep", "upper_bound", "optimize")
AXES = ("none", "snr_db", "n_b", "n_r", "n_u")
VARIANTS = ("joint", "q_only", "ris_only")
OPTIMIZE_QUANTITIES = ("exact_mc", "jen2")
DEFAULT_QUANTITIES = {
    "validate": QUANTITIES,
    "sweep": QUANTITIES,
    "upper_bound": ("exact_mc", "high_snr_upper"),
    "optimize": OPTIMIZE_QUANTITIES,
}
SIG_DIGITS = 10


@dataclass(frozen=True)
class OptimizerOptions:
    epsilon: float = 1e-4
    max_outer: int = 30
    tol_grad: float = 1e-6
    max_rcg: int = 500


@dataclass(frozen=True)
class Sweep:
    axis: str = "none"
    values: tuple = ()


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a run depends on; the output is a pure function of this object."""

    base: SystemConfig = field(default_factory=SystemConfig)
    sweep: Sweep = field(default_factory=Sweep)
    trials: int = 1000
    master_seed: int = 0
    mode: str = "validate"
    quantities: tuple = ()
    pairing: str = "unordered"
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    variants: tuple = ("joint",)
    convergence_trace: bool = False
    record_wall_time: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}", key="mode")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError(f"trials must be an integer >= 1, got {self.trials!r}", key="trials")
        if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ValidationError("master_seed must be an integer in [0, 2^64)", key="master_seed")
        if self.sweep.axis not in AXES:
            raise ValidationError(f"sweep.axis must be one of {AXES}, got {self.sweep.axis!r}", key="sweep.axis")
        if self.sweep.axis == "none" and self.sweep.values:
            raise ValidationError("sweep.values must be empty when sweep.axis is 'none'", key="sweep.values")
        if self.sweep.axis != "none" and not self.sweep.values:
            raise ValidationError("sweep.values must be non-empty", key="sweep.values")
        for v in self.sweep.values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"sweep value {v!r} is not a finite number", key="sweep.values")
            if self.sweep.axis != "snr_db" and (v <= 0 or v != int(v)):
                raise ValidationError(f"sweep value {v!r} must be a positive integer", key="sweep.values")
        allowed = OPTIMIZE_QUANTITIES if self.mode == "optimize" else QUANTITIES
        quantities = tuple(self.quantities) or DEFAULT_QUANTITIES[self.mode]
        bad = [q for q in quantities if q not in allowed]
        if bad:
            raise ValidationError(f"quantities {bad} not available in mode {self.mode!r}; choose from {allowed}", key="quantities")
        object.__setattr__(self, "quantities", quantities)
        if self.pairing not in ("unordered", "sorted"):
            raise ValidationError("pairing must be 'unordered' or 'sorted'", key="pairing")
        if not self.variants or any(v not in VARIANTS for v in self.variants):
            raise ValidationError(f"variants must be a non-empty subset of {VARIANTS}", key="variants")
        if len(set(self.variants)) != len(self.variants):
            raise ValidationError("variants must not repeat", key="variants")
        for v in self.sweep.values:
            config_for(self, v)

    def to_dict(self):
        d = asdict(self)
        d["sweep"]["values"] = list(self.sweep.values)
        d["quantities"] = list(self.quantities)
        d["variants"] = list(self.variants)
        return d


# ---------------------------------------------------------------- parsing

_SECTIONS = {"base": SystemConfig, "sweep": Sweep, "optimizer": OptimizerOptions}
_TYPES = {
    "trials": int, "master_seed": int, "mode": str, "quantities": list, "pairing": str,
    "variants": list, "convergence_trace": bool, "record_wall_time": bool,
}
_SECTION_TYPES = {
    "base": {f.name: (float if f.type is float else int) for f in fields(SystemConfig)} | {"snr_db": float},
    "sweep": {"axis": str, "values": list},
    "optimizer": {"epsilon": float, "max_outer": int, "tol_grad": float, "max_rcg": int},
}


def _type_name(t):
    return {int: "integer", float: "number", str: "string", bool: "boolean", list: "array", dict: "object"}[t]


def _check_type(value, expected, key):
    ok = isinstance(value, expected) and not (expected in (int, float) and isinstance(value, bool))
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        ok = True
    if not ok:
        raise ValidationError(f"{key}: expected {_type_name(expected)}, got {type(value).__name__}", key=key)


def spec_from_dict(doc):
    """Build and validate an :class:`ExperimentSpec` from a decoded JSON object."""
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object", key="$")
    kwargs = {}
    for key, value in doc.items():
        if key in _SECTIONS:
            _check_type(value, dict, key)
            types = _SECTION_TYPES[key]
            for sub, sub_value in value.items():
                if sub not in types:
                    raise ValidationError(f"unknown key {key}.{sub}", key=f"{key}.{sub}")
                _check_type(sub_value, types[sub], f"{key}.{sub}")
            sec = dict(value)
            if key == "base":
                snr = sec.pop("snr_db", None)
                if snr is not None and "power_budget" in sec:
                    raise ValidationError("give base.snr_db or base.power_budget, not both", key="base.snr_db")
                try:
                    cfg = SystemConfig(**sec)
                except ValidationError as exc:
                    raise ValidationError(str(exc), key=f"base.{exc.key}") from exc
                kwargs[key] = cfg.with_snr_db(snr) if snr is not None else cfg
            elif key == "sweep":
                kwargs[key] = Sweep(axis=sec.get("axis", "none"), values=tuple(sec.get("values", ())))
            else:
                kwargs[key] = OptimizerOptions(**sec)
        elif key in _TYPES:
            _check_type(value, _TYPES[key], key)
            kwargs[key] = tuple(value) if isinstance(value, list) else value
        else:
            raise ValidationError(f"unknown key {key}", key=key)
    opt = kwargs.get("optimizer", OptimizerOptions())
    for name in ("epsilon", "tol_grad"):
        if not getattr(opt, name) > 0:
            raise ValidationError(f"optimizer.{name} must be > 0", key=f"optimizer.{name}")
    for name in ("max_outer", "max_rcg"):
        if getattr(opt, name) < 1:
            raise ValidationError(f"optimizer.{name} must be >= 1", key=f"optimizer.{name}")
    return ExperimentSpec(**kwargs)


def parse_config(path):
    """Read a JSON experiment file; missing keys take their defaults."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", key="$") from exc
    return spec_from_dict(doc)


def serialize(spec):
    """Canonical JSON text of ``spec``; parsing it back gives an equal spec."""
    return json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- running

def config_for(spec, value):
    """System configuration at one sweep point."""
    cfg = spec.base
    axis = spec.sweep.axis
    if axis == "none":
        return cfg
    if axis == "snr_db":
        return cfg.with_snr_db(float(value))
    n = int(value)
    if axis == "n_b":
        return cfg.replace(n_b=n)
    if axis == "n_u":
        return cfg.replace(n_u=n)
    # the RIS keeps its row count and grows along the other dimension
    if n % cfg.n_r_y:
        raise ValidationError(f"n_r={n} is not a multiple of base.n_r_y={cfg.n_r_y}", key="sweep.values")
    return cfg.replace(n_r_z=n // cfg.n_r_y)


def sweep_points(spec):
    return list(spec.sweep.values) if spec.sweep.axis != "none" else [None]


def _equal_power(cfg):
    return np.eye(cfg.n_b, dtype=complex) * (cfg.power_budget / cfg.n_b)


def _analysis_trial(spec, cfg, seed, k):
    rng = trial_rng(seed, k)
    r = sample_realization(rng, cfg)
    theta = random_theta(rng, cfg.n_r)
    s = steering_set(r, cfg)
    q = _equal_power(cfg)
    tri = eigen_triplet(q, theta, s)
    out = {}
    for name in spec.quantities:
        if name == "exact_mc":
            g_mat, t_mat = assemble_channels(r, s, cfg)
            out[name] = log_det_capacity(cascade(t_mat, theta, g_mat), q, cfg.noise_var)
        elif name == "app_mc":
            alpha = stream_gains(tri, cfg)
            g2 = np.abs(r.gains_g)[None, :] ** 2
            t2 = np.abs(r.gains_t)[None, :] ** 2
            out[name] = float(app_summands(alpha, g2, t2, spec.pairing)[0])
        elif name == "app_quadrature":
            out[name] = c_app_quadrature(tri, cfg).value
        elif name == "jen1":
            out[name] = c_jen1(tri, cfg).value
        elif name == "jen2":
            out[name] = c_jen2(tri, cfg).value
        elif name == "high_snr_upper":
            out[name] = c_high_snr_upper(tri, cfg).value
    return out


def _variant_flags(variant):
    return {"joint": (True, True), "q_only": (True, False), "ris_only": (False, True)}[variant]


def _optimize_trial(spec, cfg, seed, k):
    rng = trial_rng(seed, k)
    r = sample_realization(rng, cfg)
    theta0 = random_theta(rng, cfg.n_r)
    s = steering_set(r, cfg)
    g_mat, t_mat = assemble_channels(r, s, cfg)
    q0 = _equal_power(cfg)
    base_tri = eigen_triplet(q0, theta0, s)
    out = {
        "baseline_exact_mc": log_det_capacity(cascade(t_mat, theta0, g_mat), q0, cfg.noise_var),
        "baseline_jen2": c_jen2(base_tri, cfg).value,
    }
    traces = {}
    o = spec.optimizer
    for variant in spec.variants:
        do_q, do_ris = _variant_flags(variant)
        est = JointOptimizer(
            config=cfg, epsilon=o.epsilon, max_outer=o.max_outer, tol_grad=o.tol_grad, max_rcg=o.max_rcg,
            optimize_covariance=do_q, optimize_phases=do_ris,
        ).fit(s, theta0=theta0)
        # the optimizer never saw the path gains of this realization
        if "exact_mc" in spec.quantities:
            h = cascade(t_mat, est.theta_, g_mat)
            out[f"{variant}_exact_mc"] = log_det_capacity(h, est.covariance_, cfg.noise_var)
        if "jen2" in spec.quantities:
            out[f"{variant}_jen2"] = est.report_.jen2_trace[-1]
        out[f"{variant}_outer_iterations"] = float(est.n_iter_)
        out[f"{variant}_wall_time"] = est.report_.wall_time
        traces[variant] = est.report_.jen2_trace
    return out, traces


def _reduce(samples):
    """Mean and standard error; order-independent via fsum."""
    vals = np.asarray(samples, dtype=float)
    if np.any(np.isneginf(vals)):
        return -math.inf, math.nan
    n = vals.size
    mean = math.fsum(vals) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((vals - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def _analysis_columns(spec):
    cols = []
    for q in spec.quantities:
        cols += [q, f"{q}_std_err"]
    return cols


def _optimize_columns(spec):
    cols = ["baseline_exact_mc", "baseline_exact_mc_std_err", "baseline_jen2", "baseline_jen2_std_err"]
    for v in spec.variants:
        for q in spec.quantities:
            cols += [f"{v}_{q}", f"{v}_{q}_std_err"]
        cols.append(f"{v}_outer_iterations")
        if spec.record_wall_time:
            cols.append(f"{v}_wall_time")
    return cols


def columns(spec):
    """Column order of every row produced by :func:`run_experiment`."""
    if spec.mode == "optimize" and spec.convergence_trace:
        return ["sweep_axis", "sweep_value", "iteration"] + [f"{v}_jen2" for v in spec.variants]
    lead = ["sweep_axis", "sweep_value"]
    return lead + (_optimize_columns(spec) if spec.mode == "optimize" else _analysis_columns(spec))


def _point_rows(spec, value, per_trial, traces):
    axis = spec.sweep.axis
    head = {"sweep_axis": axis, "sweep_value": value if value is not None else ""}
    if spec.mode == "optimize" and spec.convergence_trace:
        length = max(len(t[v]) for t in traces for v in spec.variants)
        rows = []
        for i in range(length):
            row = dict(head, iteration=i)
            for v in spec.variants:
                # a converged run keeps its final value
                row[f"{v}_jen2"] = math.fsum(t[v][min(i, len(t[v]) - 1)] for t in traces) / len(traces)
            rows.append(row)
        return rows
    row = dict(head)
    for col in columns(spec)[2:]:
        if col.endswith("_std_err"):
            continue
        samples = [t[col] for t in per_trial]
        mean, err = _reduce(samples)
        row[col] = mean
        if f"{col}_std_err" in columns(spec):
            row[f"{col}_std_err"] = err
    return [row]


def run_experiment(spec, n_jobs=1):
    """Evaluate ``spec`` and return a list of row dicts keyed by :func:`columns`.

    Trial ``k`` of every sweep point draws its angles, path gains and random
    phases from ``trial_rng(master_seed, k)``, so sweep points share angle
    realizations and the output does not depend on ``n_jobs``.
    """
    if not isinstance(spec, ExperimentSpec):
        raise ValidationError("spec must be an ExperimentSpec", key="spec")
    rows = []
    for value in sweep_points(spec):
        cfg = config_for(spec, value)
        t0 = time.perf_counter()
        if spec.mode == "optimize":
            results = map_trials(lambda k: _optimize_trial(spec, cfg, spec.master_seed, k), spec.trials, n_jobs)
            per_trial = [r[0] for r in results]
            traces = [r[1] for r in results]
        else:
            per_trial = map_trials(lambda k: _analysis_trial(spec, cfg, spec.master_seed, k), spec.trials, n_jobs)
            traces = []
        rows += _point_rows(spec, value, per_trial, traces)
        log.info("%s=%s done in %.2fs", spec.sweep.axis, value, time.perf_counter() - t0)
    return rows


# ---------------------------------------------------------------- output

def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{SIG_DIGITS}g}"


def _json_value(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    v = float(value)
    if not math.isfinite(v):
        # JSON has no inf/nan literals; mark divergence with the CSV spelling
        return _fmt(v)
    return float(_fmt(v))


def render(rows, fmt, cols=None):
    """Text of ``rows`` as CSV or JSON. ``cols`` fixes the header when ``rows`` is empty."""
    if fmt not in ("csv", "json"):
        raise ValidationError(f"format must be 'csv' or 'json', got {fmt!r}", key="format")
    if cols is None:
        cols = list(rows[0]) if rows else []
    if fmt == "json":
        payload = [{c: _json_value(r[c]) for c in cols} for r in rows]
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def emit(rows, fmt, path, cols=None):
    """Write ``rows`` to ``path`` (``-`` for standard output)."""
    text = render(rows, fmt, cols)
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise RiscapError(f"cannot write {path}: {exc.strerror}") from exc


# ---------------------------------------------------------------- presets

_ARRAY_SIZES = (10, 20, 40, 80, 160, 320, 640)
_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


def _fig_array_sweep(mode, quantities):
    base = SystemConfig(n_b=10, n_r_y=10, n_r_z=1, n_u=10, p_paths=6, l_paths=6).with_snr_db(50.0)
    return [
        ExperimentSpec(base=base, sweep=Sweep(axis, _ARRAY_SIZES), mode=mode, quantities=quantities)
        for axis in ("n_b", "n_r", "n_u")
    ]


def _fig_variants(n_b):
    return [
        ExperimentSpec(
            base=SystemConfig(n_b=n_b),
            sweep=Sweep("snr_db", _SNR_GRID),
            trials=100,
            mode="optimize",
            variants=VARIANTS,
        )
    ]


PRESETS = {
    "fig2": lambda: [ExperimentSpec(sweep=Sweep("snr_db", _SNR_GRID), mode="sweep")],
    "fig3": lambda: [
        ExperimentSpec(
            base=SystemConfig(p_paths=4, l_paths=4),
            sweep=Sweep("snr_db", (0.0, 10.0, 20.0, 30.0, 40.0, 50.0)),
            mode="upper_bound",
        )
    ],
    "fig4": lambda: _fig_array_sweep("upper_bound", ("high_snr_upper",)),
    "fig5": lambda: [ExperimentSpec(base=SystemConfig().with_snr_db(10.0), trials=100, mode="optimize", convergence_trace=True)],
    "fig6": lambda: [ExperimentSpec(sweep=Sweep("snr_db", _SNR_GRID), trials=100, mode="optimize")],
    "fig7": lambda: _fig_variants(16),
    "fig8": lambda: _fig_variants(32),
    "fig9": lambda: _fig_variants(64),
    "fig10": lambda: [
        replace(s, trials=20) for s in _fig_array_sweep("optimize", ("exact_mc",))
    ],
}
"""Figure-analogue experiments. Array sweeps start every dimension at 10 and
grow one of them, the RIS as a 10-row grid. Optimization presets default to
100 trials; override with ``--trials``."""


def preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}", key="preset") from None


def run_many(specs, n_jobs=1):
    """Run specs in order; they must share a column layout."""
    cols = columns(specs[0])
    rows = []
    for s in specs:
        if columns(s) != cols:
            raise ValidationError("specs in one run must share their column layout", key="spec")
        rows += run_experiment(s, n_jobs)
    return rows, cols
