"""Trial-level parallelism with order-independent reduction."""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def map_trials(func, n_trials, n_jobs=1):
    """Evaluate ``func(i)`` for ``i in range(n_trials)`` and return results in index order.

    Each trial owns its random stream, so the output does not depend on
    ``n_jobs``.
    """
    if n_jobs is None or n_jobs <= 1 or n_trials <= 1:
        return [func(i) for i in range(n_trials)]
    with ThreadPoolExecutor(max_workers=int(n_jobs)) as pool:
        return list(pool.map(func, range(n_trials)))


def mean_and_stderr(values):
    """Correctly rounded mean and standard error of the mean.

    ``math.fsum`` is exact up to the final rounding, so the result is
    bit-identical for any summation order.
    """
    values = np.asarray(values, dtype=float).ravel()
    n = values.size
    if n == 0:
        raise ValueError("no samples")
    mean = math.fsum(values) / n
    if n == 1 or not np.isfinite(mean):
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)
