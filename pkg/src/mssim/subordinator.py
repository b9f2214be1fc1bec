"""The increasing pure-jump process built from a point pattern, and its
closed-form Laplace transform used as the Monte Carlo oracle."""

from dataclasses import dataclass
import math

import numpy as np

from .quadrature import integrate


@dataclass(frozen=True)
class JumpPath:
    """A truncated path on [0, T]: sorted jump times, sizes, prefix sums.

    ``prefix[i]`` is the path value at ``times[i]``; the path is a
    right-continuous step function that is 0 before the first jump.
    """

    times: np.ndarray
    sizes: np.ndarray
    prefix: np.ndarray
    horizon: float

    @property
    def total(self):
        return float(self.prefix[-1]) if len(self.prefix) else 0.0


def build_path(pattern):
    """Sort a point pattern by time and accumulate prefix sums.

    Coincident times (a probability-zero event that floating point can
    still produce) are merged into one jump carrying the summed size, so
    times stay strictly increasing and binary search is well defined.
    Summation order is fixed ascending in time for reproducibility.
    """
    order = np.argsort(pattern.times, kind="stable")
    t = np.asarray(pattern.times, dtype=float)[order]
    s = np.asarray(pattern.sizes, dtype=float)[order]
    if len(t) > 1 and (np.diff(t) == 0.0).any():
        t, inverse = np.unique(t, return_inverse=True)
        s = np.bincount(inverse, weights=s)
    return JumpPath(t, s, np.cumsum(s), pattern.horizon)


def _check_time(path, t):
    if not np.isfinite(t) or t < 0 or t > path.horizon * (1.0 + 1e-12):
        raise ValueError(f"t must lie in [0, horizon={path.horizon}], got {t}")
    return min(float(t), path.horizon)


def eval_at(path, t):
    """Path value at time t: the prefix sum at the last jump time <= t."""
    t = _check_time(path, t)
    i = np.searchsorted(path.times, t, side="right")
    return 0.0 if i == 0 else float(path.prefix[i - 1])


def eval_many(path, ts):
    """Vectorized ``eval_at``."""
    ts = np.asarray(ts, dtype=float)
    if len(ts) and (ts.min() < 0 or ts.max() > path.horizon * (1.0 + 1e-12)):
        raise ValueError(f"times must lie in [0, horizon={path.horizon}]")
    idx = np.searchsorted(path.times, np.minimum(ts, path.horizon), side="right")
    padded = np.concatenate(([0.0], path.prefix))
    return padded[idx]


def increment(path, t, h):
    """The non-negative increment over (t, t+h]."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    return eval_at(path, t + h) - eval_at(path, t)


def gamma_fn(z):
    """Gamma(z) for z > 0; feeds Gamma(1 - beta(s)) in the Laplace exponent."""
    if not np.isfinite(z) or z <= 0:
        raise ValueError(f"gamma_fn requires z > 0, got {z}")
    return math.gamma(z)


def laplace_transform(idx, theta, t):
    """E[exp(-theta * D(t))] = exp(-int_0^t Gamma(1-beta(s)) theta**beta(s) ds).

    For constant beta this reduces to exp(-Gamma(1-beta) * t * theta**beta),
    the transform of the one-index stable subordinator."""
    if theta < 0:
        raise ValueError(f"theta must be non-negative, got {theta}")
    if not (0 <= t <= idx.horizon * (1.0 + 1e-12)):
        raise ValueError(f"t must lie in [0, horizon={idx.horizon}], got {t}")
    if theta == 0.0 or t == 0.0:
        return 1.0
    exponent = integrate(
        lambda s: gamma_fn(1.0 - idx.evaluate(s)) * theta ** idx.evaluate(s), 0.0, t
    )
    return math.exp(-exponent)
