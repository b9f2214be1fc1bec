"""Right-continuous inverse of the jump path, the homogeneous Poisson
process, and their composition into the time-changed counting process."""

from dataclasses import dataclass

import numpy as np

from .errors import HorizonExceededError


@dataclass(frozen=True)
class PoissonPath:
    """Arrival times of a rate-lambda homogeneous Poisson process on [0, H]."""

    arrivals: np.ndarray
    rate: float
    horizon: float


@dataclass(frozen=True)
class MfppSample:
    """One realization of the time-changed process: a jump path for the
    operational clock plus an independent arrival path."""

    d_path: object  # JumpPath
    n_path: PoissonPath


def sample_poisson_path(stream, rate, horizon):
    """Arrivals as cumulative sums of Exp(rate) gaps, truncated at ``horizon``."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon}")
    if horizon == 0:
        return PoissonPath(np.empty(0), float(rate), 0.0)
    mean = rate * horizon
    block = max(16, int(mean + 6.0 * np.sqrt(mean) + 10))
    arrivals = np.cumsum(stream.exponential(rate, block))
    while arrivals[-1] <= horizon:
        more = np.cumsum(stream.exponential(rate, block)) + arrivals[-1]
        arrivals = np.concatenate((arrivals, more))
    return PoissonPath(arrivals[arrivals <= horizon], float(rate), float(horizon))


def inverse(path, r):
    """E(r) = inf{t : D(t) >= r}, the first jump time whose prefix sum reaches r.

    ``inverse(0) = 0`` by convention (the infimum over {t : D(t) >= 0}).
    Levels above the accumulated mass raise HorizonExceededError: the caller
    must enlarge the simulation horizon, clamping would bias the law."""
    if not np.isfinite(r) or r < 0:
        raise ValueError(f"level r must be finite and non-negative, got {r}")
    if r == 0.0:
        return 0.0
    if len(path.prefix) == 0 or r > path.prefix[-1]:
        raise HorizonExceededError(
            f"level {r} exceeds accumulated mass {path.total} on [0, {path.horizon}]"
        )
    i = np.searchsorted(path.prefix, r, side="left")
    return float(path.times[i])


def inverse_many(path, rs):
    """Vectorized ``inverse`` for non-decreasing work over many levels."""
    rs = np.asarray(rs, dtype=float)
    if len(rs) == 0:
        return np.empty(0)
    if rs.min() < 0:
        raise ValueError("levels must be non-negative")
    top = path.prefix[-1] if len(path.prefix) else 0.0
    if rs.max() > top:
        raise HorizonExceededError(
            f"level {rs.max()} exceeds accumulated mass {top} on [0, {path.horizon}]"
        )
    idx = np.searchsorted(path.prefix, rs, side="left")
    out = path.times[np.minimum(idx, len(path.times) - 1)] if len(path.times) else rs * 0.0
    return np.where(rs == 0.0, 0.0, out)


def mfpp_value(sample, t):
    """X(t) = number of arrivals at or before the operational time E(t)."""
    e = inverse(sample.d_path, t)
    if e > sample.n_path.horizon * (1.0 + 1e-12):
        raise HorizonExceededError(
            f"operational time {e} exceeds arrival-path horizon {sample.n_path.horizon}"
        )
    return int(np.searchsorted(sample.n_path.arrivals, e, side="right"))
