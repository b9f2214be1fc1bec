"""Monte Carlo toolkit for an increasing pure-jump process with a
time-varying stability index, its first-passage inverse, the time-changed
counting process, and heavy-tailed random-walk approximations of all three.
"""

__version__ = "0.1.0"

from .ctrw import (
    BernoulliWalk,
    CtrwPath,
    SlowlyVaryingFamily,
    ctrw_process,
    family_from_name,
    inverse_ctrw,
    norming_an,
    norming_bnk,
    partial_sum_path,
    sample_jnk,
    tail_function,
)
from .errors import DegenerateSampleError, HorizonExceededError
from .experiments import (
    Report,
    run_ctrw,
    run_laplace,
    run_mfpp,
    run_paths,
    run_verify,
)
from .inverse_mfpp import (
    MfppSample,
    PoissonPath,
    inverse,
    inverse_many,
    mfpp_value,
    sample_poisson_path,
)
from .ppp import (
    PointPattern,
    Truncation,
    expected_count_window,
    sample_stationary,
    sample_threshold,
    small_jump_mass,
    solve_truncation,
)
from .rng import RngStream, split
from .stability import StabilityIndex
from .stats import (
    McEstimate,
    empirical_laplace,
    increment_correlation,
    ks_critical_value,
    ks_two_sample,
    mittag_leffler,
)
from .subordinator import (
    JumpPath,
    build_path,
    eval_at,
    eval_many,
    gamma_fn,
    increment,
    laplace_transform,
)

__all__ = [
    "BernoulliWalk",
    "CtrwPath",
    "DegenerateSampleError",
    "HorizonExceededError",
    "JumpPath",
    "McEstimate",
    "MfppSample",
    "PointPattern",
    "PoissonPath",
    "Report",
    "RngStream",
    "SlowlyVaryingFamily",
    "StabilityIndex",
    "Truncation",
    "build_path",
    "ctrw_process",
    "empirical_laplace",
    "eval_at",
    "eval_many",
    "expected_count_window",
    "family_from_name",
    "gamma_fn",
    "increment",
    "increment_correlation",
    "inverse",
    "inverse_ctrw",
    "inverse_many",
    "ks_critical_value",
    "ks_two_sample",
    "laplace_transform",
    "mfpp_value",
    "mittag_leffler",
    "norming_an",
    "norming_bnk",
    "partial_sum_path",
    "run_ctrw",
    "run_laplace",
    "run_mfpp",
    "run_paths",
    "run_verify",
    "sample_jnk",
    "sample_poisson_path",
    "sample_stationary",
    "sample_threshold",
    "small_jump_mass",
    "solve_truncation",
    "split",
    "tail_function",
]
