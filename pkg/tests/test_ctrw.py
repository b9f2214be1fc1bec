"""Tests for the triangular-array scheme: summands, normings, partial sums,
their inverse, and the composed counting walk."""

import math

import numpy as np
import pytest

from mssim import (
    BernoulliWalk,
    CtrwPath,
    HorizonExceededError,
    RngStream,
    StabilityIndex,
    ctrw_process,
    family_from_name,
    inverse_ctrw,
    norming_an,
    norming_bnk,
    partial_sum_path,
    sample_jnk,
    tail_function,
)
from mssim.ctrw import LOG, UNIT

IDX_HALF = StabilityIndex.from_spec("constant:0.5", 1.0)


class FixedStream:
    """A stand-in stream replaying prescribed uniforms."""

    def __init__(self, values):
        self._vals = list(values)

    def uniform(self, size=None):
        if size is None:
            return self._vals.pop(0)
        return np.array([self._vals.pop(0) for _ in range(int(size))])


def test_family_parsing():
    assert family_from_name("unit") is not None
    assert family_from_name("log").kind == "log"
    with pytest.raises(ValueError):
        family_from_name("poly")


def test_sample_jnk_unit_inverse_transform():
    # U = 0.25, beta = 0.5 -> 0.25**-2 = 16
    assert sample_jnk(FixedStream([0.25]), 2, 1, IDX_HALF, UNIT) == pytest.approx(16.0)
    # U -> 1- approaches the support start 1
    assert sample_jnk(FixedStream([1.0 - 1e-12]), 2, 1, IDX_HALF, UNIT) == pytest.approx(
        1.0, abs=1e-9
    )


def test_sample_jnk_log_inverts_the_tail():
    # beta = beta_sup = 0.5: the drawn point must satisfy
    # t**-0.5 * max(1, ln t) = U on the decreasing branch
    u = 0.1
    t = sample_jnk(FixedStream([u]), 2, 1, IDX_HALF, LOG)
    assert t > math.exp(2.0)  # beyond the kink
    assert t**-0.5 * math.log(t) == pytest.approx(u, abs=1e-9)


def test_tail_function_unit():
    vals = tail_function(np.array([1.0, 4.0, 16.0]), 0.5, 0.5, UNIT)
    assert vals.tolist() == [1.0, 0.5, 0.25]


def test_norming_an_unit_closed_form():
    assert norming_an(16, UNIT, 0.8) == pytest.approx(32.0, rel=1e-12)
    assert norming_an(100, UNIT, 0.5) == pytest.approx(10_000.0, rel=1e-12)
    with pytest.raises(ValueError):
        norming_an(0, UNIT, 0.5)
    with pytest.raises(ValueError):
        norming_an(10, UNIT, 1.0)


def test_norming_an_log_residual():
    a = norming_an(100, LOG, 0.5)
    assert abs(a**-0.5 * math.log(a) - 0.01) <= 1e-12
    a_big = norming_an(10**6, LOG, 0.5)
    assert abs(a_big**-0.5 * math.log(a_big) - 1e-6) <= 1e-12 * 1e-6 * 10


def test_norming_bnk():
    assert norming_bnk(32.0, 0.5, 0.8) == pytest.approx(256.0, rel=1e-12)
    assert norming_bnk(17.3, 0.7, 0.7) == 17.3  # exponent exactly 1
    assert norming_bnk(1.0, 0.3, 0.8) == 1.0
    with pytest.raises(ValueError):
        norming_bnk(-1.0, 0.5, 0.5)


def test_partial_sum_path_basics():
    path = partial_sum_path(RngStream(1, 0), 1, 1.0, IDX_HALF, UNIT)
    assert path.grid[0] == 0.0
    # n=1: a_1 = 1, b_11 = 1, so S_1(1) = J_11 >= 1
    assert path.grid[1] >= 1.0
    path = partial_sum_path(RngStream(1, 1), 50, 1.0, IDX_HALF, UNIT)
    assert len(path.grid) == 51
    assert (np.diff(path.grid) > 0).all()
    assert path.horizon == pytest.approx(1.0)


def test_inverse_ctrw_examples():
    path = CtrwPath(2, np.array([0.0, 1.0, 3.0]), IDX_HALF, UNIT)
    assert inverse_ctrw(path, 0.5) == 0.5
    assert inverse_ctrw(path, 3.0) == 1.0
    assert inverse_ctrw(path, 0.0) == 0.0
    with pytest.raises(HorizonExceededError):
        inverse_ctrw(path, 3.5)


def test_inverse_ctrw_monotone_in_level():
    path = partial_sum_path(RngStream(2, 0), 200, 1.0, IDX_HALF, UNIT)
    levels = np.linspace(0.0, path.grid[-1], 100)
    vals = [inverse_ctrw(path, float(r)) for r in levels]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_tail_normalization_identity():
    # n * P(b**-1 J > 1) = 1 for unit L, constant beta = 0.5, n = 100
    n, draws = 100, 200_000
    bound = norming_bnk(norming_an(n, UNIT, 0.5), 0.5, 0.5)
    u = RngStream(3, 0).uniform(draws)
    j = u ** (-1.0 / 0.5)
    p = float((j > bound).mean())
    se = n * math.sqrt(p * (1.0 - p) / draws)
    assert abs(n * p - 1.0) <= 3.0 * se


def test_bernoulli_walk_examples():
    assert BernoulliWalk(RngStream(4, 0), 0.5).value(0.7) == 0
    assert BernoulliWalk(RngStream(4, 0), 1.0).value(5.7) == 5
    with pytest.raises(ValueError):
        BernoulliWalk(RngStream(4, 0), 0.0)
    with pytest.raises(ValueError):
        BernoulliWalk(RngStream(4, 0), 0.5).value(-1.0)


def test_bernoulli_walk_mean():
    t, p, reps = 10_000, 0.3, 1000
    vals = [BernoulliWalk(RngStream(5, r), p).value(t) for r in range(reps)]
    se = math.sqrt(t * p * (1 - p) / reps)
    assert abs(np.mean(vals) - 3000.0) <= 3.0 * se


def test_bernoulli_walk_lazy_extension_is_consistent():
    w1 = BernoulliWalk(RngStream(6, 0), 0.4)
    total = w1.value(200)
    w2 = BernoulliWalk(RngStream(6, 0), 0.4)
    assert w2.value(50) <= total
    assert w2.value(200) == total  # same stream, same steps, any query order


def test_ctrw_process_requires_distinct_streams():
    with pytest.raises(ValueError):
        ctrw_process(RngStream(7, 1), RngStream(7, 1), 10, 0.5, 1.0, 0.5, IDX_HALF, UNIT)


def test_ctrw_process_degenerate_walk():
    # p_n = 1 makes the walk deterministic: floor(lambda * E_n(t))
    path = partial_sum_path(RngStream(8, 0), 20, 1.0, IDX_HALF, UNIT)
    e = inverse_ctrw(path, 0.7)
    got = ctrw_process(RngStream(8, 0), RngStream(9, 0), 20, 1.0, 1.0, 0.7, IDX_HALF, UNIT)
    assert got == int(math.floor(e + 1e-12))
    assert ctrw_process(RngStream(8, 1), RngStream(9, 1), 20, 0.5, 1.0, 0.0, IDX_HALF, UNIT) == 0
