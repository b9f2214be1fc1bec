"""Tests for the truncated point-process samplers and their mass accounting."""

import math

import numpy as np
import pytest

from mssim import (
    RngStream,
    StabilityIndex,
    Truncation,
    expected_count_window,
    ks_critical_value,
    ks_two_sample,
    sample_stationary,
    sample_threshold,
    small_jump_mass,
    solve_truncation,
)

IDX_HALF = StabilityIndex.from_spec("constant:0.5", 1.0)
IDX_AFFINE = StabilityIndex.from_spec("affine:0.4,0.2", 1.0)

# chi-square 1% critical values by degrees of freedom
CHI2_99 = {9: 21.666}


def test_zero_window_gives_empty_pattern():
    pat = sample_stationary(RngStream(1, 0), 0.0, 100.0, IDX_HALF)
    assert len(pat.times) == 0 and len(pat.sizes) == 0


def test_stationary_pattern_invariants():
    pat = sample_stationary(RngStream(2, 0), 1.0, 100.0, IDX_HALF)
    assert ((pat.times >= 0) & (pat.times <= 1.0)).all()
    assert (pat.sizes >= 100.0 ** (-1.0 / 0.5)).all()  # x >= M**(-1/beta)


def test_stationary_mean_count():
    counts = [
        len(sample_stationary(RngStream(3, rep), 1.0, 100.0, IDX_HALF).times)
        for rep in range(10_000)
    ]
    assert abs(np.mean(counts) - 100.0) <= 3.0 * math.sqrt(100.0 / 10_000)


def test_threshold_pattern_invariants():
    pat = sample_threshold(RngStream(4, 0), 1.0, 0.01, IDX_AFFINE)
    assert ((pat.times >= 0) & (pat.times <= 1.0)).all()
    assert (pat.sizes >= 0.01).all()


def test_threshold_rejects_eps_at_or_above_one():
    with pytest.raises(ValueError):
        sample_threshold(RngStream(4, 0), 1.0, 1.0, IDX_HALF)


def test_threshold_intensity_constant_index():
    # Lambda = eps**(-beta) * T = 10 for constant beta = 0.5, eps = 0.01
    trunc = Truncation("threshold", 0.01)
    assert expected_count_window(IDX_HALF, 0.0, 1.0, trunc) == pytest.approx(10.0, abs=1e-9)


def test_threshold_intensity_affine_index_closed_form():
    # int_0^1 eps**-(0.4+0.2s) ds with eps=0.01:
    # antiderivative of exp((0.4+0.2s) ln 100) gives
    # (100**0.6 - 100**0.4) / (0.2 * ln 100)
    closed = (100.0**0.6 - 100.0**0.4) / (0.2 * math.log(100.0))
    assert closed == pytest.approx(10.357226871695, abs=1e-9)
    trunc = Truncation("threshold", 0.01)
    assert expected_count_window(IDX_AFFINE, 0.0, 1.0, trunc) == pytest.approx(closed, abs=1e-9)


def test_threshold_conditional_size_tail():
    # given beta = 0.5, P(x > 0.16) = (0.16/0.01)**-0.5 = 0.25
    pat = sample_threshold(RngStream(5, 0), 1.0, 0.01, IDX_HALF)
    reps = 1
    sizes = [pat.sizes]
    while sum(len(s) for s in sizes) < 200_000:
        sizes.append(sample_threshold(RngStream(5, reps), 1.0, 0.01, IDX_HALF).sizes)
        reps += 1
    sizes = np.concatenate(sizes)
    p = float((sizes > 0.16).mean())
    se = math.sqrt(0.25 * 0.75 / len(sizes))
    assert abs(p - 0.25) <= 4.0 * se


def test_small_jump_mass_examples():
    assert small_jump_mass(IDX_HALF, 1.0, Truncation("threshold", 0.01)) == pytest.approx(
        0.1, abs=1e-9
    )
    assert small_jump_mass(IDX_HALF, 1.0, Truncation("stationary", 100.0)) == pytest.approx(
        0.01, abs=1e-9
    )
    assert small_jump_mass(IDX_AFFINE, 0.0, Truncation("threshold", 0.01)) == 0.0


def test_solve_truncation_meets_budget():
    m = solve_truncation(IDX_HALF, 1.0, "stationary", 1e-3)
    assert m == pytest.approx(1000.0, rel=1e-6)  # mass = 1/M for beta = 0.5
    eps = solve_truncation(IDX_HALF, 1.0, "threshold", 1e-3)
    assert eps == pytest.approx(1e-6, rel=1e-6)  # mass = sqrt(eps)
    for mode, p in (("stationary", m), ("threshold", eps)):
        assert small_jump_mass(IDX_HALF, 1.0, Truncation(mode, p)) <= 1e-3 * (1 + 1e-9)
    m2 = solve_truncation(IDX_AFFINE, 1.0, "stationary", 1e-3)
    assert small_jump_mass(IDX_AFFINE, 1.0, Truncation("stationary", m2)) <= 1e-3 * (1 + 1e-9)


def test_sampler_equivalence_ks():
    n = 2000
    m = solve_truncation(IDX_HALF, 1.0, "stationary", 1e-3)
    eps = solve_truncation(IDX_HALF, 1.0, "threshold", 1e-3)
    a = np.array(
        [sample_stationary(RngStream(6, r), 1.0, m, IDX_HALF).sizes.sum() for r in range(n)]
    )
    b = np.array(
        [sample_threshold(RngStream(7, r), 1.0, eps, IDX_HALF).sizes.sum() for r in range(n)]
    )
    assert ks_two_sample(a, b) < ks_critical_value(n, n, 0.01)


def test_point_count_law_chi_square():
    # counts of jumps with size in [0.01, 0.04) on [0, 1] are Poisson with
    # mean 0.01**-0.5 - 0.04**-0.5 = 5
    reps = 10_000
    mean = 5.0
    counts = np.array([
        int((sample_threshold(RngStream(8, r), 1.0, 0.01, IDX_HALF).sizes < 0.04).sum())
        for r in range(reps)
    ])
    cells = 10  # 0..8 and >= 9
    observed = np.array([(counts == k).sum() for k in range(cells - 1)] + [(counts >= cells - 1).sum()])
    pmf = np.array([math.exp(-mean) * mean**k / math.factorial(k) for k in range(cells - 1)])
    expect = np.append(pmf, 1.0 - pmf.sum()) * reps
    stat = float(((observed - expect) ** 2 / expect).sum())
    assert stat < CHI2_99[cells - 1]
