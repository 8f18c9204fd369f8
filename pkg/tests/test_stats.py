import numpy as np
import pytest

from coinflow.dynamics import ModelParams, MoneyState, simulate
from coinflow.errors import InsufficientDataError, InvalidStateError
from coinflow.exact import stationary_marginal
from coinflow.graph import build_named
from coinflow.stats import (
    Histogram,
    bank_depletion_curve,
    chi_square_statistic,
    drift_estimate,
    interaction_symmetry,
    tv_distance,
)


def test_accumulate_pooled():
    h = Histogram.empty(0, 5)
    h.accumulate(MoneyState(np.array([3, 3, 2, 2])))
    assert h.counts[2] == 2 and h.counts[3] == 2
    assert h.total == 4
    h.accumulate(MoneyState(np.array([0, 1, 2, 3])))
    assert h.total == 8


def test_accumulate_rejects_out_of_window():
    h = Histogram.empty(0, 3)
    with pytest.raises(InvalidStateError):
        h.accumulate(MoneyState(np.array([5, 0])))


def test_merge_equals_concatenated():
    a = Histogram.empty(-1, 3).accumulate(MoneyState(np.array([0, 2])))
    b = Histogram.empty(0, 5).accumulate(MoneyState(np.array([4, 4])))
    merged = a.merge(b)
    both = Histogram.empty(-1, 5)
    both.accumulate(MoneyState(np.array([0, 2])))
    both.accumulate(MoneyState(np.array([4, 4])))
    assert merged.offset == both.offset
    assert np.array_equal(merged.counts, both.counts)
    assert merged.total == both.total


def test_tv_identical_zero():
    pmf = stationary_marginal("individual", 3, 2, 1)
    assert tv_distance(pmf, pmf) == 0.0


def test_tv_disjoint_one():
    assert tv_distance((0, [1.0]), (5, [1.0])) == 1.0


def test_tv_half():
    assert tv_distance((0, [1.0, 0.0]), (0, [0.5, 0.5])) == 0.5


def test_chi_square_zero_on_expected():
    pmf = stationary_marginal("individual", 2, 2, 0)
    probs = pmf.probs()
    h = Histogram(offset=pmf.support_lo, counts=(probs * 300).astype(np.int64), total=300)
    assert chi_square_statistic(h, pmf) < 1e-20


def test_chi_square_infinite_outside_support():
    h = Histogram(offset=10, counts=np.array([5]), total=5)
    pmf = stationary_marginal("individual", 2, 2, 0)
    assert chi_square_statistic(h, pmf) == float("inf")


def test_drift_estimate_on_run():
    g = build_named("complete", 6)
    p = ModelParams(kind="collective", money=12, limit=5)
    rep = simulate(g, p, seed=21, burn_in=5000, samples=400_000)
    d = drift_estimate(rep)
    assert d.ci_halfwidth >= 0
    assert d.mean_increment + d.ci_halfwidth < 0
    assert abs(d.mean_increment + d.zero_prob) < d.ci_halfwidth + d.zero_ci_halfwidth


def test_drift_zero_limit_insufficient():
    g = build_named("complete", 4)
    p = ModelParams(kind="collective", money=6, limit=0)
    rep = simulate(g, p, seed=1, burn_in=100, samples=10_000)
    with pytest.raises(InsufficientDataError):
        drift_estimate(rep)


def test_drift_rejects_individual_report():
    g = build_named("complete", 4)
    p = ModelParams(kind="individual", money=6, limit=1)
    rep = simulate(g, p, seed=1, burn_in=100, samples=1000)
    with pytest.raises(InsufficientDataError):
        drift_estimate(rep)


def test_interaction_symmetry_symmetric_tally():
    tally = np.array([[4, 7, 2], [7, 1, 9], [2, 9, 3]], dtype=np.int64)
    r = interaction_symmetry(tally)
    assert r.statistic == 0.0


def test_interaction_symmetry_hand_example():
    # p(+,-) = 0.3 versus p(-,+) = 0.1; sample size large enough that
    # the 0.2 gap is far outside binomial noise
    tally = np.zeros((3, 3), dtype=np.int64)
    tally[2, 0] = 3000
    tally[0, 2] = 1000
    tally[1, 1] = 6000
    r = interaction_symmetry(tally)
    assert abs(r.statistic - 0.2) < 1e-15
    assert r.worst_pair == ("-", "+")
    assert not r.within_5_sigma


def test_interaction_symmetry_empty():
    with pytest.raises(InsufficientDataError):
        interaction_symmetry(np.zeros((3, 3), dtype=np.int64))


def test_bank_curve_starts_full():
    g = build_named("complete", 5)
    p = ModelParams(kind="collective", money=10, limit=4)
    rep = simulate(g, p, seed=13, burn_in=1000, samples=100_000)
    curve = bank_depletion_curve(rep)
    assert rep.bank_curve_steps[0] == 0
    assert curve.values[0] == 1.0
    assert 0.0 <= curve.late_average <= 1.0


def test_bank_curve_zero_limit_undefined():
    g = build_named("complete", 4)
    p = ModelParams(kind="collective", money=6, limit=0)
    rep = simulate(g, p, seed=1, burn_in=0, samples=1000)
    with pytest.raises(InsufficientDataError):
        bank_depletion_curve(rep)


def test_tv_decreases_with_sample_count():
    g = build_named("complete", 8)
    p = ModelParams(kind="individual", money=16, limit=1)
    pmf = stationary_marginal("individual", 8, 16, 1)
    small = simulate(g, p, seed=6, burn_in=20_000, samples=20_000)
    large = simulate(g, p, seed=6, burn_in=20_000, samples=2_000_000)
    tv_small = tv_distance(Histogram.from_report(small), pmf)
    tv_large = tv_distance(Histogram.from_report(large), pmf)
    assert tv_large < tv_small


def test_merge_consistency_of_tv():
    # TV of merged replicas equals TV of the pooled histogram
    g = build_named("complete", 5)
    p = ModelParams(kind="individual", money=10, limit=1)
    r1 = simulate(g, p, seed=100, burn_in=5000, samples=50_000)
    r2 = simulate(g, p, seed=101, burn_in=5000, samples=50_000)
    merged = Histogram.from_report(r1).merge(Histogram.from_report(r2))
    pooled_counts = np.zeros_like(merged.counts)
    lo = merged.offset
    for r in (r1, r2):
        pooled_counts[r.hist_offset - lo : r.hist_offset - lo + r.hist_counts.size] += (
            r.hist_counts
        )
    assert np.array_equal(merged.counts, pooled_counts)
    assert merged.total == r1.hist_total + r2.hist_total
