"""Empirical estimation from simulation output.

Histograms pool balances across vertices (the stationary marginal is the
same at every vertex, so pooling multiplies the sample count by ``n``).
Confidence intervals use batch means to absorb the Markov autocorrelation
of a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import MoneyState, SimulationReport
from .errors import InsufficientDataError, InvalidStateError
from .exact import ExactPMF

_Z95 = 1.959963984540054

SIGN_LABELS = ("-", "0", "+")


@dataclass
class Histogram:
    """Unit-width integer-bin histogram."""

    offset: int
    counts: np.ndarray
    total: int

    @classmethod
    def empty(cls, lo: int, hi: int) -> "Histogram":
        return cls(offset=lo, counts=np.zeros(hi - lo + 1, dtype=np.int64), total=0)

    @classmethod
    def from_report(cls, report: SimulationReport) -> "Histogram":
        return cls(
            offset=report.hist_offset,
            counts=report.hist_counts.copy(),
            total=report.hist_total,
        )

    def accumulate(self, state: MoneyState) -> "Histogram":
        """Add one count per vertex at that vertex's current balance."""
        idx = state.balances - self.offset
        if (idx < 0).any() or (idx >= self.counts.size).any():
            raise InvalidStateError("balance outside the histogram window")
        self.counts += np.bincount(idx, minlength=self.counts.size)
        self.total += state.balances.size
        return self

    def merge(self, other: "Histogram") -> "Histogram":
        """Associative merge; supports may differ."""
        lo = min(self.offset, other.offset)
        hi = max(self.offset + self.counts.size, other.offset + other.counts.size)
        counts = np.zeros(hi - lo, dtype=np.int64)
        counts[self.offset - lo : self.offset - lo + self.counts.size] += self.counts
        counts[other.offset - lo : other.offset - lo + other.counts.size] += other.counts
        return Histogram(offset=lo, counts=counts, total=self.total + other.total)

    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise InsufficientDataError("empty histogram")
        return self.counts / self.total


def _as_dist(obj) -> tuple[int, np.ndarray]:
    if isinstance(obj, Histogram):
        return obj.offset, obj.frequencies()
    if isinstance(obj, ExactPMF):
        return obj.support_lo, obj.probs()
    offset, probs = obj
    return int(offset), np.asarray(probs, dtype=float)


def tv_distance(p, q) -> float:
    """Total variation distance, half the L1 distance over the union of
    the two supports.  Accepts ``Histogram``, ``ExactPMF`` or
    ``(offset, probs)`` pairs."""
    off_p, pp = _as_dist(p)
    off_q, qq = _as_dist(q)
    lo = min(off_p, off_q)
    hi = max(off_p + pp.size, off_q + qq.size)
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[off_p - lo : off_p - lo + pp.size] = pp
    b[off_q - lo : off_q - lo + qq.size] = qq
    return 0.5 * float(np.abs(a - b).sum())


def chi_square_statistic(hist: Histogram, pmf) -> float:
    """Chi-square goodness-of-fit statistic against expected frequencies
    (secondary metric; unstable in near-empty tails)."""
    off_q, probs = _as_dist(pmf)
    expected = probs * hist.total
    stat = 0.0
    for i, count in enumerate(hist.counts):
        c = hist.offset + i
        j = c - off_q
        e = expected[j] if 0 <= j < expected.size else 0.0
        if e > 0:
            stat += (count - e) ** 2 / e
        elif count:
            stat = math.inf
    return stat


@dataclass
class DriftEstimate:
    """Conditional bank-increment statistics (bank nonempty)."""

    mean_increment: float
    ci_halfwidth: float
    zero_prob: float
    zero_ci_halfwidth: float
    sample_count: int


def _batch_mean_ci(values: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    keep = weights > 0
    means = values[keep] / weights[keep]
    nb = means.size
    if nb < 2:
        raise InsufficientDataError("need at least 2 nonempty batches")
    mean = float(np.average(means, weights=weights[keep]))
    spread = float(means.std(ddof=1))
    return mean, _Z95 * spread / math.sqrt(nb)


def drift_estimate(report: SimulationReport) -> DriftEstimate:
    """Mean bank increment and zero-balance-giver probability, both
    conditioned on a nonempty bank, with batch-means 95% intervals."""
    if report.drift_batch_counts is None:
        raise InsufficientDataError("not a collective-model report")
    counts = report.drift_batch_counts
    total = int(counts.sum())
    if total == 0 or (counts > 0).sum() < 2:
        raise InsufficientDataError("bank was never (or almost never) positive")
    mean, ci = _batch_mean_ci(report.drift_batch_sums.astype(float), counts.astype(float))
    zp, zci = _batch_mean_ci(report.zero_batch_counts.astype(float), counts.astype(float))
    return DriftEstimate(
        mean_increment=mean,
        ci_halfwidth=ci,
        zero_prob=zp,
        zero_ci_halfwidth=zci,
        sample_count=total,
    )


@dataclass
class SymmetryResult:
    """Largest directional asymmetry among the interaction-sign pairs."""

    statistic: float
    worst_pair: tuple[str, str]
    within_5_sigma: bool


def interaction_symmetry(tally: np.ndarray) -> SymmetryResult:
    """Max over unordered sign pairs of the frequency difference between
    the two orientations, flagged against 5-sigma binomial noise."""
    total = int(tally.sum())
    if total == 0:
        raise InsufficientDataError("empty interaction tally")
    worst = (SIGN_LABELS[0], SIGN_LABELS[0])
    stat = 0.0
    ok = True
    for i in range(3):
        for j in range(i + 1, 3):
            diff = abs(int(tally[i, j]) - int(tally[j, i])) / total
            sigma = math.sqrt((int(tally[i, j]) + int(tally[j, i]))) / total
            if diff > stat:
                stat = diff
                worst = (SIGN_LABELS[i], SIGN_LABELS[j])
            if diff > 5 * sigma and sigma > 0:
                ok = False
            if diff > 0 and sigma == 0:
                ok = False
    return SymmetryResult(statistic=stat, worst_pair=worst, within_5_sigma=ok)


@dataclass
class BankCurve:
    """Bank trajectory rescaled by its initial value."""

    steps: np.ndarray
    values: np.ndarray
    late_average: float


def bank_depletion_curve(report: SimulationReport) -> BankCurve:
    """Downsampled ``bank / limit`` trajectory; the summary is the time
    average over the last half of the run."""
    if report.bank_curve_values is None:
        raise InsufficientDataError("not a collective-model report")
    if report.limit == 0:
        raise InsufficientDataError("collective limit is zero; curve undefined")
    values = report.bank_curve_values / report.limit
    half = values.size // 2
    return BankCurve(
        steps=report.bank_curve_steps,
        values=values,
        late_average=float(values[half:].mean()),
    )
