"""Exact configuration counts and stationary marginal distributions.

The counts are the sizes of the admissible configuration sets of the two
models; the stationary marginal of the balance at any single vertex is a
ratio of such counts.  Everything exists in two flavors:

* an exact path on Python big integers / ``Fraction`` masses, and
* a log-space path (log-gamma binomials, compensated log-sum-exp) for
  instances where the counts are astronomically large.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .errors import CapacityError

INDIVIDUAL = "individual"
COLLECTIVE = "collective"

#: consecutive all-small outer terms before the log-space double sum stops.
#: The summand profile in the outer index is unimodal, so once this many
#: consecutive indices contribute nothing the remainder cannot either.
_STALL_LIMIT = 400

#: terms more than this far (in nats) below the running maximum are dropped.
_LSE_WINDOW = 46.0


def binom_ext(n: int, k: int) -> int:
    """Binomial coefficient extended to negative arguments.

    Standard ``C(n, k)`` for ``0 <= k <= n``; ``C(-1, -1) = 1``; zero when
    ``n < k`` or ``k < 0 <= n``.  Remaining negative cases (which never
    occur in the counting sums) also return zero.
    """
    if 0 <= k <= n:
        return math.comb(n, k)
    if n == -1 and k == -1:
        return 1
    return 0


def count_states_individual(n: int, money: int, limit: int) -> int:
    """Number of configurations of ``n`` agents with total ``money`` and
    every balance at least ``-limit``."""
    return binom_ext(money + limit * n + n - 1, n - 1)


def count_states_collective(n: int, money: int, limit: int) -> int:
    """Number of configurations of ``n`` agents with total ``money`` and
    total outstanding debt at most ``limit``.

    The inner index runs over ``b <= min(a, n)`` (not ``n - 1``): with a
    negative ``money`` argument, as produced by the marginal numerators,
    the configuration with every agent in debt is admissible and lives in
    the ``b = n`` corner.
    """
    if limit < 0:
        return 0
    total = 0
    for a in range(limit + 1):
        for b in range(min(a, n) + 1):
            total += (
                binom_ext(n, b)
                * binom_ext(a - 1, b - 1)
                * binom_ext(money + a + n - b - 1, n - b - 1)
            )
    return total


def count_states_collective_full(n: int, money: int, limit: int) -> int:
    """Slow reference: the same double sum with the inner index over the
    full range ``0..n``, relying on the conventions to kill dead terms."""
    if limit < 0:
        return 0
    return sum(
        binom_ext(n, b)
        * binom_ext(a - 1, b - 1)
        * binom_ext(money + a + n - b - 1, n - b - 1)
        for a in range(limit + 1)
        for b in range(n + 1)
    )


def support_window(kind: str, n: int, money: int, limit: int) -> tuple[int, int]:
    """Support of the single-vertex stationary marginal."""
    if kind == INDIVIDUAL:
        return -limit, money + limit * (n - 1)
    if kind == COLLECTIVE:
        return -limit, money + limit
    raise ValueError(f"unknown model kind {kind!r}")


@dataclass
class ExactPMF:
    """Probability mass function on an integer support window.

    ``mode == "exact"`` stores one ``Fraction`` per support point and the
    masses sum to exactly 1.  ``mode == "log"`` stores natural-log masses
    (``-inf`` marks far-tail points skipped by the cutoff).
    """

    support_lo: int
    support_hi: int
    mode: str
    params: dict
    masses: list = field(repr=False, default=None)
    log_masses: np.ndarray = field(repr=False, default=None)

    def support(self) -> range:
        return range(self.support_lo, self.support_hi + 1)

    def mass(self, c: int):
        """Mass at ``c`` (``Fraction`` in exact mode, float otherwise);
        zero outside the support window."""
        if not self.support_lo <= c <= self.support_hi:
            return Fraction(0) if self.mode == "exact" else 0.0
        i = c - self.support_lo
        if self.mode == "exact":
            return self.masses[i]
        return float(np.exp(self.log_masses[i]))

    def log_mass(self, c: int) -> float:
        if not self.support_lo <= c <= self.support_hi:
            return -math.inf
        i = c - self.support_lo
        if self.mode == "exact":
            m = self.masses[i]
            return math.log(m) if m > 0 else -math.inf
        return float(self.log_masses[i])

    def probs(self) -> np.ndarray:
        """Masses as a float array over the support window."""
        if self.mode == "exact":
            return np.array([float(m) for m in self.masses])
        return np.exp(self.log_masses)

    def total(self):
        """Sum of masses (exactly, or via log-sum-exp in log mode)."""
        if self.mode == "exact":
            return sum(self.masses, Fraction(0))
        finite = self.log_masses[np.isfinite(self.log_masses)]
        if finite.size == 0:
            return 0.0
        m = finite.max()
        return float(np.exp(m) * np.exp(finite - m).sum())

    def to_csv(self, path) -> None:
        header = "c,log_prob" if self.mode == "log" else "c,prob"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for c in self.support():
                if self.mode == "log":
                    fh.write(f"{c},{self.log_mass(c):.17g}\n")
                else:
                    fh.write(f"{c},{float(self.mass(c)):.17g}\n")

    def to_json(self, path) -> None:
        payload = {
            "params": self.params,
            "mode": self.mode,
            "support_lo": self.support_lo,
            "support_hi": self.support_hi,
            "probs": [float(p) for p in self.probs()],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def load_pmf_csv(path) -> tuple[int, np.ndarray]:
    """Read a pmf CSV (``c,prob`` or ``c,log_prob``); returns the support
    minimum and the probability array over a contiguous window."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header[:1] != ["c"] or len(header) != 2 or header[1] not in ("prob", "log_prob"):
        raise ValueError(f"unrecognized pmf CSV header {header!r}")
    cs = np.array([int(r[0]) for r in rows])
    vals = np.array([float(r[1]) for r in rows])
    if not np.array_equal(cs, np.arange(cs[0], cs[0] + cs.size)):
        raise ValueError("pmf CSV support is not a contiguous integer window")
    probs = np.exp(vals) if header[1] == "log_prob" else vals
    return int(cs[0]), probs


def stationary_marginal_individual(n: int, money: int, limit: int) -> ExactPMF:
    """Exact single-vertex marginal for the individual-debt-limit model."""
    if n < 2:
        raise ValueError("need at least 2 agents")
    lo, hi = support_window(INDIVIDUAL, n, money, limit)
    den = count_states_individual(n, money, limit)
    masses = [
        Fraction(count_states_individual(n - 1, money - c, limit), den)
        for c in range(lo, hi + 1)
    ]
    assert sum(masses, Fraction(0)) == 1
    return ExactPMF(
        support_lo=lo,
        support_hi=hi,
        mode="exact",
        params={"kind": INDIVIDUAL, "n": n, "money": money, "limit": limit},
        masses=masses,
    )


def stationary_marginal_collective(n: int, money: int, limit: int) -> ExactPMF:
    """Exact single-vertex marginal for the collective-debt-limit model.

    The numerator counts the configurations of the other ``n - 1`` agents;
    their available debt capacity is ``limit`` when the tagged vertex is
    not in debt and ``limit + c`` when it borrowed ``-c`` coins.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    lo, hi = support_window(COLLECTIVE, n, money, limit)
    den = count_states_collective(n, money, limit)
    masses = []
    for c in range(lo, hi + 1):
        cap = limit if c >= 0 else limit + c
        masses.append(Fraction(count_states_collective(n - 1, money - c, cap), den))
    assert sum(masses, Fraction(0)) == 1
    return ExactPMF(
        support_lo=lo,
        support_hi=hi,
        mode="exact",
        params={"kind": COLLECTIVE, "n": n, "money": money, "limit": limit},
        masses=masses,
    )


# ---------------------------------------------------------------------------
# log-space path
# ---------------------------------------------------------------------------


def lgfact_table(nmax: int) -> np.ndarray:
    """Table of ``log(k!)`` for ``k = 0..nmax``."""
    return np.array([math.lgamma(k + 1.0) for k in range(nmax + 1)])


def log_count_individual(n: int, money: int, limit: int, lg: np.ndarray | None = None) -> float:
    top = money + limit * n + n - 1
    k = n - 1
    if not 0 <= k <= top:
        return 0.0 if (top == -1 and k == -1) else -math.inf
    if lg is not None and top < lg.size:
        return float(lg[top] - lg[k] - lg[top - k])
    return math.lgamma(top + 1) - math.lgamma(k + 1) - math.lgamma(top - k + 1)


@njit
def _log_count_collective_kernel(lg, n, money, limit):
    best = -1.0e300
    acc = 0.0
    stalled = 0
    for a in range(limit + 1):
        block_best = -1.0e300
        bmax = min(a, n)
        for b in range(bmax + 1):
            if b == 0:
                if a != 0:
                    continue
                t2 = 0.0
            else:
                t2 = lg[a - 1] - lg[b - 1] - lg[a - b]
            n3 = money + a + n - b - 1
            k3 = n - b - 1
            if k3 < 0:
                if n3 == -1 and k3 == -1:
                    t3 = 0.0
                else:
                    continue
            elif n3 < k3 or n3 < 0:
                continue
            else:
                t3 = lg[n3] - lg[k3] - lg[n3 - k3]
            t = lg[n] - lg[b] - lg[n - b] + t2 + t3
            if t > block_best:
                block_best = t
            elif t < block_best - _LSE_WINDOW:
                # the summand is unimodal in the inner index too; once it
                # falls this far below the block peak it never recovers
                break
            if t > best:
                acc = acc * np.exp(best - t) + 1.0
                best = t
            elif t > best - _LSE_WINDOW:
                acc += np.exp(t - best)
        if block_best < best - _LSE_WINDOW:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                break
        else:
            stalled = 0
    if best < -1.0e299:
        return -np.inf
    return best + np.log(acc)


def log_count_collective(n: int, money: int, limit: int, lg: np.ndarray | None = None) -> float:
    """Log of the collective-model configuration count via a compensated
    log-sum-exp over the double sum."""
    if limit < 0:
        return -math.inf
    if lg is None:
        lg = lgfact_table(max(money, 0) + limit + n + 2)
    return float(_log_count_collective_kernel(lg, n, money, limit))


def log_marginal(kind: str, n: int, money: int, limit: int, c: int) -> float:
    """Log stationary mass at a single support point ``c``."""
    lo, hi = support_window(kind, n, money, limit)
    if not lo <= c <= hi:
        return -math.inf
    lg = lgfact_table(money + limit * max(n, 2) + n + 2)
    if kind == INDIVIDUAL:
        num = log_count_individual(n - 1, money - c, limit, lg)
        den = log_count_individual(n, money, limit, lg)
    else:
        cap = limit if c >= 0 else limit + c
        num = log_count_collective(n - 1, money - c, cap, lg)
        den = log_count_collective(n, money, limit, lg)
    return num - den


def stationary_marginal_individual_log(n: int, money: int, limit: int) -> ExactPMF:
    """Log-space single-vertex marginal for the individual model."""
    if n < 2:
        raise ValueError("need at least 2 agents")
    lo, hi = support_window(INDIVIDUAL, n, money, limit)
    lg = lgfact_table(money + limit * n + n + 2)
    den = log_count_individual(n, money, limit, lg)
    cs = np.arange(lo, hi + 1)
    vals = np.empty(cs.size)
    for i, c in enumerate(cs):
        vals[i] = log_count_individual(n - 1, money - int(c), limit, lg) - den
    return ExactPMF(
        support_lo=lo,
        support_hi=hi,
        mode="log",
        params={"kind": INDIVIDUAL, "n": n, "money": money, "limit": limit},
        log_masses=vals,
    )


def stationary_marginal_collective_log(
    n: int, money: int, limit: int, tail_cutoff: float | None = -30.0
) -> ExactPMF:
    """Log-space single-vertex marginal for the collective model.

    ``tail_cutoff`` stops the expensive right-tail scan once the log mass
    drops below the cutoff while decreasing; skipped points are stored as
    ``-inf``.  At the default cutoff the neglected mass is below 1e-9.
    Pass ``None`` to force the full support.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    lo, hi = support_window(COLLECTIVE, n, money, limit)
    lg = lgfact_table(money + 2 * limit + n + 2)
    den = log_count_collective(n, money, limit, lg)
    vals = np.full(hi - lo + 1, -np.inf)
    # left branch: debt capacity for the others shrinks with the tagged debt
    prev = math.inf
    for c in range(0, lo - 1, -1):
        v = log_count_collective(n - 1, money - c, limit + c, lg) - den
        vals[c - lo] = v
        if tail_cutoff is not None and v < tail_cutoff and v <= prev:
            break
        prev = v
    # right branch
    prev = math.inf
    for c in range(1, hi + 1):
        v = log_count_collective(n - 1, money - c, limit, lg) - den
        vals[c - lo] = v
        if tail_cutoff is not None and v < tail_cutoff and v <= prev:
            break
        prev = v
    return ExactPMF(
        support_lo=lo,
        support_hi=hi,
        mode="log",
        params={"kind": COLLECTIVE, "n": n, "money": money, "limit": limit},
        log_masses=vals,
    )


def exact_mode_cost(kind: str, n: int, money: int, limit: int) -> int:
    """Rough big-integer term count for the exact marginal (practicality cap)."""
    lo, hi = support_window(kind, n, money, limit)
    width = hi - lo + 1
    if kind == INDIVIDUAL:
        return width
    return width * (limit + 1) * (min(limit, n) + 1) // 2


#: refuse exact-mode marginals beyond this many big-integer terms.
EXACT_MODE_CAP = 200_000_000


def stationary_marginal(kind: str, n: int, money: int, limit: int, mode: str = "exact", **kw) -> ExactPMF:
    """Dispatch to the exact or log-space marginal."""
    if mode == "exact":
        if exact_mode_cost(kind, n, money, limit) > EXACT_MODE_CAP:
            raise CapacityError(
                "instance too large for the exact big-integer path; use log mode"
            )
        if kind == INDIVIDUAL:
            return stationary_marginal_individual(n, money, limit)
        return stationary_marginal_collective(n, money, limit)
    if mode == "log":
        if kind == INDIVIDUAL:
            return stationary_marginal_individual_log(n, money, limit)
        return stationary_marginal_collective_log(n, money, limit, **kw)
    raise ValueError(f"unknown mode {mode!r}")
