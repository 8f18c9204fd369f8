"""Single-step update maps and the discrete-time simulation loop.

Each step draws a directed edge ``(x, y)`` uniformly and tries to move one
coin from ``x`` to ``y``.  In the individual model the move is blocked
when ``x`` sits at its debt floor; in the collective model ``x`` borrows
from the central bank when broke (if the bank has coins) and ``y`` repays
the bank when in debt.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import CapacityError, InvalidStateError, InvariantBreachError
from .exact import COLLECTIVE, INDIVIDUAL, support_window
from .graph import GraphTopology

RNG_ALGORITHM = "pcg64"

#: largest admissible magnitude scale; keeps every count exact in 64-bit.
MAX_SCALE = 1 << 40

#: step-counter guard.
MAX_STEPS = 1 << 62

_CHUNK = 1 << 20


@dataclass(frozen=True)
class ModelParams:
    """Model kind, total money among agents, and debt limit."""

    kind: str
    money: int
    limit: int

    def __post_init__(self):
        if self.kind not in (INDIVIDUAL, COLLECTIVE):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.money < 0 or self.limit < 0:
            raise ValueError("money and limit must be nonnegative")

    def temperature(self, n: int) -> Fraction:
        """Average coins per agent."""
        return Fraction(self.money, n)

    def validate_scale(self, n: int) -> None:
        if self.money + n * self.limit > MAX_SCALE:
            raise CapacityError("money + n * limit exceeds the exact-count cap")


@dataclass
class MoneyState:
    """Integer balance per vertex, plus the bank balance for the
    collective model (``None`` for the individual model)."""

    balances: np.ndarray
    bank: int | None = None

    def total(self) -> int:
        return int(self.balances.sum())

    def total_debt(self) -> int:
        neg = self.balances[self.balances < 0]
        return int(-neg.sum())

    def copy(self) -> "MoneyState":
        return MoneyState(self.balances.copy(), self.bank)


def validate_state(state: MoneyState, params: ModelParams) -> None:
    if state.total() != params.money:
        raise InvalidStateError(
            f"balances sum to {state.total()}, expected {params.money}"
        )
    if params.kind == INDIVIDUAL:
        if state.bank is not None:
            raise InvalidStateError("individual model has no bank")
        if (state.balances < -params.limit).any():
            raise InvalidStateError("balance below the individual debt floor")
    else:
        if state.bank is None:
            raise InvalidStateError("collective model needs a bank balance")
        if state.bank < 0:
            raise InvalidStateError("bank balance is negative")
        if state.bank + state.total_debt() != params.limit:
            raise InvalidStateError(
                "bank plus outstanding debt must equal the collective limit"
            )


def initial_state(g: GraphTopology, params: ModelParams, policy: str = "even") -> MoneyState:
    """Starting configuration with no agent in debt.

    ``even`` splits the money as evenly as integers allow; ``all_on_one``
    piles everything on vertex 0.  The collective bank starts full.
    """
    bal = np.zeros(g.n, dtype=np.int64)
    if policy == "even":
        q, r = divmod(params.money, g.n)
        bal[:] = q
        bal[:r] += 1
    elif policy == "all_on_one":
        bal[0] = params.money
    else:
        raise ValueError(f"unknown policy {policy!r}")
    bank = params.limit if params.kind == COLLECTIVE else None
    state = MoneyState(bal, bank)
    validate_state(state, params)
    return state


def step_individual(state: MoneyState, x: int, y: int, limit: int) -> MoneyState:
    """One coin from ``x`` to ``y`` unless ``x`` is at the debt floor."""
    out = state.copy()
    if out.balances[x] > -limit:
        out.balances[x] -= 1
        out.balances[y] += 1
    return out


def step_collective(state: MoneyState, x: int, y: int) -> MoneyState:
    """One coin from ``x`` (or the bank, if ``x`` is broke) to ``y``,
    with ``y`` repaying the bank when in debt."""
    out = state.copy()
    vx = int(out.balances[x])
    vy = int(out.balances[y])
    if max(vx, out.bank) > 0:
        out.balances[x] -= 1
        out.balances[y] += 1
        if vx <= 0 and vy >= 0:
            out.bank -= 1
        elif vx > 0 and vy < 0:
            out.bank += 1
    return out


def classify_interaction(state: MoneyState, x: int, y: int) -> tuple[int, int]:
    """Pre-step sign pair ``(sign(balance(x)), sign(balance(y)))``."""
    return int(np.sign(state.balances[x])), int(np.sign(state.balances[y]))


# ---------------------------------------------------------------------------
# state snapshots
# ---------------------------------------------------------------------------


def dump_state(state: MoneyState, params: ModelParams, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{state.balances.size} {params.money} {params.limit} {params.kind}\n")
        for v in state.balances:
            fh.write(f"{int(v)}\n")
        if params.kind == COLLECTIVE:
            fh.write(f"bank {state.bank}\n")


def load_state(path) -> tuple[MoneyState, ModelParams]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        n_s, m_s, l_s, kind = lines[0].split()
        n, money, limit = int(n_s), int(m_s), int(l_s)
        bal = np.array([int(v) for v in lines[1 : 1 + n]], dtype=np.int64)
        bank = None
        if kind == COLLECTIVE:
            tag, v = lines[1 + n].split()
            if tag != "bank":
                raise ValueError("missing bank line")
            bank = int(v)
    except (ValueError, IndexError) as exc:
        raise InvalidStateError(f"malformed state snapshot: {exc}") from exc
    if bal.size != n:
        raise InvalidStateError("balance count does not match header")
    params = ModelParams(kind=kind, money=money, limit=limit)
    state = MoneyState(bal, bank)
    validate_state(state, params)
    return state, params


# ---------------------------------------------------------------------------
# simulation loop
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class SimulationReport:
    """Everything recorded by one trajectory."""

    kind: str
    n: int
    money: int
    limit: int
    seed: int
    burn_in: int
    samples: int
    thinning: int
    rng_algorithm: str
    hist_offset: int
    hist_counts: np.ndarray
    hist_total: int
    final_state: MoneyState
    tally: np.ndarray | None = None
    drift_batch_sums: np.ndarray | None = None
    drift_batch_counts: np.ndarray | None = None
    zero_batch_counts: np.ndarray | None = None
    bank_curve_steps: np.ndarray | None = None
    bank_curve_values: np.ndarray | None = None
    wall_time: float = field(default=0.0)

    def __eq__(self, other):
        if not isinstance(other, SimulationReport):
            return NotImplemented

        def same(a, b):
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                return a is not None and b is not None and np.array_equal(a, b)
            return a == b

        scalars = (
            "kind n money limit seed burn_in samples thinning "
            "rng_algorithm hist_offset hist_total"
        ).split()
        arrays = (
            "hist_counts tally drift_batch_sums drift_batch_counts "
            "zero_batch_counts bank_curve_steps bank_curve_values"
        ).split()
        if any(getattr(self, f) != getattr(other, f) for f in scalars):
            return False
        if not np.array_equal(self.final_state.balances, other.final_state.balances):
            return False
        if self.final_state.bank != other.final_state.bank:
            return False
        return all(same(getattr(self, f), getattr(other, f)) for f in arrays)


def default_burn_in(g: GraphTopology, params: ModelParams) -> int:
    """Heuristic: 20 sweeps of the directed edges per unit of scale."""
    t = params.temperature(g.n)
    return int(20 * g.num_directed_edges * (int(t) + params.limit + 1))


def simulate(
    g: GraphTopology,
    params: ModelParams,
    seed: int,
    burn_in: int | None = None,
    samples: int = 0,
    thinning: int = 1,
    policy: str = "even",
    start: MoneyState | None = None,
    bank_curve_points: int = 2048,
    drift_batches: int = 100,
) -> SimulationReport:
    """Run one trajectory and collect pooled-histogram and bank statistics.

    Runs ``burn_in`` steps, then ``samples * thinning`` further steps,
    pooling the balance histogram over all vertices at every thinning
    boundary.  For the collective model also records the bank trajectory,
    the pre-step interaction-sign tallies and the per-batch bank
    increments, all conditioned on a nonempty bank.
    """
    if samples < 0 or thinning < 1 or (burn_in is not None and burn_in < 0):
        raise ValueError("burn_in, samples must be >= 0 and thinning >= 1")
    params.validate_scale(g.n)
    if burn_in is None:
        burn_in = default_burn_in(g, params)
    sample_steps = samples * thinning
    total_steps = burn_in + sample_steps
    if total_steps > MAX_STEPS:
        raise CapacityError("step counter would overflow; run too long")

    t_start = time.perf_counter()
    state = start.copy() if start is not None else initial_state(g, params, policy)
    validate_state(state, params)
    collective = params.kind == COLLECTIVE

    lo, hi = support_window(params.kind, g.n, params.money, params.limit)
    nbins = hi - lo + 1
    bal = state.balances
    cur = np.zeros(nbins, dtype=np.int64)
    acc = np.zeros(nbins, dtype=np.int64)
    lastk = np.zeros(nbins, dtype=np.int64)

    bankbox = np.array([state.bank if collective else 0], dtype=np.int64)
    debtbox = np.array([state.total_debt()], dtype=np.int64)
    tally = np.zeros((3, 3), dtype=np.int64)
    drift_sums = np.zeros(drift_batches, dtype=np.int64)
    drift_counts = np.zeros(drift_batches, dtype=np.int64)
    zero_counts = np.zeros(drift_batches, dtype=np.int64)
    curve_stride = max(1, total_steps // bank_curve_points) if total_steps else 1
    curve = np.full(total_steps // curve_stride, -1, dtype=np.int64)

    rng = np.random.default_rng(seed)
    done = 0
    collecting = False
    while done < total_steps:
        if not collecting and done == burn_in:
            collecting = True
            cur[:] = np.bincount(bal - lo, minlength=nbins)
            lastk[:] = 0
        limit_here = burn_in + sample_steps if collecting else burn_in
        chunk = min(_CHUNK, limit_here - done)
        idx = rng.integers(0, g.num_directed_edges, size=chunk)
        csrc = g.src[idx]
        cdst = g.dst[idx]
        if collective:
            bad = _kernels.run_collective(
                bal, bankbox, debtbox, params.limit, csrc, cdst,
                collecting, done - burn_in if collecting else 0, thinning, lo,
                cur, acc, lastk, tally, drift_sums, drift_counts, zero_counts,
                max(sample_steps, 1), done, curve_stride, curve,
            )
            if bad >= 0:
                raise InvariantBreachError(
                    f"bank identity violated at step {done + bad + 1}"
                )
        else:
            _kernels.run_individual(
                bal, params.limit, csrc, cdst,
                collecting, done - burn_in if collecting else 0, thinning, lo,
                cur, acc, lastk,
            )
        done += chunk
        if int(bal.sum()) != params.money:
            raise InvariantBreachError("money conservation violated")

    boundaries = sample_steps // thinning
    _kernels.flush_histogram(cur, acc, lastk, boundaries)
    final = MoneyState(bal, int(bankbox[0]) if collective else None)
    validate_state(final, params)

    recorded = curve >= 0
    steps_axis = (np.nonzero(recorded)[0] + 1) * curve_stride
    curve_vals = curve[recorded]
    init_bank = params.limit if collective else 0
    report = SimulationReport(
        kind=params.kind,
        n=g.n,
        money=params.money,
        limit=params.limit,
        seed=seed,
        burn_in=burn_in,
        samples=samples,
        thinning=thinning,
        rng_algorithm=RNG_ALGORITHM,
        hist_offset=lo,
        hist_counts=acc,
        hist_total=boundaries * g.n,
        final_state=final,
        tally=tally if collective else None,
        drift_batch_sums=drift_sums if collective else None,
        drift_batch_counts=drift_counts if collective else None,
        zero_batch_counts=zero_counts if collective else None,
        bank_curve_steps=np.concatenate(([0], steps_axis)) if collective else None,
        bank_curve_values=(
            np.concatenate(([init_bank], curve_vals)) if collective else None
        ),
        wall_time=time.perf_counter() - t_start,
    )
    return report


def replica_seeds(base_seed: int, replicas: int) -> list[int]:
    """Derive one child seed per replica from the base seed."""
    ss = np.random.SeedSequence(base_seed)
    return [int(child.generate_state(1)[0]) for child in ss.spawn(replicas)]
