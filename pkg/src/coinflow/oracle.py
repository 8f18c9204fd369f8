"""Brute-force verification on tiny instances.

Enumerates full configuration spaces, assembles exact transition matrices
(integer step counts over a common denominator), and checks symmetry,
irreducibility, aperiodicity, uniform stationarity, and the marginal
formulas, all in exact arithmetic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, NoUniqueStationaryError
from .exact import (
    COLLECTIVE,
    INDIVIDUAL,
    count_states_collective,
    count_states_individual,
)
from .graph import GraphTopology, build_named

ENUMERATION_CAP = 200_000


@dataclass
class StateSpace:
    """Indexed list of full configurations, lexicographic order."""

    kind: str
    n: int
    money: int
    limit: int
    states: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]

    def __len__(self) -> int:
        return len(self.states)

    def bank_of(self, state: tuple[int, ...]) -> int:
        """Bank balance implied by the debt identity (collective only)."""
        return self.limit + sum(v for v in state if v < 0)


def enumerate_individual(n: int, money: int, limit: int, cap: int = ENUMERATION_CAP) -> StateSpace:
    """All configurations with total ``money`` and balances >= ``-limit``."""
    expected = count_states_individual(n, money, limit)
    if expected > cap:
        raise CapacityError(f"{expected} states exceed the enumeration cap {cap}")
    states: list[tuple[int, ...]] = []

    def rec(prefix, rem, k):
        if k == 1:
            if rem >= -limit:
                states.append(tuple(prefix + [rem]))
            return
        for v in range(-limit, rem + limit * (k - 1) + 1):
            rec(prefix + [v], rem - v, k - 1)

    rec([], money, n)
    return StateSpace(
        kind=INDIVIDUAL, n=n, money=money, limit=limit,
        states=states, index={s: i for i, s in enumerate(states)},
    )


def enumerate_collective(n: int, money: int, limit: int, cap: int = ENUMERATION_CAP) -> StateSpace:
    """All configurations with total ``money`` and total debt <= ``limit``."""
    expected = count_states_collective(n, money, limit)
    if expected > cap:
        raise CapacityError(f"{expected} states exceed the enumeration cap {cap}")
    states: list[tuple[int, ...]] = []

    def rec(prefix, rem, k, debt_cap):
        if k == 1:
            if rem >= -debt_cap:
                states.append(tuple(prefix + [rem]))
            return
        for v in range(-debt_cap, rem + debt_cap + 1):
            cap_left = debt_cap - max(0, -v)
            if rem - v >= -cap_left:
                rec(prefix + [v], rem - v, k - 1, cap_left)

    rec([], money, n, limit)
    return StateSpace(
        kind=COLLECTIVE, n=n, money=money, limit=limit,
        states=states, index={s: i for i, s in enumerate(states)},
    )


def enumerate_states(kind: str, n: int, money: int, limit: int, cap: int = ENUMERATION_CAP) -> StateSpace:
    if kind == INDIVIDUAL:
        return enumerate_individual(n, money, limit, cap)
    return enumerate_collective(n, money, limit, cap)


@dataclass
class TransitionMatrix:
    """Step counts between states over the denominator ``2 |E|``."""

    counts: np.ndarray
    denom: int

    def __len__(self) -> int:
        return self.counts.shape[0]

    def prob(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.counts[i, j]), self.denom)


def transition_matrix(g: GraphTopology, ss: StateSpace) -> TransitionMatrix:
    """Entry (i, j) counts the directed edges whose step maps state i to
    state j; no-ops land on the diagonal."""
    size = len(ss)
    counts = np.zeros((size, size), dtype=np.int64)
    limit = ss.limit
    collective = ss.kind == COLLECTIVE
    for i, state in enumerate(ss.states):
        bank = ss.bank_of(state) if collective else 0
        for x, y in zip(g.src, g.dst):
            vx = state[x]
            moves = (max(vx, bank) > 0) if collective else (vx > -limit)
            if moves:
                nxt = list(state)
                nxt[x] -= 1
                nxt[y] += 1
                j = ss.index[tuple(nxt)]
            else:
                j = i
            counts[i, j] += 1
    return TransitionMatrix(counts=counts, denom=g.num_directed_edges)


def check_reversible(m: TransitionMatrix) -> tuple[bool, Fraction]:
    """Exact symmetry check; returns the flag and the largest violation."""
    diff = np.abs(m.counts - m.counts.T).max()
    return int(diff) == 0, Fraction(int(diff), m.denom)


def _reaches_all(adj: list[list[int]]) -> bool:
    seen = [False] * len(adj)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == len(adj)


def check_irreducible(m: TransitionMatrix) -> bool:
    """Strong connectivity of the nonzero-transition digraph."""
    size = len(m)
    fwd: list[list[int]] = [[] for _ in range(size)]
    bwd: list[list[int]] = [[] for _ in range(size)]
    rows, cols = np.nonzero(m.counts)
    for i, j in zip(rows.tolist(), cols.tolist()):
        fwd[i].append(j)
        bwd[j].append(i)
    return _reaches_all(fwd) and _reaches_all(bwd)


def check_aperiodic(m: TransitionMatrix) -> bool:
    """Irreducible plus at least one lazy (positive-diagonal) state."""
    return check_irreducible(m) and bool((np.diag(m.counts) > 0).any())


def is_doubly_stochastic(m: TransitionMatrix) -> bool:
    return bool((m.counts.sum(axis=0) == m.denom).all())


def stationary(m) -> list[Fraction]:
    """Exact stationary vector via rational Gaussian elimination.

    Accepts a ``TransitionMatrix`` or a square sequence of rational rows.
    Solves the balance equations with the normalization row appended.
    """
    if isinstance(m, TransitionMatrix):
        size = len(m)
        rows = [
            [Fraction(int(m.counts[i, j]), m.denom) for j in range(size)]
            for i in range(size)
        ]
    else:
        rows = [[Fraction(v) for v in row] for row in m]
        size = len(rows)
    # (P^T - I) pi = 0, replace the last equation with sum(pi) = 1
    a = [[rows[j][i] - (1 if i == j else 0) for j in range(size)] for i in range(size)]
    a[size - 1] = [Fraction(1)] * size
    b = [Fraction(0)] * (size - 1) + [Fraction(1)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            raise NoUniqueStationaryError("matrix is reducible or not stochastic")
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        b[col] *= inv
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                b[r] -= f * b[col]
    return b


def uniform_is_stationary(m: TransitionMatrix) -> bool:
    """Certificate that the uniform vector is the unique stationary law:
    doubly stochastic (uniform solves the balance equations exactly) and
    irreducible (uniqueness)."""
    return is_doubly_stochastic(m) and check_irreducible(m)


def balance_marginal(ss: StateSpace, vertex: int) -> dict[int, Fraction]:
    """Marginal of the balance at one vertex under the uniform law."""
    size = len(ss)
    out: dict[int, Fraction] = {}
    for state in ss.states:
        c = state[vertex]
        out[c] = out.get(c, 0) + 1
    return {c: Fraction(k, size) for c, k in sorted(out.items())}


def predicted_marginal_mass(kind: str, n: int, money: int, limit: int, c: int) -> Fraction:
    """Marginal-formula mass at ``c`` as an exact rational."""
    if kind == INDIVIDUAL:
        num = count_states_individual(n - 1, money - c, limit)
        den = count_states_individual(n, money, limit)
    else:
        cap = limit if c >= 0 else limit + c
        num = count_states_collective(n - 1, money - c, cap)
        den = count_states_collective(n, money, limit)
    return Fraction(num, den)


def verify_instance(
    graph_kind: str,
    n: int,
    model_kind: str,
    money: int,
    limit: int,
    cap: int = ENUMERATION_CAP,
) -> dict:
    """Run every oracle check on one instance; exact arithmetic throughout."""
    g = build_named(graph_kind, n)
    ss = enumerate_states(model_kind, n, money, limit, cap)
    formula = (
        count_states_individual(n, money, limit)
        if model_kind == INDIVIDUAL
        else count_states_collective(n, money, limit)
    )
    result = {
        "params": {"model": model_kind, "n": n, "money": money, "limit": limit},
        "graph": graph_kind,
        "state_count": len(ss),
        "lambda_value": formula,
        "count_match": len(ss) == formula,
    }
    m = transition_matrix(g, ss)
    symmetric, _ = check_reversible(m)
    irreducible = check_irreducible(m)
    result["symmetric"] = symmetric
    result["irreducible"] = irreducible
    result["aperiodic"] = irreducible and bool((np.diag(m.counts) > 0).any())
    result["uniform"] = is_doubly_stochastic(m) and irreducible
    marginal_match = True
    for vertex in range(n):
        emp = balance_marginal(ss, vertex)
        for c, mass in emp.items():
            if mass != predicted_marginal_mass(model_kind, n, money, limit, c):
                marginal_match = False
    result["marginal_match"] = marginal_match
    result["pass"] = all(
        result[k]
        for k in ("count_match", "symmetric", "irreducible", "aperiodic", "uniform", "marginal_match")
    )
    return result


def verify_grid(
    max_n: int = 4,
    max_money: int = 5,
    max_limit: int = 3,
    graphs: tuple[str, ...] = ("path", "cycle", "complete", "star"),
    cap: int = ENUMERATION_CAP,
) -> dict:
    """Exhaustive small-parameter verification grid.

    Counting checks run for every ``n >= 1``; matrix checks need a graph
    and run for ``n >= 2`` on every listed topology.
    """
    count_checks = []
    for kind in (INDIVIDUAL, COLLECTIVE):
        for n in range(1, max_n + 1):
            for money in range(max_money + 1):
                for limit in range(max_limit + 1):
                    ss = enumerate_states(kind, n, money, limit, cap)
                    formula = (
                        count_states_individual(n, money, limit)
                        if kind == INDIVIDUAL
                        else count_states_collective(n, money, limit)
                    )
                    count_checks.append(
                        {
                            "params": {"model": kind, "n": n, "money": money, "limit": limit},
                            "state_count": len(ss),
                            "lambda_value": formula,
                            "pass": len(ss) == formula,
                        }
                    )
    instances = []
    for graph_kind in graphs:
        for kind in (INDIVIDUAL, COLLECTIVE):
            for n in range(2, max_n + 1):
                for money in range(max_money + 1):
                    for limit in range(max_limit + 1):
                        instances.append(verify_instance(graph_kind, n, kind, money, limit, cap))
    failed = [c for c in count_checks if not c["pass"]] + [
        i for i in instances if not i["pass"]
    ]
    return {
        "count_checks": count_checks,
        "instances": instances,
        "total": len(count_checks) + len(instances),
        "failed": len(failed),
        "failures": failed,
        "pass": not failed,
    }
