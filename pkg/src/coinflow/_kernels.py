"""Numba step loops for the two models.

The histogram is pooled across vertices and accumulated lazily: ``cur``
holds the current count of vertices per balance bin, and each bin's
contribution to the sampled total ``acc`` is flushed only when the bin
changes (and once at the end), so a step costs O(1) regardless of the
support width.  ``lastk[b]`` is the number of thinning boundaries already
credited to bin ``b``.
"""

import numpy as np
from numba import njit


@njit(nogil=True)
def _flush_bin(cur, acc, lastk, b, boundaries):
    acc[b] += cur[b] * (boundaries - lastk[b])
    lastk[b] = boundaries


@njit(nogil=True)
def _hist_transfer(cur, acc, lastk, bx, by, boundaries):
    # vertex at bin bx moves down one, vertex at bin by moves up one
    _flush_bin(cur, acc, lastk, bx, boundaries)
    _flush_bin(cur, acc, lastk, bx - 1, boundaries)
    _flush_bin(cur, acc, lastk, by, boundaries)
    _flush_bin(cur, acc, lastk, by + 1, boundaries)
    cur[bx] -= 1
    cur[bx - 1] += 1
    cur[by] -= 1
    cur[by + 1] += 1


@njit(nogil=True)
def run_individual(bal, limit, src, dst, collect, s0, thin, lo, cur, acc, lastk):
    """Apply one chunk of individual-model steps.

    ``s0`` is the number of sampling-phase steps completed before this
    chunk (ignored when ``collect`` is false).
    """
    for i in range(src.shape[0]):
        x = src[i]
        y = dst[i]
        if bal[x] > -limit:
            if collect:
                s = s0 + i + 1
                boundaries = (s - 1) // thin
                _hist_transfer(cur, acc, lastk, bal[x] - lo, bal[y] - lo, boundaries)
            bal[x] -= 1
            bal[y] += 1


@njit(nogil=True)
def run_collective(
    bal,
    bankbox,
    debtbox,
    limit,
    src,
    dst,
    collect,
    s0,
    thin,
    lo,
    cur,
    acc,
    lastk,
    tally,
    drift_sums,
    drift_counts,
    zero_counts,
    nsample,
    g0,
    curve_stride,
    curve,
):
    """Apply one chunk of collective-model steps.

    ``bankbox`` / ``debtbox`` are 1-element carriers for the bank balance
    and the total outstanding debt.  ``g0`` is the number of steps (any
    phase) completed before this chunk; the bank trajectory is recorded at
    every ``curve_stride`` global steps.  Returns -1, or the chunk-local
    index of a bank-identity breach.
    """
    bank = bankbox[0]
    debt = debtbox[0]
    nb = drift_sums.shape[0]
    for i in range(src.shape[0]):
        x = src[i]
        y = dst[i]
        vx = bal[x]
        vy = bal[y]
        bank_pos = bank > 0
        if collect and bank_pos:
            s = s0 + i + 1
            batch = (s - 1) * nb // nsample
            tally[(1 if vx > 0 else (0 if vx == 0 else -1)) + 1,
                  (1 if vy > 0 else (0 if vy == 0 else -1)) + 1] += 1
            drift_counts[batch] += 1
            if vx == 0:
                zero_counts[batch] += 1
        if vx > 0 or bank_pos:
            if collect:
                s = s0 + i + 1
                boundaries = (s - 1) // thin
                _hist_transfer(cur, acc, lastk, vx - lo, vy - lo, boundaries)
            bal[x] = vx - 1
            bal[y] = vy + 1
            if vx <= 0:
                debt += 1
            if vy < 0:
                debt -= 1
            if vx <= 0 and vy >= 0:
                bank -= 1
                if collect and bank_pos:
                    s = s0 + i + 1
                    drift_sums[(s - 1) * nb // nsample] -= 1
            elif vx > 0 and vy < 0:
                bank += 1
                if collect and bank_pos:
                    s = s0 + i + 1
                    drift_sums[(s - 1) * nb // nsample] += 1
        if bank != limit - debt or bank < 0:
            bankbox[0] = bank
            debtbox[0] = debt
            return i
        g = g0 + i + 1
        if g % curve_stride == 0:
            p = g // curve_stride - 1
            if p < curve.shape[0]:
                curve[p] = bank
    bankbox[0] = bank
    debtbox[0] = debt
    return -1


@njit(nogil=True)
def flush_histogram(cur, acc, lastk, boundaries):
    """Credit every bin with the boundaries seen since its last change."""
    for b in range(cur.shape[0]):
        acc[b] += cur[b] * (boundaries - lastk[b])
        lastk[b] = boundaries
