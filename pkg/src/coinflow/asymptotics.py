"""Conjectured large-system limit densities and their moment identities.

The individual model's marginal approaches a shifted exponential; the
collective model's marginal approaches an asymmetric Laplace density with
closed-form scale and decay rates in terms of the money temperature and
the debt-to-money ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, InsufficientDataError


def shifted_exp_density(c, temperature: float, limit: int) -> float:
    """Limit density of the individual model: exponential with scale
    ``temperature + limit`` shifted to start at ``-limit``.

    Returns 0 below the support floor.
    """
    scale = temperature + limit
    c = np.asarray(c, dtype=float)
    out = np.where(c >= -limit, np.exp(-(c + limit) / scale) / scale, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LaplaceParams:
    """Asymmetric Laplace parameters: peak ``k``, right decay rate ``a``,
    left decay rate ``b``, plus the generating ``temperature`` and ``rho``."""

    k: float
    a: float
    b: float
    temperature: float
    rho: float


def laplace_params(temperature: float, rho: float) -> LaplaceParams:
    """Closed-form asymmetric Laplace parameters at temperature ``T`` and
    debt-to-money ratio ``rho``."""
    if temperature <= 0:
        raise DegenerateParameterError("temperature must be positive")
    if rho <= 0:
        raise DegenerateParameterError(
            "rho must be positive (the no-debt regime is outside this formula)"
        )
    t = temperature
    k = (math.sqrt(1 + rho) - math.sqrt(rho)) ** 2 / t
    a = (1 - math.sqrt(rho / (1 + rho))) / t
    b = (math.sqrt((1 + rho) / rho) - 1) / t
    return LaplaceParams(k=k, a=a, b=b, temperature=t, rho=rho)


def laplace_density(c, p: LaplaceParams):
    """Two-sided exponential: ``k e^{-a c}`` for ``c >= 0``,
    ``k e^{+b c}`` for ``c <= 0``."""
    c = np.asarray(c, dtype=float)
    out = p.k * np.exp(np.where(c >= 0, -p.a * c, p.b * c))
    return float(out) if out.ndim == 0 else out


def moment_residuals(p: LaplaceParams) -> tuple[float, float]:
    """Residuals of the two moment identities: total mass one and mean
    equal to the temperature."""
    r1 = p.k / p.a + p.k / p.b - 1.0
    r2 = p.k / p.a**2 - p.k / p.b**2 - p.temperature
    return r1, r2


def fit_laplace_slopes(offset: int, probs: np.ndarray, window: tuple[int, int] | None = None):
    """Branch-wise log-linear least-squares fit of a pmf.

    Fits ``log mass`` against ``c`` separately on the ``c <= 0`` and
    ``c >= 0`` portions of the window and returns ``(a_hat, b_hat, k_hat)``
    with ``a_hat`` the right decay rate, ``b_hat`` the left decay rate and
    ``k_hat`` the geometric-mean peak value of the two intercepts.

    The default window is the central region where the mass exceeds
    ``1e-2`` times the peak.  Finite-size pmfs bend away from the pure
    two-sided exponential in the tails, so a generous window biases the
    slopes; two decades of mass keeps the fit on the straight part.
    """
    probs = np.asarray(probs, dtype=float)
    cs = np.arange(offset, offset + probs.size)
    if window is None:
        keep = probs > 1e-2 * probs.max()
    else:
        keep = (cs >= window[0]) & (cs <= window[1]) & (probs > 0)
    cs = cs[keep]
    ps = probs[keep]
    right = cs >= 0
    left = cs <= 0
    if right.sum() < 3 or left.sum() < 3:
        raise InsufficientDataError("need at least 3 points on each branch")
    slope_r, icept_r = np.polyfit(cs[right], np.log(ps[right]), 1)
    slope_l, icept_l = np.polyfit(cs[left], np.log(ps[left]), 1)
    a_hat = -slope_r
    b_hat = slope_l
    k_hat = math.exp(0.5 * (icept_r + icept_l))
    return a_hat, b_hat, k_hat
