"""Closed-form predictions for the local-time limit laws.

The limiting objects are all functionals of a geometric law with success
parameter gamma (the escape probability): the almost-sure limit of
L_n(alpha)/n is gamma * E(Z^alpha) for Z ~ Geom(gamma), the limit law of
the local time at a uniform visited site is Geom(gamma), and the expected
occupation counts E(Q_j(n)) admit an exact finite-n convolution formula
in terms of the no-return sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadGamma, BadParam, HorizonTooShort
from .gamma import (
    DEFAULT_CELL_BUDGET,
    DEFAULT_SITE_BUDGET,
    DenseEvolver,
    ReturnLaw,
    SparseEvolver,
    return_sequence,
)
from .steps import StepLaw


@dataclass(frozen=True)
class Prediction:
    """A theory value together with its truncation error."""

    kind: str
    inputs: dict
    value: float
    truncation_error: float

    def __post_init__(self):
        assert self.truncation_error >= 0 and math.isfinite(self.truncation_error)
        assert self.value >= 0


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0 < gamma <= 1:
        raise BadGamma(f"escape probability must be in (0, 1], got {gamma}")
    return gamma


def moment_limit(alpha: float, gamma: float, tol: float = 1e-10,
                 max_terms: int = 10 ** 7) -> Prediction:
    """lim L_n(alpha)/n = sum_j j^alpha gamma^2 (1-gamma)^(j-1).

    Partial sum with a geometric-envelope tail bound: once the ratio
    q = (1-gamma)(1+1/J)^alpha drops below 1, the tail after J terms is
    at most gamma^2 (1-gamma)^J (J+1)^alpha / (1-q).  gamma = 1 is the
    degenerate point mass at 1, where the value is exactly 1.
    """
    gamma = _check_gamma(gamma)
    if alpha < 0:
        raise BadParam(f"alpha must be >= 0, got {alpha}")
    one_minus = 1.0 - gamma
    total = 0.0
    weight = gamma * gamma  # gamma^2 (1-gamma)^(j-1)
    j = 0
    while j < max_terms:
        j += 1
        total += weight * j ** alpha
        weight *= one_minus
        q = one_minus * (1.0 + 1.0 / j) ** alpha
        if q < 1.0:
            bound = weight * (j + 1) ** alpha / (1.0 - q)
            if bound < tol:
                return Prediction(kind="moment_limit",
                                  inputs={"alpha": alpha, "gamma": gamma},
                                  value=total, truncation_error=bound)
    raise BadParam(f"moment_limit did not converge within {max_terms} terms")


def geometric_pmf(gamma: float, u: int) -> float:
    """P(Z = u) = gamma (1-gamma)^(u-1) for Z ~ Geom(gamma)."""
    gamma = _check_gamma(gamma)
    if u < 1:
        raise BadParam(f"u must be >= 1, got {u}")
    return gamma * (1.0 - gamma) ** (u - 1)


def qj_limit(gamma: float, j: int) -> float:
    """lim E(Q_j(n))/n = gamma^2 (1-gamma)^(j-1)."""
    gamma = _check_gamma(gamma)
    if j < 1:
        raise BadParam(f"j must be >= 1, got {j}")
    return gamma * gamma * (1.0 - gamma) ** (j - 1)


def _convolve_prefix(a, b, n):
    """First n+1 coefficients of the sequence convolution a*b (exact lists)."""
    out = [a[0] * 0 for _ in range(n + 1)]
    for i, ai in enumerate(a[:n + 1]):
        if ai == 0:
            continue
        for k in range(min(len(b), n + 1 - i)):
            out[i + k] += ai * b[k]
    return out


def expected_qj_formula(ret: ReturnLaw, j: int, n: int):
    """Exact E(Q_j(n)) from the no-return sequence.

    Splitting the path at the j visit times of a site visited exactly j
    times gives a no-return stretch, j-1 returns, and a final no-return
    stretch; summing over the visit times is the (j+1)-fold convolution
    (gamma-sequence) * (return-time law)^{*(j-1)} * (gamma-sequence),
    read off at index n.  Exact for rational ReturnLaws.
    """
    if j < 1:
        raise BadParam(f"j must be >= 1, got {j}")
    if ret.horizon < n:
        raise HorizonTooShort(f"ReturnLaw horizon {ret.horizon} < n={n}")
    g = list(ret.gamma_seq[:n + 1])
    tau = [g[0] * 0] + [a - b for a, b in zip(ret.gamma_seq, ret.gamma_seq[1:])][:n]
    if ret.exact:
        conv = g
        for _ in range(j - 1):
            conv = _convolve_prefix(conv, tau, n)
        return sum(conv[k] * g[n - k] for k in range(n + 1))
    g_arr = np.asarray(g, dtype=np.float64)
    tau_arr = np.asarray(tau, dtype=np.float64)
    conv = g_arr
    for _ in range(j - 1):
        conv = np.convolve(conv, tau_arr)[:n + 1]
    return float(np.dot(conv, g_arr[::-1]))


def qj_generating(ret: ReturnLaw, j: int, s: float, n: int) -> Prediction:
    """Truncated generating function of E(Q_j): A_N(s)^2 B_N(s)^(j-1).

    A_N truncates sum s^m gamma(m), B_N truncates sum s^m P(tau=m).  The
    truncation error combines the factor tails (each at most
    s^(N+1)/(1-s), pushed through the product rule) with the dropped
    coefficients beyond N (each E(Q_j(m)) <= m+1).
    """
    if j < 1:
        raise BadParam(f"j must be >= 1, got {j}")
    if not 0 <= s < 1:
        raise BadParam(f"s must be in [0, 1), got {s}")
    if ret.horizon < n:
        raise HorizonTooShort(f"ReturnLaw horizon {ret.horizon} < N={n}")
    powers = np.power(s, np.arange(n + 1))
    g = np.asarray([float(x) for x in ret.gamma_seq[:n + 1]])
    tau = np.asarray([0.0] + [float(a - b) for a, b in
                              zip(ret.gamma_seq, ret.gamma_seq[1:])][:n])
    a_val = float(np.dot(powers, g))
    b_val = float(np.dot(powers, tau))
    value = a_val ** 2 * b_val ** (j - 1)
    delta = s ** (n + 1) / (1.0 - s)
    factor_tail = (a_val + delta) ** 2 * (b_val + delta) ** (j - 1) - value
    coeff_tail = ((n + 2) * s ** (n + 1) * (1 - s) + s ** (n + 2)) / (1 - s) ** 2
    return Prediction(kind="qj_generating",
                      inputs={"j": j, "s": s, "N": n},
                      value=value, truncation_error=factor_tail + coeff_tail)


def green_cross_sum(law: StepLaw, n: int, method: str = "auto",
                    site_budget: int = DEFAULT_SITE_BUDGET,
                    cell_budget: int = DEFAULT_CELL_BUDGET):
    """sum_y G_n(0,y) G_n(0,-y) for the n-step Green's function.

    Because increments are iid, G_n(0,y) G_n(0,-y) summed over y equals
    sum over m, m' in [1,n] of P(S_{m+m'} = 0); the identity route needs
    only the return-probability sequence up to 2n.  The direct route
    accumulates the Green's function from pmf snapshots and is kept for
    cross-checks (exact for rational laws) at small n.
    """
    if n < 1:
        raise BadParam(f"n must be >= 1, got {n}")
    if method == "auto":
        method = "direct" if (law.exact and n <= 64) else "identity"
    if method == "identity":
        r = return_sequence(law, 2 * n, cell_budget=cell_budget)
        s = np.arange(2, 2 * n + 1)
        weights = np.minimum(s - 1, 2 * n + 1 - s)
        return float(np.dot(weights, r[2:]))
    if method != "direct":
        raise BadParam(f"unknown method {method!r}")
    ev = SparseEvolver(law, site_budget=site_budget)
    zero = Fraction(0) if law.exact else 0.0
    green: dict = {}
    for _ in range(n):
        ev.step()
        for point, mass in ev.masses.items():
            green[point] = green.get(point, zero) + mass
    total = zero
    for point, gy in green.items():
        neg = tuple(-c for c in point)
        if neg in green:
            total += gy * green[neg]
    return total


def sup_pmf(law: StepLaw, m: int,
            site_budget: int = DEFAULT_SITE_BUDGET,
            cell_budget: int = DEFAULT_CELL_BUDGET):
    """sup over x of P(S_m = x); exact for rational laws."""
    if m < 0:
        raise BadParam(f"m must be >= 0, got {m}")
    if m == 0:
        return Fraction(1) if law.exact else 1.0
    if law.exact:
        ev: SparseEvolver | DenseEvolver = SparseEvolver(law, site_budget=site_budget)
    else:
        ev = DenseEvolver(law, cell_budget=cell_budget)
    for _ in range(m):
        ev.step()
    return max(ev.masses.values()) if law.exact else ev.sup()


def sup_pmf_sequence(law: StepLaw, m_max: int,
                     cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """sup_x P(S_m = x) for every m = 0..m_max in one float DP sweep."""
    ev = DenseEvolver(law, cell_budget=cell_budget)
    sups = np.empty(m_max + 1)
    sups[0] = 1.0
    for m in range(1, m_max + 1):
        ev.step()
        sups[m] = ev.sup()
    return sups
