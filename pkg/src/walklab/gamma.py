"""Escape probability and return-probability machinery.

Three independent routes to the escape probability gamma:

* green_series: gamma = 1 / sum_m P(S_m = 0) (renewal identity), with the
  truncated series completed by a fitted tail,
* taboo_dp: evolve the law of S_m while absorbing all mass at the origin;
  the surviving mass after n steps is gamma(n), the no-return probability,
* mc_escape: fraction of simulated walks that avoid the origin up to a
  horizon n (estimates gamma(n), an upper bound for gamma).

The return-probability sequence P(S_m = 0) is computed by the cheapest
exact engine available for the law: a dense box dynamic program (any law,
cost grows with the spread), an axis-decomposition recursion (laws whose
atoms are signed unit vectors and optionally the zero vector, e.g. simple
and drifted simple walks, cost O(d N^2)), or a torus Fourier grid (any
law, cost N * grid cells).  All engines agree to float precision; the
tests cross-check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rng as rnglib
from .errors import BadParam, ResourceLimit, SuspectedRecurrence
from .steps import LatticePoint, Mass, StepLaw, _sampling_arrays

DEFAULT_PRUNE = 1e-16
DEFAULT_CELL_BUDGET = 1 << 25
DEFAULT_SITE_BUDGET = 5_000_000


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PmfField:
    """Sparse law of S_m (or a killed sub-probability law) at step m."""

    m: int
    masses: dict[LatticePoint, Mass]

    def total_mass(self):
        return sum(self.masses.values())

    def mass_at(self, point: Sequence[int]):
        return self.masses.get(tuple(int(c) for c in point), 0)

    def sup(self):
        return max(self.masses.values())


@dataclass(frozen=True)
class ReturnLaw:
    """No-return probabilities gamma(0..N) and the derived return-time law.

    prune_loss bounds the mass discarded by the float DP; exact sequences
    have prune_loss 0.
    """

    horizon: int
    gamma_seq: tuple
    exact: bool
    prune_loss: float = 0.0

    def gamma(self, n: int):
        return self.gamma_seq[n]

    def tau_pmf(self) -> tuple:
        """P(tau = n) = gamma(n-1) - gamma(n) for n = 1..horizon."""
        g = self.gamma_seq
        return tuple(g[n - 1] - g[n] for n in range(1, self.horizon + 1))

    def check_invariants(self, tol: float = 1e-9) -> None:
        g = self.gamma_seq
        assert g[0] == 1
        assert all(a >= b - 1e-15 for a, b in zip(g, g[1:]))
        assert g[-1] >= -1e-15
        total = sum(self.tau_pmf()) + g[-1]
        if self.exact:
            assert total == 1
        else:
            assert abs(total - 1.0) <= tol + self.prune_loss


@dataclass(frozen=True)
class GammaEstimate:
    """One estimate of the escape probability with its error scale."""

    value: float
    error: float
    method: str
    params: dict
    seed: int | None = None

    def __post_init__(self):
        assert self.error >= 0
        assert self.value - self.error >= -1e-12
        assert self.value <= 1 + self.error + 1e-12


@dataclass(frozen=True)
class TailDiagnostic:
    """Partial tail sum_{k>=n} P(S_k=0) and its fitted decay exponent.

    windows holds (start, slope) pairs where slope is the dyadic-window
    decay rate -log2(tail(2s)/tail(s)); eta_hat is the least-squares
    exponent over all starts.  A walk whose tail vanishes identically is
    reported with eta_hat = inf.
    """

    value: float
    eta_hat: float
    windows: tuple[tuple[int, float], ...]


# ---------------------------------------------------------------------------
# Evolution engines
# ---------------------------------------------------------------------------

class SparseEvolver:
    """Exact sparse convolution of the step law, optionally origin-killed."""

    def __init__(self, law: StepLaw, kill_origin: bool = False,
                 site_budget: int = DEFAULT_SITE_BUDGET):
        zero = Fraction(0) if law.exact else 0.0
        self.law = law
        self.zero = zero
        self.origin = (0,) * law.d
        self.masses = {self.origin: Fraction(1) if law.exact else 1.0}
        self.kill_origin = kill_origin
        self.killed = zero
        self.site_budget = site_budget
        self.m = 0

    def step(self) -> None:
        new: dict[LatticePoint, Mass] = {}
        for point, mass in self.masses.items():
            for off, w in self.law.atoms:
                dest = tuple(a + b for a, b in zip(point, off))
                new[dest] = new.get(dest, self.zero) + mass * w
        if len(new) > self.site_budget:
            raise ResourceLimit(
                f"sparse pmf support {len(new)} exceeds budget {self.site_budget}")
        if self.kill_origin and self.origin in new:
            self.killed += new.pop(self.origin)
        self.masses = new
        self.m += 1

    def origin_mass(self):
        return self.masses.get(self.origin, self.zero)

    def surviving_mass(self):
        return 1 - self.killed


class DenseEvolver:
    """Float box DP over the support bounding box, with edge pruning.

    The array covers lattice points lo[j] .. lo[j]+shape[j]-1 per axis;
    mass below the prune threshold is dropped (and accounted) when the
    box is re-trimmed, which keeps the box at the diffusive scale instead
    of the ballistic one.
    """

    TRIM_EVERY = 8

    def __init__(self, law: StepLaw, kill_origin: bool = False,
                 cell_budget: int = DEFAULT_CELL_BUDGET,
                 prune: float = DEFAULT_PRUNE):
        law = law.to_float()
        self.d = law.d
        self.offsets = np.array([p for p, _ in law.atoms], dtype=np.int64)
        self.weights = np.array([m for _, m in law.atoms])
        self.arr = np.ones((1,) * law.d)
        self.lo = np.zeros(law.d, dtype=np.int64)
        self.kill_origin = kill_origin
        self.killed = 0.0
        self.pruned = 0.0
        self.cell_budget = cell_budget
        self.prune = prune
        self.m = 0

    def _origin_index(self) -> tuple | None:
        idx = -self.lo
        if ((idx >= 0) & (idx < np.array(self.arr.shape))).all():
            return tuple(int(i) for i in idx)
        return None

    def step(self) -> None:
        mins = self.offsets.min(axis=0)
        maxs = self.offsets.max(axis=0)
        shape = np.array(self.arr.shape)
        new_shape = tuple(int(s) for s in shape + (maxs - mins))
        if math.prod(new_shape) > self.cell_budget:
            raise ResourceLimit(
                f"dense pmf box {new_shape} exceeds {self.cell_budget} cells")
        new = np.zeros(new_shape)
        for off, w in zip(self.offsets, self.weights):
            dest = tuple(slice(int(o - mn), int(o - mn + s))
                         for o, mn, s in zip(off, mins, shape))
            new[dest] += w * self.arr
        self.arr = new
        self.lo = self.lo + mins
        self.m += 1
        if self.kill_origin:
            idx = self._origin_index()
            if idx is not None:
                self.killed += float(self.arr[idx])
                self.arr[idx] = 0.0
        if self.m % self.TRIM_EVERY == 0:
            self._trim()

    def _trim(self) -> None:
        small = (self.arr < self.prune) & (self.arr > 0)
        if small.any():
            self.pruned += float(self.arr[small].sum())
            self.arr[small] = 0.0
        for axis in range(self.d):
            other = tuple(a for a in range(self.d) if a != axis)
            profile = self.arr.max(axis=other) if other else self.arr
            nz = np.flatnonzero(profile > 0)
            if nz.size == 0:
                continue
            first, last = int(nz[0]), int(nz[-1])
            if first > 0 or last < self.arr.shape[axis] - 1:
                sl = [slice(None)] * self.d
                sl[axis] = slice(first, last + 1)
                self.arr = self.arr[tuple(sl)]
                self.lo[axis] += first
        self.arr = np.ascontiguousarray(self.arr)

    def origin_mass(self) -> float:
        idx = self._origin_index()
        return float(self.arr[idx]) if idx is not None else 0.0

    def surviving_mass(self) -> float:
        return 1.0 - self.killed

    def sup(self) -> float:
        return float(self.arr.max())

    def to_masses(self) -> dict[LatticePoint, float]:
        out = {}
        for flat in np.flatnonzero(self.arr >= self.prune):
            idx = np.unravel_index(flat, self.arr.shape)
            point = tuple(int(i + l) for i, l in zip(idx, self.lo))
            out[point] = float(self.arr[idx])
        return out


def pmf_evolve(law: StepLaw, m: int,
               site_budget: int = DEFAULT_SITE_BUDGET,
               cell_budget: int = DEFAULT_CELL_BUDGET) -> PmfField:
    """Exact law of S_m as a sparse field.

    Rational laws evolve exactly; float laws use the dense box DP and drop
    only mass below the prune threshold (total drift < 1e-12 in practice).
    """
    if m < 0:
        raise BadParam(f"step count must be >= 0, got {m}")
    if law.exact:
        ev = SparseEvolver(law, site_budget=site_budget)
        for _ in range(m):
            ev.step()
        return PmfField(m=m, masses=dict(ev.masses))
    ev = DenseEvolver(law, cell_budget=cell_budget)
    for _ in range(m):
        ev.step()
    return PmfField(m=m, masses=ev.to_masses())


# ---------------------------------------------------------------------------
# Return-probability sequence P(S_m = 0), m = 0..N
# ---------------------------------------------------------------------------

def _axis_decomposition(law: StepLaw):
    """If every atom is a signed unit vector or zero, return per-axis data.

    Returns (axis_mass, axis_up, zero_mass) where axis_mass[j] is the
    total probability of moving along axis j and axis_up[j] the
    conditional probability of the + direction, or None if the law does
    not decompose.
    """
    d = law.d
    up = np.zeros(d)
    down = np.zeros(d)
    zero_mass = 0.0
    for point, mass in law.atoms:
        nz = [j for j, c in enumerate(point) if c != 0]
        if not nz:
            zero_mass += float(mass)
            continue
        if len(nz) > 1 or abs(point[nz[0]]) != 1:
            return None
        if point[nz[0]] == 1:
            up[nz[0]] += float(mass)
        else:
            down[nz[0]] += float(mass)
    axis_mass = up + down
    with np.errstate(invalid="ignore"):
        axis_up = np.where(axis_mass > 0, up / np.where(axis_mass > 0, axis_mass, 1), 0.0)
    return axis_mass, axis_up, zero_mass


def _one_axis_returns(n: int, p_up: float) -> np.ndarray:
    """P(+1/-1 walk with up-probability p is at 0 after k steps), k=0..n."""
    a = np.zeros(n + 1)
    a[0] = 1.0
    pq4 = 4.0 * p_up * (1.0 - p_up)
    for k in range(2, n + 1, 2):
        a[k] = a[k - 2] * (k - 1) / k * pq4
    return a


def _binomial_fold(v_prev: np.ndarray, rel: float, u_new: np.ndarray) -> np.ndarray:
    """out[m] = E[u(K) v(m-K)] with K ~ Binomial(m, rel).

    The binomial mass is negligible (< 1e-21) outside a 10-sigma band
    around the mode, so each row touches only O(sqrt(m)) terms; band
    weights come from the pmf ratio recurrence and are renormalized over
    the band, which also absorbs the truncated tail.
    """
    if rel >= 1.0:
        return u_new.copy()
    if rel <= 0.0:
        return v_prev.copy()
    n = len(v_prev) - 1
    odds = rel / (1.0 - rel)
    out = np.empty(n + 1)
    out[0] = u_new[0] * v_prev[0]
    for m in range(1, n + 1):
        half = int(10.0 * math.sqrt(m * rel * (1.0 - rel))) + 20
        mode = int(round(m * rel))
        lo = max(0, mode - half)
        hi = min(m, mode + half)
        ks = np.arange(lo, hi + 1)
        w = np.empty(len(ks))
        w[0] = 1.0
        if len(ks) > 1:
            np.cumprod((m - ks[:-1]) / (ks[:-1] + 1.0) * odds, out=w[1:])
        w /= w.sum()
        out[m] = np.dot(w * u_new[ks], v_prev[m - ks])
    return out


def _axis_return_sequence(law: StepLaw, n: int) -> np.ndarray:
    """Return probabilities via the axis-decomposition recursion.

    Folding in one axis at a time: if v holds the return probabilities of
    the walk restricted to the axes already folded (total step mass W) and
    the new axis has mass w, the combined walk puts Binomial(m, w/(W+w))
    steps on the new axis, and both components must return.
    """
    axis_mass, axis_up, zero_mass = _axis_decomposition(law)
    components = [(float(axis_mass[j]), _one_axis_returns(n, float(axis_up[j])))
                  for j in range(law.d) if axis_mass[j] > 0]
    if zero_mass > 0:
        components.append((zero_mass, np.ones(n + 1)))
    total = 0.0
    v = np.zeros(n + 1)
    v[0] = 1.0
    for w_new, u_new in components:
        total += w_new
        v = _binomial_fold(v, w_new / total, u_new)
    return v


def _fourier_return_sequence(law: StepLaw, n: int, cell_budget: int) -> np.ndarray:
    """Return probabilities via a torus Fourier grid.

    The rectangle-rule average of phi(theta)^m over a K-point grid equals
    the total mass of S_m on the sublattice K Z^d; the grid is sized so
    the aliased mass (anything at distance >= 5 sqrt(n) step-ranges from
    the drift center) is below 1e-21.
    """
    law = law.to_float()
    pts = np.array([p for p, _ in law.atoms], dtype=np.int64)
    w = np.array([m for _, m in law.atoms])
    mu = (w[:, None] * pts).sum(axis=0)
    spread = pts.max(axis=0) - pts.min(axis=0)
    ks = [int(math.ceil(n * abs(mu[j]) + 5.0 * spread[j] * math.sqrt(n) + 8))
          for j in range(law.d)]
    if math.prod(ks) > cell_budget:
        raise ResourceLimit(f"fourier grid {ks} exceeds {cell_budget} cells")
    phi = np.zeros(tuple(ks), dtype=np.complex128)
    for point, mass in zip(pts, w):
        term = np.complex128(mass)
        for j, k in enumerate(ks):
            shape = [1] * law.d
            shape[j] = k
            term = term * np.exp(2j * np.pi * np.arange(k) * point[j] / k).reshape(shape)
        phi += term
    r = np.empty(n + 1)
    r[0] = 1.0
    power = np.ones_like(phi)
    for m in range(1, n + 1):
        power *= phi
        r[m] = power.mean().real
    return np.maximum(r, 0.0)


def _dense_return_sequence(law: StepLaw, n: int, cell_budget: int) -> np.ndarray:
    ev = DenseEvolver(law, cell_budget=cell_budget)
    r = np.empty(n + 1)
    r[0] = 1.0
    for m in range(1, n + 1):
        ev.step()
        r[m] = ev.origin_mass()
    return r


def return_sequence(law: StepLaw, n: int, engine: str = "auto",
                    cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """P(S_m = 0) for m = 0..n, in doubles, by the cheapest exact engine."""
    if n < 0:
        raise BadParam(f"horizon must be >= 0, got {n}")
    if engine == "auto":
        if _axis_decomposition(law) is not None:
            engine = "axis"
        elif law.d == 1:
            engine = "dense"
        else:
            engine = "fourier"
    if engine == "axis":
        if _axis_decomposition(law) is None:
            raise BadParam("axis engine needs signed-unit-vector (or zero) atoms")
        return _axis_return_sequence(law, n)
    if engine == "dense":
        return _dense_return_sequence(law, n, cell_budget)
    if engine == "fourier":
        return _fourier_return_sequence(law, n, cell_budget)
    raise BadParam(f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# Green's series estimate
# ---------------------------------------------------------------------------

def _fit_window(r: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """(m values, r values, window length) of the nonzero terms in the
    last decade [max(4, n/10), n]."""
    start = max(4, n // 10)
    ms = np.arange(start, n + 1)
    rv = r[start:n + 1]
    nz = rv > 0
    return ms[nz], rv[nz], len(ms)


def _lattice_period(ms: np.ndarray) -> int:
    if len(ms) < 2:
        return 1
    return int(np.gcd.reduce(np.diff(ms)))


def _diffusive_tail(ms, rv, window_len, n, d) -> float:
    """Fitted tail sum_{m>n} C m^{-d/2}, slope pinned at the diffusive value."""
    log_c = float(np.mean(np.log(rv) + (d / 2.0) * np.log(ms)))
    occupancy = len(ms) / window_len
    return occupancy * math.exp(log_c) * (n + 0.5) ** (1 - d / 2.0) / (d / 2.0 - 1.0)


def _geometric_tail(ms, rv, n) -> float:
    """Fitted tail for geometrically decaying return probabilities (d<3)."""
    if len(ms) < 2:
        return 0.0
    b, a = np.polyfit(ms.astype(float), np.log(rv), 1)
    if b >= 0:
        raise SuspectedRecurrence(
            "return probabilities are not decaying; Green tail unbounded")
    p = _lattice_period(ms)
    return math.exp(a + b * (n + p)) / (1.0 - math.exp(b * p))


def green_at_origin(law: StepLaw, n: int, tail_mode: str = "auto",
                    engine: str = "auto",
                    cell_budget: int = DEFAULT_CELL_BUDGET) -> GammaEstimate:
    """Escape probability via gamma = 1 / sum_m P(S_m = 0).

    Works in doubles even for exact laws (the tail is an estimate, so
    exact masses gain nothing).  The truncated series over m <= n is
    completed with a fitted tail: the diffusive C m^{-d/2} form in d >= 3,
    a fitted geometric envelope otherwise (the polynomial form is not
    summable below d = 3; a transient low-dimensional walk has drift and
    geometric return decay).  The reported error is the tail propagated
    to the gamma scale.

    Raises SuspectedRecurrence when the last decade of partial sums keeps
    growing and the fitted decay exponent of P(S_m=0) is <= 1 (a
    non-summable envelope).
    """
    r = return_sequence(law, n, engine=engine, cell_budget=cell_budget)
    total = float(r.sum())
    ms, rv, window_len = _fit_window(r, n)
    if len(ms) >= 3:
        eta_hat = -float(np.polyfit(np.log(ms), np.log(rv), 1)[0])
        head = float(r[:max(4, n // 10)].sum())
        if eta_hat <= 1.05 and (total - head) / total > 1e-3:
            raise SuspectedRecurrence(
                f"partial sums of P(S_m=0) still growing at N={n} "
                f"(fitted decay exponent {eta_hat:.3f} <= 1)")
    if len(ms) == 0:
        tail = 0.0
    elif tail_mode == "diffusive" or (tail_mode == "auto" and law.d >= 3):
        tail = _diffusive_tail(ms, rv, window_len, n, law.d)
    else:
        tail = _geometric_tail(ms, rv, n)
    value = 1.0 / (total + tail)
    return GammaEstimate(value=value, error=value * value * tail,
                         method="green_series",
                         params={"N": n, "series_sum": total, "tail": tail})


# ---------------------------------------------------------------------------
# Taboo DP
# ---------------------------------------------------------------------------

def taboo_survival(law: StepLaw, n: int,
                   site_budget: int = DEFAULT_SITE_BUDGET,
                   cell_budget: int = DEFAULT_CELL_BUDGET,
                   prune: float = DEFAULT_PRUNE) -> ReturnLaw:
    """No-return probabilities gamma(0..n) by origin-killed evolution.

    Rational laws are evolved exactly and never pruned; float laws use
    the dense DP with the pruned mass reported in prune_loss.
    """
    if n < 0:
        raise BadParam(f"horizon must be >= 0, got {n}")
    if law.exact:
        ev: SparseEvolver | DenseEvolver = SparseEvolver(
            law, kill_origin=True, site_budget=site_budget)
        seq = [Fraction(1)]
    else:
        ev = DenseEvolver(law, kill_origin=True, cell_budget=cell_budget,
                          prune=prune)
        seq = [1.0]
    for _ in range(n):
        ev.step()
        seq.append(ev.surviving_mass())
    loss = 0.0 if law.exact else ev.pruned
    return ReturnLaw(horizon=n, gamma_seq=tuple(seq), exact=law.exact,
                     prune_loss=loss)


def taboo_gamma_estimate(law: StepLaw, n: int, **kwargs) -> GammaEstimate:
    """Gamma estimate from the taboo DP.

    The value is gamma(n), which exceeds gamma by P(n < tau < infinity);
    the reported error estimates that truncation bias via the fitted
    return-probability tail (renewal: P(tau = m) ~ gamma^2 P(S_m = 0)),
    plus any pruned mass.
    """
    ret = taboo_survival(law, n, **kwargs)
    g_n = float(ret.gamma_seq[-1])
    r = return_sequence(law, n)
    ms, rv, window_len = _fit_window(r, n)
    if len(ms) == 0:
        bias = 0.0
    elif law.d >= 3:
        bias = g_n * g_n * _diffusive_tail(ms, rv, window_len, n, law.d)
    else:
        bias = g_n * g_n * _geometric_tail(ms, rv, n)
    return GammaEstimate(value=g_n, error=bias + ret.prune_loss,
                         method="taboo_dp", params={"N": n})


# ---------------------------------------------------------------------------
# Monte Carlo escape
# ---------------------------------------------------------------------------

def _replica_escapes(law_arrays, d: int, n: int, seed: int, block: int) -> bool:
    """True iff one walk stays off the origin for steps 1..n."""
    coords, cdf = law_arrays
    max_step = np.abs(coords).max(axis=0)
    gen = rnglib.generator(seed)
    pos = np.zeros(d, dtype=np.int64)
    done = 0
    while done < n:
        b = min(block, n - done)
        idx = np.searchsorted(cdf, gen.random(b), side="right")
        path = np.cumsum(coords[idx], axis=0)
        path += pos
        if (path == 0).all(axis=1).any():
            return False
        pos = path[-1]
        done += b
        remaining = n - done
        # a coordinate too far out to cross back to 0 settles the replica
        if (np.abs(pos) > remaining * max_step).any():
            return True
    return True


def _escape_range(args) -> int:
    law_arrays, d, n, master_seed, lo, hi, block = args
    count = 0
    for i in range(lo, hi):
        count += _replica_escapes(law_arrays, d, n, rnglib.mix64(master_seed, i), block)
    return count


def mc_escape(law: StepLaw, n: int, m: int, seed: int,
              threads: int = 1, block: int = 2048) -> GammaEstimate:
    """Monte Carlo estimate of gamma(n) over m independent replicas.

    Replica i is a pure function of mix64(seed, i), so the result does
    not depend on threads; estimates gamma(n) >= gamma (upward bias by
    the walks that would return after n, reported as-is).
    """
    if n < 1 or m < 1:
        raise BadParam("mc_escape needs n >= 1 and m >= 1")
    coords, cdf = _sampling_arrays(law)
    arrays = (coords, cdf)
    if threads > 1:
        from multiprocessing import get_context
        bounds = np.linspace(0, m, threads + 1).astype(int)
        tasks = [(arrays, law.d, n, seed, int(lo), int(hi), block)
                 for lo, hi in zip(bounds, bounds[1:])]
        with get_context("fork").Pool(threads) as pool:
            escapes = sum(pool.map(_escape_range, tasks))
    else:
        escapes = _escape_range((arrays, law.d, n, seed, 0, m, block))
    value = escapes / m
    stderr = math.sqrt(max(value * (1 - value), 0.0) / m)
    return GammaEstimate(value=value, error=stderr, method="mc_escape",
                         params={"n": n, "M": m}, seed=seed)


# ---------------------------------------------------------------------------
# Tail diagnostic (the d in {1,2} assumption check)
# ---------------------------------------------------------------------------

def return_tail(law: StepLaw, n: int, big_n: int, engine: str = "auto",
                cell_budget: int = DEFAULT_CELL_BUDGET) -> TailDiagnostic:
    """Partial tail sum_{k=n}^{N} P(S_k = 0) with fitted decay exponent.

    Diagnostic only.  Decay is measured on the dyadic block masses
    sum_{k in [s, 2s)} P(S_k = 0), which scale like s^{-eta} exactly when
    the tail does but carry no truncation bias near N: the window at s
    reports -log2(block(2s)/block(s)), and eta_hat is the least-squares
    slope across blocks.
    """
    if not 0 <= n < big_n:
        raise BadParam("need 0 <= n < N")
    r = return_sequence(law, big_n, engine=engine, cell_budget=cell_budget)
    suffix = np.cumsum(r[::-1])[::-1]  # suffix[k] = sum_{j>=k} r[j]
    value = float(suffix[n])
    if value == 0.0:
        return TailDiagnostic(value=0.0, eta_hat=math.inf, windows=())

    def block(s: int) -> float:
        return float(suffix[s] - suffix[min(2 * s, big_n)])

    starts = []
    s = max(n, 1)
    while 4 * s <= big_n:
        starts.append(s)
        s *= 2
    windows = []
    for s in starts:
        b0, b1 = block(s), block(2 * s)
        slope = math.inf if b1 == 0.0 else -(math.log2(b1) - math.log2(b0))
        windows.append((s, slope))
    pos = [(s, block(s)) for s in starts + [2 * starts[-1]] if block(s) > 0] \
        if starts else []
    if len(pos) >= 3:
        xs = np.log([p[0] for p in pos])
        ys = np.log([p[1] for p in pos])
        eta_hat = -float(np.polyfit(xs, ys, 1)[0])
    else:
        eta_hat = math.inf
    return TailDiagnostic(value=value, eta_hat=eta_hat, windows=tuple(windows))
