"""Path simulation and local-time accounting.

A walk of horizon n occupies n+1 time points (S_0 = 0 included).  The
LocalTimeField records how often each visited site was occupied; every
functional of interest here (range, power sums of visit counts, the
histogram of visit multiplicities) is a pure function of that field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rnglib
from .errors import BadParam, ResourceLimit
from .steps import LatticePoint, StepLaw, _sampling_arrays, sample_indices

_INT64_SAFE = 1 << 62


def _positions(law: StepLaw, n: int, gen: np.random.Generator) -> np.ndarray:
    """S_0..S_n as an (n+1, d) int64 array."""
    coords, _ = _sampling_arrays(law)
    out = np.zeros((n + 1, law.d), dtype=np.int64)
    if n > 0:
        idx = sample_indices(law, gen, n)
        np.cumsum(coords[idx], axis=0, out=out[1:])
    return out


def _pack_rows(points: np.ndarray) -> np.ndarray:
    """Mixed-radix encode integer rows into one int64 key per row.

    The encoding is monotone in lexicographic row order, so sorting keys
    sorts rows.  Falls back to per-row void views only if the coordinate
    ranges cannot fit 63 bits (never the case for the walks handled here).
    """
    lo = points.min(axis=0)
    spans = points.max(axis=0) - lo + 1
    total_bits = int(np.sum(np.ceil(np.log2(spans.astype(float) + 1))))
    if total_bits > 62:
        raise ResourceLimit("coordinate ranges too wide to pack into 64-bit keys")
    keys = np.zeros(len(points), dtype=np.int64)
    for j in range(points.shape[1]):
        keys *= int(spans[j])
        keys += points[:, j] - lo[j]
    return keys


@dataclass(frozen=True)
class LocalTimeField:
    """Visit counts of one simulated path.

    sites rows are the distinct visited lattice points in lexicographic
    order; counts[i] is the number of times sites[i] was occupied among
    times 0..n.  Sum of counts is always n+1 and the origin is present.
    """

    n: int
    sites: np.ndarray
    counts: np.ndarray

    @property
    def range(self) -> int:
        """R(n), the number of distinct visited sites."""
        return len(self.counts)

    def count_of(self, point: Sequence[int]) -> int:
        pt = np.asarray(point, dtype=np.int64)
        hit = np.flatnonzero((self.sites == pt).all(axis=1))
        return int(self.counts[hit[0]]) if hit.size else 0

    def counts_map(self) -> dict[LatticePoint, int]:
        return {tuple(int(c) for c in s): int(v)
                for s, v in zip(self.sites, self.counts)}

    def check_invariants(self) -> None:
        assert int(self.counts.sum()) == self.n + 1
        assert (self.counts >= 1).all()
        assert self.count_of((0,) * self.sites.shape[1]) >= 1


@dataclass(frozen=True)
class QHistogram:
    """Counts of sites by visit multiplicity: buckets[j] = Q_j(n)."""

    n: int
    buckets: dict[int, int]

    def total_sites(self) -> int:
        return sum(self.buckets.values())

    def weighted_total(self) -> int:
        return sum(j * q for j, q in self.buckets.items())


def _field_from_positions(n: int, positions: np.ndarray,
                          key_budget: int | None) -> LocalTimeField:
    keys = _pack_rows(positions)
    uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
    if key_budget is not None and len(uniq) > key_budget:
        raise ResourceLimit(f"field has {len(uniq)} sites, budget {key_budget}")
    return LocalTimeField(n=n, sites=positions[first], counts=counts)


def simulate(law: StepLaw, n: int, seed: int,
             key_budget: int | None = None) -> LocalTimeField:
    """Simulate one n-step path and return its local-time field."""
    if n < 0:
        raise BadParam(f"horizon must be >= 0, got {n}")
    gen = rnglib.generator(seed)
    return _field_from_positions(n, _positions(law, n, gen), key_budget)


def l_alpha(field: LocalTimeField, alpha: float):
    """L_n(alpha) = sum over visited sites of count^alpha.

    alpha = 0 counts each visited site once (the range); integer alpha is
    evaluated in exact integer arithmetic, non-integer alpha in doubles.
    """
    if alpha < 0:
        raise BadParam(f"alpha must be >= 0, got {alpha}")
    counts = field.counts
    if alpha == 0:
        return field.range
    if float(alpha).is_integer():
        a = int(alpha)
        cmax = int(counts.max())
        if cmax ** a * len(counts) < _INT64_SAFE:
            return int((counts ** a).sum())
        return sum(int(c) ** a for c in counts)
    return float(np.power(counts.astype(np.float64), alpha).sum())


def q_histogram(field: LocalTimeField) -> QHistogram:
    """Histogram of visit multiplicities."""
    tally = np.bincount(field.counts)
    buckets = {int(j): int(tally[j]) for j in np.flatnonzero(tally)}
    return QHistogram(n=field.n, buckets=buckets)


def sample_visited_local_time(field: LocalTimeField, gen: np.random.Generator,
                              m: int) -> np.ndarray:
    """m independent draws of the count at a uniformly chosen visited site.

    The site snapshot is the field's lexicographically sorted site list,
    so draws are reproducible for a fixed generator state.
    """
    if m < 1:
        raise BadParam(f"resample count must be >= 1, got {m}")
    idx = gen.integers(0, field.range, size=m)
    return field.counts[idx].astype(np.int64)


# ---------------------------------------------------------------------------
# Single-pass checkpoint series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckpointSeries:
    """Running values of L_n(alpha) and R(n) at increasing horizons.

    l_table[i][j] is L at checkpoints[i] for alphas[j]; ranges[i] is R.
    """

    checkpoints: tuple[int, ...]
    alphas: tuple[float, ...]
    l_table: tuple[tuple[float, ...], ...]
    ranges: tuple[int, ...]

    def to_csv(self) -> str:
        lines = ["n,alpha,L,L_over_n,R,R_over_n"]
        for i, n in enumerate(self.checkpoints):
            for j, a in enumerate(self.alphas):
                lv = self.l_table[i][j]
                lines.append(f"{n},{a!r},{lv!r},{lv / n!r},"
                             f"{self.ranges[i]},{self.ranges[i] / n!r}")
        return "\n".join(lines) + "\n"


def _occurrence_numbers(keys: np.ndarray) -> np.ndarray:
    """k[t] = how many times keys[t] has appeared among keys[0..t]."""
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    new_group = np.r_[True, sorted_keys[1:] != sorted_keys[:-1]]
    starts = np.flatnonzero(new_group)
    sizes = np.diff(np.r_[starts, len(keys)])
    ranks = np.arange(len(keys)) - np.repeat(starts, sizes)
    k = np.empty(len(keys), dtype=np.int64)
    k[order] = ranks + 1
    return k


def _running_l(k: np.ndarray, alpha: float) -> np.ndarray:
    """Cumulative L(alpha): each visit bumps L by k^alpha - (k-1)^alpha."""
    if alpha == 0:
        return np.cumsum(k == 1)
    if float(alpha).is_integer():
        a = int(alpha)
        kmax = int(k.max())
        if kmax ** a * len(k) < _INT64_SAFE:
            inc = k ** a - (k - 1) ** a
        else:
            inc = (k.astype(object) ** a) - ((k - 1).astype(object) ** a)
        return np.cumsum(inc)
    kf = k.astype(np.float64)
    return np.cumsum(np.power(kf, alpha) - np.power(kf - 1.0, alpha))


def simulate_series(law: StepLaw, checkpoints: Sequence[int],
                    alphas: Sequence[float], seed: int,
                    key_budget: int | None = None) -> CheckpointSeries:
    """One path, evaluated incrementally at every checkpoint.

    Checkpoint records coincide with a from-scratch l_alpha evaluation of
    the same path prefix: the running sums telescope exactly (integer
    alpha) or to within float cumsum error (non-integer alpha).  The path
    uses the same sample stream as simulate(law, n_max, seed).
    """
    checkpoints = tuple(int(c) for c in checkpoints)
    if not checkpoints or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise BadParam("checkpoints must be nonempty and strictly increasing")
    if checkpoints[0] < 1:
        raise BadParam("checkpoints must be >= 1")
    alphas = tuple(float(a) for a in alphas)
    if any(a < 0 for a in alphas):
        raise BadParam("alphas must be >= 0")
    n_max = checkpoints[-1]
    gen = rnglib.generator(seed)
    positions = _positions(law, n_max, gen)
    keys = _pack_rows(positions)
    if key_budget is not None and len(np.unique(keys)) > key_budget:
        raise ResourceLimit(f"field exceeds key budget {key_budget}")
    k = _occurrence_numbers(keys)
    idx = np.asarray(checkpoints)
    ranges = tuple(int(v) for v in np.cumsum(k == 1)[idx])
    l_rows = []
    for a in alphas:
        running = _running_l(k, a)[idx]
        l_rows.append(tuple(
            int(v) if float(a).is_integer() else float(v) for v in running))
    l_table = tuple(tuple(row[i] for row in l_rows)
                    for i in range(len(checkpoints)))
    return CheckpointSeries(checkpoints=checkpoints, alphas=alphas,
                            l_table=l_table, ranges=ranges)
