"""Experiment driver: runs the limit-law experiments and renders verdicts.

Every report is a pure function of (law, parameters, seeds): records carry
their seeds, theory values carry their truncation errors, and each check
states the numbers it compared, so reruns byte-reproduce the output and a
reader can re-derive every verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.stats import chi2 as chi2_dist

from . import rng as rnglib
from .errors import BadParam, NonPositiveValue, NotALaw, TooFewPoints
from .gamma import GammaEstimate, green_at_origin, return_tail
from .path import l_alpha, sample_visited_local_time, simulate, simulate_series
from .steps import StepLaw, law_to_json, mean_and_second_moment
from .theory import geometric_pmf, moment_limit


# ---------------------------------------------------------------------------
# Small statistics helpers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricLaw:
    """Reference geometric law on {1, 2, ...} with success parameter gamma."""

    gamma: float

    def pmf(self, u: int) -> float:
        return geometric_pmf(self.gamma, u) if u >= 1 else 0.0

    def tail_beyond(self, u: int) -> float:
        return (1.0 - self.gamma) ** max(u, 0)


def tv_distance(p: Mapping[int, float], q) -> float:
    """Total variation distance between a finite law p and q.

    q may be another finite map or a GeometricLaw; a geometric q
    contributes its tail mass beyond p's support.  Raises NotALaw unless
    p is nonnegative and sums to 1 within 1e-9.
    """
    if not p:
        raise NotALaw("empty law")
    values = np.array([float(v) for v in p.values()])
    if (values < -1e-12).any():
        raise NotALaw("negative mass in law")
    if abs(values.sum() - 1.0) > 1e-9:
        raise NotALaw(f"law sums to {values.sum()!r}, not 1")
    if isinstance(q, GeometricLaw):
        top = max(max(p), 1)
        support = set(p) | set(range(1, top + 1))
        total = sum(abs(p.get(u, 0.0) - q.pmf(u)) for u in support)
        return 0.5 * (total + q.tail_beyond(top))
    support = set(p) | set(q)
    return 0.5 * sum(abs(p.get(u, 0.0) - q.get(u, 0.0)) for u in support)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    pvalue: float
    dof: int
    buckets: tuple[dict, ...]


def geometric_chi_square(counts: Mapping[int, int], gamma: float,
                         tail_mass: float = 1e-3,
                         min_expected: float = 5.0) -> ChiSquareResult:
    """Chi-square fit of observed visit-count draws against Geom(gamma).

    Buckets {1..U, >U} with U chosen so the geometric tail beyond U is
    below tail_mass; buckets with expected count below min_expected are
    merged from the right (standard validity conditions).
    """
    total = sum(counts.values())
    if total < 1:
        raise BadParam("need at least one observation")
    if gamma >= 1.0:
        u_cut = 1
    else:
        u_cut = max(1, math.ceil(math.log(tail_mass) / math.log(1.0 - gamma)))
    ref = GeometricLaw(gamma)
    probs = [ref.pmf(u) for u in range(1, u_cut + 1)] + [ref.tail_beyond(u_cut)]
    obs = [counts.get(u, 0) for u in range(1, u_cut + 1)]
    obs.append(total - sum(obs))
    labels = [str(u) for u in range(1, u_cut + 1)] + [f">{u_cut}"]
    while len(probs) > 1 and probs[-1] * total < min_expected:
        p_tail, o_tail, l_tail = probs.pop(), obs.pop(), labels.pop()
        probs[-1] += p_tail
        obs[-1] += o_tail
        labels[-1] = labels[-1] + "+" + l_tail
    expected = [pr * total for pr in probs]
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, expected) if e > 0)
    dof = len(probs) - 1
    pvalue = float(chi2_dist.sf(stat, dof)) if dof > 0 else 1.0
    buckets = tuple({"bucket": lb, "observed": int(o), "expected": float(e)}
                    for lb, o, e in zip(labels, obs, expected))
    return ChiSquareResult(statistic=float(stat), pvalue=pvalue, dof=dof,
                           buckets=buckets)


@dataclass(frozen=True)
class FitResult:
    """Least-squares power-law fit on log-log axes."""

    slope: float
    intercept: float
    residual_norm: float


def fit_exponent(points: Sequence[tuple[float, float]]) -> FitResult:
    """OLS fit of log v against log n."""
    if len(points) < 3:
        raise TooFewPoints(f"need >= 3 points, got {len(points)}")
    if any(v <= 0 for _, v in points):
        raise NonPositiveValue("log-log fit needs positive values")
    xs = np.log([float(n) for n, _ in points])
    ys = np.log([float(v) for _, v in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return FitResult(slope=float(slope), intercept=float(intercept),
                     residual_norm=float(np.sqrt((resid ** 2).sum())))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _to_py(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    raise TypeError(f"not JSON-serializable: {type(obj)}")


@dataclass
class ExperimentReport:
    """Machine-readable outcome of one experiment."""

    kind: str
    law: dict
    params: dict
    seeds: tuple[int, ...]
    gamma: dict | None
    theory: dict
    records: list[dict]
    stats: dict
    checks: list[dict]
    tolerances: dict
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def failures(self) -> list[str]:
        return [c["name"] for c in self.checks if not c["ok"]]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "law": self.law,
            "params": self.params,
            "seeds": list(self.seeds),
            "gamma": self.gamma,
            "theory": self.theory,
            "records": self.records,
            "stats": self.stats,
            "checks": self.checks,
            "tolerances": self.tolerances,
            "notes": self.notes,
            "verdict": self.verdict,
        }

    def to_json_bytes(self) -> bytes:
        text = json.dumps(self.to_json_dict(), sort_keys=True, indent=2,
                          default=_to_py)
        return text.encode() + b"\n"

    def csv_columns(self) -> list[str]:
        cols: list[str] = []
        for rec in self.records:
            for key in rec:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_csv(self) -> str:
        cols = self.csv_columns()
        lines = [",".join(cols)]
        for rec in self.records:
            cells = []
            for key in cols:
                v = rec.get(key, "")
                cells.append(repr(v) if isinstance(v, float) else str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _gamma_dict(est: GammaEstimate) -> dict:
    out = {"value": est.value, "error": est.error, "method": est.method,
           "params": est.params}
    if est.seed is not None:
        out["seed"] = est.seed
    return out


def auto_gamma(law: StepLaw, n: int | None = None) -> GammaEstimate:
    """Default Green-series gamma estimate with an engine-aware horizon."""
    from .gamma import _axis_decomposition
    if n is None:
        if _axis_decomposition(law) is not None:
            n = 4096
        elif law.d == 1:
            n = 2048
        else:
            n = 512
    return green_at_origin(law, n)


def _low_dim_notes(law: StepLaw) -> dict:
    """The two alternative d in {1,2} assumptions, reported side by side."""
    if law.d > 2:
        return {}
    mean, second = mean_and_second_moment(law.to_float())
    tail = return_tail(law, 16, 512)
    return {
        "low_dim_assumptions": {
            "second_moment_finite": True,
            "drift": [float(x) for x in mean],
            "second_moment": [[float(x) for x in row] for row in second],
            "return_tail_eta_hat": tail.eta_hat,
        }
    }


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def run_slln(law: StepLaw, alphas: Sequence[float], checkpoints: Sequence[int],
             seeds: Sequence[int], gamma_est: GammaEstimate | None = None,
             rel_tol: float = 0.05,
             key_budget: int | None = None) -> ExperimentReport:
    """Strong-law experiment: L_n(alpha)/n against the geometric moment sum.

    One path per seed; the verdict compares the final-checkpoint ratio
    for each alpha with the theory value at the estimated gamma, and the
    range ratio R(n)/n with gamma itself.  The relative tolerance is an
    engineering band: almost-sure convergence comes with no rate.
    """
    alphas = [float(a) for a in alphas]
    gamma_est = gamma_est or auto_gamma(law)
    g = gamma_est.value
    theory = {str(a): {"value": moment_limit(a, g).value,
                       "truncation_error": moment_limit(a, g).truncation_error}
              for a in alphas}
    records = []
    checks = []
    n_final = int(checkpoints[-1])
    for seed in seeds:
        series = simulate_series(law, checkpoints, alphas, seed,
                                 key_budget=key_budget)
        for i, n in enumerate(series.checkpoints):
            for j, a in enumerate(series.alphas):
                records.append({
                    "seed": seed, "n": n, "alpha": a,
                    "L": float(series.l_table[i][j]),
                    "L_over_n": float(series.l_table[i][j]) / n,
                    "R": series.ranges[i],
                    "R_over_n": series.ranges[i] / n,
                })
        for j, a in enumerate(series.alphas):
            ratio = float(series.l_table[-1][j]) / n_final
            t_val = theory[str(a)]["value"]
            checks.append({
                "name": f"slln/seed={seed}/alpha={a}",
                "observed": ratio, "expected": t_val,
                "rel_err": abs(ratio - t_val) / t_val,
                "rel_tol": rel_tol,
                "ok": abs(ratio - t_val) <= rel_tol * t_val,
            })
        range_ratio = series.ranges[-1] / n_final
        checks.append({
            "name": f"slln/seed={seed}/range",
            "observed": range_ratio, "expected": g,
            "rel_err": abs(range_ratio - g) / g,
            "rel_tol": rel_tol,
            "ok": abs(range_ratio - g) <= rel_tol * g,
        })
    return ExperimentReport(
        kind="slln", law=law_to_json(law),
        params={"alphas": [float(a) for a in alphas],
                "checkpoints": [int(c) for c in checkpoints]},
        seeds=tuple(int(s) for s in seeds),
        gamma=_gamma_dict(gamma_est), theory=theory, records=records,
        stats={}, checks=checks, tolerances={"rel_tol": rel_tol},
        notes=_low_dim_notes(law))


def run_geometric(law: StepLaw, n: int, m: int, seeds: Sequence[int],
                  gamma_est: GammaEstimate | None = None,
                  tv_bar: float = 0.02, p_floor: float = 1e-4,
                  key_budget: int | None = None) -> ExperimentReport:
    """Limit-law experiment: empirical visit count at a uniform visited site.

    One path per seed, resampled m times; reports the total-variation
    distance of the empirical law to Geom(gamma) and a chi-square over
    buckets holding all but 1e-3 of the geometric mass.
    """
    gamma_est = gamma_est or auto_gamma(law)
    g = gamma_est.value
    ref = GeometricLaw(g)
    records = []
    checks = []
    stats: dict = {"per_seed": []}
    for seed in seeds:
        fld = simulate(law, n, seed, key_budget=key_budget)
        draws = sample_visited_local_time(fld, rnglib.replica_generator(seed, 1), m)
        tally = np.bincount(draws)
        counts = {int(u): int(tally[u]) for u in np.flatnonzero(tally)}
        emp = {u: c / m for u, c in counts.items()}
        tv = tv_distance(emp, ref)
        chi = geometric_chi_square(counts, g)
        stats["per_seed"].append({"seed": seed, "tv": tv,
                                  "chi2": chi.statistic, "dof": chi.dof,
                                  "pvalue": chi.pvalue})
        for u in sorted(emp):
            records.append({"seed": seed, "u": u, "empirical": emp[u],
                            "theory": ref.pmf(u)})
        checks.append({"name": f"geom/seed={seed}/tv", "observed": tv,
                       "bound": tv_bar, "ok": tv < tv_bar})
        checks.append({"name": f"geom/seed={seed}/chi2_p",
                       "observed": chi.pvalue, "bound": p_floor,
                       "ok": chi.pvalue > p_floor})
    return ExperimentReport(
        kind="geometric", law=law_to_json(law),
        params={"n": int(n), "M": int(m)},
        seeds=tuple(int(s) for s in seeds),
        gamma=_gamma_dict(gamma_est),
        theory={"pmf": "geometric", "gamma": g},
        records=records, stats=stats, checks=checks,
        tolerances={"tv_bar": tv_bar, "p_floor": p_floor})


_ENVELOPES: dict[int, tuple[str, Callable[[float], float]]] = {
    1: ("n^1.5*log(n)", lambda n: n ** 1.5 * math.log(n)),
    2: ("n*log(n)^2", lambda n: n * math.log(n) ** 2),
    3: ("n^1.5", lambda n: n ** 1.5),
    4: ("n*log(n)", lambda n: n * math.log(n)),
    5: ("n", lambda n: float(n)),
}


def variance_envelope(d: int) -> tuple[str, Callable[[float], float]]:
    """The dimension-dependent variance growth envelope."""
    return _ENVELOPES[min(d, 5)]


def variance_scan(law: StepLaw, alpha: int, grid: Sequence[int], m: int,
                  seed: int, safety: float = 10.0,
                  slope_cap: float | None = None,
                  key_budget: int | None = None) -> ExperimentReport:
    """Sample-variance growth of L_n(alpha) against its envelope.

    m independent replicas per grid point (replica seeds are
    mix64(seed, flat index)); the envelope constant is calibrated at the
    smallest grid point and multiplied by the safety factor, since the
    bounds hold up to an unspecified constant.
    """
    if not float(alpha).is_integer() or alpha < 1:
        raise BadParam(f"variance scan needs integer alpha >= 1, got {alpha}")
    alpha = int(alpha)
    grid = [int(n) for n in grid]
    if sorted(grid) != grid or len(set(grid)) != len(grid):
        raise BadParam("grid must be strictly increasing")
    env_name, env = variance_envelope(law.d)
    records = []
    variances = []
    for gi, n in enumerate(grid):
        vals = np.empty(m)
        for i in range(m):
            replica_seed = rnglib.mix64(seed, gi * m + i)
            fld = simulate(law, n, replica_seed, key_budget=key_budget)
            vals[i] = float(l_alpha(fld, alpha))
        var = float(np.var(vals, ddof=1))
        s1, s2 = vals.sum(), (vals ** 2).sum()
        loo = (s2 - vals ** 2 - (s1 - vals) ** 2 / (m - 1)) / (m - 2)
        se_jack = float(np.sqrt((m - 1) / m * ((loo - loo.mean()) ** 2).sum()))
        variances.append(var)
        records.append({"n": n, "variance": var, "jackknife_se": se_jack,
                        "mean_L": float(vals.mean()), "envelope": env(n)})
    c_cal = variances[0] / env(grid[0]) if env(grid[0]) > 0 else 0.0
    checks = []
    for rec in records:
        bound = safety * c_cal * rec["envelope"]
        checks.append({"name": f"variance/n={rec['n']}",
                       "observed": rec["variance"], "bound": bound,
                       "ok": rec["variance"] <= bound})
    fit = None
    if all(v > 0 for v in variances):
        fit = fit_exponent(list(zip(grid, variances)))
        if slope_cap is not None:
            checks.append({"name": "variance/slope", "observed": fit.slope,
                           "bound": slope_cap, "ok": fit.slope <= slope_cap})
    elif slope_cap is not None:
        checks.append({"name": "variance/slope",
                       "observed": None, "bound": slope_cap, "ok": True,
                       "note": "all variances zero; slope vacuous"})
    stats = {"calibration_constant": c_cal, "envelope": env_name}
    if fit is not None:
        stats["fit"] = {"slope": fit.slope, "intercept": fit.intercept,
                        "residual_norm": fit.residual_norm}
    return ExperimentReport(
        kind="variance_scan", law=law_to_json(law),
        params={"alpha": alpha, "grid": grid, "M": int(m)},
        seeds=(int(seed),), gamma=None,
        theory={"envelope": env_name},
        records=records, stats=stats, checks=checks,
        tolerances={"safety": safety, "slope_cap": slope_cap})
