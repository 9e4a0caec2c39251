from fractions import Fraction

import numpy as np
import pytest

import walklab as wl
from walklab import rng
from walklab.steps import _sampling_arrays


class TestEnumerate:
    def test_bernoulli_n2_hand_values(self, bern07_exact):
        s = wl.enumerate_paths(bern07_exact, 2, alphas=(2,))
        assert s.expected_q == {1: Fraction(54, 25), 2: Fraction(21, 50)}
        assert s.expected_l[2] == Fraction(96, 25)  # 2.16 + 4*0.42

    def test_deterministic_n5(self):
        s = wl.enumerate_paths(wl.deterministic([1], exact=True), 5, alphas=(2, 3))
        assert s.expected_q == {1: Fraction(6)}
        assert s.variance_l == {2: 0, 3: 0}
        assert wl.exact_zn_law(s) == {1: Fraction(1)}

    def test_invariants(self, lazy_walk_exact):
        s = wl.enumerate_paths(lazy_walk_exact, 6, alphas=(2,))
        s.check_invariants()

    def test_budget_exceeded(self, bern07_exact):
        with pytest.raises(wl.BudgetExceeded):
            wl.enumerate_paths(bern07_exact, 30, budget=1000)

    def test_float_law_rejected(self, bern07):
        with pytest.raises(wl.FloatLawRejected):
            wl.enumerate_paths(bern07, 3)

    def test_variance_nonnegative(self, drifted2_exact):
        s = wl.enumerate_paths(drifted2_exact, 7, alphas=(2, 3))
        assert all(v >= 0 for v in s.variance_l.values())


class TestZnLaw:
    def test_n0_point_mass(self, bern07_exact):
        s = wl.enumerate_paths(bern07_exact, 0, alphas=())
        assert wl.exact_zn_law(s) == {1: Fraction(1)}

    def test_bernoulli_n2(self, bern07_exact):
        s = wl.enumerate_paths(bern07_exact, 2, alphas=())
        law = wl.exact_zn_law(s)
        assert law == {1: Fraction(79, 100), 2: Fraction(21, 100)}
        assert sum(law.values()) == 1


class TestExactReturnLaw:
    def test_bernoulli_gamma2(self, bern07_exact):
        ret = wl.exact_return_law(bern07_exact, 2)
        assert ret.gamma_seq[2] == Fraction(29, 50)

    def test_deterministic_all_one(self):
        ret = wl.exact_return_law(wl.deterministic([1], exact=True), 6)
        assert all(g == 1 for g in ret.gamma_seq)

    def test_srw2_recurrent_enumerable(self):
        ret = wl.exact_return_law(wl.srw(2, exact=True), 2)
        assert ret.gamma_seq[2] == Fraction(3, 4)

    @pytest.mark.parametrize("law_fixture", [
        "bern07_exact", "lazy_walk_exact", "drifted2_exact"])
    def test_matches_taboo_dp(self, law_fixture, request):
        law = request.getfixturevalue(law_fixture)
        n = 10
        assert (wl.exact_return_law(law, n).gamma_seq
                == wl.taboo_survival(law, n).gamma_seq)


_MC_M = 100_000
_MC_N = 8


@pytest.fixture(scope="module")
def mc_law():
    return wl.bernoulli("7/10", exact=True)


@pytest.fixture(scope="module")
def paths(mc_law):
    coords, cdf = _sampling_arrays(mc_law)
    gen = rng.generator(20260810)
    idx = np.searchsorted(cdf, gen.random((_MC_M, _MC_N)), side="right")
    pos = np.zeros((_MC_M, _MC_N + 1), dtype=np.int64)
    np.cumsum(coords[idx][:, :, 0], axis=1, out=pos[:, 1:])
    return gen, pos


@pytest.fixture(scope="module")
def summary(mc_law):
    return wl.enumerate_paths(mc_law, _MC_N, alphas=(2,))


class TestOracleAgainstMonteCarlo:
    """Monte Carlo means must sit inside 4-sigma oracle bands."""

    M = _MC_M

    def test_l2_mean_within_4_sigma(self, paths, summary):
        _, pos = paths
        equal = pos[:, :, None] == pos[:, None, :]
        l2 = equal.sum(axis=(1, 2))  # ordered time pairs at equal sites
        mean = l2.mean()
        mu = float(summary.expected_l[2])
        sigma = (float(summary.variance_l[2]) / self.M) ** 0.5
        assert abs(mean - mu) <= 4 * sigma

    def test_zn_law_within_4_sigma(self, paths, summary):
        gen, pos = paths
        exact = {u: float(p) for u, p in wl.exact_zn_law(summary).items()}
        picks = np.empty(self.M, dtype=np.int64)
        for i in range(self.M):
            sites, counts = np.unique(pos[i], return_counts=True)
            picks[i] = counts[gen.integers(0, len(sites))]
        for u, p in exact.items():
            freq = (picks == u).mean()
            sigma = (p * (1 - p) / self.M) ** 0.5
            assert abs(freq - p) <= 4 * sigma + 1e-12

    def test_qj_means_within_4_sigma(self, paths, summary):
        _, pos = paths
        q1 = np.empty(self.M)
        for i in range(self.M):
            _, counts = np.unique(pos[i], return_counts=True)
            q1[i] = (counts == 1).sum()
        mu = float(summary.expected_q[1])
        assert abs(q1.mean() - mu) <= 4 * q1.std(ddof=1) / self.M ** 0.5
