from fractions import Fraction

import pytest

import walklab as wl


@pytest.fixture
def bern07():
    return wl.bernoulli(0.7)


@pytest.fixture
def bern07_exact():
    return wl.bernoulli("7/10", exact=True)


@pytest.fixture
def srw3():
    return wl.srw(3)


@pytest.fixture
def det1():
    return wl.deterministic([1])


@pytest.fixture
def lazy_walk_exact():
    """d=1 walk with a zero-step atom, exact masses."""
    return wl.make_law(
        1,
        [((1,), Fraction(2, 5)), ((-1,), Fraction(2, 5)), ((0,), Fraction(1, 5))],
        exact=True)


@pytest.fixture
def drifted2_exact():
    """Two-atom genuinely 2-dimensional drifted law."""
    return wl.make_law(2, [((1, 0), Fraction(3, 4)), ((0, 1), Fraction(1, 4))],
                       exact=True)
