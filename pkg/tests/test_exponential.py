import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tscale import (Constant, GridFunction, Varying, cdot, delta_integral, exp_ominus, exp_ts,
                    lambda_fn, lambda_limit, lambda_series, lambda_threshold, monomial,
                    scaled_exp_decay, taylor_lower_bound_check)
from tscale.errors import NotRegressive
from tscale.exponential import log_exp_real, monomial_many
from tscale.fixtures import load_fixture


def test_integer_exponential(Z):
    assert exp_ts(Z, 1, 3, 0) == pytest.approx(8, rel=1e-14)
    assert exp_ts(Z, 1j, 4, 0) == pytest.approx((1 + 1j) ** 4, rel=1e-14)
    assert exp_ts(Z, 1, 0, 3) == pytest.approx(1 / 8)
    assert exp_ominus(Z, 1, 3, 0) == pytest.approx(1 / 8)


def test_alternating_exponential_is_real(Z):
    vals = [exp_ts(Z, -2, t, 0) for t in range(6)]
    assert vals == [1, -1, 1, -1, 1, -1]


def test_mixed_exponential(mixed):
    # e on [0,1], then factors 1.5, 1.5, 2 at the points 1, 1.5, 2
    assert exp_ts(mixed, 1, 3, 0) == pytest.approx(math.e * 4.5, rel=1e-13)
    z = 0.3 - 0.7j
    expected = np.exp(z) * (1 + 0.5 * z) ** 2 * (1 + z) ** 3
    assert exp_ts(mixed, z, 5, 0) == pytest.approx(expected, rel=1e-13)


def test_geometric_exponential(scales):
    G = scales["geom"]
    assert exp_ts(G, 1, 8, 1) == pytest.approx(2 * 3 * 5)
    # large arguments stay finite in log space
    assert log_exp_real(G, 1, 2.0 ** 60, 1) == pytest.approx(
        sum(math.log1p(2.0 ** k) for k in range(60)), rel=1e-13)


def test_varying_exponent(Z, R):
    f = Varying(GridFunction.vectorized(lambda t: t.astype(complex)))
    assert exp_ts(Z, f, 4, 0) == pytest.approx(24)  # prod (1 + k) for k < 4
    assert exp_ts(R, f, 2, 0) == pytest.approx(math.exp(2), rel=1e-10)
    assert exp_ts(Z, Constant(0.5), 2, 0) == pytest.approx(2.25)


def test_non_regressive_exponent_raises(Z):
    with pytest.raises(NotRegressive):
        exp_ts(Z, -1, 3, 0)


def test_monomials_closed_forms(Z, R, mixed, scales):
    assert monomial(Z, 3, 7, 2) == comb(5, 3)
    assert monomial(R, 3, 2, 0) == pytest.approx(8 / 6)
    assert monomial(mixed, 2, 3, 0) == pytest.approx(3.75)
    assert monomial(scales["geom"], 2, 8, 1) == pytest.approx(14)  # (t - s)(t - 2s)/3
    assert monomial(Z, 2, 0, 3) == pytest.approx(6)  # (t - s)(t - s - 1)/2 with t - s = -3
    assert monomial(Z, 0, 5, 1) == 1


def test_monomial_many_matches_scalar(mixed):
    ts = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 6.0])
    assert np.allclose(monomial_many(mixed, 3, ts, 0), [monomial(mixed, 3, t, 0) for t in ts])


def nested_monomial(T, n, t, s):
    """h_n by repeated delta integration of h_{n-1}."""
    g = GridFunction.constant(1.0)
    for k in range(1, n + 1):
        prev = g
        g = GridFunction.scalar(lambda x, prev=prev: delta_integral(T, prev, s, x) if x > s else 0.0)
    return g(t).real


@pytest.mark.parametrize("name,t", [("mixed", 4.0), ("densetail", 3.0), ("half", 2.5), ("geom", 8.0)])
def test_monomial_recursion_against_nested_integrals(name, t):
    T = load_fixture(name)
    s = T.window_start
    for n in (1, 2):
        assert monomial(T, n, t, s) == pytest.approx(nested_monomial(T, n, t, s), rel=1e-9)


def test_lambda_values(Z):
    assert lambda_fn(Z, 1, 2, 0) == pytest.approx(math.exp(-0.25))
    assert lambda_limit(Z, 5, 0) == 1
    assert lambda_limit(Z, 0, 5) == 0
    assert lambda_limit(Z, 1, 0) == pytest.approx(math.exp(-1))  # a single step of length 1
    assert lambda_fn(Z, 1e6, 1, 0) == pytest.approx(math.exp(-1), rel=1e-5)


def test_lambda_threshold_is_sufficient(mixed):
    x = lambda_threshold(mixed, 3, 0.5)
    for k in range(6):
        assert abs(lambda_fn(mixed, x * 2 ** k, 3, 0.5) - 1) <= 1e-6


def test_scaled_decay_closed_form(Z):
    assert scaled_exp_decay(Z, 2, 3, 0, 1e3) == pytest.approx(1e6 / 1001 ** 3, rel=1e-12)
    assert scaled_exp_decay(Z, 2, 0, 3, 10.0) == pytest.approx(100 * 11 ** 3, rel=1e-12)


def test_lambda_series_small_argument(Z):
    total, last = lambda_series(Z, 2.0, 3, 0, 60)
    assert total == pytest.approx(lambda_fn(Z, 2.0, 3, 0), abs=1e-14)
    assert abs(last) < 1e-60


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["int", "real", "mixed", "densetail", "geom", "half"]),
       st.integers(0, 19), st.integers(0, 19), st.integers(0, 19),
       st.floats(0, 1), st.floats(-1, 1))
def test_semigroup(name, i, j, k, a, b):
    T = load_fixture(name)
    pts = T.sample(T.window_start, 20)
    t, r, s = (float(pts[m]) for m in (i, j, k))
    z = complex(a, b)
    lhs = exp_ts(T, z, t, r) * exp_ts(T, z, r, s)
    rhs = exp_ts(T, z, t, s)
    assert abs(lhs - rhs) <= 1e-10 * max(1, abs(rhs))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([("int", 1.0), ("half", 0.5), ("real", 0.0)]), st.integers(1, 5),
       st.floats(0, 1), st.floats(-0.5, 0.5), st.integers(0, 19))
def test_power_identity(pair, lam, a, b, i):
    name, h = pair
    T = load_fixture(name)
    t = float(T.sample(0, 20)[i])
    z = complex(a, b)
    rhs = exp_ts(T, z, t, 0) ** lam
    assert abs(exp_ts(T, cdot(h, lam, z), t, 0) - rhs) <= 1e-10 * max(1, abs(rhs))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["int", "real", "mixed", "densetail", "geom", "half"]),
       st.integers(0, 11), st.integers(0, 11), st.integers(0, 6))
def test_monomial_signs(name, i, j, n):
    T = load_fixture(name)
    pts = T.sample(T.window_start, 12)
    lo, hi = sorted((float(pts[i]), float(pts[j])))
    assert monomial(T, n, hi, lo) >= -1e-12
    assert (-1) ** n * monomial(T, n, lo, hi) >= -1e-12


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["int", "real", "mixed", "densetail", "geom", "half"]),
       st.integers(0, 11), st.integers(0, 11), st.floats(0.05, 5))
def test_lambda_bounded_by_one(name, i, j, x):
    T = load_fixture(name)
    pts = T.sample(T.window_start, 12)
    v = lambda_fn(T, x, float(pts[i]), float(pts[j]))
    assert 0 <= v <= 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["int", "mixed", "densetail", "half"]),
       st.integers(0, 11), st.integers(0, 11), st.floats(0.1, 5))
def test_lambda_series_agrees(name, i, j, vs):
    T = load_fixture(name)
    pts = T.sample(T.window_start, 12)
    # with t >= s the series argument vs e_(-)vs(t, s) is at most vs, so no term
    # exceeds 5^5/5! and cancellation stays far below the tolerance
    s, t = sorted((float(pts[i]), float(pts[j])))
    total, _ = lambda_series(T, vs, t, s, 60)
    assert total == pytest.approx(lambda_fn(T, vs, t, s), abs=1e-10)
