import cmath
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from tscale import (RegionSpec, TimeScale, cdot, cminus, cneg, cplus, cylinder, hilger_im,
                    hilger_re, in_region, is_pos_regressive, is_regressive)
from tscale.errors import NotRegressive

coord = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, coord, coord)
grain = st.sampled_from([0.0, 0.01, 0.5, 1.0, 2.0, 3.0])


def test_closed_forms():
    assert hilger_re(1, 1) == pytest.approx(1.0)
    assert hilger_re(2, 1j) == pytest.approx((math.sqrt(5) - 1) / 2)
    assert hilger_im(1, -2) == pytest.approx(math.pi)  # 1 + hz = -1 on the branch cut
    assert cylinder(1, 1) == pytest.approx(math.log(2))
    assert cplus(1, 1, 1) == 3
    assert cneg(1, 1) == pytest.approx(-0.5)
    assert cdot(1, 2, 1) == pytest.approx(3.0)
    assert cdot(0, 2.5, 1 + 1j) == 2.5 + 2.5j


def test_h_zero_is_classical():
    z, w = 1.5 - 2j, -0.5 + 0.25j
    assert hilger_re(0, z) == 1.5
    assert hilger_im(0, z) == -2
    assert cylinder(0, z) == z
    assert cplus(0, z, w) == z + w
    assert cminus(0, z, w) == z - w


def test_small_h_real_part_is_accurate():
    # (|1+hz| - 1)/h would lose every digit here
    assert hilger_re(1e-12, 1 + 1j) == pytest.approx(1 + 1e-12, rel=1e-12)


def test_singular_point_raises():
    with pytest.raises(NotRegressive):
        cylinder(0.5, -2)
    with pytest.raises(NotRegressive):
        cminus(1, 0, -1)


@settings(max_examples=300, deadline=None)
@given(grain, cplx, cplx, cplx)
def test_group_laws(h, z, w, v):
    scale = (1 + abs(z)) * (1 + abs(w)) * (1 + abs(v)) * (1 + h) ** 2
    assert abs(cplus(h, cplus(h, z, w), v) - cplus(h, z, cplus(h, w, v))) <= 1e-12 * scale
    assert abs(cplus(h, z, w) - cplus(h, w, z)) <= 1e-14 * scale
    assert cplus(h, z, 0) == z
    assume(abs(1 + h * z) > 1e-3)
    assert abs(cplus(h, z, cneg(h, z))) <= 1e-10 * scale


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 3), cplx)
def test_cylinder_strip_and_round_trip(h, z):
    assume(abs(1 + h * z) > 1e-3)
    c = cylinder(h, z)
    assert -math.pi / h < c.imag <= math.pi / h
    assert abs(cmath.exp(h * c) - (1 + h * z)) <= 1e-12 * max(1, abs(1 + h * z))
    assert c.real == pytest.approx(math.log(abs(1 + h * z)) / h, rel=1e-9, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(cplx, st.floats(0, 3), st.floats(0, 3))
def test_hilger_real_part_nondecreasing_in_h(z, h1, h2):
    lo, hi = sorted((h1, h2))
    assume(min(abs(1 + lo * z), abs(1 + hi * z)) > 1e-3)
    assert hilger_re(lo, z) <= hilger_re(hi, z) + 1e-10


@settings(max_examples=300, deadline=None)
@given(grain, st.builds(complex, st.floats(-1, 1), st.floats(-1, 1)), st.integers(1, 6))
def test_cdot_integer_is_repeated_plus(h, z, m):
    acc = z
    for _ in range(m - 1):
        acc = cplus(h, acc, z)
    assert abs(cdot(h, m, z) - acc) <= 1e-10 * max(1, abs(acc))


def test_regressivity(scales):
    Z = scales["int"]
    assert not is_regressive(Z, 0, -1)
    assert is_regressive(Z, 0, -2)
    assert is_regressive(Z, 0, -1 + 1e-3j)
    assert not is_regressive(scales["half"], 0, -2)
    assert not is_regressive(scales["mixed"], 0, -2)   # graininess 0.5 at 1 and 1.5
    assert is_regressive(scales["mixed"], 2, -2)        # only graininess 1 from 2 on
    G = scales["geom"]
    assert not is_regressive(G, 1, -1 / 4)
    assert is_regressive(G, 8, -1 / 4)


def test_positive_regressivity(scales):
    Z = scales["int"]
    assert is_pos_regressive(Z, 0, 0.5)
    assert is_pos_regressive(Z, 0, -0.5)
    assert not is_pos_regressive(Z, 0, -1)
    assert not is_pos_regressive(Z, 0, 1j)
    assert is_pos_regressive(scales["real"], 0, 1j)
    assert not is_pos_regressive(scales["geom"], 1, -0.01)  # graininess is unbounded


def test_region_membership():
    assert in_region(RegionSpec(1, 0), 1)
    assert not in_region(RegionSpec(1, 0), -0.5)
    assert in_region(RegionSpec(1, 0), -3)      # |1 + z| = 2 > 1
    assert 0.5 + 0j in RegionSpec(0, 0.25)
    with pytest.raises(ValueError):
        RegionSpec(-1, 0)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([0.0, 0.5, 1.0, 2.0]), cplx, st.floats(0, 3))
def test_region_closed_under_right_shift_right_of_centre(h, z, delta):
    region = RegionSpec(h, 0.0)
    assume((1 + h * z).real >= 0 and abs(1 + h * z) > 1e-9)
    if in_region(region, z):
        assert in_region(region, z + delta)


def test_region_not_monotone_left_of_centre():
    region = RegionSpec(1.0, 0.0)
    z = -1.62 - 0.94j
    assert in_region(region, z)
    assert not in_region(region, z + 0.6)
