import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tscale import (GridFunction, LatticeSpec, char_approx, char_limit, chi_shift_check,
                    constant_graininess_reduce, cplus, cdot, lattice_sweep, lerch_verify,
                    modulated_null_check, null_check, parse_expr)
from tscale.errors import (DenseBoundary, NonConstantGraininess, NotRegressive, OutsideRegion)
from tscale.fixtures import load_fixture
from tscale.laplace import laplace
from tscale.lerch import classify, write_lattice_csv


def bind(T, text, s=None):
    return parse_expr(text).bind(T, T.window_start if s is None else s)


def test_classify_bands():
    assert classify(1e-8, 1e-7) == "null"
    assert classify(5e-7, 1e-7) == "inconclusive"
    assert classify(2e-6, 1e-7) == "not_null"


def test_null_check_sees_point_masses(mixed):
    assert null_check(mixed, bind(mixed, "ind(0.5)"), 0, 6).verdict == "null"
    r = null_check(mixed, bind(mixed, "ind(1.5)"), 0, 6)
    assert r.verdict == "not_null"
    assert r.max_cumulative == pytest.approx(0.5)
    assert r.worst_node == 2.0


def test_null_check_needs_a_range(Z):
    with pytest.raises(ValueError):
        null_check(Z, 1.0, 3, 3)


def test_lattice_spec_validation():
    spec = LatticeSpec(1, (0.5, 1, 2), 3)
    assert spec.shape == (4, 3)
    assert spec.k_max == 2
    assert LatticeSpec(1, (0, 1, 2, 3), 1, k_max=1).varsigma_seq == (0.0, 1.0)
    for bad in [(), (1, 1), (2, 1), (-1, 1)]:
        with pytest.raises(ValueError):
            LatticeSpec(1, bad, 1)
    with pytest.raises(ValueError):
        LatticeSpec(1, (1, 2), -1)
    with pytest.raises(ValueError):
        LatticeSpec(1, (1, 2), 1, k_max=2)


def test_impulse_lattice(Z):
    # one term: f(0) mu(0) e_(-)vs(1, 0)^n e_(-)1(1, 0) = (1 + vs)^-n / 2
    v = lerch_verify(Z, bind(Z, "ind(0)"), 0, LatticeSpec(1, (1, 2, 3), 3), 8)
    assert v.witness == (0, 0)
    assert abs(v.cells[0][0].value) == pytest.approx(0.5, abs=1e-10)
    assert v.cells[3][2].value == pytest.approx(0.5 / 64, abs=1e-12)
    assert v.cells[2][0].value == pytest.approx(0.125, abs=1e-12)
    assert not v.hypothesis_holds
    assert v.null_report.verdict == "not_null"
    assert not v.falsification


@pytest.mark.parametrize("text", ["0", "ind(0.5)"])
def test_null_functions_satisfy_the_hypothesis(mixed, text):
    v = lerch_verify(mixed, bind(mixed, text), 0, LatticeSpec(1, (1, 2), 2), 6)
    assert v.hypothesis_holds
    assert v.witness is None
    assert v.null_report.verdict == "null"


def test_shared_and_cellwise_sweeps_agree(mixed):
    f = bind(mixed, "cos(t)*etsinv(0.5)")
    spec = LatticeSpec(0.75, (0, 0.5, 2), 3)
    a = lattice_sweep(mixed, f, 0, spec)
    b = lattice_sweep(mixed, f, 0, spec, shared=False)
    for ra, rb in zip(a, b):
        for ca, cb in zip(ra, rb):
            assert abs(ca.value - cb.value) <= 1e-10


def test_lattice_cells_are_modulated_transforms(Z):
    f = bind(Z, "t*etsinv(1)")
    spec = LatticeSpec(0.5, (1, 3), 2)
    cells = lattice_sweep(Z, f, 0, spec)
    # on Z, e_(-)vs^n e_(-)alpha = e_(-)(alpha (+) n (.) vs)
    for n in range(3):
        for k, vs in enumerate(spec.varsigma_seq):
            ref = laplace(Z, f, 0, cplus(1, 0.5, cdot(1, n, vs))).value
            assert cells[n][k].value == pytest.approx(ref, abs=1e-10)


def test_lattice_spec_checks(Z):
    with pytest.raises(NotRegressive):
        lattice_sweep(Z, 1.0, 0, LatticeSpec(-1.5, (1,), 1))
    with pytest.raises(OutsideRegion):
        lattice_sweep(Z, 1.0, 0, LatticeSpec(-0.5, (1,), 1))


def test_lattice_csv(Z):
    v = lerch_verify(Z, bind(Z, "ind(0)"), 0, LatticeSpec(1, (1, 3), 1), 4)
    buf = io.StringIO()
    write_lattice_csv(v.cells, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,k,re,im,converged,tail_estimate"
    assert lines[1].startswith("0,0,0.5,0.0,true,")
    assert len(lines) == 5


def test_modulated_null_closure(mixed):
    for g in ("t^2", "ets(1)", "exp(3*t)", "chi(0,2)"):
        r = modulated_null_check(mixed, bind(mixed, "ind(0.5)"), bind(mixed, g), 0, 6)
        assert r.verdict == "null"
        assert r.max_cumulative <= 1e-8


def test_chi_shift_exact(Z, mixed, R):
    assert chi_shift_check(Z, 0, 3, 2) == 0
    assert chi_shift_check(mixed, 0, 2, 1.5) == 0
    assert chi_shift_check(R, 0, 3, 1) == 0
    with pytest.raises(DenseBoundary):
        chi_shift_check(R, 0, 3, 3)


def test_constant_graininess_reduce(Z, mixed):
    spec = constant_graininess_reduce(Z, 0, 1.0, 1.0, 2, 3)
    assert spec.varsigma_seq == pytest.approx((1.0, 3.0, 7.0), rel=1e-14)  # (1 + 1)^k - 1
    assert spec.alpha == 1
    with pytest.raises(NonConstantGraininess):
        constant_graininess_reduce(mixed, 0, 1.0, 1.0, 2, 3)
    with pytest.raises(OutsideRegion):
        constant_graininess_reduce(Z, 0, 0.5, 1.0, 2, 3, growth=1)
    with pytest.raises(ValueError):
        constant_graininess_reduce(Z, 0, 1.0, 1.0, 2, 0)


def test_reduced_lattice_matches_transforms(scales):
    T = scales["half"]
    spec = constant_graininess_reduce(T, 0, 1.0, 0.5, 2, 2)
    f = bind(T, "cos(t)")
    cells = lattice_sweep(T, f, 0, spec)
    for n in range(3):
        for k in range(2):
            point = cplus(0.5, 1.0, cdot(0.5, n * (k + 1), 0.5))
            assert cells[n][k].value == pytest.approx(laplace(T, f, 0, point).value, abs=1e-10)


def test_char_limit_oracle(Z, mixed):
    # eta = 4..9 have sigma(eta) > sigma(t) and weight 1; at eta = t the single step
    # from t to sigma(eta) = 4 gives exp(-1/mu)
    assert char_limit(Z, 1.0, 0, 3, 10) == pytest.approx(6 + math.exp(-1), rel=1e-14)
    # on [0,1] the dense part right of t = 0.5 contributes 0.5
    lim = char_limit(mixed, 1.0, 0, 0.5, 3)
    assert lim == pytest.approx(0.5 + 0.5 + 0.5 + 1.0)


def test_char_approx_error_halves_on_integers(Z):
    errs = [abs(char_approx(Z, 1.0, 0, 3, vs, 10) - char_limit(Z, 1.0, 0, 3, 10))
            for vs in (512, 1024, 2048, 4096)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 0.5 * 1.01 * a


def test_char_approx_dense_point_decreases(mixed):
    lim = char_limit(mixed, 1.0, 0, 0.5, 3)
    errs = [abs(char_approx(mixed, 1.0, 0, 0.5, vs, 3) - lim) for vs in (256, 512, 1024, 2048)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 0.6 * a


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["int", "mixed", "densetail", "half", "geom"]),
       st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2))
def test_no_falsification(name, a, b, alpha):
    T = load_fixture(name)
    s = T.window_start
    f = GridFunction.vectorized(lambda t: a * np.exp(-(t - s)) + b * np.cos(2 * (t - s)))
    v = lerch_verify(T, f, s, LatticeSpec(alpha, (0.5, 1.5), 2), float(T.sample(s, 8)[-1]))
    assert not v.falsification


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["int", "mixed", "densetail", "half", "geom"]), st.integers(0, 29),
       st.integers(0, 29))
def test_chi_shift_property(name, i, j):
    T = load_fixture(name)
    pts = T.sample(T.window_start, 30)
    eta, t = float(pts[i]), float(pts[j])
    if T.graininess(eta) == 0 and eta == t:
        with pytest.raises(DenseBoundary):
            chi_shift_check(T, T.window_start, t, eta)
    else:
        assert chi_shift_check(T, T.window_start, t, eta) == 0
