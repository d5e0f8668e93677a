"""A quick property suite over the shipped fixtures.

Each check samples a few dozen random cases so the whole run takes seconds;
the test suite exercises the same properties at full size.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import calculus as calc
from . import exponential as ex
from . import hilger as hl
from . import lerch as lr
from .calculus import GridFunction
from .expr import parse_expr
from .fixtures import all_fixtures, expression_corpus
from .laplace import convergence_region, laplace, modulated_laplace
from .timescale import TimeScale


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str
    seconds: float


CHECKS: list[tuple[str, str, Callable]] = []


def check(module: str, name: str):
    def deco(fn):
        CHECKS.append((module, name, fn))
        return fn
    return deco


def _complex(rng, scale=2.0):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def _points(T: TimeScale, s: float, n: int) -> np.ndarray:
    return T.sample(s, n)


def _poly(c):
    return GridFunction.vectorized(lambda t: c[0] + c[1] * t + c[2] * t * t)


# -- timescale ---------------------------------------------------------------

@check("timescale", "sigma > t exactly when mu > 0; sigma fixes right-dense points")
def _sigma_mu(F, rng):
    for T in F.values():
        for t in _points(T, T.window_start, 40):
            sig, mu = T.sigma(t), T.graininess(t)
            if (sig > t) != (mu > 0):
                return False, f"t={t}"
            if mu == 0 and T.sigma(sig) != sig:
                return False, f"sigma not idempotent at {t}"
    return True, ""


@check("timescale", "partition measure equals b - a")
def _measure(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 30)
        a, b = sorted(rng.choice(pts, 2, replace=False))
        if abs(T.partition(a, b).measure - (b - a)) > 1e-12 * max(1, b):
            return False, f"[{a}, {b})"
    return True, ""


@check("timescale", "min_graininess bounds every sampled graininess")
def _inf(F, rng):
    for T in F.values():
        s = T.window_start
        m = T.min_graininess(s)
        if any(T.graininess(t) < m for t in _points(T, s, 200)):
            return False, str(T)
    return True, ""


# -- hilger ------------------------------------------------------------------

@check("hilger", "group laws of circle plus")
def _group(F, rng):
    for _ in range(200):
        h = float(rng.choice([0, 0.1, 1, 3]))
        z, w, v = (_complex(rng) for _ in range(3))
        if abs(hl.cplus(h, hl.cplus(h, z, w), v) - hl.cplus(h, z, hl.cplus(h, w, v))) > 1e-9 * (1 + abs(z * w * v) * h * h):
            return False, "associativity"
        if abs(hl.cplus(h, z, w) - hl.cplus(h, w, z)) > 1e-12 * (1 + abs(z * w)):
            return False, "commutativity"
        if abs(1 + h * w) > 1e-3:
            if abs(hl.cplus(h, z, hl.cneg(h, z))) > 1e-9 * (1 + abs(z)) * (1 + h * abs(z)):
                return False, "inverse"
            if abs(hl.cminus(h, z, w) - hl.cplus(h, z, hl.cneg(h, w))) > 1e-9 * (1 + abs(z) + abs(w)) ** 2:
                return False, "minus"
    return True, ""


@check("hilger", "Hilger real part is nondecreasing in h")
def _mono(F, rng):
    for _ in range(200):
        z = _complex(rng)
        h1, h2 = sorted(rng.uniform(0, 3, 2))[::-1]
        if min(abs(1 + h1 * z), abs(1 + h2 * z)) < 1e-3:
            continue
        if hl.hilger_re(h1, z) < hl.hilger_re(h2, z) - 1e-10:
            return False, f"z={z}"
    return True, ""


@check("hilger", "cylinder lands in the strip and round-trips")
def _cyl(F, rng):
    for _ in range(200):
        h, z = float(rng.uniform(0.01, 3)), _complex(rng)
        if abs(1 + h * z) < 1e-3:
            continue
        c = hl.cylinder(h, z)
        if not -math.pi / h < c.imag <= math.pi / h:
            return False, "strip"
        if abs(np.exp(h * c) - (1 + h * z)) > 1e-12 * max(1, abs(1 + h * z)):
            return False, "round trip"
    return True, ""


@check("hilger", "circle dot by an integer is repeated circle plus")
def _cdot(F, rng):
    for _ in range(200):
        h, z, m = float(rng.choice([0, 0.1, 1, 3])), _complex(rng, 1), int(rng.integers(1, 6))
        acc = z
        for _ in range(m - 1):
            acc = hl.cplus(h, acc, z)
        if abs(hl.cdot(h, m, z) - acc) > 1e-10 * max(1, abs(acc)):
            return False, f"h={h} m={m} z={z}"
    return True, ""


# -- calculus ----------------------------------------------------------------

@check("calculus", "integral is linear and additive")
def _linear(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 20)
        a, m, b = sorted(rng.choice(pts, 3, replace=False))
        f, g = _poly(rng.normal(size=3)), _poly(rng.normal(size=3))
        x, y = rng.normal(size=2)
        lhs = calc.delta_integral(T, x * f + y * g, a, b)
        rhs = x * calc.delta_integral(T, f, a, b) + y * calc.delta_integral(T, g, a, b)
        split = calc.delta_integral(T, f, a, m) + calc.delta_integral(T, f, m, b)
        scale = 1 + abs(lhs)
        if abs(lhs - rhs) > 1e-9 * scale or abs(split - calc.delta_integral(T, f, a, b)) > 1e-9 * scale:
            return False, str(T)
    return True, ""


@check("calculus", "integral of one is the length; cumulative ends at the integral")
def _one(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 20)
        a, b = sorted(rng.choice(pts, 2, replace=False))
        if abs(calc.delta_integral(T, 1.0, a, b) - (b - a)) > 1e-10 * max(1, b):
            return False, "length"
        f = _poly(rng.normal(size=3))
        tab = calc.cumulative(T, f, a, b)
        ref = calc.delta_integral(T, f, a, b)
        if abs(tab.values[-1] - ref) > 1e-10 * max(1, abs(ref)):
            return False, "cumulative"
    return True, ""


@check("calculus", "sigma shift f(sigma t) = f(t) + mu f^Delta(t)")
def _shift(F, rng):
    for T in F.values():
        f = _poly(rng.normal(size=3))
        for t in _points(T, T.window_start, 10):
            if abs(calc.sigma_shift_residual(T, f, t)) > 1e-7 * (1 + t * t):
                return False, f"t={t}"
    return True, ""


@check("calculus", "integration by parts for polynomials")
def _parts(F, rng):
    for name in ("mixed", "densetail", "int"):
        T = F[name]
        c, d = rng.normal(size=3), rng.normal(size=3)
        pts = _points(T, T.window_start, 12)
        t = float(pts[-1])
        r = calc.integration_by_parts_check(T, _poly(c), _poly(d), T.window_start, t)
        if abs(r) > 1e-8 * (1 + t ** 4):
            return False, f"{name}: residual {abs(r):.3g}"
    return True, ""


# -- exponential -------------------------------------------------------------

@check("exponential", "semigroup e(t,r) e(r,s) = e(t,s)")
def _semi(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 20)
        for _ in range(10):
            t, r, s = rng.choice(pts, 3)
            z = complex(rng.uniform(0, 1), rng.uniform(-1, 1))
            lhs = ex.exp_ts(T, z, t, r) * ex.exp_ts(T, z, r, s)
            rhs = ex.exp_ts(T, z, t, s)
            if abs(lhs - rhs) > 1e-10 * max(1, abs(rhs)):
                return False, f"{t},{r},{s}"
    return True, ""


@check("exponential", "power identity on constant graininess")
def _power(F, rng):
    for name, h in (("int", 1.0), ("half", 0.5), ("real", 0.0)):
        T = F[name]
        pts = _points(T, 0, 20)
        for _ in range(10):
            lam, z, t = int(rng.integers(1, 5)), complex(rng.uniform(0, 1), rng.uniform(-0.5, 0.5)), rng.choice(pts)
            lhs = ex.exp_ts(T, hl.cdot(h, lam, z), t, 0)
            rhs = ex.exp_ts(T, z, t, 0) ** lam
            if abs(lhs - rhs) > 1e-10 * max(1, abs(rhs)):
                return False, f"{name} t={t}"
    return True, ""


@check("exponential", "positivity and sign alternation")
def _sign(F, rng):
    for T in F.values():
        for t in _points(T, T.window_start, 20):
            if not ex.exp_ts(T, float(rng.uniform(0, 2)), t, T.window_start).real > 0:
                return False, "positivity"
    Z = F["int"]
    vals = [ex.exp_ts(Z, -2, t, 0).real for t in range(8)]
    if any(a * b >= 0 for a, b in zip(vals, vals[1:])):
        return False, "alternation"
    return True, ""


@check("exponential", "Lambda tends to its pointwise limit")
def _lam(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 10)
        for _ in range(4):
            t, s = rng.choice(pts, 2)
            x = ex.lambda_threshold(T, t, s)
            if not math.isfinite(x):
                return False, f"no threshold at t={t} s={s}"
            if abs(ex.lambda_fn(T, 4 * x, t, s) - ex.lambda_limit(T, t, s)) > 1e-6:
                return False, f"t={t} s={s}"
    return True, ""


@check("exponential", "monomial signs")
def _hsign(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 12)
        for _ in range(10):
            lo, hi = sorted(rng.choice(pts, 2, replace=False))
            n = int(rng.integers(1, 5))
            if ex.monomial(T, n, hi, lo) < -1e-12 or (-1) ** n * ex.monomial(T, n, lo, hi) < -1e-12:
                return False, f"n={n} between {lo} and {hi}"
    return True, ""


@check("exponential", "e_lam e_(-)z decays inside the region")
def _decay(F, rng):
    for name in ("int", "mixed", "geom", "densetail"):
        T = F[name]
        s = T.window_start
        lam = 0.5
        z = 2.0
        ts = [float(T.tail_point(2 ** k)) if T.discrete_tail else s + 2.0 ** k for k in range(2, 7)]
        # log of e_lam(t, s) e_(-)z(t, s); the factors alone overflow on the geometric tail
        logs = [ex.log_exp_real(T, lam, t, s) - ex.log_exp_real(T, z, t, s) for t in ts]
        if not all(b < a for a, b in zip(logs, logs[1:])) or logs[-1] > math.log(1e-2):
            return False, name
    return True, ""


@check("exponential", "Taylor lower bound e_x >= x^n h_n")
def _taylor(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 12)
        for _ in range(10):
            s, t = sorted(rng.choice(pts, 2, replace=False))
            x, n = float(rng.uniform(0.1, 5)), int(rng.integers(0, 7))
            e = ex.exp_ts(T, x, t, s).real
            if ex.taylor_lower_bound_check(T, x, t, s, n) < -1e-9 * e:
                return False, f"x={x} n={n}"
    return True, ""


# -- laplace -----------------------------------------------------------------

@check("laplace", "linearity")
def _llin(F, rng):
    for name in ("int", "mixed", "densetail"):
        T = F[name]
        f = parse_expr("etsinv(1)").bind(T, 0)
        g = parse_expr("chi(0,3)*t").bind(T, 0)
        a, b = rng.normal(size=2)
        z = 1.0 + rng.uniform(0, 2)
        lhs = laplace(T, a * f + b * g, 0, z).value
        rhs = a * laplace(T, f, 0, z).value + b * laplace(T, g, 0, z).value
        if abs(lhs - rhs) > 1e-9:
            return False, name
    return True, ""


@check("laplace", "modulation identity on constant graininess")
def _mod(F, rng):
    for name, h in (("int", 1.0), ("half", 0.5), ("real", 0.0)):
        T = F[name]
        f = parse_expr("cos(t)").bind(T, 0)
        z, c = 1 + rng.uniform(0, 1), rng.uniform(0, 1)
        a = modulated_laplace(T, f, 0, z, c).value
        b = laplace(T, f, 0, hl.cplus(h, z, c)).value
        if abs(a - b) > 1e-8:
            return False, name
    return True, ""


@check("laplace", "null functions have zero transform")
def _lnull(F, rng):
    T = F["mixed"]
    f = parse_expr("ind(0.5)").bind(T, 0)
    for _ in range(5):
        z = complex(rng.uniform(0.2, 3), rng.uniform(-2, 2))
        if abs(laplace(T, f, 0, z).value) > 1e-8:
            return False, f"z={z}"
    return True, ""


@check("laplace", "convergence region is closed under moving right of -1/h")
def _region(F, rng):
    for T in F.values():
        region = convergence_region(T, T.window_start, 0.0)
        for _ in range(50):
            z = _complex(rng)
            # for h > 0 the region is the outside of a disc centred at -1/h, so the
            # shift is only monotone from the centre rightwards
            if (1 + region.h * z).real < 0:
                continue
            if hl.in_region(region, z) and not hl.in_region(region, z + rng.uniform(0, 3)):
                return False, f"z={z}"
    return True, ""


# -- lerch -------------------------------------------------------------------

@check("lerch", "no lattice hides a non-null function")
def _sound(F, rng):
    for i in range(40):
        name = ("int", "mixed", "densetail", "geom", "half")[i % 5]
        T = F[name]
        s = T.window_start
        c = rng.normal(size=2)
        f = GridFunction.vectorized(lambda t, c=c: c[0] * np.exp(-(t - s)) + c[1] * np.cos(2 * (t - s)))
        spec = lr.LatticeSpec(1.0, (0.5, 1.5), 2)
        v = lr.lerch_verify(T, f, s, spec, float(_points(T, s, 8)[-1]))
        if v.falsification:
            return False, name
    return True, ""


@check("lerch", "null closure under sigma-shifted multipliers")
def _closure(F, rng):
    T = F["mixed"]
    for g in ("t^2", "ets(1)", "cos(t)"):
        r = lr.modulated_null_check(T, parse_expr("ind(0.5)").bind(T, 0), parse_expr(g).bind(T, 0), 0, 6)
        if r.verdict != "null" or r.max_cumulative > 1e-8:
            return False, g
    return True, ""


@check("lerch", "characteristic approximation converges")
def _char(F, rng):
    T = F["int"]
    errs = [abs(lr.char_approx(T, 1.0, 0, 3, vs, 10) - lr.char_limit(T, 1.0, 0, 3, 10))
            for vs in (512, 1024, 2048, 4096)]
    ok = all(b <= 0.5 * 1.01 * a for a, b in zip(errs, errs[1:]))
    return ok, " ".join(f"{e:.2e}" for e in errs)


@check("lerch", "n = 0 lattice cells do not depend on k")
def _col(F, rng):
    for name in ("int", "mixed"):
        T = F[name]
        cells = lr.lattice_sweep(T, parse_expr("exp(-t)").bind(T, 0), 0, lr.LatticeSpec(1, (0.5, 1, 2), 2))
        row = [c.value for c in cells[0]]
        if max(abs(v - row[0]) for v in row) > 1e-12:
            return False, name
    return True, ""


@check("lerch", "Lambda series matches Lambda")
def _series(F, rng):
    for T in F.values():
        pts = _points(T, T.window_start, 10)
        for _ in range(5):
            t, s = rng.choice(pts, 2)
            vs = float(rng.uniform(0.1, 5))
            if ex.log_exp_real(T, vs, t, s) < 0 and vs * math.exp(-ex.log_exp_real(T, vs, t, s)) > 20:
                continue
            total, _ = ex.lambda_series(T, vs, t, s, 60)
            if abs(total - ex.lambda_fn(T, vs, t, s)) > 1e-10:
                return False, f"t={t} s={s} vs={vs}"
    return True, ""


@check("lerch", "chi shift identity is exact at scattered points")
def _chi(F, rng):
    for T in F.values():
        for eta in _points(T, T.window_start, 30):
            if T.graininess(eta) > 0 and lr.chi_shift_check(T, T.window_start, 3 if T.contains(3) else T.sigma(eta), eta) != 0:
                return False, f"eta={eta}"
    return True, ""


# -- cli ---------------------------------------------------------------------

@check("cli", "expressions survive printing and reparsing")
def _roundtrip(F, rng):
    for text in expression_corpus():
        e = parse_expr(text)
        if parse_expr(str(e)) != e:
            return False, text
    return True, ""


@check("cli", "CSV output is deterministic")
def _csv(F, rng):
    from .cli import main
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        code = main(["laplace", "--f", "cos(t)", "--ts", "mixed", "--z", "1,2+1i"], stdout=buf)
        outs.append((code, buf.getvalue()))
    return outs[0] == outs[1] and outs[0][0] == 0, ""


def run_checks(seed: int = 20240601) -> list[CheckResult]:
    fixtures = all_fixtures()
    results = []
    for module, name, fn in CHECKS:
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            ok, detail = fn(fixtures, rng)
        except Exception as exc:  # a crash is a failed property
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(module, name, bool(ok), detail, time.perf_counter() - start))
    return results
