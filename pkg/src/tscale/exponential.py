"""Time-scale exponentials, generalized monomials and the Lambda function.

For a constant exponent z the exponential is

    e_z(t, s) = prod_{scattered eta in [s, t)} (1 + mu(eta) z) * exp(z * dense length of [s, t))

and is evaluated in log space against a fixed anchor (the window start), so
``e_z(t, s) = exp(L(t) - L(s))`` for either order of t and s.  Factors
``1 + mu z`` on the negative real axis contribute ``log|.|`` plus a sign
flip instead of ``i*pi``, which keeps real exponentials exactly real.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from typing import Union

import numpy as np

from .calculus import DEFAULT_CONFIG, GridFunction, QuadratureConfig, adaptive_quad, as_grid_function
from .errors import NotRegressive
from .hilger import SINGULAR_TOL
from .timescale import TOL, Continuous, Geometric, TimeScale, UniformDiscrete

_NEG_REAL_TOL = 1e-15
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class Constant:
    z: complex


@dataclass(frozen=True)
class Varying:
    f: GridFunction


ExponentArg = Union[Constant, Varying, complex, float, int]


def _log_factors(mu: np.ndarray, z: complex):
    """Split log(1 + mu z) into (log part, parity) and flag vanishing factors."""
    mu = np.asarray(mu, dtype=float)
    w = 1.0 + mu * z
    x = mu * z.real
    y = mu * z.imag
    bad = np.abs(w) < SINGULAR_TOL
    neg = (w.real < 0) & (np.abs(w.imag) <= _NEG_REAL_TOL * np.abs(w))
    with np.errstate(divide="ignore", invalid="ignore"):
        re = 0.5 * np.log1p(2 * x + x * x + y * y)
        im = np.arctan2(y, 1.0 + x)
    im = np.where(im == -np.pi, np.pi, im)
    log = np.where(neg, re + 0j, re + 1j * im)
    log = np.where(bad, 0j, log)
    return log, neg.astype(np.int64), bad


class ConstantExponent:
    """Log-space evaluator of ``e_z(., window_start)`` for one constant z."""

    def __init__(self, T: TimeScale, z: complex):
        self.T = T
        self.z = z = complex(z)
        starts, ends, dense = T._starts, T._ends, T._dense
        n = len(starts)
        inc = np.zeros(n, dtype=complex)
        par = np.zeros(n, dtype=np.int64)
        self._bad_points: list[float] = []
        if n:
            pt = ~dense
            lengths = np.where(dense & np.isfinite(ends), ends - starts, 0.0)
            inc = np.where(dense, z * lengths, 0j)
            lg, ng, bad = _log_factors(np.where(pt, ends - starts, 0.0), z)
            inc = np.where(pt, lg, inc)
            par = np.where(pt, ng, 0)
            self._bad_points = [float(p) for p in starts[pt & bad]]
        self._cum = np.concatenate([[0j], np.cumsum(inc)])
        self._cpar = np.concatenate([[0], np.cumsum(par)])
        self._we_log = self._cum[-1]
        self._we_par = int(self._cpar[-1])
        tail = T.tail
        self._step = None
        if isinstance(tail, UniformDiscrete):
            lg, ng, bad = _log_factors(np.array([tail.h]), z)
            self._step = (complex(lg[0]), int(ng[0]), bool(bad[0]))
        self._geo_log = np.zeros(1, dtype=complex)  # cumulative over tail indices
        self._geo_par = np.zeros(1, dtype=np.int64)
        self._geo_bad: list[int] = []
        self._lock = threading.Lock()
        self._anchors: dict[float, tuple[complex, int]] = {}

    def _extend_geometric(self, jmax: int):
        with self._lock:
            have = len(self._geo_log) - 1
            if jmax <= have:
                return
            jmax = max(jmax, 2 * have)
            T = self.T
            j = np.arange(have, jmax)
            mu = T.tail_point(j + 1) - T.tail_point(j)
            lg, ng, bad = _log_factors(mu, self.z)
            self._geo_bad.extend(int(k) for k in j[bad])
            self._geo_log = np.concatenate([self._geo_log, self._geo_log[-1] + np.cumsum(lg)])
            self._geo_par = np.concatenate([self._geo_par, self._geo_par[-1] + np.cumsum(ng)])

    def log(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """(log magnitude/phase, parity) of ``e_z(t, window_start)`` for members t."""
        T = self.T
        ts = np.asarray(ts, dtype=float)
        if not T.discrete_tail:
            return self._log_window(ts)
        out = np.empty(ts.shape, dtype=complex)
        par = np.empty(ts.shape, dtype=np.int64)
        in_tail = ts >= T.window_end - TOL * np.maximum(1.0, np.abs(ts))
        if in_tail.any():
            j = T._tail_indices(ts[in_tail]).astype(np.int64)
            if isinstance(T.tail, UniformDiscrete):
                lg, ng, _ = self._step
                out[in_tail] = self._we_log + j * lg
                par[in_tail] = self._we_par + j * ng
            else:
                self._extend_geometric(int(j.max()) + 1)
                out[in_tail] = self._we_log + self._geo_log[j]
                par[in_tail] = self._we_par + self._geo_par[j]
        win = ~in_tail
        if win.any():
            out[win], par[win] = self._log_window(ts[win])
        return out, par

    def _log_window(self, tw: np.ndarray):
        T = self.T
        idx = np.searchsorted(T._starts, tw + TOL * np.maximum(1.0, np.abs(tw)), "right") - 1
        idx = np.maximum(idx, 0)
        off = np.where(T._dense[idx], tw - T._starts[idx], 0.0)
        return self._cum[idx] + self.z * off, self._cpar[idx]

    def check_range(self, lo: float, hi: float):
        """Raise NotRegressive if a vanishing factor ``1 + mu z`` lies in ``[lo, hi)``."""
        if lo >= hi:
            return
        for p in self._bad_points:
            if lo <= p < hi:
                raise NotRegressive(f"1 + mu*z vanishes at eta={p} for z={self.z}", p)
        T = self.T
        if hi > T.window_end and T.discrete_tail:
            if self._step is not None and self._step[2]:
                p = max(lo, T.window_end)
                raise NotRegressive(f"1 + mu*z vanishes at eta={p} for z={self.z}", p)
            if isinstance(T.tail, Geometric):
                jhi = T.tail_index(hi)
                self._extend_geometric(jhi + 1)
                jlo = T.tail_index(lo) if lo >= T.window_end else 0
                for k in self._geo_bad:
                    if jlo <= k < jhi:
                        p = float(T.tail_point(k))
                        raise NotRegressive(f"1 + mu*z vanishes at eta={p} for z={self.z}", p)

    def log_ratio(self, ts, s: float):
        """(log, parity) of ``e_z(t, s)`` for an array of t."""
        lt, pt = self.log(ts)
        anchor = self._anchors.get(s)
        if anchor is None:
            ls, ps = self.log(np.array([s]))
            anchor = self._anchors[s] = (complex(ls[0]), int(ps[0]))
        return lt - anchor[0], pt - anchor[1]


@functools.lru_cache(maxsize=512)
def constant_exponent(T: TimeScale, z: complex) -> ConstantExponent:
    return ConstantExponent(T, complex(z))


def _from_log(log: np.ndarray, par: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        val = np.exp(log)
    return np.where(par % 2 == 1, -val, val)


def exp_const_many(T: TimeScale, z: complex, ts, s: float, check: bool = True) -> np.ndarray:
    """``e_z(t, s)`` for an array of points t of T."""
    ts = np.asarray(ts, dtype=float)
    ce = constant_exponent(T, complex(z))
    if check and ts.size:
        lo = min(float(ts.min()), s)
        hi = max(float(ts.max()), s)
        ce.check_range(lo, hi)
    log, par = ce.log_ratio(ts, s)
    return _from_log(log, par)


def exp_ominus_many(T: TimeScale, z: complex, ts, s: float) -> np.ndarray:
    """``e_{(-)z}(t, s) = 1/e_z(t, s)`` for an array of t."""
    ts = np.asarray(ts, dtype=float)
    ce = constant_exponent(T, complex(z))
    if ts.size:
        ce.check_range(min(float(ts.min()), s), max(float(ts.max()), s))
    log, par = ce.log_ratio(ts, s)
    return _from_log(-log, par)


def _exp_varying(T: TimeScale, f: GridFunction, t: float, s: float, cfg: QuadratureConfig) -> complex:
    lo, hi = (s, t) if t >= s else (t, s)
    part = T.partition(lo, hi)
    log = 0j
    parity = 0
    if len(part.points):
        vals = f.at(part.points)
        w = 1.0 + part.mus * vals
        bad = np.abs(w) < SINGULAR_TOL
        if bad.any():
            p = float(part.points[bad][0])
            raise NotRegressive(f"1 + mu*f vanishes at eta={p}", p)
        for mu, v in zip(part.mus, vals):
            lg, ng, _ = _log_factors(np.array([mu]), complex(v))
            log += complex(lg[0])
            parity += int(ng[0])
    for a, b in part.dense:
        for p, q in _dense_pieces(a, b, f.breakpoints):
            log += adaptive_quad(f.on_dense, p, q, cfg)[0]
    if t < s:
        log = -log
    val = complex(_from_log(np.array([log]), np.array([parity]))[0])
    return val


def _dense_pieces(a, b, breakpoints):
    cuts = [a] + [p for p in breakpoints if a < p < b] + [b]
    return list(zip(cuts, cuts[1:]))


def exp_ts(T: TimeScale, arg: ExponentArg, t: float, s: float,
           cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """The exponential ``e_f(t, s)``: the solution of ``x^Delta = f x``, ``x(s) = 1``.

    ``arg`` is a constant (a number or :class:`Constant`) or a
    :class:`Varying` grid function.  For ``t < s`` the value is ``1/e_f(s, t)``.
    """
    t, s = T.snap(t), T.snap(s)
    if isinstance(arg, Varying):
        return _exp_varying(T, as_grid_function(arg.f), t, s, cfg)
    z = arg.z if isinstance(arg, Constant) else complex(arg)
    return complex(exp_const_many(T, z, np.array([t]), s)[0])


def exp_ominus(T: TimeScale, z: complex, t: float, s: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``e_{(-)z}(t, s)``, taken as the reciprocal of ``e_z(t, s)``."""
    t, s = T.snap(t), T.snap(s)
    return complex(exp_ominus_many(T, complex(z), np.array([t]), s)[0])


def ominus_function(T: TimeScale, z: complex, s: float, power: int = 1) -> GridFunction:
    """Grid function ``eta -> (e_{(-)z}(eta, s))**power``."""
    z = complex(z)

    def at(ts):
        ce = constant_exponent(T, z)
        if ts.size:
            ce.check_range(min(float(ts.min()), s), max(float(ts.max()), s))
        log, par = ce.log_ratio(ts, s)
        return _from_log(-power * log, power * par)
    return GridFunction(at)


def lambda_many(T: TimeScale, x: float, ts, s: float) -> np.ndarray:
    """``Lambda(x; t, s)`` for an array of t."""
    ts = np.asarray(ts, dtype=float)
    ce = constant_exponent(T, complex(x))
    log, _ = ce.log_ratio(ts, s)
    inner = math.log(x) - log.real
    with np.errstate(over="ignore"):
        return np.where(inner > _LOG_MAX, 0.0, np.exp(-np.exp(np.minimum(inner, _LOG_MAX))))


def log_exp_real(T: TimeScale, x: float, t: float, s: float) -> float:
    """``log e_x(t, s)`` for a positively regressive real x."""
    t, s = T.snap(t), T.snap(s)
    ce = constant_exponent(T, complex(x))
    ce.check_range(min(t, s), max(t, s))
    log, par = ce.log_ratio(np.array([t]), s)
    return float(log[0].real)


# ----------------------------------------------------------------------
# generalized monomials


def _lattice_monomials(n: int, t: np.ndarray, s: float, tail) -> np.ndarray:
    """``h_k(t, s)`` for k = 0..n with t, s on the same discrete tail (t >= s)."""
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    acc = np.ones(t.shape)
    if isinstance(tail, UniformDiscrete):
        for k in range(n):
            acc = acc * (t - s - k * tail.h) / (k + 1)
            out[k + 1] = acc
    else:
        q = tail.q
        bracket = 0.0
        for k in range(n):
            bracket += q ** k
            acc = acc * (t - q ** k * s) / bracket
            out[k + 1] = acc
    return out


class _MonomialTable:
    """``h_0..h_n(., s)`` on ``[s, inf)_T``.

    Values are propagated exactly cell by cell: across a scattered point
    ``h_k(sigma t) = h_k(t) + mu h_{k-1}(t)``; across a dense cell the
    monomials are polynomials and Taylor's formula is exact.
    """

    def __init__(self, T: TimeScale, n: int, s: float):
        self.T, self.n, self.s = T, n, s
        self.tail_local = T.discrete_tail and s >= T.window_end
        starts, values = [], []
        h = np.zeros(n + 1)
        h[0] = 1.0
        fact = np.array([math.factorial(j) for j in range(n + 1)], dtype=float)
        if not self.tail_local:
            i = max(int(np.searchsorted(T._starts, s, "right")) - 1, 0)
            for k in range(i, len(T._starts)):
                a, b, dense = float(T._starts[k]), float(T._ends[k]), bool(T._dense[k])
                a = max(a, s)
                starts.append(a)
                values.append(h.copy())
                if dense:
                    if not math.isfinite(b):
                        break
                    d = b - a
                    powers = d ** np.arange(n + 1) / fact
                    h = np.array([np.dot(h[m::-1], powers[: m + 1]) for m in range(n + 1)])
                else:
                    mu = b - a
                    h = h + mu * np.concatenate([[0.0], h[:-1]])
        self.starts = np.array(starts)
        self.values = np.array(values).reshape(len(starts), n + 1)
        self.fact = fact
        self.h_we = h  # h_k(window_end, s) when the tail is discrete

    def evaluate(self, ts: np.ndarray) -> np.ndarray:
        """``h_n(t, s)`` for members ``t >= s``."""
        T, n = self.T, self.n
        out = np.empty(ts.shape)
        if self.tail_local:
            return _lattice_monomials(n, ts, self.s, T.tail)[n]
        if T.discrete_tail:
            in_tail = ts >= T.window_end - TOL * np.maximum(1.0, np.abs(ts))
        else:
            in_tail = np.zeros(ts.shape, dtype=bool)
        if in_tail.any():
            local = _lattice_monomials(n, ts[in_tail], T.window_end, T.tail)
            out[in_tail] = sum(local[k] * self.h_we[n - k] for k in range(n + 1))
        win = ~in_tail
        if win.any():
            tw = ts[win]
            idx = np.searchsorted(self.starts, tw + TOL * np.maximum(1.0, np.abs(tw)), "right") - 1
            idx = np.clip(idx, 0, len(self.starts) - 1)
            d = tw - self.starts[idx]
            # h_n(t) = sum_j h_{n-j}(a) (t-a)^j / j!; d = 0 at scattered points
            acc = np.zeros(tw.shape)
            for j in range(n + 1):
                acc += self.values[idx, n - j] * d ** j / self.fact[j]
            out[win] = acc
        return out


@functools.lru_cache(maxsize=256)
def _monomial_table(T: TimeScale, n: int, s: float) -> _MonomialTable:
    return _MonomialTable(T, n, s)


def monomial_many(T: TimeScale, n: int, ts, s: float) -> np.ndarray:
    """``h_n(t, s)`` for an array of members t (either side of s)."""
    if n < 0:
        raise ValueError("monomial index must be nonnegative")
    ts = np.asarray(ts, dtype=float)
    s = T.snap(s)
    if n == 0:
        return np.ones(ts.shape)
    out = np.empty(ts.shape)
    fwd = ts >= s
    if fwd.any():
        out[fwd] = _monomial_table(T, n, s).evaluate(ts[fwd])
    for i in np.flatnonzero(~fwd):
        out.flat[i] = _monomial_backward(T, n, float(ts.flat[i]), s)
    return out


def _monomial_backward(T: TimeScale, n: int, t: float, s: float) -> float:
    # 0 = h_n(s, s) = sum_k h_k(s, t) h_{n-k}(t, s), solved for h_n(t, s)
    hs = [1.0]
    for m in range(1, n + 1):
        acc = 0.0
        for k in range(1, m + 1):
            acc += float(_monomial_table(T, k, t).evaluate(np.array([s]))[0]) * hs[m - k]
        hs.append(-acc)
    return hs[n]


def monomial(T: TimeScale, n: int, t: float, s: float,
             cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Generalized monomial ``h_n(t, s)``: ``h_0 = 1``, ``h_n = int_s^t h_{n-1}(eta, s) Delta eta``."""
    t, s = T.snap(t), T.snap(s)
    return float(monomial_many(T, n, np.array([t]), s)[0])


# ----------------------------------------------------------------------
# Lambda function and the asymptotics around it


def lambda_fn(T: TimeScale, x: float, t: float, s: float,
              cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Lambda(x; t, s) = exp(-x e_{(-)x}(t, s))`` for ``x > 0``."""
    if not x > 0:
        raise ValueError("Lambda needs x > 0")
    inner = math.log(x) - log_exp_real(T, x, t, s)
    if inner > _LOG_MAX:
        return 0.0
    return math.exp(-math.exp(inner))


def lambda_limit(T: TimeScale, t: float, s: float) -> float:
    """Pointwise limit of ``Lambda(x; t, s)`` as ``x -> inf``.

    This is the indicator of ``s < t`` except when ``[s, t)_T`` is one
    right-scattered point: there ``x e_{(-)x}(t, s) = x/(1 + mu x) -> 1/mu``
    and the limit is ``exp(-1/mu(s))``.
    """
    t, s = T.snap(t), T.snap(s)
    if t <= s:
        return 0.0
    if T.sigma(s) == t and t > s:
        return math.exp(-1.0 / (t - s))
    return 1.0


def lambda_series(T: TimeScale, varsigma: float, t: float, s: float, L: int,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Partial sum ``sum_{l<=L} (-varsigma)^l / l! * (e_{(-)varsigma}(t, s))^l`` and its last term."""
    if not varsigma > 0:
        raise ValueError("series needs varsigma > 0")
    if L < 0:
        raise ValueError("L must be nonnegative")
    y = varsigma * math.exp(-log_exp_real(T, varsigma, t, s))
    term = 1.0
    terms = [term]
    for ell in range(1, L + 1):
        term *= -y / ell
        terms.append(term)
    return math.fsum(terms), terms[-1]


def scaled_exp_decay(T: TimeScale, lam: float, t: float, s: float, x: float) -> float:
    """``x**lam * e_{(-)x}(t, s)``; returns ``inf`` when the product overflows."""
    if not x > 0:
        raise ValueError("x must be positive")
    log = lam * math.log(x) - log_exp_real(T, x, t, s)
    if log > _LOG_MAX:
        return math.inf
    return math.exp(log)


def taylor_lower_bound_check(T: TimeScale, x: float, t: float, s: float, n: int,
                             cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``e_x(t, s) - x**n h_n(t, s)``, nonnegative for ``t >= s`` and ``x > 0``."""
    if t < s:
        raise ValueError("the Taylor lower bound needs t >= s")
    return exp_ts(T, x, t, s).real - x ** n * monomial(T, n, t, s)


def lambda_threshold(T: TimeScale, t: float, s: float, tol: float = 1e-6,
                     x0: float = 1.0, max_doublings: int = 200, confirm: int = 4) -> float:
    """Smallest doubling ``x0 * 2**k`` from which ``|Lambda - limit| <= tol``
    holds for ``confirm`` further doublings; ``inf`` if never reached."""
    target = lambda_limit(T, t, s)
    x = x0
    streak_start = None
    streak = 0
    for _ in range(max_doublings):
        if abs(lambda_fn(T, x, t, s) - target) <= tol:
            if streak == 0:
                streak_start = x
            streak += 1
            if streak > confirm:
                return streak_start
        else:
            streak = 0
        x *= 2.0
    return math.inf
