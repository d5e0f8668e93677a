"""Delta-derivatives and delta-integrals on a TimeScale.

Integrands are :class:`GridFunction` objects.  A grid function carries two
evaluators: ``at`` gives the value at a point of T (used at scattered
points, where the point value has positive measure) and ``on_dense`` gives
the almost-everywhere representative used by quadrature on dense cells.
The split is how point masses at right-dense points are made invisible to
every delta-integral without relying on quadrature nodes missing them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol

import numpy as np

from .errors import NoConvergence, NonDifferentiable, QuadratureFailure, UnboundedWindowOnly
from .timescale import TOL, Continuous, Geometric, Partition, TimeScale, UniformDiscrete

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _as_array(v, shape) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != shape:
        v = np.broadcast_to(v, shape).copy()
    return v


class GridFunction:
    """A complex-valued function on a time scale, evaluated on numpy arrays."""

    __slots__ = ("_at", "_dense", "breakpoints")

    def __init__(self, at: ArrayFn, dense: ArrayFn | None = None,
                 breakpoints: Iterable[float] = ()):
        self._at = at
        self._dense = dense if dense is not None else at
        self.breakpoints = tuple(sorted(set(float(b) for b in breakpoints)))

    # -- evaluation -----------------------------------------------------

    def at(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return _as_array(self._at(ts), ts.shape)

    def on_dense(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return _as_array(self._dense(ts), ts.shape)

    def __call__(self, t: float) -> complex:
        return complex(self.at(np.array([float(t)]))[0])

    # -- construction ---------------------------------------------------

    @classmethod
    def constant(cls, c: complex) -> "GridFunction":
        c = complex(c)
        return cls(lambda ts: np.full(ts.shape, c))

    @classmethod
    def vectorized(cls, fn: ArrayFn, breakpoints: Iterable[float] = ()) -> "GridFunction":
        return cls(fn, breakpoints=breakpoints)

    @classmethod
    def scalar(cls, fn: Callable[[float], complex],
               breakpoints: Iterable[float] = ()) -> "GridFunction":
        def at(ts):
            return np.array([complex(fn(float(t))) for t in ts.ravel()],
                            dtype=complex).reshape(ts.shape)
        return cls(at, breakpoints=breakpoints)

    @classmethod
    def point_mass(cls, a: float, value: complex = 1.0) -> "GridFunction":
        """``value`` at the single point a and zero elsewhere.

        On dense cells the representative is identically zero, so the mass
        contributes only when a is right-scattered.
        """
        a, value = float(a), complex(value)

        def at(ts):
            hit = np.abs(ts - a) <= TOL * np.maximum(1.0, np.abs(ts))
            return np.where(hit, value, 0.0 + 0.0j)
        return cls(at, lambda ts: np.zeros(ts.shape, dtype=complex), breakpoints=(a,))

    # -- arithmetic -----------------------------------------------------

    def _combine(self, other, op) -> "GridFunction":
        other = as_grid_function(other)
        return GridFunction(lambda ts: op(self.at(ts), other.at(ts)),
                            lambda ts: op(self.on_dense(ts), other.on_dense(ts)),
                            self.breakpoints + other.breakpoints)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __rsub__(self, other):
        return as_grid_function(other)._combine(self, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(lambda ts: -self.at(ts), lambda ts: -self.on_dense(ts),
                            self.breakpoints)


def as_grid_function(f) -> GridFunction:
    if isinstance(f, GridFunction):
        return f
    if isinstance(f, (int, float, complex, np.number)):
        return GridFunction.constant(f)
    if callable(f):
        return GridFunction.scalar(f)
    raise TypeError(f"cannot use {f!r} as a grid function")


def compose_sigma(T: TimeScale, g) -> GridFunction:
    """``g o sigma``; on dense cells sigma is the identity."""
    g = as_grid_function(g)
    return GridFunction(lambda ts: g.at(T.sigma_many(ts)), g.on_dense, g.breakpoints)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 40
    max_intervals: int = 200_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")


DEFAULT_CONFIG = QuadratureConfig()

# Gauss-Kronrod 7/15 pair
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 abscissae, ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 13, 11, 9]] = np.concatenate([_WG[:-1], _WG[:-1]])
_GW[7] = _WG[-1]


def _gk15(fn: ArrayFn, lo: np.ndarray, hi: np.ndarray, m: int | None = None):
    """Kronrod estimates and Kronrod-Gauss discrepancies on each ``[lo, hi]``.

    With ``m`` set, fn returns ``m`` stacked components for every abscissa
    and both outputs gain a leading axis of that length.
    """
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    x = c[:, None] + r[:, None] * _NODES[None, :]
    shape = x.shape if m is None else (m,) + x.shape
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow shows up as a non-finite estimate, which _adaptive rejects
        y = _as_array(fn(x), shape)
        k = r * (y @ _KW)
        g = r * (y @ _GW)
    return k, np.abs(k - g)


def _adaptive(fn: ArrayFn, edges: np.ndarray, cfg: QuadratureConfig, m: int | None = None):
    """Batched bisection starting from the cells between ``edges``.

    Returns ``(lo, hi, val, err, nevals)`` for the final cells, sorted by lo.
    Every component must meet ``max(abs_tol, rel_tol * |total|)``.
    """
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    a, b = float(lo[0]), float(hi[-1])
    depth = np.zeros(len(lo), dtype=int)
    val, err = _gk15(fn, lo, hi, m)
    nevals = 15 * len(lo)
    length = b - a
    while True:
        v2 = val.reshape(-1, len(lo))
        e2 = err.reshape(-1, len(lo))
        total_err = e2.sum(axis=1)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(v2.sum(axis=1)))
        if not (np.isfinite(total_err).all() and np.isfinite(tol).all()):
            raise QuadratureFailure(f"integrand is not finite on [{a}, {b}]")
        if (total_err <= tol).all():
            return lo, hi, val, err, nevals
        share = tol[:, None] * ((hi - lo) / length)[None, :]
        bad = ((e2 > share) & (total_err > tol)[:, None]).any(axis=0)
        if not bad.any():
            worst = int(np.argmax(total_err - tol))
            bad = e2[worst] >= e2[worst].max()
        if (depth[bad] >= cfg.max_depth).any() or len(lo) + bad.sum() > cfg.max_intervals:
            raise QuadratureFailure(
                f"adaptive quadrature on [{a}, {b}] did not reach tolerance {tol.max():.3g}"
                f" (estimated error {total_err.max():.3g})")
        mid = 0.5 * (lo[bad] + hi[bad])
        nlo = np.concatenate([lo[bad], mid])
        nhi = np.concatenate([mid, hi[bad]])
        nval, nerr = _gk15(fn, nlo, nhi, m)
        nevals += 15 * len(nlo)
        ndepth = np.concatenate([depth[bad], depth[bad]]) + 1
        keep = ~bad
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        val = np.concatenate([val[..., keep], nval], axis=-1)
        err = np.concatenate([err[..., keep], nerr], axis=-1)
        depth = np.concatenate([depth[keep], ndepth])
        order = np.argsort(lo, kind="stable")
        lo, hi, depth = lo[order], hi[order], depth[order]
        val, err = val[..., order], err[..., order]


def adaptive_quad(fn: ArrayFn, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Integrate a vectorized complex function over ``[a, b]``.

    Intervals whose Kronrod-Gauss discrepancy exceeds their length share of
    the tolerance are bisected in batches.  Returns ``(value, error, nevals)``.
    """
    if b <= a:
        return 0j, 0.0, 0
    _, _, val, err, nevals = _adaptive(fn, np.array([a, b], dtype=float), cfg)
    return complex(val.sum()), float(err.sum()), nevals


def adaptive_quad_many(fn: ArrayFn, a: float, b: float, m: int,
                       cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Like :func:`adaptive_quad` for ``m`` integrands sharing their nodes.

    ``fn(x)`` returns an array of shape ``(m,) + x.shape``; the result holds
    one value and one error estimate per component.
    """
    if b <= a:
        return np.zeros(m, dtype=complex), np.zeros(m), 0
    _, _, val, err, nevals = _adaptive(fn, np.array([a, b], dtype=float), cfg, m)
    return val.sum(axis=-1), err.sum(axis=-1), nevals


def _split(lo: float, hi: float, breakpoints) -> list[tuple[float, float]]:
    cuts = [lo] + [p for p in breakpoints if lo < p < hi] + [hi]
    return list(zip(cuts, cuts[1:]))


def _integrate_partition(part: Partition, f: GridFunction, cfg: QuadratureConfig):
    """Return ``(value, error, nevals)`` for the integral over a partition."""
    value = 0j
    err = 0.0
    nevals = len(part.points)
    if len(part.points):
        value += complex(np.dot(part.mus, f.at(part.points)))
    for lo, hi in part.dense:
        for a, b in _split(lo, hi, f.breakpoints):
            v, e, n = adaptive_quad(f.on_dense, a, b, cfg)
            value += v
            err += e
            nevals += n
    return value, err, nevals


def delta_integral(T: TimeScale, f, a: float, b: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``int_a^b f(eta) Delta eta`` for ``a <= b``: mu-weighted point sum plus dense quadrature."""
    value, _, _ = _integrate_partition(T.partition(a, b), as_grid_function(f), cfg)
    return value


@dataclass(frozen=True)
class CumulativeTable:
    """Partial integrals ``int_s^node f`` at increasing nodes; the first node is s."""

    nodes: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def value_at(self, t: float) -> complex:
        i = int(np.searchsorted(self.nodes, t - TOL * max(1.0, abs(t))))
        if i >= len(self.nodes) or abs(self.nodes[i] - t) > TOL * max(1.0, abs(t)):
            raise KeyError(f"{t} is not a node of the table")
        return complex(self.values[i])

    def max_abs(self) -> tuple[float, float]:
        """(largest |partial integral|, node where it occurs)."""
        mags = np.abs(self.values)
        i = int(np.argmax(mags))
        return float(mags[i]), float(self.nodes[i])


def cumulative(T: TimeScale, f, s: float, t_max: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG, mesh: int = 64) -> CumulativeTable:
    """Partial integrals from s at every scattered point and on a mesh of each dense cell."""
    f = as_grid_function(f)
    s, t_max = T.snap(s), T.snap(t_max)
    part = T.partition(s, t_max)
    ends = [part.points + part.mus]
    incs = [part.mus * f.at(part.points)]
    for lo, hi in part.dense:
        grid = np.linspace(lo, hi, mesh + 1)
        grid[-1] = hi
        cuts = np.array(sorted(set(grid.tolist()) | {p for p in f.breakpoints if lo < p < hi}))
        # one adaptive pass seeded with the mesh; its final cells refine the mesh
        _, cell_hi, val, _, _ = _adaptive(f.on_dense, cuts, cfg)
        ends.append(cell_hi)
        incs.append(val.astype(complex))
    ends_arr = np.concatenate(ends)
    incs_arr = np.concatenate(incs)
    order = np.argsort(ends_arr, kind="stable")
    nodes = np.concatenate([[s], ends_arr[order]])
    values = np.concatenate([[0j], np.cumsum(incs_arr[order])])
    return CumulativeTable(nodes, values)


def delta_derivative(T: TimeScale, f, t: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Delta-derivative at t.

    Right-scattered t uses the exact quotient ``(f(sigma t) - f(t))/mu``.
    Right-dense t uses Richardson-extrapolated difference quotients that stay
    inside the dense cell (one-sided at its left end).
    """
    f = as_grid_function(f)
    t = T.snap(t)
    sig = T.sigma(t)
    mu = sig - t
    if mu > 0:
        return (f(sig) - f(t)) / mu
    i = T._element(t)
    a, b = float(T._starts[i]), float(T._ends[i])
    scale = max(1.0, abs(t))
    h0 = min(0.125 * scale, 0.5 * (b - t))
    left = t - a
    central = left > 0
    if central and left < h0:
        h0 = left
        central = h0 > 1e-6 * scale
    levels = 7
    hs = h0 / 2.0 ** np.arange(levels)
    if central:
        vals = f.at(np.concatenate([t + hs, t - hs]))
        d = (vals[:levels] - vals[levels:]) / (2 * hs)
        step = 2  # error expansion in even powers of h
        # a symmetric kink fools the central quotient; the gap between the
        # one-sided quotients must shrink like h for a differentiable f
        gap = np.abs(vals[:levels] + vals[levels:] - 2 * f(t)) / hs
        if gap[-1] > 1e-6 * max(abs(f(t)), 1.0) and gap[-1] > 0.75 * gap[-2]:
            raise NonDifferentiable(f"one-sided quotients at t={t} disagree by {gap[-1]:.3g}")
    else:
        vals = f.at(np.concatenate([[t], t + hs]))
        d = (vals[1:] - vals[0]) / hs
        step = 1
    prev = d
    best, best_err = d[-1], abs(d[-1] - d[-2])
    for j in range(1, levels):
        p = 2.0 ** (step * j)
        prev = (p * prev[1:] - prev[:-1]) / (p - 1)
        if len(prev) >= 2 and abs(prev[-1] - prev[-2]) < best_err:
            best, best_err = prev[-1], abs(prev[-1] - prev[-2])
    ref = max(abs(best), abs(f(t)), 1.0)
    if best_err > 10 * cfg.rel_tol * ref:
        raise NonDifferentiable(f"difference quotients at t={t} do not stabilize "
                                f"(spread {best_err:.3g})")
    return complex(best)


def sigma_shift_residual(T: TimeScale, f, t: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``f(sigma t) - f(t) - mu(t) f^Delta(t)``, which vanishes for delta-differentiable f."""
    f = as_grid_function(f)
    t = T.snap(t)
    sig = T.sigma(t)
    mu = sig - t
    return f(sig) - f(t) - mu * delta_derivative(T, f, t, cfg)


def delta_derivative_function(T: TimeScale, g, cfg: QuadratureConfig = DEFAULT_CONFIG) -> GridFunction:
    """``g^Delta`` as a grid function (pointwise numerical evaluation)."""
    g = as_grid_function(g)
    return GridFunction.scalar(lambda t: delta_derivative(T, g, t, cfg), g.breakpoints)


def integration_by_parts_check(T: TimeScale, f, g, s: float, t: float,
                               cfg: QuadratureConfig = DEFAULT_CONFIG,
                               g_delta=None) -> complex:
    """Residual of ``int f g^sigma = [F g]_s^t - int F g^Delta`` with F the antiderivative of f from s.

    ``g_delta`` may supply the delta-derivative of g; otherwise it is computed numerically.
    """
    f, g = as_grid_function(f), as_grid_function(g)
    s, t = T.snap(s), T.snap(t)
    gd = as_grid_function(g_delta) if g_delta is not None else delta_derivative_function(T, g, cfg)
    F = GridFunction(lambda ts: _point_antiderivative(T, f, s, ts, cfg),
                     lambda ts: _dense_antiderivative_many(T, f, s, ts, cfg),
                     f.breakpoints)
    lhs = delta_integral(T, f * compose_sigma(T, g), s, t, cfg)
    # F(s) = 0, so the boundary term is F(t) g(t)
    rhs = delta_integral(T, f, s, t, cfg) * g(t) - delta_integral(T, F * gd, s, t, cfg)
    return lhs - rhs


def _point_antiderivative(T, f, s, ts, cfg):
    return np.array([delta_integral(T, f, s, float(x), cfg) for x in ts.ravel()],
                    dtype=complex).reshape(ts.shape)


def _dense_antiderivative_many(T, f, s, ts, cfg):
    return np.array([_dense_antiderivative(T, f, s, float(x), cfg) for x in ts.ravel()],
                    dtype=complex).reshape(ts.shape)


def _dense_antiderivative(T, f, s, x, cfg):
    """``int_s^x f`` for x inside a dense cell (x need not be a cell node)."""
    i = T._element(x)
    a = float(T._starts[i])
    lo = max(a, s)
    base = delta_integral(T, f, s, lo, cfg)
    v = 0j
    for p, q in _split(lo, x, f.breakpoints):
        v += adaptive_quad(f.on_dense, p, q, cfg)[0]
    return base + v


# ----------------------------------------------------------------------
# improper integrals


@dataclass
class TransformResult:
    """Value of an improper delta-integral together with convergence diagnostics."""

    value: complex
    truncation_point: float
    tail_estimate: float
    converged: bool
    evaluations: int
    error: str | None = None

    def __complex__(self):
        return complex(self.value)


class TailEstimator(Protocol):
    def tail_estimate(self, T: TimeScale, s: float, lo: float, hi: float) -> float:
        """Bound on ``|int_hi^inf f|`` after ``[lo, hi)`` has just been integrated."""


def tail_series(T: TimeScale, R: float, phi_R: float, ratio: Callable[[float, float], float],
                kappa: float, max_terms: int = 20_000) -> float:
    """``int_R^inf phi(eta) Delta eta`` for an envelope with known local decay.

    On a discrete tail ``phi(sigma t) = phi(t) * ratio(mu(t), mu(sigma t))``;
    on a continuous tail ``phi(eta) = phi(R) exp(-kappa (eta - R))``.
    Returns ``inf`` when the series does not visibly converge.
    """
    if phi_R == 0.0:
        return 0.0
    tail = T.tail
    if isinstance(tail, Continuous):
        return phi_R / kappa if kappa > 0 else math.inf
    if isinstance(tail, UniformDiscrete):
        rho = ratio(tail.h, tail.h)
        return tail.h * phi_R / (1.0 - rho) if rho < 1 else math.inf
    if isinstance(tail, Geometric):
        j = T.tail_index(R)
        mu = float(T.tail_point(j + 1) - T.tail_point(j))
        term = mu * phi_R
        total = 0.0
        for _ in range(max_terms):
            if not math.isfinite(term):
                return math.inf
            total += term
            mu_next = mu * tail.q
            if term == 0.0 or not math.isfinite(mu_next):
                return total
            r = tail.q * ratio(mu, mu_next)  # term_{j+1} / term_j
            if r < 1 and term * r / (1 - r) <= 1e-17 * total:
                return total + term * r / (1 - r)
            term *= r
            mu = mu_next
        return math.inf
    raise UnboundedWindowOnly("time scale has no tail")


@dataclass(frozen=True)
class TailBound:
    """Envelope ``|f(t)| <= C * e_{(-)x}(t, s)`` with ``x > 0`` beyond the window."""

    C: float
    x: float

    def __post_init__(self):
        if not (self.C >= 0 and self.x > 0):
            raise ValueError("tail bound needs C >= 0 and x > 0")

    def tail_estimate(self, T: TimeScale, s: float, lo: float, hi: float) -> float:
        from .exponential import exp_ominus

        phi = self.C * abs(exp_ominus(T, self.x, hi, s))
        x = self.x
        return tail_series(T, hi, phi, lambda mu, mu_next: 1.0 / (1.0 + mu * x), x)


def truncation_schedule(T: TimeScale, base: float, k: int) -> float:
    """k-th truncation point after ``base``: 2**k tail steps (unit lengths when continuous)."""
    tail = T.tail
    if isinstance(tail, Continuous):
        return base + 2.0 ** k
    j0 = T.tail_index(base) if base >= T.window_end else 0
    return float(T.tail_point(j0 + 2 ** k))


def improper_delta_integral(T: TimeScale, f, s: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                            tail: TailEstimator | None = None, max_doublings: int = 60,
                            raise_on_failure: bool = True) -> TransformResult:
    """``int_s^inf f`` integrated over ``[s, R)`` with R doubling through the tail
    until the envelope's tail estimate falls below ``cfg.abs_tol``."""
    if T.bounded:
        raise UnboundedWindowOnly("improper integrals need a time scale unbounded above")
    if tail is None:
        raise NoConvergence("no decay envelope supplied for the improper integral")
    f = as_grid_function(f)
    s = T.snap(s)
    base = max(s, T.window_end)
    value, _, nevals = _integrate_partition(T.partition(s, base), f, cfg)
    floor = max((b for b in f.breakpoints if math.isfinite(b)), default=-math.inf)
    lo = base
    est = math.inf
    for k in range(max_doublings + 1):
        try:
            hi = truncation_schedule(T, base, k)
        except OverflowError:
            break
        if not math.isfinite(hi):
            break
        try:
            v, _, n = _integrate_partition(T.partition(lo, hi), f, cfg)
        except QuadratureFailure as exc:
            if raise_on_failure:
                raise NoConvergence(f"integrand overflowed on [{lo}, {hi}): {exc}") from None
            est = math.inf
            break
        value += v
        nevals += n
        est = tail.tail_estimate(T, s, lo, hi)
        lo = hi
        if not cmath.isfinite(value):
            break
        # nothing is claimed before every declared change of shape has been passed
        if est <= cfg.abs_tol and hi > floor:
            return TransformResult(value, hi, est, True, nevals)
    if raise_on_failure:
        raise NoConvergence(f"tail estimate {est:.3g} still above {cfg.abs_tol:.3g} at R={lo}")
    return TransformResult(value, lo, est, False, nevals)
