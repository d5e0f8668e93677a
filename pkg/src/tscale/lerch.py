"""Null functions and numerical checks of Lerch-type uniqueness.

A function is null on ``[s, inf)_T`` when every partial integral from s
vanishes.  The uniqueness theorem says that if the transforms

    int_s^inf f(eta) (e_{(-)vs_k}(sigma(eta), s))**n e_{(-)alpha}(sigma(eta), s) Delta eta

vanish for every n and every member vs_k of an increasing divergent
sequence, then f is null.  Only a finite lattice can be checked, so the
code here verifies the contrapositive: whenever ``null_check`` finds f
clearly non-null, some lattice cell must be clearly nonzero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, TextIO

import numpy as np

from .calculus import (DEFAULT_CONFIG, GridFunction, QuadratureConfig, TransformResult,
                       adaptive_quad_many, as_grid_function, compose_sigma, cumulative,
                       delta_integral, _split)
from .errors import (DenseBoundary, NonConstantGraininess, NotRegressive, OutsideRegion,
                     TimeScaleError)
from .exponential import constant_exponent, exp_ominus_many, lambda_limit, lambda_many
from .hilger import RegionSpec, cdot, cplus, hilger_re, in_region, is_pos_regressive
from .laplace import DecayEnvelope, convergence_region, laplace, modulated_laplace
from .timescale import TimeScale

DEFAULT_TOL = 1e-7

Verdict = Literal["null", "not_null", "inconclusive"]


@dataclass(frozen=True)
class LatticeSpec:
    """Parameters of a finite lattice of modulated transforms.

    Cell ``(n, k)`` for ``0 <= n <= n_max`` and ``0 <= k <= k_max`` uses
    ``varsigma_seq[k]``.  A leading zero is admitted; its cells are plain
    transforms at alpha.
    """

    alpha: complex
    varsigma_seq: tuple[float, ...]
    n_max: int
    k_max: int | None = None

    def __post_init__(self):
        seq = tuple(float(v) for v in self.varsigma_seq)
        if not seq:
            raise ValueError("varsigma_seq must not be empty")
        k_max = len(seq) - 1 if self.k_max is None else int(self.k_max)
        if k_max < 0 or k_max >= len(seq):
            raise ValueError(f"k_max={k_max} needs {k_max + 1} sequence members, got {len(seq)}")
        seq = seq[:k_max + 1]
        if seq[0] < 0 or any(not b > a for a, b in zip(seq, seq[1:])):
            raise ValueError("varsigma_seq must be nonnegative and strictly increasing")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "varsigma_seq", seq)
        object.__setattr__(self, "k_max", k_max)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_max + 1, self.k_max + 1


@dataclass(frozen=True)
class NullReport:
    verdict: Verdict
    max_cumulative: float
    worst_node: float
    nodes_checked: int
    tol: float


@dataclass
class LerchVerdict:
    hypothesis_max: float
    hypothesis_holds: bool
    null_report: NullReport
    witness: tuple[int, int] | None
    cells: list[list[TransformResult]] = field(default_factory=list, repr=False)

    @property
    def falsification(self) -> bool:
        """The hypothesis held on the lattice although f is clearly not null."""
        return self.hypothesis_holds and self.null_report.verdict == "not_null"


def classify(max_cumulative: float, tol: float) -> Verdict:
    if max_cumulative <= tol:
        return "null"
    if max_cumulative > 10 * tol:
        return "not_null"
    return "inconclusive"


def null_check(T: TimeScale, f, s: float, t_max: float, tol: float = DEFAULT_TOL,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> NullReport:
    """Scan the partial integrals ``int_s^t f`` for t up to t_max."""
    s, t_max = T.snap(s), T.snap(t_max)
    if not t_max > s:
        raise ValueError("null_check needs t_max > s")
    table = cumulative(T, f, s, t_max, cfg)
    worst, node = table.max_abs()
    return NullReport(classify(worst, tol), worst, node, len(table), tol)


def modulated_null_check(T: TimeScale, f_null, g, s: float, t_max: float,
                         tol: float = DEFAULT_TOL,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> NullReport:
    """:func:`null_check` of ``eta -> f_null(eta) g(sigma(eta))``."""
    return null_check(T, as_grid_function(f_null) * compose_sigma(T, g), s, t_max, tol, cfg)


# ----------------------------------------------------------------------
# lattice of modulated transforms


def _check_spec(T: TimeScale, s: float, spec: LatticeSpec, growth: float):
    if not is_pos_regressive(T, s, spec.alpha):
        raise NotRegressive(f"alpha={spec.alpha} is not positively regressive on [{s}, inf)")
    if not in_region(convergence_region(T, s, growth), spec.alpha):
        raise OutsideRegion(f"alpha={spec.alpha} is outside the convergence region for growth {growth}")


def _failed(message: str) -> TransformResult:
    return TransformResult(complex(math.nan, math.nan), math.nan, math.inf, False, 0, message)


def _shared_sweep(T: TimeScale, f: GridFunction, s: float, spec: LatticeSpec,
                  growth: float, cfg: QuadratureConfig) -> list[list[TransformResult]]:
    """All cells on one set of nodes.

    The envelope of the plain transform fixes the truncation point R.  For
    a nonnegative vs the modulating factor has modulus at most one beyond
    s, so the tail of every cell is dominated by the tail of the plain
    transform and the same R and tail estimate serve the whole lattice.
    """
    R, tail_est = DecayEnvelope(f, spec.alpha, growth).closing_point(
        T, s, max(s, T.window_end), cfg.abs_tol)
    n_pow = np.arange(spec.n_max + 1)
    m = len(n_pow) * len(spec.varsigma_seq)
    exps = [constant_exponent(T, complex(v)) for v in spec.varsigma_seq]

    def weights(sig: np.ndarray) -> np.ndarray:
        logs = np.stack([ce.log_ratio(sig, s)[0] for ce in exps])        # (K,) + shape
        w = np.exp(-n_pow.reshape((-1, 1) + (1,) * sig.ndim) * logs[None])  # (N, K) + shape
        return w.reshape((m,) + sig.shape)

    part = T.partition(s, R)
    total = np.zeros(m, dtype=complex)
    nevals = len(part.points)
    if len(part.points):
        sig = part.points + part.mus
        vals = part.mus * f.at(part.points) * exp_ominus_many(T, spec.alpha, sig, s)
        total += weights(sig) @ vals
    for lo, hi in part.dense:
        for a, b in _split(lo, hi, f.breakpoints):
            def fn(x):
                return (f.on_dense(x) * exp_ominus_many(T, spec.alpha, x.ravel(), s).reshape(x.shape)
                        )[None] * weights(x)
            v, _, n = adaptive_quad_many(fn, a, b, m, cfg)
            total += v
            nevals += n
    grid = total.reshape(len(n_pow), len(spec.varsigma_seq))
    return [[TransformResult(complex(grid[n, k]), R, tail_est, True, nevals)
             for k in range(grid.shape[1])] for n in range(grid.shape[0])]


def _cellwise_sweep(T, f, s, spec, growth, cfg):
    rows = []
    for n in range(spec.n_max + 1):
        row = []
        for vs in spec.varsigma_seq:
            try:
                if n == 0 or vs == 0.0:
                    row.append(laplace(T, f, s, spec.alpha, growth, cfg))
                else:
                    row.append(modulated_laplace(T, f, s, spec.alpha, vs, growth, cfg, power=n))
            except (TimeScaleError, ArithmeticError) as exc:
                row.append(_failed(f"{type(exc).__name__}: {exc}"))
        rows.append(row)
    return rows


def lattice_sweep(T: TimeScale, f, s: float, spec: LatticeSpec, growth: float = 0.0,
                  tol: float = DEFAULT_TOL, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  shared: bool = True) -> list[list[TransformResult]]:
    """Matrix of modulated transforms indexed ``[n][k]``.

    Failures are recorded per cell in ``TransformResult.error`` and the sweep
    continues.  ``shared=False`` evaluates each cell independently.
    """
    f = as_grid_function(f)
    s = T.snap(s)
    _check_spec(T, s, spec, growth)
    if shared:
        try:
            return _shared_sweep(T, f, s, spec, growth, cfg)
        except (TimeScaleError, ArithmeticError):
            pass
    return _cellwise_sweep(T, f, s, spec, growth, cfg)


def lerch_verify(T: TimeScale, f, s: float, spec: LatticeSpec, t_max: float,
                 tol: float = DEFAULT_TOL, cfg: QuadratureConfig = DEFAULT_CONFIG,
                 growth: float = 0.0) -> LerchVerdict:
    """Sweep the lattice, test f for nullity, and compare the two."""
    cells = lattice_sweep(T, f, s, spec, growth, tol, cfg)
    mags = np.array([[abs(c.value) if c.error is None else math.inf for c in row]
                     for row in cells])
    mags = np.where(np.isnan(mags), math.inf, mags)
    worst = float(mags.max())
    witness = np.unravel_index(int(np.argmax(mags)), mags.shape)  # first maximum in row-major order
    report = null_check(T, f, s, t_max, tol, cfg)
    holds = worst <= tol
    return LerchVerdict(worst, holds, report, None if holds else (int(witness[0]), int(witness[1])),
                        cells)


def write_lattice_csv(cells: list[list[TransformResult]], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "k", "re", "im", "converged", "tail_estimate"])
    for n, row in enumerate(cells):
        for k, c in enumerate(row):
            v = complex(c.value)
            w.writerow([n, k, repr(v.real), repr(v.imag), str(c.converged).lower(),
                        repr(float(c.tail_estimate))])


# ----------------------------------------------------------------------
# the characteristic-function step of the uniqueness argument


def _lambda_weighted(T: TimeScale, g: GridFunction, t: float, varsigma: float) -> GridFunction:
    def at(ts):
        return g.at(ts) * lambda_many(T, varsigma, T.sigma_many(ts), t)

    def dense(ts):
        return g.on_dense(ts) * lambda_many(T, varsigma, ts.ravel(), t).reshape(ts.shape)
    # the dense transition sits just right of t with width about log(vs)/vs
    width = math.log(max(varsigma, 2.0)) / varsigma
    return GridFunction(at, dense, g.breakpoints + (t, t + width, t + 4 * width))


def char_approx(T: TimeScale, g, s: float, t: float, varsigma: float, r_trunc: float,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``int_s^r g(eta) Lambda(vs; sigma(eta), t) Delta eta``."""
    if not varsigma > 0:
        raise ValueError("varsigma must be positive")
    s, t, r_trunc = T.snap(s), T.snap(t), T.snap(r_trunc)
    return delta_integral(T, _lambda_weighted(T, as_grid_function(g), t, varsigma), s, r_trunc, cfg)


def char_limit(T: TimeScale, g, s: float, t: float, r_trunc: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Limit of :func:`char_approx` as vs grows.

    Weights become the pointwise limit of Lambda: at scattered eta that is
    ``lambda_limit(sigma(eta), t)``, on dense cells the indicator of ``eta > t``.
    """
    g = as_grid_function(g)
    s, t, r_trunc = T.snap(s), T.snap(t), T.snap(r_trunc)

    def at(ts):
        lim = np.array([lambda_limit(T, float(x), t) for x in T.sigma_many(ts).ravel()])
        return g.at(ts) * lim.reshape(ts.shape)

    def dense(ts):
        return np.where(ts > t, g.on_dense(ts), 0.0)
    return delta_integral(T, GridFunction(at, dense, g.breakpoints + (t,)), s, r_trunc, cfg)


def chi_shift_check(T: TimeScale, s: float, t: float, eta: float) -> float:
    """Residual of ``chi(sigma eta) = chi(eta) + mu(eta) chi^Delta(eta)`` for ``chi = 1_[s,t)``.

    Evaluated in exact rational arithmetic, so scattered points give exactly 0.
    """
    s, t, eta = T.snap(s), T.snap(t), T.snap(eta)
    sig = T.sigma(eta)

    def chi(x: float) -> Fraction:
        return Fraction(1) if s <= x < t else Fraction(0)

    if sig == eta:
        if eta == t:
            raise DenseBoundary(f"chi has no delta-derivative at the right-dense point {t}")
        return 0.0
    mu = Fraction(sig) - Fraction(eta)
    deriv = (chi(sig) - chi(eta)) / mu
    return float(chi(sig) - (chi(eta) + mu * deriv))


def constant_graininess_reduce(T: TimeScale, s: float, beta: float, varsigma: float,
                               n_max: int, k_max: int, growth: float = 0.0) -> LatticeSpec:
    """Lattice with ``alpha = beta`` and ``vs_k = k (.) vs`` for ``k = 1..k_max``.

    Cell ``(n, k)`` then evaluates the transform at ``beta (+) (n k) (.) vs``.
    The returned spec indexes those members from 0.
    """
    lo, hi = T.mu_range(s)
    if lo != hi:
        raise NonConstantGraininess(f"graininess ranges over [{lo}, {hi}] beyond {s}")
    h = lo
    if k_max < 1:
        raise ValueError("the reduction starts at k = 1")
    if not is_pos_regressive(T, s, beta):
        raise NotRegressive(f"beta={beta} is not positively regressive")
    region = RegionSpec(h, float(growth))
    if not in_region(region, beta):
        raise OutsideRegion(f"Re_{h}(beta) = {hilger_re(h, beta)} is not above {growth}")
    seq = tuple(float(cdot(h, k, varsigma).real) for k in range(1, k_max + 1))
    for n in range(n_max + 1):
        for v in seq:
            point = cplus(h, beta, cdot(h, n, v))
            if not in_region(region, point):
                raise OutsideRegion(f"lattice point {point} leaves the convergence region")
    return LatticeSpec(complex(beta), seq, n_max)
