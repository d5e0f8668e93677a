"""The Laplace transform on a time scale unbounded above.

    L{f}(z) = int_s^inf f(eta) e_{(-)z}(sigma(eta), s) Delta eta

On the reals this is the classical transform, on hZ a scaled Z-transform.
Convergence is only asserted inside the region ``Re_{mu_*(s)}(z) > growth``
where ``growth`` is the caller's declared exponential growth rate of f
(``|f(t)| <= C e_growth(t, s)``).
"""

from __future__ import annotations

import math

import numpy as np

from .calculus import (DEFAULT_CONFIG, GridFunction, QuadratureConfig, TransformResult,
                       as_grid_function, compose_sigma, improper_delta_integral, tail_series,
                       truncation_schedule)
from .errors import NoConvergence, NotRegressive, OutsideRegion, UnboundedWindowOnly
from .exponential import constant_exponent, exp_const_many, ominus_function
from .hilger import RegionSpec, in_region, is_regressive
from .timescale import TimeScale

__all__ = ["DecayEnvelope", "TransformResult", "convergence_region", "laplace",
           "modulated_laplace", "transform_integrand"]


def convergence_region(T: TimeScale, s: float, growth: float) -> RegionSpec:
    """``{z : Re_h(z) > growth}`` with ``h = mu_*(s)``."""
    return RegionSpec(T.min_graininess(s), float(growth))


class DecayEnvelope:
    """Tail bound for ``f(eta) e_{(-)z}(sigma(eta), s)``.

    Uses ``|f(t)| <= C e_growth(t, s)``; C is the running maximum of
    ``|f| / e_growth`` over every tail point integrated so far, so the bound
    is a-posteriori and tightens only as the truncation point moves out.
    No bound is offered before ``2**WARM_UP`` schedule steps past the window,
    so an f that merely vanishes on the first few tail points (h_n does on a
    lattice) cannot produce C = 0.
    """

    WARM_UP = 4

    def __init__(self, f: GridFunction, z: complex, growth: float, samples: int = 65):
        self.f = f
        self.z = complex(z)
        self.growth = float(growth)
        self.samples = samples
        self.C = 0.0

    def _observe(self, T: TimeScale, s: float, lo: float, hi: float):
        if T.discrete_tail:
            pts = T.partition(lo, hi).points
            vals = self.f.at(pts)
        else:
            pts = np.linspace(lo, hi, self.samples)
            vals = self.f.on_dense(pts)
        if not len(pts):
            return
        weight = exp_const_many(T, self.growth, pts, s).real
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(vals) / weight
        ratio = ratio[np.isfinite(ratio)]
        if ratio.size:
            self.C = max(self.C, float(ratio.max()))

    def tail_estimate(self, T: TimeScale, s: float, lo: float, hi: float) -> float:
        # look one chunk ahead so that f vanishing on [lo, hi) alone does not give C = 0
        self._observe(T, s, lo, _look_ahead(T, lo, hi))
        if hi < truncation_schedule(T, max(s, T.window_end), self.WARM_UP):
            return math.inf
        if self.C == 0.0:
            return 0.0
        z, lam = self.z, self.growth
        phi = self.C * math.exp(min(float(_log_ratio(T, s, lam, z, np.array([hi]))[0]), 700.0))
        if not math.isfinite(phi):
            return math.inf
        return tail_series(T, hi, phi,
                           lambda mu, mu_next: (1 + mu * lam) / abs(1 + mu_next * z),
                           z.real - lam)

    def closing_point(self, T: TimeScale, s: float, base: float, abs_tol: float,
                      batch: int = 3, max_doublings: int = 60) -> tuple[float, float]:
        """First point ``R`` of the doubling schedule after ``base`` whose tail
        bound is at most ``abs_tol``, found without integrating anything.

        Candidates are examined ``batch`` at a time with one vectorized pass
        over the tail samples.  Returns ``(R, tail bound)``.
        """
        z, lam = self.z, self.growth
        floor = _last_breakpoint(self.f)
        lo = base
        k0 = self.WARM_UP  # samples still start at base, so nothing before is skipped
        while k0 <= max_doublings:
            # one extra schedule point serves as the look-ahead of the last candidate
            his = np.array([truncation_schedule(T, base, k) for k in range(k0, k0 + batch + 1)])
            if T.discrete_tail:
                pts = T.partition(lo, float(his[-1])).points
                vals = self.f.at(pts)
            else:
                edges = np.concatenate([[lo], his])
                pts = np.concatenate([np.linspace(a, b, self.samples)
                                      for a, b in zip(edges[:-1], edges[1:])])
                vals = self.f.on_dense(pts)
            weight = exp_const_many(T, lam, pts, s).real
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.abs(vals) / weight
            ratio = np.where(np.isfinite(ratio), ratio, 0.0)
            # running maximum of |f|/e_lam over samples before the next candidate
            run = np.maximum.accumulate(np.concatenate([[self.C], ratio]))
            cands = his[:-1]
            Cs = run[np.searchsorted(pts, his[1:], side="left")]
            log_env = _log_ratio(T, s, lam, z, cands)
            for k, hi, C, le in zip(range(k0, k0 + batch), cands, Cs, log_env):
                if hi <= floor or k < self.WARM_UP:
                    continue
                phi = float(C) * math.exp(min(float(le), 700.0))
                if C == 0.0:
                    est = 0.0
                elif not math.isfinite(phi):
                    est = math.inf
                else:
                    est = tail_series(T, float(hi), phi,
                                      lambda mu, mu_next: (1 + mu * lam) / abs(1 + mu_next * z),
                                      z.real - lam)
                if est <= abs_tol:
                    self.C = float(C)
                    return float(hi), est
            self.C = float(run[-1])
            lo = float(cands[-1])
            k0 += batch
        raise NoConvergence(f"tail estimate still above {abs_tol:.3g} at R={lo}")


def _log_ratio(T: TimeScale, s: float, lam: float, z: complex, his: np.ndarray) -> np.ndarray:
    """``log(e_lam(R, s) |e_{(-)z}(sigma R, s)|)`` for each R in his, free of overflow."""
    grow = constant_exponent(T, complex(lam)).log_ratio(his, s)[0].real
    decay = constant_exponent(T, complex(z)).log_ratio(T.sigma_many(his), s)[0].real
    return grow - decay


def _look_ahead(T: TimeScale, lo: float, hi: float) -> float:
    """End of a chunk after hi as long as ``[lo, hi)``, in tail steps when discrete."""
    if not T.discrete_tail or hi < T.window_end:
        return hi + (hi - lo)
    j_lo = T.tail_index(lo) if lo >= T.window_end else 0
    j_hi = T.tail_index(hi)
    return float(T.tail_point(j_hi + max(j_hi - j_lo, 1)))


def _last_breakpoint(f: GridFunction) -> float:
    finite = [b for b in f.breakpoints if math.isfinite(b)]
    return max(finite) if finite else -math.inf


def transform_integrand(T: TimeScale, f, s: float, z: complex) -> GridFunction:
    """``eta -> f(eta) e_{(-)z}(sigma(eta), s)``."""
    return as_grid_function(f) * compose_sigma(T, ominus_function(T, z, s))


def laplace(T: TimeScale, f, s: float, z: complex, growth: float = 0.0,
            cfg: QuadratureConfig = DEFAULT_CONFIG, force: bool = False) -> TransformResult:
    """Laplace transform of f at z with convergence diagnostics.

    Raises OutsideRegion when z is not in the sufficient convergence region
    for the declared growth; with ``force=True`` the integral is attempted
    anyway and ``converged`` reports whether the tail estimate closed.
    """
    if T.bounded:
        raise UnboundedWindowOnly("the Laplace transform needs a time scale unbounded above")
    f = as_grid_function(f)
    s = T.snap(s)
    z = complex(z)
    if not is_regressive(T, s, z):
        raise NotRegressive(f"z={z} is not regressive on [{s}, inf)")
    if not in_region(convergence_region(T, s, growth), z) and not force:
        raise OutsideRegion(
            f"z={z} lies outside Re_{{{T.min_graininess(s)}}}(z) > {growth}; pass force=True to try anyway")
    envelope = DecayEnvelope(f, z, growth)
    return improper_delta_integral(T, transform_integrand(T, f, s, z), s, cfg, envelope,
                                   raise_on_failure=not force)


def modulated_laplace(T: TimeScale, f, s: float, z: complex, c: complex, growth: float = 0.0,
                      cfg: QuadratureConfig = DEFAULT_CONFIG, force: bool = False,
                      power: int = 1) -> TransformResult:
    """Transform at z of ``eta -> f(eta) (e_{(-)c}(sigma(eta), s))**power``."""
    g = as_grid_function(f) * compose_sigma(T, ominus_function(T, c, s, power))
    return laplace(T, g, s, z, growth, cfg, force)
