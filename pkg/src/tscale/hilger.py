"""Arithmetic in the Hilger complex plane.

Every function takes the graininess ``h >= 0`` first.  ``h = 0`` is handled
by the closed-form limits (classical real part, identity cylinder, ordinary
sum and product), never by evaluating a quotient at small ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotRegressive
from .timescale import TimeScale

SINGULAR_TOL = 1e-14
IMAG_TOL = 1e-12


def _check(h: float, z: complex) -> complex:
    w = 1 + h * z
    if h > 0 and abs(w) < SINGULAR_TOL:
        raise NotRegressive(f"1 + h*z vanishes for h={h}, z={z}")
    return w


def principal_arg(w: complex) -> float:
    """Arg with values in (-pi, pi]; a negative real axis with signed zero maps to pi."""
    a = math.atan2(w.imag, w.real)
    return math.pi if a == -math.pi else a


def clog1p(w: complex) -> complex:
    """Principal Log(1 + w), accurate for small |w|."""
    w = complex(w)
    x, y = w.real, w.imag
    # |1+w|^2 - 1 = 2x + x^2 + y^2
    re = 0.5 * math.log1p(2 * x + x * x + y * y)
    return complex(re, principal_arg(1 + w))


def cexpm1(w: complex) -> complex:
    """exp(w) - 1, accurate for small |w|."""
    w = complex(w)
    x, y = w.real, w.imag
    em1 = math.expm1(x)
    re = em1 * math.cos(y) - 2.0 * math.sin(y / 2) ** 2
    im = math.exp(x) * math.sin(y)
    return complex(re, im)


def hilger_re(h: float, z: complex) -> float:
    """Hilger real part ``(|1 + hz| - 1)/h``; ``Re z`` when ``h = 0``."""
    z = complex(z)
    if h == 0:
        return z.real
    w = _check(h, z)
    # (|w| - 1)/h rewritten as (|w|^2 - 1)/(h(|w| + 1)) to keep small-h accuracy
    return (2 * z.real + h * (z.real ** 2 + z.imag ** 2)) / (abs(w) + 1)


def hilger_im(h: float, z: complex) -> float:
    """Hilger imaginary part ``Arg(1 + hz)/h``; ``Im z`` when ``h = 0``."""
    z = complex(z)
    if h == 0:
        return z.imag
    return principal_arg(_check(h, z)) / h


def cylinder(h: float, z: complex) -> complex:
    """Cylinder transform ``Log(1 + hz)/h`` into the strip ``-pi/h < Im <= pi/h``."""
    z = complex(z)
    if h == 0:
        return z
    _check(h, z)
    return clog1p(h * z) / h


def cplus(h: float, z: complex, w: complex) -> complex:
    return z + w + h * z * w


def cminus(h: float, z: complex, w: complex) -> complex:
    d = _check(h, w)
    return (z - w) / d


def cneg(h: float, z: complex) -> complex:
    return cminus(h, 0.0, z)


def cdot(h: float, lam: complex, z: complex) -> complex:
    """Circle dot ``((1 + hz)**lam - 1)/h`` on the principal branch; ``lam*z`` at ``h = 0``."""
    z = complex(z)
    if h == 0:
        return lam * z
    _check(h, z)
    return cexpm1(lam * clog1p(h * z)) / h


def is_regressive(T: TimeScale, s: float, z: complex) -> bool:
    """True iff ``1 + z*mu(t) != 0`` on ``[s, inf)_T``.

    Only constants can fail here: ``1 + z*mu`` vanishes exactly when z is the
    negative real ``-1/mu`` for some graininess value ``mu`` attained beyond s.
    """
    z = complex(z)
    if abs(z.imag) > IMAG_TOL or z.real >= 0:
        return True
    bad_mu = -1.0 / z.real
    mu_min, mu_sup = T.mu_range(s)
    if not mu_min * (1 - 1e-12) <= bad_mu <= mu_sup * (1 + 1e-12):
        return True
    return not _hits_exact(T, s, bad_mu)


def _hits_exact(T: TimeScale, s: float, bad_mu: float) -> bool:
    """Whether the graininess value ``bad_mu`` is attained on ``[s, inf)_T``."""
    from .timescale import Geometric, UniformDiscrete

    def close(m):
        return abs(m - bad_mu) <= 1e-12 * max(1.0, bad_mu)

    s = T.snap(s)
    _, mus = T._window_mus_from(s)
    if any(close(m) for m in mus):
        return True
    tail = T.tail
    if isinstance(tail, UniformDiscrete):
        return close(tail.h)
    if isinstance(tail, Geometric):
        j = round(math.log(bad_mu / ((tail.q - 1) * tail.base)) / math.log(tail.q))
        t0 = max(s, T.window_end)
        if j < T.tail_index(t0):
            return False
        return close(float(T.tail_point(j + 1) - T.tail_point(j)))
    return False


def is_pos_regressive(T: TimeScale, s: float, z: complex) -> bool:
    """True iff ``1 + z*mu(t)`` is real and positive on ``[s, inf)_T``.

    A nonzero imaginary part is only tolerated where every graininess beyond
    s is zero.
    """
    z = complex(z)
    mu_min, mu_sup = T.mu_range(s)
    if mu_sup == 0.0:
        return True
    if abs(z.imag) > IMAG_TOL:
        return False
    if z.real >= 0:
        return True
    return 1 + z.real * mu_sup > 0


@dataclass(frozen=True)
class RegionSpec:
    """``{z : Re_h(z) > lambda}`` for graininess h."""

    h: float
    lam: float

    def __post_init__(self):
        if self.h < 0:
            raise ValueError("graininess must be nonnegative")

    def __contains__(self, z) -> bool:
        return in_region(self, z)


def in_region(region: RegionSpec, z: complex) -> bool:
    return hilger_re(region.h, z) > region.lam
