"""Finitely described time scales.

A time scale is stored as a finite *window* ``[window_start, window_end]``
made of dense intervals and scattered points, followed by a *tail* that
continues it to ``+inf``.  Internally the window is normalized into
disjoint half-open dense cells ``[a, b)`` and isolated points; the right
endpoint of a dense cell is always the start of the next element, so every
isolated point jumps to the start of whatever comes after it.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import EmptyRange, InvalidTimeScale, NotInTimeScale, UnboundedWindowOnly

TOL = 1e-12


def _tol(t: float) -> float:
    # absolute 1e-12 near the origin, widened to a few ulps far out in a tail
    return TOL * max(1.0, abs(t))


@dataclass(frozen=True)
class DenseInterval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidTimeScale(f"dense interval needs a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class ScatteredPoint:
    t: float


Segment = Union[DenseInterval, ScatteredPoint]


@dataclass(frozen=True)
class Continuous:
    pass


@dataclass(frozen=True)
class UniformDiscrete:
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidTimeScale(f"uniform tail step must be positive, got {self.h}")


@dataclass(frozen=True)
class Geometric:
    q: float
    base: float

    def __post_init__(self):
        if not self.q > 1:
            raise InvalidTimeScale(f"geometric tail ratio must exceed 1, got {self.q}")
        if not self.base > 0:
            raise InvalidTimeScale(f"geometric tail base must be positive, got {self.base}")


@dataclass(frozen=True)
class WindowOnly:
    pass


TailSpec = Union[Continuous, UniformDiscrete, Geometric, WindowOnly]


class Cell(NamedTuple):
    """One piece of a partition of ``[a, b)_T``.

    Scattered cells are single points with graininess ``mu`` and
    ``end = sigma(start)``; dense cells are intervals ``[start, end)``
    with ``mu = 0``.
    """

    start: float
    mu: float
    kind: str
    end: float


@dataclass(frozen=True)
class Partition:
    """Vector form of a partition: scattered points in order plus dense cells."""

    points: np.ndarray
    mus: np.ndarray
    dense: tuple[tuple[float, float], ...]

    @property
    def measure(self) -> float:
        return float(self.mus.sum()) + sum(b - a for a, b in self.dense)


@dataclass(frozen=True)
class TimeScale:
    window_start: float
    window_end: float
    segments: tuple[Segment, ...]
    tail: TailSpec = Continuous()

    # normalized window elements; filled in __post_init__
    _starts: np.ndarray = field(init=False, repr=False, compare=False)
    _ends: np.ndarray = field(init=False, repr=False, compare=False)
    _dense: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ws, we = float(self.window_start), float(self.window_end)
        object.__setattr__(self, "window_start", ws)
        object.__setattr__(self, "window_end", we)
        object.__setattr__(self, "segments", tuple(self.segments))
        if not ws <= we:
            raise InvalidTimeScale(f"window start {ws} exceeds window end {we}")
        tail = self.tail
        if isinstance(tail, Geometric) and tail.base != we:
            raise InvalidTimeScale(
                f"geometric tail base {tail.base} must equal the window end {we}")

        intervals, points = [], []
        for seg in self.segments:
            if isinstance(seg, DenseInterval):
                if seg.a < ws or seg.b > we:
                    raise InvalidTimeScale(f"interval [{seg.a}, {seg.b}] leaves the window [{ws}, {we}]")
                intervals.append((float(seg.a), float(seg.b)))
            elif isinstance(seg, ScatteredPoint):
                if seg.t < ws or seg.t > we:
                    raise InvalidTimeScale(f"point {seg.t} lies outside the window [{ws}, {we}]")
                points.append(float(seg.t))
            else:
                raise InvalidTimeScale(f"unknown segment {seg!r}")

        intervals.sort()
        merged: list[list[float]] = []
        for a, b in intervals:
            if merged and a < merged[-1][1]:
                raise InvalidTimeScale(f"interval [{a}, {b}] overlaps [{merged[-1][0]}, {merged[-1][1]}]")
            if merged and a == merged[-1][1]:
                merged[-1][1] = b
            else:
                merged.append([a, b])
        points.sort()
        for p, q in zip(points, points[1:]):
            if p == q:
                raise InvalidTimeScale(f"point {p} listed twice")
        for p in points:
            for a, b in merged:
                if a <= p <= b:
                    raise InvalidTimeScale(f"point {p} overlaps interval [{a}, {b}]")

        has_tail = not isinstance(tail, WindowOnly)
        # (start, end, dense) with dense cells half-open; end of a point is filled later
        elems: list[tuple[float, float, bool]] = []
        for a, b in merged:
            elems.append((a, b, True))
            if b < we or not has_tail:
                elems.append((b, math.nan, False))
        for p in points:
            if p == we and has_tail:
                continue  # generated by the tail
            elems.append((p, math.nan, False))
        elems.sort()

        if isinstance(tail, Continuous):
            if elems and elems[-1][2] and elems[-1][1] == we:
                elems[-1] = (elems[-1][0], math.inf, True)
            else:
                elems.append((we, math.inf, True))

        first = elems[0][0] if elems else (we if has_tail else None)
        if first != ws:
            raise InvalidTimeScale(f"window start {ws} must be a point of the time scale")
        if not has_tail and elems[-1][0] != we:
            raise InvalidTimeScale(f"window end {we} must be a point of a time scale without tail")

        starts = np.array([e[0] for e in elems], dtype=float)
        dense = np.array([e[2] for e in elems], dtype=bool)
        ends = np.empty(len(elems))
        for i, (a, b, is_dense) in enumerate(elems):
            if is_dense:
                ends[i] = b
            elif i + 1 < len(elems):
                ends[i] = elems[i + 1][0]
            elif has_tail:
                ends[i] = we
            else:
                ends[i] = a  # maximum of T: sigma(max) = max
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "_dense", dense)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def integers(cls, start: float = 0.0, h: float = 1.0) -> "TimeScale":
        """The lattice ``start + h*N_0``."""
        return cls(start, start, (), UniformDiscrete(h))

    @classmethod
    def reals(cls, start: float = 0.0) -> "TimeScale":
        return cls(start, start, (), Continuous())

    @classmethod
    def geometric(cls, q: float, base: float = 1.0) -> "TimeScale":
        """``{base * q**k : k >= 0}``."""
        return cls(base, base, (), Geometric(q, base))

    # ------------------------------------------------------------------
    # tail helpers

    @property
    def bounded(self) -> bool:
        return isinstance(self.tail, WindowOnly)

    @property
    def discrete_tail(self) -> bool:
        return isinstance(self.tail, (UniformDiscrete, Geometric))

    def tail_point(self, j):
        """The j-th tail point (j may be an integer array)."""
        tail = self.tail
        if isinstance(tail, UniformDiscrete):
            return self.window_end + np.asarray(j, dtype=float) * tail.h if np.ndim(j) else \
                self.window_end + j * tail.h
        if isinstance(tail, Geometric):
            if np.ndim(j):
                return tail.base * np.power(tail.q, np.asarray(j, dtype=float))
            return tail.base * tail.q ** j
        raise ValueError("tail has no discrete generator")

    def tail_index(self, t: float) -> int:
        """Index of the tail point nearest to t (no membership check)."""
        tail = self.tail
        if isinstance(tail, UniformDiscrete):
            return int(round((t - self.window_end) / tail.h))
        if isinstance(tail, Geometric):
            return int(round(math.log(t / tail.base) / math.log(tail.q)))
        raise ValueError("tail has no discrete generator")

    def _tail_indices(self, ts: np.ndarray) -> np.ndarray:
        tail = self.tail
        if isinstance(tail, UniformDiscrete):
            return np.rint((ts - self.window_end) / tail.h)
        return np.rint(np.log(ts / tail.base) / math.log(tail.q))

    # ------------------------------------------------------------------
    # membership and jumps

    def _element(self, t: float) -> int:
        """Index of the window element containing t, or -1 for the discrete tail."""
        if self.discrete_tail and t >= self.window_end - _tol(self.window_end):
            return -1
        i = bisect.bisect_right(self._starts, t + _tol(t)) - 1
        return i

    def snap(self, t: float) -> float:
        """Return the exact member of T within tolerance of t, else raise NotInTimeScale."""
        t = float(t)
        if not math.isfinite(t):
            raise NotInTimeScale(t)
        i = self._element(t)
        if i == -1:
            j = self.tail_index(t)
            if j >= 0:
                p = self.tail_point(j)
                if abs(p - t) <= _tol(t):
                    return p
            raise NotInTimeScale(t)
        if i < 0:
            raise NotInTimeScale(t)
        a = self._starts[i]
        if abs(t - a) <= _tol(t):
            return float(a)
        if self._dense[i] and a < t < self._ends[i]:
            return t
        raise NotInTimeScale(t)

    def contains(self, t: float) -> bool:
        try:
            self.snap(t)
        except NotInTimeScale:
            return False
        return True

    __contains__ = contains

    def sigma(self, t: float) -> float:
        """Forward jump: the next point of T after t, or t itself when right-dense."""
        t = self.snap(t)
        i = self._element(t)
        if i == -1:
            return float(self.tail_point(self.tail_index(t) + 1))
        if self._dense[i]:
            return t
        return float(self._ends[i])

    def graininess(self, t: float) -> float:
        t = self.snap(t)
        return self.sigma(t) - t

    mu = graininess

    def is_right_dense(self, t: float) -> bool:
        return self.graininess(t) == 0.0

    def sigma_many(self, ts) -> np.ndarray:
        """Vectorized sigma for arrays of points already known to lie in T."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty_like(ts)
        if self.discrete_tail:
            in_tail = ts >= self.window_end - TOL * np.maximum(1.0, np.abs(ts))
        else:
            in_tail = np.zeros(ts.shape, dtype=bool)
        if in_tail.any():
            j = self._tail_indices(ts[in_tail])
            out[in_tail] = self.tail_point(j + 1)
        win = ~in_tail
        if win.any():
            tw = ts[win]
            idx = np.searchsorted(self._starts, tw + TOL * np.maximum(1.0, np.abs(tw)), "right") - 1
            idx = np.clip(idx, 0, len(self._starts) - 1)
            out[win] = np.where(self._dense[idx], tw, self._ends[idx])
        return out

    # ------------------------------------------------------------------
    # partitions

    def partition(self, a: float, b: float) -> Partition:
        """Split ``[a, b)_T`` into scattered points (with graininess) and dense cells."""
        a, b = self.snap(a), self.snap(b)
        if a > b:
            raise EmptyRange(f"empty range: {a} > {b}")
        pts: list[float] = []
        mus: list[float] = []
        dense: list[tuple[float, float]] = []
        tail_pts = tail_mus = None
        if a < b:
            i = max(bisect.bisect_right(self._starts, a) - 1, 0)
            n = len(self._starts)
            win_stop = b
            if self.discrete_tail:
                win_stop = min(b, self.window_end)
            while i < n and self._starts[i] < win_stop:
                s, e = float(self._starts[i]), float(self._ends[i])
                if self._dense[i]:
                    lo, hi = max(s, a), min(e, win_stop)
                    if lo < hi:
                        dense.append((lo, hi))
                elif s >= a:
                    pts.append(s)
                    mus.append(e - s)
                i += 1
            if self.discrete_tail and b > self.window_end:
                j0 = self.tail_index(a) if a >= self.window_end else 0
                j1 = self.tail_index(b)
                j = np.arange(j0, j1 + 1)
                grid = self.tail_point(j)
                tail_pts = grid[:-1]
                tail_mus = np.diff(grid)
        points = np.array(pts, dtype=float)
        mu_arr = np.array(mus, dtype=float)
        if tail_pts is not None:
            points = np.concatenate([points, tail_pts])
            mu_arr = np.concatenate([mu_arr, tail_mus])
        return Partition(points, mu_arr, tuple(dense))

    def enumerate(self, a: float, b: float) -> list[Cell]:
        """Ordered partition of ``[a, b)_T`` into scattered points and maximal dense cells."""
        part = self.partition(a, b)
        cells = [Cell(float(p), float(m), "scattered", float(p + m))
                 for p, m in zip(part.points, part.mus)]
        cells += [Cell(lo, 0.0, "dense", hi) for lo, hi in part.dense]
        cells.sort(key=lambda c: c.start)
        return cells

    # ------------------------------------------------------------------
    # graininess over [s, inf)

    def _window_mus_from(self, s: float) -> tuple[bool, list[float]]:
        """(has right-dense points >= s in the window, graininess of window points >= s)."""
        has_dense = False
        mus = []
        for start, end, is_dense in zip(self._starts, self._ends, self._dense):
            if is_dense:
                if end > s:
                    has_dense = True
            elif start >= s and end > start:
                mus.append(float(end - start))
        return has_dense, mus

    def min_graininess(self, s: float) -> float:
        """Infimum of the graininess over ``[s, inf)_T``."""
        s = self.snap(s)
        if self.bounded:
            raise UnboundedWindowOnly("minimal graininess needs a time scale unbounded above")
        has_dense, mus = self._window_mus_from(s)
        if has_dense or isinstance(self.tail, Continuous):
            return 0.0
        tail = self.tail
        if isinstance(tail, UniformDiscrete):
            mus.append(tail.h)
        else:
            t0 = max(s, self.window_end)
            j = self.tail_index(t0)
            mus.append(float(self.tail_point(j + 1) - self.tail_point(j)))
        return min(mus)

    def mu_range(self, s: float) -> tuple[float, float]:
        """Infimum and supremum of the graininess over ``[s, inf)_T``.

        For a time scale without tail the range is taken over ``[s, max T)``,
        which is where regressivity matters.
        """
        s = self.snap(s)
        has_dense, mus = self._window_mus_from(s)
        lo = [0.0] if has_dense else []
        hi = [0.0] if has_dense else []
        tail = self.tail
        if isinstance(tail, Continuous):
            lo.append(0.0)
            hi.append(0.0)
        elif isinstance(tail, UniformDiscrete):
            lo.append(tail.h)
            hi.append(tail.h)
        elif isinstance(tail, Geometric):
            t0 = max(s, self.window_end)
            j = self.tail_index(t0)
            lo.append(float(self.tail_point(j + 1) - self.tail_point(j)))
            hi.append(math.inf)
        lo += mus
        hi += mus
        if not lo:
            return 0.0, 0.0
        return min(lo), max(hi)

    # ------------------------------------------------------------------

    def sample(self, s: float, count: int) -> np.ndarray:
        """``count`` points of ``[s, inf)_T``: scattered points in order plus
        a few interior samples of each dense cell."""
        s = self.snap(s)
        out: list[float] = []
        for start, end, is_dense in zip(self._starts, self._ends, self._dense):
            if len(out) >= count:
                break
            if is_dense:
                lo = max(start, s)
                hi = end if math.isfinite(end) else max(lo, self.window_end) + 10.0
                if lo < hi:
                    out.extend(np.linspace(lo, hi, 9, endpoint=False)[: count - len(out)].tolist())
            elif start >= s:
                out.append(float(start))
        if isinstance(self.tail, Continuous) and len(out) < count:
            hi = max(s, self.window_end) + 10.0
            extra = np.linspace(hi, hi + count, count - len(out), endpoint=False)
            out.extend(extra.tolist())
        elif self.discrete_tail and len(out) < count:
            j0 = self.tail_index(s) if s >= self.window_end else 0
            grid = self.tail_point(np.arange(j0, j0 + count - len(out)))
            out.extend(grid[np.isfinite(grid)].tolist())
        return np.array(sorted(out)[:count])
