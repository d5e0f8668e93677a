"""Reader and writer for time-scale description files.

Example::

    # [0, 1] followed by two isolated points and the integers from 3
    window 0 3
    interval 0 1
    points 1.5 2
    tail uniform 1

``tail`` is one of ``continuous``, ``uniform <h>``, ``geometric <q>`` or
``none``; a geometric tail grows from the window end.
"""

from __future__ import annotations

import os
from typing import Iterable

from .errors import InvalidTimeScale, TimeScaleFormatError
from .timescale import (Continuous, DenseInterval, Geometric, ScatteredPoint, TimeScale,
                        UniformDiscrete, WindowOnly)


def _numbers(words: list[str], lineno: int) -> list[float]:
    try:
        return [float(w) for w in words]
    except ValueError:
        bad = next(w for w in words if not _is_float(w))
        raise TimeScaleFormatError(f"not a number: {bad!r}", lineno) from None


def _is_float(w: str) -> bool:
    try:
        float(w)
    except ValueError:
        return False
    return True


def parse_timescale(text: str) -> TimeScale:
    window = None
    window_line = 0
    tail = None
    segments: list[tuple[int, object]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "window":
            if window is not None:
                raise TimeScaleFormatError("window given twice", lineno)
            nums = _numbers(rest, lineno)
            if len(nums) != 2 or not nums[0] <= nums[1]:
                raise TimeScaleFormatError("window needs <start> <end> with start <= end", lineno)
            window, window_line = (nums[0], nums[1]), lineno
        elif key == "interval":
            nums = _numbers(rest, lineno)
            if len(nums) != 2 or not nums[0] < nums[1]:
                raise TimeScaleFormatError("interval needs <a> <b> with a < b", lineno)
            segments.append((lineno, DenseInterval(*nums)))
        elif key == "points":
            nums = _numbers(rest, lineno)
            if not nums:
                raise TimeScaleFormatError("points needs at least one value", lineno)
            segments.extend((lineno, ScatteredPoint(p)) for p in nums)
        elif key == "tail":
            if tail is not None:
                raise TimeScaleFormatError("tail given twice", lineno)
            tail = (_tail(rest, lineno), lineno)
        else:
            raise TimeScaleFormatError(f"unknown directive {key!r}", lineno)
    if window is None:
        raise TimeScaleFormatError("missing window line", 0)
    ws, we = window
    _check_segments(segments, ws, we)
    tail_spec, tail_line = tail if tail is not None else (Continuous(), window_line)
    if isinstance(tail_spec, Geometric):
        if we <= 0:
            raise TimeScaleFormatError("a geometric tail needs a positive window end", tail_line)
        tail_spec = Geometric(tail_spec.q, we)
    try:
        return TimeScale(ws, we, [seg for _, seg in segments], tail_spec)
    except InvalidTimeScale as exc:
        raise TimeScaleFormatError(str(exc), window_line) from None


def _tail(words: list[str], lineno: int):
    if not words:
        raise TimeScaleFormatError("tail needs a kind", lineno)
    kind, args = words[0], _numbers(words[1:], lineno)
    try:
        if kind == "continuous" and not args:
            return Continuous()
        if kind == "none" and not args:
            return WindowOnly()
        if kind == "uniform" and len(args) == 1:
            return UniformDiscrete(args[0])
        if kind == "geometric" and len(args) == 1:
            return Geometric(args[0], 1.0)
    except (InvalidTimeScale, ValueError) as exc:
        raise TimeScaleFormatError(str(exc), lineno) from None
    raise TimeScaleFormatError(f"bad tail specification {' '.join(words)!r}", lineno)


def _check_segments(segments: Iterable[tuple[int, object]], ws: float, we: float):
    seen: list[tuple[float, float, int]] = []
    for lineno, seg in segments:
        a, b = (seg.a, seg.b) if isinstance(seg, DenseInterval) else (seg.t, seg.t)
        if a < ws or b > we:
            raise TimeScaleFormatError(f"[{a}, {b}] leaves the window [{ws}, {we}]", lineno)
        for c, d, other in seen:
            # intervals may share an endpoint; nothing else may touch
            if a < d and c < b or (a == b or c == d) and c <= b and a <= d:
                raise TimeScaleFormatError(f"overlaps the segment on line {other}", lineno)
        seen.append((a, b, lineno))


def load_timescale(path: str | os.PathLike) -> TimeScale:
    with open(path, encoding="utf-8") as fh:
        return parse_timescale(fh.read())


def dump_timescale(T: TimeScale) -> str:
    lines = [f"window {T.window_start!r} {T.window_end!r}"]
    points = []
    for seg in T.segments:
        if isinstance(seg, DenseInterval):
            lines.append(f"interval {seg.a!r} {seg.b!r}")
        else:
            points.append(repr(seg.t))
    if points:
        lines.append("points " + " ".join(points))
    tail = T.tail
    if isinstance(tail, Continuous):
        lines.append("tail continuous")
    elif isinstance(tail, UniformDiscrete):
        lines.append(f"tail uniform {tail.h!r}")
    elif isinstance(tail, Geometric):
        lines.append(f"tail geometric {tail.q!r}")
    else:
        lines.append("tail none")
    return "\n".join(lines) + "\n"
