"""Shipped time scales and expressions used by the tests and ``verify``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .timescale import TimeScale
from .tsfile import parse_timescale

NAMES = ("int", "real", "mixed", "densetail", "geom", "half")


def fixture_path(name: str) -> Path:
    """Path of a shipped file; ``name`` may omit the ``.ts`` suffix."""
    if "." not in name:
        name += ".ts"
    return Path(str(resources.files(__package__).joinpath("fixtures").joinpath(name)))


def load_fixture(name: str) -> TimeScale:
    return parse_timescale(fixture_path(name).read_text(encoding="utf-8"))


def all_fixtures() -> dict[str, TimeScale]:
    return {name: load_fixture(name) for name in NAMES}


def expression_corpus() -> list[str]:
    text = fixture_path("expressions.txt").read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]
