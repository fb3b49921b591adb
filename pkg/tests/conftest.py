"""Shared pytest fixtures for environment isolation and evaluation memo resets."""

from fractions import Fraction
from pathlib import Path

import pytest

from a2_spider.config import Settings
from a2_spider.qalg import Scalar, qint
from a2_spider.skein import CACHE


@pytest.fixture(autouse=True)
def isolate_environment(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Point library and golden directories at per-test temporary paths."""
    for name in ("A2_SPIDER_CACHE_SIZE", "A2_SPIDER_THREADS", "A2_SPIDER_LIBRARY_DIR"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("A2_SPIDER_GOLDEN_DIR", str(tmp_path / "golden"))
    monkeypatch.setattr(Settings, "threads_override", None)


@pytest.fixture(autouse=True)
def reset_memo() -> None:
    """Start every test with an empty closed-web evaluation memo."""
    CACHE.clear()


def q(power: int | str) -> Scalar:
    """Return q raised to an integer or fractional power given as text."""
    return Scalar.q(Fraction(power))


def quantum(*factors: int) -> Scalar:
    """Return the product of the quantum integers [n] for each factor."""
    value = Scalar.one()
    for factor in factors:
        value = value * qint(factor)
    return value
