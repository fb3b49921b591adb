"""Tests for environment settings, rewrite traces and stability records."""

from pathlib import Path
from unittest import TestCase

import pytest

from a2_spider.config import RewriteTrace, Settings, StabilityRecord, TraceStep
from a2_spider.qalg import normalize, poly_from_coefficients


def _step(level: int, rule: str) -> TraceStep:
    """Return a trace step with placeholder location data."""
    return TraceStep(level=level, rule=rule, location="node(s) 1", terms=2, term=0, choice=0)


class TestSettings(TestCase):
    """Test environment-variable settings."""

    def setUp(self) -> None:
        self.monkeypatch = pytest.MonkeyPatch()

    def tearDown(self) -> None:
        self.monkeypatch.undo()

    def test_defaults(self) -> None:
        """Test values used when no variable is set."""
        self.monkeypatch.delenv("A2_SPIDER_GOLDEN_DIR")
        self.assertEqual(Settings.cache_size(), 200_000)
        self.assertEqual(Settings.threads(), 1)
        self.assertIsNone(Settings.library_dir())
        self.assertEqual(Settings.golden_dir(), Path("tests") / "golden")

    def test_environment_overrides(self) -> None:
        """Test variables replace the defaults."""
        self.monkeypatch.setenv("A2_SPIDER_CACHE_SIZE", " 64 ")
        self.monkeypatch.setenv("A2_SPIDER_THREADS", "4")
        self.monkeypatch.setenv("A2_SPIDER_LIBRARY_DIR", "~/links")
        self.assertEqual(Settings.cache_size(), 64)
        self.assertEqual(Settings.threads(), 4)
        self.assertEqual(Settings.library_dir(), Path("~/links").expanduser())

    def test_threads_override_wins(self) -> None:
        """Test the command-line override beats the environment."""
        self.monkeypatch.setenv("A2_SPIDER_THREADS", "4")
        self.monkeypatch.setattr(Settings, "threads_override", 2)
        self.assertEqual(Settings.threads(), 2)

    def test_invalid_integers(self) -> None:
        """Test zero and non-numeric values are rejected."""
        for raw in ("0", "-3", "many"):
            self.monkeypatch.setenv("A2_SPIDER_CACHE_SIZE", raw)
            with self.assertRaises(ValueError):
                Settings.cache_size()


class TestRewriteTrace(TestCase):
    """Test level-ordered trace recording."""

    def test_steps_are_ordered_by_level(self) -> None:
        """Test a later insert at a lower level goes first."""
        trace = RewriteTrace()
        trace.add(_step(1, "square"))
        trace.add(_step(0, "crossing-"))
        trace.add(_step(1, "bigon"))
        self.assertEqual([step["rule"] for step in trace.steps], ["crossing-", "square", "bigon"])
        self.assertEqual(len(trace), 3)
        self.assertIn("crossing-", trace[0])
        self.assertIn("-> 2 term(s)", trace[0])

    def test_clear_and_json(self) -> None:
        """Test clearing resets lines, steps and the term count."""
        trace = RewriteTrace()
        trace.add(_step(0, "kink-"))
        trace.final_terms = 3
        self.assertEqual(trace.to_json()["final_terms"], 3)
        self.assertEqual(trace.to_json()["steps"][0]["rule"], "kink-")  # type: ignore[index]
        trace.clear()
        self.assertEqual((len(trace), trace.steps, trace.final_terms), (0, [], 0))


def test_stability_record_rows() -> None:
    """Test report rows for the last color and for a failed comparison."""
    jones = normalize(poly_from_coefficients([1, 1, 1]))
    last = StabilityRecord(n=3, jones=jones)
    assert last.to_dict()["Status"] == "-"
    assert last.to_dict()["Normalized Invariant"] == "1 + q + q^2"
    failed = StabilityRecord(n=1, jones=jones, difference_mdeg=1, passed=False)
    assert failed.to_dict()["mdeg(J[n+1] - J[n])"] == "1"
    assert failed.to_json()["passed"] is False
