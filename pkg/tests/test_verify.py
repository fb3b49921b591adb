"""Tests for identity checking by random closures and closed formulas."""

# pylint: disable=protected-access

import random

import pytest

from a2_spider import verify
from a2_spider.clasp import clasp_box
from a2_spider.errors import A2Error, UnknownNameError
from a2_spider.qalg import RationalScalar
from a2_spider.registry import IdentityDef, IdentityRegistry
from a2_spider.web import WebSum, cap_web, compose, cup_web, h_web, identity


def _register(monkeypatch: pytest.MonkeyPatch, name: str, build: object, form: str = "web") -> None:
    """Register a throwaway identity for one test."""
    definition = IdentityDef(name, build, ((),), form, lambda *params: 0)  # type: ignore[arg-type]
    monkeypatch.setitem(IdentityRegistry._identities, name, definition)


def test_random_closer_joins_top_to_bottom() -> None:
    """A closing web runs from the top word back to the bottom word."""
    for seed in range(5):
        closer = verify.random_closer("--+", "-", random.Random(seed))
        assert (closer.bottom_word, closer.top_word) == ("-", "--+")
    with pytest.raises(A2Error):
        verify.random_closer("-", "+", random.Random(0))


def test_building_blocks() -> None:
    """Diamonds and bundle crossings keep their words."""
    web = verify.diamond(2, 1, 1)
    assert (web.bottom_word, web.top_word) == ("---", "---")
    crossing = verify.bundle_crossing("--", "-", "\\")
    assert (crossing.bottom_word, crossing.top_word) == ("---", "---")
    assert len(crossing.crossings) == 2


def test_registered_identities() -> None:
    """Every identity family is registered by name."""
    names = IdentityRegistry.ls()
    for name in ("singleexp", "capkill", "unclasp", "partialtrace", "bubbleskein", "thetaA"):
        assert name in names
    with pytest.raises(UnknownNameError):
        IdentityRegistry.get("nothing")


def test_random_closer_keeps_clasps_alive() -> None:
    """Closing webs without caps or forks on the clasp ports leave a nonzero value."""
    clasp = WebSum.of(clasp_box("--+"))
    for seed in range(5):
        closer = verify.random_closer("--+", "--+", random.Random(seed))
        assert not closer.boxes
        assert not verify._closed_value(clasp, closer).is_zero()


def test_web_identity_passes() -> None:
    """A clasp composed with itself matches the clasp under every closure."""
    (result,) = verify.verify_identity("idempotence", (1, 1), seeds=2)
    assert result.passed
    assert result.seeds == 2
    assert result.to_dict()["Status"] == "pass"
    assert result.to_json()["difference"] is None


def test_vanishing_identity_reduces_directly() -> None:
    """A cap on a clasp reduces to the zero sum without any closure."""
    (result,) = verify.verify_identity("capkill", (1, 1))
    assert result.passed
    assert result.seeds == 0


def test_vanishing_identity_with_a_survivor(monkeypatch: pytest.MonkeyPatch) -> None:
    """A nonzero web claimed to vanish is reported with its remaining terms."""
    sides = (WebSum.of(identity("--")), WebSum("--", "--"))
    _register(monkeypatch, "survivor", lambda: sides)
    (result,) = verify.verify_identity("survivor")
    assert not result.passed
    assert result.note == "1 basis web(s) remain"
    assert result.to_dict()["Difference"] == "1 basis web(s) remain"


def test_clasp_multiple_is_told_apart(monkeypatch: pytest.MonkeyPatch) -> None:
    """A clasp squared is not seven times the clasp."""
    clasp = clasp_box("--")
    sides = (WebSum.of(compose(clasp, clasp)), WebSum.of(clasp, 7))
    _register(monkeypatch, "sevenfold", lambda: sides)
    (result,) = verify.verify_identity("sevenfold", seeds=3)
    assert not result.passed
    assert result.seeds == 1
    assert result.difference is not None


def test_closures_that_all_vanish_are_rejected(monkeypatch: pytest.MonkeyPatch) -> None:
    """Two sides killed by their own clasp prove nothing and fail."""
    web = compose(compose(clasp_box("-+"), cap_web("-+", 0)), cup_web("", 0, "-+"))
    sides = (WebSum.of(web), WebSum.of(web, 7))
    _register(monkeypatch, "vacuous", lambda: sides)
    (result,) = verify.verify_identity("vacuous", seeds=2)
    assert not result.passed
    assert result.difference is None
    assert result.to_json()["note"] == "every closure vanished"


def test_cases_respect_strand_bound() -> None:
    """Registered cases wider than the bound are skipped."""
    results = verify.verify_identity("deltaclosure", max_strands=2)
    assert [result.params for result in results] == [(1, 0), (2, 0), (1, 1)]
    assert all(result.passed for result in results)


def test_verify_all_selected() -> None:
    """Selected identities run at every case in bounds."""
    results = verify.verify_all(["forkkill", "idempotence"], seeds=1, max_strands=2)
    assert {result.name for result in results} == {"forkkill", "idempotence"}
    assert all(result.passed for result in results)


def test_failing_web_identity(monkeypatch: pytest.MonkeyPatch) -> None:
    """Two different webs are told apart by the first closure."""
    sides = (WebSum.of(identity("--")), WebSum.of(h_web("--", 0)))
    _register(monkeypatch, "broken", lambda: sides)
    (result,) = verify.verify_identity("broken", seeds=3)
    assert not result.passed
    assert result.seeds == 1
    assert result.difference is not None
    assert result.to_dict()["Status"] == "FAIL"


def test_failing_closure_identity(monkeypatch: pytest.MonkeyPatch) -> None:
    """Closed values are compared exactly."""
    _register(monkeypatch, "brokenclosure", lambda: (RationalScalar(1), RationalScalar(2)),
              form="closure")
    (result,) = verify.verify_identity("brokenclosure")
    assert not result.passed
    assert result.difference == -1


def test_boundary_mismatch(monkeypatch: pytest.MonkeyPatch) -> None:
    """Both sides of a web identity need the same boundary."""
    sides = (WebSum.of(identity("-")), WebSum.of(identity("+")))
    _register(monkeypatch, "mismatch", lambda: sides)
    with pytest.raises(A2Error, match="different boundaries"):
        verify.verify_identity("mismatch")


@pytest.mark.slow
def test_every_registered_identity() -> None:
    """Every registered case holds under direct evaluation."""
    failures = [result for result in verify.verify_all() if not result.passed]
    assert not failures, [result.to_dict() for result in failures]
