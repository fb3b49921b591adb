"""Zero-stability checks of the normalized colored invariants and the tail prefix."""

import json
from pathlib import Path

from a2_spider.config import Settings, StabilityRecord, StabilityReport
from a2_spider.errors import A2Error, StabilityError
from a2_spider.links import LinkSpec, Pipeline, jones_normalized
from a2_spider.qalg import NormalizedScalar, mdeg
from a2_spider.skein import parallel_map

DEFAULT_MAX_COLOR = 3


def _record(
    n: int, current: NormalizedScalar, following: NormalizedScalar | None
) -> StabilityRecord:
    """Compare the invariant at color n with the one at n + 1."""
    if following is None:
        return StabilityRecord(n=n, jones=current)
    difference = following.unit - current.unit
    if difference.is_zero():
        return StabilityRecord(n=n, jones=current, difference_mdeg=None, passed=True)
    degree = mdeg(difference)
    return StabilityRecord(
        n=n, jones=current, difference_mdeg=int(degree), passed=degree >= n + 1
    )


def stability_check(
    link: LinkSpec, max_color: int = DEFAULT_MAX_COLOR, pipeline: Pipeline = "pd"
) -> StabilityReport:
    """Compute the invariants for colors 1..max_color and compare consecutive ones.

    A failed comparison is recorded, not raised. The prefix holds the coefficients fixed by
    every comparison up to the first failure.
    """
    if max_color < 2:
        raise A2Error(f"Stability needs at least two colors, got max color {max_color}.")
    colors = list(range(1, max_color + 1))
    invariants = parallel_map(lambda n: jones_normalized(link, n, pipeline=pipeline), colors)
    records = [
        _record(n, current, invariants[index + 1] if index + 1 < len(invariants) else None)
        for index, (n, current) in enumerate(zip(colors, invariants))
    ]
    certified = next((record.n for record in records if record.passed is False), max_color)
    prefix = invariants[certified - 1].unit.coefficients(certified) if certified >= 2 else []
    return StabilityReport(link_id=link.name, records=records, prefix=prefix)


def tail_prefix(link: LinkSpec, max_color: int = DEFAULT_MAX_COLOR) -> list[int]:
    """Return the first max_color coefficients of the tail, certified by stability checks."""
    report = stability_check(link, max_color)
    if not report.passed:
        failed = [record.n for record in report.records if record.passed is False]
        raise StabilityError(
            f"{link.name}: colors {failed} disagree with their successors; no tail prefix."
        )
    return report.prefix


def golden_path(link_id: str, command: str) -> Path:
    """Return the golden file of a command's output on a link."""
    return Settings.golden_dir() / f"{link_id}.{command}.json"


def write_golden(link_id: str, command: str, document: dict[str, object]) -> Path:
    """Freeze a command's JSON output as a golden file."""
    path = golden_path(link_id, command)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_golden(link_id: str, command: str) -> dict[str, object] | None:
    """Return a frozen golden output, or None when none was written."""
    path = golden_path(link_id, command)
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))
