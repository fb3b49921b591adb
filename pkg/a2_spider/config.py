"""Shared data models, rewrite trace sink and runtime settings."""

import os
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypedDict

import pandas as pd

from a2_spider.qalg import NormalizedScalar, Scalar

RULE_COLORS = {
    "crossing+": "\x1b[35m",
    "crossing-": "\x1b[35m",
    "kink+": "\x1b[31m",
    "kink-": "\x1b[31m",
    "twist+": "\x1b[91m",
    "twist-": "\x1b[91m",
    "circle": "\x1b[36m",
    "bigon": "\x1b[33m",
    "square": "\x1b[32m",
    "split": "\x1b[34m",
}


class TraceStep(TypedDict):
    """Structured record of one applied rewrite."""

    level: int
    rule: str
    location: str
    terms: int
    term: int
    choice: int


class RewriteTrace(list[str]):
    """Log sink that keeps rendered rewrite lines ordered by reduction level."""

    def __init__(self) -> None:
        super().__init__()
        self._levels: list[int] = []
        self.steps: list[TraceStep] = []
        self.final_terms = 0

    def add(self, step: TraceStep) -> None:
        """Insert one rewrite record at its level position."""
        insert_at = bisect_right(self._levels, step["level"])
        self._levels.insert(insert_at, step["level"])
        self.steps.insert(insert_at, step)
        color = RULE_COLORS.get(step["rule"], "\x1b[37m")
        super().insert(
            insert_at,
            f"[\x1b[95mlevel {step['level']}\x1b[0m] "
            f"[{color}{step['rule']}\x1b[0m] "
            f"{step['location']} -> {step['terms']} term(s)",
        )

    def clear(self) -> None:
        """Clear rendered lines, structured steps and the level index."""
        self._levels.clear()
        self.steps.clear()
        self.final_terms = 0
        super().clear()

    def to_json(self) -> dict[str, object]:
        """Return the structured steps and the final term count."""
        return {"steps": [dict(step) for step in self.steps], "final_terms": self.final_terms}


class Settings:
    """Singleton class resolving runtime settings from environment variables."""

    _cache_size_env_var_name = "A2_SPIDER_CACHE_SIZE"
    _threads_env_var_name = "A2_SPIDER_THREADS"
    _library_dir_env_var_name = "A2_SPIDER_LIBRARY_DIR"
    _golden_dir_env_var_name = "A2_SPIDER_GOLDEN_DIR"
    threads_override: int | None = None

    @classmethod
    def cache_size(cls) -> int:
        """Return the maximum number of memoized closed-web evaluations."""
        return cls._positive_int(cls._cache_size_env_var_name, 200_000)

    @classmethod
    def threads(cls) -> int:
        """Return the worker-thread count, preferring an explicit override."""
        if cls.threads_override is not None:
            return cls.threads_override
        return cls._positive_int(cls._threads_env_var_name, 1)

    @classmethod
    def library_dir(cls) -> Path | None:
        """Return the user link-library directory searched before bundled links."""
        if path := os.environ.get(cls._library_dir_env_var_name):
            return Path(path).expanduser()
        return None

    @classmethod
    def golden_dir(cls) -> Path:
        """Return the directory holding frozen golden outputs."""
        if path := os.environ.get(cls._golden_dir_env_var_name):
            return Path(path).expanduser()
        return Path("tests") / "golden"

    @staticmethod
    def _positive_int(env_var_name: str, default: int) -> int:
        """Read a positive integer environment variable."""
        raw = os.environ.get(env_var_name, "").strip()
        if not raw:
            return default
        if not raw.isdigit() or int(raw) < 1:
            raise ValueError(f"{env_var_name} must be a positive integer, got {raw!r}.")
        return int(raw)


@dataclass(frozen=True, slots=True)
class StabilityRecord:
    """Normalized invariant of one color and its agreement with the next color."""

    n: int
    jones: NormalizedScalar
    difference_mdeg: int | None = None
    passed: bool | None = None

    def to_dict(self) -> dict[str, object]:
        """Return report-row labels and display values."""
        if self.passed is None:
            status = "-"
        else:
            status = "pass" if self.passed else "FAIL"
        return {
            "Color": self.n,
            "Normalized Invariant": str(self.jones.unit),
            "mdeg(J[n+1] - J[n])": (
                "-" if self.passed is None
                else "equal" if self.difference_mdeg is None
                else str(self.difference_mdeg)
            ),
            "Required": "-" if self.passed is None else str(self.n + 1),
            "Status": status,
        }

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {
            "n": self.n,
            "jones": self.jones.to_json(),
            "difference_mdeg": self.difference_mdeg,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class StabilityReport:
    """Per-color stability records of one link and the certified tail prefix."""

    link_id: str
    records: list[StabilityRecord] = field(default_factory=list)
    prefix: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Return whether every checked color agrees with its successor."""
        return all(record.passed is not False for record in self.records)

    @property
    def max_color(self) -> int:
        """Return the largest color covered by the report."""
        return max((record.n for record in self.records), default=0)

    def jones(self, n: int) -> Scalar:
        """Return the normalized invariant unit at color n."""
        for record in self.records:
            if record.n == n:
                return record.jones.unit
        raise KeyError(n)

    def to_dataframe(self) -> pd.DataFrame:
        """Convert records to a table indexed by color."""
        return pd.DataFrame([record.to_dict() for record in self.records]).set_index("Color")

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {
            "link": self.link_id,
            "passed": self.passed,
            "records": [record.to_json() for record in self.records],
            "prefix": self.prefix,
        }
