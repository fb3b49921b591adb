"""Named formula and identity registries and the link library lookup."""

import inspect
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from a2_spider.config import Settings
from a2_spider.errors import ParseError, UnknownNameError


class FormulaRegistry:
    """Singleton class for closed-form formula registration and lookup."""

    _formulas: dict[str, Callable[..., Any]] = {}

    @classmethod
    def register(cls, function: Callable[..., Any]) -> Callable[..., Any]:
        """Register a formula under its function name."""
        cls._formulas.setdefault(function.__name__, function)
        return function

    @classmethod
    def ls(cls) -> list[str]:
        """Return registered formula names."""
        return sorted(cls._formulas)

    @classmethod
    def get(cls, name: str) -> Callable[..., Any]:
        """Return a registered formula."""
        try:
            return cls._formulas[name]
        except KeyError:
            raise UnknownNameError(
                f"Unknown formula {name!r}; choose one of {', '.join(cls.ls())}."
            ) from None

    @classmethod
    def parameters(cls, name: str) -> list[str]:
        """Return the positional parameter names of a formula."""
        return list(inspect.signature(cls.get(name)).parameters)


def _strand_sum(*params: int) -> int:
    """Return the default strand count of a parameter tuple."""
    return sum(params)


@dataclass(frozen=True, slots=True)
class IdentityDef:
    """Registered identity: a builder plus the parameter cases checked by default."""

    name: str
    build: Callable[..., Any]
    cases: tuple[tuple[int, ...], ...]
    form: str
    strands: Callable[..., int]


class IdentityRegistry:
    """Singleton class for identity registration and lookup."""

    _identities: dict[str, IdentityDef] = {}

    @classmethod
    def register(
        cls,
        name: str,
        cases: Iterable[tuple[int, ...]],
        form: str = "web",
        strands: Callable[..., int] | None = None,
    ) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
        """Return a decorator registering an identity builder."""

        def decorator(build: Callable[..., Any]) -> Callable[..., Any]:
            definition = IdentityDef(name, build, tuple(cases), form, strands or _strand_sum)
            cls._identities.setdefault(name, definition)
            return build

        return decorator

    @classmethod
    def ls(cls) -> list[str]:
        """Return registered identity names."""
        return sorted(cls._identities)

    @classmethod
    def get(cls, name: str) -> IdentityDef:
        """Return a registered identity."""
        try:
            return cls._identities[name]
        except KeyError:
            raise UnknownNameError(
                f"Unknown identity {name!r}; choose one of {', '.join(cls.ls())}."
            ) from None


class LinkLibrary:
    """Singleton class resolving link specs by name from user and bundled directories."""

    _suffixes = (".yaml", ".yml", ".json")

    @classmethod
    def bundled_dir(cls) -> Path:
        """Return the directory of links shipped with the package."""
        return Path(__file__).parent / "library"

    @classmethod
    def search_dirs(cls) -> list[Path]:
        """Return directories searched for link names, user directory first."""
        dirs = [cls.bundled_dir()]
        if user_dir := Settings.library_dir():
            dirs.insert(0, user_dir)
        return dirs

    @classmethod
    def ls(cls) -> list[str]:
        """Return every link name visible in the search directories."""
        names = {
            path.stem
            for directory in cls.search_dirs()
            if directory.is_dir()
            for path in directory.iterdir()
            if path.suffix in cls._suffixes
        }
        return sorted(names)

    @classmethod
    def path(cls, name: str) -> Path:
        """Return the file behind a link name or an explicit path."""
        candidate = Path(name).expanduser()
        if candidate.suffix in cls._suffixes and candidate.is_file():
            return candidate
        for directory in cls.search_dirs():
            for suffix in cls._suffixes:
                path = directory / f"{name}{suffix}"
                if path.is_file():
                    return path
        raise UnknownNameError(f"Unknown link {name!r}; known links: {', '.join(cls.ls())}.")

    @classmethod
    def load(cls, name: str) -> dict[str, Any]:
        """Read the YAML document of a link."""
        path = cls.path(name)
        try:
            document = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as error:
            raise ParseError(f"{path}: {error}") from error
        if not isinstance(document, dict):
            raise ParseError(f"{path}: a link spec must be a mapping.")
        document.setdefault("name", path.stem)
        return document
