"""Shared input validators for command-line arguments."""

import argparse
from collections.abc import Callable
from typing import TypeVar

from a2_spider.registry import FormulaRegistry, IdentityRegistry

ArgumentValidator = Callable[[str], bool | str]
ValueT = TypeVar("ValueT")
_SPELLING = str.maketrans("-+", "ud")
_SIGNS = str.maketrans("ud", "-+")


def validate_color(raw: str) -> bool | str:
    """Validate a positive integer color."""
    if not (text := raw.strip()):
        return "Color is required."
    if not text.isdigit() or int(text) < 1:
        return "Color must be a positive integer."
    return True


def validate_max_color(raw: str) -> bool | str:
    """Validate a maximum color of at least two."""
    if (message := validate_color(raw)) is not True:
        return message
    if int(raw) < 2:
        return "Maximum color must be at least 2."
    return True


def validate_sign_word(raw: str) -> bool | str:
    """Validate a word of + and - signs, or its spelling with u (up, -) and d (down, +)."""
    if any(sign not in "+-ud" for sign in raw.strip()):
        return "Sign words may only contain '+' and '-', or 'u' and 'd'."
    return True


def validate_formula_name(raw: str) -> bool | str:
    """Validate a registered formula name."""
    if raw not in FormulaRegistry.ls():
        return f"Unknown formula; choose one of {', '.join(FormulaRegistry.ls())}."
    return True


def validate_identity_name(raw: str) -> bool | str:
    """Validate a registered identity name."""
    if raw not in IdentityRegistry.ls():
        return f"Unknown identity; choose one of {', '.join(IdentityRegistry.ls())}."
    return True


def validate_formula_argument(raw: str) -> bool | str:
    """Validate a formula argument: an integer or a twist kind."""
    text = raw.strip()
    if text in ("A", "B") or text.lstrip("-").isdigit():
        return True
    return "Formula arguments are integers or a twist kind A/B."


def argument_type(
    validate: ArgumentValidator, convert: Callable[[str], ValueT]
) -> Callable[[str], ValueT]:
    """Wrap a validator as an argparse type converter."""

    def _convert(raw: str) -> ValueT:
        if (message := validate(raw)) is not True:
            raise argparse.ArgumentTypeError(str(message))
        return convert(raw.strip())

    return _convert


def formula_argument(raw: str) -> int | str:
    """Convert a formula argument to an int unless it is a twist kind."""
    return raw if raw in ("A", "B") else int(raw)


def spell_sign_word(word: str) -> str:
    """Spell a sign word with u for - and d for +."""
    return word.translate(_SPELLING)


def sign_word(raw: str) -> str:
    """Convert a spelled or literal sign word to + and - signs."""
    return str(raw).translate(_SIGNS)
