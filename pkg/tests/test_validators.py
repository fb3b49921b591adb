"""Tests for command-line argument validators."""

import argparse

import pytest

import a2_spider.formulas  # noqa: F401  # pylint: disable=unused-import
import a2_spider.verify  # noqa: F401  # pylint: disable=unused-import
from a2_spider import validators


@pytest.mark.parametrize(
    ("raw", "expected"),
    [
        ("3", True),
        (" 1 ", True),
        ("", "Color is required."),
        ("0", "Color must be a positive integer."),
        ("-2", "Color must be a positive integer."),
        ("two", "Color must be a positive integer."),
    ],
)
def test_validate_color(raw: str, expected: bool | str) -> None:
    """Colors are positive integers."""
    assert validators.validate_color(raw) == expected


def test_validate_max_color() -> None:
    """Stability checks need at least two colors."""
    assert validators.validate_max_color("2") is True
    assert validators.validate_max_color("1") == "Maximum color must be at least 2."
    assert validators.validate_max_color("x") == "Color must be a positive integer."


def test_validate_sign_word() -> None:
    """Sign words use + and -, or u and d; the empty word is allowed."""
    assert validators.validate_sign_word("-+-") is True
    assert validators.validate_sign_word("udu") is True
    assert validators.validate_sign_word("") is True
    assert validators.validate_sign_word("-a") == (
        "Sign words may only contain '+' and '-', or 'u' and 'd'."
    )


def test_sign_word_spelling() -> None:
    """Spelled words convert back to signs and literal words pass through."""
    assert validators.spell_sign_word("--+") == "uud"
    assert validators.sign_word("uud") == "--+"
    assert validators.sign_word("-+") == "-+"


def test_registered_names() -> None:
    """Formula and identity names must be registered."""
    assert validators.validate_formula_name("theta_A") is True
    assert str(validators.validate_formula_name("theta")).startswith("Unknown formula")
    assert validators.validate_identity_name("capkill") is True
    assert str(validators.validate_identity_name("cap")).startswith("Unknown identity")


def test_formula_arguments() -> None:
    """Formula arguments are integers or a twist kind."""
    assert validators.validate_formula_argument("-2") is True
    assert validators.validate_formula_argument("B") is True
    assert validators.validate_formula_argument("C") is not True
    assert validators.formula_argument("A") == "A"
    assert validators.formula_argument("-2") == -2


def test_argument_type_wraps_validator() -> None:
    """The argparse converter strips input and reports validator messages."""
    convert = validators.argument_type(validators.validate_color, int)
    assert convert(" 4 ") == 4
    with pytest.raises(argparse.ArgumentTypeError, match="positive integer"):
        convert("0")
