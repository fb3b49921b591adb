"""Terminal output helpers: progress animation, tables, scalars and framed errors."""

import contextlib
import functools
import json
import os
import sys
import termios
import threading
import time
import traceback
from collections.abc import Callable, Generator, Mapping
from io import UnsupportedOperation
from typing import Any, ParamSpec, TypeVar

import pandas as pd
from tabulate import tabulate

from a2_spider.config import RewriteTrace, StabilityReport
from a2_spider.qalg import NormalizedScalar, Scalar

ParamsT = ParamSpec("ParamsT")
ResultT = TypeVar("ResultT")


@contextlib.contextmanager
def _disable_tty_input_echo() -> Generator[None, None, None]:
    """Disable terminal input echo so typed keys do not break the progress line."""
    try:
        fd = sys.stdin.fileno()
    except (AttributeError, OSError, UnsupportedOperation):
        yield
        return
    if not os.isatty(fd):
        yield
        return
    old = termios.tcgetattr(fd)
    new = termios.tcgetattr(fd)
    new[3] &= ~(termios.ECHO | termios.ICANON)
    termios.tcsetattr(fd, termios.TCSANOW, new)
    try:
        yield
    finally:
        termios.tcsetattr(fd, termios.TCSANOW, old)
        termios.tcflush(fd, termios.TCIFLUSH)


def _stderr_is_tty() -> bool:
    """Return whether stderr is attached to a terminal."""
    try:
        return os.isatty(sys.stderr.fileno())
    except (AttributeError, OSError, UnsupportedOperation):
        return False


def with_progress_animation(
    label: str,
) -> Callable[[Callable[ParamsT, ResultT]], Callable[ParamsT, ResultT]]:
    """Return a decorator showing a spinner on stderr while the call runs."""

    def decorator(method: Callable[ParamsT, ResultT]) -> Callable[ParamsT, ResultT]:
        @functools.wraps(method)
        def _wrapped(*args: ParamsT.args, **kwargs: ParamsT.kwargs) -> ResultT:
            if not _stderr_is_tty():
                return method(*args, **kwargs)
            stop_event = threading.Event()

            def _run_animation() -> None:
                """Render a spinner with elapsed seconds."""
                spinner = "|/-\\"
                started = time.monotonic()
                index = 0
                while not stop_event.is_set():
                    elapsed = time.monotonic() - started
                    sys.stderr.write(
                        f"\r{label}{'.' * (index % 3 + 1):<3} {spinner[index % 4]} {elapsed:6.1f}s"
                    )
                    sys.stderr.flush()
                    index += 1
                    time.sleep(0.12)
                sys.stderr.write("\r\x1b[2K")
                sys.stderr.flush()

            loader_thread = threading.Thread(target=_run_animation, daemon=True)
            with _disable_tty_input_echo():
                loader_thread.start()
                try:
                    return method(*args, **kwargs)
                finally:
                    stop_event.set()
                    loader_thread.join()

        return _wrapped

    return decorator


def format_normalized(value: NormalizedScalar) -> str:
    """Return a normalized scalar as sign, monomial shift and unit."""
    sign = "-" if value.sign < 0 else ""
    shift = Scalar.monomial(value.shift)
    return f"{sign}{shift} * ({value.unit})"


def print_json(document: Mapping[str, Any] | list[Any]) -> None:
    """Print a JSON document."""
    print(json.dumps(document, indent=2, sort_keys=True), flush=True)


def print_trace(trace: RewriteTrace) -> None:
    """Print rendered rewrite lines in level order."""
    print("\n".join(trace), flush=True)


def print_rows(rows: list[Mapping[str, object]]) -> None:
    """Print dictionaries sharing the same keys as one table."""
    table = tabulate(
        [list(row.values()) for row in rows],
        headers=list(rows[0]) if rows else [],
        tablefmt="simple_outline",
        disable_numparse=True,
    )
    print(table, flush=True)


def print_dataframe(df: pd.DataFrame) -> None:
    """Print a dataframe with its index."""
    table = tabulate(
        df,
        headers="keys",
        tablefmt="simple_outline",
        showindex=True,
        disable_numparse=True,
    )
    print(table, flush=True)


def print_stability_report(report: StabilityReport) -> None:
    """Print the per-color table and the certified prefix."""
    print_dataframe(report.to_dataframe())
    prefix = ", ".join(map(str, report.prefix)) if report.prefix else "none"
    status = "\x1b[32mstable\x1b[0m" if report.passed else "\x1b[31mnot stable\x1b[0m"
    print(f"{report.link_id}: {status}; tail prefix: [{prefix}]", flush=True)


def print_error(error: BaseException) -> None:
    """Render and print a framed red traceback on stderr."""
    traceback_text = "".join(
        traceback.format_exception(type(error), error, error.__traceback__)
    ).rstrip("\n")
    error_lines = traceback_text.splitlines()
    width = max(len(line) for line in error_lines)
    framed_error = "\n".join(
        [
            f"┌{'─' * (width + 2)}┐",
            *[f"│ {line.ljust(width)} │" for line in error_lines],
            f"└{'─' * (width + 2)}┘",
        ]
    )
    print(f"\x1b[31m{framed_error}\x1b[0m", file=sys.stderr, flush=True)
