"""Command-line front end for the A2 spider engine."""

import argparse
import random
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd
import yaml

from a2_spider import formulas  # noqa: F401  # pylint: disable=unused-import
from a2_spider import ui, validators
from a2_spider import verify as verify_module
from a2_spider.clasp import ClaspSpec, clasp_general, evaluate_clasped
from a2_spider.config import RewriteTrace, Settings
from a2_spider.errors import A2Error, ParseError
from a2_spider.links import LinkSpec, adequacy_check, jones_normalized
from a2_spider.parsers import parse_pd, parse_webjson, web_to_json
from a2_spider.qalg import RationalScalar, Scalar
from a2_spider.registry import FormulaRegistry, LinkLibrary
from a2_spider.skein import evaluate_closed, reduce
from a2_spider.tail import DEFAULT_MAX_COLOR, stability_check, write_golden
from a2_spider.web import Web, WebSum

_color = validators.argument_type(validators.validate_color, int)
_max_color = validators.argument_type(validators.validate_max_color, int)
_word = validators.argument_type(validators.validate_sign_word, validators.sign_word)
_formula = validators.argument_type(validators.validate_formula_name, str)
_formula_argument = validators.argument_type(
    validators.validate_formula_argument, validators.formula_argument
)
_identity = validators.argument_type(validators.validate_identity_name, str)
_SIGN_WORD_OPTIONS = ("--word", "--target")


def load_web(path: Path) -> Web:
    """Read a web JSON/YAML document or a PD code file."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ParseError(f"Cannot read {path}: {error.strerror}.") from error
    document = yaml.safe_load(text)
    if isinstance(document, dict) and "pd" in document:
        code = document["pd"]
        return parse_pd("\n".join(code) if isinstance(code, list) else str(code))
    if isinstance(document, dict):
        return parse_webjson(document)
    return parse_pd(text)


def _sum_to_json(total: WebSum) -> dict[str, Any]:
    """Return a reduced sum as coefficient and basis-web pairs."""
    return {
        "bottom": total.bottom,
        "top": total.top,
        "terms": [
            {"coefficient": coefficient.to_json(), "web": web_to_json(web)}
            for coefficient, web in total.items()
        ],
    }


def _value_to_json(value: object) -> object:
    """Return a formula result as JSON."""
    if isinstance(value, (Scalar, RationalScalar)):
        return value.to_json()
    if isinstance(value, tuple):
        return [_value_to_json(item) for item in value]
    if isinstance(value, pd.DataFrame):
        return value.reset_index().astype(str).to_dict(orient="records")
    return str(value)


class App:
    """Dispatches parsed command-line arguments to engine commands."""

    def __init__(self, args: argparse.Namespace) -> None:
        """Keep parsed arguments for the selected command."""
        self.args = args

    def run(self) -> int:
        """Run the selected command and return its exit code."""
        return int(getattr(self, self.args.command)() or 0)

    def eval(self) -> int:
        """CLI command: evaluate a closed web or reduce an open one to basis webs."""
        web = load_web(self.args.file)
        trace = RewriteTrace() if self.args.trace else None
        if web.is_closed:
            if web.boxes:
                value = evaluate_clasped(WebSum.of(web)).to_scalar()
            else:
                value = ui.with_progress_animation("Evaluating")(evaluate_closed)(web, trace=trace)
            if self.args.json:
                document: dict[str, Any] = {"value": value.to_json()}
                if trace is not None:
                    document["trace"] = list(trace.steps)
                ui.print_json(document)
                return 0
            if trace is not None:
                ui.print_trace(trace)
            print(value, flush=True)
            return 0
        reduced = ui.with_progress_animation("Reducing")(reduce)(WebSum.of(web), trace=trace)
        if self.args.json:
            document = _sum_to_json(reduced)
            if trace is not None:
                document["trace"] = list(trace.steps)
            ui.print_json(document)
            return 0
        if trace is not None:
            ui.print_trace(trace)
        ui.print_rows(
            [
                {
                    "Coefficient": str(coefficient),
                    "Vertices": web.trivalent_count(),
                    "Boundary": f"{web.bottom_word or '.'} -> {web.top_word or '.'}",
                }
                for coefficient, web in reduced.items()
            ]
        )
        return 0

    def clasp(self) -> int:
        """CLI command: expand a clasp into a sum of reduced webs."""
        spec = ClaspSpec(self.args.word, self.args.target)
        total = ui.with_progress_animation("Expanding")(clasp_general)(spec)
        if self.args.json:
            ui.print_json(_sum_to_json(total))
            return 0
        print(f"clasp {spec.word} -> {spec.top}: {len(total)} basis web(s)", flush=True)
        ui.print_rows(
            [
                {"Coefficient": str(coefficient), "Vertices": web.trivalent_count()}
                for coefficient, web in total.items()
            ]
        )
        return 0

    def formula(self) -> int:
        """CLI command: evaluate a named closed-form formula."""
        if self.args.list or self.args.name is None:
            ui.print_rows(
                [
                    {"Formula": name, "Parameters": ", ".join(FormulaRegistry.parameters(name))}
                    for name in FormulaRegistry.ls()
                ]
            )
            return 0
        function = FormulaRegistry.get(self.args.name)
        parameters = FormulaRegistry.parameters(self.args.name)
        values = [*self.args.values, *(self.args.arg_values or [])]
        if len(values) != len(parameters):
            raise A2Error(
                f"{self.args.name} takes {len(parameters)} argument(s) "
                f"({', '.join(parameters)}), got {len(values)}."
            )
        value = function(*values)
        if self.args.json:
            ui.print_json({"formula": self.args.name, "value": _value_to_json(value)})
        elif isinstance(value, pd.DataFrame):
            ui.print_dataframe(value)
        elif isinstance(value, tuple):
            print("\n".join(str(item) for item in value), flush=True)
        else:
            print(value, flush=True)
        return 0

    def jones(self) -> int:
        """CLI command: compute the normalized colored invariant of a link."""
        link = LinkSpec.load(self.args.link)
        rng = random.Random(self.args.seed) if self.args.seed is not None else None
        result = ui.with_progress_animation("Computing")(jones_normalized)(
            link, self.args.color, rng=rng, pipeline=self.args.pipeline
        )
        document = {"link": link.name, "color": self.args.color, "jones": result.to_json()}
        if self.args.write_golden:
            write_golden(link.name, f"jones{self.args.color}", document)
        if self.args.json:
            ui.print_json(document)
        else:
            print(f"{link.name} (n={self.args.color}): {result.unit}", flush=True)
            print(f"bracket = {ui.format_normalized(result)}", flush=True)
        return 0

    def tail(self) -> int:
        """CLI command: check zero stability and print the certified tail prefix."""
        link = LinkSpec.load(self.args.link)
        report = ui.with_progress_animation("Checking stability")(stability_check)(
            link, self.args.max_color, pipeline=self.args.pipeline
        )
        if self.args.write_golden:
            write_golden(link.name, "tail", report.to_json())
        if self.args.json:
            ui.print_json(report.to_json())
        else:
            ui.print_stability_report(report)
        return 0 if report.passed else 1

    def adequacy(self) -> int:
        """CLI command: decide whether a holed graph is adequate."""
        link = LinkSpec.load(self.args.link)
        if link.graph is None:
            raise A2Error(f"{link.name}: adequacy needs a graph or decomposition spec.")
        result = adequacy_check(link.graph)
        if self.args.json:
            ui.print_json({"link": link.name, **result.to_json()})
        elif result.adequate:
            print(f"{link.name}: adequate", flush=True)
        else:
            assert result.witness is not None
            print(f"{link.name}: not adequate; {result.witness.describe()}", flush=True)
        return 0

    def verify(self) -> int:
        """CLI command: check registered identities against direct skein evaluation."""
        results = ui.with_progress_animation("Verifying")(verify_module.verify_all)(
            self.args.only, seeds=self.args.seeds, max_strands=self.args.max_strands
        )
        if self.args.json:
            ui.print_json([result.to_json() for result in results])
        else:
            ui.print_rows([result.to_dict() for result in results])
            failed = sum(not result.passed for result in results)
            print(f"{len(results) - failed}/{len(results)} instance(s) passed", flush=True)
        return 0 if all(result.passed for result in results) else 1

    def links(self) -> int:
        """CLI command: list link names visible in the library search path."""
        for name in LinkLibrary.ls():
            print(name, flush=True)
        return 0


def join_sign_words(argv: Sequence[str]) -> list[str]:
    """Attach sign words to --word and --target, spelled with u and d.

    Argparse reads words such as -- or --+ as options or as the end of options, so they
    never reach it literally. A bare sign word after the clasp command stands for --word.
    """
    tokens = list(argv)
    start = 0
    while start < len(tokens) and tokens[start].startswith("--threads"):
        start += 1 if "=" in tokens[start] else 2
    if start >= len(tokens) or tokens[start] != "clasp":
        return tokens
    joined = tokens[: start + 1]
    pending: str | None = None
    for token in tokens[start + 1 :]:
        if pending is not None:
            joined.append(f"{pending}={validators.spell_sign_word(token)}")
            pending = None
        elif token in _SIGN_WORD_OPTIONS:
            pending = token
        elif token.partition("=")[0] in _SIGN_WORD_OPTIONS:
            option, _, word = token.partition("=")
            joined.append(f"{option}={validators.spell_sign_word(word)}")
        elif token and set(token) <= {"+", "-"}:
            joined.append(f"--word={validators.spell_sign_word(token)}")
        else:
            joined.append(token)
    if pending is not None:
        joined.append(pending)
    return joined


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of every subcommand."""
    parser = argparse.ArgumentParser(
        prog="a2",
        description="Exact A2 spider evaluation, colored sl3 invariants and their tails.",
        epilog="File formats are documented in docs/formats.md.",
    )
    parser.add_argument(
        "--threads", type=_color, default=None, help="worker threads (overrides A2_SPIDER_THREADS)"
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    command = commands.add_parser("eval", help="evaluate or reduce a web file")
    command.add_argument("file", type=Path, help="web JSON/YAML document or PD code file")
    command.add_argument("--trace", action="store_true", help="print the applied rewrites")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("clasp", help="expand a clasp on a sign word")
    command.add_argument(
        "--word", required=True, type=_word, help="bottom sign word, e.g. --+ or uud"
    )
    command.add_argument("--target", type=_word, default=None, help="top sign word")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("formula", help="evaluate a closed-form formula")
    command.add_argument("name", nargs="?", type=_formula, help="formula name")
    command.add_argument("values", nargs="*", type=_formula_argument, help="formula arguments")
    command.add_argument(
        "--args",
        dest="arg_values",
        nargs="+",
        type=_formula_argument,
        default=None,
        metavar="VALUE",
    )
    command.add_argument("--list", action="store_true", help="list formulas and parameters")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("jones", help="normalized colored invariant of a link")
    command.add_argument("--link", required=True, help="library name or spec file")
    command.add_argument("--color", type=_color, required=True, help="color n >= 1")
    command.add_argument("--pipeline", choices=("pd", "twist"), default="pd")
    command.add_argument("--seed", type=int, default=None, help="seed for clasp placement")
    command.add_argument("--write-golden", action="store_true", help="freeze the output")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("tail", help="zero-stability check and tail prefix")
    command.add_argument("--link", required=True, help="library name or spec file")
    command.add_argument("--max-color", type=_max_color, default=DEFAULT_MAX_COLOR)
    command.add_argument("--pipeline", choices=("pd", "twist"), default="pd")
    command.add_argument("--write-golden", action="store_true", help="freeze the output")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("adequacy", help="adequacy check of a holed graph")
    command.add_argument("--link", required=True, help="library name or spec file")
    command.add_argument("--json", action="store_true", help="machine-readable output")

    command = commands.add_parser("verify", help="check registered identities")
    command.add_argument("--only", nargs="+", type=_identity, default=None, metavar="NAME")
    command.add_argument(
        "--max-strands", type=_color, default=verify_module.DEFAULT_MAX_STRANDS
    )
    command.add_argument("--seeds", type=_color, default=verify_module.DEFAULT_SEEDS)
    command.add_argument("--json", action="store_true", help="machine-readable output")

    commands.add_parser("links", help="list bundled and user link names")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entrypoint returning 0 on success, 1 on domain errors and 2 on usage errors."""
    try:
        args = build_parser().parse_args(join_sign_words(sys.argv[1:] if argv is None else argv))
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    previous, Settings.threads_override = Settings.threads_override, args.threads
    try:
        return App(args).run()
    except A2Error as error:
        ui.print_error(error)
        return 1
    except KeyboardInterrupt:
        print("Interrupted.", file=sys.stderr, flush=True)
        return 130
    finally:
        Settings.threads_override = previous


if __name__ == "__main__":
    sys.exit(main())
