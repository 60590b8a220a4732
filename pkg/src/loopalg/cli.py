"""The ``loopalg`` command.

Exit codes: 0 success, 2 invalid algebra, 3 a checked identity failed,
64 usage errors, 66 unreadable input or unwritable output.
"""

import argparse
import logging
import pathlib
import sys
from typing import NoReturn

from loopalg import LoopAlgError
from loopalg.cobar import SignConventionError
from loopalg.config import (
    COMMANDS,
    ConfigFileError,
    RunConfig,
    UsageError,
    load_config,
    parse_field_flag,
)
from loopalg.dga.base import FDGA
from loopalg.dga.constructions import ConstructionError
from loopalg.dga.examples import UnknownExample, builtin_example, get_examples
from loopalg.dga.parse import AlgebraFileError, parse_algebra_file
from loopalg.hochschild.window import NotSupported, WindowExceeded
from loopalg.intersection import ChainMapError
from loopalg.linalg.sparse import NotAComplex
from loopalg.report import Report, build_report
from loopalg.utils import format as fmt
from loopalg.utils.serial import dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATION = 3
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    source = common.add_argument_group("algebra")
    source.add_argument("--algebra", type=pathlib.Path, help="JSON algebra description")
    source.add_argument("--builtin", help="builtin example, e.g. sphere:3")
    common.add_argument("--field", help="q, p or fp:p (default: the file's field, or q)")
    common.add_argument("--max-degree", type=int, help="top of the degree window (default 8)")
    common.add_argument(
        "--min-degree",
        type=int,
        help="bottom of the window (default: -d with coefficients A, 0 otherwise)",
    )
    common.add_argument("--format", choices=("table", "json"), help="output format")
    common.add_argument("--output", type=pathlib.Path, help="write the report here")
    common.add_argument("--degree-cap", type=int, help="largest max degree (default 16)")
    common.add_argument("--allow-large", action="store_true", help="ignore the degree cap")
    common.add_argument("--timings", action="store_true", help="report time per phase")
    common.add_argument("--config", type=pathlib.Path, help="YAML file with defaults")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = ArgumentParser(
        prog="loopalg",
        description="Loop homology, based loop homology and Hochschild cohomology"
        " of finite differential graded algebras.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "validate": "check the algebra axioms",
        "loop-homology": "the loop homology ring H(A⊗T(W), D)",
        "omega-homology": "homology of the based loop space via the cobar construction",
        "intersection": "the intersection morphism and its diagnostics",
        "hochschild": "Hochschild cohomology with coefficients k, A or its dual",
        "e2": "Hochschild cohomology of the cohomology algebra",
        "examples": "list builtin algebras",
    }
    for command in COMMANDS:
        sub = commands.add_parser(command, parents=[common], help=helps[command])
        if command == "hochschild":
            sub.add_argument(
                "--coefficients", choices=("self", "trivial", "dual"), default="self"
            )
        if command == "intersection":
            sub.add_argument(
                "--lift-check",
                action="store_true",
                help="compare lifting witnesses with the image of I for every class",
            )
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Flags, then the YAML file, then built-in defaults.

    Raises
    ------
    UsageError
        On bad flags or values.
    ConfigFileError
        If the YAML file cannot be read.
    """
    args = _parser().parse_args(argv)
    defaults = load_config(args.config)
    field_value = args.field if args.field is not None else defaults.get("field")
    config = RunConfig(
        command=args.command,
        algebra=args.algebra,
        builtin=args.builtin,
        field=parse_field_flag(field_value) if field_value is not None else None,
        max_degree=_pick(args.max_degree, defaults.get("max_degree"), 8),
        min_degree=args.min_degree,
        coefficients=getattr(args, "coefficients", "self"),
        format=_pick(args.format, defaults.get("format"), "table"),
        output=args.output,
        degree_cap=_pick(args.degree_cap, defaults.get("degree_cap"), 16),
        allow_large=args.allow_large,
        timings=args.timings,
        lift_check=getattr(args, "lift_check", False),
        verbose=args.verbose,
    )
    config.check()
    return config


def _pick(*values):  # type: ignore[no-untyped-def]
    return next(v for v in values if v is not None)


def configure_logging(verbose: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def load_algebra(config: RunConfig) -> FDGA:
    """The algebra named by `config`.

    Raises
    ------
    AlgebraFileError
        If the file does not parse.
    OSError
        If the file cannot be read.
    UnknownExample
        If the builtin name is unknown.
    """
    if config.algebra is not None:
        return parse_algebra_file(config.algebra.read_bytes(), config.field)
    assert config.builtin is not None
    return builtin_example(config.builtin, config.field)


def examples_text(json_format: bool) -> str:
    entries = [
        {"names": list(e.names), "usage": e.usage, "description": e.description}
        for e in get_examples()
    ]
    if json_format:
        return dumps({"schema": 1, "examples": entries})
    rows = [(e["usage"], ", ".join(e["names"]), e["description"]) for e in entries]
    return fmt.table(rows, ["usage", "names", "description"]) + "\n"


def _write(text: str, output: pathlib.Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def run_command(argv: list[str]) -> tuple[int, Report | None]:
    """Run one command line and write its report.

    Parameters
    ----------
    argv
        The arguments after the program name.

    Returns
    -------
    tuple[int, Report | None]
        The exit code and the report, when one was produced.
    """
    try:
        config = parse_config(argv)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE, None
    except ConfigFileError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_NOINPUT, None
    configure_logging(config.verbose)

    try:
        if config.command == "examples":
            _write(examples_text(config.format == "json"), config.output)
            return EXIT_OK, None
        algebra = load_algebra(config)
    except (AlgebraFileError, OSError) as e:
        sys.stderr.write(f"cannot load algebra: {e}\n")
        return EXIT_NOINPUT, None
    except UnknownExample as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE, None
    except ConstructionError as e:
        logger.error(f"cannot build {config.builtin}: {e}")
        sys.stderr.write(f"{e}\n")
        return EXIT_INVALID, None

    try:
        report = build_report(config, algebra)
    except (SignConventionError, NotAComplex, ChainMapError) as e:
        logger.error(f"identity check failed for {algebra}: {e}")
        sys.stderr.write(f"{e}\n")
        return EXIT_VIOLATION, None
    except NotSupported as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_INVALID, None
    except WindowExceeded as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE, None
    except LoopAlgError as e:
        logger.exception(f"{config.command} failed")
        sys.stderr.write(f"{e}\n")
        return EXIT_INVALID, None

    text = dumps(report.as_dict()) if config.format == "json" else report.to_table()
    try:
        _write(text, config.output)
    except OSError as e:
        sys.stderr.write(f"cannot write report: {e}\n")
        return EXIT_NOINPUT, report
    return report.exit_code, report


def main(argv: list[str] | None = None) -> None:
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    sys.exit(code)


if __name__ == "__main__":
    main()
