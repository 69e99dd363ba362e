"""
Command-line entry point.

    python -m cli run FILE --strategy S [--out PATH]
    python -m cli rewrite FILE [--emit-ast] [--out PATH]
    python -m cli bench SCENARIO [--strategy S|all] [--seed N] [--out PATH]
    python -m cli count-nodes FILE...

Exit codes: 0 success, 1 program or runtime error, 2 usage error.
"""
import argparse
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, List, Optional, TextIO

from pydantic import BaseModel, Field

from aexpr.engine import Engine
from aexpr.rewriter import rewrite as rewrite_program
from bench.harness import BenchConfig, summarize, write_csv
from bench.scenarios import SCENARIOS, run_scenario
from config.settings import settings
from config.structured_logging import LogContext, configure_structured_logging, get_logger
from rxl.exceptions import RxlError, UsageError
from rxl.nodes import count_ast_nodes, dump_ast
from rxl.parser import parse
from rxl.printer import print_program

logger = get_logger(__name__)

STRATEGY_CHOICES = ["convention", "interpretation", "compilation"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


class Command(str, Enum):
    RUN = "run"
    REWRITE = "rewrite"
    BENCH = "bench"
    COUNT_NODES = "count-nodes"


class CliConfig(BaseModel):
    """Validated command-line invocation."""
    command: Command
    strategy: Optional[str] = Field(None, description="Strategy for run and bench")
    inputs: List[Path] = Field(default_factory=list, description="Program files")
    output: Optional[Path] = Field(None, description="Output file; standard output when omitted")
    seed: Optional[int] = Field(None, description="Benchmark seed")
    scenario: Optional[str] = None
    emit_ast: bool = False
    iterations: Optional[int] = None
    measured: Optional[int] = None
    size: Optional[int] = None
    count: Optional[int] = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli", description="Active expressions over RXL")
    parser.add_argument("--log-level", default=settings.log_level, help="Log level for standard error")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Execute a program")
    run.add_argument("file", type=Path)
    run.add_argument("--strategy", choices=STRATEGY_CHOICES, default=settings.default_strategy)
    run.add_argument("--out", type=Path)

    rewrite = commands.add_parser("rewrite", help="Print the instrumented program")
    rewrite.add_argument("file", type=Path)
    rewrite.add_argument("--emit-ast", action="store_true", help="Also print the AST dump")
    rewrite.add_argument("--out", type=Path)

    bench = commands.add_parser("bench", help="Run a benchmark scenario and print CSV")
    bench.add_argument("scenario", choices=sorted(SCENARIOS))
    bench.add_argument("--strategy", choices=STRATEGY_CHOICES + ["baseline", "all"], default="all")
    bench.add_argument("--seed", type=int)
    bench.add_argument("--out", type=Path)
    bench.add_argument("--iterations", type=int, help="Timed iterations per configuration")
    bench.add_argument("--measured", type=int, help="Final iterations used for the statistics")
    bench.add_argument("--size", type=int, help="Array size of the sorting scenarios")
    bench.add_argument("--count", type=int, help="Aexprs or assignments per trial")

    count = commands.add_parser("count-nodes", help="Print the AST node count of each file")
    count.add_argument("files", type=Path, nargs="+")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    configure_structured_logging(args.log_level, settings.log_json, settings.log_file)
    command = Command(args.command)
    return CliConfig(
        command=command,
        strategy=getattr(args, "strategy", None),
        inputs=getattr(args, "files", None) or ([args.file] if hasattr(args, "file") else []),
        output=getattr(args, "out", None),
        seed=getattr(args, "seed", None),
        scenario=getattr(args, "scenario", None),
        emit_ast=getattr(args, "emit_ast", False),
        iterations=getattr(args, "iterations", None),
        measured=getattr(args, "measured", None),
        size=getattr(args, "size", None),
        count=getattr(args, "count", None),
    )


@contextmanager
def _output(path: Optional[Path]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with path.open("w", encoding="utf-8", newline="") as stream:
        yield stream


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def cmd_run(config: CliConfig) -> int:
    source = _read(config.inputs[0])
    with _output(config.output) as stream:
        engine = Engine(config.strategy, sink=lambda line: stream.write(line + "\n"))
        with LogContext(file=str(config.inputs[0])):
            engine.run(source)
    return EXIT_OK


def cmd_rewrite(config: CliConfig) -> int:
    program = rewrite_program(parse(_read(config.inputs[0])))
    with _output(config.output) as stream:
        stream.write(print_program(program))
        if config.emit_ast:
            stream.write("\n")
            stream.write(dump_ast(program))
            stream.write("\n")
    return EXIT_OK


def cmd_bench(config: CliConfig) -> int:
    if config.strategy == "baseline" and config.scenario != "update":
        raise UsageError(f"the baseline only exists for the update scenario, not {config.scenario}")
    bench_config = BenchConfig.from_settings(
        settings,
        seed=config.seed,
        iterations=config.iterations,
        measured_iterations=config.measured,
        sort_size=config.size,
        scaling_size=config.size,
        construction_count=config.count,
        update_count=config.count,
    )
    results = run_scenario(config.scenario, config.strategy or "all", bench_config)
    with _output(config.output) as stream:
        write_csv(results, stream)
    for name, ratio in summarize(results).items():
        logger.info(f"slowdown {name}: {ratio:.2f}", ratio=ratio)
    return EXIT_OK


def cmd_count_nodes(config: CliConfig) -> int:
    with _output(config.output) as stream:
        for path in config.inputs:
            stream.write(f"{count_ast_nodes(parse(_read(path)))}\n")
    return EXIT_OK


COMMANDS = {
    Command.RUN: cmd_run,
    Command.REWRITE: cmd_rewrite,
    Command.BENCH: cmd_bench,
    Command.COUNT_NODES: cmd_count_nodes,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as stop:
        return EXIT_USAGE if stop.code else EXIT_OK

    try:
        return COMMANDS[config.command](config)
    except RxlError as error:
        logger.error(f"{config.command.value} failed: {error.message}", exit_code=error.exit_code)
        print(error.message, file=sys.stderr)
        return error.exit_code
    except OSError as error:
        logger.error(f"{config.command.value} failed: {error}")
        print(str(error), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
