import json
import logging
import sys
from pathlib import Path
from typing import Any, NoReturn

import agentyper as typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from mammo_augment.config import CliConfig
from mammo_augment.errors import EXIT_OK, MammoError, UsageError
from mammo_augment.models import Command, RunConfig
from mammo_augment.pipeline import RunResult, run

console = Console()
error_console = Console(stderr=True)


def _is_table_format() -> bool:
    if "--format" in sys.argv:
        idx = sys.argv.index("--format")
        if idx + 1 < len(sys.argv) and sys.argv[idx + 1] in ("json", "csv"):
            return False
    for arg in sys.argv:
        if arg.startswith("--format="):
            val = arg.split("=")[1]
            if val in ("json", "csv"):
                return False
    return True


def setup_logging(verbose: bool, level_name: str | None = None):
    """Sets up logging levels based on verbosity count in sys.argv, or MAMMO_LOG_LEVEL."""
    count = 0
    for arg in sys.argv:
        if arg == "-v" or arg == "--verbose":
            count += 1
        elif arg.startswith("-") and not arg.startswith("--") and set(arg[1:]) == {"v"}:
            count += len(arg) - 1

    if count >= 2:
        log_level = logging.DEBUG
    elif count == 1 or verbose:
        log_level = logging.INFO
    elif level_name:
        log_level = logging.getLevelName(level_name.upper())
        if not isinstance(log_level, int):
            log_level = logging.WARNING
    else:
        log_level = logging.WARNING

    logging.basicConfig(level=log_level, format="%(levelname)-8s: %(message)s", force=True)
    # PIL logs every chunk it parses at DEBUG
    logging.getLogger("PIL").setLevel(logging.INFO if log_level < logging.INFO else log_level)


def fail(exc: MammoError) -> NoReturn:
    """Report one typed error on stderr and exit with its code."""
    if _is_table_format():
        error_console.print(
            escape(f"error {exc.code} exit={exc.exit_code}: {exc}"),
            soft_wrap=True,
            highlight=False,
        )
    else:
        payload = {
            "error": True,
            "error_type": exc.code,
            "exit_code": exc.exit_code,
            "message": str(exc),
        }
        print(json.dumps(payload), file=sys.stderr)
    raise SystemExit(exc.exit_code)


def parse_list(value: str, flag: str, count: int) -> list[float]:
    """``"0.8,0,0.2"`` -> ``[0.8, 0.0, 0.2]``; the element count is fixed per flag."""
    parts = [p.strip() for p in value.split(",")]
    try:
        numbers = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"{flag} expects {count} comma-separated numbers, got {value!r}") from exc
    if len(numbers) != count:
        raise UsageError(f"{flag} expects {count} comma-separated numbers, got {value!r}")
    return numbers


def parse_size(value: str) -> tuple[int, int]:
    """``"1024x768"`` -> ``(1024, 768)``."""
    try:
        width, height = (int(p) for p in value.lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"--size expects WIDTHxHEIGHT, got {value!r}") from exc
    return width, height


def build_config(
    command: Command,
    manifest: Path,
    image_root: Path | None = None,
    out: Path | None = None,
    seed: int | None = None,
    workers: int | None = None,
    **fields: Any,
) -> RunConfig:
    """
    Resolve flags against the environment and defaults. The image root falls
    back to the manifest's directory, the output root to ``<manifest dir>/<command>``.
    """
    try:
        settings = CliConfig()
        return RunConfig(
            command=command,
            manifest=manifest,
            image_root=settings.get_resolved_image_root(manifest, image_root),
            out_root=out or manifest.parent / command.value,
            seed=settings.get_resolved_seed(seed),
            workers=settings.get_resolved_workers(workers),
            **{k: v for k, v in fields.items() if v is not None},
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "config"
        raise UsageError(f"invalid {where}: {first['msg']}") from exc


def emit(result: RunResult, out_root: Path) -> None:
    if _is_table_format():
        if result.rows:
            typer.output(result.rows, title=result.title)
        else:
            typer.echo(f"{result.title}: nothing to report.")
        console.print(
            f"[green]Wrote {len(result.artifacts)} files to {escape(str(out_root))}[/green]"
        )
    else:
        typer.output(result.rows, title=result.title)


def execute(config: RunConfig, verbose: bool = False) -> None:
    """Run one resolved config at the command boundary: typed errors become an exit code."""
    setup_logging(verbose, CliConfig().log_level)
    try:
        result = run(config)
    except MammoError as exc:
        fail(exc)
    emit(result, config.out_root)
    if result.exit_code != EXIT_OK:
        raise SystemExit(result.exit_code)


def configure(command: Command, manifest: Path, **kwargs: Any) -> RunConfig:
    """``build_config`` with usage errors reported like any other failure."""
    try:
        return build_config(command, manifest, **kwargs)
    except MammoError as exc:
        fail(exc)
