from __future__ import annotations

import csv
import io
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, MutableSequence, Optional, Sequence, TextIO

import yaml
from rich.console import Console
from rich.logging import RichHandler

from .errors import ArgumentError

TABLE_FORMATS = ("csv", "md")

# Nonzero floats smaller than this would round to 0.000000
_FIXED_FLOOR = 1e-4


class _YAMLDumper(yaml.Dumper):
    """Custom YAML dumper for uniform formatting."""

    def increase_indent(self, flow=False, indentless=False):
        return super().increase_indent(flow, indentless=False)


def dump_yaml(data: Any, stream: TextIO):
    """Uniform way to dump object to YAML file.

    Args:
        data (Any): Payload.
        stream (TextIO): Text file handle.
    """
    yaml.dump(
        data,
        stream,
        Dumper=_YAMLDumper,
        default_flow_style=False,
        allow_unicode=True,
        sort_keys=False,
    )


def setup_logging(level: int, path: Optional[Path] = None):
    """Basic logger configuration for the CLI.

    Console logs go to stderr, so that stdout carries results only.

    Args:
        level (int): Logging level. Defaults to logging.INFO.
        path (Path): Path to file logs.
    """

    handlers: MutableSequence[logging.Handler] = []

    if path:
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            filename=path,
            maxBytes=int(1e6),
            backupCount=3,
        )
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        file_handler.setLevel(logging.WARNING)
        handlers.append(file_handler)

    handlers.append(
        RichHandler(
            level=level,
            console=Console(stderr=True),
            rich_tracebacks=True,
            markup=True,
            show_time=False,
        )
    )

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=handlers,
        force=True,
    )


def format_value(value: Any) -> str:
    """Floats at 6 decimals, or 6 significant digits in scientific form below 1e-4."""
    if isinstance(value, float):
        if value and abs(value) < _FIXED_FLOOR:
            return f"{value:.6e}"
        return f"{value:.6f}"
    return str(value)


def render_rows(header: Sequence[str], rows: Sequence[Sequence[Any]], fmt: str = "csv") -> str:
    """Renders a table as CSV or a Markdown table.

    Args:
        header (Sequence[str]): Column names.
        rows (Sequence[Sequence[Any]]): Records; missing trailing cells render empty.
        fmt (str, optional): "csv" or "md". Defaults to "csv".

    Returns:
        str: Rendered text ending with a newline.
    """

    if fmt not in TABLE_FORMATS:
        raise ArgumentError(f"Unknown format {fmt!r}, expected one of {TABLE_FORMATS}")

    cells = [[format_value(v) for v in row] + [""] * (len(header) - len(row)) for row in rows]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buffer.getvalue()

    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in cells)
    return "\n".join(lines) + "\n"
