#!/usr/bin/env python3
"""
Coprime Toolkit Terminal Output

Timestamped, color-coded progress lines for long scans and verify tables.
Everything goes to stderr so JSON on stdout stays machine-readable.
"""

import os
import sys
from datetime import datetime, timezone

# ANSI color codes
RED = "\033[91m"
GREEN = "\033[92m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
WHITE = "\033[97m"
GRAY = "\033[90m"
RESET = "\033[0m"
BOLD = "\033[1m"

_quiet = False


def set_quiet(quiet: bool):
    """Silence info and progress lines; warnings and errors still print."""
    global _quiet
    _quiet = quiet


def _use_color() -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(sys.stderr, "isatty") and sys.stderr.isatty()


def _c(code: str) -> str:
    return code if _use_color() else ""


def _emit(line: str):
    print(line, file=sys.stderr)


def timestamp() -> str:
    """Return current timestamp in clean format."""
    return datetime.now(timezone.utc).strftime("%H:%M:%S")


def log_banner(title: str):
    """Print a section banner."""
    if _quiet:
        return
    _emit(f"{_c(BOLD)}{_c(CYAN)}⟡ {title}{_c(RESET)}")
    _emit(f"{_c(GRAY)}{'─' * 60}{_c(RESET)}")


def log_separator():
    """Print a visual separator."""
    if _quiet:
        return
    _emit(f"{_c(GRAY)}{'─' * 60}{_c(RESET)}")


def log_info(message: str):
    """Log an info message."""
    if _quiet:
        return
    _emit(f"{_c(GRAY)}[{timestamp()}]{_c(RESET)} {message}")


def log_warning(message: str):
    """Log a warning."""
    _emit(f"{_c(GRAY)}[{timestamp()}]{_c(RESET)} {_c(YELLOW)}WARNING:{_c(RESET)} {message}")


def log_error(message: str):
    """Log an error."""
    _emit(f"{_c(GRAY)}[{timestamp()}]{_c(RESET)} {_c(RED)}ERROR:{_c(RESET)} {message}")


def log_progress(label: str, done: int, total: int):
    """Log progress of a chunked run."""
    if _quiet:
        return
    pct = 100.0 * done / total if total else 100.0
    _emit(f"{_c(GRAY)}[{timestamp()}]{_c(RESET)} {label}: {done}/{total} ({pct:5.1f}%)")


def log_result_row(name: str, passed: bool, detail: str = ""):
    """One row of a pass/fail table."""
    mark = f"{_c(GREEN)}PASS{_c(RESET)}" if passed else f"{_c(RED)}{_c(BOLD)}FAIL{_c(RESET)}"
    suffix = f"  {_c(GRAY)}{detail}{_c(RESET)}" if detail else ""
    _emit(f"  {mark}  {_c(WHITE)}{name}{_c(RESET)}{suffix}")


def log_chain_status(total_records: int, last_hash: str):
    """Log checkpoint chain status."""
    if _quiet:
        return
    short_hash = last_hash[:16] if last_hash != "GENESIS" else "GENESIS"
    _emit(f"{_c(GRAY)}[{timestamp()}]{_c(RESET)} Checkpoint chain: {total_records} records, head={short_hash}")
