"""
Report Export

Formats:
- JSON: any report model, to stdout or a file
- CSV: one row per checkpoint (p, primes_seen, good_primes, coprime_count)
"""

import csv
import sys
from pathlib import Path
from typing import Iterable, Optional

from pydantic import BaseModel

from ..types import CheckpointRow

CSV_HEADER = ["p", "primes_seen", "good_primes", "coprime_count"]


def render_json(report: BaseModel) -> str:
    return report.model_dump_json(indent=2)


def write_json(report: BaseModel, output_path: Optional[Path] = None) -> Optional[str]:
    """
    Write a report as JSON.

    Args:
        report: Any pydantic report model
        output_path: File to write; stdout when omitted

    Returns:
        Path written, or None for stdout
    """
    content = render_json(report)
    if output_path is None:
        sys.stdout.write(content + "\n")
        sys.stdout.flush()
        return None
    out_file = Path(output_path)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    out_file.write_text(content + "\n")
    return str(out_file)


def write_csv(rows: Iterable[CheckpointRow], output_path: Path) -> str:
    out_file = Path(output_path)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    with open(out_file, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([row.p, row.primes_seen, row.good_primes, row.coprime_count])
    return str(out_file)
