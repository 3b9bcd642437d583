"""
Checkpoint Chain

JSON-lines file: one header line, then one record per completed chunk.
Each record carries prev_hash and hash = sha256(canonical record + prev_hash),
chained from GENESIS, so a truncated or edited file is detected on resume.
"""

import hashlib
import json
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ..errors import CheckpointError
from ..output import log_chain_status, log_warning

try:
    import uuid6 as uuid_mod

    def uuid7() -> str:
        return str(uuid_mod.uuid7())
except ImportError:
    import uuid

    def uuid7() -> str:
        return str(uuid.uuid4())

GENESIS = "GENESIS"


def chain_hash(record: Dict[str, Any], prev_hash: str) -> str:
    record_bytes = json.dumps(record, sort_keys=True).encode()
    return hashlib.sha256(record_bytes + prev_hash.encode()).hexdigest()


@dataclass(frozen=True)
class CheckpointHeader:
    """Run identity; everything except run_id must match to resume."""

    run_id: str
    curves: List[List[int]]
    bound: int
    chunk_size: int
    seed: int
    divisors: List[int]

    @classmethod
    def new(cls, curves: List[List[int]], bound: int, chunk_size: int, seed: int,
            divisors: List[int]) -> "CheckpointHeader":
        return cls(run_id=uuid7(), curves=[list(c) for c in curves], bound=bound,
                   chunk_size=chunk_size, seed=seed, divisors=sorted(divisors))

    def identity(self) -> Tuple:
        return (self.curves, self.bound, self.chunk_size, self.seed, self.divisors)

    def to_line(self) -> str:
        return json.dumps({"type": "header", **asdict(self)}, sort_keys=True)


def _repair_torn_tail(path: Path, text: str) -> List[str]:
    """
    Drop a final line left unparseable by a crash mid-append.

    Only the last line may be torn; the file is rewritten without it, and a
    complete last record missing its newline gets one.
    """
    lines = text.splitlines()
    if len(lines) > 1 and lines[-1].strip():
        try:
            json.loads(lines[-1])
        except json.JSONDecodeError:
            log_warning(f"dropping torn last line {len(lines)} of {path}")
            lines = lines[:-1]
            Path(path).write_text("".join(line + "\n" for line in lines))
            return lines
    if text and not text.endswith("\n"):
        with open(path, "a") as f:
            f.write("\n")
    return lines


def read_checkpoint(path: Path, repair_tail: bool = False) -> Tuple[CheckpointHeader, List[Dict[str, Any]]]:
    """
    Parse and verify a checkpoint file; raises CheckpointError on any break in the chain.

    With repair_tail, a torn final line is truncated instead of rejected.
    """
    try:
        text = Path(path).read_text()
        lines = _repair_torn_tail(path, text) if repair_tail else text.splitlines()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if not lines:
        raise CheckpointError(f"checkpoint {path} is empty")

    try:
        raw = json.loads(lines[0])
        raw.pop("type", None)
        header = CheckpointHeader(**raw)
    except (json.JSONDecodeError, TypeError) as e:
        raise CheckpointError(f"checkpoint {path} has no valid header: {e}") from e

    records = []
    prev_hash = GENESIS
    for line_num, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            raise CheckpointError(f"invalid JSON at line {line_num} of {path}") from None
        stored = record.pop("hash", None)
        if record.get("prev_hash") != prev_hash:
            raise CheckpointError(f"chain broken at line {line_num} of {path}: prev_hash mismatch")
        if chain_hash(record, prev_hash) != stored:
            raise CheckpointError(f"chain broken at line {line_num} of {path}: hash mismatch")
        record["hash"] = stored
        records.append(record)
        prev_hash = stored
    return header, records


def verify_checkpoint(path: Path) -> Tuple[bool, Optional[str]]:
    try:
        read_checkpoint(path)
    except CheckpointError as e:
        return False, str(e)
    return True, None


class CheckpointWriter:
    """Appends chained chunk records; the only component that writes during a scan."""

    def __init__(self, path: Path, header: CheckpointHeader, records: List[Dict[str, Any]]):
        self.path = Path(path)
        self.header = header
        self.completed: Dict[int, Dict[str, Any]] = {r["chunk_index"]: r for r in records}
        self.last_hash = records[-1]["hash"] if records else GENESIS
        self._lock = threading.Lock()

    @classmethod
    def create(cls, path: Path, header: CheckpointHeader) -> "CheckpointWriter":
        path = Path(path)
        if path.exists():
            raise CheckpointError(f"checkpoint {path} already exists; pass --resume to continue it")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(header.to_line() + "\n")
        return cls(path, header, [])

    @classmethod
    def resume(cls, path: Path, header: CheckpointHeader) -> "CheckpointWriter":
        path = Path(path)
        if not path.exists():
            log_warning(f"no checkpoint at {path}, starting a fresh run")
            return cls.create(path, header)
        stored, records = read_checkpoint(path, repair_tail=True)
        if stored.identity() != header.identity():
            raise CheckpointError(
                f"checkpoint {path} belongs to a different run "
                f"(curves/bound/chunk_size/seed/divisors differ)"
            )
        log_chain_status(len(records), records[-1]["hash"] if records else GENESIS)
        return cls(path, stored, records)

    @property
    def run_id(self) -> str:
        return self.header.run_id

    def append(self, body: Dict[str, Any]) -> Dict[str, Any]:
        with self._lock:
            record = dict(body)
            record["prev_hash"] = self.last_hash
            record["hash"] = chain_hash(record, self.last_hash)
            with open(self.path, "a") as f:
                f.write(json.dumps(record, sort_keys=True) + "\n")
            self.last_hash = record["hash"]
            self.completed[record["chunk_index"]] = record
            return record
