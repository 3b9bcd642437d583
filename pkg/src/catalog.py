"""
Curve Catalog

- Built-in catalog at config/catalog.json (labels, a-invariants, stored discriminants)
- User catalogs merge over the built-in one by label
- Stored discriminants are recomputed on load (tamper check)
- Curve arguments resolve as a catalog label or as five comma-separated a-invariants
"""

import json
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ValidationError, field_validator

from .config import CATALOG_FILE
from .curves import WeierstrassCurve, _discriminant
from .errors import CatalogTampered, UnknownCurve
from .output import log_info

_AINVS_PATTERN = re.compile(r"^\[?\s*-?\d+(\s*,\s*-?\d+){4}\s*\]?$")


class CatalogEntry(BaseModel):
    label: str
    ainvs: List[int]
    discriminant: Optional[str] = None
    bad_primes: List[int] = []

    @field_validator("ainvs")
    @classmethod
    def _five_invariants(cls, v: List[int]) -> List[int]:
        if len(v) != 5:
            raise ValueError(f"expected 5 a-invariants, got {len(v)}")
        return v

    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve.from_ainvs(self.ainvs, label=self.label,
                                           bad_primes_override=self.bad_primes)


class Catalog:
    """Label -> entry map with the discriminant check already applied."""

    def __init__(self, entries: Iterable[CatalogEntry] = ()):
        self._entries: Dict[str, CatalogEntry] = {}
        for entry in entries:
            self._entries[entry.label] = entry

    def __contains__(self, label: str) -> bool:
        return label in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def labels(self) -> List[str]:
        return list(self._entries)

    def get(self, label: str) -> CatalogEntry:
        try:
            return self._entries[label]
        except KeyError:
            raise UnknownCurve(f"unknown curve label {label!r}") from None

    def curve(self, label: str) -> WeierstrassCurve:
        return self.get(label).curve()

    def merged(self, other: "Catalog") -> "Catalog":
        """Entries of other replace ours with the same label."""
        out = Catalog(self._entries.values())
        for label in other.labels:
            out._entries[label] = other.get(label)
        return out


def check_entry(entry: CatalogEntry):
    if entry.discriminant is None:
        return
    recomputed = _discriminant(*entry.ainvs)
    try:
        stored = int(entry.discriminant)
    except ValueError:
        raise CatalogTampered(f"{entry.label}: discriminant {entry.discriminant!r} is not an integer") from None
    if recomputed != stored:
        raise CatalogTampered(
            f"{entry.label}: stored discriminant {entry.discriminant} != recomputed {recomputed}"
        )


def read_catalog(path: Path) -> Catalog:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CatalogTampered(f"cannot read catalog {path}: {e}") from e
    if not isinstance(raw, list):
        raise CatalogTampered(f"catalog {path} must be a JSON array")
    try:
        entries = [CatalogEntry.model_validate(item) for item in raw]
    except ValidationError as e:
        raise CatalogTampered(f"catalog {path} has a malformed entry: {e}") from e
    for entry in entries:
        check_entry(entry)
    return Catalog(entries)


def load_catalog(user_path: Optional[Path] = None) -> Catalog:
    """Built-in catalog, with the user catalog (if any) merged over it."""
    catalog = read_catalog(CATALOG_FILE)
    if user_path is not None:
        user = read_catalog(user_path)
        log_info(f"merged {len(user)} curves from {user_path}")
        catalog = catalog.merged(user)
    return catalog


def parse_ainvs(text: str) -> Optional[Tuple[int, ...]]:
    text = text.strip()
    if not _AINVS_PATTERN.match(text):
        return None
    return tuple(int(x) for x in text.strip("[]").split(","))


def resolve_curve(text: str, catalog: Catalog) -> WeierstrassCurve:
    """A catalog label, or a-invariants such as "0,0,1,-3,-2" or "[0,0,1,-3,-2]"."""
    if text in catalog:
        return catalog.curve(text)
    ainvs = parse_ainvs(text)
    if ainvs is None:
        raise UnknownCurve(f"{text!r} is neither a catalog label nor five a-invariants")
    return WeierstrassCurve.from_ainvs(ainvs)
