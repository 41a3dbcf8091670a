"""Strict readers for the simulator's file contracts.

This package never recomputes physics: it renders exactly the numbers the
files carry, and it refuses inputs whose schema it does not recognise
rather than guessing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

SUPPORTED_SCHEMA_MAJOR = 1

PROFILE_HEADER = ["site", "t_expect_step1", "t_expect_step3"]
DECAY_REQUIRED = ("distance", "eta", "e_b")


class SchemaError(ValueError):
    """Input file does not match the expected schema."""


@dataclass(frozen=True)
class ProfileSeries:
    """Per-site energy expectation values at the labelled protocol steps."""

    sites: tuple[int, ...]
    step1: tuple[float, ...]
    step3: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.sites) == len(self.step1) == len(self.step3)):
            raise SchemaError("profile columns have mismatched lengths")


@dataclass(frozen=True)
class DecaySeries:
    distance: tuple[float, ...]
    eta: tuple[float, ...]
    e_b: tuple[float, ...]


def read_profile(path: str | Path) -> ProfileSeries:
    path = Path(path)
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise SchemaError(f"{path}: empty file, expected header {PROFILE_HEADER}")
    if rows[0] != PROFILE_HEADER:
        raise SchemaError(
            f"{path}: header {rows[0]} does not match required columns "
            f"{PROFILE_HEADER}"
        )
    sites, step1, step3 = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise SchemaError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            sites.append(int(row[0]))
            step1.append(float(row[1]))
            step3.append(float(row[2]))
        except ValueError as err:
            raise SchemaError(f"{path}:{lineno}: {err}") from None
    if not sites:
        raise SchemaError(f"{path}: no data rows")
    if sites != list(range(len(sites))):
        raise SchemaError(f"{path}: site column must run 0..N-1 in order")
    return ProfileSeries(tuple(sites), tuple(step1), tuple(step3))


def read_decay(path: str | Path, minimum_rows: int = 3) -> DecaySeries:
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected a distance sweep")
        missing = [c for c in DECAY_REQUIRED if c not in reader.fieldnames]
        if missing:
            raise SchemaError(
                f"{path}: missing required columns {missing}; found "
                f"{reader.fieldnames}"
            )
        rows = list(reader)
    if len(rows) < minimum_rows:
        raise SchemaError(
            f"{path}: a decay plot needs at least {minimum_rows} rows, got {len(rows)}"
        )
    try:
        distance = tuple(float(r["distance"]) for r in rows)
        eta = tuple(float(r["eta"]) for r in rows)
        e_b = tuple(float(r["e_b"]) for r in rows)
    except ValueError as err:
        raise SchemaError(f"{path}: non-numeric field: {err}") from None
    return DecaySeries(distance, eta, e_b)


def read_report(path: str | Path) -> dict:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}: not valid JSON: {err}") from None
    version = payload.get("schema_version")
    if not isinstance(version, int):
        raise SchemaError(f"{path}: missing integer schema_version")
    if version > SUPPORTED_SCHEMA_MAJOR:
        raise SchemaError(
            f"{path}: schema_version {version} is newer than the supported "
            f"{SUPPORTED_SCHEMA_MAJOR}; refusing to guess"
        )
    return payload
