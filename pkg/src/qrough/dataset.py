"""Loading, validation, encoding, splitting, and scaling of print-run data.

The CSV schema is fixed: 8 process parameters plus the surface-roughness
target (um), comma-delimited with a header row. Lines starting with '#'
are treated as comments. A cleaned 30-run dataset ships with the package
(see ``bundled_data_path``).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

CSV_COLUMNS = (
    "layer_height",
    "wall_thickness",
    "infill_density",
    "infill_pattern",
    "nozzle_temperature",
    "bed_temperature",
    "print_speed",
    "fan_speed",
    "surface_roughness",
)

# Ordinal codes; one numeric feature per qubit downstream.
PATTERN_CODES = {"grid": 0.0, "honeycomb": 1.0, "triangles": 2.0, "cubic": 3.0}

FEATURE_NAMES = tuple(c for c in CSV_COLUMNS if c != "surface_roughness")

SCALED_MAX = math.pi  # features are embedded as rotation angles in [0, pi]


class DatasetError(ValueError):
    """Schema violation or unparseable content in a dataset file."""


@dataclass(frozen=True)
class Sample:
    """One experimental print run."""

    layer_height: float
    wall_thickness: float
    infill_density: float
    infill_pattern: str
    nozzle_temperature: float
    bed_temperature: float
    print_speed: float
    fan_speed: float
    surface_roughness: float

    def __post_init__(self):
        for f in fields(self):
            if f.type == "float" and not math.isfinite(getattr(self, f.name)):
                raise DatasetError(f"{f.name} must be finite")
        if self.infill_pattern not in PATTERN_CODES:
            raise DatasetError(f"unknown infill pattern {self.infill_pattern!r}")
        if self.layer_height <= 0:
            raise DatasetError("layer_height must be positive")
        for name in ("infill_density", "fan_speed"):
            value = getattr(self, name)
            if not 0 <= value <= 100:
                raise DatasetError(f"{name} must be in [0, 100], got {value}")


def normalize_pattern(token: str) -> str:
    """Canonical pattern token: lowercase with all whitespace removed."""
    return "".join(token.lower().split())


def encode_pattern(pattern: str) -> float:
    """Ordinal code of a canonical pattern token."""
    try:
        return PATTERN_CODES[pattern]
    except KeyError:
        raise DatasetError(f"unknown infill pattern {pattern!r}") from None


def bundled_data_path() -> Path:
    """Path of the packaged 30-run dataset."""
    return Path(str(resources.files("qrough").joinpath("data/table1.csv")))


def load_csv(path) -> list[Sample]:
    """Parse a dataset file into one Sample per data row.

    Raises FileNotFoundError for a missing file and DatasetError (with the
    offending row number) for schema or content problems.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [
            (lineno, row)
            for lineno, row in enumerate(csv.reader(fh), start=1)
            if row and not row[0].lstrip().startswith("#")
        ]
    if not rows:
        raise DatasetError(f"{path}: no header row found")

    header_line, header = rows[0]
    got = tuple(c.strip().lower() for c in header)
    if got != CSV_COLUMNS:
        raise DatasetError(
            f"{path}:{header_line}: header mismatch; expected {','.join(CSV_COLUMNS)}"
        )

    samples = []
    for lineno, row in rows[1:]:
        if len(row) != len(CSV_COLUMNS):
            raise DatasetError(
                f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}"
            )
        record = dict(zip(CSV_COLUMNS, (cell.strip() for cell in row)))
        record["infill_pattern"] = normalize_pattern(record["infill_pattern"])
        try:
            sample = Sample(
                **{
                    k: (v if k == "infill_pattern" else float(v))
                    for k, v in record.items()
                }
            )
        except (ValueError, DatasetError) as exc:
            raise DatasetError(f"{path}:{lineno}: {exc}") from None
        samples.append(sample)
    return samples


def save_csv(samples: list[Sample], path) -> None:
    """Write samples back out in the canonical schema (round-trips exactly)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for s in samples:
            writer.writerow(
                [repr(getattr(s, c)) if c != "infill_pattern" else s.infill_pattern
                 for c in CSV_COLUMNS]
            )


@dataclass(frozen=True, eq=False)
class EncodedDataset:
    """Numeric design matrix (patterns ordinal-encoded) plus targets in um."""

    features: np.ndarray  # (N, 8)
    targets: np.ndarray  # (N,)


def encode_samples(samples: list[Sample]) -> EncodedDataset:
    """Turn samples into a float matrix, one column per CSV feature column."""
    rows = [
        [
            encode_pattern(getattr(s, name)) if name == "infill_pattern"
            else getattr(s, name)
            for name in FEATURE_NAMES
        ]
        for s in samples
    ]
    targets = [s.surface_roughness for s in samples]
    return EncodedDataset(np.array(rows, dtype=float), np.array(targets, dtype=float))


def split(samples: list[Sample], test_fraction: float, seed: int) -> tuple[list[Sample], list[Sample]]:
    """Deterministic shuffled train/test partition.

    |test| = round(N * test_fraction); raises if either part would be empty.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(samples)
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    n_test = int(round(n * test_fraction))
    if n_test == 0 or n_test == n:
        raise ValueError(
            f"test_fraction {test_fraction} leaves an empty part for {n} samples"
        )
    perm = np.random.default_rng(seed).permutation(n)
    test = [samples[i] for i in perm[:n_test]]
    train = [samples[i] for i in perm[n_test:]]
    return train, test


@dataclass(frozen=True, eq=False)
class FeatureScaler:
    """Per-feature min/max map onto rotation angles in [0, pi].

    Fit on training rows only; out-of-range values are clamped and constant
    columns map to pi/2.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaler":
        features = np.asarray(features, dtype=float)
        if features.size == 0:
            raise ValueError("cannot fit a scaler on an empty feature matrix")
        return cls(features.min(axis=0), features.max(axis=0))

    def transform(self, features: np.ndarray) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=float))
        span = self.maxs - self.mins
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = (features - self.mins) / span
        frac = np.where(span == 0, 0.5, frac)
        return SCALED_MAX * np.clip(frac, 0.0, 1.0)

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureScaler":
        return cls(np.array(d["mins"], dtype=float), np.array(d["maxs"], dtype=float))
