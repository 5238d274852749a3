"""Bin transactions into fixed-width windows and build culture vectors.

A culture vector is the fact-frequency distribution of one (group, window,
practice) cell.  Windows are half-open [start, start + width) and indexed
from 1; group-windows with no activity get no vector at all, which downstream
measures surface as null points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .corpus import Fact, Transaction

VectorKey = tuple[str, int, str]  # (group, window, practice)


@dataclass(frozen=True)
class WindowSpec:
    """Observation grid: first window start, window width, window count."""

    epoch: float
    count: int
    width: float = 7 * 86400.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("window width must be positive")
        if self.count < 1:
            raise ValueError("window count must be at least 1")

    @property
    def end(self) -> float:
        return self.epoch + self.width * self.count

    def index_of(self, timestamp: float) -> Optional[int]:
        """1-based window index, or None outside [epoch, end)."""
        if not (self.epoch <= timestamp < self.end):
            return None
        return int((timestamp - self.epoch) // self.width) + 1

    def start_of(self, window: int) -> float:
        return self.epoch + (window - 1) * self.width


@dataclass
class CultureVector:
    """Fact reference counts for one (group, window, practice) cell."""

    group: str
    window: int
    practice: str
    counts: dict[Fact, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)


RankedVector = list[tuple[Fact, int]]


def bin_transactions(
    transactions: Iterable[Transaction], spec: WindowSpec
) -> tuple[dict[VectorKey, CultureVector], int]:
    """Fold a transaction stream into culture vectors.

    Returns (vectors keyed by (group, window, practice), dropped count) where
    dropped counts transactions outside the observation grid.
    """
    vectors: dict[VectorKey, CultureVector] = {}
    dropped = 0
    for t in transactions:
        window = spec.index_of(t.timestamp)
        if window is None:
            dropped += 1
            continue
        key = (t.group, window, t.practice)
        vec = vectors.get(key)
        if vec is None:
            vec = vectors[key] = CultureVector(t.group, window, t.practice)
        for fact in t.facts:
            vec.counts[fact] = vec.counts.get(fact, 0) + 1
    return vectors, dropped


def rank_vector(vector: CultureVector) -> RankedVector:
    """Deterministic ranking: descending count, ties ascending by fact key."""
    if not vector.counts:
        raise ValueError("empty culture")
    return sorted(vector.counts.items(), key=lambda kv: (-kv[1], kv[0].key))


def reference_pairs(transactions: Iterable[Transaction], spec: WindowSpec) -> int:
    """Count (transaction, fact) pairs inside the observation span."""
    return sum(
        len(t.facts) for t in transactions if spec.index_of(t.timestamp) is not None
    )


def write_vectors_csv(vectors: dict[VectorKey, CultureVector], path) -> None:
    """Export vectors as ``group,window,practice,fact_kind,fact,count``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "window", "practice", "fact_kind", "fact", "count"])
        for (group, window, practice) in sorted(vectors):
            vec = vectors[(group, window, practice)]
            for fact, count in sorted(vec.counts.items(), key=lambda kv: kv[0].key):
                writer.writerow([group, window, practice, fact.kind, fact.key, count])
