"""Exact linear algebra over Q for rank and span computations.

Vectors are dicts from hashable, mutually comparable basis keys to Fraction
entries.  SpanTracker keeps a reduced row-echelon basis so membership tests
and incremental rank are exact and deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping

Vec = dict[Hashable, Fraction]


class SpanTracker:
    """Incrementally maintained reduced row-echelon span."""

    def __init__(self) -> None:
        self.rows: dict[Hashable, Vec] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[Hashable, Fraction]) -> Vec:
        """Residual of vec after elimination against the stored rows."""
        out: Vec = {k: Fraction(v) for k, v in vec.items() if v != 0}
        # rows are mutually reduced, so eliminating each stored pivot once
        # only ever introduces non-pivot keys
        for pivot in [k for k in out if k in self.rows]:
            coeff = out.pop(pivot, None)
            if coeff is None:
                continue
            for k, v in self.rows[pivot].items():
                if k == pivot:
                    continue
                nv = out.get(k, Fraction(0)) - coeff * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def contains(self, vec: Mapping[Hashable, Fraction]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[Hashable, Fraction]) -> bool:
        """Insert vec; returns True when it added a new direction."""
        res = self.reduce(vec)
        if not res:
            return False
        pivot = max(res)
        inv = Fraction(1) / res[pivot]
        row = {k: v * inv for k, v in res.items()}
        for other_pivot, other in self.rows.items():
            c = other.get(pivot)
            if c is None:
                continue
            updated = dict(other)
            for k, v in row.items():
                nv = updated.get(k, Fraction(0)) - c * v
                if nv:
                    updated[k] = nv
                else:
                    updated.pop(k, None)
            self.rows[other_pivot] = updated
        self.rows[pivot] = row
        return True


def rank_of(vectors: list[Mapping[Hashable, Fraction]]) -> int:
    tracker = SpanTracker()
    for v in vectors:
        tracker.add(v)
    return tracker.rank
