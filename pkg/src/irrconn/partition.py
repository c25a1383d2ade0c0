"""Integer partitions and their cell statistics.

Diagrams use the English convention: cell (i, j) sits in row i, column j,
both counted from 1.  For a cell the arm is the number of cells to its right
and the leg the number of cells below it.
"""

from __future__ import annotations

from functools import lru_cache

__all__ = ["Partition", "conjugate", "cell_stats", "enumerate_partitions", "partitions_of"]


class Partition(tuple):
    """Weakly decreasing tuple of positive integers."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        self = super().__new__(cls, parts)
        if sum(parts) % 2 != sum(c * c for c in _conj(parts)) % 2:
            raise AssertionError("parity of |mu| and <mu,mu> disagree")
        return self

    def __repr__(self):
        return f"Partition({list(self)})"

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def cells(self):
        for i, row in enumerate(self, start=1):
            for j in range(1, row + 1):
                yield (i, j)

    def arm(self, i: int, j: int) -> int:
        return self[i - 1] - j

    def leg(self, i: int, j: int) -> int:
        return self.conjugate()[j - 1] - i

    def arms_legs(self) -> list[tuple[int, int]]:
        """(arm, leg) for every cell, in reading order."""
        c = self.conjugate()
        return [(self[i - 1] - j, c[j - 1] - i) for i, j in self.cells()]

    def n(self) -> int:
        return sum(i * p for i, p in enumerate(self))

    def pairing(self, other: "Partition") -> int:
        a, b = _conj(tuple(self)), _conj(tuple(other))
        return sum(x * y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _conj(parts: tuple) -> tuple:
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p >= j) for j in range(1, parts[0] + 1))


def conjugate(mu) -> Partition:
    return Partition(_conj(tuple(mu)))


def cell_stats(mu) -> dict:
    """Arms and legs per cell together with n(mu), |mu| and <mu,mu>."""
    mu = Partition(mu)
    cells = {cell: al for cell, al in zip(mu.cells(), mu.arms_legs())}
    return {"cells": cells, "n": mu.n(), "size": mu.size, "pairing": mu.pairing(mu)}


@lru_cache(maxsize=None)
def partitions_of(m: int) -> tuple:
    """Partitions of m in reverse lexicographic order, e.g. (3), (2,1), (1,1,1)."""
    if m < 0:
        raise ValueError("negative size")

    def gen(rest, largest):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, largest), 0, -1):
            for tail in gen(rest - p, p):
                yield (p,) + tail

    return tuple(Partition(p) for p in gen(m, m))


def enumerate_partitions(n: int) -> list:
    """All partitions of every m <= n, grouped by size."""
    if n < 0:
        raise ValueError("negative bound")
    out = []
    for m in range(n + 1):
        out.extend(partitions_of(m))
    return out
