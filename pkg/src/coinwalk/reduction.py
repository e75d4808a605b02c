"""Deterministic pairwise-tree summation for reproducible averages.

Monte-Carlo means must not depend on how many workers produced the terms, so
summation follows a fixed binary-counter tree over ascending item index: the
reduction shape is a function of the item count alone, making float results
bit-stable across thread counts and run orders.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np


class PairwiseAccumulator:
    """Streaming pairwise-tree sum; feed items in ascending index order."""

    def __init__(self) -> None:
        self._levels: list[tuple[int, np.ndarray]] = []
        self._count = 0

    def add(self, item: np.ndarray) -> None:
        node = np.asarray(item)
        level = 0
        while self._levels and self._levels[-1][0] == level:
            _, sibling = self._levels.pop()
            node = sibling + node
            level += 1
        self._levels.append((level, node))
        self._count += 1

    @property
    def count(self) -> int:
        return self._count

    def total(self) -> np.ndarray:
        if not self._levels:
            raise ValueError("cannot reduce an empty sequence")
        # leftover partials merge shallow-into-deep, mirroring the final carries
        node = self._levels[-1][1]
        for _, sibling in reversed(self._levels[:-1]):
            node = sibling + node
        return node


def pairwise_tree_sum(items: Iterable[np.ndarray]) -> np.ndarray:
    """Sum arrays over the fixed pairwise tree used by :class:`PairwiseAccumulator`."""
    acc = PairwiseAccumulator()
    for item in items:
        acc.add(item)
    return acc.total()
