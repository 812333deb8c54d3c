"""Blob detection: merge same-color pixel runs into minimal bounding boxes.

Boxes start as horizontal runs of matching pixels within single rows.
Runs in adjacent rows that overlap horizontally are joined, and joining
repeats until no two boxes share area or touch across adjacent rows with
horizontal overlap. The result is a set of pairwise-disjoint minimal
boxes; a glyph with vertically separated ink (the dot and stem of an
"i") stays two boxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PixelBox:
    """Half-open pixel rectangle: rows [top, bottom), cols [left, right)."""

    top: int
    left: int
    bottom: int
    right: int

    def joinable(self, other: "PixelBox") -> bool:
        rows_touch = self.top <= other.bottom and other.top <= self.bottom
        cols_overlap = self.left < other.right and other.left < self.right
        return rows_touch and cols_overlap

    def merge(self, other: "PixelBox") -> "PixelBox":
        return PixelBox(
            min(self.top, other.top),
            min(self.left, other.left),
            max(self.bottom, other.bottom),
            max(self.right, other.right),
        )


def _row_runs(mask: np.ndarray) -> list[tuple[int, int, int]]:
    """Maximal True runs as (row, col_start, col_end) with end exclusive."""
    runs = []
    for row in range(mask.shape[0]):
        line = mask[row]
        if not line.any():
            continue
        padded = np.concatenate(([False], line, [False]))
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        for start, end in zip(edges[::2], edges[1::2]):
            runs.append((row, int(start), int(end)))
    return runs


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def detect_blobs(mask: np.ndarray) -> list[PixelBox]:
    """Minimal disjoint boxes covering the True pixels of a 2-D mask.

    Returned boxes are sorted by (top, left) for determinism.
    """
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    mask = mask.astype(bool)
    runs = _row_runs(mask)
    if not runs:
        return []

    # First pass: connect runs in adjacent rows with horizontal overlap.
    uf = _UnionFind(len(runs))
    prev_row: list[int] = []
    prev_row_idx = -2
    row_start = 0
    while row_start < len(runs):
        row = runs[row_start][0]
        row_end = row_start
        while row_end < len(runs) and runs[row_end][0] == row:
            row_end += 1
        current = list(range(row_start, row_end))
        if row == prev_row_idx + 1:
            for i in prev_row:
                _, s1, e1 = runs[i]
                for j in current:
                    _, s2, e2 = runs[j]
                    if s1 < e2 and s2 < e1:
                        uf.union(i, j)
        prev_row = current
        prev_row_idx = row
        row_start = row_end

    groups: dict[int, PixelBox] = {}
    for i, (row, start, end) in enumerate(runs):
        root = uf.find(i)
        box = PixelBox(row, start, row + 1, end)
        if root in groups:
            groups[root] = groups[root].merge(box)
        else:
            groups[root] = box

    # Second pass: merging can create boxes that overlap or touch with
    # horizontal overlap; join those to a fixpoint so boxes are disjoint.
    # Boxes only grow, so joinability is monotone and the fixpoint does
    # not depend on merge order; each sweep collapses every connected
    # group of joinable boxes at once.
    arr = np.array([[b.top, b.left, b.bottom, b.right] for b in groups.values()])
    while len(arr) > 1:
        rows_touch = (arr[:, None, 0] <= arr[None, :, 2]) & (
            arr[None, :, 0] <= arr[:, None, 2]
        )
        cols_overlap = (arr[:, None, 1] < arr[None, :, 3]) & (
            arr[None, :, 1] < arr[:, None, 3]
        )
        pairs = np.argwhere(np.triu(rows_touch & cols_overlap, k=1))
        if len(pairs) == 0:
            break
        uf2 = _UnionFind(len(arr))
        for a, b in pairs:
            uf2.union(int(a), int(b))
        merged: dict[int, list[int]] = {}
        for idx in range(len(arr)):
            merged.setdefault(uf2.find(idx), []).append(idx)
        arr = np.array(
            [
                [
                    arr[members, 0].min(),
                    arr[members, 1].min(),
                    arr[members, 2].max(),
                    arr[members, 3].max(),
                ]
                for members in merged.values()
            ]
        )
    boxes = [PixelBox(int(t), int(l), int(b), int(r)) for t, l, b, r in arr]
    return sorted(boxes, key=lambda b: (b.top, b.left, b.bottom, b.right))
