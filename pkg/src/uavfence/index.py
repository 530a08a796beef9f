"""Bounding-box spatial index.

A small Sort-Tile-Recursive packed R-tree: the feature set is static
between rebuilds, so bulk loading beats incremental insertion and keeps
the structure balanced.  Nodes hold at most 16 entries.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .geo import BBox, bbox_intersects

NODE_CAPACITY = 16


class _Node:
    __slots__ = ("bbox", "children", "entries")

    def __init__(self, bbox: BBox, children=None, entries=None):
        self.bbox = bbox
        self.children: Optional[list[_Node]] = children
        self.entries: Optional[list[tuple[int, BBox]]] = entries


def _union_bbox(boxes: Iterable[BBox]) -> BBox:
    boxes = list(boxes)
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def _pack_str(items: list, bbox_of) -> list[list]:
    """One STR packing pass: slab by center-x, tile by center-y."""
    n = len(items)
    leaf_count = math.ceil(n / NODE_CAPACITY)
    slab_count = max(1, math.ceil(math.sqrt(leaf_count)))
    per_slab = math.ceil(n / slab_count)

    def center(item):
        b = bbox_of(item)
        return ((b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0)

    by_x = sorted(items, key=lambda it: (center(it)[0], center(it)[1]))
    groups = []
    for s in range(0, n, per_slab):
        slab = sorted(by_x[s : s + per_slab], key=lambda it: (center(it)[1], center(it)[0]))
        for g in range(0, len(slab), NODE_CAPACITY):
            groups.append(slab[g : g + NODE_CAPACITY])
    return groups


class RTree:
    """Static bbox index over (id, bbox) entries; query returns ids."""

    def __init__(self, entries: Iterable[tuple[int, BBox]]):
        entries = list(entries)
        self._size = len(entries)
        if not entries:
            self._root = None
            return
        leaves = [
            _Node(_union_bbox(b for _, b in group), entries=group)
            for group in _pack_str(entries, lambda e: e[1])
        ]
        level = leaves
        while len(level) > 1:
            level = [
                _Node(_union_bbox(n.bbox for n in group), children=group)
                for group in _pack_str(level, lambda n: n.bbox)
            ]
        self._root = level[0]

    def __len__(self) -> int:
        return self._size

    def query(self, box: BBox) -> list[int]:
        """Ids of all entries whose bbox intersects ``box`` (touching counts)."""
        if self._root is None:
            return []
        hits: list[int] = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not bbox_intersects(node.bbox, box):
                continue
            if node.entries is not None:
                hits.extend(eid for eid, ebox in node.entries if bbox_intersects(ebox, box))
            else:
                stack.extend(node.children)
        return hits
