"""Page-fraction bounding boxes and the rectangle math shared across modules.

All persisted coordinates are fractions of page width/height in [0, 1]
with the origin at the top-left corner, so every consumer is independent
of rasterization density.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle on one page, in page fractions."""

    page: int
    left: float
    top: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height

    def validate(self) -> None:
        if self.page < 0:
            raise ValueError(f"negative page index {self.page}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"degenerate box {self}")
        if self.left < 0 or self.top < 0:
            raise ValueError(f"box extends past page origin: {self}")
        if self.right > 1.0 + 1e-9 or self.bottom > 1.0 + 1e-9:
            raise ValueError(f"box extends past page edge: {self}")

    def round(self, ndigits: int = 6) -> "Box":
        return Box(
            self.page,
            round(self.left, ndigits),
            round(self.top, ndigits),
            round(self.width, ndigits),
            round(self.height, ndigits),
        )

    def to_json(self) -> dict:
        return {
            "page": self.page,
            "left": self.left,
            "top": self.top,
            "width": self.width,
            "height": self.height,
        }

    @staticmethod
    def from_json(obj: dict) -> "Box":
        return Box(
            page=int(obj["page"]),
            left=float(obj["left"]),
            top=float(obj["top"]),
            width=float(obj["width"]),
            height=float(obj["height"]),
        )


def union_box(boxes: list[Box]) -> Box:
    """Minimal box containing all input boxes. Boxes must share a page."""
    if not boxes:
        raise ValueError("union of zero boxes")
    pages = {b.page for b in boxes}
    if len(pages) != 1:
        raise ValueError(f"union across pages {sorted(pages)}")
    if len(boxes) == 1:
        return boxes[0]
    left = min(b.left for b in boxes)
    top = min(b.top for b in boxes)
    right = max(b.right for b in boxes)
    bottom = max(b.bottom for b in boxes)
    return Box(boxes[0].page, left, top, right - left, bottom - top)


def boxes_overlap(a: Box, b: Box) -> bool:
    if a.page != b.page:
        return False
    return a.left < b.right and b.left < a.right and a.top < b.bottom and b.top < a.bottom


def vertical_overlap(a: Box, b: Box) -> float:
    """Height of the vertical range shared by two boxes (0 if disjoint)."""
    return max(0.0, min(a.bottom, b.bottom) - max(a.top, b.top))


def cluster_lines(boxes: list[Box]) -> list[list[Box]]:
    """Group boxes on one page into text lines by vertical-range overlap.

    Two boxes belong to the same line when their vertical ranges overlap;
    clustering is transitive so a tall box bridges everything it touches.
    Returns clusters ordered top-to-bottom, each left-to-right.
    """
    if not boxes:
        return []
    remaining = sorted(boxes, key=lambda b: (b.top, b.left))
    clusters: list[list[Box]] = []
    for box in remaining:
        placed = False
        for cluster in clusters:
            if any(vertical_overlap(box, other) > 0 for other in cluster):
                cluster.append(box)
                placed = True
                break
        if not placed:
            clusters.append([box])
    # A later box can bridge two earlier clusters; merge to a fixpoint.
    changed = True
    while changed:
        changed = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                if any(
                    vertical_overlap(a, b) > 0 for a in clusters[i] for b in clusters[j]
                ):
                    clusters[i].extend(clusters[j])
                    del clusters[j]
                    changed = True
                    break
            if changed:
                break
    for cluster in clusters:
        cluster.sort(key=lambda b: (b.left, b.top))
    clusters.sort(key=lambda c: min(b.top for b in c))
    return clusters


def merge_into_line_boxes(boxes: list[Box]) -> list[Box]:
    """Collapse raw blob boxes into one box per page per text line.

    This is how entity-level boxes are derived from glyph-level blobs: a
    word or sentence that spans several lines keeps one box per line.
    """
    out: list[Box] = []
    by_page: dict[int, list[Box]] = {}
    for b in boxes:
        by_page.setdefault(b.page, []).append(b)
    for page in sorted(by_page):
        for cluster in cluster_lines(by_page[page]):
            out.append(union_box(cluster))
    return out
