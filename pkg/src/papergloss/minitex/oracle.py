"""Ground-truth geometry straight from the layout engine.

Because every ink rectangle remembers its source offset, the expected page
position of any source span can be computed without touching the color
pipeline: filter the ink by offset, then group per page into line clusters
exactly the way located glyph boxes are merged.  This is the independent
oracle the localization accuracy tests compare against.
"""

from __future__ import annotations

from ..geometry import Box, merge_into_line_boxes
from .layout import PAGE_H, PAGE_W, LayoutResult, compile_tex


def ink_fraction_boxes(result: LayoutResult, span: tuple[int, int]) -> list[Box]:
    """Page-fraction boxes for all ink originating inside span, per line."""
    boxes = []
    for ink in result.inks:
        if span[0] <= ink.src < span[1]:
            boxes.append(
                Box(
                    page=ink.page,
                    left=ink.x / PAGE_W,
                    top=ink.y / PAGE_H,
                    width=ink.w / PAGE_W,
                    height=ink.h / PAGE_H,
                )
            )
    if not boxes:
        return []
    return merge_into_line_boxes(boxes)


def span_boxes(source: str, spans: dict[str, tuple[int, int]]) -> dict[str, list[Box]]:
    """Truth boxes for many spans of one document, keyed like the input."""
    result = compile_tex(source)
    return {key: ink_fraction_boxes(result, span) for key, span in spans.items()}
