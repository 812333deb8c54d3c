"""Rasterize rect-only PDF content streams to PNG page images.

Fills are painted with hard pixel edges (round-to-nearest on each rect edge,
no anti-aliasing), so every pixel holds exactly one of the colors that appear
in the document.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .layout import PAGE_H, PAGE_W


class RasterizeError(Exception):
    """The input is not a document this rasterizer understands."""


_STREAM_RE = re.compile(rb"stream\r?\n(.*?)\s*endstream", re.S)


def rasterize_pdf(pdf: bytes, dpi: int = 150) -> list[np.ndarray]:
    scale = dpi / 72.0
    width = round(PAGE_W * scale)
    height = round(PAGE_H * scale)
    n_pages = len(re.findall(rb"/Type /Page[^s]", pdf))
    streams = _STREAM_RE.findall(pdf)
    if n_pages == 0 or len(streams) != n_pages:
        raise RasterizeError(
            f"malformed document: {n_pages} pages, {len(streams)} content streams"
        )

    pages = []
    for data in streams:
        img = np.full((height, width, 3), 255, dtype=np.uint8)
        color = np.array([0, 0, 0], dtype=np.uint8)
        stack: list[float] = []
        for tok in data.decode("latin-1").split():
            if tok == "rg":
                b, g, r = stack.pop(), stack.pop(), stack.pop()
                color = np.array(
                    [round(r * 255), round(g * 255), round(b * 255)], dtype=np.uint8
                )
            elif tok == "re":
                pass  # operands stay on the stack until the fill
            elif tok == "f":
                while len(stack) >= 4:
                    h, w, y, x = stack.pop(), stack.pop(), stack.pop(), stack.pop()
                    x0 = max(0, min(width, round(x * scale)))
                    x1 = max(0, min(width, round((x + w) * scale)))
                    y0 = max(0, min(height, round((PAGE_H - y - h) * scale)))
                    y1 = max(0, min(height, round((PAGE_H - y) * scale)))
                    img[y0:y1, x0:x1] = color
            else:
                stack.append(float(tok))
        pages.append(img)
    return pages


def write_pages(pages: list[np.ndarray], prefix: str | Path) -> list[Path]:
    """Write page images as {prefix}-{n}.png with zero-padded page numbers."""
    prefix = Path(prefix)
    pad = len(str(len(pages)))
    paths = []
    for i, img in enumerate(pages, start=1):
        path = prefix.parent / f"{prefix.name}-{str(i).zfill(pad)}.png"
        Image.fromarray(img).save(path)
        paths.append(path)
    return paths
