"""A tiny deterministic TeX-subset typesetter with a rect-only PDF backend.

This is the reference compiler/rasterizer pair the localization pipeline is
wired to by default.  It renders a monospace-grid approximation of a paper:
every glyph is a handful of filled rectangles on a 6pt advance, pages are US
letter, and there is no anti-aliasing, hinting, or kerning, so renders are
bit-reproducible.  Production deployments point the pipeline at a real TeX
compiler and rasterizer through the same subprocess contracts.

Color instrumentation uses two zero-width commands:

    \\pgc{r}{g}{b}   push a text color (0-255 channels)
    \\pge            pop back to the previous color

Both are transparent to layout: they occupy no space and scripts attach
straight through them, so a colored render is pixel-identical to the
original everywhere except ink color.
"""

from .layout import LayoutResult, InkRect, MinitexError, compile_tex
from .pdf import write_pdf
from .raster import rasterize_pdf, write_pages

__all__ = [
    "LayoutResult",
    "InkRect",
    "MinitexError",
    "compile_tex",
    "write_pdf",
    "rasterize_pdf",
    "write_pages",
]
