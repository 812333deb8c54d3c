"""Dataclass configuration for the pipeline.

The compiler and rasterizer are subprocess command templates.  Each element
is formatted with the placeholders {tex}, {pdf}, {prefix}, {dpi} before
invocation, so swapping in a real TeX toolchain is a config change:

    compiler_cmd = ("pdflatex", "-interaction=batchmode", "{tex}")
    rasterizer_cmd = ("pdftoppm", "-png", "-r", "{dpi}", "{pdf}", "{prefix}")

The defaults use the bundled typesetter, which needs no system installs.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field


DEFAULT_COMPILER = (
    sys.executable, "-m", "papergloss.minitex", "compile", "{tex}", "-o", "{pdf}",
)
DEFAULT_RASTERIZER = (
    sys.executable, "-m", "papergloss.minitex", "raster", "{pdf}",
    "-o", "{prefix}", "--dpi", "{dpi}",
)


@dataclass(frozen=True)
class LocateConfig:
    compiler_cmd: tuple[str, ...] = DEFAULT_COMPILER
    rasterizer_cmd: tuple[str, ...] = DEFAULT_RASTERIZER
    dpi: int = 150
    color_capacity: int = 100
    worker_limit: int = 4
    color_tolerance: int = 8  # per-channel, absorbs anti-aliased fringes


@dataclass(frozen=True)
class PipelineConfig:
    source_dir: str = "."
    main: str = "main.tex"
    out_dir: str = "out"
    stages: tuple[str, ...] = ("scan", "parse", "locate", "extract", "manifest")
    expand_macros: bool = True
    paper_id: str = ""  # empty means: use the source directory's name
    locate: LocateConfig = field(default_factory=LocateConfig)
