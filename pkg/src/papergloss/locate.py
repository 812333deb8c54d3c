"""Pixel-level localization: colorize spans, compile, rasterize, diff, box.

Every entity to be localized is a ColorTarget: an id plus a character span
in the working document.  Targets are partitioned into batches that respect
span nesting (an outer span and a span inside it never share a batch, since
the outer color would repaint the inner ink), each batch is compiled with
its spans wrapped in color markers, and the colored render is diffed against
the original render pixel by pixel.  Matching pixels feed the blob detector
and come back as page-fraction boxes.
"""

from __future__ import annotations

import colorsys
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .blobs import detect_blobs
from .config import LocateConfig
from .geometry import Box, merge_into_line_boxes


class LocateError(Exception):
    pass


class CapacityError(LocateError):
    pass


class SpliceError(LocateError):
    pass


class CompileError(LocateError):
    def __init__(self, message: str, log: str = ""):
        super().__init__(message)
        self.log = log


class RasterError(LocateError):
    pass


class PageMismatchError(LocateError):
    pass


class MissingChildError(LocateError):
    pass


@dataclass(frozen=True)
class ColorTarget:
    id: str
    span: tuple[int, int]


@dataclass
class ColorBatch:
    batch_index: int
    assignments: dict[str, int]  # entity id -> color index in [0, capacity)


def palette(capacity: int) -> list[tuple[int, int, int]]:
    """Colors spaced uniformly in hue at full saturation and value."""
    colors = []
    for k in range(capacity):
        r, g, b = colorsys.hsv_to_rgb(k / capacity, 1.0, 1.0)
        colors.append((round(r * 255), round(g * 255), round(b * 255)))
    return colors


# --- batching --------------------------------------------------------------


def _spans_conflict(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Nested or otherwise entangled spans cannot share a batch."""
    if a == b:
        return True
    if a[0] <= b[0] and b[1] <= a[1]:
        return True
    if b[0] <= a[0] and a[1] <= b[1]:
        return True
    # partial overlap should be impossible for well-formed entities; keep it
    # out of one batch anyway
    return a[0] < b[1] and b[0] < a[1]


def plan_color_batches(targets: list[ColorTarget], capacity: int) -> list[ColorBatch]:
    if capacity < 1:
        raise CapacityError(f"color capacity must be >= 1, got {capacity}")
    ordered = sorted(targets, key=lambda t: (t.span[0], -(t.span[1] - t.span[0]), t.id))
    batches: list[list[ColorTarget]] = []
    for target in ordered:
        placed = False
        for batch in batches:
            if len(batch) >= capacity:
                continue
            if any(_spans_conflict(target.span, other.span) for other in batch):
                continue
            batch.append(target)
            placed = True
            break
        if not placed:
            batches.append([target])
    return [
        ColorBatch(batch_index=i, assignments={t.id: c for c, t in enumerate(batch)})
        for i, batch in enumerate(batches)
    ]


# --- instrumentation -------------------------------------------------------

_OPEN = "\\pgc{%d}{%d}{%d}"
_CLOSE = "\\pge{}"


def _check_splice_site(source: str, offset: int):
    """Reject splices that would land inside a control word.

    A boundary directly after a complete command name is fine: the marker
    itself starts with a backslash, so the original name stays terminated.
    The bad sites are a boundary that bisects the name (the run of letters
    continues past it) and one right after a bare backslash.
    """
    i = offset
    while i > 0 and source[i - 1].isalpha():
        i -= 1
    if i > 0 and source[i - 1] == "\\":
        if offset < len(source) and source[offset].isalpha():
            raise SpliceError(
                f"span boundary at offset {offset} splits the command "
                f"\\{source[i:offset]}{source[offset]}..."
            )
        if i == offset:
            raise SpliceError(
                f"span boundary at offset {offset} splits an escape sequence"
            )


def _check_balanced(source: str, span: tuple[int, int]):
    depth = 0
    i = span[0]
    while i < span[1]:
        ch = source[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise SpliceError(
                    f"span [{span[0]}, {span[1]}) crosses a group boundary"
                )
        i += 1
    if depth != 0:
        raise SpliceError(f"span [{span[0]}, {span[1]}) crosses a group boundary")


def instrument_tex(
    source: str,
    batch: ColorBatch,
    spans: dict[str, tuple[int, int]],
    colors: list[tuple[int, int, int]],
) -> str:
    """Wrap each assigned span with color markers, splicing right to left."""
    edits = []
    for entity_id, color_idx in batch.assignments.items():
        span = spans[entity_id]
        if not (0 <= span[0] <= span[1] <= len(source)):
            raise SpliceError(f"span {span} outside the document")
        _check_balanced(source, span)
        _check_splice_site(source, span[0])
        _check_splice_site(source, span[1])
        edits.append((span, colors[color_idx]))
    out = source
    for (start, end), (r, g, b) in sorted(edits, key=lambda e: -e[0][0]):
        out = out[:end] + _CLOSE + out[end:]
        out = out[:start] + (_OPEN % (r, g, b)) + out[start:]
    return out


# --- render ----------------------------------------------------------------


def _run(cmd: list[str]) -> subprocess.CompletedProcess:
    return subprocess.run(cmd, capture_output=True, text=True)


def render_document(tex_path: Path, workdir: Path, config: LocateConfig) -> list[np.ndarray]:
    """Compile tex_path and rasterize the result; one array per page."""
    workdir.mkdir(parents=True, exist_ok=True)
    pdf_path = workdir / (tex_path.stem + ".pdf")
    cmd = [
        part.format(tex=str(tex_path), pdf=str(pdf_path), dpi=str(config.dpi))
        for part in config.compiler_cmd
    ]
    proc = _run(cmd)
    if proc.returncode != 0:
        log_path = pdf_path.with_suffix(".log")
        log = log_path.read_text() if log_path.exists() else proc.stderr
        tail = "\n".join(log.splitlines()[-20:])
        raise CompileError(f"compiler exited {proc.returncode}", log=tail)
    if not pdf_path.exists():
        raise CompileError("compiler exited 0 but produced no PDF")

    prefix = workdir / "page"
    cmd = [
        part.format(pdf=str(pdf_path), prefix=str(prefix), dpi=str(config.dpi))
        for part in config.rasterizer_cmd
    ]
    proc = _run(cmd)
    if proc.returncode != 0:
        raise RasterError(f"rasterizer exited {proc.returncode}: {proc.stderr.strip()}")
    pages = sorted(workdir.glob("page-*.png"))
    if not pages:
        raise RasterError("rasterizer produced no page images")
    return [np.asarray(Image.open(p).convert("RGB")) for p in pages]


# --- diff and boxes --------------------------------------------------------


def _pixel_box_to_fraction(pb, page: int, shape) -> Box:
    height, width = shape[0], shape[1]
    return Box(
        page=page,
        left=pb.left / width,
        top=pb.top / height,
        width=(pb.right - pb.left) / width,
        height=(pb.bottom - pb.top) / height,
    ).round(9)


def locate_batch(
    original: list[np.ndarray],
    colored: list[np.ndarray],
    batch: ColorBatch,
    colors: list[tuple[int, int, int]],
    tolerance: int = 8,
) -> dict[str, list[Box]]:
    if len(original) != len(colored):
        raise PageMismatchError(
            f"instrumentation changed pagination: {len(original)} vs {len(colored)} pages"
        )
    for a, b in zip(original, colored):
        if a.shape != b.shape:
            raise PageMismatchError("page dimensions differ between renders")

    found: dict[str, list[Box]] = {eid: [] for eid in batch.assignments}
    assigned = list(batch.assignments.items())  # (entity id, color index)
    targets = np.array([colors[c] for _, c in assigned], dtype=np.int16)

    for page_no, (orig, inst) in enumerate(zip(original, colored)):
        changed = (orig != inst).any(axis=2)
        if not changed.any():
            continue
        ys, xs = np.nonzero(changed)
        pixels = inst[ys, xs].astype(np.int16)  # K x 3
        # per-channel Chebyshev distance to every assigned color
        dist = np.abs(pixels[:, None, :] - targets[None, :, :]).max(axis=2)
        nearest = dist.argmin(axis=1)
        ok = dist[np.arange(len(pixels)), nearest] <= tolerance
        for t_idx, (entity_id, _) in enumerate(assigned):
            chosen = ok & (nearest == t_idx)
            if not chosen.any():
                continue
            mask = np.zeros(changed.shape, dtype=bool)
            mask[ys[chosen], xs[chosen]] = True
            for pb in detect_blobs(mask):
                found[entity_id].append(_pixel_box_to_fraction(pb, page_no, orig.shape))
    for boxes in found.values():
        boxes.sort(key=lambda b: (b.page, b.top, b.left))
    return found


def compose_bounding_boxes(symbol, child_boxes: dict[str, list[Box]]) -> list[Box]:
    """Union the children's boxes, one box per page/line group."""
    gathered: list[Box] = []
    for child_id in symbol.children:
        boxes = child_boxes.get(child_id)
        if not boxes:
            raise MissingChildError(
                f"{symbol.id}: child {child_id} has no localized boxes"
            )
        gathered.extend(boxes)
    return merge_into_line_boxes(gathered)


# --- batch driver ----------------------------------------------------------


@dataclass
class LocateReport:
    boxes: dict[str, list[Box]] = field(default_factory=dict)
    misses: list[str] = field(default_factory=list)
    compile_count: int = 0
    warnings: list[str] = field(default_factory=list)
    page_count: int = 0


def _render_batch(
    source: str,
    batch: ColorBatch,
    spans: dict[str, tuple[int, int]],
    colors: list[tuple[int, int, int]],
    original: list[np.ndarray],
    scratch_root: Path,
    config: LocateConfig,
) -> tuple[dict[str, list[Box]], int]:
    scratch = scratch_root / f"batch-{batch.batch_index:03d}-{len(batch.assignments)}"
    scratch.mkdir(parents=True, exist_ok=True)
    tex_path = scratch / "instrumented.tex"
    tex_path.write_text(instrument_tex(source, batch, spans, colors))
    pages = render_document(tex_path, scratch, config)
    boxes = locate_batch(original, pages, batch, colors, config.color_tolerance)
    return boxes, 1


def _split_batch(batch: ColorBatch) -> list[ColorBatch]:
    items = list(batch.assignments.items())
    mid = len(items) // 2
    halves = [items[:mid], items[mid:]]
    return [
        ColorBatch(batch_index=batch.batch_index * 100 + i + 1, assignments=dict(h))
        for i, h in enumerate(halves)
        if h
    ]


def locate_targets(
    source: str,
    targets: list[ColorTarget],
    config: LocateConfig,
    workdir: Path | None = None,
) -> LocateReport:
    """Full localization: render the original once, then diff every batch."""
    report = LocateReport()
    if not targets:
        return report

    own_tmp = workdir is None
    root = Path(tempfile.mkdtemp(prefix="papergloss-")) if own_tmp else Path(workdir)
    try:
        root.mkdir(parents=True, exist_ok=True)
        original_tex = root / "original.tex"
        original_tex.write_text(source)
        original = render_document(original_tex, root / "original", config)
        report.compile_count += 1
        report.page_count = len(original)

        spans = {t.id: t.span for t in targets}
        colors = palette(config.color_capacity)
        batches = plan_color_batches(targets, config.color_capacity)

        def run_with_retry(batch: ColorBatch) -> tuple[dict[str, list[Box]], int]:
            try:
                return _render_batch(
                    source, batch, spans, colors, original, root, config
                )
            except (CompileError, RasterError, PageMismatchError) as exc:
                report.warnings.append(
                    f"batch {batch.batch_index} failed ({exc}); splitting"
                )
            merged: dict[str, list[Box]] = {}
            compiles = 1  # the failed attempt still ran the compiler
            for half in _split_batch(batch):
                try:
                    boxes, n = _render_batch(
                        source, half, spans, colors, original, root, config
                    )
                    merged.update(boxes)
                    compiles += n
                except (CompileError, RasterError, PageMismatchError) as exc:
                    compiles += 1
                    report.warnings.append(
                        f"batch {half.batch_index} failed after split ({exc}); "
                        f"recording misses"
                    )
                    merged.update({eid: [] for eid in half.assignments})
            return merged, compiles

        with ThreadPoolExecutor(max_workers=config.worker_limit) as pool:
            for boxes, compiles in pool.map(run_with_retry, batches):
                # blob boxes are glyph-grained; an entity's published boxes
                # are one union per page/line group
                for eid, blob_boxes in boxes.items():
                    report.boxes[eid] = (
                        merge_into_line_boxes(blob_boxes) if blob_boxes else []
                    )
                report.compile_count += compiles

        report.misses = sorted(
            eid for eid, boxes in report.boxes.items() if not boxes
        )
        return report
    finally:
        if own_tmp:
            shutil.rmtree(root, ignore_errors=True)
