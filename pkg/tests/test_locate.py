"""Batching, instrumentation, rendering, diffing, box composition."""

import math
from pathlib import Path

import numpy as np
import pytest

from papergloss.config import LocateConfig
from papergloss.geometry import Box
from papergloss.locate import (
    CapacityError,
    ColorBatch,
    ColorTarget,
    CompileError,
    MissingChildError,
    PageMismatchError,
    RasterError,
    SpliceError,
    compose_bounding_boxes,
    instrument_tex,
    locate_batch,
    locate_targets,
    palette,
    plan_color_batches,
    render_document,
)
from papergloss.minitex.oracle import span_boxes


# --- batching --------------------------------------------------------------


def flat_targets(n):
    return [ColorTarget(id=f"t{k}", span=(10 * k, 10 * k + 5)) for k in range(n)]


@pytest.mark.parametrize("n", [1, 99, 100, 101, 250])
def test_flat_batching_matches_ceiling(n):
    batches = plan_color_batches(flat_targets(n), 100)
    assert len(batches) == math.ceil(n / 100)
    seen = set()
    for batch in batches:
        assert len(batch.assignments) <= 100
        colors = list(batch.assignments.values())
        assert len(colors) == len(set(colors))
        seen |= set(batch.assignments)
    assert len(seen) == n


def test_nested_pair_needs_two_batches():
    equation = ColorTarget(id="eq", span=(0, 10))
    symbol = ColorTarget(id="sym", span=(3, 5))
    batches = plan_color_batches([equation, symbol], 1)
    assert len(batches) == 2
    batches = plan_color_batches([equation, symbol], 100)
    assert len(batches) == 2  # capacity does not help nesting


def test_siblings_share_a_batch_under_their_parent():
    eq = ColorTarget(id="eq", span=(0, 20))
    a = ColorTarget(id="a", span=(2, 5))
    b = ColorTarget(id="b", span=(8, 11))
    batches = plan_color_batches([eq, a, b], 100)
    assert len(batches) == 2
    sizes = sorted(len(b.assignments) for b in batches)
    assert sizes == [1, 2]


def test_capacity_error():
    with pytest.raises(CapacityError):
        plan_color_batches(flat_targets(3), 0)


def test_batching_is_deterministic():
    targets = flat_targets(7)[::-1]
    a = plan_color_batches(targets, 3)
    b = plan_color_batches(list(targets), 3)
    assert [x.assignments for x in a] == [x.assignments for x in b]


# --- palette ---------------------------------------------------------------


def test_palette_colors_are_distinct_and_saturated():
    colors = palette(100)
    assert len(set(colors)) == 100
    assert (255, 255, 255) not in colors
    assert (0, 0, 0) not in colors
    for r, g, b in colors:
        assert max(r, g, b) == 255  # full value
        assert min(r, g, b) == 0  # full saturation


def test_palette_neighbors_resolve_unambiguously():
    # exact pixels must always be strictly nearest to their own color
    colors = palette(100)
    arr = np.array(colors, dtype=np.int16)
    for i, c in enumerate(arr):
        dist = np.abs(arr - c).max(axis=1)
        dist[i] = 10_000
        assert dist.min() > 0


# --- instrumentation -------------------------------------------------------

COLORS = palette(100)


def test_instrument_wraps_span():
    batch = ColorBatch(batch_index=0, assignments={"e": 7})
    out = instrument_tex("a $x$ b", batch, {"e": (2, 5)}, COLORS)
    r, g, b = COLORS[7]
    assert out == f"a \\pgc{{{r}}}{{{g}}}{{{b}}}$x$\\pge{{}} b"


def test_instrument_empty_batch_is_identity():
    batch = ColorBatch(batch_index=0, assignments={})
    assert instrument_tex("anything", batch, {}, COLORS) == "anything"


def test_instrument_two_disjoint_spans_right_to_left():
    source = "one two three"
    batch = ColorBatch(batch_index=0, assignments={"a": 0, "b": 1})
    out = instrument_tex(source, batch, {"a": (0, 3), "b": (8, 13)}, COLORS)
    stripped = out
    for marker in ("\\pge{}",):
        stripped = stripped.replace(marker, "")
    import re

    stripped = re.sub(r"\\pgc\{\d+\}\{\d+\}\{\d+\}", "", stripped)
    assert stripped == source
    assert out.index("three") > out.index("two")


def test_splice_error_on_group_crossing():
    batch = ColorBatch(batch_index=0, assignments={"e": 0})
    with pytest.raises(SpliceError):
        instrument_tex("{ab}cd", batch, {"e": (2, 6)}, COLORS)


def test_splice_error_inside_command_word():
    batch = ColorBatch(batch_index=0, assignments={"e": 0})
    with pytest.raises(SpliceError):
        instrument_tex("\\alpha", batch, {"e": (3, 6)}, COLORS)


# --- render_document -------------------------------------------------------


def test_render_document_page_count(tmp_path):
    tex = tmp_path / "doc.tex"
    tex.write_text("\\begin{document}one\\newpage two\\end{document}")
    pages = render_document(tex, tmp_path / "work", LocateConfig())
    assert len(pages) == 2
    assert pages[0].shape == pages[1].shape


def test_render_document_compile_error_carries_log(tmp_path):
    tex = tmp_path / "doc.tex"
    tex.write_text("\\begin{document}\\explode\\end{document}")
    with pytest.raises(CompileError) as err:
        render_document(tex, tmp_path / "work", LocateConfig())
    assert "explode" in err.value.log


def test_render_document_raster_error(tmp_path):
    tex = tmp_path / "doc.tex"
    tex.write_text("\\begin{document}x\\end{document}")
    import sys

    config = LocateConfig(
        rasterizer_cmd=(sys.executable, "-c", "import sys; sys.exit(3)")
    )
    with pytest.raises(RasterError):
        render_document(tex, tmp_path / "work", config)


# --- locate_batch ----------------------------------------------------------


def white(h=40, w=60):
    return np.full((h, w, 3), 255, dtype=np.uint8)


def test_locate_batch_finds_colored_pixels():
    orig, inst = white(), white()
    inst[10:14, 20:30] = COLORS[5]
    batch = ColorBatch(batch_index=0, assignments={"e": 5})
    found = locate_batch([orig], [inst], batch, COLORS)
    assert len(found["e"]) == 1
    box = found["e"][0]
    assert box.page == 0
    assert box.left == pytest.approx(20 / 60)
    assert box.top == pytest.approx(10 / 40)
    assert box.width == pytest.approx(10 / 60)
    assert box.height == pytest.approx(4 / 40)


def test_locate_batch_tolerance_window():
    orig, inst = white(), white()
    r, g, b = COLORS[0]
    inst[5, 5] = (max(0, r - 8), g, min(255, b + 8))  # inside tolerance
    inst[20, 20] = (max(0, r - 40), g, b)  # outside tolerance
    batch = ColorBatch(batch_index=0, assignments={"e": 0})
    found = locate_batch([orig], [inst], batch, COLORS, tolerance=8)
    assert len(found["e"]) == 1
    assert found["e"][0].top == pytest.approx(5 / 40)


def test_locate_batch_absent_color_is_a_miss():
    batch = ColorBatch(batch_index=0, assignments={"ghost": 3})
    found = locate_batch([white()], [white()], batch, COLORS)
    assert found["ghost"] == []


def test_locate_batch_page_mismatch():
    batch = ColorBatch(batch_index=0, assignments={"e": 0})
    with pytest.raises(PageMismatchError):
        locate_batch([white()], [white(), white()], batch, COLORS)
    with pytest.raises(PageMismatchError):
        locate_batch([white(40, 60)], [white(40, 61)], batch, COLORS)


def test_locate_batch_multi_page_and_disjoint():
    orig = [white(), white()]
    inst = [white(), white()]
    inst[1][2:6, 2:6] = COLORS[1]
    inst[1][20:24, 30:34] = COLORS[1]
    batch = ColorBatch(batch_index=0, assignments={"e": 1})
    found = locate_batch(orig, inst, batch, COLORS)
    assert len(found["e"]) == 2
    assert all(b.page == 1 for b in found["e"])
    b1, b2 = found["e"]
    assert b1.bottom <= b2.top or b2.bottom <= b1.top or \
        b1.right <= b2.left or b2.right <= b1.left


# --- compose ---------------------------------------------------------------


class FakeSymbol:
    def __init__(self, id, children):
        self.id = id
        self.children = children


def test_compose_single_child_identity():
    child = Box(page=0, left=0.1, top=0.2, width=0.05, height=0.02)
    out = compose_bounding_boxes(FakeSymbol("s", ["c"]), {"c": [child]})
    assert out == [child]


def test_compose_same_line_union():
    a = Box(page=0, left=0.10, top=0.20, width=0.02, height=0.02)
    b = Box(page=0, left=0.15, top=0.21, width=0.02, height=0.02)
    out = compose_bounding_boxes(FakeSymbol("s", ["x", "i"]), {"x": [a], "i": [b]})
    assert len(out) == 1
    assert out[0].left == pytest.approx(0.10)
    assert out[0].right == pytest.approx(0.17)
    assert out[0].top == pytest.approx(0.20)
    assert out[0].bottom == pytest.approx(0.23)


def test_compose_line_break_gives_box_per_line():
    a = Box(page=0, left=0.7, top=0.20, width=0.02, height=0.02)
    b = Box(page=0, left=0.1, top=0.30, width=0.02, height=0.02)
    out = compose_bounding_boxes(FakeSymbol("s", ["x", "i"]), {"x": [a], "i": [b]})
    assert len(out) == 2


def test_compose_missing_child():
    with pytest.raises(MissingChildError):
        compose_bounding_boxes(FakeSymbol("s", ["x"]), {"x": []})
    with pytest.raises(MissingChildError):
        compose_bounding_boxes(FakeSymbol("s", ["x"]), {})


# --- end-to-end ------------------------------------------------------------

DOC = """\\begin{document}
We use $k$ clusters and the estimate $x_i$ for every item in the set.
A second sentence mentions $k$ once more before the paragraph closes.
\\end{document}
"""


def test_locate_targets_end_to_end(tmp_path):
    k1 = DOC.index("$k$")
    xi = DOC.index("$x_i$")
    sent = DOC.index("We use")
    sent_end = DOC.index("set.") + 4
    targets = [
        ColorTarget(id="eq-k", span=(k1, k1 + 3)),
        ColorTarget(id="eq-xi", span=(xi, xi + 5)),
        ColorTarget(id="sentence", span=(sent, sent_end)),
    ]
    config = LocateConfig(worker_limit=2)
    report = locate_targets(DOC, targets, config, workdir=tmp_path / "loc")
    assert report.misses == []
    # nesting forces the sentence apart from the two equations inside it
    assert report.compile_count == 3

    truth = span_boxes(DOC, {t.id: t.span for t in targets})
    for t in targets:
        got, want = report.boxes[t.id], truth[t.id]
        assert len(got) == len(want), t.id
        for gb, wb in zip(got, want):
            assert gb.page == wb.page
            for attr in ("left", "top", "right", "bottom"):
                delta_px = abs(getattr(gb, attr) - getattr(wb, attr)) * (
                    1275 if attr in ("left", "right") else 1650
                )
                assert delta_px <= 2, (t.id, attr, delta_px)


def test_locate_targets_is_deterministic(tmp_path):
    k1 = DOC.index("$k$")
    targets = [ColorTarget(id="eq", span=(k1, k1 + 3))]
    config = LocateConfig()
    r1 = locate_targets(DOC, targets, config, workdir=tmp_path / "a")
    r2 = locate_targets(DOC, targets, config, workdir=tmp_path / "b")
    assert r1.boxes == r2.boxes
