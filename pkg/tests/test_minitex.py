"""The bundled typesetter: layout, PDF round-trip, raster geometry, CLI."""

import subprocess
import sys

import numpy as np
import pytest

from papergloss.blobs import detect_blobs
from papergloss.minitex import (
    MinitexError,
    compile_tex,
    rasterize_pdf,
    write_pdf,
    write_pages,
)
from papergloss.minitex.layout import (
    CONTENT_W,
    LINE_H,
    MARGIN,
    PAGE_H,
    PAGE_W,
)

DOC = r"""\documentclass{article}
\title{A Tiny Paper}
\begin{document}
\maketitle
\section{Intro}
We use $k$ clusters with weight $\alpha_i^2$ and \textbf{bold} text.

\begin{equation}
\hat{p}(y_i|x) = \mathrm{softmax}(W v)
\end{equation}
Cost is \$5, roughly.
\end{document}
"""


def test_compile_smoke():
    result = compile_tex(DOC)
    assert result.pages == 1
    assert len(result.inks) > 20
    for ink in result.inks:
        assert 0 <= ink.src < len(DOC)
        assert MARGIN <= ink.x and ink.x + ink.w <= PAGE_W - MARGIN + 1e-9
        assert 0 <= ink.y and ink.y + ink.h <= PAGE_H


def test_compile_is_deterministic():
    assert write_pdf(compile_tex(DOC)) == write_pdf(compile_tex(DOC))


def test_newpage_paginates():
    doc = "\\begin{document}one\\newpage two\\end{document}"
    result = compile_tex(doc)
    assert result.pages == 2
    assert {ink.page for ink in result.inks} == {0, 1}
    pages = rasterize_pdf(write_pdf(result))
    assert len(pages) == 2
    assert pages[0].shape == pages[1].shape == (1650, 1275, 3)


def test_long_paragraph_wraps():
    words = " ".join(["word"] * 40)  # 40*5*6pt >> one 468pt line
    result = compile_tex(f"\\begin{{document}}{words}\\end{{document}}")
    lines = {ink.line for ink in result.inks}
    assert len(lines) > 1
    for ink in result.inks:
        assert ink.x + ink.w <= MARGIN + CONTENT_W + 1e-9


def test_display_math_gets_its_own_centered_line():
    doc = "\\begin{document}before \\begin{equation}x = y\\end{equation} after\\end{document}"
    result = compile_tex(doc)
    eq_offset = doc.index("x = y")
    eq_lines = {i.line for i in result.inks if eq_offset <= i.src < eq_offset + 5}
    other_lines = {i.line for i in result.inks if not (eq_offset <= i.src < eq_offset + 5)}
    assert len(eq_lines) == 1
    assert eq_lines.isdisjoint(other_lines)
    xs = [i.x for i in result.inks if i.line in eq_lines]
    assert min(xs) > MARGIN + 100  # centered, not flush left


def test_scripts_shift_and_shrink():
    result = compile_tex("\\begin{document}$x_i^2$\\end{document}")
    base = [i for i in result.inks if i.w == 4.0]
    small = [i for i in result.inks if i.w < 4.0]
    assert base and small
    base_bottom = max(i.y + i.h for i in base)
    assert any(i.y + i.h > base_bottom for i in small)  # a subscript descends
    assert any(i.y < min(b.y for b in base) for i in small)  # a superscript rises


def test_accent_mark_sits_above_base():
    result = compile_tex("\\begin{document}$\\hat{p}$\\end{document}")
    assert len(result.inks) == 2
    mark = min(result.inks, key=lambda i: i.h)
    base = max(result.inks, key=lambda i: i.h)
    assert mark.y + mark.h < base.y
    assert mark.x <= base.x and base.x + base.w <= mark.x + mark.w + 1e-9


def test_letter_i_renders_as_two_blobs():
    doc = "\\begin{document}$\\pgc{200}{10}{10}i\\pge$\\end{document}"
    page = rasterize_pdf(write_pdf(compile_tex(doc)))[0]
    mask = np.all(page == (200, 10, 10), axis=2)
    assert len(detect_blobs(mask)) == 2


def test_color_markers_do_not_move_ink():
    plain = "\\begin{document}We use $x_i$ in $f(2)$ often.\\end{document}"
    colored = (
        "\\begin{document}\\pgc{9}{99}{199}We use $x_\\pgc{255}{0}{0}i\\pge$ "
        "in $f(2)$ often.\\pge\\end{document}"
    )
    a, b = compile_tex(plain), compile_tex(colored)
    assert a.pages == b.pages
    geom = lambda r: sorted((i.page, i.x, i.y, i.w, i.h) for i in r.inks)
    assert geom(a) == geom(b)


def test_diff_pixels_are_exactly_the_colored_ink():
    plain = "\\begin{document}alpha $k$ beta\\end{document}"
    colored = "\\begin{document}alpha $\\pgc{10}{200}{30}k\\pge$ beta\\end{document}"
    pa = rasterize_pdf(write_pdf(compile_tex(plain)))[0]
    pb = rasterize_pdf(write_pdf(compile_tex(colored)))[0]
    changed = (pa != pb).any(axis=2)
    target = np.all(pb == (10, 200, 30), axis=2)
    assert changed.sum() > 0
    assert (changed == target).all()


def test_raster_pixel_alignment():
    # one known rect: glyph "a" alone; ink x in [73, 77)pt on the first line
    result = compile_tex("\\begin{document}a\\end{document}")
    assert len(result.inks) == 1
    ink = result.inks[0]
    page = rasterize_pdf(write_pdf(result), dpi=150)[0]
    ys, xs = np.nonzero((page != 255).any(axis=2))
    s = 150 / 72.0
    assert xs.min() == round(ink.x * s)
    assert xs.max() == round((ink.x + ink.w) * s) - 1
    assert ys.min() == round(ink.y * s)
    assert ys.max() == round((ink.y + ink.h) * s) - 1


def test_unknown_command_raises():
    with pytest.raises(MinitexError, match="frobnicate"):
        compile_tex("\\begin{document}\\frobnicate\\end{document}")


def test_unknown_environment_raises():
    with pytest.raises(MinitexError, match="tabular"):
        compile_tex("\\begin{document}\\begin{tabular}x\\end{tabular}\\end{document}")


def test_cli_compile_and_raster(tmp_path):
    tex = tmp_path / "doc.tex"
    tex.write_text(DOC)
    pdf = tmp_path / "doc.pdf"
    r = subprocess.run(
        [sys.executable, "-m", "papergloss.minitex", "compile", str(tex), "-o", str(pdf)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert pdf.read_bytes().startswith(b"%PDF-1.4")
    assert (tmp_path / "doc.log").exists()

    r = subprocess.run(
        [
            sys.executable, "-m", "papergloss.minitex", "raster",
            str(pdf), "-o", str(tmp_path / "page"), "--dpi", "96",
        ],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "page-1.png").exists()


def test_cli_compile_failure_writes_log(tmp_path):
    tex = tmp_path / "bad.tex"
    tex.write_text("\\begin{document}\\nosuchthing\\end{document}")
    r = subprocess.run(
        [sys.executable, "-m", "papergloss.minitex", "compile", str(tex), "-o",
         str(tmp_path / "bad.pdf")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 1
    assert "nosuchthing" in r.stderr
    assert "nosuchthing" in (tmp_path / "bad.log").read_text()
    assert not (tmp_path / "bad.pdf").exists()


def test_write_pages_zero_pads(tmp_path):
    doc = "\\begin{document}" + "x\\newpage " * 11 + "y\\end{document}"
    pages = rasterize_pdf(write_pdf(compile_tex(doc)), dpi=30)
    assert len(pages) == 12
    paths = write_pages(pages, tmp_path / "pg")
    assert paths[0].name == "pg-01.png"
    assert paths[-1].name == "pg-12.png"
