"""Layout engine: TeX-subset source to absolutely positioned ink rectangles.

Two phases.  The scanner walks the document once and emits a flat event
stream (words, glue, paragraph/line/page breaks, display rows); the placer
pours the events into 12pt line slots on 612x792pt pages with 72pt margins.
Every ink rectangle remembers the source offset of the character that
produced it, which is what makes the engine usable as a geometry oracle.

Math runs are laid out linearly on the same grid: scripts drop to 0.6 scale
with small baseline shifts, accents draw a mark bar above their base, and
fractions linearize to "a/b".  An inline formula is one unbreakable box;
display math gets centered slots of its own, one per alignment row.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..mathparse import (
    ACCENT_COMMANDS,
    GREEK_AND_SYMBOL_COMMANDS,
    OPERATOR_COMMANDS,
    STYLE_COMMANDS,
)
from .glyphs import ADVANCE, glyph_ink

PAGE_W, PAGE_H = 612.0, 792.0
MARGIN = 72.0
CONTENT_W = PAGE_W - 2 * MARGIN
LINE_H = 12.0
BASELINE_DROP = 9.0
LINES_PER_PAGE = int((PAGE_H - 2 * MARGIN) // LINE_H)
SCRIPT_SCALE = 0.6
SUB_DROP = 2.0
SUP_RISE = 3.8

BLACK = (0, 0, 0)


class MinitexError(Exception):
    def __init__(self, message: str, offset: int = -1):
        if offset >= 0:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class InkRect:
    page: int
    x: float
    y: float  # top edge, measured from the page top
    w: float
    h: float
    color: tuple[int, int, int]
    src: int  # source offset of the originating character
    line: int  # running line slot id, unique across the document


@dataclass
class LayoutResult:
    inks: list[InkRect]
    pages: int


MATH_ENVS = {
    "equation", "equation*", "align", "align*", "gather", "gather*",
    "multline", "multline*",
}
_SKIP_NO_ARG = {
    "noindent", "centering", "appendix", "tableofcontents", "smallskip",
    "indent", "raggedright", "par",
}
_SKIP_ONE_ARG = {
    "cite", "citep", "citet", "citealp", "citeauthor", "ref", "eqref",
    "autoref", "cref", "Cref", "label", "footnote", "author", "date",
    "thanks", "usepackage", "documentclass", "bibliographystyle",
    "bibliography",
}
_UNWRAP = {
    "textbf", "textit", "texttt", "textsc", "textrm", "emph", "mbox",
    "text", "underline",
}
_HEADINGS = {"section", "subsection", "subsubsection", "paragraph"}
_MATH_SPACING = {",": 2.0, ";": 3.0, "!": 0.0, ":": 2.5}
_MATH_SKIP = {"left", "right", "limits", "nolimits", "displaystyle",
              "textstyle", "thinspace", "negthinspace", "big", "Big",
              "bigl", "bigr", "Bigl", "Bigr"}

_CMD_RE = re.compile(r"\\([a-zA-Z]+)")

# Scanner events:
#   ("word", rects, width)      rects relative to word origin at baseline 0
#   ("space", width)
#   ("par",) ("newline",) ("page",)
#   ("row", rects, width)       a centered display line
Rect = tuple[float, float, float, float, tuple[int, int, int], int]


def _find_balanced(src: str, open_idx: int) -> int:
    """Index just past the } matching the { at open_idx."""
    depth = 0
    i = open_idx
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    raise MinitexError("unclosed group", open_idx)


class _Scanner:
    def __init__(self, source: str):
        self.src = source
        self.events: list[tuple] = []
        self.colors: list[tuple[int, int, int]] = []
        self.title_range: tuple[int, int] | None = None
        # current word under assembly
        self._rects: list[Rect] = []
        self._width = 0.0
        self._started = False

    def color(self) -> tuple[int, int, int]:
        return self.colors[-1] if self.colors else BLACK

    # -- word assembly ----------------------------------------------------

    def _flush_word(self):
        if self._started:
            self.events.append(("word", self._rects, self._width))
        self._rects, self._width, self._started = [], 0.0, False

    def _emit_glyph(self, ch: str, src_off: int, scale: float = 1.0):
        for gx0, gt, gx1, gb in glyph_ink(ch):
            self._rects.append(
                (self._width + gx0 * scale, gt * scale,
                 self._width + gx1 * scale, gb * scale, self.color(), src_off)
            )
        self._width += ADVANCE * scale
        self._started = True

    def _emit_bundle(self, rects: list[Rect], width: float):
        for x0, t, x1, b, col, off in rects:
            self._rects.append((self._width + x0, t, self._width + x1, b, col, off))
        self._width += width
        self._started = True

    def _space(self):
        self._flush_word()
        self.events.append(("space", ADVANCE))

    # -- top-level scan ---------------------------------------------------

    def scan(self):
        src = self.src
        begin = re.search(r"\\begin\{document\}", src)
        if begin:
            self._scan_preamble(0, begin.start())
            end = re.search(r"\\end\{document\}", src)
            stop = end.start() if end else len(src)
            self.scan_text(begin.end(), stop)
        else:
            self.scan_text(0, len(src))
        self._flush_word()

    def _scan_preamble(self, s: int, e: int):
        for m in re.finditer(r"\\title\{", self.src[s:e]):
            open_idx = s + m.end() - 1
            close = _find_balanced(self.src, open_idx)
            self.title_range = (open_idx + 1, close - 1)

    def scan_text(self, s: int, e: int):
        src = self.src
        i = s
        while i < e:
            ch = src[i]
            if ch in " \t":
                self._space()
                i += 1
                continue
            if ch == "\n":
                j = i
                newlines = 0
                while j < e and src[j] in " \t\n":
                    if src[j] == "\n":
                        newlines += 1
                    j += 1
                self._flush_word()
                self.events.append(("par",) if newlines >= 2 else ("space", ADVANCE))
                i = j
                continue
            if ch in "{}":
                i += 1
                continue
            if ch == "%":
                j = src.find("\n", i)
                i = e if j < 0 or j > e else j
                continue
            if ch == "~":
                self._space()
                i += 1
                continue
            if ch == "$":
                i = self._scan_dollar(i, e)
                continue
            if ch == "\\":
                i = self._scan_command(i, e)
                continue
            self._emit_glyph(ch, i)
            i += 1
        self._flush_word()

    def _scan_dollar(self, i: int, e: int) -> int:
        src = self.src
        display = src.startswith("$$", i)
        opener = "$$" if display else "$"
        body_s = i + len(opener)
        j = body_s
        while True:
            j = src.find("$", j)
            if j < 0 or j >= e:
                raise MinitexError("math never closed", i)
            if src[j - 1] == "\\":
                j += 1
                continue
            break
        body_e = j
        if display and not src.startswith("$$", j):
            raise MinitexError("$$ never closed", i)
        if display:
            self._emit_display(body_s, body_e)
        else:
            rects, width = self._math(body_s, body_e, 1.0, 0.0)
            self._emit_bundle(rects, width)
        return body_e + len(opener)

    def _emit_display(self, s: int, e: int):
        self._flush_word()
        for row_s, row_e in self._split_rows(s, e):
            rects, width = self._math(row_s, row_e, 1.0, 0.0)
            self.events.append(("row", rects, width))

    def _split_rows(self, s: int, e: int):
        rows = []
        depth = 0
        i = start = s
        while i < e:
            ch = self.src[i]
            if ch == "\\" and self.src.startswith("\\\\", i) and depth == 0:
                rows.append((start, i))
                i += 2
                if i < e and self.src[i] == "[":
                    close = self.src.find("]", i)
                    if 0 <= close < e:
                        i = close + 1
                start = i
                continue
            if ch == "\\":
                i += 2
                continue
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            i += 1
        rows.append((start, e))
        return [(a, b) for a, b in rows if self.src[a:b].strip()]

    def _scan_command(self, i: int, e: int) -> int:
        src = self.src
        nxt = src[i + 1] if i + 1 < e else ""
        if nxt == "\\":
            self._flush_word()
            self.events.append(("newline",))
            j = i + 2
            if j < e and src[j] == "[":
                close = src.find("]", j)
                if 0 <= close < e:
                    j = close + 1
            return j
        if nxt in "%$&#_{} ":
            self._emit_glyph(nxt, i)
            return i + 2
        if nxt == "(":
            close = src.find("\\)", i + 2)
            if close < 0 or close > e:
                raise MinitexError("\\( never closed", i)
            rects, width = self._math(i + 2, close, 1.0, 0.0)
            self._emit_bundle(rects, width)
            return close + 2
        if nxt == "[":
            close = src.find("\\]", i + 2)
            if close < 0 or close > e:
                raise MinitexError("\\[ never closed", i)
            self._emit_display(i + 2, close)
            return close + 2
        m = _CMD_RE.match(src, i)
        if not m:
            raise MinitexError("stray backslash", i)
        name = m.group(1)
        j = m.end()
        if name == "pgc":
            rgb, j = self._color_args(j)
            self.colors.append(rgb)
            return j
        if name == "pge":
            if self.colors:
                self.colors.pop()
            return j
        if name == "begin":
            return self._scan_begin(i, j, e)
        if name == "end":
            close = _find_balanced(src, j)
            return close
        if name in _HEADINGS or name == "maketitle" or name == "title":
            return self._scan_structural(name, i, j)
        if name in _UNWRAP:
            return j  # the following braces are scanned transparently
        if name in _SKIP_ONE_ARG:
            j = self._skip_opt(j)
            if j < len(src) and src[j] == "{":
                j = _find_balanced(src, j)
            return j
        if name in _SKIP_NO_ARG:
            if name == "par":
                self._flush_word()
                self.events.append(("par",))
            return j
        if name in ("newpage", "clearpage"):
            self._flush_word()
            self.events.append(("page",))
            return j
        if name in ("bigskip", "medskip"):
            self._flush_word()
            self.events.append(("par",))
            return j
        if name in ("newcommand", "renewcommand", "def", "DeclareMathOperator"):
            return self._skip_definition(j)
        raise MinitexError(f"unknown command \\{name}", i)

    def _color_args(self, j: int) -> tuple[tuple[int, int, int], int]:
        vals = []
        for _ in range(3):
            if self.src[j] != "{":
                raise MinitexError("\\pgc expects {r}{g}{b}", j)
            close = _find_balanced(self.src, j)
            vals.append(int(self.src[j + 1 : close - 1]))
            j = close
        return (vals[0], vals[1], vals[2]), j

    def _skip_opt(self, j: int) -> int:
        if j < len(self.src) and self.src[j] == "[":
            close = self.src.find("]", j)
            if close >= 0:
                return close + 1
        return j

    def _skip_definition(self, j: int) -> int:
        src = self.src
        if j < len(src) and src[j] == "\\":
            m = _CMD_RE.match(src, j)
            j = m.end() if m else j + 2
        elif j < len(src) and src[j] == "{":
            j = _find_balanced(src, j)
        j = self._skip_opt(j)
        if j < len(src) and src[j] == "{":
            j = _find_balanced(src, j)
        return j

    def _scan_begin(self, i: int, j: int, e: int) -> int:
        src = self.src
        close = _find_balanced(src, j)
        env = src[j + 1 : close - 1]
        if env in MATH_ENVS:
            end_marker = f"\\end{{{env}}}"
            stop = src.find(end_marker, close)
            if stop < 0 or stop > e:
                raise MinitexError(f"\\begin{{{env}}} never closed", i)
            self._emit_display(close, stop)
            return stop + len(end_marker)
        if env in ("abstract", "center", "document"):
            self._flush_word()
            self.events.append(("par",))
            return close
        raise MinitexError(f"unknown environment {env}", i)

    def _scan_structural(self, name: str, i: int, j: int) -> int:
        src = self.src
        if name == "maketitle":
            self._flush_word()
            self.events.append(("par",))
            if self.title_range:
                saved, self.events = self.events, []
                self.scan_text(*self.title_range)
                self._flush_word()
                inner, self.events = self.events, saved
                rects, width = _join_words(inner)
                self.events.append(("row", rects, width))
            self.events.append(("par",))
            return j
        if name == "title":
            close = _find_balanced(src, j)
            self.title_range = (j + 1, close - 1)
            return close
        j = self._skip_opt(j)  # starred forms never occur; optional arg might
        close = _find_balanced(src, j)
        self._flush_word()
        self.events.append(("par",))
        self.scan_text(j + 1, close - 1)
        self._flush_word()
        self.events.append(("par",))
        return close

    # -- math layout ------------------------------------------------------

    def _math(self, s: int, e: int, scale: float, shift: float):
        """Lay out src[s:e) linearly; returns (rects, width) at baseline 0."""
        src = self.src
        rects: list[Rect] = []
        cursor = 0.0
        last_atom: tuple[float, float] | None = None
        i = s

        def add_glyph(ch: str, off: int, at: float, sc: float, sh: float) -> float:
            for gx0, gt, gx1, gb in glyph_ink(ch):
                rects.append((at + gx0 * sc, sh + gt * sc,
                              at + gx1 * sc, sh + gb * sc, self.color(), off))
            return at + ADVANCE * sc

        def atom_bounds(start_len: int) -> tuple[float, float]:
            xs = [r[0] for r in rects[start_len:]] + [r[2] for r in rects[start_len:]]
            if not xs:
                return (cursor, cursor)
            return (min(xs), max(xs))

        while i < e:
            ch = src[i]
            if ch in " \t\n":
                i += 1
                continue
            if ch == "&":
                cursor += ADVANCE * scale
                last_atom = None
                i += 1
                continue
            if ch == "}":
                raise MinitexError("unbalanced } in math", i)
            if ch == "{":
                close = _find_balanced(src, i)
                mark = len(rects)
                inner, w = self._math(i + 1, close - 1, scale, shift)
                for x0, t, x1, b, col, off in inner:
                    rects.append((cursor + x0, t, cursor + x1, b, col, off))
                last_atom = (cursor, cursor + w) if w else atom_bounds(mark)
                cursor += w
                i = close
                continue
            if ch in "_^":
                i, cursor, last_atom = self._script(
                    src, i, e, rects, cursor, last_atom, scale, shift
                )
                continue
            if ch == "\\":
                i, cursor, last_atom = self._math_command(
                    src, i, e, rects, cursor, last_atom, scale, shift, add_glyph
                )
                continue
            start = cursor
            cursor = add_glyph(ch, i, cursor, scale, shift)
            last_atom = (start, cursor)
            i += 1

        width = cursor
        return rects, width

    def _parse_script_atom(self, src: str, i: int, e: int) -> tuple[int, int, int]:
        """Bounds of the atom following _ or ^: (start, end, next_i).

        Color markers between the script character and its atom are applied
        here and skipped, so instrumentation can wrap a bare script argument.
        """
        while True:
            while i < e and src[i] in " \t\n":
                i += 1
            m = _CMD_RE.match(src, i) if i < e and src[i] == "\\" else None
            if m and m.group(1) == "pgc":
                rgb, i = self._color_args(m.end())
                self.colors.append(rgb)
                continue
            if m and m.group(1) == "pge":
                if self.colors:
                    self.colors.pop()
                i = m.end()
                continue
            break
        if i >= e:
            raise MinitexError("dangling script", i)
        if src[i] == "{":
            close = _find_balanced(src, i)
            return i + 1, close - 1, close
        if src[i] == "\\":
            m = _CMD_RE.match(src, i)
            if m:
                if m.group(1) in ACCENT_COMMANDS or m.group(1) in STYLE_COMMANDS:
                    if m.end() < e and src[m.end()] == "{":
                        close = _find_balanced(src, m.end())
                        return i, close, close
                return i, m.end(), m.end()
            return i, i + 2, i + 2
        return i, i + 1, i + 1

    def _script(self, src, i, e, rects, cursor, last_atom, scale, shift):
        base_x0, base_x1 = last_atom if last_atom else (cursor, cursor)
        sub = sup = None
        while i < e and src[i] in "_^":
            kind = src[i]
            s0, s1, i = self._parse_script_atom(src, i + 1, e)
            if kind == "_":
                sub = (s0, s1)
            else:
                sup = (s0, s1)
        widths = [0.0]
        for bounds, dy in ((sub, SUB_DROP * scale), (sup, -SUP_RISE * scale)):
            if bounds is None:
                continue
            inner, w = self._math(bounds[0], bounds[1], scale * SCRIPT_SCALE, shift + dy)
            for x0, t, x1, b, col, off in inner:
                rects.append((base_x1 + x0, t, base_x1 + x1, b, col, off))
            widths.append(w)
        cursor = base_x1 + max(widths)
        return i, cursor, (base_x0, cursor)

    def _math_command(self, src, i, e, rects, cursor, last_atom, scale, shift, add_glyph):
        nxt = src[i + 1] if i + 1 < e else ""
        if nxt in "%$&#_{}|":
            start = cursor
            cursor = add_glyph(nxt, i, cursor, scale, shift)
            return i + 2, cursor, (start, cursor)
        if nxt == " ":
            return i + 2, cursor + ADVANCE * scale, last_atom
        if nxt == "\\":
            j = i + 2
            if j < e and src[j] == "[":
                close = src.find("]", j)
                if 0 <= close < e:
                    j = close + 1
            return j, cursor + ADVANCE * scale, None
        if nxt in _MATH_SPACING:
            return i + 2, cursor + _MATH_SPACING[nxt] * scale, last_atom
        m = _CMD_RE.match(src, i)
        if not m:
            raise MinitexError("stray backslash in math", i)
        name = m.group(1)
        j = m.end()
        if name == "pgc":
            rgb, j = self._color_args(j)
            self.colors.append(rgb)
            return j, cursor, last_atom
        if name == "pge":
            if self.colors:
                self.colors.pop()
            return j, cursor, last_atom
        if name in ("quad",):
            return j, cursor + 12.0 * scale, last_atom
        if name in ("qquad",):
            return j, cursor + 24.0 * scale, last_atom
        if name in _MATH_SKIP:
            return j, cursor, last_atom
        if name in ACCENT_COMMANDS:
            s0, s1, j = self._parse_script_atom(src, j, e)
            mark_src = i
            inner, w = self._math(s0, s1, scale, shift)
            xs = [r[0] for r in inner] + [r[2] for r in inner]
            for x0, t, x1, b, col, off in inner:
                rects.append((cursor + x0, t, cursor + x1, b, col, off))
            if xs:
                mx0, mx1 = cursor + min(xs), cursor + max(xs)
            else:
                mx0, mx1 = cursor, cursor + w
            rects.append((mx0, shift - 9.0 * scale, mx1, shift - 8.0 * scale,
                          self.color(), mark_src))
            start = cursor
            cursor += w
            return j, cursor, (start, cursor)
        if name in STYLE_COMMANDS:
            if j < e and src[j] == "{":
                close = _find_balanced(src, j)
                inner, w = self._math(j + 1, close - 1, scale, shift)
                for x0, t, x1, b, col, off in inner:
                    rects.append((cursor + x0, t, cursor + x1, b, col, off))
                start = cursor
                cursor += w
                return close, cursor, (start, cursor)
            return j, cursor, last_atom
        if name == "frac":
            if j >= e or src[j] != "{":
                raise MinitexError("\\frac expects {num}{den}", i)
            c1 = _find_balanced(src, j)
            if c1 >= e or src[c1] != "{":
                raise MinitexError("\\frac expects {num}{den}", i)
            c2 = _find_balanced(src, c1)
            start = cursor
            num, wn = self._math(j + 1, c1 - 1, scale, shift)
            for x0, t, x1, b, col, off in num:
                rects.append((cursor + x0, t, cursor + x1, b, col, off))
            cursor += wn
            cursor = add_glyph("/", i, cursor, scale, shift)
            den, wd = self._math(c1 + 1, c2 - 1, scale, shift)
            for x0, t, x1, b, col, off in den:
                rects.append((cursor + x0, t, cursor + x1, b, col, off))
            cursor += wd
            return c2, cursor, (start, cursor)
        if name == "sqrt":
            j = self._skip_opt(j)
            start = cursor
            cursor = add_glyph("\\", i, cursor, scale, shift)
            if j < e and src[j] == "{":
                close = _find_balanced(src, j)
                inner, w = self._math(j + 1, close - 1, scale, shift)
                for x0, t, x1, b, col, off in inner:
                    rects.append((cursor + x0, t, cursor + x1, b, col, off))
                cursor += w
                j = close
            return j, cursor, (start, cursor)
        if name in GREEK_AND_SYMBOL_COMMANDS or name in OPERATOR_COMMANDS:
            start = cursor
            cursor = add_glyph("\\", i, cursor, scale, shift)
            return j, cursor, (start, cursor)
        raise MinitexError(f"unknown command \\{name} in math", i)


def _join_words(events: list[tuple]) -> tuple[list[Rect], float]:
    """Concatenate word events into a single bundle, spaces between."""
    rects: list[Rect] = []
    width = 0.0
    for ev in events:
        if ev[0] == "word":
            for x0, t, x1, b, col, off in ev[1]:
                rects.append((width + x0, t, width + x1, b, col, off))
            width += ev[2]
        elif ev[0] == "space":
            if width:
                width += ev[1]
    return rects, width


class _Placer:
    def __init__(self):
        self.inks: list[InkRect] = []
        self.page = 0
        self.line = 0
        self.x = 0.0
        self.line_used = False
        self.line_id = 0

    def _newline(self):
        self.line += 1
        self.line_id += 1
        self.x = 0.0
        self.line_used = False
        if self.line >= LINES_PER_PAGE:
            self.page += 1
            self.line = 0

    def _emit(self, rects: list[Rect], origin_x: float):
        baseline = MARGIN + self.line * LINE_H + BASELINE_DROP
        for x0, t, x1, b, col, off in rects:
            self.inks.append(
                InkRect(
                    page=self.page,
                    x=origin_x + x0,
                    y=baseline + t,
                    w=x1 - x0,
                    h=b - t,
                    color=col,
                    src=off,
                    line=self.line_id,
                )
            )

    def place(self, events: list[tuple]) -> LayoutResult:
        for ev in events:
            kind = ev[0]
            if kind == "word":
                _, rects, width = ev
                if width == 0 and not rects:
                    continue
                if self.line_used and self.x + width > CONTENT_W:
                    self._newline()
                self._emit(rects, MARGIN + self.x)
                self.x += width
                self.line_used = True
            elif kind == "space":
                if self.line_used:
                    self.x += ev[1]
            elif kind == "par" or kind == "newline":
                if self.line_used:
                    self._newline()
            elif kind == "page":
                if self.line_used:
                    self._newline()
                self.page += 1
                self.line = 0
                self.x = 0.0
                self.line_used = False
                self.line_id += 1
            elif kind == "row":
                _, rects, width = ev
                if self.line_used:
                    self._newline()
                origin = MARGIN + max(0.0, (CONTENT_W - width) / 2.0)
                self._emit(rects, origin)
                self.line_used = True
                self._newline()
        return LayoutResult(inks=self.inks, pages=self.page + 1)


def compile_tex(source: str) -> LayoutResult:
    scanner = _Scanner(source)
    scanner.scan()
    return _Placer().place(scanner.events)
