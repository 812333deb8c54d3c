"""Scan TeX sources for equations and sentences with exact character spans.

The scanner operates on a single flattened "working document": the main file
with \\input/\\include resolved, comments stripped, and (optionally) user
macros expanded.  The working document is persisted as an artifact, and all
spans produced downstream refer to it.  A per-character origin map back to
the original files is kept for diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path


class ScanError(Exception):
    pass


class UnbalancedDelimiter(ScanError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class TexSpan:
    file: str
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end or self.start < 0:
            raise ValueError(f"bad span [{self.start}, {self.end})")

    def to_json(self) -> dict:
        return {"file": self.file, "start": self.start, "end": self.end}


@dataclass
class EquationSpan:
    id: str
    span: TexSpan
    body: str
    display: bool
    body_span: TexSpan

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "span": self.span.to_json(),
            "body": self.body,
            "display": self.display,
            "body_span": self.body_span.to_json(),
        }


@dataclass
class SentenceRecord:
    id: str
    span: TexSpan
    text: str
    math_refs: list[str] = field(default_factory=list)
    boxes: list = field(default_factory=list)
    kind: str = "sentence"  # "sentence" or "heading"

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "span": self.span.to_json(),
            "text": self.text,
            "math_refs": list(self.math_refs),
            "boxes": [b.to_json() for b in self.boxes],
            "kind": self.kind,
        }


@dataclass
class WorkingDocument:
    text: str
    name: str
    origins: list[tuple[str, int]]

    def origin_of(self, offset: int) -> tuple[str, int]:
        return self.origins[offset]


# --- assembly --------------------------------------------------------------


def strip_comments(text: str, file: str) -> tuple[str, list[tuple[str, int]]]:
    """Remove % comments (keeping the newline) and build the origin map."""
    out: list[str] = []
    origins: list[tuple[str, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            out.append(text[i : i + 2])
            origins.extend([(file, i), (file, i + 1)])
            i += 2
            continue
        if ch == "%":
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        out.append(ch)
        origins.append((file, i))
        i += 1
    return "".join(out), origins


_INCLUDE_RE = re.compile(r"\\(?:input|include)\{([^{}]+)\}")


def _resolve_includes(
    source_dir: Path, filename: str, seen: set[str]
) -> tuple[str, list[tuple[str, int]]]:
    path = source_dir / filename
    if not path.suffix:
        path = path.with_suffix(".tex")
    key = str(path.resolve())
    if key in seen:
        raise ScanError(f"include cycle through {filename}")
    if not path.is_file():
        raise ScanError(f"missing include file {filename}")
    seen = seen | {key}
    rel = str(path.relative_to(source_dir))
    text, origins = strip_comments(path.read_text(), rel)

    out_text: list[str] = []
    out_origins: list[tuple[str, int]] = []
    pos = 0
    for m in _INCLUDE_RE.finditer(text):
        out_text.append(text[pos : m.start()])
        out_origins.extend(origins[pos : m.start()])
        sub_text, sub_origins = _resolve_includes(source_dir, m.group(1).strip(), seen)
        out_text.append(sub_text)
        out_origins.extend(sub_origins)
        pos = m.end()
    out_text.append(text[pos:])
    out_origins.extend(origins[pos:])
    return "".join(out_text), out_origins


_NEWCOMMAND_RE = re.compile(
    r"\\(?:re)?newcommand\*?\s*(?:\{\\([a-zA-Z]+)\}|\\([a-zA-Z]+))\s*(?:\[(\d+)\])?\{"
)
_DEF_RE = re.compile(r"\\def\\([a-zA-Z]+)\{")
_MATHOP_RE = re.compile(r"\\DeclareMathOperator\*?\{\\([a-zA-Z]+)\}\{")


def _balanced_group_end(text: str, open_brace: int) -> int:
    """Index just past the matching } for the { at open_brace."""
    depth = 0
    i = open_brace
    n = len(text)
    while i < n:
        ch = text[i]
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
    raise UnbalancedDelimiter("unclosed { group", open_brace)


def _collect_macros(
    text: str, origins: list[tuple[str, int]]
) -> tuple[str, list[tuple[str, int]], dict[str, tuple[int, str]]]:
    """Strip macro definitions out of the text, returning name -> (argc, body)."""
    macros: dict[str, tuple[int, str]] = {}
    removals: list[tuple[int, int]] = []
    for regex in (_NEWCOMMAND_RE, _DEF_RE, _MATHOP_RE):
        for m in regex.finditer(text):
            body_end = _balanced_group_end(text, m.end() - 1)
            body = text[m.end() : body_end - 1]
            if regex is _NEWCOMMAND_RE:
                name = m.group(1) or m.group(2)
                argc = int(m.group(3) or 0)
            elif regex is _DEF_RE:
                name, argc = m.group(1), 0
            else:
                name, argc = m.group(1), 0
                body = "\\operatorname{" + body + "}"
            macros[name] = (argc, body)
            removals.append((m.start(), body_end))
    if not removals:
        return text, origins, macros
    removals.sort()
    out_text: list[str] = []
    out_origins: list[tuple[str, int]] = []
    pos = 0
    for start, end in removals:
        out_text.append(text[pos:start])
        out_origins.extend(origins[pos:start])
        pos = end
    out_text.append(text[pos:])
    out_origins.extend(origins[pos:])
    return "".join(out_text), out_origins, macros


_MAX_EXPANSION_PASSES = 25


def _expand_macros(
    text: str, origins: list[tuple[str, int]], macros: dict[str, tuple[int, str]]
) -> tuple[str, list[tuple[str, int]]]:
    if not macros:
        return text, origins
    call_re = re.compile(
        r"\\(" + "|".join(re.escape(n) for n in sorted(macros, key=len, reverse=True)) + r")(?![a-zA-Z])"
    )
    for _ in range(_MAX_EXPANSION_PASSES):
        changed = False
        out_text: list[str] = []
        out_origins: list[tuple[str, int]] = []
        pos = 0
        for m in call_re.finditer(text):
            if m.start() < pos:
                continue
            name = m.group(1)
            argc, body = macros[name]
            end = m.end()
            args: list[str] = []
            ok = True
            for _k in range(argc):
                while end < len(text) and text[end] in " \t\n":
                    end += 1
                if end >= len(text) or text[end] != "{":
                    ok = False
                    break
                arg_end = _balanced_group_end(text, end)
                args.append(text[end + 1 : arg_end - 1])
                end = arg_end
            if not ok:
                continue
            expansion = body
            for k, arg in enumerate(args, start=1):
                expansion = expansion.replace(f"#{k}", arg)
            out_text.append(text[pos : m.start()])
            out_origins.extend(origins[pos : m.start()])
            out_text.append(expansion)
            out_origins.extend([origins[m.start()]] * len(expansion))
            pos = end
            changed = True
        if not changed:
            return text, origins
        out_text.append(text[pos:])
        out_origins.extend(origins[pos:])
        text = "".join(out_text)
        origins = out_origins
    raise ScanError("macro expansion exceeded depth limit")


def assemble_document(
    source_dir: str | Path, main: str, expand_macros: bool = True
) -> WorkingDocument:
    """Flatten includes, strip comments, and optionally expand user macros."""
    source_dir = Path(source_dir)
    text, origins = _resolve_includes(source_dir, main, set())
    text, origins, macros = _collect_macros(text, origins)
    if expand_macros:
        text, origins = _expand_macros(text, origins, macros)
    return WorkingDocument(text=text, name="working.tex", origins=origins)


# --- equation detection ----------------------------------------------------

# Display environments covered by the scanner.  Extend this tuple to teach
# the scanner additional environment names.
MATH_ENVIRONMENTS = (
    "equation",
    "equation*",
    "align",
    "align*",
    "gather",
    "gather*",
    "multline",
    "multline*",
)

_BEGIN_RE = re.compile(r"\\begin\{([a-zA-Z]+\*?)\}")
_COMMAND_RE = re.compile(r"\\[a-zA-Z]+")


def _escaped(source: str, i: int) -> bool:
    backslashes = 0
    j = i - 1
    while j >= 0 and source[j] == "\\":
        backslashes += 1
        j -= 1
    return backslashes % 2 == 1


def detect_equations(
    source: str, file: str = "working.tex", id_prefix: str = "q"
) -> list[EquationSpan]:
    out: list[EquationSpan] = []
    i, n = 0, len(source)

    def add(span_start: int, span_end: int, body_start: int, body_end: int, display: bool):
        out.append(
            EquationSpan(
                id=f"{id_prefix}{len(out) + 1}",
                span=TexSpan(file, span_start, span_end),
                body=source[body_start:body_end],
                display=display,
                body_span=TexSpan(file, body_start, body_end),
            )
        )

    while i < n:
        ch = source[i]
        if ch == "\\":
            nxt = source[i + 1] if i + 1 < n else ""
            if nxt == "(":
                close = source.find("\\)", i + 2)
                if close < 0:
                    raise UnbalancedDelimiter("\\( has no matching \\)", i)
                add(i, close + 2, i + 2, close, display=False)
                i = close + 2
                continue
            if nxt == "[":
                close = source.find("\\]", i + 2)
                if close < 0:
                    raise UnbalancedDelimiter("\\[ has no matching \\]", i)
                add(i, close + 2, i + 2, close, display=True)
                i = close + 2
                continue
            m = _BEGIN_RE.match(source, i)
            if m and m.group(1) in MATH_ENVIRONMENTS:
                end_marker = f"\\end{{{m.group(1)}}}"
                close = source.find(end_marker, m.end())
                if close < 0:
                    raise UnbalancedDelimiter(f"\\begin{{{m.group(1)}}} is never closed", i)
                add(i, close + len(end_marker), m.end(), close, display=True)
                i = close + len(end_marker)
                continue
            cmd = _COMMAND_RE.match(source, i)
            i = cmd.end() if cmd else i + 2
            continue
        if ch == "$":
            if source.startswith("$$", i):
                close = source.find("$$", i + 2)
                if close < 0:
                    raise UnbalancedDelimiter("$$ has no matching $$", i)
                add(i, close + 2, i + 2, close, display=True)
                i = close + 2
                continue
            j = i + 1
            while True:
                j = source.find("$", j)
                if j < 0:
                    raise UnbalancedDelimiter("$ has no matching $", i)
                if _escaped(source, j):
                    j += 1
                    continue
                break
            add(i, j + 1, i + 1, j, display=False)
            i = j + 1
            continue
        i += 1
    return out


# --- sentence segmentation -------------------------------------------------

# Token before a period that never ends a sentence, lowercased, final dot
# removed ("e.g." is looked up as "e.g").
ABBREVIATIONS = {
    "e.g", "i.e", "etc", "cf", "vs", "al", "et", "fig", "figs", "eq", "eqs",
    "eqn", "sec", "secs", "ch", "resp", "approx", "no", "dr", "mr", "ms",
    "mrs", "prof", "st", "vol", "pp", "def", "prop", "thm", "lem", "cor",
    "w.r.t", "a.k.a", "i.i.d",
}

_HEADING_RE = re.compile(r"\\(?:section|subsection|subsubsection|paragraph)\*?\{")
_SILENT_RE = re.compile(
    r"\\maketitle|\\tableofcontents|\\newpage|\\clearpage|\\bigskip|\\medskip"
    r"|\\begin\{abstract\}|\\end\{abstract\}|\\appendix|\\noindent|\\centering"
    r"|\\begin\{center\}|\\end\{center\}|\\(?:title|author|date)\{"
)
_PARBREAK_RE = re.compile(r"\n[ \t]*\n[ \t\n]*")

_DROP_ARG_COMMANDS = (
    r"cite|citep|citet|citealp|citeauthor|ref|eqref|autoref|cref|Cref|label|footnote"
)
_UNWRAP_COMMANDS = r"textbf|textit|textsc|texttt|textrm|emph|text|mbox|underline"


def _detex_prose(s: str) -> str:
    s = re.sub(r"\\(?:%s)\*?(?:\[[^\]]*\])?\{[^{}]*\}" % _DROP_ARG_COMMANDS, "", s)
    for _ in range(3):
        s = re.sub(r"\\(?:%s)\{([^{}]*)\}" % _UNWRAP_COMMANDS, r"\1", s)
    s = s.replace("~", " ")
    s = re.sub(r"\\\\(\[[^\]]*\])?", " ", s)
    s = re.sub(r"\\([%$&#_{} ])", r"\1", s)
    s = re.sub(r"\\[a-zA-Z]+\*?", "", s)
    s = s.replace("{", "").replace("}", "")
    return re.sub(r"\s+", " ", s).strip()


def _detex(source: str, start: int, end: int, equations: list[EquationSpan]) -> str:
    parts: list[str] = []
    pos = start
    for eq in equations:
        if eq.span.end <= start or eq.span.start >= end:
            continue
        parts.append(_detex_prose(source[pos : eq.span.start]))
        marker = "$$" if eq.display else "$"
        parts.append(marker + eq.body.strip() + marker)
        pos = eq.span.end
    parts.append(_detex_prose(source[pos:end]))
    return re.sub(r"\s+", " ", " ".join(p for p in parts if p)).strip()


def _word_before(source: str, i: int) -> str:
    j = i
    while j > 0 and (source[j - 1].isalpha() or source[j - 1] == "."):
        j -= 1
    return source[j:i]


def _is_boundary(source: str, i: int, end: int) -> bool:
    """True when the terminal character at i ends a sentence."""
    ch = source[i]
    if ch == ".":
        if i + 1 < end and source[i + 1] == ".":
            return False  # ellipsis
        word = _word_before(source, i).rstrip(".")
        if word.lower() in ABBREVIATIONS:
            return False
        if len(word) == 1 and word.isupper():
            return False  # initials: "A. Author"
    j = i + 1
    while j < end and source[j] in ")]'\"":
        j += 1
    if j >= end:
        return True
    if not source[j].isspace():
        return False
    while j < end and source[j].isspace():
        j += 1
    if j >= end:
        return True
    nxt = source[j]
    return nxt.isupper() or nxt.isdigit() or nxt in "$\\(\"'"


def _cut_end(source: str, i: int, end: int) -> int:
    j = i + 1
    while j < end and source[j] in ")]'\"":
        j += 1
    return j


def segment_sentences(
    source: str,
    equations: list[EquationSpan],
    file: str = "working.tex",
    id_prefix: str = "sent",
) -> list[SentenceRecord]:
    body_start, body_end = 0, len(source)
    m = re.search(r"\\begin\{document\}", source)
    if m:
        body_start = m.end()
        m2 = re.search(r"\\end\{document\}", source)
        if m2:
            body_end = m2.start()

    in_math = [False] * len(source)
    for eq in equations:
        for k in range(eq.span.start, eq.span.end):
            in_math[k] = True

    # Chunk dividers: (start, end, kind) with kind "silent" or "heading".
    dividers: list[tuple[int, int, str]] = []
    for m in _HEADING_RE.finditer(source, body_start, body_end):
        if in_math[m.start()]:
            continue
        dividers.append((m.start(), _balanced_group_end(source, m.end() - 1), "heading"))
    for m in _SILENT_RE.finditer(source, body_start, body_end):
        if in_math[m.start()]:
            continue
        end = m.end()
        if m.group(0).endswith("{"):
            end = _balanced_group_end(source, end - 1)
        dividers.append((m.start(), end, "silent"))
    for m in _PARBREAK_RE.finditer(source, body_start, body_end):
        if in_math[m.start()]:
            continue
        dividers.append((m.start(), m.end(), "silent"))
    dividers.sort()

    # Sentence-terminal cuts between dividers.
    raw: list[tuple[int, int, str]] = []  # (start, end, kind)

    def scan_prose(lo: int, hi: int):
        start = lo
        i = lo
        while i < hi:
            if in_math[i]:
                i += 1
                continue
            if source[i] in ".!?" and _is_boundary(source, i, hi):
                cut = _cut_end(source, i, hi)
                raw.append((start, cut, "sentence"))
                start = cut
                i = cut
                continue
            i += 1
        if start < hi:
            raw.append((start, hi, "sentence"))

    pos = body_start
    for dstart, dend, kind in dividers:
        if dstart < pos:
            continue
        scan_prose(pos, dstart)
        if kind == "heading":
            raw.append((dstart, dend, "heading"))
        pos = dend
    scan_prose(pos, body_end)

    # Trim whitespace, drop empty chunks.
    chunks: list[tuple[int, int, str]] = []
    for start, end, kind in raw:
        while start < end and source[start].isspace():
            start += 1
        while end > start and source[end - 1].isspace():
            end -= 1
        if start < end:
            chunks.append((start, end, kind))

    # A chunk that opens with display math continues the previous sentence.
    merged: list[tuple[int, int, str]] = []
    display_starts = {eq.span.start: eq for eq in equations if eq.display}
    for start, end, kind in chunks:
        if kind == "sentence" and merged and merged[-1][2] == "sentence":
            prev = merged[-1]
            eq = display_starts.get(start)
            if eq is not None and source[prev[1] : start].strip() == "":
                if eq.span.end >= end:
                    merged[-1] = (prev[0], end, "sentence")
                    continue
                merged[-1] = (prev[0], eq.span.end, "sentence")
                start = eq.span.end
                while start < end and source[start].isspace():
                    start += 1
                if start >= end:
                    continue
        merged.append((start, end, kind))

    records: list[SentenceRecord] = []
    for start, end, kind in merged:
        text = _detex(source, start, end, equations)
        if not text:
            continue
        refs = [eq.id for eq in equations if start <= eq.span.start and eq.span.end <= end]
        records.append(
            SentenceRecord(
                id=f"{id_prefix}{len(records) + 1}",
                span=TexSpan(file, start, end),
                text=text,
                math_refs=refs,
                kind=kind,
            )
        )
    return records
