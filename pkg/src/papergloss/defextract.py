"""Definition extraction and usage indexing.

Three definition sources feed the manifest:

  abbreviation  parenthesized short forms matched to preceding long forms
                (the Schwartz-Hearst scan)
  prose         noun phrases adjacent to a lone-symbol formula, via two
                patterns: "The encoder $E$ ..." and "$k$ is the number of
                components"
  formula       equations whose left-hand side is a single symbol under a
                definition operator

Entities at this layer are canonical keys, not ids: "symbol:<normalized>"
or "term:<surface>".  The manifest assigns ids when it assembles entities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .mathparse import (
    MathTree,
    ParseError,
    SymbolRecord,
    extract_symbols,
    lone_symbol_key,
    parse_math_tree,
    top_level_definition_split,
)
from .texscan import EquationSpan, SentenceRecord, TexSpan


@dataclass
class DefinitionRecord:
    definiendum: str  # canonical key: "symbol:..." or "term:..."
    definiens: str
    kind: str  # abbreviation | prose | formula
    source: str  # sentence or equation id
    position: int  # document-global start offset of the source

    def to_json(self) -> dict:
        return {
            "definiendum": self.definiendum,
            "definiens": self.definiens,
            "kind": self.kind,
            "source": self.source,
            "position": self.position,
        }


@dataclass
class UsageIndex:
    sentences: dict[str, list[str]] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)


def symbol_key(normalized: str) -> str:
    return f"symbol:{normalized}"


def term_key(surface: str) -> str:
    return f"term:{surface}"


# --- per-equation analysis -------------------------------------------------


@dataclass
class EquationSymbols:
    equation: EquationSpan
    tree: MathTree | None
    records: list[SymbolRecord]
    lone_key: str | None
    parse_error: str | None = None


def analyze_equation(equation: EquationSpan) -> EquationSymbols:
    """Parse one equation body; failures come back as an empty analysis."""
    try:
        tree = parse_math_tree(equation.body)
    except ParseError as exc:
        return EquationSymbols(equation, None, [], None, parse_error=str(exc))
    records = extract_symbols(tree, id_prefix=f"{equation.id}.n")
    lone = lone_symbol_key(tree.root.children, tree.source)
    return EquationSymbols(equation, tree, records, lone)


# --- abbreviations (Schwartz-Hearst) ---------------------------------------

_PAREN_RE = re.compile(r"\(([^()]+)\)")
_WORD_RE = re.compile(r"[A-Za-z][A-Za-z-]*")


def _long_form_window(short: str) -> int:
    return min(len(short) + 5, 2 * len(short))


def find_long_form(short: str, preceding: str) -> str | None:
    """Right-to-left Schwartz-Hearst scan over the candidate window."""
    words = preceding.split()
    window = words[-_long_form_window(short):]
    if not window:
        return None
    text = " ".join(window)
    chars = [c.lower() for c in short if c.isalnum()]
    if not chars:
        return None
    hay = text.lower()
    li = len(hay) - 1
    si = len(chars) - 1
    while si >= 0:
        c = chars[si]
        while li >= 0 and (
            hay[li] != c or (si == 0 and li > 0 and hay[li - 1].isalnum())
        ):
            li -= 1
        if li < 0:
            return None
        si -= 1
        li -= 1
    long_form = text[li + 1 :].strip()
    if not long_form or long_form.lower() == short.lower():
        return None
    if len(long_form.split()) > _long_form_window(short):
        return None
    return long_form


def extract_abbreviations(sentences: list[SentenceRecord]) -> list[DefinitionRecord]:
    records = []
    for sentence in sentences:
        math_spans = [
            m.span() for m in re.finditer(r"\$\$.*?\$\$|\$[^$]*\$", sentence.text, re.S)
        ]
        for m in _PAREN_RE.finditer(sentence.text):
            if any(s < m.end() and m.start() < e for s, e in math_spans):
                continue  # parenthesized subexpression of a formula
            short = m.group(1).strip()
            if not (2 <= len(short) <= 10):
                continue
            if "$" in short or not any(c.isalpha() for c in short):
                continue
            long_form = find_long_form(short, sentence.text[: m.start()])
            if long_form is None:
                continue
            records.append(
                DefinitionRecord(
                    definiendum=term_key(short),
                    definiens=long_form,
                    kind="abbreviation",
                    source=sentence.id,
                    position=sentence.span.start,
                )
            )
    return records


# --- prose patterns --------------------------------------------------------

DETERMINERS = {
    "the", "a", "an", "this", "that", "these", "those", "each", "every",
    "our", "its", "their", "some", "any",
}

# Words that terminate noun-phrase collection in either direction.
FUNCTION_WORDS = {
    "is", "are", "was", "were", "be", "been", "being", "am",
    "we", "they", "it", "he", "she", "you", "i",
    "set", "let", "use", "used", "uses", "using", "define", "defined",
    "defines", "denote", "denotes", "denoted", "consider", "take", "takes",
    "apply", "applies", "compute", "computes", "write", "writes", "see",
    "choose", "pick", "fix", "obtain", "assume", "suppose", "gives",
    "maps", "reads", "stores", "holds", "feeds", "yields", "returns",
    "shows", "contains", "requires", "follows", "becomes", "acts",
    "emit", "emits", "report", "reports",
    "to", "of", "in", "on", "for", "with", "by", "as", "at", "from",
    "into", "over", "under", "between", "during", "after", "before",
    "and", "or", "but", "if", "then", "else", "where", "when", "which",
    "while", "via", "per", "not", "no", "so", "such", "than", "there",
    "here", "also", "both", "all", "only", "given", "shown", "called",
    "now", "then", "thus", "hence", "therefore", "however", "moreover",
    "furthermore", "finally", "next", "first", "second", "third", "again",
    "often", "always", "usually", "typically", "formally", "recall",
}

COPULAS = {"is", "are", "denotes", "denote", "represents", "represent", "equals"}

# "$E$ is used to ..." must not define E as "used"; past participles after a
# copula signal a passive construction, not a definition.
PARTICIPLES = {
    "used", "given", "shown", "set", "applied", "trained", "computed",
    "obtained", "chosen", "updated", "learned", "fed", "passed", "found",
    "selected", "initialized", "sampled", "drawn", "fixed", "known",
}

_TOKEN_RE = re.compile(
    r"\$\$.*?\$\$|\$[^$]*\$|[A-Za-z][A-Za-z-]*|\d+(?:\.\d+)?|[^\s]"
)


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def _is_word(tok: str) -> bool:
    return bool(_WORD_RE.fullmatch(tok))


def _np_before(tokens: list[str], idx: int) -> str | None:
    """[det]? [modifier]* [noun]+ ending immediately before tokens[idx]."""
    words = []
    j = idx - 1
    while j >= 0 and len(words) < 4:
        tok = tokens[j]
        if not _is_word(tok):
            break
        low = tok.lower()
        if low in DETERMINERS:
            break
        if low in FUNCTION_WORDS:
            break
        words.append(tok)
        j -= 1
    if not words:
        return None
    return " ".join(reversed(words))


def _np_after(tokens: list[str], idx: int) -> str | None:
    """Copula pattern: tokens[idx] is the math token; parse what follows."""
    j = idx + 1
    if j >= len(tokens):
        return None
    low = tokens[j].lower()
    if low not in COPULAS:
        return None
    j += 1
    if j < len(tokens) and tokens[j].lower() == "defined":
        j += 1
        if j < len(tokens) and tokens[j].lower() == "as":
            j += 1
        else:
            return None
    elif j < len(tokens) and tokens[j].lower() in PARTICIPLES:
        return None
    if j < len(tokens) and tokens[j].lower() in DETERMINERS:
        j += 1
    words = []
    while j < len(tokens) and len(words) < 6:
        tok = tokens[j]
        if not _is_word(tok):
            break
        low = tok.lower()
        if low in FUNCTION_WORDS and low != "of":
            break
        words.append(tok)
        j += 1
    while words and words[-1].lower() == "of":
        words.pop()
    if not words or words[0].lower() in PARTICIPLES:
        return None
    return " ".join(words)


def extract_symbol_definitions(
    sentences: list[SentenceRecord], analyses: dict[str, EquationSymbols]
) -> list[DefinitionRecord]:
    records = []
    for sentence in sentences:
        tokens = _tokens(sentence.text)
        math_positions = [i for i, t in enumerate(tokens) if t.startswith("$")]
        for ref_idx, tok_idx in enumerate(math_positions):
            if ref_idx >= len(sentence.math_refs):
                break
            analysis = analyses.get(sentence.math_refs[ref_idx])
            if analysis is None or analysis.lone_key is None:
                continue
            key = symbol_key(analysis.lone_key)
            # Copula phrasing tends to carry the fuller description, so it
            # goes first; later dedup keeps the first record per sentence.
            for definiens in (_np_after(tokens, tok_idx), _np_before(tokens, tok_idx)):
                if definiens is not None:
                    records.append(
                        DefinitionRecord(
                            definiendum=key,
                            definiens=definiens,
                            kind="prose",
                            source=sentence.id,
                            position=sentence.span.start,
                        )
                    )
    return records


# --- defining formulae -----------------------------------------------------


def extract_defining_formulae(
    analyses: dict[str, EquationSymbols]
) -> list[DefinitionRecord]:
    records = []
    ordered = sorted(analyses.values(), key=lambda a: a.equation.span.start)
    for analysis in ordered:
        if analysis.tree is None:
            continue
        split = top_level_definition_split(analysis.tree)
        if split is None:
            continue
        lhs, _op = split
        key = lone_symbol_key(lhs, analysis.tree.source)
        if key is None:
            continue
        records.append(
            DefinitionRecord(
                definiendum=symbol_key(key),
                definiens=analysis.equation.body.strip(),
                kind="formula",
                source=analysis.equation.id,
                position=analysis.equation.span.start,
            )
        )
    return records


# --- usage indexing --------------------------------------------------------


def index_usages(
    sentences: list[SentenceRecord],
    analyses: dict[str, EquationSymbols],
    term_surfaces: list[str],
) -> UsageIndex:
    index = UsageIndex()

    def note(key: str, sentence_id: str, occurrences: int):
        index.sentences.setdefault(key, [])
        if sentence_id not in index.sentences[key]:
            index.sentences[key].append(sentence_id)
        index.counts[key] = index.counts.get(key, 0) + occurrences

    term_patterns = {
        t: re.compile(r"(?<![A-Za-z0-9])" + re.escape(t) + r"(?![A-Za-z0-9])")
        for t in term_surfaces
    }
    for sentence in sentences:
        per_symbol: dict[str, int] = {}
        for eq_id in sentence.math_refs:
            analysis = analyses.get(eq_id)
            if analysis is None:
                continue
            for record in analysis.records:
                key = symbol_key(record.normalized_key)
                per_symbol[key] = per_symbol.get(key, 0) + 1
        for key, n in sorted(per_symbol.items()):
            note(key, sentence.id, n)
        for surface, pattern in term_patterns.items():
            n = len(pattern.findall(sentence.text))
            if n:
                note(term_key(surface), sentence.id, n)
    return index


def term_surfaces_from_definitions(records: list[DefinitionRecord]) -> list[str]:
    """Term entities come from abbreviation short forms and prose definienda."""
    surfaces = set()
    for record in records:
        if record.kind == "abbreviation":
            surfaces.add(record.definiendum.partition(":")[2])
        elif record.kind == "prose":
            surfaces.add(record.definiens)
    return sorted(surfaces)


def term_occurrence_id(surface: str, index: int) -> str:
    return f"t:{surface}:{index}"


def find_term_occurrences(
    working_text: str,
    sentences: list[SentenceRecord],
    equations: list[EquationSpan],
    surfaces: list[str],
) -> dict[str, list[TexSpan]]:
    """Word-boundary matches of each surface in the flattened source.

    Matches are confined to sentence spans and skip math regions, so the
    resulting spans are valid localization targets.
    """
    math_ranges = [(eq.span.start, eq.span.end) for eq in equations]

    def in_math(start, end):
        return any(s < end and start < e for s, e in math_ranges)

    out: dict[str, list[TexSpan]] = {}
    for surface in surfaces:
        pattern = re.compile(
            r"(?<![A-Za-z0-9])" + re.escape(surface) + r"(?![A-Za-z0-9])"
        )
        spans = []
        for sentence in sentences:
            chunk = working_text[sentence.span.start : sentence.span.end]
            for m in pattern.finditer(chunk):
                start = sentence.span.start + m.start()
                end = sentence.span.start + m.end()
                if not in_math(start, end):
                    spans.append(TexSpan(sentence.span.file, start, end))
        out[surface] = sorted(spans, key=lambda s: s.start)
    return out


def dedupe_definitions(records: list[DefinitionRecord]) -> list[DefinitionRecord]:
    """Sort per entity by position; drop repeats of (definiendum, kind, source)."""
    seen = set()
    out = []
    for record in sorted(records, key=lambda r: (r.position, r.kind, r.definiendum)):
        marker = (record.definiendum, record.kind, record.source)
        if marker in seen:
            continue
        seen.add(marker)
        out.append(record)
    return out


def extract_definitions(
    sentences: list[SentenceRecord], analyses: dict[str, EquationSymbols]
) -> list[DefinitionRecord]:
    """All three extractors in one pass, deduplicated."""
    records = (
        extract_abbreviations(sentences)
        + extract_symbol_definitions(sentences, analyses)
        + extract_defining_formulae(analyses)
    )
    return dedupe_definitions(records)
