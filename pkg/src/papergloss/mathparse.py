"""Parse TeX math fragments into trees and extract simple/composite symbols.

The tree mirrors the structure a MathML conversion would produce:
identifier/operator/number leaves, groups, scripts (sub/sup), accents,
and function applications, every leaf carrying the character span of the
source text it came from. Symbol extraction walks the tree for simple
symbols (identifier leaves, or adjacent letters merged into words) and
composite symbols of three kinds: scripts, accents, and functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ParseError(Exception):
    """Raised for math fragments the parser cannot structure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


GREEK_AND_SYMBOL_COMMANDS = {
    "alpha", "beta", "gamma", "delta", "epsilon", "varepsilon", "zeta",
    "eta", "theta", "vartheta", "iota", "kappa", "lambda", "mu", "nu",
    "xi", "pi", "varpi", "rho", "varrho", "sigma", "varsigma", "tau",
    "upsilon", "phi", "varphi", "chi", "psi", "omega",
    "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Upsilon",
    "Phi", "Psi", "Omega",
    "ell", "hbar", "imath", "jmath", "infty", "partial", "nabla",
}

OPERATOR_COMMANDS = {
    "cdot", "times", "pm", "mp", "div", "ast", "star", "circ", "bullet",
    "cap", "cup", "vee", "wedge", "oplus", "ominus", "otimes", "odot",
    "sum", "prod", "int", "oint", "bigcup", "bigcap", "max", "min",
    "sup", "inf", "lim", "log", "ln", "exp", "sin", "cos", "tan",
    "equiv", "triangleq", "doteq", "coloneqq", "sim", "simeq", "approx",
    "cong", "neq", "ne", "leq", "le", "geq", "ge", "ll", "gg", "prec",
    "succ", "subset", "supset", "subseteq", "supseteq", "in", "ni",
    "notin", "mid", "parallel", "perp", "propto",
    "leftarrow", "rightarrow", "Leftarrow", "Rightarrow", "mapsto",
    "gets", "to", "iff", "implies", "forall", "exists", "neg",
    "langle", "rangle", "lfloor", "rfloor", "lceil", "rceil",
    "vert", "Vert", "backslash", "setminus", "cdots", "ldots", "dots",
    "prime", "top", "bot", "emptyset", "angle",
}

ACCENT_COMMANDS = {
    "hat", "widehat", "bar", "overline", "vec", "overrightarrow",
    "tilde", "widetilde", "dot", "ddot", "check", "breve", "acute",
    "grave", "mathring", "underline",
}

# Aliases collapse to one canonical accent for normalization.
ACCENT_ALIASES = {
    "widehat": "hat",
    "overline": "bar",
    "overrightarrow": "vec",
    "widetilde": "tilde",
}

STYLE_COMMANDS = {
    "mathrm", "mathbf", "mathit", "mathcal", "mathbb", "mathsf",
    "mathtt", "mathfrak", "text", "textrm", "textbf", "textit",
    "operatorname", "bm", "boldsymbol",
}

STYLE_ALIASES = {
    "textrm": "mathrm",
    "text": "mathrm",
    "operatorname": "mathrm",
    "textbf": "mathbf",
    "textit": "mathit",
    "bm": "mathbf",
    "boldsymbol": "mathbf",
}

SPACING_COMMANDS = {
    "quad", "qquad", "thinspace", "negthinspace", "left", "right",
    "displaystyle", "textstyle", "limits", "nolimits",
}

DEFINITION_OPERATORS = {"=", ":=", "\\equiv", "\\triangleq", "\\doteq",
                        "\\leftarrow", "\\coloneqq", "\\gets"}


@dataclass
class MathNode:
    """One node of a parsed math expression.

    ``kind`` is one of identifier, operator, number, group, script,
    accent, function, row. ``roles`` maps structural role names (base,
    sub, sup, mark, head, args) to child indices where applicable.
    ``span`` is a half-open character range into the source fragment.
    """

    kind: str
    span: tuple[int, int]
    text: str = ""
    children: list["MathNode"] = field(default_factory=list)
    roles: dict[str, int] = field(default_factory=dict)
    style: str | None = None

    def role(self, name: str) -> "MathNode | None":
        idx = self.roles.get(name)
        return self.children[idx] if idx is not None else None

    def leaves(self) -> list["MathNode"]:
        if not self.children:
            return [self] if self.kind in ("identifier", "operator", "number") else []
        out = []
        # Children are stored in role order (base before sub before sup),
        # which can disagree with source order for x^a_b; emit by position.
        for child in sorted(self.children, key=lambda c: c.span[0]):
            out.extend(child.leaves())
        return out

    def to_json(self) -> dict:
        obj = {"kind": self.kind, "span": list(self.span)}
        if self.text:
            obj["text"] = self.text
        if self.style:
            obj["style"] = self.style
        if self.children:
            obj["children"] = [c.to_json() for c in self.children]
        if self.roles:
            obj["roles"] = dict(self.roles)
        return obj


@dataclass
class MathTree:
    root: MathNode
    source: str


@dataclass
class SymbolRecord:
    """A simple or composite symbol found in one math tree."""

    id: str
    kind: str  # simple | script | accent | function
    tex: str
    spans: list[tuple[int, int]]
    normalized_key: str
    parent: str | None = None
    children: list[str] = field(default_factory=list)
    node: MathNode | None = None


# --- tokenizer -------------------------------------------------------------

_TOK_IDENT = "ident"
_TOK_NUMBER = "number"
_TOK_OP = "op"
_TOK_SUB = "sub"
_TOK_SUP = "sup"
_TOK_LBRACE = "lbrace"
_TOK_RBRACE = "rbrace"
_TOK_ACCENT = "accent"
_TOK_STYLE = "style"
_TOK_FRAC = "frac"
_TOK_SQRT = "sqrt"

_SINGLE_OPS = set("+-*/=<>|,.;:!?()[]&@'")


@dataclass
class _Token:
    kind: str
    text: str
    start: int
    end: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch.isspace() or ch == "~":
            i += 1
            continue
        if ch == "\\":
            if i + 1 >= n:
                raise ParseError("trailing backslash", i)
            nxt = source[i + 1]
            if not nxt.isalpha():
                # Escaped char or control symbol: \$, \%, \{, \,, \\ ...
                if nxt in " ,;:!":
                    i += 2
                    continue
                tokens.append(_Token(_TOK_OP, source[i : i + 2], i, i + 2))
                i += 2
                continue
            j = i + 1
            while j < n and source[j].isalpha():
                j += 1
            name = source[i + 1 : j]
            tok_text = source[i:j]
            if name in SPACING_COMMANDS:
                i = j
                continue
            if name in ("begin", "end"):
                raise ParseError("environments not supported inside math fragments", i)
            if name in ACCENT_COMMANDS:
                tokens.append(_Token(_TOK_ACCENT, tok_text, i, j))
            elif name in STYLE_COMMANDS:
                tokens.append(_Token(_TOK_STYLE, tok_text, i, j))
            elif name == "frac":
                tokens.append(_Token(_TOK_FRAC, tok_text, i, j))
            elif name == "sqrt":
                tokens.append(_Token(_TOK_SQRT, tok_text, i, j))
            elif name in GREEK_AND_SYMBOL_COMMANDS:
                tokens.append(_Token(_TOK_IDENT, tok_text, i, j))
            else:
                # Operator commands and unknown commands both land here:
                # unknown commands become opaque operator leaves.
                tokens.append(_Token(_TOK_OP, tok_text, i, j))
            i = j
            continue
        if ch == "{":
            tokens.append(_Token(_TOK_LBRACE, ch, i, i + 1))
            i += 1
            continue
        if ch == "}":
            tokens.append(_Token(_TOK_RBRACE, ch, i, i + 1))
            i += 1
            continue
        if ch == "_":
            tokens.append(_Token(_TOK_SUB, ch, i, i + 1))
            i += 1
            continue
        if ch == "^":
            tokens.append(_Token(_TOK_SUP, ch, i, i + 1))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and (source[j].isdigit() or (source[j] == "." and j + 1 < n and source[j + 1].isdigit())):
                j += 1
            tokens.append(_Token(_TOK_NUMBER, source[i:j], i, j))
            i = j
            continue
        if ch.isalpha():
            tokens.append(_Token(_TOK_IDENT, ch, i, i + 1))
            i += 1
            continue
        if ch == ":" and i + 1 < n and source[i + 1] == "=":
            tokens.append(_Token(_TOK_OP, ":=", i, i + 2))
            i += 2
            continue
        if ch in _SINGLE_OPS:
            tokens.append(_Token(_TOK_OP, ch, i, i + 1))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)

    # Merge ':' '=' pairs the digit/char scan may have split.
    merged: list[_Token] = []
    for tok in tokens:
        if (
            merged
            and merged[-1].kind == _TOK_OP
            and merged[-1].text == ":"
            and tok.kind == _TOK_OP
            and tok.text == "="
            and merged[-1].end == tok.start
        ):
            prev = merged.pop()
            merged.append(_Token(_TOK_OP, ":=", prev.start, tok.end))
        else:
            merged.append(tok)
    return merged


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.source))
        self.pos += 1
        return tok

    def parse_row(self, until_rbrace: bool = False, start: int | None = None) -> MathNode:
        items: list[MathNode] = []
        row_start = start if start is not None else (self.peek().start if self.peek() else 0)
        while True:
            tok = self.peek()
            if tok is None:
                if until_rbrace:
                    raise ParseError("unbalanced brace", len(self.source))
                break
            if tok.kind == _TOK_RBRACE:
                if until_rbrace:
                    break
                raise ParseError("unbalanced closing brace", tok.start)
            items.append(self.parse_item())
        items = _detect_functions(items)
        row_end = items[-1].span[1] if items else row_start
        return MathNode("row", (row_start, row_end), children=items)

    def parse_item(self) -> MathNode:
        node = self.parse_atom()
        tok = self.peek()
        if tok is not None and tok.kind in (_TOK_SUB, _TOK_SUP):
            base = node
            sub: MathNode | None = None
            sup: MathNode | None = None
            while (tok := self.peek()) is not None and tok.kind in (_TOK_SUB, _TOK_SUP):
                marker = self.take()
                if self.peek() is None:
                    raise ParseError("dangling script marker", marker.start)
                arg = self.parse_atom()
                if marker.kind == _TOK_SUB:
                    if sub is not None:
                        raise ParseError("double subscript", marker.start)
                    sub = arg
                else:
                    if sup is not None:
                        raise ParseError("double superscript", marker.start)
                    sup = arg
            children = [base]
            roles = {"base": 0}
            if sub is not None:
                roles["sub"] = len(children)
                children.append(sub)
            if sup is not None:
                roles["sup"] = len(children)
                children.append(sup)
            span = (base.span[0], max(c.span[1] for c in children))
            return MathNode("script", span, children=children, roles=roles)
        return node

    def parse_atom(self) -> MathNode:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.source))
        if tok.kind == _TOK_IDENT:
            self.take()
            return MathNode("identifier", (tok.start, tok.end), text=tok.text)
        if tok.kind == _TOK_NUMBER:
            self.take()
            return MathNode("number", (tok.start, tok.end), text=tok.text)
        if tok.kind == _TOK_OP:
            self.take()
            return MathNode("operator", (tok.start, tok.end), text=tok.text)
        if tok.kind == _TOK_LBRACE:
            self.take()
            inner = self.parse_row(until_rbrace=True, start=tok.end)
            closer = self.take()  # known to be RBRACE from parse_row
            return MathNode(
                "group", (tok.start, closer.end), children=list(inner.children)
            )
        if tok.kind == _TOK_ACCENT:
            self.take()
            mark = MathNode("operator", (tok.start, tok.end), text=tok.text)
            base = self.parse_atom()
            span = (tok.start, base.span[1])
            return MathNode(
                "accent", span, children=[mark, base], roles={"mark": 0, "base": 1}
            )
        if tok.kind == _TOK_STYLE:
            self.take()
            arg = self.parse_atom()
            style = STYLE_ALIASES.get(tok.text[1:], tok.text[1:])
            if arg.kind == "group":
                node = MathNode(
                    "group", (tok.start, arg.span[1]), children=arg.children, style=style
                )
            else:
                node = MathNode(
                    "group", (tok.start, arg.span[1]), children=[arg], style=style
                )
            return node
        if tok.kind in (_TOK_FRAC, _TOK_SQRT):
            self.take()
            cmd = MathNode("operator", (tok.start, tok.end), text=tok.text)
            first = self.parse_atom()
            children = [cmd, first]
            if tok.kind == _TOK_FRAC:
                children.append(self.parse_atom())
            span = (tok.start, children[-1].span[1])
            return MathNode("row", span, children=children)
        if tok.kind in (_TOK_SUB, _TOK_SUP):
            raise ParseError("dangling script marker", tok.start)
        if tok.kind == _TOK_RBRACE:
            raise ParseError("unbalanced closing brace", tok.start)
        raise ParseError(f"unexpected token {tok.text!r}", tok.start)


def _detect_functions(items: list[MathNode]) -> list[MathNode]:
    """Rewrite ``head ( ... )`` sequences into function nodes.

    The head may be an identifier, an accent, or a script whose base is
    one of those. Arguments keep their parens as operator leaves so leaf
    spans still cover the source.
    """

    def is_head(node: MathNode) -> bool:
        if node.kind in ("identifier", "accent"):
            return True
        if node.kind == "group" and node.style:
            return all(c.kind == "identifier" for c in node.children)
        if node.kind == "script":
            base = node.role("base")
            return base is not None and base.kind in ("identifier", "accent")
        return False

    out: list[MathNode] = []
    i = 0
    while i < len(items):
        node = items[i]
        if (
            is_head(node)
            and i + 1 < len(items)
            and items[i + 1].kind == "operator"
            and items[i + 1].text == "("
        ):
            depth = 0
            close = None
            for j in range(i + 1, len(items)):
                cand = items[j]
                if cand.kind == "operator" and cand.text == "(":
                    depth += 1
                elif cand.kind == "operator" and cand.text == ")":
                    depth -= 1
                    if depth == 0:
                        close = j
                        break
            if close is not None:
                inner = _detect_functions(items[i + 2 : close])
                arg_children = [items[i + 1]] + inner + [items[close]]
                args = MathNode(
                    "row",
                    (items[i + 1].span[0], items[close].span[1]),
                    children=arg_children,
                )
                fn = MathNode(
                    "function",
                    (node.span[0], items[close].span[1]),
                    children=[node, args],
                    roles={"head": 0, "args": 1},
                )
                out.append(fn)
                i = close + 1
                continue
        out.append(node)
        i += 1
    return out


def parse_math_tree(source: str) -> MathTree:
    """Parse one TeX math fragment (no surrounding delimiters)."""
    parser = _Parser(source)
    root = parser.parse_row()
    if parser.peek() is not None:
        raise ParseError("trailing input", parser.peek().start)
    return MathTree(root=root, source=source)


# --- normalization ---------------------------------------------------------


def _canon(node: MathNode, style: str | None = None) -> str:
    style = node.style or style
    if node.kind == "identifier":
        body = node.text
        return f"\\{style}{{{body}}}" if style else body
    if node.kind in ("number", "operator"):
        text = node.text
        if text.startswith("\\") and text[1:] in ACCENT_ALIASES:
            text = "\\" + ACCENT_ALIASES[text[1:]]
        return text
    if node.kind == "group":
        if node.style:
            return f"\\{node.style}{{" + _canon_row(node.children, None) + "}"
        return _canon_row(node.children, style)
    if node.kind == "row":
        return _canon_row(node.children, style)
    if node.kind == "script":
        base = node.role("base")
        sub = node.role("sub")
        sup = node.role("sup")
        out = _canon(base, style)
        if sub is not None:
            out += "_{" + _canon(sub, style) + "}"
        if sup is not None:
            out += "^{" + _canon(sup, style) + "}"
        return out
    if node.kind == "accent":
        mark = node.role("mark")
        name = mark.text[1:]
        name = ACCENT_ALIASES.get(name, name)
        return f"\\{name}{{" + _canon(node.role("base"), style) + "}"
    if node.kind == "function":
        return _canon(node.role("head"), style) + "(\\cdot)"
    raise ValueError(f"unknown node kind {node.kind}")


def _canon_row(children: list[MathNode], style: str | None) -> str:
    # Merge adjacent single-letter identifiers so "{a b}" and "ab" agree.
    parts: list[str] = []
    for child in children:
        parts.append(_canon(child, style))
    return "".join(parts)


def normalize_node(node: MathNode) -> str:
    return _canon(node)


# --- symbol extraction -----------------------------------------------------


class _SymbolCollector:
    def __init__(self, tree: MathTree, id_prefix: str = "s"):
        self.tree = tree
        self.records: list[SymbolRecord] = []
        self.prefix = id_prefix

    def _new_record(
        self,
        kind: str,
        tex: str,
        spans: list[tuple[int, int]],
        key: str,
        parent: str | None,
        node: MathNode | None,
    ) -> SymbolRecord:
        rec = SymbolRecord(
            id=f"{self.prefix}{len(self.records)}",
            kind=kind,
            tex=tex,
            spans=spans,
            normalized_key=key,
            parent=parent,
            node=node,
        )
        self.records.append(rec)
        if parent is not None:
            parent_rec = next(r for r in self.records if r.id == parent)
            parent_rec.children.append(rec.id)
        return rec

    def collect_sequence(
        self, children: list[MathNode], parent: str | None, style: str | None
    ) -> list[SymbolRecord]:
        """Collect symbols from a row-like child list, merging letter runs."""
        out: list[SymbolRecord] = []
        i = 0
        while i < len(children):
            node = children[i]
            if node.kind == "identifier" and _is_letter(node):
                # Merge a run of letters into one word only when the
                # letters are contiguous in the source; "W v" stays two
                # symbols while "abc" becomes one word.
                j = i + 1
                while (
                    j < len(children)
                    and children[j].kind == "identifier"
                    and _is_letter(children[j])
                    and children[j].span[0] == children[j - 1].span[1]
                ):
                    j += 1
                run = children[i:j]
                if len(run) > 1:
                    word = "".join(n.text for n in run)
                    key = f"\\{style}{{{word}}}" if style else word
                    spans = _merge_adjacent_spans([n.span for n in run])
                    out.append(
                        self._new_record("simple", word, spans, key, parent, None)
                    )
                else:
                    out.append(self.collect_node(run[0], parent, style))
                i = j
                continue
            rec = self.collect_node(node, parent, style)
            if rec is not None:
                out.append(rec)
            i += 1
        return out

    def collect_node(
        self, node: MathNode, parent: str | None, style: str | None
    ) -> SymbolRecord | None:
        style = node.style or style
        source = self.tree.source
        if node.kind == "identifier":
            key = _canon(node, style)
            return self._new_record(
                "simple", source[node.span[0] : node.span[1]], [node.span], key, parent, node
            )
        if node.kind in ("number", "operator"):
            return None
        if node.kind in ("group", "row"):
            self.collect_sequence(node.children, parent, style)
            return None
        if node.kind == "script":
            rec = self._new_record(
                "script",
                source[node.span[0] : node.span[1]],
                [node.span],
                _canon(node, style),
                parent,
                node,
            )
            for role in ("base", "sub", "sup"):
                child = node.role(role)
                if child is not None:
                    self._collect_into(child, rec.id, style)
            return rec
        if node.kind == "accent":
            rec = self._new_record(
                "accent",
                source[node.span[0] : node.span[1]],
                [node.span],
                _canon(node, style),
                parent,
                node,
            )
            self._collect_into(node.role("base"), rec.id, style)
            return rec
        if node.kind == "function":
            rec = self._new_record(
                "function",
                source[node.span[0] : node.span[1]],
                [node.span],
                _canon(node, style),
                parent,
                node,
            )
            self._collect_into(node.role("head"), rec.id, style)
            self._collect_into(node.role("args"), rec.id, style)
            return rec
        raise ValueError(f"unknown node kind {node.kind}")

    def _collect_into(self, node: MathNode, parent: str, style: str | None) -> None:
        if node.kind in ("group", "row"):
            self.collect_sequence(node.children, parent, node.style or style)
        else:
            self.collect_node(node, parent, style)


def _is_letter(node: MathNode) -> bool:
    return len(node.text) == 1 and node.text.isalpha()


def _merge_adjacent_spans(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for span in sorted(spans):
        if merged and merged[-1][1] == span[0]:
            merged[-1] = (merged[-1][0], span[1])
        else:
            merged.append(span)
    return [tuple(s) for s in merged]


def extract_symbols(tree: MathTree, id_prefix: str = "s") -> list[SymbolRecord]:
    """Every simple and composite symbol of the tree, with parent links."""
    collector = _SymbolCollector(tree, id_prefix)
    collector.collect_sequence(tree.root.children, None, None)
    return collector.records


def normalize_symbol(record: SymbolRecord) -> str:
    """Canonical key: invariant under grouping, whitespace, script order."""
    return record.normalized_key


# --- helpers used by defextract -------------------------------------------


def top_level_definition_split(tree: MathTree) -> tuple[list[MathNode], MathNode] | None:
    """Split the root row at the first top-level definition operator.

    Returns (lhs nodes, operator node) or None when no definition
    operator appears at depth 0.
    """
    for i, node in enumerate(tree.root.children):
        if node.kind == "operator" and node.text in DEFINITION_OPERATORS:
            return tree.root.children[:i], node
    return None


def lone_symbol_key(nodes: list[MathNode], source: str) -> str | None:
    """Normalized key when the node list is exactly one symbol, else None."""
    meaningful = [n for n in nodes]
    while len(meaningful) == 1 and meaningful[0].kind == "group" and meaningful[0].style is None:
        meaningful = meaningful[0].children
    if len(meaningful) != 1:
        # A contiguous run of bare letters is a single word symbol.
        if (
            meaningful
            and all(n.kind == "identifier" and _is_letter(n) for n in meaningful)
            and all(
                meaningful[k].span[0] == meaningful[k - 1].span[1]
                for k in range(1, len(meaningful))
            )
        ):
            return "".join(n.text for n in meaningful)
        return None
    node = meaningful[0]
    if node.kind in ("identifier", "script", "accent", "function"):
        return _canon(node)
    if node.kind == "group":
        return lone_symbol_key(node.children, source) if node.style is None else _canon(node)
    return None
