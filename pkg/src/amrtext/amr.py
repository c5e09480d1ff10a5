"""Penman-notation AMR graphs: parsing, serialization and validation.

A graph is kept as a root variable, a ``variable -> concept`` map, an ordered
list of ``(source, role, target)`` edges between variables and an ordered list
of ``(source, role, constant)`` attributes.  Inverse roles such as
``:ARG0-of`` are stored verbatim.

    >>> g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
    >>> g.root, len(g.nodes), len(g.edges)
    ('w', 3, 3)
    >>> print(serialize_penman(g))
    (w / want-01
        :ARG0 (b / boy)
        :ARG1 (g / go-02
            :ARG0 b))
"""

from __future__ import annotations

import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

Edge = Tuple[str, str, str]
Attribute = Tuple[str, str, str]

# A bare symbol in target position that is not a defined variable is read as a
# constant, unless it has the shape of an AMR variable (letter + digits).
VARIABLE_RE = re.compile(r"^[a-z][0-9]*$")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<lparen>\()
    |(?P<rparen>\))
    |(?P<slash>/)
    |(?P<string>"(?:[^"\\]|\\.)*")
    |(?P<role>:[^\s()"/]*)
    |(?P<symbol>[^\s()"/:][^\s()"/]*)
    """,
    re.VERBOSE,
)

INDENT = "    "


class PenmanError(ValueError):
    """Raised when a Penman string cannot be read into a graph."""

    def __init__(self, diagnostics: List["ParseDiagnostic"]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    offset: int  # byte offset into the UTF-8 encoded input
    message: str

    def __str__(self):
        return f"{self.severity}:{self.offset}:{self.message}"


@dataclass(frozen=True, eq=False)
class AmrGraph:
    """A rooted, labeled, directed graph read from Penman notation.

    Attributes:
        root: variable of the top node.
        nodes: variable -> concept label, in definition order.
        edges: ``(source, role, target)`` triples between variables.
        attributes: ``(source, role, constant)`` triples; constants keep their
            literal form, so quoted strings retain their quotes.
        source_span: optional ``(start, end)`` character offsets of the graph
            in the document it was read from.
    """

    root: str
    nodes: Dict[str, str]
    edges: Tuple[Edge, ...] = ()
    attributes: Tuple[Attribute, ...] = ()
    source_span: Optional[Tuple[int, int]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "attributes", tuple(tuple(a) for a in self.attributes))
        object.__setattr__(self, "_adjacency", None)

    def __eq__(self, other):
        # equal up to the order of relations
        if not isinstance(other, AmrGraph):
            return NotImplemented
        return (
            self.root == other.root
            and self.nodes == other.nodes
            and Counter(self.edges) == Counter(other.edges)
            and Counter(self.attributes) == Counter(other.attributes)
        )

    def __hash__(self):
        return hash((self.root, frozenset(self.nodes.items()), frozenset(self.edges)))

    def __repr__(self):
        return (
            f"AmrGraph(root={self.root!r}, nodes={len(self.nodes)}, "
            f"edges={len(self.edges)}, attributes={len(self.attributes)})"
        )

    def outgoing(self, var: str) -> List[Tuple[str, str, bool]]:
        """Relations leaving ``var`` as ``(role, target, is_edge)``: edges first, then attributes."""
        if self._adjacency is None:
            adj: Dict[str, List[Tuple[str, str, bool]]] = {}
            for src, role, tgt in self.edges:
                adj.setdefault(src, []).append((role, tgt, True))
            for src, role, val in self.attributes:
                adj.setdefault(src, []).append((role, val, False))
            object.__setattr__(self, "_adjacency", adj)
        return list(self._adjacency.get(var, ()))

    def in_degree(self) -> Counter:
        """Incoming edge count per variable (variables with no incoming edge are omitted)."""
        return Counter(tgt for _, _, tgt in self.edges)

    def reentrant_nodes(self) -> List[str]:
        indeg = self.in_degree()
        return [v for v in self.nodes if indeg[v] >= 2]

    def roles(self) -> List[str]:
        """Every role label in depth-first order, edges and attributes alike."""
        out = []
        for role, _, _ in iter_relations(self):
            out.append(role)
        return out


def iter_relations(graph: AmrGraph) -> Iterator[Tuple[str, str, bool]]:
    """Depth-first walk yielding ``(role, target, is_edge)`` for every relation once."""
    seen = {graph.root}
    stack = [iter(graph.outgoing(graph.root))]
    while stack:
        try:
            role, tgt, is_edge = next(stack[-1])
        except StopIteration:
            stack.pop()
            continue
        yield role, tgt, is_edge
        if is_edge and tgt not in seen:
            seen.add(tgt)
            stack.append(iter(graph.outgoing(tgt)))


# -- lexing -----------------------------------------------------------------


@dataclass
class _Token:
    kind: str
    text: str
    pos: int  # character offset


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def lex(text: str) -> List[_Token]:
    """Split Penman text into tokens, dropping whitespace and ``#`` comment lines."""
    text = _blank_comments(text)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # unterminated quote; treat the rest of the line as one bad token
            end = text.find("\n", pos)
            end = len(text) if end < 0 else end
            tokens.append(_Token("bad", text[pos:end], pos))
            pos = end
            continue
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    return tokens


def _blank_comments(text: str) -> str:
    # keep offsets stable by replacing comment lines with spaces
    if "#" not in text:
        return text
    lines = text.split("\n")
    for i, line in enumerate(lines):
        if line.lstrip().startswith("#"):
            lines[i] = " " * len(line)
    return "\n".join(lines)


# -- parsing ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = lex(text)
        self.i = 0
        self.nodes: Dict[str, str] = {}
        self.def_pos: Dict[str, int] = {}
        self.edges: List[Edge] = []
        self.attributes: List[Attribute] = []
        # (kind, source, role, value, pos) in textual order
        self.relations: List[Tuple[str, str, str, str, int]] = []
        self.errors: List[ParseDiagnostic] = []
        self.warnings: List[ParseDiagnostic] = []

    def error(self, pos: int, message: str):
        self.errors.append(ParseDiagnostic("error", _byte_offset(self.text, pos), message))

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Optional[_Token]:
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def check_balance(self) -> bool:
        depth = 0
        opens = []
        for tok in self.tokens:
            if tok.kind == "lparen":
                depth += 1
                opens.append(tok.pos)
            elif tok.kind == "rparen":
                if depth == 0:
                    self.error(tok.pos, "unbalanced parentheses: unexpected ')'")
                    return False
                depth -= 1
                opens.pop()
        if opens:
            self.error(opens[-1], "unbalanced parentheses: '(' is never closed")
            return False
        return True

    def parse(self) -> Optional[AmrGraph]:
        if not self.tokens:
            self.error(0, "empty input")
            return None
        bad = next((t for t in self.tokens if t.kind == "bad"), None)
        if bad is not None:
            self.error(bad.pos, f"unterminated string {bad.text!r}")
            return None
        if not self.check_balance():
            return None
        first = self.peek()
        if first.kind != "lparen":
            self.error(first.pos, f"expected '(' but found {first.text!r}")
            return None
        start = first.pos
        try:
            root = self.node()
        except _Abort:
            return None
        end_pos = self.tokens[self.i - 1].pos + 1
        extra = self.peek()
        if extra is not None:
            self.error(extra.pos, f"unexpected {extra.text!r} after the end of the graph")
            return None
        self.resolve()
        if self.errors:
            return None
        return AmrGraph(
            root=root,
            nodes=self.nodes,
            edges=self.edges,
            attributes=self.attributes,
            source_span=(start, end_pos),
        )

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok is None:
            self.error(len(self.text), f"expected {what} but reached end of input")
            raise _Abort
        if tok.kind != kind:
            self.error(tok.pos, f"expected {what} but found {tok.text!r}")
            raise _Abort
        return tok

    def node(self) -> str:
        self.expect("lparen", "'('")
        var_tok = self.expect("symbol", "a variable")
        var = var_tok.text
        self.expect("slash", "'/'")
        concept_tok = self.next()
        if concept_tok is None or concept_tok.kind not in ("symbol", "string"):
            pos = len(self.text) if concept_tok is None else concept_tok.pos
            found = "end of input" if concept_tok is None else repr(concept_tok.text)
            self.error(pos, f"expected a concept for {var!r} but found {found}")
            raise _Abort
        if var in self.nodes:
            self.error(var_tok.pos, f"duplicate definition of variable {var!r}")
            raise _Abort
        self.nodes[var] = concept_tok.text
        self.def_pos[var] = var_tok.pos
        while True:
            tok = self.peek()
            if tok is None:
                self.error(len(self.text), "expected ')' but reached end of input")
                raise _Abort
            if tok.kind == "rparen":
                self.next()
                return var
            if tok.kind != "role":
                self.error(tok.pos, f"expected a role or ')' but found {tok.text!r}")
                raise _Abort
            self.next()
            self.relation(var, tok)

    def relation(self, src: str, role_tok: _Token):
        role = role_tok.text
        if role == ":":
            self.error(role_tok.pos, "empty role label")
            raise _Abort
        tgt = self.peek()
        if tgt is None or tgt.kind in ("rparen", "role", "slash"):
            pos = len(self.text) if tgt is None else tgt.pos
            self.error(pos, f"role {role} has no target")
            raise _Abort
        if tgt.kind == "lparen":
            slot = len(self.relations)
            self.relations.append(None)
            self.relations[slot] = ("node", src, role, self.node(), tgt.pos)
        else:
            self.next()
            # a symbol is only known to be a variable once every definition has been seen
            kind = "string" if tgt.kind == "string" else "symbol"
            self.relations.append((kind, src, role, tgt.text, tgt.pos))

    def resolve(self):
        for kind, src, role, value, pos in self.relations:
            if kind == "node" or (kind == "symbol" and value in self.nodes):
                self.edges.append((src, role, value))
            elif kind == "symbol" and VARIABLE_RE.match(value):
                self.error(pos, f"variable {value!r} is referenced but never defined")
            else:
                self.attributes.append((src, role, value))


class _Abort(Exception):
    pass


def diagnose(text: str) -> Tuple[Optional[AmrGraph], List[ParseDiagnostic]]:
    """Parse ``text`` and return the graph (or None) together with all diagnostics."""
    p = _Parser(text)
    try:
        graph = p.parse()
    except RecursionError:
        return None, [ParseDiagnostic("error", 0, "nesting is too deep to parse")]
    return graph, p.errors + p.warnings


def parse_penman(text: str) -> AmrGraph:
    """Read a single Penman expression.

    Bare variables in target position become edges to the existing node;
    quoted strings and other constants become attributes.

    Raises:
        PenmanError: for empty input, unbalanced parentheses, an undefined or
            duplicated variable, or any other syntax error.  Every diagnostic
            carries the byte offset of the problem.
    """
    graph, diags = diagnose(text)
    if graph is None:
        raise PenmanError(diags)
    return graph


# -- serialization ----------------------------------------------------------


def serialize_penman(graph: AmrGraph, indent: str = INDENT) -> str:
    """Write ``graph`` in Penman notation.

    Nodes are printed depth-first in declaration order; the first visit of a
    variable prints ``(var / concept ...)`` and later visits print the bare
    variable.  Each relation goes on its own line, indented one step per depth.
    """
    seen = {graph.root}
    out: List[str] = [f"({graph.root} / {graph.nodes[graph.root]}"]
    stack = [iter(graph.outgoing(graph.root))]
    while stack:
        try:
            role, tgt, is_edge = next(stack[-1])
        except StopIteration:
            stack.pop()
            out.append(")")
            continue
        out.append("\n" + indent * len(stack) + role + " ")
        if is_edge and tgt not in seen:
            seen.add(tgt)
            out.append(f"({tgt} / {graph.nodes[tgt]}")
            stack.append(iter(graph.outgoing(tgt)))
        else:
            out.append(tgt)
    return "".join(out)


# -- validation -------------------------------------------------------------


def validate(graph: AmrGraph) -> List[ParseDiagnostic]:
    """Check the structural invariants of ``graph``; an empty list means valid."""
    offset = graph.source_span[0] if graph.source_span else 0
    diags = []

    def err(msg):
        diags.append(ParseDiagnostic("error", offset, msg))

    if graph.root not in graph.nodes:
        err(f"root {graph.root!r} is not a declared node")
    for var, concept in graph.nodes.items():
        if not var or not concept:
            err(f"node {var!r} has an empty variable or concept")
    for src, role, tgt in graph.edges:
        for end in (src, tgt):
            if end not in graph.nodes:
                err(f"edge {src} {role} {tgt} refers to undeclared node {end!r}")
        if not role.startswith(":") or len(role) < 2:
            err(f"role {role!r} on edge from {src!r} must start with ':'")
    for src, role, val in graph.attributes:
        if src not in graph.nodes:
            err(f"attribute {role} {val} refers to undeclared node {src!r}")
        if not role.startswith(":") or len(role) < 2:
            err(f"role {role!r} on attribute of {src!r} must start with ':'")
    if graph.root in graph.nodes:
        reached = {graph.root}
        frontier = [graph.root]
        children: Dict[str, List[str]] = {}
        for src, _, tgt in graph.edges:
            children.setdefault(src, []).append(tgt)
        while frontier:
            v = frontier.pop()
            for c in children.get(v, ()):
                if c not in reached and c in graph.nodes:
                    reached.add(c)
                    frontier.append(c)
        for var in graph.nodes:
            if var not in reached:
                err(f"node {var!r} is not reachable from the root")
    return diags


# -- files ------------------------------------------------------------------


@dataclass
class AmrBlock:
    """One blank-line separated block of an AMR release file."""

    text: str  # the graph text, comment lines removed
    metadata: Dict[str, str]
    offset: int  # byte offset of the block in the file
    line: int  # 1-based line number of the block start


_META_RE = re.compile(r"::(\S+)")


def parse_metadata(lines: List[str]) -> Dict[str, str]:
    """Read ``# ::key value ::key2 value2`` comment lines into a dict."""
    meta: Dict[str, str] = {}
    for line in lines:
        body = line.lstrip()[1:]
        if "::" not in body:
            continue
        marks = list(_META_RE.finditer(body))
        for j, m in enumerate(marks):
            end = marks[j + 1].start() if j + 1 < len(marks) else len(body)
            value = body[m.end():end].strip()
            meta.setdefault(m.group(1), value)
    return meta


def iter_blocks(text: str) -> Iterator[AmrBlock]:
    """Split an AMR release file into blocks separated by blank lines."""
    offset = 0
    buf: List[str] = []
    start = 0
    start_line = 1
    lineno = 0
    for line in text.splitlines(keepends=True):
        lineno += 1
        if line.strip():
            if not buf:
                start = offset
                start_line = lineno
            buf.append(line)
        elif buf:
            yield _make_block(buf, start, start_line)
            buf = []
        offset += len(line.encode("utf-8"))
    if buf:
        yield _make_block(buf, start, start_line)


def _make_block(lines: List[str], offset: int, line: int) -> Optional[AmrBlock]:
    comments = [l for l in lines if l.lstrip().startswith("#")]
    body = "".join(" " * len(l.rstrip("\n")) + "\n" if l.lstrip().startswith("#") else l for l in lines)
    return AmrBlock(text=body, metadata=parse_metadata(comments), offset=offset, line=line)


def read_amr_file(path) -> List[AmrBlock]:
    """Read every non-comment-only block of an AMR text file."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return [b for b in iter_blocks(text) if b.text.strip()]


def print_diagnostics(diags, prefix: str = "", file=None):
    file = file or sys.stderr
    for d in diags:
        print(f"{prefix}{d}", file=file)
