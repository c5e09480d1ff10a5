"""Depth-first linearization of AMR graphs into seq2seq source sequences.

The token stream keeps parentheses as structure marks, emits a concept at the
first visit of a node, each role label before its target, and a variable only
when a node is revisited through a reentrancy::

    (w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))
    -> ( want-01 :ARG0 ( boy ) :ARG1 ( go-02 :ARG0 b ) )

Variables are renamed canonically (first letter of the concept plus a running
index, in traversal order), so isomorphic graphs linearize identically and
the stream can be read back with :func:`delinearize`.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator, TransformerMixin

from .amr import AmrGraph, iter_relations
from ._validation import check_graph, check_graphs, check_is_fitted, check_language

LANGUAGE_NAMES = {
    "es": "Spanish",
    "it": "Italian",
    "de": "German",
    "zh": "Chinese",
    "en": "English",
}

MAX_SOURCE_LENGTH = 350
MAX_TARGET_LENGTH = 200

LPAREN, RPAREN = "(", ")"

_PREFIX_TOKEN_RE = re.compile(r"[^\s:]+|:")


class SourceLengthWarning(UserWarning):
    """A task input is longer than the configured maximum source length."""


class LinearizationError(ValueError):
    """Raised for a token sequence that does not describe a graph."""


@dataclass(frozen=True)
class LinearizedInput:
    prefix_tokens: Tuple[str, ...]
    graph_tokens: Tuple[str, ...]
    target_language: str
    # set when the token count exceeds the configured source budget
    length_warning: Optional[str] = field(default=None, compare=False)

    @property
    def tokens(self) -> List[str]:
        return list(self.prefix_tokens) + list(self.graph_tokens)

    @property
    def prefix(self) -> str:
        return task_prefix(self.target_language)

    def __len__(self):
        return len(self.prefix_tokens) + len(self.graph_tokens)

    def text(self) -> str:
        """The input as a single whitespace-joined string."""
        return self.prefix + " " + " ".join(self.graph_tokens)


@dataclass(frozen=True)
class EdgeLabelVocab:
    labels: Tuple[str, ...]
    source_corpus_id: str = ""

    def __contains__(self, label):
        return label in self.labels

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            for label in self.labels:
                f.write(label + "\n")

    @classmethod
    def load(cls, path, source_corpus_id: str = "") -> "EdgeLabelVocab":
        with open(path, encoding="utf-8") as f:
            labels = [line.rstrip("\n") for line in f if line.strip()]
        return cls(tuple(dict.fromkeys(labels)), source_corpus_id or str(path))


def canonical_variables(graph: AmrGraph) -> Dict[str, str]:
    """Map each variable to ``<first letter of concept><n>`` in depth-first visit order."""
    names: Dict[str, str] = {}
    used: Dict[str, int] = {}

    def name(var):
        base = _base_letter(graph.nodes[var])
        used[base] = used.get(base, 0) + 1
        names[var] = base if used[base] == 1 else f"{base}{used[base]}"

    name(graph.root)
    for _, tgt, is_edge in iter_relations(graph):
        if is_edge and tgt not in names:
            name(tgt)
    return names


def _base_letter(concept: str) -> str:
    c = concept.lstrip('"')[:1].lower()
    return c if "a" <= c <= "z" else "x"


def linearize(graph: AmrGraph) -> List[str]:
    """Depth-first token sequence of ``graph``; deterministic for a given graph."""
    names = canonical_variables(graph)
    seen = set()
    out: List[str] = []

    # iterative to survive deep chains
    seen.add(graph.root)
    out += [LPAREN, graph.nodes[graph.root]]
    stack = [iter(graph.outgoing(graph.root))]
    while stack:
        try:
            role, tgt, is_edge = next(stack[-1])
        except StopIteration:
            stack.pop()
            out.append(RPAREN)
            continue
        out.append(role)
        if not is_edge:
            out.append(tgt)
        elif tgt in seen:
            out.append(names[tgt])
        else:
            seen.add(tgt)
            out += [LPAREN, graph.nodes[tgt]]
            stack.append(iter(graph.outgoing(tgt)))
    return out


def delinearize(tokens: Sequence[str]) -> AmrGraph:
    """Rebuild a graph from :func:`linearize` output.

    Variables are synthesized with the same canonical naming used during
    linearization, which is how reentrant references are resolved.  A target
    token that is not ``(`` and not an already-introduced variable is read as
    an attribute constant.

    Raises:
        LinearizationError: for unbalanced or otherwise malformed structure.
    """
    tokens = list(tokens)
    if not tokens:
        raise LinearizationError("empty token sequence")
    nodes: Dict[str, str] = {}
    edges = []
    attributes = []
    used: Dict[str, int] = {}
    stack: List[str] = []
    root = None
    i = 0

    def open_node(pos) -> str:
        if pos + 1 >= len(tokens) or tokens[pos + 1] in (LPAREN, RPAREN):
            raise LinearizationError(f"expected a concept after '(' at token {pos}")
        concept = tokens[pos + 1]
        base = _base_letter(concept)
        used[base] = used.get(base, 0) + 1
        var = base if used[base] == 1 else f"{base}{used[base]}"
        nodes[var] = concept
        return var

    if tokens[0] != LPAREN:
        raise LinearizationError(f"sequence must start with '(' not {tokens[0]!r}")
    root = open_node(0)
    stack.append(root)
    i = 2
    while i < len(tokens):
        tok = tokens[i]
        if not stack:
            raise LinearizationError(f"unexpected token {tok!r} after the graph closed (token {i})")
        if tok == RPAREN:
            stack.pop()
            i += 1
            continue
        if tok == LPAREN or not tok.startswith(":"):
            raise LinearizationError(f"expected a role or ')' at token {i}, found {tok!r}")
        if i + 1 >= len(tokens):
            raise LinearizationError(f"role {tok} at token {i} has no target")
        tgt = tokens[i + 1]
        if tgt == LPAREN:
            child = open_node(i + 1)
            edges.append((stack[-1], tok, child))
            stack.append(child)
            i += 3
        elif tgt == RPAREN:
            raise LinearizationError(f"role {tok} at token {i} has no target")
        else:
            if tgt in nodes:
                edges.append((stack[-1], tok, tgt))
            else:
                attributes.append((stack[-1], tok, tgt))
            i += 2
    if stack:
        raise LinearizationError(f"unbalanced structure: {len(stack)} unclosed '('")
    return AmrGraph(root=root, nodes=nodes, edges=edges, attributes=attributes)


def task_prefix(language: str) -> str:
    """The instruction prepended to every source, e.g. ``translate AMR to Spanish:``."""
    check_language(language, LANGUAGE_NAMES)
    return f"translate AMR to {LANGUAGE_NAMES[language]}:"


def tokenize_prefix(prefix: str) -> List[str]:
    return _PREFIX_TOKEN_RE.findall(prefix)


def make_task_input(graph, target_language: str, max_source_length: int = MAX_SOURCE_LENGTH) -> LinearizedInput:
    """Prefix + linearized graph for one target language.

    Long inputs are never truncated; a :class:`SourceLengthWarning` is issued
    and recorded on the result instead.
    """
    graph = check_graph(graph)
    prefix_tokens = tuple(tokenize_prefix(task_prefix(target_language)))
    graph_tokens = tuple(linearize(graph))
    n = len(prefix_tokens) + len(graph_tokens)
    message = None
    if n > max_source_length:
        message = f"task input has {n} tokens, more than the maximum source length {max_source_length}"
        warnings.warn(message, SourceLengthWarning, stacklevel=2)
    return LinearizedInput(prefix_tokens, graph_tokens, target_language, message)


def extract_edge_label_vocab(corpus: Iterable, source_corpus_id: str = "") -> EdgeLabelVocab:
    """Distinct role labels of ``corpus`` in first-occurrence order.

    Raises:
        ValueError: if the corpus holds no graphs.
    """
    labels: Dict[str, None] = {}
    n = 0
    for graph in corpus:
        graph = check_graph(graph)
        n += 1
        for role in graph.roles():
            labels.setdefault(role, None)
    if n == 0:
        raise ValueError("cannot extract an edge-label vocabulary from an empty corpus")
    return EdgeLabelVocab(tuple(labels), source_corpus_id)


class AmrLinearizer(TransformerMixin, BaseEstimator):
    """Turn AMR graphs into task inputs for one target language.

    ``fit`` collects the edge-label vocabulary of the training graphs (to be
    added to a downstream tokenizer); ``transform`` produces
    :class:`LinearizedInput` objects and ``inverse_transform`` reads token
    sequences back into graphs.

    Parameters
    ----------
    target_language : str, default="en"
        One of ``es``, ``it``, ``de``, ``zh``, ``en``.
    max_source_length : int, default=350
        Inputs longer than this trigger a :class:`SourceLengthWarning`.
    """

    def __init__(self, target_language="en", max_source_length=MAX_SOURCE_LENGTH):
        self.target_language = target_language
        self.max_source_length = max_source_length

    def fit(self, X, y=None):
        check_language(self.target_language, LANGUAGE_NAMES)
        graphs = check_graphs(X)
        self.edge_vocab_ = extract_edge_label_vocab(graphs)
        self.n_graphs_ = len(graphs)
        return self

    def transform(self, X) -> List[LinearizedInput]:
        check_is_fitted(self, "edge_vocab_")
        return [
            make_task_input(g, self.target_language, self.max_source_length)
            for g in check_graphs(X)
        ]

    def inverse_transform(self, X) -> List[AmrGraph]:
        out = []
        for item in X:
            tokens = item.graph_tokens if isinstance(item, LinearizedInput) else item
            out.append(delinearize(tokens))
        return out
