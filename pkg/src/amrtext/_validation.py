"""Input checks shared by the estimators and the pipeline functions."""

from __future__ import annotations

from typing import Iterable, List

from sklearn.exceptions import NotFittedError

from .amr import AmrGraph, parse_penman


def check_language(code, names) -> str:
    if code not in names:
        known = ", ".join(sorted(names))
        raise ValueError(f"unknown language code {code!r}; expected one of {known}")
    return code


def check_graph(graph) -> AmrGraph:
    """Accept an :class:`AmrGraph` or a Penman string."""
    if isinstance(graph, AmrGraph):
        return graph
    if isinstance(graph, str):
        return parse_penman(graph)
    raise TypeError(f"expected an AmrGraph or a Penman string, got {type(graph).__name__}")


def check_graphs(X) -> List[AmrGraph]:
    if isinstance(X, (str, AmrGraph)):
        X = [X]
    graphs = [check_graph(g) for g in X]
    if not graphs:
        raise ValueError("expected at least one graph")
    return graphs


def check_sentences(X) -> List[str]:
    if isinstance(X, str):
        X = [X]
    out = list(X)
    for s in out:
        if not isinstance(s, str):
            raise TypeError(f"expected text, got {type(s).__name__}")
    return out


def check_nonempty(items: Iterable, what: str) -> list:
    items = list(items)
    if not items:
        raise ValueError(f"{what} is empty")
    return items


def check_is_fitted(estimator, attribute: str):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet; call 'fit' first."
        )
