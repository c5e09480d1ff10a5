"""Greedy longest-match subword segmentation.

Used to measure sentence length in subwords.  Pieces can be exported from
any real tokenizer (SentencePiece ``▁`` and WordPiece ``##`` markers are
stripped on load); without a piece file every character is its own piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Optional

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_is_fitted, check_sentences

UNKNOWN_PIECE = "<unk>"

_MARKERS = ("▁", "##")


@dataclass(frozen=True)
class SubwordModel:
    """An immutable piece inventory.

    ``character_level`` models accept any character as a piece and never
    emit ``unknown_piece``.
    """

    pieces: FrozenSet[str]
    unknown_piece: str = UNKNOWN_PIECE
    character_level: bool = False

    def __post_init__(self):
        pieces = frozenset(self.pieces)
        # every character of the alphabet must be a piece
        pieces |= {ch for p in pieces for ch in p}
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "max_len", max((len(p) for p in pieces), default=1))

    @classmethod
    def characters(cls) -> "SubwordModel":
        return cls(frozenset(), character_level=True)

    @property
    def source(self) -> str:
        return "characters" if self.character_level else f"pieces:{len(self.pieces)}"


def load_piece_file(path) -> SubwordModel:
    """Read one piece per line (UTF-8).

    Raises:
        OSError: if the file cannot be read.
        ValueError: if it holds no pieces.
    """
    with open(path, encoding="utf-8") as f:
        lines = [line.rstrip("\r\n") for line in f]
    pieces = set()
    for line in lines:
        piece = line.split("\t", 1)[0].strip()
        for marker in _MARKERS:
            if piece.startswith(marker):
                piece = piece[len(marker):]
        if piece:
            pieces.add(piece)
    if not pieces:
        raise ValueError(f"piece file {path} is empty")
    return SubwordModel(frozenset(pieces))


def segment_word(model: SubwordModel, word: str) -> List[str]:
    if model.character_level:
        return list(word)
    out = []
    i = 0
    while i < len(word):
        for j in range(min(len(word), i + model.max_len), i, -1):
            if word[i:j] in model.pieces:
                out.append(word[i:j])
                i = j
                break
        else:
            out.append(model.unknown_piece)
            i += 1
    return out


def segment(model: SubwordModel, sentence: str) -> List[str]:
    """Split on whitespace, then take the longest known piece left to right.

    Characters outside the inventory become ``model.unknown_piece``.
    """
    out: List[str] = []
    for word in sentence.split():
        out += segment_word(model, word)
    return out


class SubwordSegmenter(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`segment`.

    Parameters
    ----------
    piece_file : str or path, optional
        Piece inventory; when omitted, ``fit`` uses character-level pieces.
    pieces : iterable of str, optional
        Inline inventory, used when no ``piece_file`` is given.
    """

    def __init__(self, piece_file=None, pieces=None):
        self.piece_file = piece_file
        self.pieces = pieces

    def fit(self, X=None, y=None):
        if self.piece_file is not None:
            self.model_ = load_piece_file(self.piece_file)
        elif self.pieces is not None:
            if not list(self.pieces):
                raise ValueError("empty piece inventory")
            self.model_ = SubwordModel(frozenset(self.pieces))
        else:
            self.model_ = SubwordModel.characters()
        return self

    def transform(self, X) -> List[List[str]]:
        check_is_fitted(self, "model_")
        return [segment(self.model_, s) for s in check_sentences(X)]

    def lengths(self, X) -> List[int]:
        return [len(p) for p in self.transform(X)]


def model_from_options(piece_file: Optional[str] = None) -> SubwordModel:
    return SubwordSegmenter(piece_file=piece_file).fit().model_
