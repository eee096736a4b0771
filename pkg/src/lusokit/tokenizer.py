"""Greedy longest-match subword tokenizer over a plain-text vocabulary.

The vocabulary file is UTF-8, one piece per line; the first four lines
are a header declaring the special pieces in the fixed order cls, sep,
pad, unk (they receive ids 0..3). Pieces that may only continue a word
carry the ``##`` prefix; pieces without it may only start a word.

Text is whitespace-pre-tokenized. Each pre-token is consumed left to
right, always taking the longest piece that matches the remaining
prefix (word-start pieces at position 0, continuation pieces after).
A maximal run of characters no piece can match collapses into a single
unk id. Any tokenizer producing id sequences can be substituted
downstream, since packing accepts raw id lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from lusokit.errors import ConfigurationError

CONTINUATION_PREFIX = "##"


@dataclass(frozen=True)
class Vocabulary:
    pieces: tuple[str, ...]
    ids: dict[str, int]
    cls_id: int
    sep_id: int
    pad_id: int
    unk_id: int
    # longest fragment any piece can consume, for bounding the greedy scan
    max_fragment_len: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ConfigurationError("vocabulary is empty")
        if len(self.ids) != len(self.pieces):
            raise ConfigurationError("vocabulary contains duplicate pieces")
        if sorted(self.ids.values()) != list(range(len(self.pieces))):
            raise ConfigurationError("vocabulary ids must be a bijection onto 0..N-1")
        specials = (self.cls_id, self.sep_id, self.pad_id, self.unk_id)
        if len(set(specials)) != 4 or any(not 0 <= s < len(self.pieces) for s in specials):
            raise ConfigurationError("cls/sep/pad/unk ids must be four distinct vocabulary ids")

    def __len__(self) -> int:
        return len(self.pieces)

    def piece(self, token_id: int) -> str:
        return self.pieces[token_id]

    @classmethod
    def build(
        cls,
        content_pieces: list[str] | tuple[str, ...],
        specials: tuple[str, str, str, str] = ("[CLS]", "[SEP]", "[PAD]", "[UNK]"),
    ) -> "Vocabulary":
        """Vocabulary from content pieces, specials prepended as ids 0..3."""
        pieces = tuple(specials) + tuple(content_pieces)
        ids = {}
        for i, piece in enumerate(pieces):
            if piece in ids:
                raise ConfigurationError(f"duplicate vocabulary piece {piece!r}")
            ids[piece] = i
        max_fragment = 1
        for piece in pieces[4:]:
            fragment = piece[len(CONTINUATION_PREFIX):] if piece.startswith(CONTINUATION_PREFIX) else piece
            max_fragment = max(max_fragment, len(fragment))
        return cls(
            pieces=pieces,
            ids=ids,
            cls_id=0,
            sep_id=1,
            pad_id=2,
            unk_id=3,
            max_fragment_len=max_fragment,
        )


def load_vocabulary(path: str | Path) -> Vocabulary:
    """Read a vocabulary file (4-line specials header, then one piece per line)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    entries = [line for line in lines if line]
    if len(entries) < 4:
        raise ConfigurationError(
            f"vocabulary file {path} needs a 4-line specials header (cls, sep, pad, unk)"
        )
    return Vocabulary.build(entries[4:], specials=tuple(entries[:4]))  # type: ignore[arg-type]


@dataclass(frozen=True, slots=True)
class TokenizedSequence:
    """Token ids bracketed by cls/sep; truncated marks a shortened sequence."""

    token_ids: tuple[int, ...]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.token_ids)

    @classmethod
    def from_ids(cls, ids: list[int] | tuple[int, ...], truncated: bool = False) -> "TokenizedSequence":
        """Ingestion path for externally tokenized id sequences."""
        if not ids:
            raise ValueError("token id sequence must be non-empty")
        return cls(token_ids=tuple(ids), truncated=truncated)


def _longest_match(word: str, pos: int, at_start: bool, vocab: Vocabulary) -> tuple[int, int] | None:
    """(token id, chars consumed) for the longest piece matching word[pos:]."""
    limit = min(len(word), pos + vocab.max_fragment_len)
    for end in range(limit, pos, -1):
        fragment = word[pos:end]
        key = fragment if at_start else CONTINUATION_PREFIX + fragment
        token_id = vocab.ids.get(key)
        if token_id is not None:
            return token_id, end - pos
    return None


def tokenize(text: str, vocab: Vocabulary) -> TokenizedSequence:
    """Greedy longest-match tokenization; deterministic in (text, vocab)."""
    ids = [vocab.cls_id]
    for word in text.split():
        pos = 0
        at_start = True
        in_unk_run = False
        while pos < len(word):
            match = _longest_match(word, pos, at_start, vocab)
            if match is None:
                if not in_unk_run:
                    ids.append(vocab.unk_id)
                    in_unk_run = True
                pos += 1
            else:
                token_id, consumed = match
                ids.append(token_id)
                pos += consumed
                in_unk_run = False
            at_start = False
    ids.append(vocab.sep_id)
    return TokenizedSequence(token_ids=tuple(ids), truncated=False)


def pieces_of(seq: TokenizedSequence, vocab: Vocabulary) -> list[str]:
    """Content pieces of a sequence with specials dropped and ## stripped."""
    out = []
    specials = {vocab.cls_id, vocab.sep_id, vocab.pad_id}
    for token_id in seq.token_ids:
        if token_id in specials:
            continue
        piece = vocab.piece(token_id)
        if piece.startswith(CONTINUATION_PREFIX):
            piece = piece[len(CONTINUATION_PREFIX):]
        out.append(piece)
    return out
