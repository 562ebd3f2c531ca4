"""
Substitution sources for the attacks: a word-level synonym table and
character-level edits built from a homoglyph map.

Both tables are JSON objects mapping a key to an array of substitutes.
"""
import itertools
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from engine.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def _load_json_table(path: str) -> Dict[str, List[str]]:
    with open(Path(path), "r", encoding="utf-8") as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise InvalidArgumentError(f"{path}: expected a JSON object")
    table: Dict[str, List[str]] = {}
    for key, values in raw.items():
        if not isinstance(values, list):
            raise InvalidArgumentError(f"{path}: entry {key!r} is not an array")
        table[str(key)] = [str(v) for v in values]
    return table


class SynonymTable:
    """token -> ordered substitutes; a token never lists itself."""

    def __init__(self, entries: Mapping[str, Sequence[str]] = None):
        self._entries: Dict[str, Tuple[str, ...]] = {}
        for token, substitutes in (entries or {}).items():
            seen: Dict[str, None] = {}
            for s in substitutes:
                if s and s != token:
                    seen.setdefault(s, None)
            if seen:
                self._entries[token] = tuple(seen)

    @classmethod
    def from_file(cls, path: str) -> "SynonymTable":
        table = cls(_load_json_table(path))
        logger.info("loaded %d synonym entries from %s", len(table), path)
        return table

    def get(self, token: str) -> List[str]:
        return list(self._entries.get(token, ()))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: object) -> bool:
        return token in self._entries

    def to_dict(self) -> Dict[str, List[str]]:
        return {token: list(subs) for token, subs in sorted(self._entries.items())}


class HomoglyphMap:
    """character -> look-alike replacement characters."""

    def __init__(self, entries: Mapping[str, Sequence[str]] = None):
        self._entries: Dict[str, Tuple[str, ...]] = {
            ch: tuple(s for s in subs if s != ch) for ch, subs in (entries or {}).items()
        }

    @classmethod
    def from_file(cls, path: str) -> "HomoglyphMap":
        return cls(_load_json_table(path))

    def get(self, ch: str) -> Tuple[str, ...]:
        return self._entries.get(ch, ())

    def __len__(self) -> int:
        return len(self._entries)


class CharOp(str, Enum):
    HOMOGLYPH = "substitute-homoglyph"
    SWAP = "swap-adjacent"
    DELETE = "delete"
    INSERT = "insert"


ALL_CHAR_OPS: Tuple[CharOp, ...] = tuple(CharOp)


def _homoglyph_edits(token: str, homoglyphs: HomoglyphMap, max_edits: int) -> Iterable[str]:
    slots = [(i, homoglyphs.get(ch)) for i, ch in enumerate(token) if homoglyphs.get(ch)]
    for size in range(1, max_edits + 1):
        for chosen in itertools.combinations(slots, size):
            for replacement in itertools.product(*(subs for _, subs in chosen)):
                chars = list(token)
                for (i, _), r in zip(chosen, replacement):
                    chars[i] = r
                yield "".join(chars)


def _swap_edits(token: str) -> Iterable[str]:
    for i in range(len(token) - 1):
        if token[i] != token[i + 1]:
            yield token[:i] + token[i + 1] + token[i] + token[i + 2:]


def _delete_edits(token: str) -> Iterable[str]:
    if len(token) > 1:
        for i in range(len(token)):
            yield token[:i] + token[i + 1:]


def _insert_edits(token: str) -> Iterable[str]:
    # duplicate a neighbour into each interior gap
    for i in range(1, len(token)):
        yield token[:i] + token[i - 1] + token[i:]


def char_candidates(
    token: str,
    homoglyphs: HomoglyphMap,
    ops: Sequence[CharOp] = ALL_CHAR_OPS,
    max_edits: int = 2,
) -> List[str]:
    """
    Character-level variants of a token, deduplicated in generation order.

    Each variant is still a single word token. Homoglyph substitution applies
    up to ``max_edits`` replacements at once; the other operations apply one
    edit.
    """
    if max_edits < 1:
        raise InvalidArgumentError(f"max_edits must be >= 1, got {max_edits}")
    ops = [CharOp(op) for op in ops]
    seen: Dict[str, None] = {}
    for op in ops:
        if op is CharOp.HOMOGLYPH:
            edits = _homoglyph_edits(token, homoglyphs, max_edits)
        elif op is CharOp.SWAP:
            edits = _swap_edits(token)
        elif op is CharOp.DELETE:
            edits = _delete_edits(token)
        else:
            edits = _insert_edits(token)
        for candidate in edits:
            if candidate and candidate != token and not any(c.isspace() for c in candidate):
                seen.setdefault(candidate, None)
    return list(seen)
