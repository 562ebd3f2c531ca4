"""
Token sequences and the mask operation.

A Text is a whitespace-tokenized sequence of words. Masking replaces every
position outside a RetentionSet with a sentinel token; the retained positions
keep their words. Indices are 0-based everywhere.

Example:
    from engine.core import Text, RetentionSet, mask

    x = Text.from_string("A F C G D")
    masked = mask(x, RetentionSet.of([0, 2, 4], universe=5))
    print(" ".join(masked.tokens))   # A [MASK] C [MASK] D
"""
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple, Union

from engine.errors import InvalidArgumentError

MASK_TOKEN = "[MASK]"


@dataclass(frozen=True)
class Text:
    """An ordered sequence of word tokens with an optional class label."""
    tokens: Tuple[str, ...]
    label: Optional[int] = None

    def __post_init__(self):
        tokens = tuple(self.tokens)
        for token in tokens:
            if not isinstance(token, str) or token == "":
                raise InvalidArgumentError(f"tokens must be non-empty strings, got {token!r}")
        object.__setattr__(self, "tokens", tokens)
        if self.label is not None and (not isinstance(self.label, int) or self.label < 0):
            raise InvalidArgumentError(f"label must be a non-negative int, got {self.label!r}")

    @classmethod
    def from_string(cls, text: str, label: Optional[int] = None) -> "Text":
        """Tokenize on whitespace."""
        return cls(tuple(text.split()), label)

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return " ".join(self.tokens)

    def replace(self, position: int, token: str) -> "Text":
        """Return a copy with one token substituted (length is preserved)."""
        if not 0 <= position < len(self.tokens):
            raise InvalidArgumentError(f"position {position} outside [0, {len(self.tokens)})")
        tokens = list(self.tokens)
        tokens[position] = token
        return Text(tuple(tokens), self.label)

    def check_maskable(self, sentinel: str = MASK_TOKEN) -> None:
        """Raise unless the text can be masked or certified."""
        if len(self.tokens) < 1:
            raise InvalidArgumentError("text must hold at least one token")
        if sentinel in self.tokens:
            raise InvalidArgumentError(f"text already contains the mask sentinel {sentinel!r}")


@dataclass(frozen=True)
class RetentionSet:
    """The k positions left unmasked, out of a universe of h positions."""
    indices: Tuple[int, ...]
    universe: int

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        if self.universe < 0:
            raise InvalidArgumentError(f"universe must be >= 0, got {self.universe}")
        previous = -1
        for i in indices:
            if i <= previous:
                raise InvalidArgumentError("retention indices must be strictly increasing")
            if i >= self.universe:
                raise InvalidArgumentError(f"index {i} outside [0, {self.universe})")
            previous = i

    @classmethod
    def of(cls, indices: Iterable[int], universe: int) -> "RetentionSet":
        """Build from any iterable of distinct indices."""
        values = [int(i) for i in indices]
        if len(set(values)) != len(values):
            raise InvalidArgumentError("retention indices must be unique")
        return cls(tuple(sorted(values)), universe)

    @classmethod
    def full(cls, universe: int) -> "RetentionSet":
        return cls(tuple(range(universe)), universe)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: object) -> bool:
        return index in self.indices

    def __iter__(self):
        return iter(self.indices)

    def complement(self) -> Tuple[int, ...]:
        """Masked positions."""
        kept = set(self.indices)
        return tuple(i for i in range(self.universe) if i not in kept)

    def intersects(self, positions: Iterable[int]) -> bool:
        kept = set(self.indices)
        return any(p in kept for p in positions)


@dataclass(frozen=True)
class MaskedText:
    """A text whose non-retained positions hold the sentinel."""
    tokens: Tuple[str, ...]
    retained: RetentionSet
    sentinel: str = MASK_TOKEN

    def __post_init__(self):
        tokens = tuple(self.tokens)
        object.__setattr__(self, "tokens", tokens)
        if len(tokens) != self.retained.universe:
            raise InvalidArgumentError(
                f"{len(tokens)} tokens but retention universe is {self.retained.universe}"
            )

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class DiffSet:
    """Positions at which two equal-length texts differ."""
    indices: FrozenSet[int] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: object) -> bool:
        return index in self.indices

    def sorted(self) -> Tuple[int, ...]:
        return tuple(sorted(self.indices))


TokensLike = Union[Text, MaskedText, Sequence[str]]


def _tokens_of(value: TokensLike) -> Tuple[str, ...]:
    if isinstance(value, (Text, MaskedText)):
        return value.tokens
    return tuple(value)


def mask(text: Text, retained: RetentionSet, sentinel: str = MASK_TOKEN) -> MaskedText:
    """
    Apply the mask operation.

    Args:
        text: Source text of length h
        retained: Positions to keep; its universe must equal h
        sentinel: Token written at every other position

    Returns:
        MaskedText with the sentinel outside ``retained``

    Raises:
        InvalidArgumentError: On a universe/length mismatch
    """
    h = len(text.tokens)
    if retained.universe != h:
        raise InvalidArgumentError(f"retention universe {retained.universe} != text length {h}")
    kept = set(retained.indices)
    tokens = tuple(tok if i in kept else sentinel for i, tok in enumerate(text.tokens))
    return MaskedText(tokens, retained, sentinel)


def diff(x: TokensLike, x2: TokensLike) -> DiffSet:
    """
    Positions where two texts hold different tokens.

    Raises:
        InvalidArgumentError: If the lengths differ (no insertions or deletions)
    """
    a, b = _tokens_of(x), _tokens_of(x2)
    if len(a) != len(b):
        raise InvalidArgumentError(f"length mismatch: {len(a)} vs {len(b)}")
    return DiffSet(frozenset(i for i, (u, v) in enumerate(zip(a, b)) if u != v))


def round_half_away(value: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    # strip float noise such as 3.4999999999999996 before deciding the half case
    value = round(value, 9)
    if value >= 0:
        return int(math.floor(value + 0.5))
    return -int(math.floor(-value + 0.5))


def retained_count(h: int, rho: float) -> int:
    """
    Number of positions kept when a fraction ``rho`` of h words is masked.

    k = round_half_away(h - rho*h), clamped to [0, h].
    """
    if h < 1:
        raise InvalidArgumentError(f"h must be >= 1, got {h}")
    if not 0.0 <= rho <= 1.0:
        raise InvalidArgumentError(f"rho must lie in [0, 1], got {rho}")
    k = round_half_away(h - rho * h)
    return min(max(k, 0), h)


def masked_count(h: int, rho: float) -> int:
    """Number of positions replaced by the sentinel."""
    return h - retained_count(h, rho)
