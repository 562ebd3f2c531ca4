"""Tests for texts, masking and the retention-count rule."""
import pytest

from engine.core import (
    MASK_TOKEN,
    RetentionSet,
    Text,
    diff,
    mask,
    masked_count,
    retained_count,
    round_half_away,
)
from engine.errors import InvalidArgumentError

pytestmark = pytest.mark.unit


def test_mask_keeps_retained_positions():
    x = Text.from_string("A F C G D")
    masked = mask(x, RetentionSet.of([0, 2, 4], universe=5))
    assert str(masked) == "A [MASK] C [MASK] D"


def test_mask_full_set_is_identity():
    x = Text.from_string("the cat sat")
    assert mask(x, RetentionSet.full(3)).tokens == x.tokens


def test_mask_empty_set_masks_everything():
    masked = mask(Text.from_string("A B"), RetentionSet((), 2))
    assert masked.tokens == (MASK_TOKEN, MASK_TOKEN)


def test_mask_custom_sentinel():
    masked = mask(Text.from_string("A B"), RetentionSet.of([1], 2), sentinel="<unk>")
    assert masked.tokens == ("<unk>", "B")


def test_mask_universe_mismatch():
    with pytest.raises(InvalidArgumentError):
        mask(Text.from_string("A B C"), RetentionSet.of([0], 2))


def test_retention_set_validation():
    with pytest.raises(InvalidArgumentError):
        RetentionSet((2, 1), 3)
    with pytest.raises(InvalidArgumentError):
        RetentionSet((0, 3), 3)
    with pytest.raises(InvalidArgumentError):
        RetentionSet.of([1, 1], 3)


def test_retention_set_helpers():
    kept = RetentionSet.of([3, 0], 5)
    assert kept.indices == (0, 3)
    assert kept.complement() == (1, 2, 4)
    assert kept.intersects([4, 3])
    assert not kept.intersects([1, 2])


def test_diff_positions():
    d = diff(Text.from_string("A B C E D"), Text.from_string("A F C G D"))
    assert d.sorted() == (1, 3)
    assert len(d) == 2


def test_diff_identity_and_single():
    x = Text.from_string("A B")
    assert len(diff(x, x)) == 0
    assert diff(Text.from_string("A"), Text.from_string("B")).sorted() == (0,)


def test_diff_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        diff(Text.from_string("A B"), Text.from_string("A"))


def test_text_rejects_empty_tokens():
    with pytest.raises(InvalidArgumentError):
        Text(("a", ""))


def test_text_replace_preserves_length():
    x = Text.from_string("a b c", label=1)
    y = x.replace(1, "z")
    assert y.tokens == ("a", "z", "c")
    assert y.label == 1
    assert x.tokens == ("a", "b", "c")


def test_check_maskable_rejects_sentinel():
    with pytest.raises(InvalidArgumentError):
        Text(("a", MASK_TOKEN)).check_maskable()


@pytest.mark.parametrize("h,rho,expected", [
    (10, 0.9, 1),
    (43, 0.3, 30),
    (7, 0.0, 7),
    (10, 1.0, 0),
    (5, 0.5, 3),
    (10, 0.3, 7),
])
def test_retained_count(h, rho, expected):
    assert retained_count(h, rho) == expected


def test_masked_count_complements_retained():
    for h in range(1, 30):
        for rho in (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
            assert masked_count(h, rho) + retained_count(h, rho) == h


def test_retained_count_rejects_bad_rho():
    with pytest.raises(InvalidArgumentError):
        retained_count(10, 1.5)
    with pytest.raises(InvalidArgumentError):
        retained_count(10, -0.1)


def test_round_half_away():
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert round_half_away(3.4999999999999996) == 4
    assert round_half_away(0.49) == 0
