"""
Greedy score-based attacks.

Both attacks share one loop: rank positions by how much masking each one
lowers the true-class score, then walk the ranking and at each position try
every candidate replacement. The attack stops as soon as the victim's label
flips. Otherwise it keeps the candidate with the lowest true-class score,
provided that score is lower than the current one.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from engine.classifiers.base import argmax_lowest
from engine.core import MASK_TOKEN, DiffSet, Text, diff
from engine.errors import InvalidArgumentError, QueryCapReached
from .tables import ALL_CHAR_OPS, CharOp, HomoglyphMap, SynonymTable, char_candidates
from .victims import QueryCounter, Victim

logger = logging.getLogger(__name__)

CandidateFn = Callable[[str], List[str]]


@dataclass(frozen=True)
class AttackBudget:
    max_positions: int = 3
    queries_cap: int = 2000

    def __post_init__(self):
        if self.max_positions < 0 or self.queries_cap < 0:
            raise InvalidArgumentError(
                f"attack budget must be non-negative, got ({self.max_positions}, {self.queries_cap})"
            )


@dataclass(frozen=True)
class AttackOutcome:
    """
    Result of attacking one text.

    ``skipped`` marks texts the victim already misclassified (no attack run);
    ``cap_hit`` marks attacks stopped by the query cap.
    """
    success: bool
    adversarial_text: Text
    positions_changed: DiffSet
    queries_used: int
    cap_hit: bool = False
    skipped: bool = False
    example_id: Optional[str] = None

    def to_record(self) -> Dict[str, object]:
        return {
            "id": self.example_id,
            "success": self.success,
            "skipped": self.skipped,
            "cap_hit": self.cap_hit,
            "queries": self.queries_used,
            "positions": list(self.positions_changed.sorted()),
            "tokens": list(self.adversarial_text.tokens),
        }

    @classmethod
    def from_record(cls, record: Dict[str, object]) -> "AttackOutcome":
        return cls(
            success=bool(record["success"]),
            adversarial_text=Text(tuple(record["tokens"])),
            positions_changed=DiffSet(frozenset(int(p) for p in record.get("positions", ()))),
            queries_used=int(record.get("queries", 0)),
            cap_hit=bool(record.get("cap_hit", False)),
            skipped=bool(record.get("skipped", False)),
            example_id=record.get("id"),
        )


def _outcome(x: Text, current: Text, counter: QueryCounter, success: bool, example_id: Optional[str],
             cap_hit: bool = False, skipped: bool = False) -> AttackOutcome:
    return AttackOutcome(
        success=success,
        adversarial_text=current,
        positions_changed=diff(x, current),
        queries_used=counter.used,
        cap_hit=cap_hit,
        skipped=skipped,
        example_id=example_id,
    )


def greedy_attack(
    x: Text,
    y: int,
    victim: Victim,
    candidates_for: CandidateFn,
    budget: AttackBudget,
    sentinel: str = MASK_TOKEN,
    example_id: Optional[str] = None,
) -> AttackOutcome:
    """
    Shared greedy loop.

    Args:
        x: Text to perturb
        y: Label the attack tries to move away from
        victim: Score-based prediction function
        candidates_for: token -> ordered replacement candidates
        budget: Position and query caps
        sentinel: Candidates equal to this token are never used
        example_id: Copied into the outcome
    """
    counter = QueryCounter(victim, budget.queries_cap)
    current = x
    try:
        scores = counter.scores(x)
        if argmax_lowest(scores) != y:
            return _outcome(x, x, counter, False, example_id, skipped=True)
        if budget.max_positions == 0:
            return _outcome(x, x, counter, False, example_id)

        options = {
            i: [c for c in candidates_for(tok) if c != sentinel and c != tok]
            for i, tok in enumerate(x.tokens)
        }
        positions = [i for i, cands in options.items() if cands]
        importance = {i: scores[y] - counter.occlude(x, i)[y] for i in positions}
        order = sorted(positions, key=lambda i: (-importance[i], i))

        current_score = scores[y]
        changed = 0
        for i in order:
            if changed >= budget.max_positions:
                break
            best_token, best_score = None, current_score
            for candidate in options[i]:
                trial = current.replace(i, candidate)
                trial_scores = counter.scores(trial)
                if argmax_lowest(trial_scores) != y:
                    logger.debug("%s: label flipped after %d queries", example_id, counter.used)
                    return _outcome(x, trial, counter, True, example_id)
                if trial_scores[y] < best_score:
                    best_token, best_score = candidate, trial_scores[y]
            if best_token is not None:
                current = current.replace(i, best_token)
                current_score = best_score
                changed += 1
        return _outcome(x, current, counter, False, example_id)
    except QueryCapReached:
        logger.debug("%s: query cap reached", example_id)
        return _outcome(x, current, counter, False, example_id, cap_hit=True)


def attack_substitution(
    x: Text,
    y: int,
    victim: Victim,
    table: SynonymTable,
    budget: AttackBudget,
    sentinel: str = MASK_TOKEN,
    example_id: Optional[str] = None,
) -> AttackOutcome:
    """Greedy synonym substitution."""
    return greedy_attack(x, y, victim, table.get, budget, sentinel, example_id)


def attack_chars(
    x: Text,
    y: int,
    victim: Victim,
    budget: AttackBudget,
    ops: Sequence[CharOp] = ALL_CHAR_OPS,
    homoglyphs: Optional[HomoglyphMap] = None,
    max_edits: int = 2,
    sentinel: str = MASK_TOKEN,
    example_id: Optional[str] = None,
) -> AttackOutcome:
    """Greedy character-level perturbation; every edited word stays one token."""
    homoglyphs = homoglyphs or HomoglyphMap()
    ops = tuple(CharOp(op) for op in ops)
    return greedy_attack(
        x, y, victim,
        lambda token: char_candidates(token, homoglyphs, ops, max_edits),
        budget, sentinel, example_id,
    )
