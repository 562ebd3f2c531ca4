"""
Dataset-level metrics: median certified robustness and empirical robustness
under attack.
"""
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence

from engine.attacks import AttackOutcome
from engine.certification import Certificate
from engine.errors import InvalidArgumentError

NOT_AVAILABLE = "N/A"


def _lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


@dataclass(frozen=True)
class CertifiedSummary:
    """
    accuracy: fraction of texts g classifies correctly.
    mcb / mcr: lower medians of radius / certified rate with misclassified
    texts below every radius; None when that median falls on a
    misclassified text.
    """
    accuracy: float
    mcb: Optional[int]
    mcr: Optional[float]
    count: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "accuracy": self.accuracy,
            "mcb": NOT_AVAILABLE if self.mcb is None else self.mcb,
            "mcr": NOT_AVAILABLE if self.mcr is None else self.mcr,
            "count": self.count,
        }


def median_certified(certs: Sequence[Certificate]) -> CertifiedSummary:
    """Accuracy, MCB and MCR of a list of certificates."""
    if not certs:
        raise InvalidArgumentError("need at least one certificate")
    radii = [-math.inf if c.radius is None else float(c.radius) for c in certs]
    rates = [-math.inf if c.certified_rate is None else c.certified_rate for c in certs]
    mcb = _lower_median(radii)
    mcr = _lower_median(rates)
    return CertifiedSummary(
        accuracy=sum(1 for c in certs if c.certified) / len(certs),
        mcb=None if mcb == -math.inf else int(mcb),
        mcr=None if mcr == -math.inf else float(mcr),
        count=len(certs),
    )


@dataclass(frozen=True)
class EmpiricalSummary:
    """Clean accuracy, accuracy under attack and attack success rate."""
    cln: float
    boa: float
    succ: float
    count: int = 0

    def __post_init__(self):
        if not 0.0 <= self.boa <= self.cln + 1e-12 or self.cln > 1.0 + 1e-12:
            raise InvalidArgumentError(f"need 0 <= boa <= cln <= 1, got boa={self.boa}, cln={self.cln}")

    def to_dict(self) -> Dict[str, object]:
        return {"cln": self.cln, "boa": self.boa, "succ": self.succ, "count": self.count}


def from_rates(cln: float, boa: float, scale: float = 1.0) -> EmpiricalSummary:
    """
    Summary from reported accuracies; ``scale`` = 100 for percentages.

    succ = (cln - boa) / cln.
    """
    cln_frac, boa_frac = cln / scale, boa / scale
    succ = 0.0 if cln_frac == 0 else (cln_frac - boa_frac) / cln_frac
    return EmpiricalSummary(cln_frac, boa_frac, succ)


def empirical_summary(clean: Mapping[str, bool], attacked: Sequence[AttackOutcome]) -> EmpiricalSummary:
    """
    Empirical robustness of one victim.

    Args:
        clean: example id -> whether the victim classified it correctly
        attacked: one outcome per correctly-classified example

    Raises:
        InvalidArgumentError: The attacked ids are not exactly the correct ids
    """
    if not clean:
        raise InvalidArgumentError("need at least one clean prediction")
    correct_ids = {i for i, ok in clean.items() if ok}
    attacked_ids = [o.example_id for o in attacked]
    if len(set(attacked_ids)) != len(attacked_ids) or set(attacked_ids) != correct_ids:
        raise InvalidArgumentError("attacks must cover exactly the correctly-classified examples")
    total = len(clean)
    successes = sum(1 for o in attacked if o.success)
    cln = len(correct_ids) / total
    boa = (len(correct_ids) - successes) / total
    succ = successes / len(correct_ids) if correct_ids else 0.0
    return EmpiricalSummary(cln, boa, succ, total)


def summarize_outcomes(outcomes: Sequence[AttackOutcome]) -> EmpiricalSummary:
    """Summary straight from attack outcomes; skipped outcomes are the misclassified texts."""
    clean = {o.example_id: not o.skipped for o in outcomes}
    return empirical_summary(clean, [o for o in outcomes if not o.skipped])
