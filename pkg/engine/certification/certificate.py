"""
Certificates and the radius search shared by every certification path.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Union

from engine.errors import InvalidArgumentError
from .bounds import delta

BetaFn = Callable[[int], float]


@dataclass(frozen=True)
class Certificate:
    """
    Outcome of certifying one text.

    ``label`` is None when g misclassifies the text ("N/A"); ``radius`` is
    then None too.
    """
    label: Optional[int]
    p_lower: float
    beta_hat: float
    radius: Optional[int]
    h: int
    example_id: Optional[str] = None

    def __post_init__(self):
        if self.h < 1:
            raise InvalidArgumentError(f"h must be >= 1, got {self.h}")
        if self.radius is not None and not 0 <= self.radius <= self.h:
            raise InvalidArgumentError(f"radius {self.radius} outside [0, {self.h}]")

    @classmethod
    def abstain(cls, h: int, example_id: Optional[str] = None) -> "Certificate":
        return cls(None, 0.0, 0.0, None, h, example_id)

    @property
    def certified(self) -> bool:
        return self.label is not None

    @property
    def certified_rate(self) -> Optional[float]:
        if self.radius is None:
            return None
        return self.radius / self.h

    def to_record(self) -> Dict[str, object]:
        return {
            "id": self.example_id,
            "label": self.label,
            "p_lower": self.p_lower,
            "beta": self.beta_hat,
            "radius": self.radius,
            "certified_rate": self.certified_rate,
            "h": self.h,
        }

    @classmethod
    def from_record(cls, record: Dict[str, object]) -> "Certificate":
        return cls(
            label=record.get("label"),
            p_lower=float(record.get("p_lower") or 0.0),
            beta_hat=float(record.get("beta") or 0.0),
            radius=record.get("radius"),
            h=int(record["h"]),
            example_id=record.get("id"),
        )


def certified_radius(h: int, k: int, p_lower: float, beta: Union[float, BetaFn]) -> Optional[int]:
    """
    Largest d in [0, h] with p_lower - beta * delta(h, k, d) > 0.5.

    ``beta`` is a constant or a function of the candidate radius. The scan
    stops at the first failing radius and returns the one before it; None
    when even d = 0 fails.
    """
    beta_of = beta if callable(beta) else (lambda d: beta)
    last: Optional[int] = None
    for d in range(h + 1):
        overlap = delta(h, k, d)
        penalty = beta_of(d) * overlap if overlap > 0 else 0.0
        if p_lower - penalty > 0.5:
            last = d
        else:
            break
    return last
