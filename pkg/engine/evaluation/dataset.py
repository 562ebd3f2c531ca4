"""
Labelled text datasets stored as JSON lines.

Each line is {"id": str, "tokens": [...], "label": int}; a whitespace
tokenized "text" field may replace "tokens".
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np

from engine.core import Text
from engine.errors import InvalidArgumentError
from engine.sampling import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Example:
    id: str
    text: Text
    label: int

    def to_record(self) -> Dict[str, object]:
        return {"id": self.id, "tokens": list(self.text.tokens), "label": self.label}


class Dataset:
    """An ordered collection of examples with unique ids."""

    def __init__(self, examples: Sequence[Example], class_names: Optional[Sequence[str]] = None):
        self.examples: List[Example] = list(examples)
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise InvalidArgumentError(f"duplicate example id {ex.id!r}")
            seen.add(ex.id)
        labels = [ex.label for ex in self.examples]
        if class_names is None:
            width = max(max(labels, default=0) + 1, 2)
            class_names = [str(c) for c in range(width)]
        self.class_names = list(class_names)
        for ex in self.examples:
            if not 0 <= ex.label < len(self.class_names):
                raise InvalidArgumentError(
                    f"{ex.id}: label {ex.label} outside [0, {len(self.class_names)})"
                )

    @classmethod
    def from_texts(cls, texts: Sequence[Text], prefix: str = "ex", class_names=None) -> "Dataset":
        return cls(
            [Example(f"{prefix}-{i}", t, t.label) for i, t in enumerate(texts)],
            class_names,
        )

    @classmethod
    def load_jsonl(cls, path: str, class_names: Optional[Sequence[str]] = None) -> "Dataset":
        """
        Read a dataset file.

        Raises:
            InvalidArgumentError: Malformed line, missing field or bad label
        """
        examples: List[Example] = []
        with open(Path(path), "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except ValueError as e:
                    raise InvalidArgumentError(f"{path}:{lineno}: not JSON ({e})") from e
                if "tokens" in record:
                    tokens = tuple(str(t) for t in record["tokens"])
                elif "text" in record:
                    tokens = tuple(str(record["text"]).split())
                else:
                    raise InvalidArgumentError(f"{path}:{lineno}: needs 'tokens' or 'text'")
                if "label" not in record:
                    raise InvalidArgumentError(f"{path}:{lineno}: missing 'label'")
                label = int(record["label"])
                example_id = str(record.get("id", f"line-{lineno}"))
                examples.append(Example(example_id, Text(tokens, label), label))
        logger.info("loaded %d examples from %s", len(examples), path)
        return cls(examples, class_names)

    def save_jsonl(self, path: str) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            for ex in self.examples:
                f.write(json.dumps(ex.to_record(), sort_keys=True) + "\n")
        return target

    def subset(self, size: int, seed: int = 0) -> "Dataset":
        """A seeded random subset, kept in original order."""
        if size >= len(self.examples):
            return self
        rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "subset", size)))
        chosen = np.sort(rng.choice(len(self.examples), size=size, replace=False))
        return Dataset([self.examples[i] for i in chosen], self.class_names)

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    @property
    def texts(self) -> List[Text]:
        return [ex.text for ex in self.examples]

    def average_length(self) -> float:
        if not self.examples:
            raise InvalidArgumentError("dataset is empty")
        return sum(len(ex.text) for ex in self.examples) / len(self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[Example]:
        return iter(self.examples)

    def __getitem__(self, index: int) -> Example:
        return self.examples[index]
