"""
Result Storage System
Writes run artifacts (certificates, attack outcomes, summaries, CSV tables)
under one output directory.

JSON is written with sorted keys and no timestamps, so two runs with the same
configuration and seed produce byte-identical files.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from engine.attacks import AttackOutcome

logger = logging.getLogger(__name__)

CERTIFICATES_FILE = "certificates.jsonl"
OUTCOMES_FILE = "outcomes.jsonl"
PREDICTIONS_FILE = "predictions.jsonl"
SUMMARY_FILE = "summary.json"
TABLE_FILE = "table.csv"


def _dumps(record: Any) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=False)


class ResultStore:
    """Stores and reloads the artifacts of one run."""

    def __init__(self, output_dir: str = "results"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.written: List[Path] = []

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def write_records(self, name: str, records: Iterable[Dict[str, Any]]) -> Path:
        """Write one JSON object per line."""
        target = self.path(name)
        count = 0
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            for record in records:
                f.write(_dumps(record) + "\n")
                count += 1
        self._saved(target, count)
        return target

    def read_records(self, name: str) -> List[Dict[str, Any]]:
        target = self.path(name)
        if not target.exists():
            raise FileNotFoundError(f"{target} not found")
        with open(target, "r", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]

    def write_certificates(self, certificates: Sequence[Any]) -> Path:
        return self.write_records(CERTIFICATES_FILE, (c.to_record() for c in certificates))

    def write_outcomes(self, outcomes: Sequence[AttackOutcome], victim: str) -> Path:
        return self.write_records(OUTCOMES_FILE, ({**o.to_record(), "victim": victim} for o in outcomes))

    def write_summary(self, summary: Dict[str, Any], name: str = SUMMARY_FILE) -> Path:
        target = self.path(name)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            json.dump(summary, f, sort_keys=True, indent=2, allow_nan=False)
            f.write("\n")
        self._saved(target, 1)
        return target

    def read_summary(self, name: str = SUMMARY_FILE) -> Dict[str, Any]:
        with open(self.path(name), "r", encoding="utf-8") as f:
            return json.load(f)

    def write_table(self, header: Sequence[str], rows: Iterable[Sequence[Any]], name: str = TABLE_FILE) -> Path:
        target = self.path(name)
        count = 0
        with open(target, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
                count += 1
        self._saved(target, count)
        return target

    def _saved(self, target: Path, count: int) -> None:
        self.written.append(target)
        logger.info("wrote %d record(s) to %s", count, target)
