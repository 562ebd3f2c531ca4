"""Tests for dataset files and the result store."""
import json

import pytest

from engine.attacks import AttackOutcome
from engine.certification import Certificate
from engine.core import DiffSet, Text
from engine.errors import InvalidArgumentError
from engine.evaluation import CERTIFICATES_FILE, OUTCOMES_FILE, Dataset, Example, ResultStore
from tests.conftest import write_dataset


@pytest.mark.unit
def test_load_tokens_and_text(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        json.dumps({"id": "a", "tokens": ["x", "y"], "label": 1}) + "\n"
        + "\n"
        + json.dumps({"id": "b", "text": "three  short words", "label": 0}) + "\n",
        encoding="utf-8",
    )
    dataset = Dataset.load_jsonl(str(path))
    assert len(dataset) == 2
    assert dataset[0].text.tokens == ("x", "y")
    assert dataset[1].text.tokens == ("three", "short", "words")
    assert dataset.class_count == 2
    assert dataset.average_length() == pytest.approx(2.5)


@pytest.mark.unit
def test_save_and_reload(tmp_path, toy_rows):
    path = write_dataset(tmp_path / "toy.jsonl", toy_rows)
    dataset = Dataset.load_jsonl(str(path))
    copy = tmp_path / "copy.jsonl"
    dataset.save_jsonl(str(copy))
    assert [ex.to_record() for ex in Dataset.load_jsonl(str(copy))] == [ex.to_record() for ex in dataset]


@pytest.mark.unit
@pytest.mark.parametrize("line", [
    "not json",
    json.dumps({"id": "a", "label": 0}),
    json.dumps({"id": "a", "tokens": ["x"]}),
])
def test_malformed_lines(tmp_path, line):
    path = tmp_path / "bad.jsonl"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(InvalidArgumentError):
        Dataset.load_jsonl(str(path))


@pytest.mark.unit
def test_duplicate_ids_and_label_range():
    text = Text(("a",))
    with pytest.raises(InvalidArgumentError):
        Dataset([Example("a", text, 0), Example("a", text, 1)])
    with pytest.raises(InvalidArgumentError):
        Dataset([Example("a", text, 2)], class_names=["neg", "pos"])


@pytest.mark.unit
def test_subset_is_seeded_and_ordered():
    dataset = Dataset.from_texts([Text((f"w{i}",), i % 2) for i in range(50)])
    first = [ex.id for ex in dataset.subset(10, seed=3)]
    assert first == [ex.id for ex in dataset.subset(10, seed=3)]
    assert first != [ex.id for ex in dataset.subset(10, seed=4)]
    assert first == sorted(first, key=lambda i: int(i.split("-")[1]))
    assert dataset.subset(80) is dataset


@pytest.mark.unit
def test_result_store_files(tmp_path):
    store = ResultStore(str(tmp_path / "run"))
    certs = [Certificate(1, 0.9, 0.8, 2, 10, "a"), Certificate.abstain(4, "b")]
    store.write_certificates(certs)
    assert [Certificate.from_record(r) for r in store.read_records(CERTIFICATES_FILE)] == certs

    outcome = AttackOutcome(True, Text(("x",)), DiffSet(frozenset({0})), 4, example_id="a")
    store.write_outcomes([outcome], victim="base")
    records = store.read_records(OUTCOMES_FILE)
    assert records[0]["victim"] == "base"
    assert AttackOutcome.from_record(records[0]) == outcome

    store.write_summary({"mcb": 2, "accuracy": 0.5})
    assert store.read_summary() == {"mcb": 2, "accuracy": 0.5}
    table = store.write_table(["id", "radius"], [["a", 2], ["b", None]])
    assert table.read_text(encoding="utf-8") == "id,radius\na,2\nb,\n"
    assert len(store.written) == 4


@pytest.mark.unit
def test_missing_records(tmp_path):
    with pytest.raises(FileNotFoundError):
        ResultStore(str(tmp_path)).read_records(CERTIFICATES_FILE)


@pytest.mark.unit
def test_summary_is_stable(tmp_path):
    store = ResultStore(str(tmp_path))
    store.write_summary({"b": 1, "a": [1, 2]}, name="one.json")
    store.write_summary({"a": [1, 2], "b": 1}, name="two.json")
    assert store.path("one.json").read_bytes() == store.path("two.json").read_bytes()


@pytest.mark.unit
def test_summary_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        ResultStore(str(tmp_path)).write_summary({"value": float("nan")})
