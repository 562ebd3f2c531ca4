"""Tests for the external-process classifier protocol (client and worker)."""
import io
import json

import pytest

from engine.classifiers import (
    ConstantClassifier,
    ExternalClassifier,
    ExternalClassifierPool,
    KeywordClassifier,
    build_classifier,
    classify_external,
)
from engine.classifiers import worker
from engine.core import RetentionSet, Text, mask
from engine.errors import ProtocolError, TransportError
from engine.smoothing import SmoothingConfig, classifier_g

pytestmark = pytest.mark.integration


def _masked(sentence: str = "a b c"):
    x = Text.from_string(sentence)
    return mask(x, RetentionSet.of([0, 2], len(x)))


def test_fixed_scores(stub_command):
    with ExternalClassifier(stub_command("fixed"), timeout=10) as f:
        assert f.class_count == 2
        scores = f.classify(_masked())
        assert scores.scores == (0.2, 0.8)
        assert scores.argmax == 1
        assert classify_external(_masked(), f).argmax == 1


def test_wrong_id_is_a_protocol_error(stub_command):
    with ExternalClassifier(stub_command("wrong-id"), timeout=10) as f:
        with pytest.raises(ProtocolError):
            f.classify(_masked())


def test_non_finite_score_is_a_protocol_error(stub_command):
    with ExternalClassifier(stub_command("nan"), timeout=10) as f:
        with pytest.raises(ProtocolError):
            f.classify(_masked())


def test_garbage_line_is_a_protocol_error(stub_command):
    with ExternalClassifier(stub_command("garbage"), timeout=10) as f:
        with pytest.raises(ProtocolError):
            f.classify(_masked())


def test_dead_process_is_a_transport_error(stub_command):
    with ExternalClassifier(stub_command("die"), timeout=10) as f:
        with pytest.raises(TransportError) as info:
            f.classify(_masked())
    assert not isinstance(info.value, ProtocolError)


def test_bad_handshake(stub_command):
    with pytest.raises(ProtocolError):
        ExternalClassifier(stub_command("bad-hello"), timeout=10)


def test_silent_process_times_out(stub_command):
    with pytest.raises(TransportError):
        ExternalClassifier(stub_command("silent"), timeout=10, handshake_timeout=0.5)


def test_late_reply_does_not_poison_later_requests(stub_command):
    with ExternalClassifier(stub_command("slow-once"), timeout=0.5, handshake_timeout=10) as f:
        with pytest.raises(TransportError) as info:
            f.classify(_masked())
        assert not isinstance(info.value, ProtocolError)
        f.timeout = 10
        assert f.classify(_masked()).scores == (0.2, 0.8)
        assert f.classify(_masked("x y")).scores == (0.2, 0.8)


def test_missing_executable():
    with pytest.raises(TransportError):
        ExternalClassifier(["/nonexistent/classifier-binary"])


def test_sampling_error_names_the_failing_copy(stub_command):
    with ExternalClassifier(stub_command("wrong-id"), timeout=10) as f:
        with pytest.raises(ProtocolError) as info:
            classifier_g(Text.from_string("a b c d"), f, SmoothingConfig(rho=0.5, n=5, n_prime=5), 5)
    assert info.value.sample_index == 0


def test_pool_spreads_requests(stub_command):
    with ExternalClassifierPool(stub_command("fixed"), size=2, timeout=10) as pool:
        assert len(pool.members) == 2
        for _ in range(6):
            assert pool.classify(_masked()).argmax == 1


def test_build_from_options(stub_command):
    f = build_classifier("external", command=stub_command("fixed"), pool=2, timeout=10)
    try:
        assert isinstance(f, ExternalClassifierPool)
        assert f.classify(_masked()).scores == (0.2, 0.8)
    finally:
        f.close()


# ─── Worker side ─────────────────────────────────────────────────────────────

def test_serve_answers_requests():
    f = KeywordClassifier({"great": 1}, default=0, class_count=2)
    requests = "\n".join([
        json.dumps({"id": 1, "tokens": ["a", "great", "day"]}),
        json.dumps({"id": 2, "tokens": ["a", "[MASK]", "day"]}),
        "",
        "not json",
        json.dumps({"id": 3, "tokens": ["great"]}),
    ]) + "\n"
    out = io.StringIO()
    answered = worker.serve(f, io.StringIO(requests), out)
    lines = [json.loads(line) for line in out.getvalue().splitlines()]
    assert answered == 3
    assert lines[0] == {"hello": {"classes": 2}}
    assert [line["id"] for line in lines[1:]] == [1, 2, 3]
    assert lines[1]["scores"] == [0.0, 1.0]
    assert lines[2]["scores"] == [1.0, 0.0]


def test_worker_main(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"id": 9, "tokens": ["x"]}) + "\n"))
    out = io.StringIO()
    monkeypatch.setattr("sys.stdout", out)
    assert worker.main(["--classifier", "constant", "--label", "1", "--classes", "3"]) == 0
    lines = [json.loads(line) for line in out.getvalue().splitlines()]
    assert lines == [{"hello": {"classes": 3}}, {"id": 9, "scores": [0.0, 1.0, 0.0]}]


def test_serve_constant_round_trip():
    out = io.StringIO()
    worker.serve(ConstantClassifier(0, 2), io.StringIO(""), out)
    assert json.loads(out.getvalue()) == {"hello": {"classes": 2}}
