"""
Child side of the external classifier protocol.

Exposes any registered in-process classifier as a line-protocol process:

    python -m engine.classifiers.worker --classifier bow --model model.json

Logs go to stderr; stdout carries protocol lines only.
"""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

from engine.core import MASK_TOKEN, MaskedText, RetentionSet
from engine.logs import install_logging
from .base import BaseClassifier, build_classifier

logger = logging.getLogger(__name__)


def _write(stream: TextIO, payload: dict) -> None:
    stream.write(json.dumps(payload) + "\n")
    stream.flush()


def serve(
    classifier: BaseClassifier,
    instream: Optional[TextIO] = None,
    outstream: Optional[TextIO] = None,
    sentinel: str = MASK_TOKEN,
) -> int:
    """
    Answer requests until the input stream closes.

    Malformed request lines are logged and skipped; the parent then times out
    on that request.

    Returns:
        Number of requests answered
    """
    instream = instream or sys.stdin
    outstream = outstream or sys.stdout
    _write(outstream, {"hello": {"classes": classifier.class_count}})

    answered = 0
    for line in instream:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
            request_id = request["id"]
            tokens = [str(t) for t in request["tokens"]]
        except (ValueError, KeyError, TypeError) as e:
            logger.error("skipping malformed request %r: %s", line.strip()[:200], e)
            continue
        kept = RetentionSet(tuple(i for i, tok in enumerate(tokens) if tok != sentinel), len(tokens))
        scores = classifier.classify(MaskedText(tuple(tokens), kept, sentinel))
        _write(outstream, {"id": request_id, "scores": list(scores.scores)})
        answered += 1

    logger.debug("input closed after %d requests", answered)
    return answered


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Serve a classifier over the line protocol")
    parser.add_argument("--classifier", default="bow", help="Registered classifier name")
    parser.add_argument("--model", dest="model_file", help="Model file (bow)")
    parser.add_argument("--rules", dest="rules_file", help="Keyword rules JSON (keyword)")
    parser.add_argument("--label", type=int, default=0, help="Constant label (constant)")
    parser.add_argument("--classes", dest="class_count", type=int, default=None, help="Class count")
    parser.add_argument("--seed", type=int, default=0, help="Lookup-table seed (lookup)")
    parser.add_argument("--sentinel", default=MASK_TOKEN, help="Mask token")
    parser.add_argument("--log-level", default="WARNING")
    args = parser.parse_args(argv)

    install_logging(level=args.log_level)
    options = {
        "model_file": args.model_file,
        "rules_file": args.rules_file,
        "label": args.label,
        "seed": args.seed,
    }
    if args.class_count is not None:
        options["class_count"] = args.class_count
    classifier = build_classifier(args.classifier, **options)
    serve(classifier, sentinel=args.sentinel)
    return 0


if __name__ == "__main__":
    sys.exit(main())
