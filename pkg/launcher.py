#!/usr/bin/env python3
"""
maskcert launcher

Command-line entry point: parses flags, layers them over the YAML
configuration and hands the selected subcommand to the evaluation pipeline.

Usage:
    python launcher.py toy --out data/toy
    python launcher.py train --data data/toy/train.jsonl --rho 0.9 --model out/bow.json
    python launcher.py certify --data data/toy/test.jsonl --classifier bow --model out/bow.json
    python launcher.py attack --data data/toy/test.jsonl --synonyms data/toy/synonyms.json --victim smoothed
    python launcher.py risk --h 10 --rho 0.3 --gamma 0.1
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

# Add project root to path
PROJECT_ROOT = Path(__file__).parent
sys.path.insert(0, str(PROJECT_ROOT))

from engine.config import ConfigManager  # noqa: E402
from engine.errors import UsageError  # noqa: E402
from engine.evaluation.pipeline import COMMANDS, run_pipeline  # noqa: E402
from engine.logs import install_logging  # noqa: E402

logger = logging.getLogger("maskcert.launcher")

# flag destination -> dot-path in the configuration
FLAG_KEYS: Dict[str, str] = {
    "rho": "smoothing.rho",
    "n": "smoothing.n",
    "nprime": "smoothing.n_prime",
    "alpha": "smoothing.alpha",
    "ensemble": "smoothing.ensemble",
    "sampler": "sampling.mode",
    "weights": "sampling.weights_file",
    "seed": "sampling.seed",
    "sentinel": "masking.sentinel",
    "synonyms": "attacks.synonyms_file",
    "homoglyphs": "attacks.homoglyphs_file",
    "data": "paths.data",
    "out": "paths.output_dir",
    "limit": "data.limit",
    "enum_cap": "certification.enum_cap",
    "beta_mode": "certification.beta_mode",
    "nr": "certification.beta_estimator.n_r",
    "nk": "certification.beta_estimator.n_k",
    "r": "certification.beta_estimator.radii",
    "workers": "runtime.workers",
    "classifier": "classifiers.kind",
    "classes": "classifiers.class_count",
    "label": "classifiers.constant_label",
    "model": "classifiers.bow.model_file",
    "rules": "classifiers.keyword.rules_file",
    "epochs": "classifiers.bow.epochs",
    "command": "classifiers.external.command",
    "pool": "classifiers.external.pool",
    "timeout": "classifiers.external.timeout",
    "attack": "attacks.kind",
    "victim": "attacks.victim",
    "attack_n": "attacks.n",
    "max_positions": "attacks.max_positions",
    "query_cap": "attacks.query_cap",
    "gamma": "risk.gamma",
    "h": "risk.h",
    "log_level": "logging.level",
    "log_file": "logging.file",
}


def _common_flags() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)

    run = common.add_argument_group("run")
    run.add_argument("--config", metavar="FILE", help="Extra YAML merged over config/")
    run.add_argument("--env", help="Configuration environment (development, production)")
    run.add_argument("--data", metavar="FILE", help="Dataset JSONL (id, tokens|text, label)")
    run.add_argument("--out", metavar="DIR", help="Output directory")
    run.add_argument("--limit", type=int, help="Evaluate a seeded random subset of this size")
    run.add_argument("--seed", type=int, help="Master seed")
    run.add_argument("--workers", type=int, help="Examples evaluated in parallel")
    run.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    run.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    run.add_argument("--log-json", action="store_true", help="Emit log records as JSON lines")
    run.add_argument("--log-file", metavar="FILE")

    smoothing = common.add_argument_group("smoothing")
    smoothing.add_argument("--rho", type=float, help="Masking rate in [0, 1)")
    smoothing.add_argument("--n", type=int, help="Prediction samples")
    smoothing.add_argument("--nprime", type=int, help="Certification samples")
    smoothing.add_argument("--alpha", type=float, help="Confidence level of the lower bound")
    smoothing.add_argument("--ensemble", choices=["vote", "logit"])
    smoothing.add_argument("--sampler", choices=["uniform", "weighted"])
    smoothing.add_argument("--weights", metavar="FILE", help="Per-example masking weights (weighted sampler)")
    smoothing.add_argument("--sentinel", help="Mask token")

    classifier = common.add_argument_group("base classifier")
    classifier.add_argument("--classifier", choices=["constant", "keyword", "bow", "lookup", "external"])
    classifier.add_argument("--model", metavar="FILE", help="Bag-of-words model file")
    classifier.add_argument("--rules", metavar="FILE", help="Keyword rules JSON (word -> label)")
    classifier.add_argument("--label", type=int, help="Label of the constant classifier")
    classifier.add_argument("--classes", type=int, help="Number of classes")
    classifier.add_argument("--command", help="External classifier command line")
    classifier.add_argument("--pool", type=int, help="External classifier processes")
    classifier.add_argument("--timeout", type=float, help="External classifier reply timeout (seconds)")
    classifier.add_argument("--epochs", type=int, help="Mask-augmented training epochs")

    certification = common.add_argument_group("certification")
    certification.add_argument("--beta-mode", choices=["approx", "monte_carlo", "exact", "conservative"])
    certification.add_argument("--enum-cap", type=int, help="Exhaustive enumeration cap")
    certification.add_argument("--nr", type=int, help="Outer draws of the beta estimator")
    certification.add_argument("--nk", type=int, help="Inner draws of the beta estimator")
    certification.add_argument("--r", type=int, nargs="+", help="Perturbation sizes for the beta sweep")

    attack = common.add_argument_group("attacks")
    attack.add_argument("--attack", choices=["substitution", "chars"])
    attack.add_argument("--victim", choices=["base", "smoothed"])
    attack.add_argument("--synonyms", metavar="FILE", help="Synonym table JSON")
    attack.add_argument("--homoglyphs", metavar="FILE", help="Homoglyph map JSON")
    attack.add_argument("--attack-n", type=int, help="Samples per smoothed-victim query")
    attack.add_argument("--max-positions", type=int)
    attack.add_argument("--query-cap", type=int)

    risk = common.add_argument_group("risk")
    risk.add_argument("--gamma", type=float, help="Fraction of words the attacker perturbs")
    risk.add_argument("--h", type=int, help="Text length (default: average length of --data)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="maskcert",
        description="Certified robustness to word substitutions via random word masking",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
  %(prog)s toy --out data/toy                     # synthetic corpus + synonym table
  %(prog)s certify --data test.jsonl --model bow.json --rho 0.9
  %(prog)s risk --h 10 --rho 0.3 --gamma 0.1      # prints 0.7
        """,
    )
    parser.add_argument("--version", action="version", version="maskcert 0.1.0")
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND", required=True)
    helps = {
        "train": "Mask-augmented training of the bag-of-words classifier",
        "predict": "Smoothed predictions",
        "certify": "Certified radii and the certified summary",
        "attack": "Greedy attacks on the base or smoothed classifier",
        "beta": "beta estimates against the plain vote fraction",
        "risk": "Probability that masking hides every perturbed word",
        "report": "Summaries of existing certificate and attack files",
        "toy": "Write the synthetic corpus and its synonym table",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], allow_abbrev=False)
    return parser


def apply_flags(config: ConfigManager, args: argparse.Namespace) -> None:
    """Write the flags that were given into the configuration."""
    config.update({path: getattr(args, dest, None) for dest, path in FLAG_KEYS.items()})
    if args.no_progress:
        config.set("runtime.progress", False)
    if args.log_json:
        config.set("logging.json", True)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    try:
        config = ConfigManager(environment=args.env, extra_file=args.config)
    except UsageError as e:
        install_logging()
        logger.error("%s", e)
        return 2
    apply_flags(config, args)

    install_logging(
        level=config.get("logging.level", "INFO"),
        fmt=config.get("logging.format", "%(asctime)s [%(levelname)s] %(name)s: %(message)s"),
        json_output=bool(config.get("logging.json", False)),
        file=config.get("logging.file"),
    )
    return run_pipeline(args.cmd, config)


if __name__ == "__main__":
    sys.exit(main())
