"""
Command pipeline: wires datasets, classifiers, smoothing, certification and
attacks into the subcommands exposed by the launcher.

Every command reads its settings from a ConfigManager (the launcher writes
command-line flags into it) and writes its artifacts through a ResultStore.
Per-example work is sharded over joblib workers; each example's randomness
depends only on the master seed and the example's tokens, so artifacts are
identical for any worker count.
"""
import logging
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from joblib import Parallel, delayed

from engine.attacks import (
    AttackBudget,
    AttackOutcome,
    BaseVictim,
    CharOp,
    HomoglyphMap,
    SmoothedVictim,
    SynonymTable,
    attack_chars,
    attack_substitution,
)
from engine.certification import (
    BetaEstimatorConfig,
    BetaMode,
    Certificate,
    RiskParams,
    beta_sweep,
    certify,
    risk_probability,
    risk_probability_for_dataset,
)
from engine.classifiers import BaseClassifier, BowModel, build_classifier, train_bow
from engine.config import ConfigManager
from engine.errors import InvalidArgumentError, MaskCertError, UsageError
from engine.sampling import FileWeightProvider, InverseFrequencyWeightProvider, SamplerMode, WeightProvider
from engine.smoothing import (
    SmoothedClassifier,
    SmoothingConfig,
    classifier_g,
    decide,
    distribution_entropy,
    text_batch,
)
from .dataset import Dataset, Example
from .metrics import median_certified, summarize_outcomes
from .monitor import ProgressTracker, print_rows, print_summary
from .results import CERTIFICATES_FILE, OUTCOMES_FILE, PREDICTIONS_FILE, ResultStore

logger = logging.getLogger(__name__)

COMMANDS = ("train", "predict", "certify", "attack", "beta", "risk", "report", "toy")


# ─────────────────────────────────────────────
#  Building blocks from configuration
# ─────────────────────────────────────────────

def load_dataset(config: ConfigManager) -> Dataset:
    path = config.get("paths.data")
    if not path:
        raise UsageError("this command needs --data FILE")
    if not Path(path).exists():
        raise UsageError(f"dataset not found: {path}")
    dataset = Dataset.load_jsonl(path, config.get("data.class_names"))
    limit = config.get("data.limit")
    if limit:
        dataset = dataset.subset(int(limit), int(config.get("sampling.seed", 0)))
    if not len(dataset):
        raise UsageError(f"dataset {path} is empty")
    return dataset


def make_classifier(config: ConfigManager, class_count: Optional[int] = None) -> BaseClassifier:
    """Instantiate the configured base classifier."""
    kind = config.get("classifiers.kind", "bow")
    options = {
        "class_count": config.get("classifiers.class_count") or class_count,
        "label": config.get("classifiers.constant_label", 0),
        "seed": config.get("classifiers.lookup_seed", 0),
        "scores": config.get("classifiers.lookup_scores", False),
        "rules_file": config.get("classifiers.keyword.rules_file"),
        "default": config.get("classifiers.keyword.default", 0),
        "model_file": config.get("classifiers.bow.model_file"),
        "command": config.get("classifiers.external.command"),
        "pool": config.get("classifiers.external.pool", 1),
        "timeout": config.get("classifiers.external.timeout", 30.0),
    }
    options = {k: v for k, v in options.items() if v is not None}
    try:
        classifier = build_classifier(kind, **options)
    except KeyError as e:
        raise UsageError(str(e)) from e
    logger.info("base classifier: %r", classifier)
    return classifier


def smoothing_config(config: ConfigManager) -> SmoothingConfig:
    try:
        return SmoothingConfig.from_config(config)
    except (InvalidArgumentError, ValueError) as e:
        raise UsageError(f"invalid smoothing configuration: {e}") from e


def weight_provider(config: ConfigManager, dataset: Dataset) -> Optional[WeightProvider]:
    if SamplerMode(config.get("sampling.mode", "uniform")) is not SamplerMode.WEIGHTED:
        return None
    path = config.get("sampling.weights_file")
    if path:
        return FileWeightProvider(path)
    logger.info("no weight file; masking rare words more often (inverse corpus frequency)")
    return InverseFrequencyWeightProvider(dataset.texts)


def _config_for(cfg: SmoothingConfig, provider: Optional[WeightProvider], ex: Example) -> SmoothingConfig:
    if provider is None:
        return cfg
    return cfg.with_sampler(cfg.sampler.with_weights(provider.weights_for(ex.id, ex.text)))


def _parallel_map(
    fn: Callable[..., Any],
    items: Sequence[Any],
    workers: int,
    threads: bool,
    description: str,
    progress: bool,
) -> List[Any]:
    """Ordered map over items with a progress bar."""
    results: List[Any] = []
    with ProgressTracker(description, total=len(items), enabled=progress) as tracker:
        if workers <= 1:
            for item in items:
                results.append(fn(item))
                tracker.update()
        else:
            runner = Parallel(n_jobs=workers, prefer="threads" if threads else "processes", return_as="generator")
            for result in runner(delayed(fn)(item) for item in items):
                results.append(result)
                tracker.update()
    return results


class _Run:
    """Shared state of one command invocation."""

    def __init__(self, config: ConfigManager):
        self.config = config
        self.workers = max(int(config.get("runtime.workers", 1)), 1)
        self.progress = bool(config.get("runtime.progress", True))
        self._classifiers: List[BaseClassifier] = []

    @cached_property
    def store(self) -> ResultStore:
        return ResultStore(self.config.get("paths.output_dir", "./results"))

    def classifier(self, class_count: int) -> BaseClassifier:
        f = make_classifier(self.config, class_count)
        self._classifiers.append(f)
        return f

    def close(self) -> None:
        for f in self._classifiers:
            close = getattr(f, "close", None)
            if close is not None:
                close()

    @property
    def threads(self) -> bool:
        return self.config.get("classifiers.kind") == "external"

    def map(self, fn, items, description: str) -> List[Any]:
        return _parallel_map(fn, items, self.workers, self.threads, description, self.progress)


# ─────────────────────────────────────────────
#  Per-example work
# ─────────────────────────────────────────────

def _predict_one(ex: Example, f: BaseClassifier, cfg: SmoothingConfig) -> Dict[str, Any]:
    dist = classifier_g(ex.text, f, cfg, cfg.n, batch=text_batch(ex.text, "predict"))
    prediction = decide(dist, cfg.ensemble)
    return {
        "id": ex.id,
        "gold": ex.label,
        "label": prediction.label,
        "p_hat": prediction.p_hat,
        "entropy": distribution_entropy(dist),
    }


def _certify_one(ex: Example, f: BaseClassifier, cfg: SmoothingConfig, beta_mode: BetaMode,
                 est: BetaEstimatorConfig, enum_cap: int) -> Certificate:
    return certify(ex.text, ex.label, f, cfg, beta_mode, est, enum_cap, example_id=ex.id)


def _attack_one(ex: Example, f: BaseClassifier, cfg: SmoothingConfig, options: Dict[str, Any]) -> AttackOutcome:
    if options["victim"] == "smoothed":
        victim = SmoothedVictim(SmoothedClassifier(f, cfg), n=options["n"])
    else:
        victim = BaseVictim(f, cfg.sentinel)
    budget = options["budget"]
    if options["kind"] == "chars":
        return attack_chars(ex.text, ex.label, victim, budget, options["ops"], options["homoglyphs"],
                            options["max_edits"], cfg.sentinel, ex.id)
    return attack_substitution(ex.text, ex.label, victim, options["table"], budget, cfg.sentinel, ex.id)


# ─────────────────────────────────────────────
#  Commands
# ─────────────────────────────────────────────

def cmd_train(run: _Run) -> None:
    config = run.config
    dataset = load_dataset(config)
    cfg = smoothing_config(config)
    model = train_bow(
        dataset.texts,
        rho=cfg.rho,
        epochs=int(config.get("classifiers.bow.epochs", 10)),
        spec=cfg.sampler,
        class_count=dataset.class_count,
        smoothing=float(config.get("classifiers.bow.smoothing", 1.0)),
        sentinel=cfg.sentinel,
    )
    target = config.get("classifiers.bow.model_file") or str(run.store.path("model.json"))
    model.save(target)
    logger.info("saved model to %s", target)
    run.store.write_summary({
        "classes": model.class_count,
        "examples": len(dataset),
        "model": str(target),
        "rho": cfg.rho,
        "vocab": len(model.vocab),
    })


def cmd_predict(run: _Run) -> None:
    dataset = load_dataset(run.config)
    cfg = smoothing_config(run.config)
    f = run.classifier(dataset.class_count)
    provider = weight_provider(run.config, dataset)
    records = run.map(lambda ex: _predict_one(ex, f, _config_for(cfg, provider, ex)), dataset.examples, "predict")
    run.store.write_records(PREDICTIONS_FILE, records)
    accuracy = sum(1 for r in records if r["label"] == r["gold"]) / len(records)
    entropy = sum(r["entropy"] for r in records) / len(records)
    summary = {"accuracy": accuracy, "count": len(records), "mean_entropy": entropy}
    run.store.write_summary(summary)
    run.store.write_table(["id", "gold", "label", "p_hat"], ([r["id"], r["gold"], r["label"], r["p_hat"]] for r in records))
    print_summary("predict", summary)


def _estimator(config: ConfigManager) -> BetaEstimatorConfig:
    return BetaEstimatorConfig(
        n_r=int(config.get("certification.beta_estimator.n_r", 200)),
        n_k=int(config.get("certification.beta_estimator.n_k", 10000)),
    )


def cmd_certify(run: _Run) -> None:
    config = run.config
    dataset = load_dataset(config)
    cfg = smoothing_config(config)
    f = run.classifier(dataset.class_count)
    beta_mode = BetaMode(config.get("certification.beta_mode", "approx"))
    est = _estimator(config)
    enum_cap = int(config.get("certification.enum_cap", 1_000_000))
    certs = run.map(lambda ex: _certify_one(ex, f, cfg, beta_mode, est, enum_cap), dataset.examples, "certify")
    run.store.write_certificates(certs)
    summary = median_certified(certs)
    record = {**summary.to_dict(), "rho": cfg.rho, "beta_mode": beta_mode.value}
    run.store.write_summary(record)
    run.store.write_table(
        ["rho", "accuracy", "mcb", "mcr"],
        [[cfg.rho, summary.accuracy, record["mcb"], record["mcr"]]],
    )
    print_summary("certify", record)


def cmd_attack(run: _Run) -> None:
    config = run.config
    dataset = load_dataset(config)
    cfg = smoothing_config(config)
    f = run.classifier(dataset.class_count)
    kind = config.get("attacks.kind", "substitution")
    victim = config.get("attacks.victim", "smoothed")
    if kind not in ("substitution", "chars"):
        raise UsageError(f"unknown attack {kind!r}")
    if victim not in ("base", "smoothed"):
        raise UsageError(f"unknown victim {victim!r}")

    options: Dict[str, Any] = {
        "kind": kind,
        "victim": victim,
        "n": int(config.get("attacks.n", 100)),
        "budget": AttackBudget(int(config.get("attacks.max_positions", 3)), int(config.get("attacks.query_cap", 2000))),
        "max_edits": int(config.get("attacks.max_char_edits", 2)),
        "ops": tuple(CharOp(op) for op in config.get("attacks.char_ops", [op.value for op in CharOp])),
        "table": SynonymTable(),
        "homoglyphs": HomoglyphMap(),
    }
    if kind == "substitution":
        path = config.get("attacks.synonyms_file")
        if not path:
            raise UsageError("substitution attacks need --synonyms FILE")
        options["table"] = SynonymTable.from_file(path)
    elif config.get("attacks.homoglyphs_file"):
        options["homoglyphs"] = HomoglyphMap.from_file(config.get("attacks.homoglyphs_file"))

    provider = weight_provider(config, dataset)
    outcomes = run.map(
        lambda ex: _attack_one(ex, f, _config_for(cfg, provider, ex), options),
        dataset.examples,
        f"attack ({victim})",
    )
    run.store.write_outcomes(outcomes, victim)
    summary = summarize_outcomes(outcomes)
    record = {**summary.to_dict(), "attack": kind, "victim": victim}
    run.store.write_summary(record)
    run.store.write_table(
        ["victim", "attack", "cln", "boa", "succ"],
        [[victim, kind, round(100 * summary.cln, 1), round(100 * summary.boa, 1), round(100 * summary.succ, 1)]],
    )
    print_summary(f"attack: {kind} vs {victim}", record)


def cmd_beta(run: _Run) -> None:
    config = run.config
    dataset = load_dataset(config)
    cfg = smoothing_config(config)
    f = run.classifier(dataset.class_count)
    est = _estimator(config)
    radii_cfg = config.get("certification.beta_estimator.radii")

    def sweep(ex: Example) -> List[Dict[str, Any]]:
        radii = [int(r) for r in radii_cfg if int(r) <= len(ex.text)] if radii_cfg else range(1, len(ex.text) + 1)
        return [
            {"id": ex.id, "r": row.r, "beta": row.beta_hat, "p_hat": row.p_hat, "jsd": row.jsd}
            for row in beta_sweep(ex.text, f, cfg, ex.label, list(radii), est)
        ]

    rows = [row for rows in run.map(sweep, dataset.examples, "beta") for row in rows]
    run.store.write_records("beta.jsonl", rows)
    run.store.write_table(["id", "r", "beta", "p_hat", "jsd"], ([r["id"], r["r"], r["beta"], r["p_hat"], r["jsd"]] for r in rows), name="beta.csv")

    by_r: Dict[int, List[float]] = {}
    for row in rows:
        by_r.setdefault(row["r"], []).append(row["jsd"])
    summary_rows = [[r, sum(v) / len(v), len(v)] for r, v in sorted(by_r.items())]
    run.store.write_summary({"mean_jsd": {str(r): m for r, m, _ in summary_rows}})
    print_rows("beta vs p_hat", ["r", "mean JSD", "examples"], summary_rows)


def cmd_risk(run: _Run) -> None:
    config = run.config
    gamma = float(config.get("risk.gamma", 0.1))
    rho = float(config.get("smoothing.rho", 0.9))
    h = config.get("risk.h")
    try:
        if h is not None:
            value = risk_probability(RiskParams(gamma=gamma, rho=rho, h=int(h)))
        else:
            dataset = load_dataset(config)
            value = risk_probability_for_dataset((len(ex.text) for ex in dataset), rho, gamma)
    except InvalidArgumentError as e:
        raise UsageError(str(e)) from e
    print(format(value, ".12g"))


def cmd_report(run: _Run) -> None:
    report: Dict[str, Any] = {}
    store = run.store
    if store.path(CERTIFICATES_FILE).exists():
        certs = [Certificate.from_record(r) for r in store.read_records(CERTIFICATES_FILE)]
        report["certified"] = median_certified(certs).to_dict()
        print_summary("certified robustness", report["certified"])
    if store.path(OUTCOMES_FILE).exists():
        records = store.read_records(OUTCOMES_FILE)
        by_victim: Dict[str, List[AttackOutcome]] = {}
        for record in records:
            by_victim.setdefault(record.get("victim", "unknown"), []).append(AttackOutcome.from_record(record))
        report["empirical"] = {v: summarize_outcomes(o).to_dict() for v, o in sorted(by_victim.items())}
        print_rows(
            "empirical robustness",
            ["victim", "cln", "boa", "succ"],
            [[v, s["cln"], s["boa"], s["succ"]] for v, s in report["empirical"].items()],
        )
    if not report:
        raise UsageError(f"no {CERTIFICATES_FILE} or {OUTCOMES_FILE} in {store.output_dir}")
    store.write_summary(report, name="report.json")


def cmd_toy(run: _Run) -> None:
    from content.corpus import CorpusSpec, make_corpus

    corpus = make_corpus(CorpusSpec(seed=int(run.config.get("sampling.seed", 0))))
    store = run.store
    corpus.train.save_jsonl(str(store.path("train.jsonl")))
    corpus.test.save_jsonl(str(store.path("test.jsonl")))
    store.write_summary(corpus.synonyms.to_dict(), name="synonyms.json")
    logger.info("toy corpus written to %s", store.output_dir)


HANDLERS: Dict[str, Callable[[_Run], None]] = {
    "train": cmd_train,
    "predict": cmd_predict,
    "certify": cmd_certify,
    "attack": cmd_attack,
    "beta": cmd_beta,
    "risk": cmd_risk,
    "report": cmd_report,
    "toy": cmd_toy,
}


def run_pipeline(command: str, config: ConfigManager) -> int:
    """
    Execute one subcommand.

    Returns:
        0 on success, 2 for usage errors (bad flags, config or input), 1 for
        any other engine failure.
    """
    handler = HANDLERS.get(command)
    if handler is None:
        logger.error("unknown command %r; expected one of %s", command, ", ".join(COMMANDS))
        return 2
    status = 0
    run = _Run(config)
    try:
        handler(run)
    except (UsageError, InvalidArgumentError, FileNotFoundError) as e:
        logger.error("%s: %s", command, e, extra={"command": command, "status": 2})
        status = 2
    except MaskCertError as e:
        logger.error("%s failed: %s", command, e, extra={
            "command": command,
            "status": 1,
            "error": type(e).__name__,
            "sample_index": e.sample_index,
        })
        status = 1
    finally:
        run.close()
    logger.info("%s finished", command, extra={"command": command, "status": status})
    return status
