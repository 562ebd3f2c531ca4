"""
Evaluation package: datasets, certified and empirical metrics, result files,
progress display and the command pipeline behind the launcher.
"""
from .dataset import Dataset, Example
from .metrics import (
    NOT_AVAILABLE,
    CertifiedSummary,
    EmpiricalSummary,
    empirical_summary,
    from_rates,
    median_certified,
    summarize_outcomes,
)
from .results import (
    CERTIFICATES_FILE,
    OUTCOMES_FILE,
    PREDICTIONS_FILE,
    SUMMARY_FILE,
    TABLE_FILE,
    ResultStore,
)
from .monitor import ProgressTracker, print_rows, print_summary
from .pipeline import COMMANDS, load_dataset, make_classifier, run_pipeline

__all__ = [
    "Dataset",
    "Example",
    "NOT_AVAILABLE",
    "CertifiedSummary",
    "EmpiricalSummary",
    "empirical_summary",
    "from_rates",
    "median_certified",
    "summarize_outcomes",
    "CERTIFICATES_FILE",
    "OUTCOMES_FILE",
    "PREDICTIONS_FILE",
    "SUMMARY_FILE",
    "TABLE_FILE",
    "ResultStore",
    "ProgressTracker",
    "print_rows",
    "print_summary",
    "COMMANDS",
    "load_dataset",
    "make_classifier",
    "run_pipeline",
]
