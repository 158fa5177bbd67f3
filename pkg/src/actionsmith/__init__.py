"""actionsmith: generate, validate, and score GitHub Actions build/test workflows."""

from .model import Job, ParseFailure, Step, Workflow, canonicalize, flatten_step, parse_workflow
from .validator import Diagnostic, is_valid, validate
from .lexicon import CommandLexicon
from .metrics import (
    ScoreReport,
    StepAlignment,
    align_steps,
    bleu,
    devops_aware,
    exact_match,
    extract_build_test_steps,
    pearson,
    score_pair,
)

__version__ = "0.1.0"

__all__ = [
    "Job", "ParseFailure", "Step", "Workflow",
    "canonicalize", "flatten_step", "parse_workflow",
    "Diagnostic", "is_valid", "validate",
    "CommandLexicon",
    "ScoreReport", "StepAlignment", "align_steps", "bleu", "devops_aware",
    "exact_match", "extract_build_test_steps", "pearson", "score_pair",
]
