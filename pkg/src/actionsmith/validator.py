"""Static checking of parsed workflows: the valid/invalid gate used before scoring.

A bounded rule subset in the spirit of actionlint's default gate.  Verdicts are
calibrated once against a reference-labeled golden corpus (see tests); warnings
never affect validity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .model import ParseFailure, Step, Workflow

ERROR = "error"
WARNING = "warning"

# Events GitHub currently dispatches workflows for.  Extensible via the
# `known_events` argument; the registry is intentionally broader than the
# handful seen in most repositories because GitHub adds events over time.
KNOWN_EVENTS = frozenset({
    "push", "pull_request", "workflow_dispatch", "schedule", "release",
    "issue_comment", "workflow_call", "pull_request_target",
    "branch_protection_rule", "check_run", "check_suite", "create", "delete",
    "deployment", "deployment_status", "discussion", "discussion_comment",
    "fork", "gollum", "issues", "label", "merge_group", "milestone",
    "page_build", "public", "pull_request_review",
    "pull_request_review_comment", "registry_package", "repository_dispatch",
    "status", "watch", "workflow_run",
})

KNOWN_TOP_LEVEL_KEYS = frozenset({
    "name", "run-name", "on", "jobs", "env", "defaults", "permissions",
    "concurrency",
})

KNOWN_JOB_KEYS = frozenset({
    "name", "runs-on", "strategy", "steps", "needs", "if", "env", "defaults",
    "permissions", "concurrency", "container", "services", "outputs",
    "timeout-minutes", "continue-on-error", "uses", "with", "secrets",
    "environment",
})

_USES_PATTERNS = (
    re.compile(r"^[A-Za-z0-9_.\-]+/[A-Za-z0-9_.\-]+(/[^@]*)?@.+$"),  # owner/repo@ref
    re.compile(r"^\./.+"),                                            # local path
    re.compile(r"^docker://.+"),                                      # docker image
)

_MATRIX_REF = re.compile(r"\$\{\{\s*matrix\.([A-Za-z_][A-Za-z0-9_\-]*)")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    path: str      # slash-separated location, "." for the document root
    rule: str      # stable identifier, R1..R12
    message: str

    def format(self) -> str:
        return f"{self.severity} {self.path} {self.rule} {self.message}"


def _matrix_variables(strategy) -> set[str] | None:
    """Variable names defined by strategy.matrix, or None when unknowable."""
    if not isinstance(strategy, dict):
        return set()
    matrix = strategy.get("matrix")
    if matrix is None:
        return set()
    if isinstance(matrix, str):
        return None  # expression-built matrix: cannot check statically
    if not isinstance(matrix, dict):
        return set()
    names = {k for k in matrix if isinstance(k, str) and k not in ("include", "exclude")}
    include = matrix.get("include")
    if isinstance(include, list):
        for entry in include:
            if isinstance(entry, dict):
                names.update(k for k in entry if isinstance(k, str))
    return names


def _check_runs_on_matrix(job_id: str, runs_on, strategy, out: list[Diagnostic]) -> None:
    defined = _matrix_variables(strategy)
    if defined is None:
        return
    values = runs_on if isinstance(runs_on, list) else [runs_on]
    for value in values:
        if not isinstance(value, str):
            continue
        for var in _MATRIX_REF.findall(value):
            if var not in defined:
                out.append(Diagnostic(
                    ERROR, f"jobs/{job_id}/runs-on", "R12",
                    f"runs-on references ${{{{ matrix.{var} }}}} but "
                    f"strategy.matrix does not define {var!r}"))


def _check_step(job_id: str, index: int, step: Step, out: list[Diagnostic]) -> None:
    path = f"jobs/{job_id}/steps/{index}"
    if step.uses is None and step.run is None:
        out.append(Diagnostic(ERROR, path, "R6",
                              "step has neither 'uses' nor 'run'"))
    elif step.uses is not None and step.run is not None:
        out.append(Diagnostic(ERROR, path, "R7",
                              "step has both 'uses' and 'run'"))
    if step.uses is not None:
        if not any(p.match(step.uses) for p in _USES_PATTERNS):
            out.append(Diagnostic(
                WARNING, f"{path}/uses", "R10",
                f"uses reference {step.uses!r} does not look like "
                "owner/repo@ref, ./local/path, or docker://image"))


def validate(w: Workflow | ParseFailure,
             known_events: Iterable[str] | None = None) -> list[Diagnostic]:
    """Check a parse result; problems come back as Diagnostics, never raised."""
    if isinstance(w, ParseFailure):
        where = ""
        if w.line is not None:
            where = f" at line {w.line}, column {w.column}"
        return [Diagnostic(ERROR, ".", "R1",
                           f"cannot parse workflow ({w.kind}{where}): {w.message}")]

    events = KNOWN_EVENTS if known_events is None else KNOWN_EVENTS | set(known_events)
    out: list[Diagnostic] = []

    if not w.triggers:
        out.append(Diagnostic(ERROR, ".", "R2", "missing or empty 'on' section"))
    else:
        for event in w.triggers:
            if event not in events:
                out.append(Diagnostic(ERROR, f"on/{event}", "R9",
                                      f"unknown trigger event {event!r}"))

    for key in w.raw_extra:
        if key not in KNOWN_TOP_LEVEL_KEYS:
            out.append(Diagnostic(WARNING, key, "R8",
                                  f"unknown top-level key {key!r}"))

    if not w.jobs:
        out.append(Diagnostic(ERROR, ".", "R3", "missing or empty 'jobs' section"))

    for job_id, job in w.jobs.items():
        job_path = f"jobs/{job_id}"
        has_job_uses = "uses" in job.raw_extra
        if job.runs_on is None and not has_job_uses:
            out.append(Diagnostic(ERROR, job_path, "R4",
                                  "job does not define 'runs-on'"))
        if not job.steps and not has_job_uses:
            out.append(Diagnostic(ERROR, job_path, "R5",
                                  "job has no 'steps'"))
        for key in job.raw_extra:
            if key not in KNOWN_JOB_KEYS:
                out.append(Diagnostic(WARNING, f"{job_path}/{key}", "R11",
                                      f"unknown job-level key {key!r}"))
        _check_runs_on_matrix(job_id, job.runs_on, job.strategy, out)
        for index, step in enumerate(job.steps):
            _check_step(job_id, index, step, out)
    return out


def is_valid(w: Workflow | ParseFailure,
             known_events: Iterable[str] | None = None) -> bool:
    """True iff validate() reports no error-severity Diagnostic."""
    return not any(d.severity == ERROR for d in validate(w, known_events))
