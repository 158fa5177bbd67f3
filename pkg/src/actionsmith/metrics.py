"""Similarity metrics for generated-vs-truth workflows.

Implements file-level Exact Match over canonical serializations, smoothed
BLEU-4 over token sequences, a DevOps-aware step-alignment score, and Pearson
correlation for comparing automatic scores against human ratings.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .lexicon import CommandLexicon, action_name, is_build_action, JOB_NAME_KEYWORDS
from .model import ParseFailure, Step, Workflow, canonicalize, flatten_step, parse_workflow
from .validator import is_valid

EM_USES = "EM_USES"
EM_RUN = "EM_RUN"
BLEU_TEXT = "BLEU_TEXT"
UNMATCHED = "UNMATCHED"

BLEU_EPSILON = 1e-9
JACCARD_THRESHOLD = 0.1


class EmptyReference(ValueError):
    """BLEU reference sequence is empty."""


class InvalidInput(ValueError):
    """Scoring was attempted on a workflow that failed syntax validation."""


class DegenerateInput(ValueError):
    """Pearson correlation input too short or with zero variance."""


@dataclass(frozen=True)
class ScoreReport:
    """Scores for one (generated, truth) pair.

    Metric fields are None when the generated workflow failed the syntax gate:
    similarity is only computed on valid workflows.
    """

    syntax_valid: bool
    exact_match: float | None = None
    bleu: float | None = None
    devops_aware: float | None = None

    def to_dict(self) -> dict:
        out: dict = {"syntax_valid": self.syntax_valid}
        for key in ("exact_match", "bleu", "devops_aware"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScoreReport":
        return cls(
            syntax_valid=bool(data["syntax_valid"]),
            exact_match=data.get("exact_match"),
            bleu=data.get("bleu"),
            devops_aware=data.get("devops_aware"),
        )


@dataclass(frozen=True)
class StepAlignment:
    """Pairing of truth step indexes to generated step indexes (or None)."""

    pairs: list[tuple[int, int | None]]
    method_per_pair: list[str]


def exact_match(generated: Workflow, truth: Workflow) -> int:
    """1 iff the canonical serializations are byte-identical, else 0."""
    return int(canonicalize(generated) == canonicalize(truth))


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str]) -> float:
    """Smoothed BLEU-4 with brevity penalty against a single reference.

    Uniform weights over orders 1..4; when either sequence is shorter than 4
    tokens the orders are capped at its length and the weights re-normalized.
    Zero counts at orders >= 2 are smoothed with a 1e-9 epsilon; zero unigram
    overlap means no n-gram matches at all and scores exactly 0.
    """
    if not reference:
        raise EmptyReference("reference token sequence is empty")
    if not candidate:
        return 0.0
    n_max = min(4, len(candidate), len(reference))
    product = 1.0
    for n in range(1, n_max + 1):
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        total = sum(cand.values())
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if clipped == 0:
            if n == 1:
                return 0.0
            clipped_value: float = BLEU_EPSILON
        else:
            clipped_value = float(clipped)
        product *= clipped_value / total
    if len(candidate) > len(reference):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(reference) / len(candidate))
    return brevity * product ** (1.0 / n_max)


def _job_is_build_test(job, lexicon: CommandLexicon) -> bool:
    ident = f"{job.id} {job.name or ''}".lower()
    if any(keyword in ident for keyword in JOB_NAME_KEYWORDS):
        return True
    for step in job.steps:
        if step.run is not None and lexicon.matches(step.run):
            return True
        if step.uses is not None and is_build_action(step.uses):
            return True
    return False


def extract_build_test_steps(w: Workflow, lexicon: CommandLexicon) -> list[Step]:
    """Steps of every job classified as build/test, in source order."""
    out: list[Step] = []
    for job in w.jobs.values():
        if _job_is_build_test(job, lexicon):
            out.extend(job.steps)
    return out


def _normalized_name(name: str) -> str:
    return " ".join(name.split()).casefold()


def _jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _method_for(truth_step: Step, gen_step: Step) -> str:
    if truth_step.uses is not None and gen_step.uses is not None:
        return EM_USES
    if truth_step.run is not None and gen_step.run is not None:
        return EM_RUN
    return BLEU_TEXT


def align_steps(truth_steps: list[Step], gen_steps: list[Step]) -> StepAlignment:
    """Greedy pairing: same action name, then same normalized step name, then
    highest unigram Jaccard over flattened text (threshold 0.1, ties to the
    smallest generated index).  Each generated step is consumed at most once."""
    matched: dict[int, int] = {}
    consumed: set[int] = set()

    for ti, ts in enumerate(truth_steps):
        if ts.uses is None:
            continue
        target = action_name(ts.uses)
        for gi, gs in enumerate(gen_steps):
            if gi in consumed or gs.uses is None:
                continue
            if action_name(gs.uses) == target:
                matched[ti] = gi
                consumed.add(gi)
                break

    for ti, ts in enumerate(truth_steps):
        if ti in matched or ts.name is None:
            continue
        target = _normalized_name(ts.name)
        for gi, gs in enumerate(gen_steps):
            if gi in consumed or gs.name is None:
                continue
            if _normalized_name(gs.name) == target:
                matched[ti] = gi
                consumed.add(gi)
                break

    gen_tokens = [set(flatten_step(gs)) for gs in gen_steps]
    for ti, ts in enumerate(truth_steps):
        if ti in matched:
            continue
        tokens = set(flatten_step(ts))
        best_gi = None
        best_score = 0.0
        for gi in range(len(gen_steps)):
            if gi in consumed:
                continue
            score = _jaccard(tokens, gen_tokens[gi])
            if score >= JACCARD_THRESHOLD and score > best_score:
                best_gi, best_score = gi, score
        if best_gi is not None:
            matched[ti] = best_gi
            consumed.add(best_gi)

    pairs: list[tuple[int, int | None]] = []
    methods: list[str] = []
    for ti in range(len(truth_steps)):
        gi = matched.get(ti)
        pairs.append((ti, gi))
        if gi is None:
            methods.append(UNMATCHED)
        else:
            methods.append(_method_for(truth_steps[ti], gen_steps[gi]))
    return StepAlignment(pairs=pairs, method_per_pair=methods)


def _guarded_bleu(candidate: list[str], reference: list[str]) -> float:
    if not reference:
        return 1.0 if not candidate else 0.0
    return bleu(candidate, reference)


def _pair_score(truth_step: Step, gen_step: Step, method: str, strict_uses: bool) -> float:
    if method == EM_USES:
        if gen_step.uses == truth_step.uses:
            return 1.0
        if not strict_uses and action_name(gen_step.uses) == action_name(truth_step.uses):
            return 0.5
        return 0.0
    if method == EM_RUN:
        truth_run = " ".join(truth_step.run.split())
        gen_run = " ".join(gen_step.run.split())
        if truth_run == gen_run:
            return 1.0
        return _guarded_bleu(gen_step.run.split(), truth_step.run.split())
    return _guarded_bleu(flatten_step(gen_step), flatten_step(truth_step))


def devops_aware(generated: Workflow, truth: Workflow, lexicon: CommandLexicon,
                 strict_uses: bool = False) -> float:
    """Mean per-step score of the truth's build/test steps against their aligned
    generated counterparts.

    Aligned uses/uses pairs score exact-match style (1.0 full match, 0.5 same
    action with different @ref unless strict_uses); run/run pairs score 1.0 on
    whitespace-normalized equality else BLEU over command tokens; mixed pairs
    score BLEU over flattened step text; unmatched truth steps score 0.  Extra
    generated steps are ignored.
    """
    if not is_valid(generated) or not is_valid(truth):
        raise InvalidInput("devops_aware requires both workflows to be syntax-valid")
    truth_steps = extract_build_test_steps(truth, lexicon)
    gen_steps = generated.all_steps()
    if not truth_steps:
        # Degenerate case: nothing to compare against.  Perfect score only if
        # the generated side also has no build/test content.
        return 1.0 if not extract_build_test_steps(generated, lexicon) else 0.0
    alignment = align_steps(truth_steps, gen_steps)
    scores = []
    for (ti, gi), method in zip(alignment.pairs, alignment.method_per_pair):
        if gi is None:
            scores.append(0.0)
        else:
            scores.append(_pair_score(truth_steps[ti], gen_steps[gi], method, strict_uses))
    return math.fsum(scores) / len(scores)


def pearson(xs: list[float], ys: list[float]) -> float:
    """Standard sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise DegenerateInput("input lengths differ")
    if len(xs) < 2:
        raise DegenerateInput("need at least 2 points")
    n = len(xs)
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = math.fsum(d * d for d in dx)
    var_y = math.fsum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateInput("zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


def score_pair(generated_text: str, truth_text: str, lexicon: CommandLexicon,
               strict_uses: bool = False, em_raw: bool = False) -> ScoreReport:
    """Parse, gate, and score one generated workflow against its ground truth.

    The truth text must parse and validate; the generated text is gated by the
    validator and scores are only computed when it passes.  em_raw switches
    Exact Match to a raw-text comparison instead of canonicalized forms.
    """
    truth = parse_workflow(truth_text)
    if isinstance(truth, ParseFailure) or not is_valid(truth):
        raise InvalidInput("ground-truth workflow does not pass the syntax gate")
    generated = parse_workflow(generated_text)
    if not is_valid(generated):
        return ScoreReport(syntax_valid=False)
    assert isinstance(generated, Workflow)
    if em_raw:
        em_value = float(generated_text == truth_text)
    else:
        em_value = float(exact_match(generated, truth))
    return ScoreReport(
        syntax_valid=True,
        exact_match=em_value,
        bleu=bleu(canonicalize(generated).split(), canonicalize(truth).split()),
        devops_aware=devops_aware(generated, truth, lexicon, strict_uses=strict_uses),
    )
