"""Parse, represent, and canonically re-serialize GitHub Actions workflow YAML.

The parser is deliberately permissive: anything that is well-formed YAML with a
top-level mapping carrying ``jobs`` or ``on`` becomes a ``Workflow``.  Deciding
whether the content is *correct* is the validator's job, so that scoring can
operate on imperfect generated files.  Unrecognized keys are preserved opaquely
in ``raw_extra`` at every level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml


@dataclass(frozen=True)
class ParseFailure:
    """Returned (not raised) when text cannot be parsed into a Workflow."""

    kind: str  # "yaml_error" | "not_a_workflow"
    message: str
    line: int | None = None
    column: int | None = None


@dataclass(frozen=True)
class Step:
    name: str | None = None
    uses: str | None = None
    run: str | None = None
    with_args: dict = field(default_factory=dict)
    raw_extra: dict = field(default_factory=dict)

    def kind(self) -> str:
        """Primary step kind for scoring: "uses" wins when both are present."""
        if self.uses is not None:
            return "uses"
        if self.run is not None:
            return "run"
        return "other"


@dataclass(frozen=True)
class Job:
    id: str
    name: str | None = None
    runs_on: Any = None  # str, list of str, or None
    strategy: Any = None  # opaque matrix config, never interpreted
    steps: list[Step] = field(default_factory=list)
    raw_extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Workflow:
    name: str | None = None
    triggers: dict[str, Any] = field(default_factory=dict)
    jobs: dict[str, Job] = field(default_factory=dict)
    raw_extra: dict = field(default_factory=dict)

    def all_steps(self) -> list[Step]:
        out: list[Step] = []
        for job in self.jobs.values():
            out.extend(job.steps)
        return out


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that rejects duplicate mapping keys (GitHub rejects them too)."""

    def construct_mapping(self, node, deep=False):
        seen = set()
        for key_node, _ in node.value:
            if key_node.tag == "tag:yaml.org,2002:merge":
                continue  # merge keys may legally override merged-in values
            try:
                key = self.construct_object(key_node, deep=True)
            except yaml.YAMLError:
                key = key_node.value
            if isinstance(key, (str, int, float, bool, type(None))):
                if key in seen:
                    raise yaml.constructor.ConstructorError(
                        None, None,
                        f"duplicate mapping key {key!r}", key_node.start_mark)
                seen.add(key)
        return super().construct_mapping(node, deep=deep)


class _CanonicalDumper(yaml.SafeDumper):
    pass


def _represent_str(dumper, data):
    if "\n" in data:
        return dumper.represent_scalar("tag:yaml.org,2002:str", data, style="|")
    return dumper.represent_scalar("tag:yaml.org,2002:str", data)


_CanonicalDumper.add_representer(str, _represent_str)


def _normalize_scalars(value):
    """Strip trailing whitespace from every line of every string scalar.

    Applied at parse time so that parse -> canonicalize -> parse is a fixpoint.
    """
    if isinstance(value, str):
        lines = [line.rstrip() for line in value.split("\n")]
        return "\n".join(lines).rstrip("\n")
    if isinstance(value, dict):
        return {k: _normalize_scalars(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_normalize_scalars(v) for v in value]
    return value


def _event_name(key) -> str:
    # YAML 1.1 resolves a bare `on` to boolean True; map it back.
    if key is True:
        return "on"
    return key if isinstance(key, str) else str(key)


def _normalize_triggers(value) -> dict[str, Any]:
    """Normalize `on` into mapping form: event name -> config mapping."""
    if value is None:
        return {}
    if isinstance(value, str):
        return {value: {}}
    if isinstance(value, list):
        return {_event_name(e): {} for e in value}
    if isinstance(value, dict):
        return {
            _event_name(k): ({} if v is None else v)
            for k, v in value.items()
        }
    return {str(value): {}}


def _parse_step(item) -> Step:
    if not isinstance(item, dict):
        return Step(raw_extra={"value": item})
    name = item.get("name") if isinstance(item.get("name"), str) else None
    uses = item.get("uses") if isinstance(item.get("uses"), str) else None
    run = item.get("run") if isinstance(item.get("run"), str) else None
    with_args: dict = {}
    extra: dict = {}
    for key, value in item.items():
        key_s = key if isinstance(key, str) else str(key)
        if key_s == "name" and name is not None:
            continue
        if key_s == "uses" and uses is not None:
            continue
        if key_s == "run" and run is not None:
            continue
        if key_s == "with" and isinstance(value, dict):
            with_args = value
            continue
        extra[key_s] = value
    return Step(name=name, uses=uses, run=run, with_args=with_args, raw_extra=extra)


def _parse_job(job_id: str, value) -> Job:
    if not isinstance(value, dict):
        return Job(id=job_id, raw_extra={"value": value})
    name = value.get("name") if isinstance(value.get("name"), str) else None
    runs_on = value.get("runs-on")
    strategy = value.get("strategy")
    steps: list[Step] = []
    extra: dict = {}
    for key, val in value.items():
        key_s = key if isinstance(key, str) else str(key)
        if key_s == "name" and name is not None:
            continue
        if key_s in ("runs-on", "strategy"):
            continue
        if key_s == "steps":
            if isinstance(val, list):
                steps = [_parse_step(item) for item in val]
            else:
                extra[key_s] = val
            continue
        extra[key_s] = val
    return Job(id=job_id, name=name, runs_on=runs_on, strategy=strategy,
               steps=steps, raw_extra=extra)


def parse_workflow(source: str) -> Workflow | ParseFailure:
    """Parse workflow YAML text; returns a ParseFailure value instead of raising."""
    try:
        doc = yaml.load(source, Loader=_StrictLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        return ParseFailure(
            kind="yaml_error",
            message=str(exc).replace("\n", " "),
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        )
    if not isinstance(doc, dict):
        return ParseFailure(kind="not_a_workflow",
                            message="top level is not a mapping")

    doc = {_event_name(k) if k is True else k: v for k, v in doc.items()}
    if "on" not in doc and "jobs" not in doc:
        return ParseFailure(kind="not_a_workflow",
                            message="mapping has neither 'on' nor 'jobs'")
    doc = _normalize_scalars(doc)

    name = doc.get("name") if isinstance(doc.get("name"), str) else None
    triggers = _normalize_triggers(doc.get("on"))
    jobs: dict[str, Job] = {}
    extra: dict = {}
    for key, value in doc.items():
        key_s = key if isinstance(key, str) else str(key)
        if key_s == "name" and name is not None:
            continue
        if key_s == "on":
            continue
        if key_s == "jobs":
            if isinstance(value, dict):
                for jid, jval in value.items():
                    jid_s = jid if isinstance(jid, str) else str(jid)
                    jobs[jid_s] = _parse_job(jid_s, jval)
            else:
                extra[key_s] = value
            continue
        extra[key_s] = value
    return Workflow(name=name, triggers=triggers, jobs=jobs, raw_extra=extra)


def _key_order(key) -> tuple:
    return (key.__class__.__name__, str(key))


def _canon_value(value):
    """Recursively sort mapping keys and normalize string scalars."""
    if isinstance(value, dict):
        return {k: _canon_value(value[k]) for k in sorted(value, key=_key_order)}
    if isinstance(value, list):
        return [_canon_value(v) for v in value]
    if isinstance(value, str):
        return _normalize_scalars(value)
    return value


def _step_tree(step: Step) -> dict:
    out: dict = {}
    if step.name is not None:
        out["name"] = _canon_value(step.name)
    if step.uses is not None:
        out["uses"] = _canon_value(step.uses)
    if step.run is not None:
        out["run"] = _canon_value(step.run)
    if step.with_args:
        out["with"] = _canon_value(step.with_args)
    for key in sorted(step.raw_extra, key=_key_order):
        out[key] = _canon_value(step.raw_extra[key])
    return out


def _job_tree(job: Job) -> dict:
    out: dict = {}
    if job.name is not None:
        out["name"] = _canon_value(job.name)
    if job.runs_on is not None:
        out["runs-on"] = _canon_value(job.runs_on)
    if job.strategy is not None:
        out["strategy"] = _canon_value(job.strategy)
    if job.steps:
        out["steps"] = [_step_tree(s) for s in job.steps]
    for key in sorted(job.raw_extra, key=_key_order):
        out[key] = _canon_value(job.raw_extra[key])
    return out


def canonicalize(w: Workflow) -> str:
    """Deterministic serialization: same Workflow value, byte-identical text.

    Key order is fixed (name, on, then others alphabetically; jobs and trigger
    events sorted by name), string scalars are trailing-whitespace normalized,
    multi-line strings use literal block style, 2-space indent, LF endings.
    """
    tree: dict = {}
    if w.name is not None:
        tree["name"] = _canon_value(w.name)
    if w.triggers:
        tree["on"] = {k: _canon_value(w.triggers[k]) for k in sorted(w.triggers)}
    rest: dict = {"jobs": None}
    for key in w.raw_extra:
        rest[key] = None
    for key in sorted(rest, key=_key_order):
        if key == "jobs":
            tree["jobs"] = {jid: _job_tree(w.jobs[jid]) for jid in sorted(w.jobs)}
        else:
            tree[key] = _canon_value(w.raw_extra[key])
    return yaml.dump(
        tree,
        Dumper=_CanonicalDumper,
        sort_keys=False,
        default_flow_style=False,
        allow_unicode=True,
        indent=2,
        width=2 ** 31 - 1,
    )


def _scalar_text(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def flatten_step(s: Step) -> list[str]:
    """Serialize scoring-relevant fields as `key: value` lines, split on whitespace."""
    lines = []
    if s.name is not None:
        lines.append(f"name: {s.name}")
    if s.uses is not None:
        lines.append(f"uses: {s.uses}")
    if s.run is not None:
        lines.append(f"run: {s.run}")
    for key in sorted(s.with_args, key=_key_order):
        lines.append(f"{_scalar_text(key)}: {_scalar_text(s.with_args[key])}")
    return "\n".join(lines).split()
