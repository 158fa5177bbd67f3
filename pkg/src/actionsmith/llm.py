"""Prompt construction and chat-completion backends with record/replay.

The wire format is the de-facto chat-completions JSON (messages array, model,
temperature) against a configurable base URL, so the same code talks to the
hosted API or any compatible local server.  Replay stores keyed by a stable
request hash make generation pipelines fully deterministic in tests.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests
import yaml

from .repo_context import RepoContext, truncate_tree

TOKEN_BUDGET = 100_000
DEFAULT_MODEL = "gpt-4-1106-preview"
EXPERIMENT_TEMPERATURE = 0.7  # spread across repeated runs
BOT_TEMPERATURE = 0.2         # stability for interactive use
API_KEY_ENV = "LLM_API_KEY"

GENERATION_SYSTEM = (
    "You are an expert CI engineer. Generate exactly one GitHub Actions "
    "workflow YAML file that builds and tests the repository described by the "
    "user. Trigger it on push and pull_request to the repository's default "
    "branch. Reply with a single fenced YAML code block and nothing else."
)

REVISION_SYSTEM = (
    "You are an expert CI engineer revising an existing GitHub Actions "
    "workflow. Apply the requested changes. Reply with a single fenced YAML "
    "code block containing the complete updated workflow and nothing else."
)


class BackendUnavailable(Exception):
    pass


class BackendTimeout(BackendUnavailable):
    pass


class RateLimited(Exception):
    def __init__(self, message: str, retry_after: float = 2.0):
        super().__init__(message)
        self.retry_after = retry_after


class ReplayMiss(Exception):
    def __init__(self, request_hash: str):
        super().__init__(f"no recorded response for request hash {request_hash}")
        self.request_hash = request_hash


class NoWorkflowFound(Exception):
    pass


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "user" or "assistant"
    content: str


@dataclass(frozen=True)
class PromptBundle:
    system: str
    turns: list[ChatMessage] = field(default_factory=list)

    def messages(self) -> list[dict]:
        out = [{"role": "system", "content": self.system}]
        out.extend({"role": t.role, "content": t.content} for t in self.turns)
        return out


@dataclass(frozen=True)
class ChatExchange:
    bundle: PromptBundle
    model: str
    temperature: float
    response: str
    latency_ms: int


def estimate_tokens(bundle: PromptBundle) -> int:
    chars = len(bundle.system) + sum(len(t.content) for t in bundle.turns)
    return -(-chars // 4)  # ceil(chars / 4)


def _tree_section(ctx: RepoContext, limit: int) -> str:
    entries = truncate_tree(ctx.file_tree, limit=limit)
    return "\n".join(entries) if entries else "(empty repository)"


def build_generation_prompt(ctx: RepoContext, custom_request: str | None = None,
                            budget: int = TOKEN_BUDGET) -> PromptBundle:
    """Prompt the model with default branch, language, file tree, and any
    custom request; the tree shrinks, then the request truncates, to fit."""
    limit = 400
    while True:
        parts = [
            f"Repository: {ctx.full_name}",
            f"Default branch: {ctx.default_branch}",
            f"Primary language: {ctx.primary_language or 'unknown'}",
            "",
            "File structure:",
            _tree_section(ctx, limit),
        ]
        if custom_request:
            parts += ["", "Custom request:", custom_request]
        bundle = PromptBundle(system=GENERATION_SYSTEM,
                              turns=[ChatMessage("user", "\n".join(parts))])
        if estimate_tokens(bundle) <= budget:
            return bundle
        if limit > 0:
            limit //= 2
        elif custom_request:
            custom_request = custom_request[:len(custom_request) // 2].rstrip() + "…"
        else:
            return bundle  # irreducible; caller configured an absurd budget


def build_revision_prompt(existing_workflow: str, conversation: list[ChatMessage],
                          new_comment: str, budget: int = TOKEN_BUDGET) -> PromptBundle:
    """Prior conversation plus a final user turn carrying the current workflow
    and the new comment; oldest turns are evicted first when over budget."""
    final = ChatMessage("user", (
        "Current workflow:\n"
        f"```yaml\n{existing_workflow}\n```\n\n"
        f"Requested change:\n{new_comment}"
    ))
    turns = list(conversation) + [final]
    bundle = PromptBundle(system=REVISION_SYSTEM, turns=turns)
    while estimate_tokens(bundle) > budget and len(turns) > 1:
        turns = turns[1:]
        bundle = PromptBundle(system=REVISION_SYSTEM, turns=turns)
    return bundle


def request_hash(model: str, temperature: float, bundle: PromptBundle) -> str:
    payload = json.dumps(
        {"model": model, "temperature": temperature, "messages": bundle.messages()},
        sort_keys=True, separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Backend(Protocol):
    model: str
    temperature: float

    def send(self, bundle: PromptBundle) -> str: ...


class HttpBackend:
    """POST <base>/chat/completions with bearer auth from the environment."""

    def __init__(self, base_url: str, model: str = DEFAULT_MODEL,
                 temperature: float = EXPERIMENT_TEMPERATURE,
                 api_key: str | None = None, timeout: float = 120.0,
                 session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.temperature = temperature
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        self.session = session or requests.Session()

    def send(self, bundle: PromptBundle) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": bundle.messages(),
        }
        try:
            response = self.session.post(f"{self.base_url}/chat/completions",
                                         json=body, headers=headers, timeout=self.timeout)
        except requests.Timeout as exc:
            raise BackendTimeout(f"backend timed out after {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise BackendUnavailable(str(exc)) from exc
        if response.status_code == 429:
            retry_after = float(response.headers.get("Retry-After", 2.0))
            raise RateLimited("backend rate limited", retry_after=retry_after)
        if response.status_code >= 400:
            raise BackendUnavailable(
                f"backend returned {response.status_code}: {response.text[:200]}")
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendUnavailable(f"malformed backend response: {exc}") from exc
        if not content:
            raise BackendUnavailable("backend returned an empty completion")
        return content


class ReplayBackend:
    """Serves recorded responses from a directory of <hash>.json files."""

    def __init__(self, store_dir: str | Path, model: str = DEFAULT_MODEL,
                 temperature: float = EXPERIMENT_TEMPERATURE):
        self.store_dir = Path(store_dir)
        self.model = model
        self.temperature = temperature

    def send(self, bundle: PromptBundle) -> str:
        digest = request_hash(self.model, self.temperature, bundle)
        path = self.store_dir / f"{digest}.json"
        if not path.exists():
            raise ReplayMiss(digest)
        return json.loads(path.read_text())["response"]


class RecordingBackend:
    """Wraps a live backend and persists request-hash -> response entries."""

    def __init__(self, inner: Backend, store_dir: str | Path):
        self.inner = inner
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)

    @property
    def model(self) -> str:
        return self.inner.model

    @property
    def temperature(self) -> float:
        return self.inner.temperature

    def send(self, bundle: PromptBundle) -> str:
        start = time.perf_counter()
        response = self.inner.send(bundle)
        latency_ms = int((time.perf_counter() - start) * 1000)
        digest = request_hash(self.model, self.temperature, bundle)
        entry = {
            "request": {
                "model": self.model,
                "temperature": self.temperature,
                "messages": bundle.messages(),
            },
            "response": response,
            "latency_ms": latency_ms,
        }
        path = self.store_dir / f"{digest}.json"
        path.write_text(json.dumps(entry, indent=2, sort_keys=True) + "\n")
        return response


def complete(bundle: PromptBundle, backend: Backend, max_attempts: int = 3,
             backoff_base: float = 2.0, sleep=time.sleep) -> ChatExchange:
    """Send the prompt, retrying rate limits with exponential backoff."""
    start = time.perf_counter()
    attempt = 0
    while True:
        try:
            response = backend.send(bundle)
            break
        except RateLimited:
            attempt += 1
            if attempt >= max_attempts:
                raise
            sleep(backoff_base * (2 ** (attempt - 1)))
    latency_ms = int((time.perf_counter() - start) * 1000)
    return ChatExchange(bundle=bundle, model=backend.model,
                        temperature=backend.temperature,
                        response=response, latency_ms=latency_ms)


_YAML_START = re.compile(r"^(name|on):(\s|$)")


def _fenced_block(response: str) -> str | None:
    lines = response.split("\n")
    open_i = None
    for i, line in enumerate(lines):
        if line.lstrip().startswith("```"):
            open_i = i
            break
    if open_i is None:
        return None
    close_i = len(lines)
    for j in range(open_i + 1, len(lines)):
        if lines[j].strip().startswith("```"):
            close_i = j
            break
    return "\n".join(lines[open_i + 1:close_i])


def _yaml_suffix(response: str) -> str | None:
    lines = response.split("\n")
    for i, line in enumerate(lines):
        if _YAML_START.match(line):
            tail = lines[i:]
            for j, later in enumerate(tail):
                if later.strip().startswith("```"):
                    tail = tail[:j]
                    break
            return "\n".join(tail)
    return None


def extract_workflow_text(response: str) -> str:
    """Pull workflow YAML out of an assistant reply.

    First fenced code block wins; failing that, the suffix starting at the
    first `name:`/`on:` line.  Either way the result must load as a YAML
    mapping, else NoWorkflowFound.
    """
    for candidate in (_fenced_block(response), _yaml_suffix(response)):
        if candidate is None:
            continue
        text = candidate.strip("\n")
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError:
            continue
        if isinstance(doc, dict):
            return text
    raise NoWorkflowFound("response contains no parseable workflow YAML")
