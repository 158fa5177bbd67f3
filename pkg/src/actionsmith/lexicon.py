"""Build/test command lexicon: per-language regex patterns shipped as data.

The lexicon classifies what a workflow step *does* (build, test, or neither)
from its `run` command line; a small registry of well-known setup/build
actions covers `uses` steps.  The data file is editable without code changes:
one record per line, `language<TAB>tag<TAB>regex`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

SUPPORTED_LANGUAGES = (
    "Java", "Python", "JavaScript", "TypeScript", "Kotlin", "CSharp", "Cpp",
)

# SEART-style exports spell languages as GitHub does.
_LANGUAGE_ALIASES = {
    "java": "Java",
    "python": "Python",
    "javascript": "JavaScript",
    "typescript": "TypeScript",
    "kotlin": "Kotlin",
    "c#": "CSharp",
    "csharp": "CSharp",
    "c++": "Cpp",
    "cpp": "Cpp",
}

# Actions whose presence marks a job as build/test tooling.  Deliberately does
# NOT include actions/checkout: every job checks out, including deploy-only ones.
BUILD_ACTION_PREFIXES = (
    "actions/setup-",
    "gradle/gradle-build-action",
    "gradle/actions",
    "microsoft/setup-msbuild",
    "android-actions/setup-android",
)

JOB_NAME_KEYWORDS = ("build", "test", "ci", "check", "compile", "verify")


def normalize_language(raw: str) -> str | None:
    """Map a repository-metadata language string to a supported language name."""
    return _LANGUAGE_ALIASES.get(raw.strip().lower())


def action_name(uses: str) -> str:
    """Action reference without the @ref suffix."""
    return uses.split("@", 1)[0]


def is_build_action(uses: str) -> bool:
    name = action_name(uses)
    return any(name.startswith(prefix) for prefix in BUILD_ACTION_PREFIXES)


@dataclass(frozen=True)
class LexiconEntry:
    language: str
    tag: str  # "build" or "test"
    pattern: re.Pattern


class CommandLexicon:
    """Matches shell command text against the per-language build/test patterns."""

    def __init__(self, entries: list[LexiconEntry]):
        self.entries = entries

    def languages(self) -> set[str]:
        return {e.language for e in self.entries}

    def tags_for(self, command: str) -> set[str]:
        """Tags ("build"/"test") whose patterns match anywhere in the command."""
        return {e.tag for e in self.entries if e.pattern.search(command)}

    def matches(self, command: str) -> bool:
        return any(e.pattern.search(command) for e in self.entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "CommandLexicon":
        entries = []
        for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected language<TAB>tag<TAB>regex")
            language, tag, pattern = parts
            if tag not in ("build", "test"):
                raise ValueError(f"{path}:{line_no}: tag must be build or test, got {tag!r}")
            entries.append(LexiconEntry(language, tag, re.compile(pattern)))
        return cls(entries)

    @classmethod
    def default(cls) -> "CommandLexicon":
        with resources.as_file(
            resources.files("actionsmith").joinpath("data/lexicon.tsv")
        ) as path:
            return cls.from_file(path)
