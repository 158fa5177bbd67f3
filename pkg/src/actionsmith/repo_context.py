"""Repository context extraction: the raw material for generation prompts.

A RepoContext (file tree, default branch, primary language) comes either from
walking a local checkout or from the GitHub API.  Also hosts workflow-purpose
classification on top of the command lexicon.
"""
from __future__ import annotations

import fnmatch
import os
from dataclasses import dataclass, field

from .github_api import GitHubClient, Truncated
from .lexicon import CommandLexicon, is_build_action, normalize_language
from .model import Workflow

TREE_ENTRY_LIMIT = 400

EXTENSION_LANGUAGES = {
    ".py": "Python",
    ".java": "Java",
    ".js": "JavaScript", ".jsx": "JavaScript", ".mjs": "JavaScript", ".cjs": "JavaScript",
    ".ts": "TypeScript", ".tsx": "TypeScript",
    ".kt": "Kotlin", ".kts": "Kotlin",
    ".cs": "CSharp",
    ".cpp": "Cpp", ".cc": "Cpp", ".cxx": "Cpp",
    ".hpp": "Cpp", ".hh": "Cpp", ".hxx": "Cpp", ".h": "Cpp",
}


@dataclass(frozen=True)
class RepoContext:
    full_name: str
    default_branch: str
    file_tree: list[str] = field(default_factory=list)  # dirs carry a trailing /
    primary_language: str | None = None
    star_count: int | None = None


def _tree_sort_key(path: str) -> tuple:
    return tuple(path.rstrip("/").split("/"))


class _GitIgnore:
    """Small .gitignore subset: globs, dir-only patterns, anchoring, negation."""

    def __init__(self, text: str):
        self.rules: list[tuple[bool, bool, bool, str]] = []
        for line in text.splitlines():
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            negate = line.startswith("!")
            if negate:
                line = line[1:]
            dir_only = line.endswith("/")
            pattern = line.rstrip("/")
            anchored = pattern.startswith("/")
            pattern = pattern.lstrip("/")
            self.rules.append((negate, dir_only, anchored, pattern))

    def ignores(self, rel_path: str, is_dir: bool) -> bool:
        ignored = False
        basename = rel_path.rsplit("/", 1)[-1]
        for negate, dir_only, anchored, pattern in self.rules:
            if dir_only and not is_dir:
                continue
            if anchored or "/" in pattern:
                hit = fnmatch.fnmatch(rel_path, pattern)
            else:
                hit = fnmatch.fnmatch(basename, pattern)
            if hit:
                ignored = not negate
        return ignored


def _default_branch_from_git(path: str) -> str | None:
    head = os.path.join(path, ".git", "HEAD")
    try:
        with open(head, encoding="utf-8") as fh:
            first = fh.readline().strip()
    except OSError:
        return None
    if first.startswith("ref: refs/heads/"):
        return first[len("ref: refs/heads/"):]
    return None


def _majority_language(files: list[str]) -> str | None:
    counts: dict[str, int] = {}
    for rel in files:
        _, ext = os.path.splitext(rel)
        lang = EXTENSION_LANGUAGES.get(ext.lower())
        if lang:
            counts[lang] = counts.get(lang, 0) + 1
    if not counts:
        return None
    best = max(counts.values())
    return sorted(lang for lang, n in counts.items() if n == best)[0]


def scan_local(path: str) -> RepoContext:
    """Build a RepoContext from a local checkout (git metadata optional)."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if not os.path.isdir(path):
        raise NotADirectoryError(path)
    root = os.path.abspath(path)
    gitignore_file = os.path.join(root, ".gitignore")
    gitignore = None
    if os.path.isfile(gitignore_file):
        with open(gitignore_file, encoding="utf-8") as fh:
            gitignore = _GitIgnore(fh.read())

    entries: list[str] = []
    files: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        rel_dir = os.path.relpath(dirpath, root).replace(os.sep, "/")
        prefix = "" if rel_dir == "." else rel_dir + "/"
        keep_dirs = []
        for d in sorted(dirnames):
            rel = prefix + d
            if d == ".git":
                continue
            if gitignore and gitignore.ignores(rel, is_dir=True):
                continue
            keep_dirs.append(d)
            entries.append(rel + "/")
        dirnames[:] = keep_dirs
        for f in sorted(filenames):
            rel = prefix + f
            if gitignore and gitignore.ignores(rel, is_dir=False):
                continue
            entries.append(rel)
            files.append(rel)

    return RepoContext(
        full_name=os.path.basename(root) or root,
        default_branch=_default_branch_from_git(root) or "main",
        file_tree=sorted(entries, key=_tree_sort_key),
        primary_language=_majority_language(files),
        star_count=None,
    )


def _tree_entries_to_paths(tree: list[dict]) -> list[str]:
    out = []
    for entry in tree:
        path = entry.get("path", "")
        if not path:
            continue
        out.append(path + "/" if entry.get("type") == "tree" else path)
    return sorted(out, key=_tree_sort_key)


def fetch_remote(owner_repo: str, api: GitHubClient) -> RepoContext:
    """Build a RepoContext from the GitHub API (read-only endpoints).

    When the recursive tree listing is truncated by API limits, degrades to a
    two-level listing built from per-directory tree calls.
    """
    meta = api.get_repo(owner_repo)
    branch = meta.get("default_branch") or "main"
    language = meta.get("language")
    try:
        tree = api.get_tree(owner_repo, branch, recursive=True)
        file_tree = _tree_entries_to_paths(tree.get("tree", []))
    except Truncated:
        root = api.get_tree(owner_repo, branch, recursive=False, allow_truncated=True)
        paths = []
        for entry in root.get("tree", []):
            name = entry.get("path", "")
            if entry.get("type") == "tree":
                paths.append(name + "/")
                sub = api.get_tree(owner_repo, entry["sha"], recursive=False,
                                   allow_truncated=True)
                for child in sub.get("tree", []):
                    suffix = "/" if child.get("type") == "tree" else ""
                    paths.append(f"{name}/{child.get('path', '')}{suffix}")
            else:
                paths.append(name)
        file_tree = sorted(paths, key=_tree_sort_key)
    return RepoContext(
        full_name=owner_repo,
        default_branch=branch,
        file_tree=file_tree,
        primary_language=(normalize_language(language) or language) if language else None,
        star_count=meta.get("stargazers_count"),
    )


def classify_workflow_purpose(w: Workflow, lexicon: CommandLexicon) -> set[str]:
    """Tag a workflow {build, test} from its commands/actions, else {other}."""
    tags: set[str] = set()
    for job in w.jobs.values():
        for step in job.steps:
            if step.run is not None:
                tags |= lexicon.tags_for(step.run)
            if step.uses is not None and is_build_action(step.uses):
                tags.add("build")
    return tags or {"other"}


def _parent_dir(path: str) -> str:
    trimmed = path.rstrip("/")
    if "/" not in trimmed:
        return ""
    return trimmed.rsplit("/", 1)[0] + "/"


def truncate_tree(file_tree: list[str], limit: int = TREE_ENTRY_LIMIT) -> list[str]:
    """Cap the tree for prompting: breadth-first by depth, directories before
    files, elided content marked with one `…` entry per affected directory."""
    order = sorted(file_tree, key=lambda p: (
        p.rstrip("/").count("/"), 0 if p.endswith("/") else 1, p))
    if len(order) <= limit:
        return order
    keep = limit
    while True:
        parents = sorted({_parent_dir(p) for p in order[keep:]})
        if keep + len(parents) <= limit:
            break
        keep = limit - len(parents)
        if keep <= 0:
            keep, parents = 0, sorted({_parent_dir(p) for p in order})
            break
    return order[:keep] + [parent + "…" for parent in parents]
