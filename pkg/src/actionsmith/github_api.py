"""Minimal GitHub REST v3 client for the read/write endpoints the toolkit uses.

Base URL is overridable so tests and self-hosted deployments can point at a
mock or GitHub Enterprise.  Rate limits are honored by sleeping until the
advertised reset, at most twice, before surfacing RateLimited.
"""
from __future__ import annotations

import base64
import time

import requests


class GitHubApiFailure(Exception):
    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class NotFound(GitHubApiFailure):
    pass


class AuthFailure(GitHubApiFailure):
    pass


class RateLimited(GitHubApiFailure):
    def __init__(self, message: str, retry_after: float, reset_at: float | None = None):
        super().__init__(message, status=429)
        self.retry_after = retry_after
        self.reset_at = reset_at


class Truncated(GitHubApiFailure):
    """Recursive tree listing exceeded API limits; degrade to a shallower walk."""


class GitHubClient:
    def __init__(self, base_url: str = "https://api.github.com", token: str | None = None,
                 session: requests.Session | None = None, timeout: float = 30.0,
                 rate_limit_retries: int = 2, max_rate_limit_wait: float = 60.0,
                 sleep=time.sleep):
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.session = session or requests.Session()
        self.timeout = timeout
        self.rate_limit_retries = rate_limit_retries
        self.max_rate_limit_wait = max_rate_limit_wait
        self._sleep = sleep

    # -- plumbing -----------------------------------------------------------

    def _headers(self) -> dict:
        headers = {
            "Accept": "application/vnd.github+json",
            "User-Agent": "actionsmith",
        }
        if self.token:
            headers["Authorization"] = f"token {self.token}"
        return headers

    def _raise_for_status(self, response: requests.Response) -> None:
        if response.status_code < 400:
            return
        if response.status_code == 401:
            raise AuthFailure("authentication failed", status=401)
        if response.status_code == 404:
            raise NotFound(f"not found: {response.url}", status=404)
        remaining = response.headers.get("X-RateLimit-Remaining")
        if response.status_code == 429 or (response.status_code == 403 and remaining == "0"):
            retry_after = response.headers.get("Retry-After")
            reset = response.headers.get("X-RateLimit-Reset")
            reset_at = float(reset) if reset else None
            if retry_after is not None:
                wait = float(retry_after)
            elif reset_at is not None:
                wait = max(0.0, reset_at - time.time())
            else:
                wait = 1.0
            raise RateLimited("rate limited", retry_after=wait, reset_at=reset_at)
        raise GitHubApiFailure(
            f"{response.request.method} {response.url} -> {response.status_code}: "
            f"{response.text[:200]}", status=response.status_code)

    def _request(self, method: str, path: str, **kwargs):
        url = f"{self.base_url}{path}"
        attempts = 0
        while True:
            try:
                response = self.session.request(
                    method, url, headers=self._headers(), timeout=self.timeout, **kwargs)
            except requests.RequestException as exc:
                raise GitHubApiFailure(f"{method} {url} failed: {exc}") from exc
            try:
                self._raise_for_status(response)
            except RateLimited as exc:
                if attempts >= self.rate_limit_retries:
                    raise
                attempts += 1
                self._sleep(min(exc.retry_after, self.max_rate_limit_wait))
                continue
            if response.status_code == 204 or not response.content:
                return {}
            return response.json()

    # -- read endpoints -----------------------------------------------------

    def get_repo(self, repo: str) -> dict:
        return self._request("GET", f"/repos/{repo}")

    def get_tree(self, repo: str, tree_ish: str, recursive: bool = True,
                 allow_truncated: bool = False) -> dict:
        params = {"recursive": "1"} if recursive else {}
        data = self._request("GET", f"/repos/{repo}/git/trees/{tree_ish}", params=params)
        if data.get("truncated") and not allow_truncated:
            raise Truncated(f"tree listing for {repo}@{tree_ish} is truncated")
        return data

    def get_ref_sha(self, repo: str, branch: str) -> str:
        data = self._request("GET", f"/repos/{repo}/git/ref/heads/{branch}")
        return data["object"]["sha"]

    def get_file(self, repo: str, path: str, ref: str | None = None) -> tuple[str, str]:
        """Return (decoded text, blob sha) of a repository file."""
        params = {"ref": ref} if ref else {}
        data = self._request("GET", f"/repos/{repo}/contents/{path}", params=params)
        content = base64.b64decode(data.get("content", "")).decode("utf-8")
        return content, data["sha"]

    def get_issue(self, repo: str, number: int) -> dict:
        return self._request("GET", f"/repos/{repo}/issues/{number}")

    def get_pull(self, repo: str, number: int) -> dict:
        return self._request("GET", f"/repos/{repo}/pulls/{number}")

    def list_issue_comments(self, repo: str, number: int) -> list:
        return self._request("GET", f"/repos/{repo}/issues/{number}/comments")

    # -- write endpoints ----------------------------------------------------

    def create_issue_comment(self, repo: str, number: int, body: str) -> dict:
        return self._request("POST", f"/repos/{repo}/issues/{number}/comments",
                             json={"body": body})

    def update_issue_comment(self, repo: str, comment_id: int, body: str) -> dict:
        return self._request("PATCH", f"/repos/{repo}/issues/comments/{comment_id}",
                             json={"body": body})

    def create_ref(self, repo: str, ref: str, sha: str) -> dict:
        return self._request("POST", f"/repos/{repo}/git/refs",
                             json={"ref": ref, "sha": sha})

    def delete_ref(self, repo: str, ref: str) -> None:
        self._request("DELETE", f"/repos/{repo}/git/refs/{ref}")

    def put_file(self, repo: str, path: str, message: str, content_text: str,
                 branch: str, sha: str | None = None) -> dict:
        payload = {
            "message": message,
            "content": base64.b64encode(content_text.encode("utf-8")).decode("ascii"),
            "branch": branch,
        }
        if sha:
            payload["sha"] = sha
        return self._request("PUT", f"/repos/{repo}/contents/{path}", json=payload)

    def create_pull(self, repo: str, head: str, base: str, issue: int | None = None,
                    title: str | None = None, body: str | None = None) -> dict:
        payload: dict = {"head": head, "base": base}
        if issue is not None:
            payload["issue"] = issue
        if title is not None:
            payload["title"] = title
        if body is not None:
            payload["body"] = body
        return self._request("POST", f"/repos/{repo}/pulls", json=payload)
