"""Outbound HTTP with retry/backoff, shared by both remote backends.

Only transport-level failures (timeouts, connection errors) are retried;
a response with any status is returned to the caller, which owns the
status-code policy.
"""

from __future__ import annotations

import logging
import os
import random
import time

import httpx

from clinic_scribe.errors import BackendUnreachable

log = logging.getLogger(__name__)

BACKOFF_BASE_S = 0.5
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2  # +/- fraction of the delay


def bearer_headers(token_env: str | None) -> dict[str, str]:
    """Authorization header from the named environment variable, if set."""
    if not token_env:
        return {}
    token = os.environ.get(token_env, "")
    if not token:
        return {}
    return {"Authorization": f"Bearer {token}"}


def post_with_retries(
    url: str,
    *,
    timeout_s: float,
    max_retries: int,
    headers: dict[str, str] | None = None,
    files: dict | None = None,
    data: dict | None = None,
    json_body: dict | None = None,
) -> httpx.Response:
    """POST with exponential backoff on transport failures.

    Performs 1 + max_retries attempts at most. Raises BackendUnreachable
    once every attempt has failed at the transport level.
    """
    attempts = 0
    last_error: Exception | None = None
    while attempts <= max_retries:
        attempts += 1
        try:
            with httpx.Client(timeout=timeout_s) as client:
                return client.post(url, headers=headers, files=files, data=data, json=json_body)
        except httpx.TransportError as exc:
            last_error = exc
            log.warning("request to %s failed (attempt %d): %s", url, attempts, exc)
            if attempts <= max_retries:
                delay = BACKOFF_BASE_S * (BACKOFF_FACTOR ** (attempts - 1))
                delay *= 1.0 + random.uniform(-BACKOFF_JITTER, BACKOFF_JITTER)
                time.sleep(delay)
    raise BackendUnreachable(f"could not reach {url}: {last_error}", attempts)
