"""Shared HTTP endpoint plumbing: config, bearer auth, retries with backoff."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import requests

from .errors import EndpointError


@dataclass(frozen=True)
class EndpointConfig:
    """Where and how to reach one HTTP JSON endpoint.

    ``retries`` is the total number of attempts.  ``token_env`` names an
    environment variable holding a bearer token; credentials never live in
    config files.
    """

    url: str
    timeout: float = 30.0
    retries: int = 3
    backoff_base: float = 0.5
    token_env: str = ""


def post_json(config: EndpointConfig, payload: dict) -> dict:
    """POST ``payload`` and return the parsed JSON body, retrying on failure.

    Retries cover transport errors, non-2xx statuses, and unparseable bodies,
    with exponential backoff between attempts.  After the last attempt the
    underlying cause is wrapped in :class:`EndpointError`.
    """
    if not config.url:
        raise EndpointError("endpoint URL is not configured")
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(config.token_env, "") if config.token_env else ""
    if token:
        headers["Authorization"] = f"Bearer {token}"
    last_error: Exception | None = None
    for attempt in range(max(1, config.retries)):
        if attempt > 0:
            time.sleep(config.backoff_base * (2 ** (attempt - 1)))
        try:
            response = requests.post(
                config.url, json=payload, headers=headers, timeout=config.timeout
            )
            response.raise_for_status()
            return response.json()
        except (requests.RequestException, ValueError) as exc:
            last_error = exc
    raise EndpointError(
        f"endpoint {config.url} failed after {max(1, config.retries)} attempts: {last_error}"
    ) from last_error
