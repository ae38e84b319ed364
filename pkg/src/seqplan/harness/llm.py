"""Minimal chat-completion client with bounded retries."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass

import httpx

from ..errors import EmptyCompletion, HttpError, LLMTimeout
from .prompts import PromptBundle

logger = logging.getLogger(__name__)

RETRY_STATUSES = frozenset({408, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float | None = None
    api_key_env: str = "LLM_API_KEY"
    timeout: float = 60.0  # seconds per request
    deadline: float = 300.0  # seconds for the whole call, retries included
    max_retries: int = 4
    backoff: float = 1.0  # first sleep; doubles each retry

    @property
    def url(self) -> str:
        return self.base_url.rstrip("/") + "/chat/completions"

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env)

    @classmethod
    def from_json(cls, d: dict) -> "EndpointConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def request_body(bundle: PromptBundle, cfg: EndpointConfig) -> dict:
    body: dict = {"model": cfg.model, "messages": bundle.messages()}
    if cfg.temperature is not None:
        body["temperature"] = cfg.temperature
    return body


def llm_complete(bundle: PromptBundle, cfg: EndpointConfig, client: httpx.Client | None = None) -> str:
    """Send one chat completion and return the first choice's message text verbatim.

    Transport errors and 408/429/5xx responses are retried with exponential
    backoff, up to ``cfg.max_retries`` retries or ``cfg.deadline`` seconds.
    """
    headers = {"Content-Type": "application/json"}
    key = cfg.api_key()
    if key:
        headers["Authorization"] = f"Bearer {key}"
    body = request_body(bundle, cfg)
    own = client is None
    client = client or httpx.Client(timeout=cfg.timeout)
    start = time.monotonic()
    delay = cfg.backoff
    last_error: Exception | None = None
    try:
        for attempt in range(cfg.max_retries + 1):
            remaining = cfg.deadline - (time.monotonic() - start)
            if remaining <= 0:
                break
            try:
                resp = client.post(cfg.url, json=body, headers=headers,
                                   timeout=min(cfg.timeout, remaining))
            except httpx.TransportError as e:
                last_error = e
                logger.warning("attempt %d: transport error %r", attempt + 1, e)
            else:
                if resp.status_code == 200:
                    return _content(resp.json())
                if resp.status_code not in RETRY_STATUSES:
                    raise HttpError(resp.status_code, resp.text)
                last_error = HttpError(resp.status_code, resp.text)
                logger.warning("attempt %d: HTTP %d", attempt + 1, resp.status_code)
            if attempt < cfg.max_retries:
                time.sleep(max(0.0, min(delay, cfg.deadline - (time.monotonic() - start))))
                delay *= 2
    finally:
        if own:
            client.close()
    if isinstance(last_error, HttpError):
        raise last_error
    raise LLMTimeout(f"no completion from {cfg.url} within {cfg.max_retries + 1} attempts: {last_error!r}")


def _content(payload: dict) -> str:
    try:
        text = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise EmptyCompletion(f"malformed completion payload: {str(payload)[:200]}") from None
    if not text:
        raise EmptyCompletion("completion has no content")
    return text
