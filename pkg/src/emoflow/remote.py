"""Client for an externally served emotion classifier.

Protocol: ``POST <endpoint>/classify`` with JSON ``{"text": ...}``; the reply
is ``{"probs": {label: probability, ...}}`` covering exactly the configured
label set. Replies whose probabilities sum to within ``REMOTE_TOLERANCE`` of
one are renormalized; anything further off is rejected.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import httpx

from .fusion import EmotionDistribution

REMOTE_TOLERANCE = 1e-3


class RemoteError(RuntimeError):
    """Transport failure or an invalid reply from the remote classifier."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


def parse_reply(payload, labels: Sequence[str]) -> EmotionDistribution:
    if not isinstance(payload, dict) or not isinstance(payload.get("probs"), dict):
        raise RemoteError("malformed reply: expected an object with a 'probs' object")
    probs = payload["probs"]
    if set(probs) != set(labels):
        extra, missing = sorted(set(probs) - set(labels)), sorted(set(labels) - set(probs))
        raise RemoteError(f"label-set mismatch: unexpected {extra}, missing {missing}")
    values = []
    for label in labels:
        v = probs[label]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise RemoteError(f"malformed reply: probability for {label!r} is {v!r}")
        values.append(float(v))
    try:
        return EmotionDistribution.from_values(labels, values, tolerance=REMOTE_TOLERANCE)
    except ValueError as exc:
        raise RemoteError(f"invalid probabilities: {exc}") from None


def _url(endpoint: str) -> str:
    endpoint = endpoint.rstrip("/")
    return endpoint if endpoint.endswith("/classify") else endpoint + "/classify"


def remote_classify(endpoint: str, text: str, labels: Sequence[str], timeout: float = 10.0,
                    retries: int = 2, backoff: float = 0.1, client: httpx.Client | None = None
                    ) -> EmotionDistribution:
    """Classify one text remotely.

    Transport errors and 5xx replies are retried up to ``retries`` extra
    times with linear backoff; the final error reports how many attempts
    were made. Invalid replies fail immediately.
    """
    url = _url(endpoint)
    own = client is None
    client = client or httpx.Client(timeout=timeout)
    try:
        attempts, last = 0, None
        while attempts <= retries:
            attempts += 1
            try:
                resp = client.post(url, json={"text": text})
            except httpx.TransportError as exc:
                last = f"{type(exc).__name__}: {exc}"
            else:
                if resp.status_code >= 500:
                    last = f"HTTP {resp.status_code}"
                elif resp.status_code != 200:
                    raise RemoteError(f"{url}: HTTP {resp.status_code}", attempts)
                else:
                    try:
                        payload = resp.json()
                    except ValueError:
                        raise RemoteError(f"{url}: reply is not JSON", attempts) from None
                    return parse_reply(payload, labels)
            if attempts <= retries:
                time.sleep(backoff * attempts)
        raise RemoteError(f"{url}: {last} (after {attempts} attempts)", attempts)
    finally:
        if own:
            client.close()


@dataclass
class RemoteClassifier:
    """Callable classifier backed by a remote endpoint.

    ``classify_many`` keeps at most ``max_in_flight`` requests open and
    returns results in input order.
    """

    endpoint: str
    labels: tuple[str, ...]
    timeout: float = 10.0
    retries: int = 2
    max_in_flight: int = 4
    _client: httpx.Client | None = field(default=None, init=False, repr=False)

    def _http(self) -> httpx.Client:
        if self._client is None:
            limits = httpx.Limits(max_connections=self.max_in_flight)
            self._client = httpx.Client(timeout=self.timeout, limits=limits)
        return self._client

    def __call__(self, text: str) -> EmotionDistribution:
        return remote_classify(self.endpoint, text, self.labels, self.timeout, self.retries, client=self._http())

    def classify_many(self, texts: Sequence[str]) -> list[EmotionDistribution]:
        with ThreadPoolExecutor(max_workers=max(1, self.max_in_flight)) as pool:
            return list(pool.map(self, texts))

    def close(self) -> None:
        if self._client is not None:
            self._client.close()
            self._client = None
