"""Model backends and the elicitation loop.

Three interchangeable backends answer a rendered prompt:

* ``http``     — a chat/completion-style JSON endpoint (bearer token from the
                 GENDERPROBE_API_KEY environment variable), with retries and
                 exponential backoff;
* ``replay``   — serves completions recorded in a transcript store and never
                 falls back to the network;
* ``synthetic``— deterministic planted-bias responses keyed by
                 (seed, prompt hash, sample index).

``elicit`` asks for N samples per noun, persisting each to the transcript
store before returning and reusing whatever is already stored, so interrupted
runs resume without refetching and nothing is ever requested twice.
"""

from __future__ import annotations

import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Protocol

import requests

from .errors import ReplayMissError, TransportError, ValidationError
from .lexicon import Noun
from .prompts import PromptTemplate, prompt_sha256, render_prompt
from .synthetic import (
    SyntheticSpec,
    default_spec,
    gender_from_surface,
    response_rng,
    sample_response,
)
from .transcripts import EPOCH_TIMESTAMP, TranscriptRecord, TranscriptStore

API_KEY_ENV = "GENDERPROBE_API_KEY"
BACKEND_KINDS = ("http", "replay", "synthetic")

DEFAULT_N_SAMPLES = 50

# Matches the last double-quoted word of the prompt's final question line.
_QUOTED_RE = re.compile(r'"([^"]+)"')


@dataclass(frozen=True)
class BackendSpec:
    """Configuration for one backend; fields irrelevant to ``kind`` are ignored."""

    kind: str
    model_name: str = "unknown"
    endpoint: str = ""
    transcript_path: str = ""
    seed: int = 0
    temperature: float = 0.7
    max_tokens: int = 128
    request_timeout: float = 30.0
    max_parallel: int = 4
    max_retries: int = 3
    backoff_base: float = 1.0
    synthetic_spec: SyntheticSpec | None = None

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValidationError(f"unknown backend kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ValidationError("http backend requires an endpoint")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValidationError("max_tokens must be positive")
        if self.max_parallel < 1:
            raise ValidationError("max_parallel must be positive")

    @property
    def summary(self) -> str:
        return f"{self.kind}:{self.model_name}"


@dataclass(frozen=True)
class Completion:
    noun: Noun
    sample_index: int
    raw_text: str
    backend: str
    timestamp: str


class Backend(Protocol):
    spec: BackendSpec

    def complete(self, prompt: str, sample_index: int) -> str: ...

    def timestamp(self) -> str: ...


class HttpBackend:
    """POSTs ``{model, prompt, temperature, max_tokens, n: 1}`` and reads the
    first choice's text (or chat ``message.content``)."""

    def __init__(self, spec: BackendSpec, session: requests.Session | None = None):
        self.spec = spec
        self._session = session or requests.Session()

    def timestamp(self) -> str:
        return datetime.now(timezone.utc).isoformat()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return headers

    def complete(self, prompt: str, sample_index: int) -> str:
        payload = {
            "model": self.spec.model_name,
            "prompt": prompt,
            "temperature": self.spec.temperature,
            "max_tokens": self.spec.max_tokens,
            "n": 1,
        }
        last_error: Exception | None = None
        for attempt in range(self.spec.max_retries):
            if attempt:
                time.sleep(self.spec.backoff_base * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    self.spec.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.spec.request_timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(
                    f"server error {response.status_code} from {self.spec.endpoint}"
                )
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"backend returned {response.status_code}: {response.text[:200]}"
                )
            return self._extract_text(response.json())
        raise TransportError(
            f"backend {self.spec.endpoint} failed after {self.spec.max_retries} attempts: "
            f"{last_error}"
        )

    @staticmethod
    def _extract_text(data: dict) -> str:
        try:
            choice = data["choices"][0]
        except (KeyError, IndexError, TypeError):
            raise TransportError(f"malformed backend response: {str(data)[:200]}")
        if isinstance(choice, dict):
            if "text" in choice:
                return str(choice["text"])
            message = choice.get("message")
            if isinstance(message, dict) and "content" in message:
                return str(message["content"])
        raise TransportError("backend response has no choice text")


class ReplayBackend:
    """Serves recorded completions; a cache miss is an error, never a fallback."""

    def __init__(self, spec: BackendSpec, store: TranscriptStore, language: str):
        self.spec = spec
        self._store = store
        self._language = language

    def timestamp(self) -> str:
        return EPOCH_TIMESTAMP

    def complete(self, prompt: str, sample_index: int) -> str:
        record = self._store.get(
            self._language, self.spec.model_name, prompt_sha256(prompt), sample_index
        )
        if record is None:
            raise ReplayMissError(
                f"no recorded completion for prompt hash "
                f"{prompt_sha256(prompt)[:12]}... sample {sample_index} "
                f"({self._language}, {self.spec.model_name})"
            )
        return record.raw_text


class SyntheticBackend:
    """Planted-bias responses; deterministic in (seed, prompt, sample index).

    The noun is recovered from the quoted slot of the prompt's final line and
    its gender from the synthetic surface marker; unmarked nouns get
    gender-blind neutral sampling.
    """

    def __init__(self, spec: BackendSpec):
        self.spec = spec
        self.bias_model = spec.synthetic_spec or default_spec()

    def timestamp(self) -> str:
        return EPOCH_TIMESTAMP

    def complete(self, prompt: str, sample_index: int) -> str:
        final_line = prompt.rsplit("\n", 1)[-1]
        quoted = _QUOTED_RE.findall(final_line)
        surface = quoted[-1] if quoted else ""
        gender = gender_from_surface(surface)
        language_tag = surface.split("mnoun")[0].split("fnoun")[0] if gender else "xx"
        rng = response_rng(self.spec.seed, prompt_sha256(prompt), sample_index)
        return sample_response(self.bias_model, gender, rng, language_tag)


def build_backend(spec: BackendSpec, store: TranscriptStore, language: str) -> Backend:
    if spec.kind == "http":
        return HttpBackend(spec)
    if spec.kind == "replay":
        return ReplayBackend(spec, store, language)
    return SyntheticBackend(spec)


def complete(backend: Backend, prompt: str, sample_index: int) -> str:
    """Fetch one raw completion from a backend (thin delegation)."""
    return backend.complete(prompt, sample_index)


def elicit(
    backend: Backend,
    noun: Noun,
    template: PromptTemplate,
    n_samples: int,
    store: TranscriptStore,
) -> list[Completion]:
    """Return exactly ``n_samples`` completions for one noun, resuming from the store.

    Stored samples are reused; missing ones are fetched (concurrently up to
    ``max_parallel`` for http backends), appended to the store in sample-index
    order, and only then returned. Errors propagate after partial progress has
    been recorded, so a rerun picks up where this one stopped.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    spec = backend.spec
    prompt = render_prompt(template, noun)
    h = prompt_sha256(prompt)
    language, model = noun.language, spec.model_name

    completions: dict[int, Completion] = {}
    missing: list[int] = []
    for i in range(n_samples):
        record = store.get(language, model, h, i)
        if record is None:
            missing.append(i)
        else:
            completions[i] = Completion(
                noun=noun,
                sample_index=i,
                raw_text=record.raw_text,
                backend=spec.summary,
                timestamp=record.timestamp,
            )

    def fetch(index: int) -> tuple[int, str]:
        return index, backend.complete(prompt, index)

    if missing:
        if spec.kind == "http" and spec.max_parallel > 1 and len(missing) > 1:
            with ThreadPoolExecutor(max_workers=spec.max_parallel) as pool:
                fetched = pool.map(fetch, missing)
                for index, text in fetched:
                    _persist(store, noun, spec, h, index, text, backend, completions)
        else:
            for index in missing:
                _, text = fetch(index)
                _persist(store, noun, spec, h, index, text, backend, completions)

    return [completions[i] for i in range(n_samples)]


def _persist(
    store: TranscriptStore,
    noun: Noun,
    spec: BackendSpec,
    prompt_hash: str,
    index: int,
    text: str,
    backend: Backend,
    completions: dict[int, Completion],
) -> None:
    timestamp = backend.timestamp()
    store.put(
        noun.language,
        spec.model_name,
        TranscriptRecord(
            prompt_hash=prompt_hash,
            noun=noun.surface,
            sample_index=index,
            raw_text=text,
            model=spec.model_name,
            timestamp=timestamp,
        ),
    )
    completions[index] = Completion(
        noun=noun,
        sample_index=index,
        raw_text=text,
        backend=spec.summary,
        timestamp=timestamp,
    )
