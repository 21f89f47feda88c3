from __future__ import annotations

import json

import pytest
import requests

from genderprobe.errors import ReplayMissError, TransportError, ValidationError
from genderprobe.gateway import (
    BackendSpec,
    HttpBackend,
    ReplayBackend,
    SyntheticBackend,
    build_backend,
    complete,
    elicit,
)
from genderprobe.lexicon import Gender
from genderprobe.prompts import prompt_sha256, render_prompt, template_for
from genderprobe.synthetic import build_spec
from genderprobe.transcripts import EPOCH_TIMESTAMP, TranscriptRecord, TranscriptStore

from .conftest import make_noun


def synth_spec(**kwargs) -> BackendSpec:
    return BackendSpec(kind="synthetic", model_name="synth-test", seed=5, **kwargs)


class TestBackendSpec:
    def test_unknown_kind(self):
        with pytest.raises(ValidationError, match="unknown backend kind"):
            BackendSpec(kind="grpc")

    def test_http_requires_endpoint(self):
        with pytest.raises(ValidationError, match="endpoint"):
            BackendSpec(kind="http", model_name="m")

    def test_summary(self):
        assert synth_spec().summary == "synthetic:synth-test"


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload or {}
        self.text = text or json.dumps(self._payload)

    def json(self):
        return self._payload


class FakeSession:
    """Scripted stand-in for requests.Session."""

    def __init__(self, results):
        self.results = list(results)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers})
        result = self.results.pop(0)
        if isinstance(result, Exception):
            raise result
        return result


def http_spec(**kwargs) -> BackendSpec:
    defaults = dict(
        kind="http",
        model_name="remote-model",
        endpoint="http://llm.invalid/v1/completions",
        backoff_base=0.0,
        max_retries=3,
    )
    defaults.update(kwargs)
    return BackendSpec(**defaults)


class TestHttpBackend:
    def test_reads_first_choice_text(self):
        session = FakeSession([FakeResponse(payload={"choices": [{"text": " old, red"}]})])
        backend = HttpBackend(http_spec(), session=session)
        assert backend.complete("prompt", 0) == " old, red"
        body = session.calls[0]["json"]
        assert body["model"] == "remote-model"
        assert body["prompt"] == "prompt"
        assert body["n"] == 1

    def test_reads_chat_message_content(self):
        session = FakeSession(
            [FakeResponse(payload={"choices": [{"message": {"content": "big, small"}}]})]
        )
        backend = HttpBackend(http_spec(), session=session)
        assert backend.complete("prompt", 0) == "big, small"

    def test_api_key_header(self, monkeypatch):
        monkeypatch.setenv("GENDERPROBE_API_KEY", "sekrit")
        session = FakeSession([FakeResponse(payload={"choices": [{"text": "x"}]})])
        HttpBackend(http_spec(), session=session).complete("p", 0)
        assert session.calls[0]["headers"]["Authorization"] == "Bearer sekrit"

    def test_retries_then_succeeds_on_5xx(self):
        session = FakeSession(
            [
                FakeResponse(status_code=503),
                FakeResponse(status_code=500),
                FakeResponse(payload={"choices": [{"text": "ok"}]}),
            ]
        )
        backend = HttpBackend(http_spec(), session=session)
        assert backend.complete("p", 0) == "ok"
        assert len(session.calls) == 3

    def test_transport_error_after_exhausted_retries(self):
        session = FakeSession([requests.ConnectionError("down")] * 3)
        backend = HttpBackend(http_spec(), session=session)
        with pytest.raises(TransportError, match="after 3 attempts"):
            backend.complete("p", 0)
        assert len(session.calls) == 3

    def test_client_error_fails_immediately(self):
        session = FakeSession([FakeResponse(status_code=401, payload={"error": "no"})])
        backend = HttpBackend(http_spec(), session=session)
        with pytest.raises(TransportError, match="401"):
            backend.complete("p", 0)
        assert len(session.calls) == 1

    def test_malformed_response(self):
        session = FakeSession([FakeResponse(payload={"nope": []})])
        with pytest.raises(TransportError, match="malformed"):
            HttpBackend(http_spec(), session=session).complete("p", 0)


class TestReplayBackend:
    def test_serves_stored_completion(self, tmp_path):
        store = TranscriptStore(tmp_path)
        noun = make_noun(surface="aamnoun000", language="aa", gender=Gender.MASCULINE)
        prompt = render_prompt(template_for("aa"), noun)
        h = prompt_sha256(prompt)
        store.put(
            "aa",
            "m1",
            TranscriptRecord(h, noun.surface, 0, "stored, text", "m1", EPOCH_TIMESTAMP),
        )
        backend = ReplayBackend(BackendSpec(kind="replay", model_name="m1"), store, "aa")
        assert complete(backend, prompt, 0) == "stored, text"

    def test_miss_is_an_error_not_a_fallback(self, tmp_path):
        store = TranscriptStore(tmp_path)
        backend = ReplayBackend(BackendSpec(kind="replay", model_name="m1"), store, "aa")
        with pytest.raises(ReplayMissError):
            backend.complete("never seen", 0)


class TestSyntheticBackend:
    def test_deterministic_per_key(self):
        backend = SyntheticBackend(synth_spec())
        a = backend.complete("some prompt", 3)
        b = backend.complete("some prompt", 3)
        assert a == b
        assert backend.complete("some prompt", 4) != a

    def test_gendered_pool_only_at_beta_one(self):
        bias = build_spec(bias_strength=1.0, adjectives_per_response=5)
        backend = SyntheticBackend(synth_spec(synthetic_spec=bias))
        noun = make_noun(surface="aamnoun007", language="aa", gender=Gender.MASCULINE)
        prompt = render_prompt(template_for("aa"), noun)
        surface_to_pivot = {}
        from genderprobe.synthetic import dictionary_entries

        for _, surface, pivot in dictionary_entries(bias, "aa"):
            surface_to_pivot[surface] = pivot
        for i in range(10):
            tokens = [t.strip() for t in backend.complete(prompt, i).split(",")]
            for token in tokens:
                assert surface_to_pivot[token] in bias.vocab_masculine


class TestElicit:
    def _noun_and_template(self):
        noun = make_noun(surface="aafnoun001", language="aa", gender=Gender.FEMININE)
        return noun, template_for("aa")

    def test_returns_exactly_n_samples(self, tmp_path):
        store = TranscriptStore(tmp_path)
        backend = SyntheticBackend(synth_spec())
        noun, template = self._noun_and_template()
        completions = elicit(backend, noun, template, 50, store)
        assert len(completions) == 50
        assert [c.sample_index for c in completions] == list(range(50))

    def test_zero_samples_rejected(self, tmp_path):
        store = TranscriptStore(tmp_path)
        backend = SyntheticBackend(synth_spec())
        noun, template = self._noun_and_template()
        with pytest.raises(ValidationError, match="n_samples"):
            elicit(backend, noun, template, 0, store)

    def test_resume_after_interruption_fetches_only_missing(self, tmp_path):
        store = TranscriptStore(tmp_path)
        noun, template = self._noun_and_template()

        class FlakyBackend(SyntheticBackend):
            def __init__(self, spec, fail_from):
                super().__init__(spec)
                self.calls = 0
                self.fail_from = fail_from

            def complete(self, prompt, sample_index):
                if sample_index >= self.fail_from:
                    raise TransportError("interrupted")
                self.calls += 1
                return super().complete(prompt, sample_index)

        flaky = FlakyBackend(synth_spec(), fail_from=30)
        with pytest.raises(TransportError):
            elicit(flaky, noun, template, 50, store)
        assert flaky.calls == 30  # partial progress persisted

        fresh = FlakyBackend(synth_spec(), fail_from=10_000)
        completions = elicit(fresh, noun, template, 50, store)
        assert fresh.calls == 20  # only the missing 20 fetched
        assert len(completions) == 50

    def test_never_fetches_same_key_twice(self, tmp_path):
        store = TranscriptStore(tmp_path)
        noun, template = self._noun_and_template()

        class CountingBackend(SyntheticBackend):
            def __init__(self, spec):
                super().__init__(spec)
                self.keys = []

            def complete(self, prompt, sample_index):
                self.keys.append((prompt_sha256(prompt), sample_index))
                return super().complete(prompt, sample_index)

        backend = CountingBackend(synth_spec())
        elicit(backend, noun, template, 20, store)
        elicit(backend, noun, template, 20, store)
        assert len(backend.keys) == 20
        assert len(set(backend.keys)) == 20

    def test_bit_deterministic_across_fresh_stores(self, tmp_path):
        noun, template = self._noun_and_template()
        runs = []
        for sub in ("one", "two"):
            store = TranscriptStore(tmp_path / sub)
            backend = SyntheticBackend(synth_spec())
            runs.append(elicit(backend, noun, template, 12, store))
        assert runs[0] == runs[1]

    def test_replay_fixture_roundtrip(self, tmp_path):
        noun, template = self._noun_and_template()
        store = TranscriptStore(tmp_path)
        produced = elicit(SyntheticBackend(synth_spec()), noun, template, 8, store)

        reread = TranscriptStore(tmp_path)  # fresh index, same files
        spec = BackendSpec(kind="replay", model_name="synth-test")
        replayed = elicit(build_backend(spec, reread, "aa"), noun, template, 8, reread)
        assert [c.raw_text for c in replayed] == [c.raw_text for c in produced]


class TestTranscriptStore:
    def test_roundtrip_byte_for_byte(self, tmp_path):
        store = TranscriptStore(tmp_path)
        record = TranscriptRecord("ab" * 32, "noun", 3, "texte accentué, naïf", "m", "t0")
        store.put("fr", "m", record)
        again = TranscriptStore(tmp_path)
        assert again.get("fr", "m", "ab" * 32, 3) == record

    def test_last_write_wins(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.put("fr", "m", TranscriptRecord("x" * 64, "n", 0, "first", "m", "t0"))
        store.put("fr", "m", TranscriptRecord("x" * 64, "n", 0, "second", "m", "t1"))
        again = TranscriptStore(tmp_path)
        assert again.get("fr", "m", "x" * 64, 0).raw_text == "second"

    def test_file_naming_sanitizes_model(self, tmp_path):
        store = TranscriptStore(tmp_path)
        path = store.path_for("fr", "org/model:7b")
        assert path.name == "fr__org_model_7b.jsonl"
