"""Shared fixtures. Networking is blocked for every test, so the whole suite
proves it runs hermetically: any accidental socket use surfaces as an OSError
inside the HTTP stack."""

from __future__ import annotations

import socket
from pathlib import Path

import pytest

from genderprobe.gateway import Completion
from genderprobe.lexicon import Gender, Noun

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_ROOT = REPO_ROOT / "fixtures"


@pytest.fixture(autouse=True)
def _no_network(monkeypatch):
    def guard(*args, **kwargs):
        raise OSError("network access is disabled in the test suite")

    monkeypatch.setattr(socket, "create_connection", guard)
    monkeypatch.setattr(socket.socket, "connect", guard, raising=True)
    yield


@pytest.fixture
def fixtures_root() -> Path:
    return FIXTURES_ROOT


def make_noun(
    surface: str = "casa",
    language: str = "es",
    gender: Gender = Gender.FEMININE,
    gloss: str = "house",
    animate: bool = False,
) -> Noun:
    return Noun(
        surface=surface, language=language, gender=gender, pivot_gloss=gloss, animate=animate
    )


def make_completion(text: str, noun: Noun | None = None, index: int = 0) -> Completion:
    return Completion(
        noun=noun or make_noun(),
        sample_index=index,
        raw_text=text,
        backend="test:fake",
        timestamp="1970-01-01T00:00:00Z",
    )


def write_lexicon_tsv(path: Path, rows: list[tuple[str, str, str, str]]) -> Path:
    lines = ["surface\tgender\tpivot_gloss\tanimate"]
    lines += ["\t".join(row) for row in rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
