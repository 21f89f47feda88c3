from __future__ import annotations

import pytest

from genderprobe.errors import ValidationError
from genderprobe.lexicon import SOURCE_LANGUAGES, Gender
from genderprobe.prompts import (
    NOUN_SLOT,
    TEMPLATES,
    prompt_sha256,
    render_prompt,
    template_for,
)

from .conftest import make_noun


def test_english_prompt_ends_with_final_question():
    noun = make_noun(surface="river", language="en", gender=Gender.MASCULINE)
    prompt = render_prompt(TEMPLATES["en"], noun)
    assert prompt.endswith(
        'Describe the word "river" using comma-separated adjectives. ***Answer***:'
    )
    assert '"bottle"' in prompt and '"stone"' in prompt
    assert "glass, sleek, thin" in prompt


def test_spanish_prompt_contains_quoted_noun():
    noun = make_noun(surface="piedra", language="es", gender=Gender.FEMININE)
    prompt = render_prompt(TEMPLATES["es"], noun)
    assert 'Describe la palabra "piedra"' in prompt
    assert "***Pregunta***" in prompt and "***Respuesta***" in prompt


def test_language_mismatch_rejected():
    noun = make_noun(surface="piedra", language="es")
    with pytest.raises(ValidationError, match="does not match"):
        render_prompt(TEMPLATES["en"], noun)


def test_templates_exist_for_all_source_languages():
    for language in SOURCE_LANGUAGES:
        template = TEMPLATES[language]
        assert template.text.count(NOUN_SLOT) == 1
        assert len(template.exemplars) == 2
        for _, adjectives in template.exemplars:
            assert len(adjectives) == 10


def test_render_is_byte_deterministic():
    noun = make_noun(surface="pont", language="fr", gender=Gender.MASCULINE)
    assert render_prompt(TEMPLATES["fr"], noun) == render_prompt(TEMPLATES["fr"], noun)


def test_synthetic_tag_gets_fallback_template():
    template = template_for("aa")
    assert template.language == "aa"
    noun = make_noun(surface="aamnoun001", language="aa", gender=Gender.MASCULINE)
    prompt = render_prompt(template, noun)
    assert '"aamnoun001"' in prompt


def test_noun_slot_filled_exactly_once_in_question():
    noun = make_noun(surface="most", language="cs", gender=Gender.MASCULINE)
    prompt = render_prompt(TEMPLATES["cs"], noun)
    final_line = prompt.rsplit("\n", 1)[-1]
    assert final_line.count('"most"') == 1
    assert NOUN_SLOT not in prompt


def test_prompt_hash_shape_and_stability():
    h = prompt_sha256("hello")
    assert len(h) == 64 and all(c in "0123456789abcdef" for c in h)
    assert h == prompt_sha256("hello")
    assert h != prompt_sha256("hello ")
