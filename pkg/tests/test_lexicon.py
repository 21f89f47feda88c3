from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genderprobe.errors import LexiconParseError, ValidationError
from genderprobe.lexicon import (
    Gender,
    Lexicon,
    filter_animate,
    load_lexicon,
    split_lexicon,
)

from .conftest import FIXTURES_ROOT, make_noun, write_lexicon_tsv


def _synthetic_lexicon(n: int, n_animate: int = 0, language: str = "es") -> Lexicon:
    entries = []
    for i in range(n):
        entries.append(
            make_noun(
                surface=f"word{i:04d}",
                language=language,
                gender=Gender.MASCULINE if i % 2 == 0 else Gender.FEMININE,
                animate=i < n_animate,
            )
        )
    return Lexicon(language=language, entries=tuple(entries))


class TestLoadLexicon:
    def test_bulgarian_fixture_counts(self):
        lexicon = load_lexicon(FIXTURES_ROOT / "lexicons" / "bg.tsv", "bg")
        assert lexicon.counts == (1414, 839, 575)

    def test_single_row(self, tmp_path):
        path = write_lexicon_tsv(tmp_path / "es.tsv", [("casa", "f", "house", "0")])
        lexicon = load_lexicon(path, "es")
        assert lexicon.counts == (1, 0, 1)
        assert lexicon.entries[0].surface == "casa"
        assert lexicon.entries[0].gender is Gender.FEMININE

    def test_neuter_rows_are_dropped(self, tmp_path):
        rows = [(f"w{i}", "m" if i % 2 else "f", f"g{i}", "0") for i in range(9)]
        rows.insert(4, ("mädchen", "n", "girl", "0"))
        path = write_lexicon_tsv(tmp_path / "de.tsv", rows)
        lexicon = load_lexicon(path, "de")
        assert lexicon.total_count == 9
        assert all(n.surface != "mädchen" for n in lexicon.entries)

    def test_order_preserved(self, tmp_path):
        rows = [(f"w{i}", "m", f"g{i}", "0") for i in range(20)]
        path = write_lexicon_tsv(tmp_path / "fr.tsv", rows)
        lexicon = load_lexicon(path, "fr")
        assert [n.surface for n in lexicon.entries] == [r[0] for r in rows]

    def test_counts_consistent(self, tmp_path):
        rng = random.Random(3)
        rows = [(f"w{i}", rng.choice("mf"), "g", "0") for i in range(57)]
        lexicon = load_lexicon(write_lexicon_tsv(tmp_path / "it.tsv", rows), "it")
        assert lexicon.masculine_count + lexicon.feminine_count == lexicon.total_count

    def test_wrong_column_count_names_line(self, tmp_path):
        path = tmp_path / "es.tsv"
        path.write_text(
            "surface\tgender\tpivot_gloss\tanimate\ncasa\tf\thouse\t0\nbad\tm\n",
            encoding="utf-8",
        )
        with pytest.raises(LexiconParseError, match=":3"):
            load_lexicon(path, "es")

    def test_unknown_gender_token_names_line(self, tmp_path):
        path = write_lexicon_tsv(tmp_path / "es.tsv", [("casa", "x", "house", "0")])
        with pytest.raises(LexiconParseError, match=":2"):
            load_lexicon(path, "es")

    def test_duplicate_surface_rejected(self, tmp_path):
        path = write_lexicon_tsv(
            tmp_path / "es.tsv", [("casa", "f", "house", "0"), ("casa", "m", "house", "0")]
        )
        with pytest.raises(LexiconParseError, match="duplicate"):
            load_lexicon(path, "es")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "es.tsv"
        path.write_text("word\tg\n", encoding="utf-8")
        with pytest.raises(LexiconParseError, match="header"):
            load_lexicon(path, "es")

    def test_empty_lexicon_rejected(self, tmp_path):
        path = write_lexicon_tsv(tmp_path / "es.tsv", [("thing", "n", "x", "0")])
        with pytest.raises(ValidationError, match="no usable"):
            load_lexicon(path, "es")

    def test_pivot_language_rejected_as_source(self, tmp_path):
        path = write_lexicon_tsv(tmp_path / "en.tsv", [("river", "m", "river", "0")])
        with pytest.raises(ValidationError, match="pivot"):
            load_lexicon(path, "en")

    def test_bad_language_tag(self, tmp_path):
        path = write_lexicon_tsv(tmp_path / "x.tsv", [("casa", "f", "house", "0")])
        with pytest.raises(ValidationError, match="invalid language"):
            load_lexicon(path, "Espanol!")


class TestFilterAnimate:
    def test_animate_entries_removed(self):
        uncle = make_noun(surface="uncle_w", animate=True)
        bridge = make_noun(surface="bridge_w", animate=False)
        lexicon = Lexicon(language="es", entries=(uncle, bridge))
        filtered = filter_animate(lexicon)
        assert [n.surface for n in filtered.entries] == ["bridge_w"]

    def test_identity_without_animates(self):
        lexicon = _synthetic_lexicon(25, n_animate=0)
        assert filter_animate(lexicon).entries == lexicon.entries

    def test_100_nouns_37_animate(self):
        lexicon = _synthetic_lexicon(100, n_animate=37)
        # independent linear-scan count of what should survive
        expected = sum(1 for n in lexicon.entries if not n.animate)
        assert expected == 63
        assert filter_animate(lexicon).total_count == 63

    def test_idempotent(self):
        lexicon = _synthetic_lexicon(40, n_animate=11)
        once = filter_animate(lexicon)
        assert filter_animate(once).entries == once.entries


class TestSplitLexicon:
    def test_1414_split_sizes(self):
        lexicon = _synthetic_lexicon(1414)
        split = split_lexicon(lexicon, seed=7)
        assert len(split.test) == 141
        assert len(split.train) == 1273

    def test_minimum_size_split(self):
        lexicon = _synthetic_lexicon(10)
        split = split_lexicon(lexicon, seed=0)
        assert len(split.test) == 1
        assert len(split.train) == 9

    def test_deterministic(self):
        lexicon = _synthetic_lexicon(83)
        a = split_lexicon(lexicon, seed=13)
        b = split_lexicon(lexicon, seed=13)
        assert a == b

    def test_too_small_rejected(self):
        with pytest.raises(ValidationError, match="cannot split"):
            split_lexicon(_synthetic_lexicon(9), seed=1)

    @given(n=st.integers(min_value=10, max_value=400), seed=st.integers(0, 2**31))
    @settings(max_examples=40, deadline=None)
    def test_partition_property(self, n, seed):
        lexicon = _synthetic_lexicon(n)
        split = split_lexicon(lexicon, seed)
        train_keys = {x.surface for x in split.train}
        test_keys = {x.surface for x in split.test}
        assert not train_keys & test_keys
        assert train_keys | test_keys == {x.surface for x in lexicon.entries}
        assert len(split.train) + len(split.test) == n
        assert len(split.test) == round(0.10 * n)
