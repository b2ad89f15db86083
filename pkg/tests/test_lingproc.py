import pytest

from segsearch.errors import LanguageMismatch
from segsearch.lingproc import (
    LanguageResources,
    Pos,
    analyze,
    content_sequence,
    content_units,
    lemma_of,
)
from segsearch.synth import make_transcript

RES = LanguageResources(
    language="en",
    stopwords=frozenset({"the", "a", "of"}),
    lexicon={
        "storms": ("storm", "noun"),
        "storm": ("storm", "noun"),
        "can": ("can", "verb"),
        "severe": ("severe", "adjective"),
        "ran": ("run", "verb"),
    },
    modal_verbs=frozenset({"can"}),
)


def _tokens(words):
    t = make_transcript("d", [words])
    return analyze(t, RES)


def test_modal_verb_is_not_content():
    tok = _tokens(["can"])[0]
    assert tok.pos == Pos.MODAL_VERB
    assert not tok.is_content


def test_lexicon_lemma_lookup():
    tok = _tokens(["storms"])[0]
    assert tok.lemma == "storm"
    assert tok.pos == Pos.NOUN
    assert tok.is_content


def test_stopword_is_never_content():
    # force a noun reading through the lexicon, stopword filter still wins
    res = LanguageResources(
        language="en",
        stopwords=frozenset({"the"}),
        lexicon={"the": ("the", "noun")},
    )
    t = make_transcript("d", [["the"]])
    assert analyze(t, res)[0].is_content is False


def test_unknown_word_is_other_and_lemma_self():
    tok = _tokens(["zxqv"])[0]
    assert tok.pos == Pos.OTHER
    assert tok.lemma == "zxqv"
    assert not tok.is_content


def test_case_is_folded():
    tok = _tokens(["Storms"])[0]
    assert tok.norm == "storms"
    assert tok.lemma == "storm"


def test_one_token_per_word_in_order():
    t = make_transcript("d", [["Severe", "storms"], ["can", "the"]])
    tokens = analyze(t, RES)
    assert len(tokens) == t.word_count()
    assert [tok.word_ref for tok in tokens] == [0, 1, 2, 3]
    assert [tok.utterance_index for tok in tokens] == [0, 0, 1, 1]


def test_language_mismatch():
    t = make_transcript("d", [["bonjour"]], language="fr")
    with pytest.raises(LanguageMismatch):
        analyze(t, RES)


def test_content_sequence_filters_and_preserves_order():
    t = make_transcript("d", [["the", "severe", "storms", "can", "storm"]])
    seq = content_sequence(analyze(t, RES))
    assert [c.lemma for c in seq] == ["severe", "storm", "storm"]
    assert [c.word_ref for c in seq] == [1, 2, 4]


def test_content_sequence_empty_for_stopword_text():
    t = make_transcript("d", [["the", "a", "of"]])
    assert content_sequence(analyze(t, RES)) == []


def test_duplicate_lemmas_not_merged():
    t = make_transcript("d", [["storm", "storms"]])
    seq = content_sequence(analyze(t, RES))
    assert len(seq) == 2


def test_refiltering_is_idempotent():
    t = make_transcript("d", [["the", "severe", "storms"]])
    tokens = analyze(t, RES)
    once = content_sequence(tokens)
    # filtering is a pure selection on is_content
    again = [c for c in once]
    assert once == again


def test_content_units_groups_by_utterance():
    t = make_transcript("d", [["storm"], ["the"], ["storms", "severe"]])
    units = content_units(analyze(t, RES), 3)
    assert [len(u) for u in units] == [1, 0, 2]


def test_suffix_rules_apply_in_order():
    res = LanguageResources.bundled("en")
    assert lemma_of("evacuations", res) == "evacuation"
    # lexicon wins over suffix rules
    assert lemma_of("storms", res) == "storm"


def test_bundled_missing_language_is_empty():
    res = LanguageResources.bundled("zh")
    assert res.stopwords == frozenset()
    assert res.lexicon == {}
