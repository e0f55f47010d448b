import random

import pytest

from vbdss.errors import VbdError
from vbdss.terms import Iri, Literal, Triple
from vbdss.text import (
    AnnotatedNote,
    Lexicon,
    evaluate_extraction,
    extract_from_text,
    emit_rdf,
    remove_stopwords,
    spell_correct,
    split_sentences,
    tokenize,
)
from vbdss.vocab import RDF_TYPE, VBD_NS

from .oracles import dp_levenshtein

V = VBD_NS


@pytest.fixture()
def lexicon():
    return Lexicon(
        dictionary={
            "fever": 900, "chills": 700, "headache": 800, "nausea": 650,
            "loss": 480, "appetite": 400, "of": 1000, "with": 1000, "the": 1000,
            "patient": 500, "has": 1000, "and": 1000, "a": 1000, "reports": 50,
            "never": 300, "lever": 10, "rash": 600, "dry": 440, "skin": 620,
        },
        stopwords={"a", "an", "the", "of", "with", "and", "has", "is"},
        vocabulary={
            "fever": V + "has_Fever",
            "fever with chills": V + "has_Fever_WithChills",
            "chills": V + "has_Chills",
            "headache": V + "has_Headache",
            "nausea": V + "has_Nausea",
            "loss of appetite": V + "has_Loss_Of_Appetite",
            "rash": V + "has_Rash",
            "dry skin": V + "has_Dry_Skin",
        },
        abbreviations={"dr.", "e.g."},
    )


# -- sentences -------------------------------------------------------------------


def test_empty_text_no_sentences():
    assert split_sentences("") == []


def test_two_sentences():
    out = split_sentences("Fever noted. Rash present.")
    assert [s.text for s in out] == ["Fever noted.", "Rash present."]
    assert out[0].begin == 0 and out[1].begin == 13


def test_abbreviations_do_not_split():
    out = split_sentences("Dr. Rao saw the patient. Fever noted.", {"dr."})
    assert [s.text for s in out] == ["Dr. Rao saw the patient.", "Fever noted."]


def test_lowercase_continuation_does_not_split():
    out = split_sentences("Temp was 99.5 today. all good.")
    # 'all' is lowercase, so the first '.' does not end the sentence
    assert len(out) == 1


def test_terminator_run_and_eot():
    out = split_sentences("Really?! Yes. And then")
    assert [s.text for s in out] == ["Really?!", "Yes.", "And then"]


GOLD_TEXT = (
    "Patient admitted with high fever. Complains of headache since Tuesday. "
    "Dr. Gupta examined the abdomen. No tenderness was found. "
    "Vomiting twice last night. Started on fluids at 9 p.m. today. "
    "Family reports poor appetite. Weight stable. "
    "Rash seen on both arms. Advised rest. "
    "Blood sample sent to the lab. Report expected tomorrow. "
    "Temperature 101.3 this morning. Pulse regular. "
    "Mild dehydration suspected. Fluids continued. "
    "Patient slept well. Appetite improving. "
    "Plan discharge on Friday. Follow up e.g. weekly at the PHC. "
    "Mother asked about diet. Soft food advised. "
    "Fever subsided by evening. No fresh complaints. "
    "Dressing changed daily. Wound healing well. "
    "Vitals stable at noon. Continue observation. "
    "Counselled on bed nets. Family agreed. "
    "Stool test normal. Urine output adequate. "
    "Iron tablets started. Review in one week. "
    "School excused for now. Rest advised strictly. "
    "Siblings screened too. All healthy. "
    "Final review done. Case closed."
)


def test_forty_sentence_gold_fixture():
    got = [s.text for s in split_sentences(GOLD_TEXT, {"dr.", "e.g.", "p.m."})]
    assert len(got) == 40
    assert got[0] == "Patient admitted with high fever."
    assert got[1] == "Complains of headache since Tuesday."
    assert got[2] == "Dr. Gupta examined the abdomen."
    assert got[5] == "Started on fluids at 9 p.m. today."
    assert got[18] == "Plan discharge on Friday."
    assert got[19] == "Follow up e.g. weekly at the PHC."
    assert got[-1] == "Case closed."


# -- tokens ---------------------------------------------------------------------


def test_tokenize_examples():
    tokens = tokenize("Fever, cough")
    assert [t.text for t in tokens] == ["fever", ",", "cough"]
    assert tokenize("") == []


def test_tokenize_offsets_reconstruct_input():
    rng = random.Random(5)
    alphabet = "abc XY,.;!? 12"
    for _ in range(80):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
        tokens = tokenize(s)
        rebuilt = list(" " * len(s))
        for t in tokens:
            rebuilt[t.begin : t.end] = s[t.begin : t.end]
        # every non-space character is covered by exactly one token
        assert "".join(rebuilt).replace(" ", "") == s.replace(" ", "")
        for a, b in zip(tokens, tokens[1:]):
            assert a.end <= b.begin


def test_remove_stopwords(lexicon):
    tokens = tokenize("the patient has fever")
    kept = remove_stopwords(tokens, lexicon)
    assert [t.text for t in kept] == ["patient", "fever"]
    assert remove_stopwords(tokenize("the of and"), lexicon) == []


def test_remove_stopwords_keeps_phrase_initial_words(lexicon):
    lexicon2 = Lexicon(
        dict(lexicon.dictionary),
        set(lexicon.stopwords) | {"loss"},
        dict(lexicon.vocabulary),
        set(lexicon.abbreviations),
    )
    kept = remove_stopwords(tokenize("loss of appetite"), lexicon2)
    # "loss" is a stopword but begins a vocabulary phrase; must survive
    assert [t.text for t in kept] == ["loss", "appetite"]


# -- spelling ---------------------------------------------------------------------


def test_spell_correct_identity(lexicon):
    assert spell_correct("fever", lexicon) == ["fever"]


def test_spell_correct_ranked_candidates(lexicon):
    candidates = spell_correct("feaver", lexicon)
    assert candidates[0] == "fever"
    for c in candidates:
        assert dp_levenshtein("feaver", c) <= 2


def test_spell_correct_unknown_flagged(lexicon):
    assert spell_correct("xqzt", lexicon) == []
    with pytest.raises(VbdError):
        spell_correct("", lexicon)


def test_spell_correct_ranking_is_deterministic(lexicon):
    # distance first, then frequency desc, then lexicographic
    got = spell_correct("fevor", lexicon)
    expected = sorted(
        (w for w in lexicon.dictionary if dp_levenshtein("fevor", w) <= 2),
        key=lambda w: (dp_levenshtein("fevor", w), -lexicon.dictionary[w], w),
    )
    assert got == expected


# -- extraction -------------------------------------------------------------------


def _extract_concepts(text: str, lexicon):
    return [m.concept for m in extract_from_text(text, lexicon)]


def test_longest_match_wins(lexicon):
    assert _extract_concepts("loss of appetite", lexicon) == [V + "has_Loss_Of_Appetite"]
    assert _extract_concepts("fever with chills", lexicon) == [V + "has_Fever_WithChills"]
    assert _extract_concepts("fever and chills today", lexicon) == [V + "has_Fever_WithChills"]


def test_punctuation_blocks_phrases(lexicon):
    assert _extract_concepts("fever, chills", lexicon) == [V + "has_Fever", V + "has_Chills"]


def test_no_vocabulary_hits(lexicon):
    assert _extract_concepts("completely unrelated words", lexicon) == []


def test_mentions_are_ordered_nonoverlapping_within_bounds(lexicon):
    text = "Fever with chills. Then headache, nausea and dry skin."
    mentions = extract_from_text(text, lexicon)
    spans = [(m.begin, m.end) for m in mentions]
    assert spans == sorted(spans)
    for (b1, e1), (b2, e2) in zip(spans, spans[1:]):
        assert e1 <= b2
    for m in mentions:
        assert 0 <= m.begin < m.end <= len(text)


def test_extraction_applies_spell_correction(lexicon):
    mentions = extract_from_text("Complains of feaver with chils.", lexicon)
    assert [m.concept for m in mentions] == [V + "has_Fever_WithChills"]
    assert mentions[0].corrected is True


def test_generative_fixture_recovers_constructed_mentions(lexicon):
    rng = random.Random(31)
    fillers = ["patient", "reports", "today", "morning", "slight"]
    phrases = list(lexicon.vocabulary)
    for _ in range(40):
        chosen = [rng.choice(phrases) for _ in range(rng.randint(0, 5))]
        words = []
        expected = []
        for phrase in chosen:
            words.extend(rng.sample(fillers, rng.randint(1, 2)))
            words.append(phrase + ".")
            expected.append(lexicon.vocabulary[phrase])
        text = " ".join(words)
        got = _extract_concepts(text, lexicon)
        assert got == expected, text


# -- emission ---------------------------------------------------------------------


def test_emit_rdf_mapping(lexicon):
    mentions = extract_from_text("fever and headache", lexicon)
    mapping = {V + "has_Fever": "data_property", V + "has_Headache": "data_property"}
    triples = emit_rdf(mentions, Iri(V + "p9"), mapping)
    assert triples[0] == Triple(Iri(V + "p9"), Iri(RDF_TYPE), Iri(V + "patient"))
    assert Triple(Iri(V + "p9"), Iri(V + "has_Headache"), Literal("true", "boolean")) in triples
    assert len(triples) == 3


def test_emit_rdf_empty_mentions_types_patient_only():
    triples = emit_rdf([], Iri(V + "p9"), {})
    assert triples == [Triple(Iri(V + "p9"), Iri(RDF_TYPE), Iri(V + "patient"))]


def test_emit_rdf_unmapped_concept_errors(lexicon):
    mentions = extract_from_text("nausea", lexicon)
    with pytest.raises(VbdError) as err:
        emit_rdf(mentions, Iri(V + "p9"), {})
    assert "has_Nausea" in str(err.value)


def test_pipeline_determinism(lexicon):
    text = "Fever with chills. Headache and nausea."
    runs = [tuple(_extract_concepts(text, lexicon)) for _ in range(3)]
    assert len(set(runs)) == 1


# -- evaluation -------------------------------------------------------------------


def test_evaluate_extraction_perfect_and_partial(lexicon):
    notes = [
        AnnotatedNote("dengue", "fever and headache.", [V + "has_Fever_WithChills"][0:0] + [V + "has_Fever", V + "has_Headache"]),
        AnnotatedNote("dengue", "nausea noted.", [V + "has_Nausea"]),
        AnnotatedNote("malaria", "fever with chills.", [V + "has_Fever_WithChills", V + "has_Rash"]),
    ]
    # note: "fever and headache" extracts fever+headache (no chills token)
    report = evaluate_extraction(notes, lexicon)
    by_disease = {r.disease: r for r in report.rows}
    assert by_disease["dengue"].total_extracted == 3
    assert by_disease["dengue"].matching_gold == 3
    assert by_disease["dengue"].percent == 100.0
    assert by_disease["malaria"].total_extracted == 1
    assert by_disease["malaria"].matching_gold == 1
    rendered = report.render()
    assert "dengue" in rendered and "%" in rendered


def test_evaluate_extraction_eighty_percent(lexicon):
    # ten extracted mentions, eight matching gold
    notes = [
        AnnotatedNote(
            "chik",
            "fever. headache. nausea. rash. chills. fever. headache. nausea. rash. chills.",
            [V + "has_Fever", V + "has_Headache", V + "has_Nausea", V + "has_Rash",
             V + "has_Chills", V + "has_Fever", V + "has_Headache", V + "has_Nausea"],
        )
    ]
    report = evaluate_extraction(notes, lexicon)
    (row,) = report.rows
    assert row.total_extracted == 10
    assert row.matching_gold == 8
    assert row.percent == 80.0
