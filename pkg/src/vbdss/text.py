"""Clinical text to RDF: sentences, tokens, spelling, phrase extraction.

The pipeline is deliberately dictionary-driven: clinical entities are a
closed class, so longest-match lookup in a curated vocabulary replaces
statistical tagging. Stages keep their boundaries (sentence split,
tokenise, stopword removal, per-token spell correction, phrase match) so a
tagger could be slotted in later without touching callers.

Lexicon files are plain text: one stopword per line, one abbreviation per
line, ``word[<TAB>frequency]`` dictionary lines, and
``phrase<TAB>conceptIRI`` vocabulary lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ._core import bounded_levenshtein
from .errors import VbdError
from .terms import Iri, Literal, Triple, BOOLEAN
from .vocab import RDF_TYPE, VBD_NS

MAX_EDIT_DISTANCE = 2


@dataclass
class Lexicon:
    dictionary: dict[str, int]  # word -> corpus frequency
    stopwords: set[str]
    vocabulary: dict[str, str]  # phrase (lowercase) -> concept IRI
    abbreviations: set[str] = field(default_factory=set)  # e.g. "dr.", "e.g."

    def __post_init__(self):
        self.vocabulary = {k.lower(): v for k, v in self.vocabulary.items()}
        for phrase in self.vocabulary:
            words = phrase.split()
            if len(words) == 1 and words[0] in self.stopwords:
                raise VbdError(f"single-word vocabulary phrase {phrase!r} collides with a stopword")
        # vocabulary words count as known spellings
        for phrase in self.vocabulary:
            for word in phrase.split():
                self.dictionary.setdefault(word, 1)
        for word in self.stopwords:
            self.dictionary.setdefault(word, 1)
        # phrase match keys: interior stopwords are dropped (they are gone
        # from the token stream by match time); leading words always stay
        self._match_keys: dict[tuple[str, ...], tuple[str, str]] = {}
        for phrase, concept in sorted(self.vocabulary.items()):
            words = phrase.split()
            key = tuple(w for i, w in enumerate(words) if i == 0 or w not in self.stopwords)
            self._match_keys[key] = (phrase, concept)
        self._by_first: dict[str, list[tuple[str, ...]]] = {}
        for key in self._match_keys:
            self._by_first.setdefault(key[0], []).append(key)
        for keys in self._by_first.values():
            keys.sort(key=len, reverse=True)
        self.phrase_initial_words = set(self._by_first)


@dataclass(frozen=True)
class Sentence:
    text: str
    begin: int
    end: int


@dataclass(frozen=True)
class Token:
    text: str  # lowercased
    begin: int
    end: int

    @property
    def is_word(self) -> bool:
        return self.text[:1].isalnum()


@dataclass(frozen=True)
class EntityMention:
    concept: str  # IRI
    begin: int
    end: int
    surface: str
    corrected: bool


_TERMINATORS = ".!?"


def split_sentences(text: str, abbreviations: set[str] | None = None) -> list[Sentence]:
    """Sentences bounded at ./!/? followed by whitespace and an uppercase
    letter (or end of text); listed abbreviations never split."""
    abbreviations = abbreviations or set()
    sentences: list[Sentence] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in _TERMINATORS:
            j = i
            while j + 1 < n and text[j + 1] in _TERMINATORS:
                j += 1
            if c == "." and _is_abbreviation(text, i, abbreviations):
                i += 1
                continue
            k = j + 1
            while k < n and text[k].isspace():
                k += 1
            if k >= n or (k > j + 1 and text[k].isupper()):
                _append_sentence(sentences, text, start, j + 1)
                start = k
                i = k
                continue
            i = j + 1
            continue
        i += 1
    if start < n:
        _append_sentence(sentences, text, start, n)
    return sentences


def _append_sentence(sentences: list[Sentence], text: str, start: int, end: int) -> None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start < end:
        sentences.append(Sentence(text[start:end], start, end))


def _is_abbreviation(text: str, dot: int, abbreviations: set[str]) -> bool:
    j = dot - 1
    while j >= 0 and (text[j].isalnum() or text[j] == "."):
        j -= 1
    word = text[j + 1 : dot + 1].lower()
    return word in abbreviations


def tokenize(sentence: str) -> list[Token]:
    """Lowercased word tokens plus single-character punctuation tokens;
    offsets index into the input, so slicing reconstructs it."""
    tokens: list[Token] = []
    i = 0
    n = len(sentence)
    while i < n:
        c = sentence[i]
        if c.isspace():
            i += 1
            continue
        if c.isalnum():
            j = i
            while j < n and sentence[j].isalnum():
                j += 1
            tokens.append(Token(sentence[i:j].lower(), i, j))
            i = j
        else:
            tokens.append(Token(c, i, i + 1))
            i += 1
    return tokens


def remove_stopwords(tokens: list[Token], lexicon: Lexicon) -> list[Token]:
    """Drop stopword tokens, preserving order. A stopword that begins a
    vocabulary phrase is kept so extraction can still anchor there."""
    return [
        t
        for t in tokens
        if t.text not in lexicon.stopwords or t.text in lexicon.phrase_initial_words
    ]


def spell_correct(token: str, lexicon: Lexicon) -> list[str]:
    """Ranked correction candidates.

    Known words return themselves. Unknown words return every dictionary
    word within edit distance 2, ranked by (distance, frequency desc,
    lexicographic); an empty list flags the token as unknown.
    """
    if not token:
        raise VbdError("cannot spell-correct an empty token")
    if token in lexicon.dictionary:
        return [token]
    scored = []
    for word, freq in lexicon.dictionary.items():
        d = bounded_levenshtein(token, word, MAX_EDIT_DISTANCE)
        if d <= MAX_EDIT_DISTANCE:
            scored.append((d, -freq, word))
    scored.sort()
    return [word for _, _, word in scored]


def _effective_word(token: Token, lexicon: Lexicon) -> tuple[str, bool]:
    """The form a token contributes to phrase matching: itself when known,
    otherwise its best correction (corrected flag True)."""
    if not token.is_word or token.text in lexicon.dictionary:
        return token.text, False
    candidates = spell_correct(token.text, lexicon)
    if candidates:
        return candidates[0], True
    return token.text, False


def extract_entities(tokens: list[Token], lexicon: Lexicon) -> list[EntityMention]:
    """Greedy longest-match phrase extraction over a stopword-filtered
    token stream; punctuation tokens block matches. Spell correction is
    applied per token before matching."""
    mentions: list[EntityMention] = []
    effective = [_effective_word(t, lexicon) for t in tokens]
    i = 0
    while i < len(tokens):
        word, _ = effective[i]
        matched = False
        for key in lexicon._by_first.get(word, ()):
            end = i + len(key)
            if end > len(tokens):
                continue
            window = effective[i:end]
            if tuple(w for w, _ in window) == key:
                phrase, concept = lexicon._match_keys[key]
                corrected = any(flag for _, flag in window)
                first, last = tokens[i], tokens[end - 1]
                mentions.append(
                    EntityMention(concept, first.begin, last.end, phrase, corrected)
                )
                i = end
                matched = True
                break
        if not matched:
            i += 1
    return mentions


def extract_from_text(text: str, lexicon: Lexicon) -> list[EntityMention]:
    """Full pipeline: sentences -> tokens -> stopword removal -> extraction,
    with mention offsets absolute in the input text."""
    mentions: list[EntityMention] = []
    for sentence in split_sentences(text, lexicon.abbreviations):
        tokens = remove_stopwords(tokenize(sentence.text), lexicon)
        for m in extract_entities(tokens, lexicon):
            mentions.append(
                EntityMention(
                    m.concept,
                    m.begin + sentence.begin,
                    m.end + sentence.begin,
                    m.surface,
                    m.corrected,
                )
            )
    return mentions


def emit_rdf(
    mentions: list[EntityMention],
    patient: Iri,
    mapping: dict[str, str],
    *,
    patient_class: str = VBD_NS + "patient",
) -> list[Triple]:
    """Deterministic triples for a patient's mentions.

    ``mapping`` assigns each concept IRI an emission style: "data_property"
    (boolean true assertion) or "class" (type assertion). The patient is
    typed exactly once; duplicate mentions collapse to one triple.
    """
    unmapped = sorted({m.concept for m in mentions if m.concept not in mapping})
    if unmapped:
        raise VbdError(f"no emission mapping for concepts: {', '.join(unmapped)}")
    triples: list[Triple] = [Triple(patient, Iri(RDF_TYPE), Iri(patient_class))]
    seen = {triples[0]}
    for m in mentions:
        style = mapping[m.concept]
        if style == "data_property":
            t = Triple(patient, Iri(m.concept), Literal("true", BOOLEAN))
        elif style == "class":
            t = Triple(patient, Iri(RDF_TYPE), Iri(m.concept))
        else:
            raise VbdError(f"unknown emission style {style!r} for {m.concept}")
        if t not in seen:
            seen.add(t)
            triples.append(t)
    return triples


# -- extraction evaluation -------------------------------------------------------


@dataclass
class AnnotatedNote:
    disease: str
    text: str
    gold: list[str]  # expected concept IRIs, with multiplicity


@dataclass
class ExtractionRow:
    disease: str
    total_extracted: int
    matching_gold: int

    @property
    def percent(self) -> float:
        return 100.0 * self.matching_gold / self.total_extracted if self.total_extracted else 0.0


@dataclass
class ExtractionReport:
    rows: list[ExtractionRow]

    def totals(self) -> tuple[int, int]:
        return (
            sum(r.total_extracted for r in self.rows),
            sum(r.matching_gold for r in self.rows),
        )

    def render(self) -> str:
        width = max([len(r.disease) for r in self.rows] + [len("disease")])
        lines = [f"{'disease'.ljust(width)}  extracted  matching  percent"]
        for r in self.rows:
            lines.append(f"{r.disease.ljust(width)}  {r.total_extracted:9d}  {r.matching_gold:8d}  {r.percent:6.1f}%")
        total, matching = self.totals()
        lines.append(f"{'total'.ljust(width)}  {total:9d}  {matching:8d}")
        return "\n".join(lines)


def evaluate_extraction(notes: list[AnnotatedNote], lexicon: Lexicon) -> ExtractionReport:
    """Per-disease extraction census: how many mentions were extracted and
    how many agree with the gold annotations (multiset intersection).
    Percent is matching/extracted."""
    per_disease: dict[str, tuple[int, int]] = {}
    for note in notes:
        extracted = [m.concept for m in extract_from_text(note.text, lexicon)]
        gold = list(note.gold)
        matching = 0
        remaining = list(gold)
        for concept in extracted:
            if concept in remaining:
                remaining.remove(concept)
                matching += 1
        total, match = per_disease.get(note.disease, (0, 0))
        per_disease[note.disease] = (total + len(extracted), match + matching)
    rows = [
        ExtractionRow(disease, total, match)
        for disease, (total, match) in sorted(per_disease.items())
    ]
    return ExtractionReport(rows)


# -- lexicon loading ---------------------------------------------------------------


def load_lexicon(directory: str | Path, concept_resolver=None) -> Lexicon:
    """Load lexicon files; ``concept_resolver`` maps vocabulary concept
    names (possibly prefixed) to absolute IRIs."""
    root = Path(directory)
    dictionary: dict[str, int] = {}
    for line in _lines(root / "dictionary.txt"):
        word, _, freq = line.partition("\t")
        dictionary[word.strip().lower()] = int(freq) if freq.strip() else 1
    stopwords = {line.strip().lower() for line in _lines(root / "stopwords.txt")}
    vocabulary: dict[str, str] = {}
    for line in _lines(root / "vocabulary.tsv"):
        phrase, _, concept = line.partition("\t")
        if not concept.strip():
            raise VbdError(f"vocabulary line missing concept IRI: {line!r}")
        concept = concept.strip()
        if concept_resolver is not None:
            concept = concept_resolver(concept)
        vocabulary[phrase.strip().lower()] = concept
    abbreviations = {line.strip().lower() for line in _lines(root / "abbreviations.txt")}
    return Lexicon(dictionary, stopwords, vocabulary, abbreviations)


def _lines(path: Path) -> list[str]:
    if not path.exists():
        return []
    out = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def suggest_similar(name: str, candidates: list[str], limit: int = 3) -> list[str]:
    """Nearest candidate names by edit distance (for did-you-mean errors)."""
    scored = []
    for c in candidates:
        d = bounded_levenshtein(name.lower(), c.lower(), MAX_EDIT_DISTANCE + 1)
        if d <= MAX_EDIT_DISTANCE + 1:
            scored.append((d, c))
    scored.sort()
    return [c for _, c in scored[:limit]]
