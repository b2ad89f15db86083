"""Synthetic and demo corpora for tests, benchmarks, and demos.

The demo corpus is a small, fully deterministic set of broadcasts whose
topical vocabulary is covered by the bundled English lexicon, so the
whole pipeline (segmentation, keywords, entities, trends) behaves
predictably on it.
"""

from __future__ import annotations

import random

from .codec import serialize_transcript
from .lingproc import ContentWord, LanguageResources
from .model import Gender, Transcript, TranscriptWord, Utterance, parse_utc

WORD_MS = 400


def make_transcript(
    doc_id: str,
    utterances: list[list],
    language: str = "en",
    source: str = "demo",
    air_date: str = "2010-08-15T18:00:00Z",
    media_url: str = "",
    start_ms: int = 0,
) -> Transcript:
    """Build a transcript from lists of words; each word is a surface
    string or a (surface, confidence) pair. Times are synthesized."""
    out = []
    t = start_ms
    for i, words in enumerate(utterances):
        speaker = f"spk{i % 2 + 1}"
        built = []
        for spec in words:
            if isinstance(spec, tuple):
                surface, conf = spec
            else:
                surface, conf = spec, 1.0
            built.append(
                TranscriptWord(
                    surface=surface,
                    start_ms=t,
                    duration_ms=WORD_MS - 100,
                    confidence=conf,
                    speaker_id=speaker,
                    gender=Gender.UNKNOWN,
                )
            )
            t += WORD_MS
        out.append(Utterance(words=tuple(built), speaker_id=speaker, index=i))
        t += WORD_MS  # inter-utterance gap
    return Transcript(
        doc_id=doc_id,
        language=language,
        source=source,
        air_date=parse_utc(air_date),
        media_url=media_url or f"http://media.example/{doc_id}.mp4",
        utterances=tuple(out),
    )


def synthetic_resources(vocab: list[str], language: str = "en") -> LanguageResources:
    """Resources that tag every vocab word as a noun lemmatizing to itself."""
    return LanguageResources(
        language=language,
        lexicon={w: (w, "noun") for w in vocab},
    )


def content_word(lemma: str, confidence: float = 1.0, unit: int = 0, ref: int = 0) -> ContentWord:
    return ContentWord(lemma=lemma, confidence=confidence, utterance_index=unit, word_ref=ref)


def random_units(
    rng: random.Random,
    max_units: int = 12,
    max_vocab: int = 8,
    max_words_per_unit: int = 5,
    random_confidence: bool = True,
) -> list[list[ContentWord]]:
    """Random per-utterance content units for oracle comparisons."""
    T = rng.randint(1, max_units)
    vocab = [f"w{i}" for i in range(rng.randint(1, max_vocab))]
    ref = 0
    units = []
    for u in range(T):
        unit = []
        for _ in range(rng.randint(0, max_words_per_unit)):
            conf = rng.uniform(0.05, 1.0) if random_confidence else 1.0
            unit.append(content_word(rng.choice(vocab), conf, u, ref))
            ref += 1
        units.append(unit)
    return units


def two_topic_units(
    rng: random.Random,
    units_per_topic: int = 4,
    repeats_per_unit: int = 2,
    vocab_per_topic: int = 4,
) -> tuple[list[list[ContentWord]], int]:
    """Two disjoint-vocabulary topics back to back; returns (units, boundary).

    Each unit is a shuffled balanced draw of its topic's lemmas, so the
    only structure in the document is the topic change itself.
    """
    offset = rng.randint(0, 10_000)
    vocab_a = [f"a{offset}_{i}" for i in range(vocab_per_topic)]
    vocab_b = [f"b{offset}_{i}" for i in range(vocab_per_topic)]
    units = []
    ref = 0
    for u in range(2 * units_per_topic):
        vocab = vocab_a if u < units_per_topic else vocab_b
        lemmas = vocab * repeats_per_unit
        rng.shuffle(lemmas)
        unit = []
        for lemma in lemmas:
            unit.append(content_word(lemma, 1.0, u, ref))
            ref += 1
        units.append(unit)
    return units, units_per_topic


def inject_noise(
    rng: random.Random,
    units: list[list[ContentWord]],
    fraction: float,
    confidence: float,
    noise_vocab: list[str] | None = None,
) -> list[list[ContentWord]]:
    """Scatter noise words (at the given recognition confidence) into a copy
    of the units; up to ``fraction`` of the original word count.

    By default noise lemmas are drawn from the document's own vocabulary,
    imitating recognition errors that substitute plausible but misplaced
    words; cross-topic insertions are what misleads the cohesion cost.
    """
    total_words = sum(len(u) for u in units)
    n_noise = int(total_words * fraction)
    if noise_vocab is None:
        noise_vocab = sorted({w.lemma for unit in units for w in unit})
    out = [list(u) for u in units]
    for _ in range(n_noise):
        unit = rng.randrange(len(out))
        pos = rng.randint(0, len(out[unit]))
        out[unit].insert(
            pos,
            content_word(rng.choice(noise_vocab), confidence, unit, 10_000 + rng.randint(0, 9999)),
        )
    return out


def inject_boundary_noise(
    rng: random.Random,
    units: list[list[ContentWord]],
    boundary: int,
    fraction: float,
    confidence: float,
) -> list[list[ContentWord]]:
    """Adversarial recognition noise: words from the far side of a topic
    boundary inserted into the two units adjacent to it.

    This is the worst placement per noise word for a cohesion-based
    segmenter, which makes it the sharpest probe of confidence weighting:
    at low confidence the bridge words should be discounted away.
    """
    total_words = sum(len(u) for u in units)
    n_noise = int(total_words * fraction)
    vocab_before = sorted({w.lemma for u in units[:boundary] for w in u})
    vocab_after = sorted({w.lemma for u in units[boundary:] for w in u})
    out = [list(u) for u in units]
    for _ in range(n_noise):
        unit = rng.choice([boundary - 1, boundary])
        vocab = vocab_after if unit < boundary else vocab_before
        pos = rng.randint(0, len(out[unit]))
        out[unit].insert(
            pos,
            content_word(rng.choice(vocab), confidence, unit, 90_000 + rng.randint(0, 9999)),
        )
    return out


# -- demo corpus ---------------------------------------------------------------

_STORM = [
    ["Severe", "storms", "hit", "Carolina", "Beach", "this", "morning"],
    ["heavy", "winds", "and", "rain", "caused", "major", "flood", "damage"],
    ["storm", "warnings", "remain", "for", "New", "Jersey", "residents"],
]

_FORECLOSURE = [
    ["foreclosure", "rates", "rose", "again", "this", "year"],
    ["banks", "report", "more", "home", "foreclosures", "in", "the", "mortgage", "markets"],
    ["home", "prices", "fell", "as", "foreclosure", "filings", "hit", "markets"],
]

_TONY = [
    ["actor", "Tony", "Curtis", "died", "at", "his", "Hollywood", "home"],
    ["the", "movie", "star", "Tony", "Curtis", "made", "many", "films"],
    ["his", "daughter", "Jamie", "Lee", "Curtis", "and", "Marilyn", "Monroe", "starred", "with", "him"],
]

_RAMADAN = [
    ["the", "holy", "month", "of", "Ramadan", "began", "this", "week"],
    ["Ramadan", "prayers", "filled", "the", "mosque", "each", "evening"],
    ["families", "celebrate", "Ramadan", "with", "fasting", "and", "prayer"],
]

_HALLOWEEN = [
    ["children", "in", "Halloween", "costumes", "filled", "the", "schools"],
    ["Halloween", "candy", "and", "pumpkins", "sold", "out", "early"],
    ["the", "Halloween", "festival", "drew", "big", "crowds", "this", "year"],
]

_OBAMA_ECONOMY = [
    ["President", "Barack", "Obama", "spoke", "about", "the", "economy"],
    ["Obama", "said", "the", "markets", "and", "banks", "need", "new", "policies"],
    ["the", "president", "visited", "a", "bank", "to", "discuss", "mortgage", "rates"],
]

_PAUL_CAMPAIGN = [
    ["senator", "Ron", "Paul", "launched", "his", "election", "campaign"],
    ["Ron", "Paul", "told", "voters", "the", "campaign", "is", "about", "votes"],
    ["the", "election", "debate", "drew", "voters", "to", "the", "campaign"],
]

_JOINT_POLITICS = [
    ["Ron", "Paul", "and", "Barack", "Obama", "debate", "the", "election"],
    ["Obama", "and", "Paul", "traded", "campaign", "attacks", "in", "the", "debate"],
    ["voters", "watched", "the", "president", "and", "the", "senator", "debate"],
]

_AFGHANISTAN_WAR = [
    ["troops", "fought", "new", "attacks", "in", "Afghanistan", "this", "week"],
    ["the", "war", "in", "Afghanistan", "and", "Iraq", "strains", "military", "security"],
    ["soldiers", "patrol", "the", "border", "near", "Kabul", "in", "Afghanistan"],
]


def demo_documents() -> list[Transcript]:
    """Deterministic multi-topic corpus for tests, demos, and the UI fixture."""
    docs = []

    for i in range(3):
        docs.append(
            make_transcript(
                f"aug-ramadan-{i}",
                _RAMADAN + _OBAMA_ECONOMY[: i + 1],
                source="intl",
                air_date=f"2010-08-{10 + i:02d}T18:00:00Z",
            )
        )
    for i in range(2):
        docs.append(
            make_transcript(
                f"oct-halloween-{i}",
                _HALLOWEEN + _STORM[: i + 1],
                source="us",
                air_date=f"2010-10-{27 + i:02d}T18:00:00Z",
            )
        )

    docs.append(
        make_transcript(
            "pol-split",
            _OBAMA_ECONOMY + _PAUL_CAMPAIGN,
            source="us",
            air_date="2010-08-14T12:00:00Z",
        )
    )
    docs.append(
        make_transcript(
            "pol-joint",
            _JOINT_POLITICS,
            source="us",
            air_date="2010-08-16T12:00:00Z",
        )
    )
    docs.append(
        make_transcript(
            "cbs-evening",
            _STORM + _FORECLOSURE + _TONY,
            source="cbs",
            air_date="2010-10-01T22:00:00Z",
        )
    )
    docs.append(
        make_transcript(
            "afghan-report",
            _AFGHANISTAN_WAR + _FORECLOSURE,
            source="intl",
            air_date="2010-08-18T06:00:00Z",
        )
    )
    docs.append(
        make_transcript(
            "ar-news",
            [
                ["أخبار", "اليوم", "من", "أفغانستان"],
                ["الحرب", "في", "أفغانستان", "مستمرة"],
            ],
            language="ar",
            source="intl-ar",
            air_date="2010-08-19T06:00:00Z",
        )
    )
    return docs


def demo_corpus_xml() -> list[bytes]:
    return [serialize_transcript(t) for t in demo_documents()]


def throughput_transcript(
    rng: random.Random,
    doc_id: str,
    n_words: int = 2500,
    n_topics: int = 8,
    words_per_utterance: int = 15,
    vocab_per_topic: int = 30,
    air_date: str = "2010-09-01T08:00:00Z",
) -> tuple[Transcript, list[str]]:
    """A 15-minute-scale transcript with drifting topical vocabulary;
    returns the transcript and its full vocabulary (for resource synthesis)."""
    vocab = [
        [f"t{topic}word{i}" for i in range(vocab_per_topic)] for topic in range(n_topics)
    ]
    utterances = []
    words_left = n_words
    topic = 0
    while words_left > 0:
        take = min(words_per_utterance, words_left)
        utterances.append([rng.choice(vocab[topic]) for _ in range(take)])
        words_left -= take
        if rng.random() < 0.08:
            topic = (topic + 1) % n_topics
    t = make_transcript(doc_id, utterances, source="synth", air_date=air_date)
    return t, [w for topic_vocab in vocab for w in topic_vocab]
