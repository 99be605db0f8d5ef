"""Sentence splitting, tokenization and a small rule-based POS tagger.

Everything here is driven by three plain-text resources shipped in
``meetsum/data`` (stopwords, abbreviations, POS lexicon).  Each can be
swapped for another file through :func:`load_lexicons`.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", "PUNCT", "X")

_TOKEN_RE = re.compile(r"\w+(?:['’-]\w+)*|[^\w\s]")
_TERMINAL_RE = re.compile(r"[.?!]+[\"')\]]*(?=\s|$)")

# ordered: first match wins
_SUFFIX_RULES = (
    ("ly", "ADV"),
    ("ing", "VERB"),
    ("ed", "VERB"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ive", "ADJ"),
    ("less", "ADJ"),
    ("ical", "ADJ"),
    ("ic", "ADJ"),
    ("ish", "ADJ"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ment", "NOUN"),
    ("ness", "NOUN"),
    ("ity", "NOUN"),
)


@dataclass(frozen=True)
class Lexicons:
    stopwords: frozenset
    abbreviations: frozenset
    pos: dict

    def __hash__(self):
        return id(self)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lower: str
    pos: str
    is_stopword: bool

    @property
    def is_content(self):
        return not self.is_stopword and self.pos != "PUNCT"


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple
    origin: tuple = (0, 0)

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a tagged sentence needs at least one token")

    def __len__(self):
        return len(self.tokens)


def _read_lines(path):
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                yield line


def _bundled(name):
    return resources.files("meetsum").joinpath("data").joinpath(name)


def load_lexicons(stopwords=None, abbreviations=None, pos_lexicon=None):
    """Load the three resources; ``None`` means the bundled file."""
    stop_path = Path(stopwords) if stopwords else _bundled("stopwords.txt")
    abbr_path = Path(abbreviations) if abbreviations else _bundled("abbreviations.txt")
    pos_path = Path(pos_lexicon) if pos_lexicon else _bundled("pos_lexicon.txt")

    pos = {}
    for line in _read_lines(pos_path):
        word, _, tag = line.partition("\t")
        tag = tag.strip()
        if tag not in TAGS:
            raise ValueError(f"{pos_path}: unknown tag {tag!r} for {word!r}")
        pos.setdefault(word.strip().casefold(), tag)
    return Lexicons(
        stopwords=frozenset(w.casefold() for w in _read_lines(stop_path)),
        abbreviations=frozenset(w.casefold() for w in _read_lines(abbr_path)),
        pos=pos,
    )


@lru_cache(maxsize=1)
def default_lexicons():
    return load_lexicons()


def split_sentences(text, lexicons=None):
    """Split an utterance at ``.``, ``?`` or ``!`` followed by whitespace or end of text.

    A period that closes a known abbreviation (``Dr.``, ``e.g.``) does not end
    a sentence.  Text without terminal punctuation comes back as one sentence.
    """
    lex = lexicons or default_lexicons()
    sentences = []
    start = 0
    for match in _TERMINAL_RE.finditer(text):
        if match.group().startswith(".") and match.end() - match.start() == 1:
            word = re.search(r"\S*$", text[:match.end()]).group().casefold()
            word = word.lstrip("\"'([")
            if word in lex.abbreviations:
                continue
        piece = text[start:match.end()].strip()
        if piece:
            sentences.append(piece)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(text):
    return _TOKEN_RE.findall(text)


def _tag_word(lower, lex):
    if lower in lex.pos:
        return lex.pos[lower]
    if not any(ch.isalnum() for ch in lower):
        return "PUNCT" if all(unicodedata.category(ch).startswith("P") for ch in lower) else "X"
    if lower.replace(".", "").replace(",", "").isdigit():
        return "NUM"
    if lower.endswith(("n't", "n’t")):
        return "VERB"
    for apostrophe in ("'", "’"):
        if apostrophe in lower:
            return _tag_word(lower.split(apostrophe, 1)[0], lex)
    for suffix, tag in _SUFFIX_RULES:
        if lower.endswith(suffix) and len(lower) > len(suffix) + 1:
            return tag
    return "NOUN"


def tag_token(surface, lexicons=None):
    lex = lexicons or default_lexicons()
    lower = surface.casefold()
    return TaggedToken(surface, lower, _tag_word(lower, lex), lower in lex.stopwords)


def tag_sentence(text, origin=(0, 0), lexicons=None):
    """Tokenize and tag one sentence: lexicon, then suffix rules, then NOUN."""
    if not text or not text.strip():
        raise ValueError("cannot tag an empty sentence")
    lex = lexicons or default_lexicons()
    tokens = tuple(tag_token(tok, lex) for tok in tokenize(text))
    return TaggedSentence(tokens, tuple(origin))


def detokenize(surfaces):
    """Join token surfaces, attaching closing punctuation to the previous word."""
    out = []
    for tok in surfaces:
        if out and (tok in {".", ",", "?", "!", ";", ":", "%", ")", "]", "}"}):
            out[-1] += tok
        elif out and out[-1] in {"(", "[", "{"}:
            out[-1] += tok
        else:
            out.append(tok)
    return " ".join(out)


def count_tokens(text):
    return len(tokenize(text))
