"""Meeting and news corpora: parsing, validation and pseudo-meeting conversion."""
from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, ParseError, ValidationError
from .text import default_lexicons, split_sentences

log = logging.getLogger(__name__)

SPLITS = ("train", "test")
QUESTIONER = "questioner"
DEFAULT_PROMPT = "Summarize the article."
DEFAULT_SEGMENT_SIZE = 4


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: str
    content: str


@dataclass(frozen=True)
class Meeting:
    id: str
    turns: tuple
    split: str = "test"

    def __len__(self):
        return len(self.turns)

    @property
    def text(self):
        return " ".join(t.content for t in self.turns)


@dataclass(frozen=True)
class QueryInstance:
    instance_id: str
    meeting_id: str
    query: str
    reference_summary: str
    spans: tuple
    split: str = "test"
    kind: str = "specific"


@dataclass(frozen=True)
class NewsArticle:
    id: str
    body: tuple
    highlights: tuple

    @property
    def text(self):
        return " ".join(self.body)


@dataclass
class CorpusStats:
    meeting_count: int = 0
    train_instance_count: int = 0
    test_instance_count: int = 0
    per_meeting_query_counts: dict = field(default_factory=dict)

    @property
    def instance_count(self):
        return self.train_instance_count + self.test_instance_count

    def as_dict(self):
        return {
            "meeting_count": self.meeting_count,
            "train_instance_count": self.train_instance_count,
            "test_instance_count": self.test_instance_count,
            "instance_count": self.instance_count,
            "per_meeting_query_counts": dict(sorted(self.per_meeting_query_counts.items())),
        }


@dataclass
class Corpus:
    meetings: dict = field(default_factory=dict)
    instances: list = field(default_factory=list)

    def add(self, meeting, instances):
        if meeting.id in self.meetings:
            raise ValidationError(f"duplicate meeting id {meeting.id!r}")
        self.meetings[meeting.id] = meeting
        self.instances.extend(instances)

    def split(self, name):
        """Instances of one split, ordered by instance id."""
        return sorted((i for i in self.instances if i.split == name), key=lambda i: i.instance_id)


def _require(record, key, kind, where):
    if key not in record:
        raise ParseError(f"{where}: missing field {key!r}")
    value = record[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} has type {type(value).__name__}")
    return value


def _span_index(value, where):
    if isinstance(value, bool):
        raise ParseError(f"{where}: span index {value!r} is not an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"\s*-?\d+\s*", value):
        return int(value)
    raise ParseError(f"{where}: span index {value!r} is not an integer")


def _check_spans(instance, n_turns):
    for begin, end in instance.spans:
        if not 0 <= begin <= end < n_turns:
            raise ValidationError(
                f"instance {instance.instance_id}: span ({begin}, {end}) out of bounds for {n_turns} turns"
            )


def parse_meeting_file(raw, meeting_id, split="test"):
    """Parse one QMSum-format JSON document into a meeting and its query instances.

    General queries carry no span annotation and get the whole meeting as
    their span.  Span indices may be strings or integers.
    """
    where = f"meeting {meeting_id}"
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: invalid JSON ({exc})") from exc
    if not isinstance(record, dict):
        raise ParseError(f"{where}: top-level value must be an object")

    turns = []
    for i, item in enumerate(_require(record, "meeting_transcripts", list, where)):
        if not isinstance(item, dict):
            raise ParseError(f"{where}: meeting_transcripts[{i}] must be an object")
        speaker = _require(item, "speaker", str, f"{where} meeting_transcripts[{i}]").strip()
        content = _require(item, "content", str, f"{where} meeting_transcripts[{i}]")
        if not speaker:
            raise ParseError(f"{where}: meeting_transcripts[{i}] field 'speaker' is empty")
        turns.append(Turn(i, speaker, content))
    meeting = Meeting(meeting_id, tuple(turns), split)
    whole = ((0, len(turns) - 1),) if turns else ()

    instances = []
    for kind, key in (("general", "general_query_list"), ("specific", "specific_query_list")):
        items = record.get(key, [])
        if not isinstance(items, list):
            raise ParseError(f"{where}: field {key!r} must be a list")
        for i, item in enumerate(items):
            at = f"{where} {key}[{i}]"
            if not isinstance(item, dict):
                raise ParseError(f"{at}: must be an object")
            query = _require(item, "query", str, at)
            answer = _require(item, "answer", str, at)
            if not query.strip():
                raise ParseError(f"{at}: field 'query' is empty")
            if not answer.strip():
                raise ParseError(f"{at}: field 'answer' is empty")
            if kind == "general":
                spans = whole
            else:
                raw_spans = _require(item, "relevant_text_span", list, at)
                spans = []
                for span in raw_spans:
                    if not isinstance(span, (list, tuple)) or len(span) != 2:
                        raise ParseError(f"{at}: field 'relevant_text_span' entry {span!r} is not a pair")
                    spans.append((_span_index(span[0], at), _span_index(span[1], at)))
                spans = tuple(spans)
            instance = QueryInstance(
                instance_id=f"{meeting_id}__{kind[0]}{i:02d}",
                meeting_id=meeting_id,
                query=query,
                reference_summary=answer,
                spans=spans,
                split=split,
                kind=kind,
            )
            _check_spans(instance, len(turns))
            instances.append(instance)
    return meeting, instances


def meeting_to_record(meeting, instances):
    """Inverse of :func:`parse_meeting_file` (field-level)."""
    general, specific = [], []
    for inst in sorted(instances, key=lambda i: i.instance_id):
        if inst.kind == "general":
            general.append({"query": inst.query, "answer": inst.reference_summary})
        else:
            specific.append({
                "query": inst.query,
                "answer": inst.reference_summary,
                "relevant_text_span": [[str(b), str(e)] for b, e in inst.spans],
            })
    return {
        "meeting_transcripts": [{"speaker": t.speaker, "content": t.content} for t in meeting.turns],
        "general_query_list": general,
        "specific_query_list": specific,
    }


def load_corpus(root, splits=SPLITS):
    """Read ``<root>/<split>/*.json`` for each split; meeting id is the file stem."""
    root = Path(root)
    if not root.is_dir():
        raise ValidationError(f"corpus root {root} is not a directory")
    corpus = Corpus()
    for split in splits:
        split_dir = root / split
        if not split_dir.is_dir():
            log.warning("corpus root %s has no %s/ directory", root, split)
            continue
        for path in sorted(split_dir.glob("*.json")):
            try:
                meeting, instances = parse_meeting_file(path.read_text(encoding="utf-8"), path.stem, split)
            except (ParseError, ValidationError) as exc:
                raise type(exc)(f"{path}: {exc}") from exc
            corpus.add(meeting, instances)
    return corpus


def validate_corpus(corpus):
    """Check every corpus invariant and return the counts; raise on the first violation."""
    stats = CorpusStats(meeting_count=len(corpus.meetings))
    seen_ids = set()
    seen_pairs = Counter()
    for meeting in corpus.meetings.values():
        for position, turn in enumerate(meeting.turns):
            if turn.index != position:
                raise ValidationError(f"meeting {meeting.id}: turn {position} carries index {turn.index}")
            if not turn.speaker.strip():
                raise ValidationError(f"meeting {meeting.id}: turn {position} has an empty speaker")
        if any(t.speaker.casefold() == QUESTIONER for t in meeting.turns):
            log.warning("meeting %s uses the reserved speaker label %r", meeting.id, QUESTIONER)
        stats.per_meeting_query_counts[meeting.id] = 0

    for inst in corpus.instances:
        if inst.instance_id in seen_ids:
            raise ValidationError(f"duplicate instance id {inst.instance_id!r}")
        seen_ids.add(inst.instance_id)
        meeting = corpus.meetings.get(inst.meeting_id)
        if meeting is None:
            raise ValidationError(f"instance {inst.instance_id}: unknown meeting {inst.meeting_id!r}")
        if inst.split != meeting.split:
            raise ValidationError(f"instance {inst.instance_id}: split {inst.split} differs from its meeting")
        if not inst.query.strip() or not inst.reference_summary.strip():
            raise ValidationError(f"instance {inst.instance_id}: empty query or reference summary")
        _check_spans(inst, len(meeting))
        seen_pairs[(inst.meeting_id, inst.query)] += 1
        stats.per_meeting_query_counts[inst.meeting_id] += 1
        if inst.split == "train":
            stats.train_instance_count += 1
        elif inst.split == "test":
            stats.test_instance_count += 1
        else:
            raise ValidationError(f"instance {inst.instance_id}: unknown split {inst.split!r}")

    for (meeting_id, query), count in sorted(seen_pairs.items()):
        if count > 1:
            log.warning("meeting %s repeats query %r %d times", meeting_id, query, count)
    return stats


def parse_news_story(raw, article_id):
    """Parse a CNN-style story: body text, then ``@highlight`` sections."""
    parts = raw.split("@highlight")
    if len(parts) < 2:
        raise FormatError(f"story {article_id}: no @highlight markers")
    body = []
    for paragraph in re.split(r"\n\s*\n|\n", parts[0]):
        body.extend(split_sentences(paragraph, default_lexicons()))
    if not body:
        raise FormatError(f"story {article_id}: empty body")
    highlights = []
    for i, section in enumerate(parts[1:]):
        text = " ".join(section.split())
        if not text:
            raise FormatError(f"story {article_id}: highlight {i} is empty")
        highlights.append(text)
    return NewsArticle(article_id, tuple(body), tuple(highlights))


def news_to_pseudo_meeting(article, segment_size=DEFAULT_SEGMENT_SIZE, prompt=DEFAULT_PROMPT):
    """Recast a news article as a one-query meeting whose turns are sentence segments."""
    if segment_size < 1:
        raise ValueError("segment_size must be at least 1")
    turns = []
    for k, start in enumerate(range(0, len(article.body), segment_size)):
        content = " ".join(article.body[start:start + segment_size])
        turns.append(Turn(k, f"speaker_{k}", content))
    meeting = Meeting(article.id, tuple(turns), "train")
    instance = QueryInstance(
        instance_id=f"{article.id}__g00",
        meeting_id=article.id,
        query=prompt,
        reference_summary=" ".join(article.highlights),
        spans=((0, len(turns) - 1),),
        split="train",
        kind="general",
    )
    return meeting, instance


def _relatedness_tokens(text):
    stop = default_lexicons().stopwords
    return [tok for tok in re.findall(r"[^\W_]+", text.casefold()) if tok not in stop]


def rank_news_by_relatedness(articles, reference, k):
    """Top-``k`` articles by tf-idf cosine similarity to the reference-corpus centroid.

    Returns ``(article, score)`` pairs, best first, ties broken by article id.
    """
    import numpy as np
    from sklearn.feature_extraction.text import TfidfVectorizer

    reference = sorted(reference, key=lambda m: m.id)
    if not reference:
        raise ValueError("reference corpus is empty")
    if k < 1:
        raise ValueError("k must be positive")
    articles = sorted(articles, key=lambda a: a.id)
    if k > len(articles):
        log.warning("asked for %d articles but only %d are available", k, len(articles))
    if not articles:
        return []

    vectorizer = TfidfVectorizer(tokenizer=_relatedness_tokens, lowercase=False, token_pattern=None)
    try:
        matrix = vectorizer.fit_transform([a.text for a in articles] + [m.text for m in reference])
    except ValueError:
        # no tokens survive anywhere: everything is equally unrelated
        scores = np.zeros(len(articles))
    else:
        article_rows = matrix[: len(articles)]
        centroid = np.asarray(matrix[len(articles):].mean(axis=0)).ravel()
        norm = float(np.linalg.norm(centroid))
        if norm == 0.0:
            scores = np.zeros(len(articles))
        else:
            scores = np.asarray(article_rows @ (centroid / norm)).ravel()

    ranked = sorted(zip(articles, (float(s) for s in scores)), key=lambda pair: (-pair[1], pair[0].id))
    return ranked[:k]
