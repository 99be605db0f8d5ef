"""End-to-end experiment runs, result tables and pre-training corpus preparation."""
from __future__ import annotations

import json
import logging
import os
import random
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from . import rouge
from .bridge import DEFAULT_TIMEOUT, SummarizationRequest, dumps_records, parse_summarizer, render_source, summarize_batch
from .compressor import Constraints, build_short_script, parse_methods
from .corpus import (
    DEFAULT_PROMPT,
    DEFAULT_SEGMENT_SIZE,
    load_corpus,
    meeting_to_record,
    news_to_pseudo_meeting,
    parse_news_story,
    rank_news_by_relatedness,
    validate_corpus,
)
from .errors import DataError, MeetsumError, UsageError
from .locator import extract_spans, prepend_query_turn

log = logging.getLogger(__name__)

TABLE_COLUMNS = ("Model", "ROUGE-1 F", "ROUGE-2 F", "ROUGE-L F")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise UsageError(f"expected true/false, got {value!r}")


@dataclass
class ExperimentConfig:
    corpus: str = ""
    split: str = "test"
    methods: tuple = ()
    prepend_query: bool = False
    min_words: int = 8
    require_verb: bool = True
    k: int = 100
    summarizer: str = "lead:3"
    output: str = "runs/experiment"
    label: str = "experiment"
    jobs: int = 1
    timeout: float = DEFAULT_TIMEOUT

    @property
    def constraints(self):
        return Constraints(self.min_words, self.require_verb, self.k)

    @classmethod
    def from_mapping(cls, values):
        """Build from string values (config file or CLI); unknown keys are an error."""
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in values.items():
            name = key.replace("-", "_")
            if name not in known:
                raise UsageError(f"unknown configuration key {key!r}")
            if value is None:
                continue
            if name == "methods":
                kwargs[name] = parse_methods(value)
            elif name in ("prepend_query", "require_verb"):
                kwargs[name] = parse_bool(value)
            elif name in ("min_words", "k", "jobs"):
                try:
                    kwargs[name] = int(value)
                except ValueError as exc:
                    raise UsageError(f"{key} must be an integer, got {value!r}") from exc
            elif name == "timeout":
                kwargs[name] = float(value)
            else:
                kwargs[name] = str(value)
        config = cls(**kwargs)
        config.check()
        return config

    def check(self):
        if not self.corpus:
            raise UsageError("no corpus root given")
        if self.split not in ("train", "test"):
            raise UsageError(f"split must be train or test, not {self.split!r}")
        if self.min_words < 0 or self.k < 1 or self.jobs < 1:
            raise UsageError("min_words must be >= 0, k and jobs >= 1")
        parse_summarizer(self.summarizer)

    def echo(self):
        out = asdict(self)
        out["methods"] = [m.value for m in self.methods]
        # scheduling and output location do not change results
        out.pop("jobs")
        out.pop("output")
        return out


def read_config_file(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as f:
        for n, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key = value")
            values[key.strip()] = value.strip()
    return values


@dataclass
class InstanceRecord:
    instance_id: str
    candidate: str
    scores: rouge.RougeReport

    def as_dict(self):
        return {"id": self.instance_id, "candidate": self.candidate, "rouge": self.scores.as_dict()}


@dataclass
class ExperimentReport:
    label: str
    records: list
    aggregate: rouge.RougeReport
    config: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "label": self.label,
            "config": self.config,
            "corpus_stats": self.stats,
            "aggregate": self.aggregate.as_dict(),
            "instances": [r.as_dict() for r in self.records],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        records = [InstanceRecord(r["id"], r["candidate"], rouge.RougeReport.from_dict(r["rouge"]))
                   for r in d.get("instances", [])]
        return cls(d["label"], records, rouge.RougeReport.from_dict(d["aggregate"]),
                   d.get("config", {}), d.get("corpus_stats", {}))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    @property
    def f_scores(self):
        return (self.aggregate.rouge1.f1, self.aggregate.rouge2.f1, self.aggregate.rougeL.f1)


def build_request(meeting, instance, methods=(), prepend_query=False, constraints=Constraints()):
    """Locate, optionally prepend the query, optionally compress, and render."""
    try:
        selection = extract_spans(meeting, instance)
        if prepend_query:
            selection = prepend_query_turn(selection, instance.query)
        if methods:
            selection = build_short_script(selection, methods, constraints)
        return SummarizationRequest(instance.instance_id, instance.query, render_source(selection))
    except MeetsumError as exc:
        raise type(exc)(f"instance {instance.instance_id}: {exc}") from exc


def _build_request_args(args):
    return build_request(*args)


def build_requests(corpus, instances, methods=(), prepend_query=False, constraints=Constraints(), jobs=1):
    """Requests in the order of ``instances``, regardless of worker scheduling."""
    work = [(corpus.meetings[i.meeting_id], i, tuple(methods), prepend_query, constraints) for i in instances]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_build_request_args, work, chunksize=max(1, len(work) // (4 * jobs))))
    return [build_request(*w) for w in work]


def _atomic_dir(target):
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))


def _commit_dir(tmp, target):
    target = Path(target)
    if target.exists():
        old = Path(tempfile.mkdtemp(prefix=f".{target.name}.old.", dir=target.parent))
        os.replace(target, old / target.name)
        os.replace(tmp, target)
        shutil.rmtree(old)
    else:
        os.replace(tmp, target)


def run_experiment(config):
    """Run one configuration over its split and write the report directory.

    Output files: ``report.json``, ``requests.jsonl``, ``table.txt``,
    ``table.tsv`` and ``rouge_f.png``.  Nothing is written if any stage fails.
    """
    corpus = load_corpus(config.corpus)
    stats = validate_corpus(corpus)
    instances = corpus.split(config.split)
    if not instances:
        raise DataError(f"corpus {config.corpus} has no {config.split} instances")

    requests = build_requests(corpus, instances, config.methods, config.prepend_query,
                              config.constraints, config.jobs)
    responses = summarize_batch(requests, config.summarizer, config.timeout)

    records = []
    for inst, resp in zip(instances, responses):
        records.append(InstanceRecord(inst.instance_id, resp.summary, rouge.score(resp.summary, inst.reference_summary)))
    report = ExperimentReport(
        label=config.label,
        records=records,
        aggregate=rouge.aggregate(r.scores for r in records),
        config=config.echo(),
        stats=stats.as_dict(),
    )

    tmp = _atomic_dir(config.output)
    try:
        (tmp / "report.json").write_text(report.to_json(), encoding="utf-8")
        (tmp / "requests.jsonl").write_text(dumps_records(r.to_record() for r in requests), encoding="utf-8")
        write_tables([report], tmp)
        _commit_dir(tmp, config.output)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return report


def format_score(value):
    """Three decimals, half-up, on the shortest repr of the float."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def table_rows(reports):
    return [(r.label, tuple(format_score(v) for v in r.f_scores)) for r in reports]


def render_table(reports):
    """Return ``(text table, tab-separated table)`` with one row per report, in order."""
    reports = list(reports)
    if not reports:
        raise UsageError("no reports to tabulate")
    rows = [TABLE_COLUMNS] + [(label,) + scores for label, scores in table_rows(reports)]
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    text = "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows) + "\n"
    tsv = "".join("\t".join(row) + "\n" for row in rows)
    return text, tsv


def write_tables(reports, out_dir, figure=True):
    from .plotting import rouge_bars

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text, tsv = render_table(reports)
    (out_dir / "table.txt").write_text(text, encoding="utf-8")
    (out_dir / "table.tsv").write_text(tsv, encoding="utf-8")
    paths = [out_dir / "table.txt", out_dir / "table.tsv"]
    if figure:
        rows = [(r.label, r.f_scores) for r in reports]
        paths.append(rouge_bars(rows, out_dir / "rouge_f.png"))
    return paths


def load_news(news_root):
    articles = []
    for path in sorted(Path(news_root).glob("*.story")):
        try:
            articles.append(parse_news_story(path.read_text(encoding="utf-8"), path.stem))
        except DataError as exc:
            raise type(exc)(f"{path}: {exc}") from exc
    return articles


def prepare_pretrain_corpus(news_root, reference_root, k, output, segment_size=DEFAULT_SEGMENT_SIZE,
                            mode="related", seed=0, prompt=DEFAULT_PROMPT):
    """Select ``k`` news stories and write them as pseudo-meetings plus a manifest.

    ``mode="related"`` keeps the stories closest to the reference meetings;
    ``mode="random"`` draws ``k`` uniformly with ``seed``.  The manifest
    lists the chosen ids with their relatedness scores, highest first.
    """
    if mode not in ("related", "random"):
        raise UsageError(f"mode must be related or random, not {mode!r}")
    articles = load_news(news_root)
    if not articles:
        raise DataError(f"no .story files under {news_root}")
    meetings = list(load_corpus(reference_root).meetings.values())
    scored = rank_news_by_relatedness(articles, meetings, len(articles))
    if k > len(articles):
        log.warning("asked for %d stories but only %d are available", k, len(articles))
    if mode == "related":
        chosen = scored[:k]
    else:
        picked = set(random.Random(seed).sample(sorted(a.id for a in articles), min(k, len(articles))))
        chosen = [pair for pair in scored if pair[0].id in picked]

    tmp = _atomic_dir(output)
    try:
        (tmp / "train").mkdir()
        for article, _ in chosen:
            meeting, instance = news_to_pseudo_meeting(article, segment_size, prompt)
            record = meeting_to_record(meeting, [instance])
            (tmp / "train" / f"{article.id}.json").write_text(
                json.dumps(record, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        manifest = {
            "mode": mode,
            "k": k,
            "seed": seed if mode == "random" else None,
            "segment_size": segment_size,
            "prompt": prompt,
            "selected": [{"id": a.id, "score": s} for a, s in chosen],
        }
        (tmp / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        _commit_dir(tmp, output)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return manifest
