"""Summarizer boundary: JSON-lines request/response records and worker processes.

A request is ``{"id", "query", "source"}``; a response is ``{"id", "summary"}``.
External workers read requests on stdin and write responses on stdout, one
JSON object per line.
"""
from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass

from .errors import ProtocolError, UsageError
from .text import split_sentences

DEFAULT_TIMEOUT = 600.0


@dataclass(frozen=True)
class SummarizationRequest:
    instance_id: str
    query: str
    source: str

    def to_record(self):
        return {"id": self.instance_id, "query": self.query, "source": self.source}

    @classmethod
    def from_record(cls, record):
        try:
            return cls(str(record["id"]), str(record["query"]), str(record["source"]))
        except (KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed request record {record!r}") from exc


@dataclass(frozen=True)
class SummarizationResponse:
    instance_id: str
    summary: str

    def to_record(self):
        return {"id": self.instance_id, "summary": self.summary}

    @classmethod
    def from_record(cls, record):
        if not isinstance(record, dict) or not isinstance(record.get("id"), str) \
                or not isinstance(record.get("summary"), str):
            raise ProtocolError(f"malformed response record {record!r}")
        return cls(record["id"], record["summary"])


def _line(speaker, text):
    return f"{speaker}: {' '.join(text.split())}"


def render_source(selection):
    """One ``speaker: text`` line per turn.

    Accepts a span selection (turns are ``Turn`` objects) or a short script
    (turns are ``(speaker, text)`` pairs).
    """
    lines = []
    for turn in selection.turns:
        if isinstance(turn, tuple):
            lines.append(_line(*turn))
        else:
            lines.append(_line(turn.speaker, turn.content))
    return "\n".join(lines)


def dumps_records(records):
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def loads_records(text, where="input"):
    records = []
    # only "\n" ends a record; splitlines() would also break on U+0085, U+2028 inside strings
    for n, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"{where} line {n}: invalid JSON ({exc.msg})") from exc
    return records


def check_responses(requests, responses):
    """Match responses to requests one-to-one; return summaries in request order."""
    wanted = [r.instance_id for r in requests]
    if len(set(wanted)) != len(wanted):
        raise UsageError("request batch contains duplicate ids")
    wanted_set = set(wanted)
    got = {}
    duplicates, unknown = [], []
    for resp in responses:
        if resp.instance_id in got:
            duplicates.append(resp.instance_id)
        elif resp.instance_id not in wanted_set:
            unknown.append(resp.instance_id)
        got.setdefault(resp.instance_id, resp)
    missing = [i for i in wanted if i not in got]
    problems = []
    if missing:
        problems.append(f"missing ids: {', '.join(missing)}")
    if duplicates:
        problems.append(f"duplicate ids: {', '.join(sorted(set(duplicates)))}")
    if unknown:
        problems.append(f"unknown ids: {', '.join(sorted(set(unknown)))}")
    if problems:
        raise ProtocolError("; ".join(problems))
    return [got[i] for i in wanted]


def run_external_summarizer(requests, command, timeout=DEFAULT_TIMEOUT):
    """Send the whole batch to one worker process and collect its answers."""
    requests = list(requests)
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise UsageError("empty summarizer command")
    payload = dumps_records(r.to_record() for r in requests)
    try:
        proc = subprocess.run(
            argv, input=payload, capture_output=True, text=True, encoding="utf-8", timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise ProtocolError(f"summarizer worker timed out after {timeout:g} s") from exc
    except OSError as exc:
        raise ProtocolError(f"cannot start summarizer worker {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-5:]
        raise ProtocolError(f"summarizer worker exited with status {proc.returncode}: {' | '.join(tail)}")
    responses = [SummarizationResponse.from_record(r) for r in loads_records(proc.stdout, "worker output")]
    return check_responses(requests, responses)


def strip_speaker(line):
    speaker, sep, text = line.partition(": ")
    return text if sep else line


def lead_n_summarizer(request, budget=3):
    """First ``budget`` sentences of the source with speaker prefixes removed."""
    if budget < 1:
        raise UsageError("lead-N budget must be positive")
    sentences = []
    for line in request.source.split("\n"):
        sentences.extend(split_sentences(strip_speaker(line)))
        if len(sentences) >= budget:
            break
    return SummarizationResponse(request.instance_id, " ".join(sentences[:budget]))


def parse_summarizer(spec):
    """``lead:N`` -> ("lead", N); ``exec:CMD`` -> ("exec", CMD)."""
    kind, _, arg = spec.partition(":")
    if kind == "lead":
        try:
            n = int(arg or 3)
        except ValueError as exc:
            raise UsageError(f"bad lead budget in {spec!r}") from exc
        if n < 1:
            raise UsageError(f"bad lead budget in {spec!r}")
        return "lead", n
    if kind == "exec" and arg.strip():
        return "exec", arg.strip()
    raise UsageError(f"unknown summarizer {spec!r}; use lead:N or exec:COMMAND")


def summarize_batch(requests, spec, timeout=DEFAULT_TIMEOUT):
    kind, arg = parse_summarizer(spec)
    requests = list(requests)
    if kind == "lead":
        return [lead_n_summarizer(r, arg) for r in requests]
    return run_external_summarizer(requests, arg, timeout)
