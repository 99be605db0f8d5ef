"""Command line entry point: ``meetsum <subcommand> ...``.

Exit codes: 0 success, 1 usage, 2 data/validation, 3 worker protocol.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import rouge
from .bridge import (
    DEFAULT_TIMEOUT,
    SummarizationRequest,
    dumps_records,
    loads_records,
    render_source,
    summarize_batch,
)
from .compressor import build_short_script, parse_methods
from .corpus import DEFAULT_PROMPT, DEFAULT_SEGMENT_SIZE, load_corpus, validate_corpus
from .errors import DataError, MeetsumError, UsageError
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    build_requests,
    prepare_pretrain_corpus,
    read_config_file,
    render_table,
    run_experiment,
    write_tables,
)
from .locator import extract_spans, prepend_query_turn

log = logging.getLogger("meetsum")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _config_values(args):
    values = read_config_file(args.config) if args.config else {}
    for key in ("corpus", "split", "min_words", "k", "jobs", "label", "output", "summarizer", "timeout"):
        value = getattr(args, key, None)
        if value is not None:
            values[key] = str(value)
    if getattr(args, "method", None) is not None:
        values["methods"] = args.method
    if getattr(args, "prepend_query", None) is not None:
        values["prepend_query"] = str(args.prepend_query)
    if getattr(args, "require_verb", None) is not None:
        values["require_verb"] = args.require_verb
    return values


def _load_selected(config):
    corpus = load_corpus(config.corpus)
    validate_corpus(corpus)
    return corpus, corpus.split(config.split)


def cmd_validate(args):
    root = args.corpus
    if not root and args.config:
        root = read_config_file(args.config).get("corpus")
    if not root:
        raise UsageError("validate needs --corpus")
    stats = validate_corpus(load_corpus(root))
    out = stats.as_dict()
    if not args.verbose_counts:
        out.pop("per_meeting_query_counts")
    print(json.dumps(out, indent=2))
    return 0


def cmd_prepare(args):
    config = ExperimentConfig.from_mapping(_config_values(args))
    corpus, instances = _load_selected(config)
    requests = build_requests(corpus, instances, (), config.prepend_query, jobs=config.jobs)
    _write_text(args.out, dumps_records(r.to_record() for r in requests))
    if args.references:
        refs = [{"id": i.instance_id, "summary": i.reference_summary} for i in instances]
        _write_text(args.references, dumps_records(refs))
    return 0


def cmd_compress(args):
    values = _config_values(args)
    if not parse_methods(values.get("methods", "")):
        raise UsageError("compress needs --method")
    config = ExperimentConfig.from_mapping(values)
    corpus, instances = _load_selected(config)
    records = []
    for inst in instances:
        selection = extract_spans(corpus.meetings[inst.meeting_id], inst)
        if config.prepend_query:
            selection = prepend_query_turn(selection, inst.query)
        script = build_short_script(selection, config.methods, config.constraints)
        turns = []
        for (speaker, text), results in zip(script.turns, script.provenance):
            turns.append({"speaker": speaker, "text": text, "results": [r.as_dict() for r in results]})
        records.append({
            "id": inst.instance_id,
            "query": inst.query,
            "methods": [m.value for m in script.methods],
            "source": render_source(script),
            "turns": turns,
        })
    _write_text(args.out, dumps_records(records))
    return 0


def cmd_summarize(args):
    if bool(args.builtin) == bool(args.exec):
        raise UsageError("give exactly one of --builtin lead:N or --exec COMMAND")
    spec = args.builtin if args.builtin else f"exec:{args.exec}"
    if args.builtin and not args.builtin.startswith("lead"):
        raise UsageError(f"unknown builtin summarizer {args.builtin!r}")
    requests = [SummarizationRequest.from_record(r) for r in loads_records(_read_text(args.input), "requests")]
    responses = summarize_batch(requests, spec, args.timeout)
    _write_text(args.out, dumps_records(r.to_record() for r in responses))
    return 0


def _summary_field(record, where):
    for key in ("summary", "reference", "answer"):
        if isinstance(record.get(key), str):
            return record[key]
    raise DataError(f"{where}: record has no summary text")


def cmd_score(args):
    cands = loads_records(_read_text(args.candidates), "candidates")
    refs = loads_records(_read_text(args.references), "references")
    if len(cands) != len(refs):
        raise DataError(f"{len(cands)} candidates but {len(refs)} references")
    rows = []
    for n, (c, r) in enumerate(zip(cands, refs), 1):
        if "id" in c and "id" in r and c["id"] != r["id"]:
            raise DataError(f"line {n}: candidate id {c['id']!r} does not match reference id {r['id']!r}")
        report = rouge.score(_summary_field(c, f"candidates line {n}"), _summary_field(r, f"references line {n}"),
                             stem=args.stem)
        rows.append({"id": c.get("id", r.get("id", str(n))), "rouge": report.as_dict()})
    if not rows:
        raise DataError("nothing to score")
    total = rouge.aggregate(rouge.RougeReport.from_dict(row["rouge"]) for row in rows)
    out = {"instances": rows, "aggregate": total.as_dict()}
    _write_text(args.out, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_run(args):
    config = ExperimentConfig.from_mapping(_config_values(args))
    report = run_experiment(config)
    text, _ = render_table([report])
    sys.stdout.write(text)
    log.info("wrote %s", config.output)
    return 0


def cmd_pretrain_corpus(args):
    manifest = prepare_pretrain_corpus(
        args.news, args.corpus, args.k, args.out,
        segment_size=args.segment_size, mode=args.mode, seed=args.seed or 0, prompt=args.prompt,
    )
    print(f"wrote {len(manifest['selected'])} pseudo-meetings to {args.out}")
    return 0


def cmd_report(args):
    reports = [ExperimentReport.load(p) for p in args.reports]
    if args.label:
        if len(args.label) != len(reports):
            raise UsageError("--label must be given once per report")
        for report, label in zip(reports, args.label):
            report.label = label
    text, _ = render_table(reports)
    sys.stdout.write(text)
    if args.out:
        write_tables(reports, args.out, figure=not args.no_figure)
    return 0


def _experiment_flags(p, methods=True):
    p.add_argument("--corpus", help="corpus root with train/ and test/ subdirectories")
    p.add_argument("--split", choices=("train", "test"))
    p.add_argument("--prepend-query", action=argparse.BooleanOptionalAction, default=None,
                   help="insert the query as a first turn by 'questioner'")
    if methods:
        p.add_argument("--method", help="filippova, keyphrase, degeneracy, longest, combined, or a comma list")
        p.add_argument("--min-words", dest="min_words", type=int)
        p.add_argument("--require-verb", dest="require_verb", choices=("true", "false"))
        p.add_argument("--k", type=int, help="candidate paths per utterance (default 100)")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--jobs", type=int, help="worker processes for per-instance work")
    common.add_argument("--seed", type=int, help="seed for random selection modes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="meetsum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="parse and check a corpus, print counts")
    p.add_argument("--corpus")
    p.add_argument("--per-meeting", dest="verbose_counts", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("prepare", parents=[common], help="write summarization requests for gold spans")
    _experiment_flags(p, methods=False)
    p.add_argument("--out", help="requests file (default stdout)")
    p.add_argument("--references", help="also write reference summaries here")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("compress", parents=[common], help="write short-script records")
    _experiment_flags(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("summarize", parents=[common], help="answer summarization requests")
    p.add_argument("--builtin", help="lead:N")
    p.add_argument("--exec", help="worker command line")
    p.add_argument("--in", dest="input", help="requests file (default stdin)")
    p.add_argument("--out", help="responses file (default stdout)")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("score", parents=[common], help="ROUGE over line-aligned record files")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--stem", action="store_true", help="Porter stemming (needs nltk)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", parents=[common], help="full experiment: locate, compress, summarize, score")
    _experiment_flags(p)
    p.add_argument("--summarizer", help="lead:N or exec:COMMAND")
    p.add_argument("--output", help="report directory")
    p.add_argument("--label", help="table row name")
    p.add_argument("--timeout", type=float)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pretrain-corpus", parents=[common], help="news stories -> pseudo-meeting corpus")
    p.add_argument("--news", required=True, help="directory of .story files")
    p.add_argument("--corpus", required=True, help="reference meeting corpus root")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE)
    p.add_argument("--mode", choices=("related", "random"), default="related")
    p.add_argument("--prompt", default=DEFAULT_PROMPT)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pretrain_corpus)

    p = sub.add_parser("report", parents=[common], help="tabulate report.json files")
    p.add_argument("reports", nargs="+")
    p.add_argument("--label", action="append", help="override row names, once per report")
    p.add_argument("--out", help="directory for table.txt, table.tsv and rouge_f.png")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MeetsumError as exc:
        print(f"meetsum {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"meetsum {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
