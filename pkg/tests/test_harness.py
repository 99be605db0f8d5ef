import json
import logging

import pytest

from conftest import worker_command
from meetsum.bridge import loads_records, render_source
from meetsum.corpus import load_corpus
from meetsum.errors import ProtocolError, UsageError
from meetsum.harness import (
    ExperimentConfig,
    ExperimentReport,
    format_score,
    prepare_pretrain_corpus,
    read_config_file,
    render_table,
    run_experiment,
    write_tables,
)
from meetsum.locator import extract_spans
from meetsum.rouge import PRF, RougeReport, aggregate


def write_references(corpus_root, path, split="test"):
    corpus = load_corpus(corpus_root)
    path.write_text("".join(json.dumps({"id": i.instance_id, "summary": i.reference_summary}) + "\n"
                            for i in corpus.split(split)))
    return path


def config(corpus_root, out, **kw):
    values = {"corpus": str(corpus_root), "output": str(out), "label": "t"}
    values.update(kw)
    return ExperimentConfig.from_mapping(values)


def fixed_report(label, f1s):
    r = RougeReport(*(PRF(f, f, f) for f in f1s))
    return ExperimentReport(label, [], r)


def test_echo_reference_gives_perfect_scores(corpus_root, tmp_path):
    refs = write_references(corpus_root, tmp_path / "refs.jsonl")
    report = run_experiment(config(corpus_root, tmp_path / "run",
                                   summarizer="exec:" + worker_command("echo_reference", refs)))
    assert report.f_scores == (1.0, 1.0, 1.0)
    assert [r.instance_id for r in report.records] == [i.instance_id for i in load_corpus(corpus_root).split("test")]


def test_report_invariants(corpus_root, tmp_path):
    report = run_experiment(config(corpus_root, tmp_path / "run", methods="filippova"))
    assert report.aggregate == aggregate(r.scores for r in report.records)
    assert len({r.instance_id for r in report.records}) == len(report.records) == 7
    on_disk = ExperimentReport.load(tmp_path / "run" / "report.json")
    assert on_disk.aggregate == report.aggregate
    assert on_disk.config["methods"] == ["filippova"]


def test_baseline_sources_are_the_gold_spans(corpus_root, tmp_path):
    run_experiment(config(corpus_root, tmp_path / "run"))
    corpus = load_corpus(corpus_root)
    sent = loads_records((tmp_path / "run" / "requests.jsonl").read_text())
    expected = [render_source(extract_spans(corpus.meetings[i.meeting_id], i)) for i in corpus.split("test")]
    assert [r["source"] for r in sent] == expected


def test_prepend_query_reaches_the_summarizer(corpus_root, tmp_path):
    run_experiment(config(corpus_root, tmp_path / "run", prepend_query="true", methods="combined"))
    for rec in loads_records((tmp_path / "run" / "requests.jsonl").read_text()):
        assert rec["source"].startswith(f"questioner: {rec['query']}")


def _read_all(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_reruns_are_byte_identical(corpus_root, tmp_path):
    run_experiment(config(corpus_root, tmp_path / "a", methods="combined"))
    run_experiment(config(corpus_root, tmp_path / "b", methods="combined", jobs="2"))
    a, b = _read_all(tmp_path / "a"), _read_all(tmp_path / "b")
    assert set(a) == {"report.json", "requests.jsonl", "table.txt", "table.tsv", "rouge_f.png"}
    assert a == b


def test_failed_run_writes_nothing(corpus_root, tmp_path):
    out = tmp_path / "run"
    with pytest.raises(ProtocolError):
        run_experiment(config(corpus_root, out, summarizer="exec:" + worker_command("misbehave", "drop")))
    assert list(tmp_path.iterdir()) == []


def test_failed_rerun_keeps_previous_output(corpus_root, tmp_path):
    out = tmp_path / "run"
    run_experiment(config(corpus_root, out))
    before = _read_all(out)
    with pytest.raises(ProtocolError):
        run_experiment(config(corpus_root, out, summarizer="exec:" + worker_command("misbehave", "crash")))
    assert _read_all(out) == before
    assert [p.name for p in tmp_path.iterdir()] == ["run"]


def test_config_validation(corpus_root):
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"corpus": str(corpus_root), "colour": "red"})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"corpus": str(corpus_root), "k": "many"})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({})
    with pytest.raises(ValueError):
        ExperimentConfig.from_mapping({"corpus": str(corpus_root), "methods": "entailment"})


def test_config_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\ncorpus = /data/qmsum  # trailing\nmethods = combined\n\nprepend_query = yes\n")
    values = read_config_file(path)
    assert values == {"corpus": "/data/qmsum", "methods": "combined", "prepend_query": "yes"}
    cfg = ExperimentConfig.from_mapping(values)
    assert cfg.prepend_query and len(cfg.methods) == 3
    path.write_text("just words\n")
    with pytest.raises(UsageError):
        read_config_file(path)


# --- tables


def test_baseline_row_golden(golden_dir):
    text, tsv = render_table([fixed_report("baseline", (0.251, 0.048, 0.225))])
    assert text == (golden_dir / "baseline_row.txt").read_text()
    assert tsv == (golden_dir / "baseline_row.tsv").read_text()
    assert text.splitlines()[1].split() == ["baseline", "0.251", "0.048", "0.225"]


@pytest.mark.parametrize("value, shown", [
    (0.26666666666666666, "0.267"), (0.2665, "0.267"), (0.2664999, "0.266"), (1.0, "1.000"), (0.0, "0.000"),
])
def test_format_score(value, shown):
    assert format_score(value) == shown


def test_rows_keep_input_order():
    text, tsv = render_table([fixed_report("zeta", (0.1, 0.1, 0.1)), fixed_report("alpha", (0.2, 0.2, 0.2))])
    assert [line.split("\t")[0] for line in tsv.splitlines()] == ["Model", "zeta", "alpha"]
    with pytest.raises(UsageError):
        render_table([])


def test_write_tables(tmp_path):
    paths = write_tables([fixed_report("a", (0.3, 0.1, 0.2)), fixed_report("b", (0.31, 0.11, 0.21))], tmp_path)
    assert [p.name for p in paths] == ["table.txt", "table.tsv", "rouge_f.png"]
    assert (tmp_path / "rouge_f.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


# --- pre-training corpus


def test_pretrain_corpus_all_three(news_root, corpus_root, tmp_path):
    out = tmp_path / "pre"
    manifest = prepare_pretrain_corpus(news_root, corpus_root, 3, out)
    scores = [s["score"] for s in manifest["selected"]]
    assert len(scores) == 3 and scores == sorted(scores, reverse=True)
    assert manifest["selected"][0]["id"] == "news_remote"
    written = load_corpus(out)
    assert sorted(written.meetings) == sorted(s["id"] for s in manifest["selected"])
    assert json.loads((out / "manifest.json").read_text()) == manifest


def test_pretrain_related_keeps_the_closest(news_root, corpus_root, tmp_path):
    manifest = prepare_pretrain_corpus(news_root, corpus_root, 1, tmp_path / "pre")
    assert [s["id"] for s in manifest["selected"]] == ["news_remote"]


def test_pretrain_random_mode_is_seeded(news_root, corpus_root, tmp_path):
    a = prepare_pretrain_corpus(news_root, corpus_root, 2, tmp_path / "a", mode="random", seed=5)
    b = prepare_pretrain_corpus(news_root, corpus_root, 2, tmp_path / "b", mode="random", seed=5)
    assert a == b and len(a["selected"]) == 2


def test_pretrain_k_too_large_warns(news_root, corpus_root, tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        manifest = prepare_pretrain_corpus(news_root, corpus_root, 10, tmp_path / "pre")
    assert len(manifest["selected"]) == 3
    assert "only 3" in caplog.text


def test_pretrain_bad_story_names_file(news_root, corpus_root, tmp_path):
    news = tmp_path / "news"
    news.mkdir()
    (news / "broken.story").write_text("no highlights here")
    with pytest.raises(Exception, match="broken.story"):
        prepare_pretrain_corpus(news, corpus_root, 1, tmp_path / "pre")
