"""ROUGE-1, ROUGE-2 and summary-level ROUGE-L with corpus averaging."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .errors import UsageError

_WORD_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class PRF:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0

    @classmethod
    def from_counts(cls, matches, n_candidate, n_reference):
        precision = matches / n_candidate if n_candidate else 0.0
        recall = matches / n_reference if n_reference else 0.0
        return cls(precision, recall, f_measure(precision, recall))

    def as_dict(self):
        return {"p": self.precision, "r": self.recall, "f": self.f1}


@dataclass(frozen=True)
class RougeReport:
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF

    def as_dict(self):
        return {"rouge-1": self.rouge1.as_dict(), "rouge-2": self.rouge2.as_dict(), "rouge-l": self.rougeL.as_dict()}

    @classmethod
    def from_dict(cls, d):
        def prf(x):
            return PRF(x["p"], x["r"], x["f"])

        return cls(prf(d["rouge-1"]), prf(d["rouge-2"]), prf(d["rouge-l"]))


def f_measure(precision, recall):
    if precision + recall <= 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def tokenize_for_rouge(text, stem=False, stopwords=None):
    """Case-fold and split on non-alphanumeric runs.

    ``stem`` applies the Porter stemmer (needs nltk); ``stopwords`` is a
    collection of words to drop.  Both are off by default.
    """
    tokens = _WORD_RE.findall(text.casefold())
    if stopwords:
        tokens = [t for t in tokens if t not in stopwords]
    if stem:
        try:
            from nltk.stem.porter import PorterStemmer
        except ImportError as exc:
            raise UsageError("stemming needs nltk: pip install 'artifact[stem]'") from exc
        stemmer = PorterStemmer()
        tokens = [stemmer.stem(t) for t in tokens]
    return tokens


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate, reference, n=1):
    if n not in (1, 2):
        raise UsageError(f"ROUGE-N is defined here for n=1 or n=2, not {n}")
    cand, ref = _ngrams(candidate, n), _ngrams(reference, n)
    matches = sum(min(count, ref[g]) for g, count in cand.items() if g in ref)
    return PRF.from_counts(matches, sum(cand.values()), sum(ref.values()))


def lcs_length(a, b):
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference):
    return PRF.from_counts(lcs_length(candidate, reference), len(candidate), len(reference))


def score(candidate_text, reference_text, stem=False, stopwords=None):
    cand = tokenize_for_rouge(candidate_text, stem, stopwords)
    ref = tokenize_for_rouge(reference_text, stem, stopwords)
    return RougeReport(rouge_n(cand, ref, 1), rouge_n(cand, ref, 2), rouge_l(cand, ref))


def _mean_prf(items):
    n = len(items)
    return PRF(
        math.fsum(x.precision for x in items) / n,
        math.fsum(x.recall for x in items) / n,
        math.fsum(x.f1 for x in items) / n,
    )


def aggregate(reports):
    """Component-wise mean over instances (exactly rounded, so order-free)."""
    reports = list(reports)
    if not reports:
        raise UsageError("cannot aggregate an empty set of ROUGE reports")
    return RougeReport(
        _mean_prf([r.rouge1 for r in reports]),
        _mean_prf([r.rouge2 for r in reports]),
        _mean_prf([r.rougeL for r in reports]),
    )
