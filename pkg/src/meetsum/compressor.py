"""Utterance-level compression into a short meeting script.

Every utterance is its own sentence cluster.  Three word-graph methods pick
a path through the utterance's word graph; the longest-sentence method is
the non-graph baseline and also the fallback whenever no path satisfies the
validity constraints.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

from .text import count_tokens, split_sentences, tag_sentence, tokenize
from .wordgraph import DEFAULT_K, build_word_graph, k_lightest_paths


class CompressionMethod(str, enum.Enum):
    FILIPPOVA = "filippova"
    KEYPHRASE = "keyphrase"
    DEGENERACY = "degeneracy"
    LONGEST = "longest"

    def __str__(self):
        return self.value


GRAPH_METHODS = (CompressionMethod.FILIPPOVA, CompressionMethod.KEYPHRASE, CompressionMethod.DEGENERACY)

COMPRESSED = "compressed"
FALLBACK = "fallback-longest"
EMPTY = "empty"


@dataclass(frozen=True)
class Constraints:
    min_content_length: int = 8
    require_verb: bool = True
    k: int = DEFAULT_K


RELAXED = Constraints(min_content_length=1, require_verb=False)


@dataclass(frozen=True)
class CompressionResult:
    utterance_index: int
    method: CompressionMethod
    text: str
    status: str

    def as_dict(self):
        return {"method": self.method.value, "status": self.status, "text": self.text}


@dataclass(frozen=True)
class Keyphrase:
    words: tuple
    score: float

    @property
    def text(self):
        return " ".join(self.words)


@dataclass(frozen=True)
class ShortScript:
    instance_id: str
    methods: tuple
    turns: tuple  # (speaker, text) pairs
    provenance: tuple  # per kept turn, the CompressionResult of every method


def parse_methods(spec):
    """``"combined"`` or a comma list of method names -> ordered tuple."""
    if isinstance(spec, str):
        names = [s.strip() for s in spec.split(",") if s.strip()]
    else:
        names = list(spec)
    methods = []
    for name in names:
        if name == "combined":
            methods.extend(GRAPH_METHODS)
        elif name in ("", "none"):
            continue
        else:
            methods.append(CompressionMethod(name))
    return tuple(dict.fromkeys(methods))


def longest_sentence(turn):
    """The utterance's sentence with the most tokens; earliest wins ties."""
    best, best_len = "", 0
    for sentence in split_sentences(turn.content):
        n = count_tokens(sentence)
        if n > best_len:
            best, best_len = sentence, n
    status = COMPRESSED if best_len else EMPTY
    return CompressionResult(turn.index, CompressionMethod.LONGEST, best, status)


def tagged_sentences(text, utterance_index=0):
    out = []
    for i, sentence in enumerate(split_sentences(text)):
        if tokenize(sentence):
            out.append(tag_sentence(sentence, (utterance_index, i)))
    return out


def rank_keyphrases(sentences, damping=0.85, tolerance=1e-6, max_iterations=100, window=2):
    """Keyphrases from a word co-occurrence network, best first.

    Vertices are non-stopword nouns and adjectives; two vertices are linked
    when they occur within ``window`` tokens of each other.  Vertex scores
    come from weighted power iteration; runs of adjacent top-third words
    become phrases scored by the sum of their members.
    """
    def candidate(tok):
        return not tok.is_stopword and tok.pos in ("NOUN", "ADJ")

    weights = {}
    vertices = set()
    for sentence in sentences:
        toks = sentence.tokens
        for i, tok in enumerate(toks):
            if not candidate(tok):
                continue
            vertices.add(tok.lower)
            for j in range(i + 1, min(i + window, len(toks))):
                other = toks[j]
                if candidate(other) and other.lower != tok.lower:
                    edge = tuple(sorted((tok.lower, other.lower)))
                    weights[edge] = weights.get(edge, 0) + 1
    if not vertices:
        return []

    order = sorted(vertices)
    nbrs = {v: {} for v in order}
    for (a, b), w in weights.items():
        nbrs[a][b] = w
        nbrs[b][a] = w
    out_weight = {v: sum(nbrs[v].values()) for v in order}

    scores = {v: 1.0 for v in order}
    for _ in range(max_iterations):
        new = {}
        for v in order:
            total = 0.0
            for u in sorted(nbrs[v]):
                total += nbrs[v][u] / out_weight[u] * scores[u]
            new[v] = (1.0 - damping) + damping * total
        delta = max(abs(new[v] - scores[v]) for v in order)
        scores = new
        if delta < tolerance:
            break

    ranked = sorted(order, key=lambda v: (-scores[v], v))
    top = set(ranked[: max(1, math.ceil(len(ranked) / 3))])

    phrases = {}
    for sentence in sentences:
        run = []
        for tok in list(sentence.tokens) + [None]:
            if tok is not None and candidate(tok) and tok.lower in top:
                run.append(tok.lower)
                continue
            if run:
                words = tuple(run)
                phrases[words] = sum(scores[w] for w in words)
                run = []
    return sorted((Keyphrase(w, s) for w, s in phrases.items()), key=lambda k: (-k.score, k.text))


def score_keyphrase(path, keyphrases):
    """Path weight discounted by the keyphrases it covers; lower is better."""
    present = set(path.lowers)
    covered = sum(kp.score for kp in keyphrases if all(w in present for w in kp.words))
    return path.raw_weight / (path.length * (1.0 + covered))


def core_numbers(adjacency):
    """k-core number of every vertex of an undirected graph (repeated min-degree peeling)."""
    degree = {v: len(n) for v, n in adjacency.items()}
    heap = [(d, v_i, v) for v_i, (v, d) in enumerate(sorted(degree.items(), key=lambda kv: str(kv[0])))]
    index = {entry[2]: entry[1] for entry in heap}
    heapq.heapify(heap)
    removed = set()
    core = {}
    k = 0
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in removed or d != degree[v]:
            continue
        k = max(k, d)
        core[v] = k
        removed.add(v)
        for u in adjacency[v]:
            if u not in removed:
                degree[u] -= 1
                heapq.heappush(heap, (degree[u], index[u], u))
    return core


def core_rank(graph):
    nbrs = graph.undirected_neighbors()
    core = core_numbers(nbrs)
    return {v: sum(core[u] for u in nbrs[v]) for v in nbrs}


def score_degeneracy(path, graph, ranks=None):
    """Path weight discounted by the mean CoreRank of its words; lower is better."""
    if ranks is None:
        ranks = core_rank(graph)
    interior = path.nodes[1:-1]
    mean_rank = sum(ranks[v] for v in interior) / len(interior)
    return path.raw_weight / (path.length * (1.0 + mean_rank))


@dataclass(frozen=True)
class _Analysis:
    sentences: tuple
    graph: object
    candidates: tuple


@lru_cache(maxsize=8192)
def _analyse(text, constraints):
    sentences = tuple(tagged_sentences(text))
    if not sentences:
        return _Analysis((), None, ())
    graph = build_word_graph(sentences)
    candidates = k_lightest_paths(
        graph, constraints.k,
        min_content=constraints.min_content_length,
        require_verb=constraints.require_verb,
    )
    return _Analysis(sentences, graph, tuple(candidates))


def compress_utterance(turn, method, constraints=Constraints()):
    """Compress one utterance with ``method``, falling back to its longest sentence."""
    method = CompressionMethod(method)
    if method is CompressionMethod.LONGEST:
        return longest_sentence(turn)
    analysis = _analyse(turn.content, constraints)
    if not analysis.sentences:
        return CompressionResult(turn.index, method, "", EMPTY)
    if not analysis.candidates:
        return CompressionResult(turn.index, method, longest_sentence(turn).text, FALLBACK)

    if method is CompressionMethod.FILIPPOVA:
        best = analysis.candidates[0]
    elif method is CompressionMethod.KEYPHRASE:
        keyphrases = rank_keyphrases(analysis.sentences)
        best = min(analysis.candidates, key=lambda p: (score_keyphrase(p, keyphrases), p.text))
    else:
        ranks = core_rank(analysis.graph)
        best = min(analysis.candidates, key=lambda p: (score_degeneracy(p, analysis.graph, ranks), p.text))
    return CompressionResult(turn.index, method, best.text, COMPRESSED)


def build_short_script(selection, methods, constraints=Constraints()):
    """Compress every turn with every method and join the distinct outputs per turn.

    A prepended questioner turn is carried through untouched.
    """
    methods = tuple(CompressionMethod(m) for m in methods)
    if not methods:
        raise ValueError("at least one compression method is required")
    turns, provenance = [], []
    for position, turn in enumerate(selection.turns):
        if selection.query_prepended and position == 0:
            turns.append((turn.speaker, turn.content))
            provenance.append(())
            continue
        results = tuple(compress_utterance(turn, m, constraints) for m in methods)
        texts = list(dict.fromkeys(r.text for r in results if r.text))
        if not texts:
            continue
        turns.append((turn.speaker, " ".join(texts)))
        provenance.append(results)
    return ShortScript(selection.instance_id, methods, tuple(turns), tuple(provenance))
