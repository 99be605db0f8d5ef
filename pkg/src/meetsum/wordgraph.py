"""Word graphs over sentence clusters and K-lightest simple path search.

Each sentence becomes a walk START -> tokens -> END.  Tokens sharing a
(lower, pos) key are merged onto one node when that node does not already
hold a token of the same sentence; stopwords and punctuation additionally
need a matching neighbour word.  Edge weights follow the usual
multi-sentence-compression formulation: frequent, tightly co-occurring
word pairs get cheap edges.
"""
from __future__ import annotations

import heapq
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .text import detokenize

log = logging.getLogger(__name__)

START = "<START>"
END = "<END>"
_BOUNDARY_PREV = "<s>"
_BOUNDARY_NEXT = "</s>"

DEFAULT_K = 100
DEFAULT_MAX_EXPANSIONS = 50_000


@dataclass
class NodeInfo:
    key: object
    pos: str = ""
    content: bool = False
    freq: int = 0
    # (sentence index, position, surface, prev lower, next lower)
    tokens: list = field(default_factory=list)

    @property
    def sentences(self):
        return {t[0] for t in self.tokens}

    def surface(self):
        counts = Counter(t[2] for t in self.tokens)
        best = max(counts.values())
        for t in self.tokens:
            if counts[t[2]] == best:
                return t[2]
        return ""


@dataclass
class Edge:
    count: int = 0
    weight: float = 0.0
    # exact value of weight; used for ranking so that equal path weights tie exactly
    exact: Fraction = Fraction(0)


@dataclass
class WordGraph:
    nodes: dict
    edges: dict
    walks: list
    order: dict
    succ: dict

    @property
    def n_sentences(self):
        return len(self.walks)

    def freq(self, key):
        return self.nodes[key].freq

    def interior(self):
        return [k for k in self.nodes if k not in (START, END)]

    def undirected_neighbors(self):
        """Adjacency of the undirected, unweighted view without START/END."""
        nbrs = {k: set() for k in self.interior()}
        for a, b in self.edges:
            if a in nbrs and b in nbrs and a != b:
                nbrs[a].add(b)
                nbrs[b].add(a)
        return nbrs


@dataclass(frozen=True)
class PathCandidate:
    nodes: tuple
    weight: float
    raw_weight: float
    exact_weight: Fraction
    realization: tuple
    lowers: tuple
    content_length: int
    has_verb: bool

    @property
    def length(self):
        return len(self.nodes) - 2

    @property
    def text(self):
        return detokenize(self.realization)


def _overlap(prev, nxt, info):
    return sum((t[3] == prev) + (t[4] == nxt) for t in info.tokens)


def build_word_graph(sentences):
    """Merge tagged sentences into one word graph (see module docstring)."""
    if not sentences:
        raise ValueError("need at least one sentence")
    nodes = {START: NodeInfo(START, pos="", freq=0), END: NodeInfo(END, pos="", freq=0)}
    order = {START: 0, END: 1}
    by_base = defaultdict(list)
    walks = []
    positions = defaultdict(dict)  # node -> {sentence index: position}

    for si, sentence in enumerate(sentences):
        toks = sentence.tokens
        walk = [START]
        nodes[START].freq += 1
        nodes[END].freq += 1
        positions[START][si] = 0
        for p, tok in enumerate(toks):
            prev = toks[p - 1].lower if p > 0 else _BOUNDARY_PREV
            nxt = toks[p + 1].lower if p + 1 < len(toks) else _BOUNDARY_NEXT
            base = (tok.lower, tok.pos)
            free = [k for k in by_base[base] if si not in nodes[k].sentences]
            chosen = None
            if tok.is_content:
                if len(free) == 1:
                    chosen = free[0]
                elif free:
                    chosen = max(free, key=lambda k: (_overlap(prev, nxt, nodes[k]), nodes[k].freq, -k[2]))
            else:
                scored = [k for k in free if _overlap(prev, nxt, nodes[k]) > 0]
                if scored:
                    chosen = max(scored, key=lambda k: (_overlap(prev, nxt, nodes[k]), nodes[k].freq, -k[2]))
            if chosen is None:
                chosen = (tok.lower, tok.pos, len(by_base[base]))
                by_base[base].append(chosen)
                nodes[chosen] = NodeInfo(chosen, pos=tok.pos, content=tok.is_content)
                order[chosen] = len(order)
            info = nodes[chosen]
            info.freq += 1
            info.tokens.append((si, p + 1, tok.surface, prev, nxt))
            positions[chosen][si] = p + 1
            walk.append(chosen)
        walk.append(END)
        positions[END][si] = len(toks) + 1
        walks.append(tuple(walk))

    edges = {}
    for walk in walks:
        for a, b in zip(walk, walk[1:]):
            edges.setdefault((a, b), Edge()).count += 1

    for (a, b), edge in edges.items():
        inverse_offsets = Fraction(0)
        for si, pa in positions[a].items():
            pb = positions[b].get(si)
            if pb is not None and pa < pb:
                inverse_offsets += Fraction(1, pb - pa)
        fa, fb = nodes[a].freq, nodes[b].freq
        edge.exact = (fa + fb) / inverse_offsets / (fa * fb)
        edge.weight = float(edge.exact)

    succ = defaultdict(list)
    for a, b in edges:
        succ[a].append(b)
    for a in succ:
        succ[a].sort(key=order.__getitem__)
    return WordGraph(nodes=nodes, edges=edges, walks=walks, order=order, succ=dict(succ))


def make_candidate(graph, path, raw=None):
    """Build a :class:`PathCandidate` for ``path`` (START ... END)."""
    if raw is None:
        raw = 0.0
        for a, b in zip(path, path[1:]):
            raw += graph.edges[(a, b)].weight
    exact = sum((graph.edges[(a, b)].exact for a, b in zip(path, path[1:])), Fraction(0))
    interior = [graph.nodes[k] for k in path[1:-1]]
    return PathCandidate(
        nodes=tuple(path),
        weight=raw / len(interior),
        raw_weight=raw,
        exact_weight=exact / len(interior),
        realization=tuple(n.surface() for n in interior),
        lowers=tuple(n.key[0] for n in interior),
        content_length=sum(1 for n in interior if n.content),
        has_verb=any(n.pos == "VERB" for n in interior),
    )


def _lower_hull(points):
    """Lower convex hull of (m, cost) points sorted by m."""
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _completion_table(graph, n_interior):
    """Per node, cheapest raw costs to END through exactly m more interior nodes.

    Walks may repeat nodes, so every entry lower-bounds the simple-path cost.
    Only the lower convex hull of the (m, cost) points is kept: the minimum
    of (raw + cost) / (length + m) over all points is attained on it.
    """
    inf = math.inf
    row = {v: inf for v in graph.nodes}
    for v in graph.nodes:
        edge = graph.edges.get((v, END))
        if edge is not None and v != START:
            row[v] = edge.weight
    points = {v: [] for v in graph.nodes}
    for v, c in row.items():
        if c < inf:
            points[v].append((0, c))
    for m in range(1, n_interior + 1):
        new = {}
        for v in graph.nodes:
            if v == END:
                continue
            best = inf
            for u in graph.succ.get(v, ()):
                if u == END:
                    continue
                c = graph.edges[(v, u)].weight + row[u]
                if c < best:
                    best = c
            if best < inf:
                new[v] = best
                points[v].append((m, best))
        if not new:
            break
        row = {v: new.get(v, inf) for v in graph.nodes}
    return {v: _lower_hull(pts) for v, pts in points.items()}


def _reachable(graph):
    reach = {}
    for v in graph.nodes:
        seen = set()
        stack = list(graph.succ.get(v, ()))
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(graph.succ.get(u, ()))
        seen.discard(v)
        reach[v] = seen
    return reach


def _ranking_key(graph, cand):
    return (cand.exact_weight, cand.text, tuple(graph.order[x] for x in cand.nodes))


def _raw_weight_paths(graph, limit):
    """Simple paths in increasing raw weight (Yen's algorithm)."""
    import networkx as nx

    g = nx.DiGraph()
    for v in sorted(graph.nodes, key=graph.order.__getitem__):
        g.add_node(v)
    for (a, b), edge in sorted(graph.edges.items(), key=lambda kv: (graph.order[kv[0][0]], graph.order[kv[0][1]])):
        g.add_edge(a, b, weight=edge.weight)
    for i, path in enumerate(nx.shortest_simple_paths(g, START, END, weight="weight")):
        if i >= limit:
            break
        yield tuple(path)


def k_lightest_paths(graph, k=DEFAULT_K, min_content=0, require_verb=False,
                     max_expansions=DEFAULT_MAX_EXPANSIONS):
    """The ``k`` lightest simple START->END paths by length-normalized weight.

    A path's weight is the sum of its edge weights divided by its number of
    interior nodes.  Results are ordered by (weight, text).  When
    ``min_content``/``require_verb`` are given only paths meeting them are
    returned, so the result holds the ``k`` lightest *valid* paths.

    The search is exact while it stays under ``max_expansions``; past that
    the remaining slots are filled from raw-weight shortest simple paths.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n_interior = len(graph.nodes) - 2
    hull = _completion_table(graph, n_interior)
    if not hull[START]:
        raise RuntimeError("word graph has no START->END path")

    reach = _reachable(graph)
    reach_content = {v: sum(1 for u in r if graph.nodes[u].content) for v, r in reach.items()}
    reach_verb = {v: any(graph.nodes[u].pos == "VERB" for u in r) for v, r in reach.items()}
    slack = 1.0 - 1e-12

    def bound(raw, length, v):
        best = math.inf
        for m, cost in hull[v]:
            total = length + m
            if total:
                value = (raw + cost) / total
                if value < best:
                    best = value
        return best * slack

    def valid(content, verb):
        return content >= min_content and (verb or not require_verb)

    frontier = []
    ready = []
    results = []
    counter = 0

    def push(path, raw, content, verb):
        nonlocal counter
        v = path[-1]
        if content + reach_content[v] < min_content:
            return
        if require_verb and not verb and not reach_verb[v]:
            return
        lb = bound(raw, len(path) - 1, v)
        if lb < math.inf:
            counter += 1
            heapq.heappush(frontier, (lb, counter, path, raw, content, verb))

    push((START,), 0.0, 0, False)
    expansions = 0
    exhausted = False
    while len(results) < k:
        while ready and len(results) < k and (not frontier or ready[0][0] < frontier[0][0]):
            results.append(heapq.heappop(ready)[-1])
        if len(results) >= k or not frontier:
            break
        if expansions >= max_expansions:
            exhausted = True
            break
        _, _, path, raw, content, verb = heapq.heappop(frontier)
        expansions += 1
        v = path[-1]
        on_path = set(path)
        for u in graph.succ.get(v, ()):
            if u in on_path:
                continue
            step = raw + graph.edges[(v, u)].weight
            if u == END:
                if len(path) > 1 and valid(content, verb):
                    cand = make_candidate(graph, path + (END,), step)
                    heapq.heappush(ready, _ranking_key(graph, cand) + (cand,))
                continue
            info = graph.nodes[u]
            push(path + (u,), step, content + info.content, verb or info.pos == "VERB")

    if exhausted:
        log.debug("path search hit %d expansions; completing from raw-weight paths", expansions)
        pool = {c[-1].nodes: c[-1] for c in ready}
        for path in _raw_weight_paths(graph, 10 * k):
            if path in pool or any(r.nodes == path for r in results):
                continue
            cand = make_candidate(graph, path)
            if valid(cand.content_length, cand.has_verb):
                pool[path] = cand
        extra = sorted(pool.values(), key=lambda c: _ranking_key(graph, c))
        results.extend(extra[: k - len(results)])
    return results
