"""
Window-n subshifts of finite type built from α/β prefixes.

For u = bound word of length n and ū its reflection, a sequence belongs to

    strict_U   iff every n-window d satisfies  ū <  d <  u
    closed_V   iff every n-window d satisfies  ū <= d <= u      (u = α-prefix)
    closed_W   iff every n-window d satisfies  ū <= d <= u      (u = β-prefix)

Two graph realizations: the naive one on (n-1)-words and a compact
failure-link automaton over the prefixes of u and ū. Both are
right-resolving and label biinfinite walks by the sequence itself.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from functools import cached_property, lru_cache
from typing import Iterator, Literal, Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator

from arith.errors import CapExceeded, ConsistencyAlarm, NotFound
from arith.exactnum import AlgebraicNumber, compare
from config.settings import get_settings
from symbolic.expansion import check_base, greedy_sequence, quasi_greedy_expansion
from symbolic.models import Alphabet, Word

logger = logging.getLogger(__name__)

Mode = Literal["strict_U", "closed_V", "closed_W"]
Digits = tuple[int, ...]


@lru_cache(maxsize=1024)
def _reflected(word: Digits, M: int) -> Digits:
    return tuple(M - d for d in word)


# ============================================================================
# FORBIDDEN-WORD SPECS
# ============================================================================


class ForbiddenSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int
    mode: Mode
    bound_word: Word
    alphabet: Alphabet

    @model_validator(mode="after")
    def validate_window(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if len(self.bound_word) != self.window:
            raise ValueError(f"bound word has length {len(self.bound_word)}, window is {self.window}")
        if self.bound_word.alphabet != self.alphabet:
            raise ValueError("bound word and spec use different alphabets")
        return self

    @property
    def strict(self) -> bool:
        return self.mode == "strict_U"

    @property
    def upper(self) -> Digits:
        return self.bound_word.digits

    @property
    def lower(self) -> Digits:
        return _reflected(self.upper, self.alphabet.M)

    def allows(self, window: Digits) -> bool:
        """Window predicate on a word of exactly `window` digits."""
        if self.strict:
            return self.lower < window < self.upper
        return self.lower <= window <= self.upper

    def admits(self, word: Digits) -> bool:
        """Every n-window of `word` is allowed (vacuous for shorter words)."""
        n = self.window
        return all(self.allows(word[i : i + n]) for i in range(len(word) - n + 1))

    def __str__(self):
        return f"{self.mode}(n={self.window}, bound={self.bound_word})"


def build_spec(q: AlgebraicNumber, alphabet: Alphabet, n: int, mode: Mode) -> ForbiddenSpec:
    """Window-n spec with bound α₁..α_n (strict_U, closed_V) or β₁..β_n (closed_W)."""
    if n < 1:
        raise ValueError("window must be >= 1")
    check_base(q, alphabet)
    source = greedy_sequence(q, alphabet) if mode == "closed_W" else quasi_greedy_expansion(q, alphabet)
    bound = Word(digits=source.prefix(n), alphabet=alphabet)
    return ForbiddenSpec(window=n, mode=mode, bound_word=bound, alphabet=alphabet)


def spec_to_json(spec: ForbiddenSpec) -> dict:
    return {
        "window": spec.window,
        "mode": spec.mode,
        "M": spec.alphabet.M,
        "bound_word": list(spec.upper),
    }


# ============================================================================
# EDGE GRAPHS
# ============================================================================


class EdgeGraph:
    """
    Labeled directed multigraph. Vertex i carries the word `labels[i]`;
    edges are (src, dst, digit) triples.
    """

    def __init__(self, labels: list[Digits], edges: list[tuple[int, int, int]], alphabet: Alphabet, kind: str):
        self.labels = labels
        self.edges = edges
        self.alphabet = alphabet
        self.kind = kind

    @property
    def vertex_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def out_edges(self) -> list[dict[int, list[int]]]:
        table: list[dict[int, list[int]]] = [{} for _ in self.labels]
        for src, dst, label in self.edges:
            table[src].setdefault(label, []).append(dst)
        return table

    @property
    def is_deterministic(self) -> bool:
        return all(len(targets) == 1 for row in self.out_edges for targets in row.values())

    @cached_property
    def structure(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from((src, dst) for src, dst, _ in self.edges)
        return g

    @cached_property
    def components(self) -> list[frozenset[int]]:
        """Strongly connected components in a deterministic order (by smallest member)."""
        sccs = [frozenset(c) for c in nx.strongly_connected_components(self.structure)]
        return sorted(sccs, key=min)

    @cached_property
    def component_of(self) -> dict[int, int]:
        return {v: i for i, comp in enumerate(self.components) for v in comp}

    def _is_nontrivial(self, comp: frozenset[int]) -> bool:
        if len(comp) > 1:
            return True
        (v,) = comp
        return self.structure.has_edge(v, v)

    @cached_property
    def nontrivial_components(self) -> list[frozenset[int]]:
        """Components that carry a cycle."""
        return [c for c in self.components if self._is_nontrivial(c)]

    @cached_property
    def walk_supporting(self) -> frozenset[int]:
        """Vertices on some biinfinite walk: between (or inside) cycle-carrying components."""
        if not self.nontrivial_components:
            return frozenset()
        condensed = nx.condensation(self.structure, scc=self.components)
        cyclic = {condensed.graph["mapping"][min(c)] for c in self.nontrivial_components}
        forward, backward = set(cyclic), set(cyclic)
        for node in cyclic:
            forward |= nx.descendants(condensed, node)
            backward |= nx.ancestors(condensed, node)
        keep = forward & backward
        return frozenset(v for node in keep for v in condensed.nodes[node]["members"])

    @property
    def has_biinfinite_walk(self) -> bool:
        return bool(self.nontrivial_components)

    def trimmed(self) -> EdgeGraph:
        """Restriction to walk-supporting vertices, reindexed in original order."""
        keep = sorted(self.walk_supporting)
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[s], index[d], a) for s, d, a in self.edges if s in index and d in index]
        return EdgeGraph([self.labels[v] for v in keep], edges, self.alphabet, self.kind)

    def __str__(self):
        return f"EdgeGraph({self.kind}, {self.vertex_count} vertices, {self.edge_count} edges)"


def _render_label(word: Digits) -> str:
    return "".join(str(d) for d in word) if word else "ε"


def to_dot(g: EdgeGraph) -> str:
    lines = [f"digraph {g.kind} {{"]
    for i, label in enumerate(g.labels):
        lines.append(f'  {i} [label="{_render_label(label)}"];')
    for src, dst, digit in g.edges:
        lines.append(f'  {src} -> {dst} [label="{digit}"];')
    lines.append("}")
    return "\n".join(lines)


# ============================================================================
# BUILDERS
# ============================================================================


def _allowed_windows(spec: ForbiddenSpec) -> Iterator[Digits]:
    for word in itertools.product(spec.alphabet.digits, repeat=spec.window):
        if spec.allows(word):
            yield word


def build_graph_naive(spec: ForbiddenSpec, cap: Optional[int] = None) -> EdgeGraph:
    """
    Vertices: (n-1)-words occurring in allowed n-words. Edge w[:-1] -> w[1:]
    labeled w[-1] for each allowed n-word w.
    """
    cap = cap or get_settings().naive_vertex_cap
    required = spec.alphabet.size ** (spec.window - 1)
    if required > cap:
        raise CapExceeded(required, cap, "naive graph")
    index: dict[Digits, int] = {}
    edges: list[tuple[int, int, int]] = []
    for word in _allowed_windows(spec):
        head, tail = word[:-1], word[1:]
        src = index.setdefault(head, len(index))
        dst = index.setdefault(tail, len(index))
        edges.append((src, dst, word[-1]))
    labels = sorted(index, key=index.get)
    logger.debug(f"naive graph for {spec}: {len(labels)} vertices, {len(edges)} edges")
    return EdgeGraph(labels, edges, spec.alphabet, "naive")


def build_graph_automaton(spec: ForbiddenSpec) -> EdgeGraph:
    """
    Failure-link automaton over prefixes (length < n) of u and ū. A state is
    the longest suffix of the digits read that is such a prefix; reading a is
    a violation when some prefix on the state's failure chain is followed by
    a digit that leaves [ū, u] (or completes u or ū in strict mode).
    """
    n, upper, lower = spec.window, spec.upper, spec.lower
    M = spec.alphabet.M

    nodes: dict[Digits, int] = {(): 0}
    for word in (upper, lower):
        for j in range(1, n):
            nodes.setdefault(word[:j], len(nodes))
    labels = sorted(nodes, key=nodes.get)

    def own_forbidden(state: Digits) -> set[int]:
        j = len(state)
        bad: set[int] = set()
        if upper[:j] == state:
            bad.update(range(upper[j] + 1, M + 1))
            if spec.strict and j == n - 1:
                bad.add(upper[j])
        if lower[:j] == state:
            bad.update(range(0, lower[j]))
            if spec.strict and j == n - 1:
                bad.add(lower[j])
        return bad

    failure = [0] * len(labels)
    delta: list[list[int]] = [[0] * (M + 1) for _ in labels]
    forbidden: list[set[int]] = [set() for _ in labels]

    forbidden[0] = own_forbidden(())
    for a in spec.alphabet.digits:
        delta[0][a] = nodes.get((a,), 0)
    queue = deque(nodes[(a,)] for a in spec.alphabet.digits if (a,) in nodes)
    for child in queue:
        failure[child] = 0

    while queue:
        state = queue.popleft()
        word = labels[state]
        forbidden[state] = own_forbidden(word) | forbidden[failure[state]]
        for a in spec.alphabet.digits:
            child = nodes.get(word + (a,))
            if child is not None:
                failure[child] = delta[failure[state]][a]
                delta[state][a] = child
                queue.append(child)
            else:
                delta[state][a] = delta[failure[state]][a]

    edges = [
        (state, delta[state][a], a)
        for state in range(len(labels))
        for a in spec.alphabet.digits
        if a not in forbidden[state]
    ]
    logger.debug(f"automaton for {spec}: {len(labels)} states, {len(edges)} edges")
    return EdgeGraph(labels, edges, spec.alphabet, "automaton")


# ============================================================================
# COUNTING
# ============================================================================


class BlockCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: int
    count: int

    @model_validator(mode="after")
    def validate_count(self):
        if self.length < 1:
            raise ValueError("block length must be >= 1")
        if self.count < 0:
            raise ValueError("block count must be nonnegative")
        return self

    def __str__(self):
        return f"|B_{self.length}| = {self.count}"


def _word_sets(g: EdgeGraph, k: int) -> dict[frozenset[int], int]:
    """Subset construction: vertex set reached by each distinct label word, with multiplicities."""
    if not g.vertex_count:
        return {}
    layer: dict[frozenset[int], int] = {frozenset(range(g.vertex_count)): 1}
    for _ in range(k):
        following: dict[frozenset[int], int] = {}
        for vertices, count in layer.items():
            by_label: dict[int, set[int]] = {}
            for v in vertices:
                for label, targets in g.out_edges[v].items():
                    by_label.setdefault(label, set()).update(targets)
            for targets in by_label.values():
                key = frozenset(targets)
                following[key] = following.get(key, 0) + count
        layer = following
    return layer


def count_blocks(g: EdgeGraph, k: int) -> BlockCount:
    """Distinct length-k label words of biinfinite walks in g."""
    if k < 1:
        raise ValueError("block length must be >= 1")
    core = g.trimmed()
    return BlockCount(length=k, count=sum(_word_sets(core, k).values()))


def language_words(g: EdgeGraph, k: int, cap: Optional[int] = None) -> set[Digits]:
    """The length-k blocks themselves (bounded by the enumeration cap)."""
    cap = cap or get_settings().enumeration_cap
    core = g.trimmed()
    words: set[Digits] = set()
    stack: list[tuple[Digits, frozenset[int]]] = [((), frozenset(range(core.vertex_count)))]
    while stack:
        word, vertices = stack.pop()
        if len(word) == k:
            words.add(word)
            if len(words) > cap:
                raise CapExceeded(len(words), cap, "language enumeration")
            continue
        by_label: dict[int, set[int]] = {}
        for v in vertices:
            for label, targets in core.out_edges[v].items():
                by_label.setdefault(label, set()).update(targets)
        for label, targets in by_label.items():
            stack.append((word + (label,), frozenset(targets)))
    return words


def _extendable(states: set[Digits], step) -> set[Digits]:
    """Greatest subset in which every state has a neighbour inside the subset."""
    alive = set(states)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for t in step(s)):
                alive.discard(s)
                changed = True
    return alive


def brute_force_blocks(spec: ForbiddenSpec, k: int, cap: Optional[int] = None) -> BlockCount:
    """
    Oracle for count_blocks without graphs: enumerate all (M+1)^k words and
    keep those with a left context that extends forever to the left and a
    right end that extends forever to the right, every window allowed.
    """
    cap = cap or get_settings().enumeration_cap
    size = spec.alphabet.size
    if size**k > cap:
        raise CapExceeded(size**k, cap, "brute-force blocks")
    digits = spec.alphabet.digits
    n = spec.window
    allowed = set(_allowed_windows(spec))
    contexts = set(itertools.product(digits, repeat=n - 1))

    def forward(s: Digits) -> Iterator[Digits]:
        return ((s + (a,))[1:] for a in digits if s + (a,) in allowed)

    def backward(s: Digits) -> Iterator[Digits]:
        return (((a,) + s)[:-1] for a in digits if (a,) + s in allowed)

    right = _extendable(contexts, forward)
    left = _extendable(contexts, backward)

    count = 0
    for word in itertools.product(digits, repeat=k):
        current = left
        for a in word:
            current = {(s + (a,))[1:] for s in current if s + (a,) in allowed}
            if not current:
                break
        if current & right:
            count += 1
    return BlockCount(length=k, count=count)


def sft_includes(a: ForbiddenSpec, b: ForbiddenSpec) -> bool:
    """language(a) ⊆ language(b): every b-window occurring in a is allowed by b."""
    if a.alphabet != b.alphabet:
        raise ValueError("specs over different alphabets")
    width = max(a.window, b.window)
    words = language_words(build_graph_automaton(a), width)
    return all(b.admits(w) for w in words)


# ============================================================================
# DEPTHS AND PREFIX SETS
# ============================================================================


def find_separating_depth(q: AlgebraicNumber, p: AlgebraicNumber, alphabet: Alphabet, cap: int) -> int:
    """Smallest n with α₁(p)..α_n(p) > β₁(q)..β_n(q); requires q < p."""
    if compare(q, p) >= 0:
        raise ValueError(f"separating depth needs q < p, got q={q}, p={p}")
    beta = greedy_sequence(q, alphabet)
    alpha = quasi_greedy_expansion(p, alphabet)
    for n in range(1, cap + 1):
        a, b = alpha.digit(n), beta.digit(n)
        if a == b:
            continue
        if a < b:
            raise ConsistencyAlarm(f"α({p}) < β({q}) at digit {n} although q < p")
        return n
    raise NotFound(cap)


def univoque_prefix_estimate(q: AlgebraicNumber, alphabet: Alphabet, n: int, lookahead: int = 0) -> int:
    """
    Upper estimate of the number of length-n prefixes of unique expansions
    in base q: words whose shifts satisfy the truncated uniqueness
    inequalities against α(q), kept when they extend `lookahead` digits further.
    """
    check_base(q, alphabet)
    M = alphabet.M
    total = n + lookahead
    alpha = quasi_greedy_expansion(q, alphabet).prefix(total)

    def consistent(word: list[int]) -> bool:
        # only constraints touching the last digit are new
        m = len(word)
        for k in range(1, m):
            head = word[:k]
            tail = tuple(word[k:])
            if any(d != M for d in head) and tail > alpha[: m - k]:
                return False
            if any(d != 0 for d in head) and tuple(M - d for d in tail) > alpha[: m - k]:
                return False
        return True

    prefixes: set[Digits] = set()
    stack: list[list[int]] = [[]]
    while stack:
        word = stack.pop()
        if len(word) == total:
            prefixes.add(tuple(word[:n]))
            continue
        for a in alphabet.digits:
            candidate = word + [a]
            if consistent(candidate):
                stack.append(candidate)
    return len(prefixes)


def hat_u_prefixes(M: int, N: int, n: int) -> Iterator[Digits]:
    """
    Length-nN prefixes of the explicit subset used for the σ(N) bound:
    M^{2N-1}0 followed by n-2 blocks of length N other than 0^N and M^N.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    head = (M,) * (2 * N - 1) + (0,)
    excluded = {(0,) * N, (M,) * N}
    blocks = [b for b in itertools.product(range(M + 1), repeat=N) if b not in excluded]
    for middle in itertools.product(blocks, repeat=n - 2):
        yield head + tuple(itertools.chain.from_iterable(middle))
