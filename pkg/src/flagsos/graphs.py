"""Small labeled graphs, canonical forms, and flag enumeration.

Vertices are always 1..n.  A monomial/edge "pair index" fixes the lex
order (1,2), (1,3), ..., (1,n), (2,3), ... used everywhere downstream:
characteristic vectors, polynomial variables, and canonical bitstrings
all agree on it.  Canonical forms are computed by exhaustive permutation
search (vectorised with numpy), which is fine at the <= 10 vertex scale
this package is built for.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetError, FlagSosError

CANONICAL_BUDGET = 10
ENUM_BUDGET_TRIANGLE = 8
ENUM_BUDGET_GENERAL = 7
FLAG_SIZE_BUDGET = 7


@lru_cache(maxsize=64)
def pair_list(n: int) -> tuple[tuple[int, int], ...]:
    """All vertex pairs (i, j), i < j <= n, in lex order."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=64)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pair_list(n))}


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class Graph:
    """An undirected graph on vertex set {1, ..., n}."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise FlagSosError("graph needs at least one vertex")
        for e in self.edges:
            i, j = e
            if not (1 <= i < j <= self.n):
                raise FlagSosError(f"edge {e} out of range for n={self.n}")

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        norm = frozenset((min(i, j), max(i, j)) for i, j in edges)
        for i, j in norm:
            if i == j:
                raise FlagSosError("self-loops are not allowed")
        return Graph(n, norm)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def edge_mask(self) -> int:
        """Edge set as a bitmask over pair_list(self.n)."""
        idx = pair_index(self.n)
        m = 0
        for e in self.edges:
            m |= 1 << idx[e]
        return m

    def bitstring(self) -> tuple[int, ...]:
        """0/1 vector over the lex-ordered pairs."""
        return tuple(1 if p in self.edges else 0 for p in pair_list(self.n))

    def relabel(self, perm: tuple[int, ...]) -> "Graph":
        """Apply the vertex permutation i -> perm[i-1]."""
        return Graph.from_edges(self.n, ((perm[i - 1], perm[j - 1]) for i, j in self.edges))

    def induced(self, vertices: tuple[int, ...]) -> "Graph":
        """Induced subgraph on the given vertices, relabeled to 1..k in order."""
        pos = {v: k + 1 for k, v in enumerate(vertices)}
        edges = [(pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos]
        return Graph.from_edges(len(vertices), edges)

    def complement(self) -> "Graph":
        return Graph(self.n, frozenset(p for p in pair_list(self.n) if p not in self.edges))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": sorted([list(e) for e in self.edges])}

    @staticmethod
    def from_json(obj) -> "Graph":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return Graph.from_edges(int(obj["n"]), [tuple(e) for e in obj["edges"]])


def empty_graph(n: int) -> Graph:
    return Graph(n, frozenset())


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(pair_list(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


K3 = complete_graph(3)


@dataclass(frozen=True)
class CharVector:
    """Characteristic 0/1 vector of a graph's edge set over the lex pairs."""

    n: int
    mask: int

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> k) & 1 for k in range(num_pairs(self.n)))

    def to_graph(self) -> Graph:
        pl = pair_list(self.n)
        return Graph(self.n, frozenset(pl[k] for k in range(len(pl)) if (self.mask >> k) & 1))


def char_vector(g: Graph, n: int) -> CharVector:
    """Characteristic vector of g; n must match the graph's vertex count."""
    if g.n != n:
        raise FlagSosError(f"dimension mismatch: graph has {g.n} vertices, expected {n}")
    return CharVector(n, g.edge_mask())


# --- canonical forms -------------------------------------------------------

_PERM_CACHE: dict[int, np.ndarray] = {}


def _perm_array(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    return _PERM_CACHE[n]


def _pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pl = pair_list(n)
    i_idx = np.array([i - 1 for i, _ in pl], dtype=np.int64)
    j_idx = np.array([j - 1 for _, j in pl], dtype=np.int64)
    # most-significant bit = first pair in lex order
    weights = 1 << np.arange(len(pl) - 1, -1, -1, dtype=np.int64)
    return i_idx, j_idx, weights


def _min_perm(adj: np.ndarray, perms: np.ndarray, n: int) -> tuple[int, np.ndarray]:
    i_idx, j_idx, weights = _pair_arrays(n)
    best_key = None
    best_perm = None
    # chunked so the n=10 case stays within memory
    for start in range(0, len(perms), 65536):
        chunk = perms[start : start + 65536]
        bits = adj[chunk[:, i_idx], chunk[:, j_idx]]
        keys = bits.astype(np.int64) @ weights
        k = int(np.argmin(keys))
        if best_key is None or keys[k] < best_key:
            best_key = int(keys[k])
            best_perm = chunk[k]
    return best_key, best_perm


def canonical_form(g: Graph) -> Graph:
    """The isomorph of g whose lex-pair edge bitstring is lexicographically smallest.

    Idempotent; two graphs are isomorphic iff their canonical forms are equal.
    Rejects graphs with more than 10 vertices (enumeration budget).
    """
    if g.n > CANONICAL_BUDGET:
        raise BudgetError(f"canonical_form supports at most {CANONICAL_BUDGET} vertices, got {g.n}")
    if g.n == 1:
        return g
    adj = np.zeros((g.n, g.n), dtype=np.int8)
    for i, j in g.edges:
        adj[i - 1, j - 1] = 1
        adj[j - 1, i - 1] = 1
    _, perm = _min_perm(adj, _perm_array(g.n), g.n)
    # perm row p: position k holds old vertex perm[k]; relabel old->new
    relab = [0] * g.n
    for new_pos, old in enumerate(perm):
        relab[int(old)] = new_pos + 1
    return g.relabel(tuple(relab))


def canonical_key(g: Graph) -> tuple[int, tuple[int, ...]]:
    """Deterministic sort key: (edge count, canonical bitstring)."""
    return (g.edge_count, canonical_form(g).bitstring())


def are_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    return canonical_form(g) == canonical_form(h)


# --- induced subgraph containment ------------------------------------------


def contains_induced(g: Graph, a: Graph) -> bool:
    """True iff some injective vertex map embeds a as an induced subgraph of g."""
    if a.n > g.n:
        return False
    gadj = [[False] * (g.n + 1) for _ in range(g.n + 1)]
    for i, j in g.edges:
        gadj[i][j] = gadj[j][i] = True
    aadj = [[False] * (a.n + 1) for _ in range(a.n + 1)]
    for i, j in a.edges:
        aadj[i][j] = aadj[j][i] = True

    order = list(range(1, a.n + 1))
    used = [False] * (g.n + 1)
    image = [0] * (a.n + 1)

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in range(1, g.n + 1):
            if used[w]:
                continue
            ok = True
            for kk in range(k):
                u = order[kk]
                if aadj[v][u] != gadj[w][image[u]]:
                    ok = False
                    break
            if ok:
                used[w] = True
                image[v] = w
                if extend(k + 1):
                    return True
                used[w] = False
        return False

    return extend(0)


# --- enumeration up to isomorphism -----------------------------------------


def enumerate_A_free(m: int, a: Graph) -> list[Graph]:
    """Canonical representatives of all A-free graphs on m vertices.

    Built by extending (m-1)-vertex representatives with one new vertex and
    every possible neighborhood, so the budget stays comfortable.  Output is
    sorted by (edge count, canonical bitstring) and is deterministic.
    """
    budget = ENUM_BUDGET_TRIANGLE if are_isomorphic(a, K3) else ENUM_BUDGET_GENERAL
    if m > budget:
        raise BudgetError(f"enumerate_A_free budget is m <= {budget} for this forbidden graph, got m={m}")
    if m < 1:
        raise FlagSosError("m must be positive")

    if m == 1:
        g = empty_graph(1)
        return [] if contains_induced(g, a) else [g]

    prev = enumerate_A_free(m - 1, a)
    seen: dict[tuple[int, tuple[int, ...]], Graph] = {}
    for base in prev:
        for nb in range(1 << (m - 1)):
            edges = set(base.edges)
            for v in range(1, m):
                if (nb >> (v - 1)) & 1:
                    edges.add((v, m))
            g = Graph(m, frozenset(edges))
            if contains_induced(g, a):
                continue
            cg = canonical_form(g)
            seen.setdefault((cg.edge_count, cg.bitstring()), cg)
    return [seen[k] for k in sorted(seen)]


# --- intersection types and flags ------------------------------------------


@dataclass(frozen=True)
class IntersectionType:
    """A fully labeled t-vertex graph: labels[k-1] is the vertex with label k."""

    graph: Graph
    labels: tuple[int, ...]

    def __post_init__(self):
        t = self.graph.n
        if sorted(self.labels) != list(range(1, t + 1)):
            raise FlagSosError("labels must be a bijection with [t]")

    @property
    def size(self) -> int:
        return self.graph.n

    def in_label_order(self) -> Graph:
        """The type graph relabeled so vertex i carries label i."""
        relab = [0] * self.graph.n
        for lab, v in enumerate(self.labels, start=1):
            relab[v - 1] = lab
        return self.graph.relabel(tuple(relab))

    def to_json(self) -> dict:
        d = self.graph.to_json()
        d["labels"] = list(self.labels)
        return d

    @staticmethod
    def from_json(obj) -> "IntersectionType":
        if isinstance(obj, str):
            obj = json.loads(obj)
        g = Graph.from_json({"n": obj["n"], "edges": obj["edges"]})
        return IntersectionType(g, tuple(obj["labels"]))


def single_vertex_type() -> IntersectionType:
    return IntersectionType(empty_graph(1), (1,))


@dataclass(frozen=True)
class Flag:
    """A graph with t labeled vertices inducing a copy of the type.

    embedding[k-1] is the vertex of `graph` carrying label k.
    """

    graph: Graph
    ftype: IntersectionType
    embedding: tuple[int, ...]

    def __post_init__(self):
        t = self.ftype.size
        if len(self.embedding) != t or len(set(self.embedding)) != t:
            raise FlagSosError("embedding must be injective on [t]")
        induced = self.graph.induced(self.embedding)
        if induced != self.ftype.in_label_order():
            raise FlagSosError("labeled vertices do not induce the type with matching labels")

    @property
    def size(self) -> int:
        return self.graph.n

    @property
    def type_size(self) -> int:
        return self.ftype.size

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "type": self.ftype.to_json(),
            "embedding": list(self.embedding),
        }

    @staticmethod
    def from_json(obj) -> "Flag":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return Flag(
            Graph.from_json(obj["graph"]),
            IntersectionType.from_json(obj["type"]),
            tuple(obj["embedding"]),
        )


def _label_fixing_perms(f: int, t: int) -> list[tuple[int, ...]]:
    """Permutations of [f] fixing 1..t pointwise."""
    out = []
    for tail in itertools.permutations(range(t + 1, f + 1)):
        out.append(tuple(range(1, t + 1)) + tail)
    return out


def flag_canonical_graph(g: Graph, t: int) -> Graph:
    """Min-bitstring representative over permutations fixing the first t vertices."""
    best = None
    for perm in _label_fixing_perms(g.n, t):
        cand = g.relabel(perm).bitstring()
        if best is None or cand < best[0]:
            best = (cand, perm)
    return g.relabel(best[1])


def enumerate_flags(t: IntersectionType, f: int, a: Graph) -> list[Flag]:
    """One representative per flag-isomorphism class of A-free T-flags of size f.

    Flag isomorphisms fix each labeled vertex pointwise.  Representatives put
    the type on vertices 1..t with label i on vertex i, and are sorted by
    (edge count, bitstring).
    """
    if f > FLAG_SIZE_BUDGET:
        raise BudgetError(f"enumerate_flags budget is f <= {FLAG_SIZE_BUDGET}, got f={f}")
    ts = t.size
    if ts > f:
        raise FlagSosError("type size exceeds flag size")
    base = t.in_label_order()
    if contains_induced(base, a):
        raise FlagSosError("intersection type itself contains the forbidden graph")

    graphs = [base]
    for size in range(ts + 1, f + 1):
        seen: dict[tuple[int, tuple[int, ...]], Graph] = {}
        for g in graphs:
            for nb in range(1 << (size - 1)):
                edges = set(g.edges)
                for v in range(1, size):
                    if (nb >> (v - 1)) & 1:
                        edges.add((v, size))
                cand = Graph(size, frozenset(edges))
                if contains_induced(cand, a):
                    continue
                canon = flag_canonical_graph(cand, ts)
                seen.setdefault((canon.edge_count, canon.bitstring()), canon)
        graphs = [seen[k] for k in sorted(seen)]

    emb = tuple(range(1, ts + 1))
    return [Flag(g, t, emb) for g in graphs]


def graph_from_mask(n: int, mask: int) -> Graph:
    return CharVector(n, mask).to_graph()


def triangle_masks(n: int) -> list[int]:
    """Bitmasks of the three edges of each vertex triple."""
    idx = pair_index(n)
    out = []
    for a_, b, c in itertools.combinations(range(1, n + 1), 3):
        out.append((1 << idx[(a_, b)]) | (1 << idx[(a_, c)]) | (1 << idx[(b, c)]))
    return out


def a_free_masks(n: int, a: Graph) -> list[int]:
    """All edge masks of A-free labeled graphs on [n], ascending.

    For a = K3 this uses the precomputed triangle masks; the general case
    falls back on contains_induced per candidate.
    """
    total = 1 << num_pairs(n)
    if are_isomorphic(a, K3):
        tris = triangle_masks(n)
        return [m for m in range(total) if not any(m & t == t for t in tris)]
    return [m for m in range(total) if not contains_induced(graph_from_mask(n, m), a)]


def density_value(g: Graph) -> Fraction:
    """Edge density |E| / C(n, 2)."""
    return Fraction(g.edge_count, num_pairs(g.n))


@lru_cache(maxsize=4096)
def _aut_count_cached(n: int, edges: frozenset) -> int:
    g = Graph(n, edges)
    count = 0
    for perm in itertools.permutations(range(1, n + 1)):
        if g.relabel(perm) == g:
            count += 1
    return count


def automorphism_count(g: Graph) -> int:
    """Order of the automorphism group (exhaustive search; n <= 10)."""
    if g.n > CANONICAL_BUDGET:
        raise BudgetError("automorphism_count supports at most 10 vertices")
    return _aut_count_cached(g.n, g.edges)


def flag_automorphism_count(flag: Flag) -> int:
    """Automorphisms of the flag's graph fixing each labeled vertex pointwise."""
    g = flag.graph
    t = flag.type_size
    fixed = set(flag.embedding)
    count = 0
    free = [v for v in range(1, g.n + 1) if v not in fixed]
    for image in itertools.permutations(free):
        perm = list(range(1, g.n + 1))
        for v, img in zip(free, image):
            perm[v - 1] = img
        if g.relabel(tuple(perm)) == g:
            count += 1
    return count
