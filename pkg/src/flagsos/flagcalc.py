"""Density polynomials of the flag calculus and exact pair-density tables.

The indicator polynomial of an embedding multiplies x over edges and
(1 - x) over non-edges; everything else here is an exact rational average
of such indicators.  Pair densities follow the convention pinned by the
worked 3-vertex table: the double sum runs over ordered extension pairs
in both (F, F') and (F', F) roles and is divided by twice the ordered
count, which makes d_pair manifestly symmetric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import FlagSosError
from .graphs import (
    CharVector,
    Flag,
    Graph,
    automorphism_count,
    char_vector,
    flag_automorphism_count,
    pair_index,
)
from .poly import MPoly

Injection = tuple[int, ...]


@dataclass(frozen=True)
class Labeling:
    """An injective map Theta: [t] -> [n]; theta[k-1] is the image of label k."""

    n: int
    theta: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.theta)) != len(self.theta):
            raise FlagSosError("labeling must be injective")
        if any(not (1 <= v <= self.n) for v in self.theta):
            raise FlagSosError("labeling image out of range")

    @property
    def t(self) -> int:
        return len(self.theta)


def _vertex_map_check(h: Injection, f: int, n: int):
    if len(h) != f:
        raise FlagSosError("embedding does not cover all vertices")
    if len(set(h)) != f:
        raise FlagSosError("embedding must be injective")
    if any(not (1 <= v <= n) for v in h):
        raise FlagSosError("embedding image out of range")


def p_h(g: Graph | Flag, h: Injection, n: int) -> MPoly:
    """Indicator polynomial of 'h induces a copy of g': value 1 on hosts where
    the image vertices induce g, else 0.  h[v-1] is the image of vertex v."""
    graph = g.graph if isinstance(g, Flag) else g
    _vertex_map_check(h, graph.n, n)
    poly = MPoly.constant(n, 1)
    for i in range(1, graph.n + 1):
        for j in range(i + 1, graph.n + 1):
            var = MPoly.variable(n, h[i - 1], h[j - 1])
            poly = poly * (var if graph.has_edge(i, j) else (1 - var))
    return poly


def p_h_value(g: Graph | Flag, h: Injection, mask: int, n: int) -> int:
    """p_h evaluated at an edge mask, without expansion (0 or 1)."""
    graph = g.graph if isinstance(g, Flag) else g
    idx = pair_index(n)
    for i in range(1, graph.n + 1):
        for j in range(i + 1, graph.n + 1):
            a, b = h[i - 1], h[j - 1]
            bit = (mask >> idx[(a, b) if a < b else (b, a)]) & 1
            if bit != (1 if graph.has_edge(i, j) else 0):
                return 0
    return 1


def injections(k: int, pool) -> list[Injection]:
    return [tuple(p) for p in itertools.permutations(pool, k)]


def d_H(H: Graph, n: int) -> MPoly:
    """The density polynomial of H on n-vertex hosts.

    Evaluates at 1_G to the probability that a uniformly random m-subset of
    V(G) induces a copy of H.  The injection sum counts each edge pattern
    |Aut(H)| times, so the average is rescaled by m!/|Aut(H)| to make it the
    honest event probability; this is what makes sum_H d_H = 1 exact.
    """
    if H.n > n:
        raise FlagSosError(f"host size {n} smaller than subgraph size {H.n}")
    maps = injections(H.n, range(1, n + 1))
    total = MPoly.zero(n)
    for h in maps:
        total = total + p_h(H, h, n)
    scale = Fraction(factorial(H.n), automorphism_count(H))
    return total * (scale / len(maps))


def inj_theta(flag: Flag, theta: Labeling) -> list[Injection]:
    """All injective embeddings of the flag respecting the labeling."""
    n, t, f = theta.n, flag.type_size, flag.size
    if theta.t != t:
        raise FlagSosError("labeling size differs from the flag's type size")
    if f > n:
        raise FlagSosError("flag larger than host")
    fixed = {flag.embedding[k]: theta.theta[k] for k in range(t)}
    free_vertices = [v for v in range(1, f + 1) if v not in fixed]
    pool = [v for v in range(1, n + 1) if v not in set(theta.theta)]
    out = []
    for image in itertools.permutations(pool, len(free_vertices)):
        h = [0] * f
        for v, img in fixed.items():
            h[v - 1] = img
        for v, img in zip(free_vertices, image):
            h[v - 1] = img
        out.append(tuple(h))
    return out


def d_theta_F(flag: Flag, theta: Labeling) -> MPoly:
    """Label-respecting flag density.

    Evaluates at 1_G to the probability that the Theta-labeled vertices plus
    f - t unlabeled vertices chosen uniformly at random induce a copy of the
    flag (labels matching).  As with d_H, the injection sum overcounts each
    pattern by the flag's label-fixing automorphisms.
    """
    maps = inj_theta(flag, theta)
    n, t, f = theta.n, flag.type_size, flag.size
    norm = comb(n - t, f - t) * factorial(f - t)
    assert len(maps) == norm
    total = MPoly.zero(n)
    for h in maps:
        total = total + p_h(flag, h, n)
    scale = Fraction(factorial(f - t), flag_automorphism_count(flag))
    return total * (scale / norm)


def _pair_sum(flag1: Flag, flag2: Flag, h1_list: list[Injection], n: int, as_poly: bool, mask: int = 0):
    """Sum over (h1, disjoint extension h2) of p^{h1}_F1 * p^{h1|T u h2}_F2.

    Returns an MPoly when as_poly is set, otherwise the integer count of
    satisfied pairs at the given mask.
    """
    t, f = flag1.type_size, flag1.size
    total_poly = MPoly.zero(n)
    total_count = 0
    ext2 = [v for v in range(1, flag2.size + 1) if v not in set(flag2.embedding)]
    for h1 in h1_list:
        used = set(h1)
        pool = [v for v in range(1, n + 1) if v not in used]
        first = None if as_poly else p_h_value(flag1, h1, mask, n)
        if not as_poly and not first:
            continue
        if as_poly:
            first_poly = p_h(flag1, h1, n)
        for image in itertools.permutations(pool, len(ext2)):
            h2 = [0] * flag2.size
            for k in range(t):
                h2[flag2.embedding[k] - 1] = h1[flag1.embedding[k] - 1]
            for v, img in zip(ext2, image):
                h2[v - 1] = img
            h2 = tuple(h2)
            if as_poly:
                total_poly = total_poly + first_poly * p_h(flag2, h2, n)
            else:
                total_count += p_h_value(flag2, h2, mask, n)
    return total_poly if as_poly else total_count


def _pattern_scale(flag1: Flag, flag2: Flag) -> Fraction:
    """Injection-count to event-probability correction for a flag pair."""
    ft = flag1.size - flag1.type_size
    return Fraction(
        factorial(ft) * factorial(ft),
        flag_automorphism_count(flag1) * flag_automorphism_count(flag2),
    )


def _check_pair(flag1: Flag, flag2: Flag, n: int):
    if flag1.ftype != flag2.ftype:
        raise FlagSosError("flags must share the same intersection type")
    if flag1.size != flag2.size:
        raise FlagSosError("flags must have the same size")
    t, f = flag1.type_size, flag1.size
    if n < 2 * f - t:
        raise FlagSosError(f"need n >= 2f - t = {2 * f - t} to fit disjoint extensions, got n={n}")
    return t, f


def d_pair(flag1: Flag, flag2: Flag, n: int) -> MPoly:
    """Probability polynomial that a random labeled tuple plus two disjoint
    random extensions induce copies of flag1 and flag2 respectively.

    Symmetrized over the two role orders and divided by 2 * |Inj(V(F),[n])| *
    |Inj(V(F') \\ V(T), [n-f])|, so d_pair(F, F') == d_pair(F', F) exactly.
    """
    t, f = _check_pair(flag1, flag2, n)
    h1_all = injections(f, range(1, n + 1))
    norm = 2 * len(h1_all) * (comb(n - f, f - t) * factorial(f - t))
    s = _pair_sum(flag1, flag2, h1_all, n, True) + _pair_sum(flag2, flag1, h1_all, n, True)
    return s * (_pattern_scale(flag1, flag2) / norm)


def d_pair_value(flag1: Flag, flag2: Flag, v: CharVector) -> Fraction:
    """d_pair evaluated exactly at a characteristic vector, by counting."""
    n = v.n
    t, f = _check_pair(flag1, flag2, n)
    h1_all = injections(f, range(1, n + 1))
    norm = 2 * len(h1_all) * (comb(n - f, f - t) * factorial(f - t))
    c = _pair_sum(flag1, flag2, h1_all, n, False, v.mask) + _pair_sum(
        flag2, flag1, h1_all, n, False, v.mask
    )
    return Fraction(c, norm) * _pattern_scale(flag1, flag2)


def d_theta_pair(flag1: Flag, flag2: Flag, theta: Labeling) -> MPoly:
    """The labeled-pair density: d_pair with embeddings restricted to respect Theta."""
    n = theta.n
    t, f = _check_pair(flag1, flag2, n)
    norm = 2 * (comb(n - t, f - t) * factorial(f - t)) * (comb(n - f, f - t) * factorial(f - t))
    s = _pair_sum(flag1, flag2, inj_theta(flag1, theta), n, True) + _pair_sum(
        flag2, flag1, inj_theta(flag2, theta), n, True
    )
    return s * (_pattern_scale(flag1, flag2) / norm)


def err_poly(flag1: Flag, flag2: Flag, theta: Labeling) -> MPoly:
    """The overlap error d^Theta_F * d^Theta_F' - d^Theta_{F,F'} in normal form.

    Vanishes identically when f = t; on A-free hosts its value is O(1/n).
    """
    return d_theta_F(flag1, theta) * d_theta_F(flag2, theta) - d_theta_pair(flag1, flag2, theta)


def expectation_over_labelings(fn, n: int, t: int) -> MPoly:
    """Exact average of fn(theta) over all injective labelings [t] -> [n]."""
    thetas = [Labeling(n, th) for th in injections(t, range(1, n + 1))]
    total = MPoly.zero(n)
    for th in thetas:
        total = total + fn(th)
    return total * Fraction(1, len(thetas))


@dataclass(frozen=True)
class PairDensityTable:
    """Exact coefficients c[F,F'][H] = d_pair(F, F') evaluated at 1_H (ambient m).

    These are the structure constants expressing each pair density as a
    combination of host densities d_H.
    """

    flags: tuple[Flag, ...]
    hosts: tuple[Graph, ...]
    entries: dict[tuple[int, int, int], Fraction]

    def value(self, i: int, j: int, k: int) -> Fraction:
        if i > j:
            i, j = j, i
        return self.entries.get((i, j, k), Fraction(0))

    def host_matrix(self, k: int) -> list[list[Fraction]]:
        nf = len(self.flags)
        return [[self.value(i, j, k) for j in range(nf)] for i in range(nf)]

    def to_json(self) -> dict:
        return {
            "flags": [f.to_json() for f in self.flags],
            "hosts": [h.to_json() for h in self.hosts],
            "entries": [
                {"F": i, "Fp": j, "H": k, "value": str(v)}
                for (i, j, k), v in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(obj) -> "PairDensityTable":
        flags = tuple(Flag.from_json(f) for f in obj["flags"])
        hosts = tuple(Graph.from_json(h) for h in obj["hosts"])
        entries = {
            (e["F"], e["Fp"], e["H"]): Fraction(e["value"]) for e in obj["entries"]
        }
        return PairDensityTable(flags, hosts, entries)


def pair_density_table(flags, hosts) -> PairDensityTable:
    """Evaluate d_pair on every host's characteristic vector with the host
    itself as the ambient vertex set."""
    flags = tuple(flags)
    hosts = tuple(hosts)
    if not flags:
        raise FlagSosError("no flags given")
    t, f = flags[0].type_size, flags[0].size
    entries: dict[tuple[int, int, int], Fraction] = {}
    for k, H in enumerate(hosts):
        m = H.n
        if m < 2 * f - t:
            raise FlagSosError(f"host size {m} violates m >= 2f - t = {2 * f - t}")
        v = char_vector(H, m)
        for i in range(len(flags)):
            for j in range(i, len(flags)):
                val = d_pair_value(flags[i], flags[j], v)
                if not (0 <= val <= 1):
                    raise FlagSosError("pair density outside [0, 1]; internal error")
                entries[(i, j, k)] = val
    return PairDensityTable(flags, hosts, entries)
