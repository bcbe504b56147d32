"""Exact multilinear polynomials over the edge variables x_ij.

Coefficients are Fractions throughout; monomials are stored as bitmasks
over the lex-ordered vertex pairs, so x_ij^2 = x_ij is built into the
product (mask union) and every polynomial is automatically in squarefree
normal form.  Floating point never enters this module.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import FlagSosError
from .graphs import CharVector, num_pairs, pair_index, pair_list

SUBGROUP_ITERATION_LIMIT = 10**6


class EdgePermAction:
    """A vertex permutation of [n] acting on edge variables by x_ij -> x_s(i)s(j).

    `mapping[i-1]` is the image of vertex i.
    """

    __slots__ = ("n", "mapping", "_pair_map")

    def __init__(self, mapping: tuple[int, ...]):
        self.n = len(mapping)
        if sorted(mapping) != list(range(1, self.n + 1)):
            raise FlagSosError("not a permutation of [n]")
        self.mapping = tuple(mapping)
        self._pair_map = None

    def __call__(self, v: int) -> int:
        return self.mapping[v - 1]

    def __mul__(self, other: "EdgePermAction") -> "EdgePermAction":
        """Composition self . other (apply other first)."""
        return EdgePermAction(tuple(self.mapping[other.mapping[i] - 1] for i in range(self.n)))

    def inverse(self) -> "EdgePermAction":
        inv = [0] * self.n
        for i, v in enumerate(self.mapping):
            inv[v - 1] = i + 1
        return EdgePermAction(tuple(inv))

    def __eq__(self, other):
        return isinstance(other, EdgePermAction) and self.mapping == other.mapping

    def __hash__(self):
        return hash(self.mapping)

    def __repr__(self):
        return f"EdgePermAction({self.mapping})"

    def pair_position_map(self) -> tuple[int, ...]:
        """For each pair slot k, the slot of the image pair."""
        if self._pair_map is None:
            idx = pair_index(self.n)
            out = []
            for i, j in pair_list(self.n):
                a, b = self.mapping[i - 1], self.mapping[j - 1]
                out.append(idx[(a, b) if a < b else (b, a)])
            self._pair_map = tuple(out)
        return self._pair_map

    def apply_mask(self, mask: int) -> int:
        pm = self.pair_position_map()
        out = 0
        while mask:
            k = (mask & -mask).bit_length() - 1
            out |= 1 << pm[k]
            mask &= mask - 1
        return out


def identity_perm(n: int) -> EdgePermAction:
    return EdgePermAction(tuple(range(1, n + 1)))


def transposition(n: int, a: int, b: int) -> EdgePermAction:
    m = list(range(1, n + 1))
    m[a - 1], m[b - 1] = b, a
    return EdgePermAction(tuple(m))


def all_perms(n: int):
    for p in itertools.permutations(range(1, n + 1)):
        yield EdgePermAction(p)


class MPoly:
    """A multilinear polynomial in normal form modulo x_ij^2 = x_ij."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[int, Fraction] | None = None):
        self.n = n
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(n: int) -> "MPoly":
        return MPoly(n)

    @staticmethod
    def constant(n: int, c) -> "MPoly":
        c = Fraction(c)
        return MPoly(n, {0: c} if c else {})

    @staticmethod
    def variable(n: int, i: int, j: int) -> "MPoly":
        i, j = min(i, j), max(i, j)
        k = pair_index(n)[(i, j)]
        return MPoly(n, {1 << k: Fraction(1)})

    # -- ring operations ------------------------------------------------

    def _check(self, other: "MPoly"):
        if self.n != other.n:
            raise FlagSosError("polynomials live over different vertex counts")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.n, other)
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, _ZERO) + c
            if s:
                t[m] = s
            elif m in t:
                del t[m]
        return MPoly(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return MPoly.constant(self.n, other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return MPoly.zero(self.n)
            return MPoly(self.n, {m: v * c for m, v in self.terms.items()})
        self._check(other)
        t: dict[int, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 | m2  # x^2 = x
                s = t.get(m, _ZERO) + c1 * c2
                if s:
                    t[m] = s
                elif m in t:
                    del t[m]
        return MPoly(self.n, t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (Fraction(1) / Fraction(c))

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=0)

    def constant_term(self) -> Fraction:
        return self.terms.get(0, _ZERO)

    def coefficient(self, pairs) -> Fraction:
        idx = pair_index(self.n)
        m = 0
        for i, j in pairs:
            m |= 1 << idx[(min(i, j), max(i, j))]
        return self.terms.get(m, _ZERO)

    # -- evaluation and group action -------------------------------------

    def evaluate(self, v: CharVector | int) -> Fraction:
        """Exact value at a 0/1 characteristic vector."""
        if isinstance(v, CharVector):
            if v.n != self.n:
                raise FlagSosError("dimension mismatch between polynomial and vector")
            mask = v.mask
        else:
            mask = v
        total = Fraction(0)
        for m, c in self.terms.items():
            if m & mask == m:
                total += c
        return total

    def act(self, sigma: EdgePermAction) -> "MPoly":
        """sigma . p, permuting edge variables; degree-preserving."""
        if sigma.n != self.n:
            raise FlagSosError("permutation degree mismatch")
        return MPoly(self.n, {sigma.apply_mask(m): c for m, c in self.terms.items()})

    def symmetrize(self, group=None) -> "MPoly":
        """Average over a subgroup of S_n (list of EdgePermAction), or all of S_n.

        Full-S_n symmetrization aggregates monomial orbits instead of iterating
        the n! elements; explicit subgroup iteration refuses above 10^6 elements.
        """
        if group is None:
            return _symmetrize_full(self)
        group = list(group)
        if len(group) > SUBGROUP_ITERATION_LIMIT:
            raise FlagSosError("subgroup too large to iterate explicitly")
        acc: dict[int, Fraction] = {}
        for sigma in group:
            pm = sigma.pair_position_map()
            for m, c in self.terms.items():
                mm = 0
                mt = m
                while mt:
                    k = (mt & -mt).bit_length() - 1
                    mm |= 1 << pm[k]
                    mt &= mt - 1
                acc[mm] = acc.get(mm, _ZERO) + c
        inv = Fraction(1, len(group))
        return MPoly(self.n, {m: c * inv for m, c in acc.items()})

    # -- serialization ----------------------------------------------------

    def term_pairs(self):
        """Terms as (sorted tuple of pairs, coefficient), deterministic graded-lex order."""
        pl = pair_list(self.n)
        items = []
        for m, c in self.terms.items():
            pairs = tuple(pl[k] for k in range(len(pl)) if (m >> k) & 1)
            items.append((pairs, c))
        items.sort(key=lambda t: (len(t[0]), t[0]))
        return items

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"edges": [list(p) for p in pairs], "coeff": str(c)} for pairs, c in self.term_pairs()
            ],
        }

    @staticmethod
    def from_json(obj) -> "MPoly":
        n = int(obj["n"])
        idx = pair_index(n)
        terms: dict[int, Fraction] = {}
        for t in obj["terms"]:
            m = 0
            for i, j in t["edges"]:
                m |= 1 << idx[(min(i, j), max(i, j))]
            terms[m] = terms.get(m, _ZERO) + Fraction(t["coeff"])
        return MPoly(n, terms)

    def __repr__(self):
        if self.is_zero():
            return "MPoly(0)"
        bits = []
        for pairs, c in self.term_pairs()[:6]:
            mono = "*".join(f"x{i}{j}" for i, j in pairs) or "1"
            bits.append(f"{c}*{mono}")
        more = "" if len(self.terms) <= 6 else f" ... ({len(self.terms)} terms)"
        return "MPoly(" + " + ".join(bits) + more + ")"


_ZERO = Fraction(0)


def reduce_boolean(n: int, raw_terms) -> MPoly:
    """Normal form of a raw polynomial given as (exponent map, coefficient) terms.

    Each raw term maps pairs (i, j) to positive integer exponents; exponents
    collapse to 1 modulo x^2 = x.  The result agrees with the input on every
    0/1 vector.
    """
    idx = pair_index(n)
    terms: dict[int, Fraction] = {}
    for expmap, coeff in raw_terms:
        m = 0
        for (i, j), e in expmap.items():
            if e < 0:
                raise FlagSosError("negative exponents are not allowed")
            if e:
                m |= 1 << idx[(min(i, j), max(i, j))]
        c = terms.get(m, _ZERO) + Fraction(coeff)
        if c:
            terms[m] = c
        elif m in terms:
            del terms[m]
    return MPoly(n, terms)


def coeff_equal(p: MPoly, q: MPoly) -> bool:
    """Exact term-by-term equality of normal forms."""
    if p.n != q.n:
        raise FlagSosError("polynomials live over different vertex counts")
    return p.terms == q.terms


# --- full S_n symmetrization via monomial orbits ----------------------------


@lru_cache(maxsize=None)
def _orbit_of_mask(n: int, mask: int) -> tuple[tuple[int, ...], int]:
    """The S_n-orbit of a monomial (edge set), as sorted masks, plus its size."""
    pl = pair_list(n)
    edges = [pl[k] for k in range(len(pl)) if (mask >> k) & 1]
    support = sorted({v for e in edges for v in e})
    if not support:
        return ((0,), 1)
    idx = pair_index(n)
    local = {v: k for k, v in enumerate(support)}
    abstract = [(local[i], local[j]) for i, j in edges]
    s = len(support)
    seen = set()
    for image in itertools.permutations(range(1, n + 1), s):
        m = 0
        for u, v in abstract:
            a, b = image[u], image[v]
            m |= 1 << idx[(a, b) if a < b else (b, a)]
        seen.add(m)
    return (tuple(sorted(seen)), len(seen))


def _symmetrize_full(p: MPoly) -> MPoly:
    acc: dict[int, Fraction] = {}
    by_orbit: dict[tuple[int, ...], Fraction] = {}
    orbits: dict[tuple[int, ...], tuple[int, ...]] = {}
    for m, c in p.terms.items():
        orb, size = _orbit_of_mask(p.n, m)
        orbits[orb] = orb
        by_orbit[orb] = by_orbit.get(orb, _ZERO) + Fraction(c, size)
    for orb, c in by_orbit.items():
        if not c:
            continue
        for m in orb:
            acc[m] = acc.get(m, _ZERO) + c
    return MPoly(p.n, acc)


def symmetrize(p: MPoly, group=None) -> MPoly:
    return p.symmetrize(group)


def evaluate(p: MPoly, v: CharVector) -> Fraction:
    return p.evaluate(v)


def act(sigma: EdgePermAction, p: MPoly) -> MPoly:
    return p.act(sigma)


def edge_sum(n: int) -> MPoly:
    """Sum of all edge variables."""
    return MPoly(n, {(1 << k): Fraction(1) for k in range(num_pairs(n))})


def edge_density_poly(n: int) -> MPoly:
    """The edge density polynomial (1 / C(n,2)) * sum x_ij."""
    return edge_sum(n) * Fraction(1, num_pairs(n))


def scaled_integer_terms(p: MPoly) -> tuple[list[tuple[int, int]], int]:
    """(mask, integer coefficient) term list and the common denominator."""
    denom = 1
    for c in p.terms.values():
        denom = denom * c.denominator // gcd(denom, c.denominator)
    items = [(m, int(c * denom)) for m, c in p.terms.items()]
    return items, denom


def monomial_masks(n: int, d: int) -> list[int]:
    """All squarefree monomials of degree <= d, graded-lex order."""
    e = num_pairs(n)
    out = []
    for k in range(d + 1):
        for combo in itertools.combinations(range(e), k):
            m = 0
            for b in combo:
                m |= 1 << b
            out.append(m)
    return out


