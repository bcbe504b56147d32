"""Representation theory of the symmetric group at desk scale.

Partitions with the lex and dominance-style orders, Kostka numbers,
Murnaghan-Nakayama characters, isotypic multiplicities of the edge-variable
polynomial space, and an exact matrix model of each irreducible.

The irreducible model is built from scratch: the Specht module is realized
by polytabloids inside the tabloid permutation module (integer matrices),
then changed to the Gelfand-Tsetlin basis by simultaneously diagonalizing
the Jucys-Murphy elements.  That basis is the seminormal/orthogonal basis
up to positive scalings, so its diagonal projections agree with Young's
orthogonal form while all matrix entries stay rational.  Symmetry-adapted
bases of R[x]_{<=d} come out exactly rational as a consequence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod, sqrt

import numpy as np

from . import ratlinalg as rl
from .errors import BudgetError, FlagSosError
from .poly import EdgePermAction, MPoly, all_perms, monomial_masks
from .graphs import num_pairs

Partition = tuple[int, ...]

CHARACTER_BUDGET = 10
MULTIPLICITY_BUDGET = 8
YOR_BUDGET = 8
SAB_N_BUDGET = 7
SAB_D_BUDGET = 2

_F0 = Fraction(0)
_F1 = Fraction(1)


# --- partitions --------------------------------------------------------------


def is_partition(lam) -> bool:
    return all(a >= b for a, b in zip(lam, lam[1:])) and all(x >= 1 for x in lam)


def check_partition(lam: Partition, n: int | None = None):
    if not is_partition(lam):
        raise FlagSosError(f"{lam} is not a partition")
    if n is not None and sum(lam) != n:
        raise FlagSosError(f"{lam} is not a partition of {n}")


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[Partition, ...]:
    """All partitions of n in descending lex order."""

    def gen(total, maxpart):
        if total == 0:
            yield ()
            return
        for first in range(min(total, maxpart), 0, -1):
            for rest in gen(total - first, first):
                yield (first,) + rest

    return tuple(gen(n, n))


def hook_partition(n: int, t: int) -> Partition:
    if t >= n:
        raise FlagSosError("hook partition needs t < n")
    return (n - t,) + (1,) * t


def partitions_lex_geq(n: int, hook_t: int) -> list[Partition]:
    """Partitions of n lexicographically >= the hook (n - t, 1^t), descending."""
    hook = hook_partition(n, hook_t)
    return [lam for lam in partitions(n) if lam >= hook]


def dominance_geq(mu: Partition, lam: Partition) -> bool:
    """mu >= lam in the order: lex greater-or-equal with at most as many parts."""
    if sum(mu) != sum(lam):
        raise FlagSosError("partitions must have the same size")
    return mu >= lam and len(mu) <= len(lam)


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0]))


def kostka(mu: Partition, lam: Partition) -> int:
    """Number of semistandard tableaux of shape mu and type lam.

    Counted by direct backtracking: rows weakly increase, columns strictly
    increase, and the multiset of entries is lam[0] ones, lam[1] twos, ...
    """
    check_partition(mu)
    check_partition(lam)
    if sum(mu) != sum(lam):
        raise FlagSosError("shape and type must partition the same n")
    remaining = list(lam)
    rows = [[0] * r for r in mu]
    cells = [(r, c) for r in range(len(mu)) for c in range(mu[r])]

    def backtrack(k: int) -> int:
        if k == len(cells):
            return 1
        r, c = cells[k]
        lo = 1
        if c > 0:
            lo = max(lo, rows[r][c - 1])
        if r > 0:
            lo = max(lo, rows[r - 1][c] + 1)
        total = 0
        for val in range(lo, len(remaining) + 1):
            if remaining[val - 1] == 0:
                continue
            remaining[val - 1] -= 1
            rows[r][c] = val
            total += backtrack(k + 1)
            remaining[val - 1] += 1
        rows[r][c] = 0
        return total

    return backtrack(0)


# --- conjugacy classes and characters ----------------------------------------


def cycle_type(sigma: EdgePermAction) -> Partition:
    seen = [False] * sigma.n
    lens = []
    for start in range(1, sigma.n + 1):
        if seen[start - 1]:
            continue
        length = 0
        v = start
        while not seen[v - 1]:
            seen[v - 1] = True
            v = sigma(v)
            length += 1
        lens.append(length)
    return tuple(sorted(lens, reverse=True))


def class_size(rho: Partition) -> int:
    n = sum(rho)
    z = 1
    mult: dict[int, int] = {}
    for part in rho:
        mult[part] = mult.get(part, 0) + 1
    for k, m in mult.items():
        z *= k**m * factorial(m)
    return factorial(n) // z


def perm_of_cycle_type(rho: Partition) -> EdgePermAction:
    mapping = []
    start = 1
    for length in rho:
        block = list(range(start, start + length))
        mapping.extend(block[1:] + block[:1])
        start += length
    return EdgePermAction(tuple(mapping))


def _beta_set(lam: Partition) -> list[int]:
    k = len(lam)
    return [lam[i] + (k - 1 - i) for i in range(k)]


def _partition_from_beta(beta: list[int]) -> Partition:
    beta = sorted(beta, reverse=True)
    k = len(beta)
    lam = [beta[i] - (k - 1 - i) for i in range(k)]
    return tuple(x for x in lam if x > 0)


@lru_cache(maxsize=None)
def character(lam: Partition, rho: Partition) -> int:
    """Irreducible character chi_lam on the class of cycle type rho, by the
    Murnaghan-Nakayama border-strip recursion (abacus formulation)."""
    n = sum(lam)
    if n > CHARACTER_BUDGET:
        raise BudgetError(f"character budget is n <= {CHARACTER_BUDGET}")
    check_partition(lam)
    if sum(rho) != n:
        raise FlagSosError("cycle type must partition the same n")
    if n == 0:
        return 1
    r = rho[0]
    rest = rho[1:]
    beta = _beta_set(lam)
    bset = set(beta)
    total = 0
    for b in beta:
        if b >= r and (b - r) not in bset:
            height = sum(1 for x in beta if b - r < x < b)
            new_beta = [x for x in beta if x != b] + [b - r]
            total += (-1) ** height * character(_partition_from_beta(new_beta), rest)
    return total


def irrep_dimension(lam: Partition) -> int:
    """Number of standard tableaux of shape lam (hook length formula)."""
    n = sum(lam)
    hooks = 1
    conj = conjugate(lam)
    for r in range(len(lam)):
        for c in range(lam[r]):
            hooks *= lam[r] - c + conj[c] - r - 1
    return factorial(n) // hooks


def _fixed_monomials(rho: Partition, n: int, d: int) -> int:
    """Monomials of degree <= d fixed by a permutation of cycle type rho."""
    sigma = perm_of_cycle_type(rho)
    pm = sigma.pair_position_map()
    seen = [False] * num_pairs(n)
    counts = [1] + [0] * d  # generating array for sums of whole pair-cycles
    for start in range(num_pairs(n)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = pm[k]
            length += 1
        if length <= d:
            for deg in range(d, length - 1, -1):
                counts[deg] += counts[deg - length]
    return sum(counts)


def multiplicity(lam: Partition, n: int, d: int) -> int:
    """Multiplicity of the lam-irreducible in R[x]_{<=d} under the vertex action.

    Computed as the character inner product with the permutation character
    sigma -> #monomials fixed by sigma, aggregated over conjugacy classes.
    """
    if n > MULTIPLICITY_BUDGET:
        raise BudgetError(f"multiplicity budget is n <= {MULTIPLICITY_BUDGET}")
    check_partition(lam, n)
    total = 0
    for rho in partitions(n):
        total += class_size(rho) * character(lam, rho) * _fixed_monomials(rho, n, d)
    q, r = divmod(total, factorial(n))
    if r:
        raise FlagSosError("character sum is not integral; internal error")
    return q


# --- tableaux ----------------------------------------------------------------


@dataclass(frozen=True)
class Tableau:
    """A filling of a Young diagram with 1..n, one number per cell."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> Partition:
        return tuple(len(r) for r in self.rows)

    @property
    def n(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_standard(self) -> bool:
        for row in self.rows:
            if any(row[i] >= row[i + 1] for i in range(len(row) - 1)):
                return False
        for c in range(len(self.rows[0])):
            col = [r[c] for r in self.rows if c < len(r)]
            if any(col[i] >= col[i + 1] for i in range(len(col) - 1)):
                return False
        return sorted(x for r in self.rows for x in r) == list(range(1, self.n + 1))

    def position(self, value: int) -> tuple[int, int]:
        for r, row in enumerate(self.rows):
            if value in row:
                return r, row.index(value)
        raise FlagSosError(f"{value} not in tableau")

    def content(self, value: int) -> int:
        r, c = self.position(value)
        return c - r

    def column_word(self) -> tuple[int, ...]:
        out = []
        for c in range(len(self.rows[0])):
            for r in range(len(self.rows)):
                if c < len(self.rows[r]):
                    out.append(self.rows[r][c])
        return tuple(out)

    def columns(self) -> list[list[int]]:
        return [
            [self.rows[r][c] for r in range(len(self.rows)) if c < len(self.rows[r])]
            for c in range(len(self.rows[0]))
        ]

    def to_json(self):
        return [list(r) for r in self.rows]


@lru_cache(maxsize=None)
def standard_tableaux(shape: Partition) -> tuple[Tableau, ...]:
    """All standard tableaux of the given shape, ordered by column-reading word."""
    check_partition(shape)
    n = sum(shape)
    results = []

    def rec(fill: list[list[int]], value: int):
        if value > n:
            results.append(Tableau(tuple(tuple(r) for r in fill)))
            return
        for r in range(len(shape)):
            cur = len(fill[r])
            if cur < shape[r] and (r == 0 or len(fill[r - 1]) > cur):
                fill[r].append(value)
                rec(fill, value + 1)
                fill[r].pop()

    rec([[] for _ in shape], 1)
    return tuple(sorted(results, key=lambda t: t.column_word()))


@dataclass(frozen=True)
class RowGroup:
    """Permutations of [n] preserving each row of a tableau setwise."""

    tableau: Tableau

    @property
    def order(self) -> int:
        return prod(factorial(len(r)) for r in self.tableau.rows)

    def elements(self) -> list[EdgePermAction]:
        n = self.tableau.n
        per_row = [list(itertools.permutations(row)) for row in self.tableau.rows]
        out = []
        for combo in itertools.product(*per_row):
            mapping = list(range(1, n + 1))
            for row, image in zip(self.tableau.rows, combo):
                for src, dst in zip(row, image):
                    mapping[src - 1] = dst
            out.append(EdgePermAction(tuple(mapping)))
        return out


def hook_tableau_for_labeling(n: int, theta_image) -> Tableau:
    """The hook-shape tableau whose first row holds the unlabeled vertices and
    whose singleton rows hold the labeled ones."""
    image = list(theta_image)
    rest = sorted(v for v in range(1, n + 1) if v not in set(image))
    if not rest:
        raise FlagSosError("labeling covers every vertex; hook shape needs n > t")
    rows = [tuple(rest)] + [(v,) for v in sorted(image)]
    return Tableau(tuple(rows))


# --- the Specht / Gelfand-Tsetlin matrix model --------------------------------

Tabloid = tuple[frozenset, ...]


def _tabloids(shape: Partition) -> list[Tabloid]:
    n = sum(shape)
    out = []

    def rec(pool: frozenset, rows: list[frozenset], k: int):
        if k == len(shape):
            out.append(tuple(rows))
            return
        size = shape[k]
        pool_sorted = sorted(pool)
        for combo in itertools.combinations(pool_sorted, size):
            rows.append(frozenset(combo))
            rec(pool - frozenset(combo), rows, k + 1)
            rows.pop()

    rec(frozenset(range(1, n + 1)), [], 0)
    return out


def _tabloid_of(tab: Tableau) -> Tabloid:
    return tuple(frozenset(r) for r in tab.rows)


def _perm_tabloid(sigma: EdgePermAction, tb: Tabloid) -> Tabloid:
    return tuple(frozenset(sigma(v) for v in row) for row in tb)


def _sign(perm_tuple) -> int:
    perm = list(perm_tuple)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class SpechtModel:
    """The lam-irreducible realized by standard polytabloids, with the exact
    rational Gelfand-Tsetlin change of basis."""

    def __init__(self, lam: Partition):
        check_partition(lam)
        self.lam = lam
        self.n = sum(lam)
        self.tabs = standard_tableaux(lam)
        self.dim = len(self.tabs)
        self.tabloids = _tabloids(lam)
        self.tabloid_index = {tb: i for i, tb in enumerate(self.tabloids)}
        self.E = [[_F0] * self.dim for _ in range(len(self.tabloids))]
        for j, tab in enumerate(self.tabs):
            for tb, coeff in self._polytabloid(tab).items():
                self.E[self.tabloid_index[tb]][j] = Fraction(coeff)
        G = rl.matmul(rl.transpose(self.E), self.E)
        self.U = rl.matmul(rl.inverse(G), rl.transpose(self.E))
        self._build_gz()

    def _polytabloid(self, tab: Tableau) -> dict[Tabloid, int]:
        cols = tab.columns()
        out: dict[Tabloid, int] = {}
        ranges = [list(itertools.permutations(range(len(c)))) for c in cols]
        for combo in itertools.product(*ranges):
            mapping = {}
            sign = 1
            for col, perm in zip(cols, combo):
                sign *= _sign(perm)
                for src_pos, dst_pos in enumerate(perm):
                    mapping[col[src_pos]] = col[dst_pos]
            rows = tuple(frozenset(mapping.get(v, v) for v in row) for row in tab.rows)
            out[rows] = out.get(rows, 0) + sign
        return {tb: c for tb, c in out.items() if c}

    def _permute_columns_of_E(self, sigma: EdgePermAction):
        rows = len(self.tabloids)
        out = [[_F0] * self.dim for _ in range(rows)]
        for i, tb in enumerate(self.tabloids):
            target = self.tabloid_index[_perm_tabloid(sigma, tb)]
            out[target] = self.E[i]
        return out

    def nat_matrix(self, sigma: EdgePermAction):
        """Matrix of sigma in the standard polytabloid basis (exact)."""
        return rl.matmul(self.U, self._permute_columns_of_E(sigma))

    def _build_gz(self):
        from .poly import transposition

        n, dim = self.n, self.dim
        jm = []
        for k in range(2, n + 1):
            xk = rl.zeros(dim, dim)
            for i in range(1, k):
                m = self.nat_matrix(transposition(n, i, k))
                for a in range(dim):
                    for b in range(dim):
                        xk[a][b] += m[a][b]
            jm.append(xk)
        cols = []
        for tab in self.tabs:
            stacked = []
            for k in range(2, n + 1):
                c = tab.content(k)
                xk = jm[k - 2]
                for a in range(dim):
                    row = xk[a][:]
                    row[a] -= c
                    stacked.append(row)
            kernel = rl.nullspace(stacked) if stacked else [[_F1]]
            if len(kernel) != 1:
                raise FlagSosError("Jucys-Murphy eigenspace is not one-dimensional")
            cols.append([Fraction(x) for x in rl.primitive_integer(kernel[0])])
        self.C = [[cols[j][i] for j in range(dim)] for i in range(dim)]
        self.Cinv = rl.inverse(self.C)
        self.Z = rl.matmul(self.Cinv, self.U)
        # GZ vectors realized inside the tabloid module, with their norms
        self.W = rl.matmul(self.E, self.C)
        self.norms2 = [
            sum((self.W[i][j] ** 2 for i in range(len(self.tabloids))), _F0) for j in range(dim)
        ]

    def gz_matrix(self, sigma: EdgePermAction):
        """Matrix of sigma in the Gelfand-Tsetlin basis (exact rational)."""
        return rl.matmul(self.Z, rl.matmul(self._permute_columns_of_E(sigma), self.C))

    def gz_column_one(self, sigma: EdgePermAction) -> list[Fraction]:
        """First column of gz_matrix(sigma), via the realized GZ vector."""
        w1 = [self.W[i][0] for i in range(len(self.tabloids))]
        moved = [_F0] * len(w1)
        for i, tb in enumerate(self.tabloids):
            if w1[i]:
                moved[self.tabloid_index[_perm_tabloid(sigma, tb)]] = w1[i]
        return rl.matvec(self.Z, moved)

    def yor_matrix(self, sigma: EdgePermAction) -> np.ndarray:
        """Young's orthogonal form: the GZ matrix conjugated by the norms."""
        g = self.gz_matrix(sigma)
        scale = [sqrt(self.norms2[i]) for i in range(self.dim)]
        return np.array(
            [[float(g[a][b]) * scale[a] / scale[b] for b in range(self.dim)] for a in range(self.dim)]
        )


@lru_cache(maxsize=None)
def specht_model(lam: Partition) -> SpechtModel:
    return SpechtModel(lam)


def yor_matrices(lam: Partition, sigma: EdgePermAction) -> np.ndarray:
    """Orthogonal representing matrix of sigma for the lam-irreducible, over the
    standard-tableaux basis (column-word order); multiplicative in sigma."""
    n = sum(lam)
    if n > YOR_BUDGET:
        raise BudgetError(f"yor_matrices budget is n <= {YOR_BUDGET}")
    if sigma.n != n:
        raise FlagSosError("permutation degree must match the partition size")
    return specht_model(lam).yor_matrix(sigma)


# --- symmetry-adapted bases ----------------------------------------------------


@dataclass(frozen=True)
class SabBlock:
    """The basis polynomials of one (partition, standard tableau) block."""

    partition: Partition
    tableau: Tableau
    polys: tuple[MPoly, ...]
    norms2: tuple[Fraction, ...]


@dataclass(frozen=True)
class SabBasis:
    n: int
    d: int
    blocks: tuple[SabBlock, ...]

    def blocks_for(self, lam: Partition) -> list[SabBlock]:
        return [b for b in self.blocks if b.partition == lam]

    def partitions_present(self) -> list[Partition]:
        seen = []
        for b in self.blocks:
            if b.partition not in seen:
                seen.append(b.partition)
        return seen

    def total_count(self) -> int:
        return sum(len(b.polys) for b in self.blocks)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "blocks": [
                {
                    "partition": list(b.partition),
                    "tableau": b.tableau.to_json(),
                    "polys": [p.to_json() for p in b.polys],
                    "norm2": [str(x) for x in b.norms2],
                }
                for b in self.blocks
            ],
        }


def _poly_from_vector(n: int, masks: list[int], vec) -> MPoly:
    return MPoly(n, {m: Fraction(c) for m, c in zip(masks, vec) if c})


def _vector_from_poly(p: MPoly, mask_index: dict[int, int], size: int):
    v = [_F0] * size
    for m, c in p.terms.items():
        v[mask_index[m]] = c
    return v


def symmetry_adapted_basis(n: int, d: int, restrict_to) -> SabBasis:
    """Exact symmetry-adapted basis of R[x]_{<=d} for the given partitions.

    For each partition the first-tableau block is the image of the diagonal
    Gelfand-Tsetlin projection applied to the monomial basis, orthogonalized
    exactly; companion tableau blocks are produced by the shift projections.
    Basis polynomials are kept with primitive integer coefficients and their
    squared norms are recorded.
    """
    if n > SAB_N_BUDGET or d > SAB_D_BUDGET:
        raise BudgetError(f"symmetry_adapted_basis budget is n <= {SAB_N_BUDGET}, d <= {SAB_D_BUDGET}")
    masks = monomial_masks(n, d)
    mask_index = {m: i for i, m in enumerate(masks)}
    D = len(masks)
    perms = list(all_perms(n))
    order = factorial(n)

    blocks: list[SabBlock] = []
    for lam in restrict_to:
        check_partition(lam, n)
        m_lam = multiplicity(lam, n, d)
        if m_lam == 0:
            continue
        model = specht_model(lam)
        dim = model.dim
        coeff_rows = [model.gz_column_one(sigma) for sigma in perms]
        perm_maps = [sigma.pair_position_map() for sigma in perms]

        def apply_pi(i: int, vec_terms: dict[int, Fraction]) -> dict[int, Fraction]:
            acc: dict[int, Fraction] = {}
            for sigma_idx in range(order):
                c = coeff_rows[sigma_idx][i]
                if not c:
                    continue
                pm = perm_maps[sigma_idx]
                for m, coef in vec_terms.items():
                    mm = 0
                    mt = m
                    while mt:
                        k = (mt & -mt).bit_length() - 1
                        mm |= 1 << pm[k]
                        mt &= mt - 1
                    acc[mm] = acc.get(mm, _F0) + c * coef
            scale = Fraction(dim, order)
            return {m: c * scale for m, c in acc.items() if c}

        # image of pi_11 on the monomial basis, reduced to an exact basis
        found: list[list[Fraction]] = []
        echelon: list[tuple[int, list[Fraction]]] = []
        for mono in masks:
            img = apply_pi(0, {mono: _F1})
            vec = [_F0] * D
            for m, c in img.items():
                vec[mask_index[m]] = c
            w = vec[:]
            for piv, row in echelon:
                if w[piv]:
                    f = w[piv]
                    w = [a - f * b for a, b in zip(w, row)]
            piv = next((k for k, x in enumerate(w) if x), None)
            if piv is not None:
                echelon.append((piv, [x / w[piv] for x in w]))
                found.append(vec)
                if len(found) == m_lam:
                    break
        if len(found) != m_lam:
            raise FlagSosError(f"projection rank {len(found)} != multiplicity {m_lam} for {lam}")

        ortho = rl.gram_schmidt(found)
        block1 = [rl.primitive_integer(v) for v in ortho]
        tabs = standard_tableaux(lam)
        for i in range(dim):
            if i == 0:
                vecs = [[Fraction(x) for x in v] for v in block1]
            else:
                vecs = []
                for v in block1:
                    terms = {masks[k]: Fraction(v[k]) for k in range(D) if v[k]}
                    img = apply_pi(i, terms)
                    vec = [_F0] * D
                    for m, c in img.items():
                        vec[mask_index[m]] = c
                    vecs.append(vec)
                # one shared integerizing scale per tableau index: per-poly
                # rescaling would break the repeated-block property of the
                # representing matrices across copies
                from math import lcm

                den = 1
                for v in vecs:
                    for x in v:
                        den = lcm(den, x.denominator)
                vecs = [[x * den for x in v] for v in vecs]
            polys = tuple(_poly_from_vector(n, masks, v) for v in vecs)
            norms = tuple(sum((x * x for x in v), _F0) for v in vecs)
            blocks.append(SabBlock(lam, tabs[i], polys, norms))
    return SabBasis(n, d, tuple(blocks))


@dataclass(frozen=True)
class YMatrix:
    """Y_lam = sym(y y^T) for one tableau block, over the unnormalized basis.

    Entries are S_n-invariant polynomials; norms2 records the squared norms of
    the block polynomials so downstream SDP matrices can absorb them.
    """

    partition: Partition
    entries: tuple[tuple[MPoly, ...], ...]
    norms2: tuple[Fraction, ...]
    n_lambda: int

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "partition": list(self.partition),
            "entries": [[p.to_json() for p in row] for row in self.entries],
            "norm2": [str(x) for x in self.norms2],
            "n_lambda": self.n_lambda,
        }

    @staticmethod
    def from_json(obj) -> "YMatrix":
        return YMatrix(
            tuple(obj["partition"]),
            tuple(tuple(MPoly.from_json(p) for p in row) for row in obj["entries"]),
            tuple(Fraction(x) for x in obj["norm2"]),
            int(obj["n_lambda"]),
        )


def y_matrix(basis: SabBasis, lam: Partition, tableau_index: int = 0) -> YMatrix:
    """Symmetrize the outer product of one tableau block of the basis."""
    blocks = basis.blocks_for(lam)
    if not blocks:
        raise FlagSosError(f"basis has no block for partition {lam}")
    block = blocks[tableau_index]
    polys = block.polys
    m = len(polys)
    entries = []
    for a in range(m):
        row = []
        for b in range(m):
            if b < a:
                row.append(entries[b][a])
            else:
                row.append((polys[a] * polys[b]).symmetrize())
        entries.append(row)
    return YMatrix(lam, tuple(tuple(r) for r in entries), block.norms2, irrep_dimension(lam))


# --- isotypic projections -----------------------------------------------------


@lru_cache(maxsize=8)
def _mask_action_tables(n: int):
    """Per-permutation lookup tables for the action on monomial bitmasks.

    Masks over the C(n,2) pair bits are split into byte-sized chunks; the
    image of a mask is the OR of per-chunk table lookups.  Built once per n
    and shared by every projection, this is what keeps whole-group passes
    affordable at n = 6, 7.
    """
    e = num_pairs(n)
    chunk_bits = [(lo, min(lo + 8, e)) for lo in range(0, e, 8)]
    perms = list(all_perms(n))
    types = [cycle_type(sigma) for sigma in perms]
    tables = []
    for sigma in perms:
        pm = sigma.pair_position_map()
        per_chunk = []
        for lo, hi in chunk_bits:
            width = hi - lo
            tab = [0] * (1 << width)
            for v in range(1 << width):
                img = 0
                vv = v
                while vv:
                    k = (vv & -vv).bit_length() - 1
                    img |= 1 << pm[lo + k]
                    vv &= vv - 1
                tab[v] = img
            per_chunk.append(tab)
        tables.append(per_chunk)
    shifts = [lo for lo, _ in chunk_bits]
    sizes = [(1 << (hi - lo)) - 1 for lo, hi in chunk_bits]
    return types, tables, shifts, sizes


def _weighted_group_image(p: MPoly, weight_of_type) -> dict[int, int]:
    """sum over sigma of weight(type(sigma)) * sigma(p), on scaled-integer terms.

    Returns the integer accumulator; the caller owns the normalization.
    """
    from .poly import scaled_integer_terms

    n = p.n
    types, tables, shifts, sizes = _mask_action_tables(n)
    terms, denom = scaled_integer_terms(p)
    acc: dict[int, int] = {}
    for sigma_idx in range(len(types)):
        w = weight_of_type(types[sigma_idx])
        if not w:
            continue
        chunk_tabs = tables[sigma_idx]
        for m, c in terms:
            mm = 0
            for ci in range(len(shifts)):
                part = (m >> shifts[ci]) & sizes[ci]
                if part:
                    mm |= chunk_tabs[ci][part]
            wc = w * c
            if mm in acc:
                acc[mm] += wc
            else:
                acc[mm] = wc
    return acc, denom


def isotypic_projection(p: MPoly, mu: Partition) -> MPoly:
    """Exact character projection of p onto the mu-isotypic component."""
    n = p.n
    check_partition(mu, n)
    dim = irrep_dimension(mu)
    chis = {rho: character(mu, rho) for rho in partitions(n)}
    acc, denom = _weighted_group_image(p, lambda t: chis[t])
    scale = Fraction(dim, factorial(n) * denom)
    return MPoly(n, {m: c * scale for m, c in acc.items() if c})


def projects_into(p: MPoly, allowed) -> bool:
    """True iff p equals the sum of its projections onto the allowed isotypics.

    Equivalent to every other isotypic projection vanishing, but done in a
    single pass with the aggregated character weights.
    """
    n = p.n
    weights = {}
    for rho in partitions(n):
        w = 0
        for mu in allowed:
            w += irrep_dimension(mu) * character(mu, rho)
        weights[rho] = w
    acc, denom = _weighted_group_image(p, lambda t: weights[t])
    order = factorial(n)
    recon = MPoly(n, {m: Fraction(c, order * denom) for m, c in acc.items() if c})
    return recon == p
