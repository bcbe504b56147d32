import itertools
import random
from fractions import Fraction
from math import comb

import pytest

from flagsos.errors import FlagSosError
from flagsos.flagcalc import (
    Labeling,
    d_H,
    d_pair,
    d_pair_value,
    d_theta_F,
    d_theta_pair,
    err_poly,
    expectation_over_labelings,
    injections,
    p_h,
    pair_density_table,
)
from flagsos.graphs import (
    Flag,
    Graph,
    IntersectionType,
    K3,
    a_free_masks,
    char_vector,
    complete_graph,
    contains_induced,
    density_value,
    enumerate_A_free,
    enumerate_flags,
    graph_from_mask,
    num_pairs,
    single_vertex_type,
)
from flagsos.poly import MPoly, coeff_equal, edge_density_poly, transposition


def x(n, i, j):
    return MPoly.variable(n, i, j)


def cherry_flag():
    cherry = Graph.from_edges(3, [(1, 2), (1, 3)])
    t = IntersectionType(cherry, (1, 2, 3))
    claw = Graph.from_edges(4, [(1, 2), (1, 3), (1, 4)])
    return Flag(claw, t, (1, 2, 3))


class TestPh:
    def test_claw_example(self):
        fl = cherry_flag()
        got = p_h(fl, (1, 2, 3, 4), 5)
        expect = (
            x(5, 1, 2)
            * x(5, 1, 3)
            * x(5, 1, 4)
            * (1 - x(5, 2, 3))
            * (1 - x(5, 2, 4))
            * (1 - x(5, 3, 4))
        )
        assert coeff_equal(got, expect)

    def test_single_vertex_is_one(self):
        g = Graph(1, frozenset())
        assert coeff_equal(p_h(g, (3,), 5), MPoly.constant(5, 1))

    def test_single_edge_identity_map(self):
        g = Graph.from_edges(2, [(1, 2)])
        assert coeff_equal(p_h(g, (1, 2), 2), x(2, 1, 2))

    def test_rejects_non_injective(self):
        with pytest.raises(FlagSosError):
            p_h(K3, (1, 1, 2), 4)


class TestDH:
    def test_empty_graph_host3(self, triangle_free_hosts3):
        h0 = triangle_free_hosts3[0]
        got = d_H(h0, 3)
        expect = (1 - x(3, 1, 2)) * (1 - x(3, 1, 3)) * (1 - x(3, 2, 3))
        assert coeff_equal(got, expect)

    def test_density_counting_oracle_on_c4(self, triangle_free_hosts3):
        c4 = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
        h1 = triangle_free_hosts3[1]  # single edge on 3 vertices
        val = d_H(h1, 4).evaluate(char_vector(c4, 4))
        count = 0
        for trip in itertools.combinations(range(1, 5), 3):
            if c4.induced(trip).edge_count == 1:
                count += 1
        assert val == Fraction(count, comb(4, 3))

    def test_total_probability_exact(self):
        n = 5
        total = MPoly.zero(n)
        for h in enumerate_A_free(3, complete_graph(4)):
            total = total + d_H(h, n)
        assert coeff_equal(total, MPoly.constant(n, 1))

    def test_size_error(self):
        with pytest.raises(FlagSosError):
            d_H(complete_graph(4), 3)


class TestDTheta:
    def test_edge_flag_two_extensions(self, mantel_flags):
        _, f1 = mantel_flags
        got = d_theta_F(f1, Labeling(3, (1,)))
        assert coeff_equal(got, (x(3, 1, 2) + x(3, 1, 3)) * Fraction(1, 2))

    def test_no_unlabeled_vertices(self):
        t = single_vertex_type()
        fl = enumerate_flags(t, 1, K3)[0]
        got = d_theta_F(fl, Labeling(4, (2,)))
        assert coeff_equal(got, MPoly.constant(4, 1))

    def test_paper_example_average_of_two(self):
        fl = cherry_flag()
        theta = Labeling(5, (1, 2, 3))
        got = d_theta_F(fl, theta)
        expect = (p_h(fl, (1, 2, 3, 4), 5) + p_h(fl, (1, 2, 3, 5), 5)) * Fraction(1, 2)
        assert coeff_equal(got, expect)
        swap = transposition(5, 4, 5)
        assert coeff_equal(got.act(swap), got)

    def test_degree_bound(self):
        fl = cherry_flag()
        assert d_theta_F(fl, Labeling(6, (1, 2, 3))).degree <= comb(4, 2)


class TestDPair:
    def test_mantel_values(self, mantel_flags, triangle_free_hosts3):
        f0, f1 = mantel_flags
        h0, h1, h2 = (char_vector(h, 3) for h in triangle_free_hosts3)
        assert d_pair_value(f1, f1, h2) == Fraction(1, 3)
        assert d_pair_value(f0, f0, h0) == Fraction(1)
        assert d_pair_value(f0, f1, h1) == Fraction(1, 3)

    def test_polynomial_matches_values(self, mantel_flags):
        f0, f1 = mantel_flags
        p = d_pair(f0, f1, 4)
        for mask in range(1 << num_pairs(4)):
            assert p.evaluate(mask) == d_pair_value(f0, f1, char_vector(graph_from_mask(4, mask), 4))

    def test_symmetry(self, mantel_flags):
        f0, f1 = mantel_flags
        assert coeff_equal(d_pair(f0, f1, 4), d_pair(f1, f0, 4))

    def test_needs_room_for_disjoint_extensions(self, mantel_flags):
        f0, f1 = mantel_flags
        with pytest.raises(FlagSosError):
            d_pair(f0, f1, 2)

    def test_degenerate_f_equals_t(self):
        t = single_vertex_type()
        fl = enumerate_flags(t, 1, K3)[0]
        v = char_vector(Graph.from_edges(3, [(1, 2)]), 3)
        assert d_pair_value(fl, fl, v) == 1  # a single vertex always induces T


class TestPairTable:
    def test_mantel_table(self, mantel_flags, triangle_free_hosts3):
        table = pair_density_table(mantel_flags, triangle_free_hosts3)
        third = Fraction(1, 3)
        expect = {
            (0, 0, 0): Fraction(1), (0, 0, 1): third, (0, 0, 2): Fraction(0),
            (0, 1, 0): Fraction(0), (0, 1, 1): third, (0, 1, 2): third,
            (1, 1, 0): Fraction(0), (1, 1, 1): Fraction(0), (1, 1, 2): third,
        }
        assert table.entries == expect

    def test_row_sums_are_probabilities(self, mantel_flags):
        hosts = enumerate_A_free(4, K3)
        table = pair_density_table(mantel_flags, hosts)
        k = len(mantel_flags)
        for hk in range(len(hosts)):
            ordered = sum(
                table.value(i, j, hk) for i in range(k) for j in range(k)
            )
            assert 0 <= ordered <= 1

    def test_flagsandH_reconstruction_oracle(self, mantel_flags):
        # entries weighted by host densities reproduce the ambient pair
        # probability exactly (law of total probability over 4-subsets)
        f0, f1 = mantel_flags
        hosts = enumerate_A_free(4, complete_graph(5))  # all 4-vertex classes
        table = pair_density_table((f0, f1), hosts)
        n = 5
        ambient = d_pair(f0, f1, n)
        recon = MPoly.zero(n)
        for hk, host in enumerate(hosts):
            recon = recon + d_H(host, n) * table.value(0, 1, hk)
        assert coeff_equal(ambient, recon)

    def test_host_too_small(self, mantel_flags):
        with pytest.raises(FlagSosError):
            pair_density_table(mantel_flags, [Graph.from_edges(2, [(1, 2)])])

    def test_json_roundtrip(self, mantel_flags, triangle_free_hosts3):
        table = pair_density_table(mantel_flags, triangle_free_hosts3)
        from flagsos.flagcalc import PairDensityTable

        assert PairDensityTable.from_json(table.to_json()).entries == table.entries


class TestErr:
    def test_zero_when_no_extensions(self):
        t = single_vertex_type()
        fl = enumerate_flags(t, 1, K3)[0]
        assert err_poly(fl, fl, Labeling(4, (1,))).is_zero()

    def test_exhaustive_max_n4(self, mantel_flags):
        _, f1 = mantel_flags
        e = err_poly(f1, f1, Labeling(4, (1,)))
        best = max(abs(e.evaluate(m)) for m in a_free_masks(4, K3))
        assert best == Fraction(1, 9)

    def test_decay_with_n(self, mantel_flags):
        # the n=6 maximum is at most the n=4 maximum scaled by 4/6, up to slack 2
        _, f1 = mantel_flags
        e4 = err_poly(f1, f1, Labeling(4, (1,)))
        e6 = err_poly(f1, f1, Labeling(6, (1,)))
        m4 = max(abs(e4.evaluate(m)) for m in a_free_masks(4, K3))
        m6 = max(abs(e6.evaluate(m)) for m in a_free_masks(6, K3))
        assert m6 <= 2 * Fraction(4, 6) * m4

    def test_expectation_identity(self, mantel_flags):
        f0, f1 = mantel_flags
        n = 5
        lhs = expectation_over_labelings(lambda th: d_theta_pair(f0, f1, th), n, 1)
        assert coeff_equal(lhs, d_pair(f0, f1, n))


class TestSubgraphDensityFacts:
    @pytest.mark.parametrize("n", [4, 5])
    def test_density_decomposition_on_zeros(self, n, triangle_free_hosts3):
        d = edge_density_poly(n)
        rhs = MPoly.zero(n)
        for host in triangle_free_hosts3:
            rhs = rhs + d_H(host, n) * density_value(host)
        diff = d - rhs
        assert all(diff.evaluate(m) == 0 for m in a_free_masks(n, K3))

    def test_sos_density_identity(self, triangle_free_hosts3):
        # d_H equals the average of squared indicators after Boolean reduction
        n = 4
        h1 = triangle_free_hosts3[1]
        maps = injections(3, range(1, n + 1))
        acc = MPoly.zero(n)
        for h in maps:
            q = p_h(h1, h, n)
            acc = acc + q * q
        acc = acc * Fraction(6, 2 * len(maps))  # pattern count 3!/|Aut(H1)|
        assert coeff_equal(acc, d_H(h1, n))


class TestRowGroupInvariance:
    def test_invariance_random_corpus(self):
        from flagsos.symrep import RowGroup, hook_tableau_for_labeling

        rng = random.Random(424242)
        types = {
            1: [single_vertex_type()],
            2: [
                IntersectionType(Graph(2, frozenset()), (1, 2)),
                IntersectionType(Graph.from_edges(2, [(1, 2)]), (1, 2)),
            ],
        }
        checked = 0
        while checked < 25:
            t = rng.choice([1, 2])
            f = rng.randrange(t, 5) or t
            if f < t or f > 4:
                continue
            typ = rng.choice(types[t])
            flags = enumerate_flags(typ, f, K3)
            fl = rng.choice(flags)
            n = rng.randrange(max(f, t + 1), 7)
            theta = Labeling(n, tuple(rng.sample(range(1, n + 1), t)))
            poly = d_theta_F(fl, theta)
            tab = hook_tableau_for_labeling(n, theta.theta)
            elems = RowGroup(tab).elements()
            for sigma in rng.sample(elems, min(20, len(elems))):
                assert coeff_equal(poly.act(sigma), poly)
            checked += 1

    def test_linear_combinations_invariant(self, mantel_flags):
        from flagsos.symrep import RowGroup, hook_tableau_for_labeling

        rng = random.Random(99)
        n = 5
        theta = Labeling(n, (2,))
        polys = [d_theta_F(fl, theta) for fl in mantel_flags]
        tab = hook_tableau_for_labeling(n, theta.theta)
        elems = RowGroup(tab).elements()
        for _ in range(5):
            combo = MPoly.zero(n)
            for p in polys:
                combo = combo + p * Fraction(rng.randrange(-9, 10), rng.randrange(1, 5))
            for sigma in rng.sample(elems, 10):
                assert coeff_equal(combo.act(sigma), combo)
