import random
from fractions import Fraction

import pytest

from flagsos.errors import BudgetError, VerificationError
from flagsos.flagcalc import Labeling, d_H, d_theta_F
from flagsos.graphs import (
    K3,
    a_free_masks,
    enumerate_flags,
    num_pairs,
    single_vertex_type,
)
from flagsos.poly import MPoly, edge_density_poly
from flagsos.sdp import Certificate
from flagsos.verify import (
    IdentityClaim,
    mantel_sos_poly,
    solve_and_certify,
    verify_density_bound,
    verify_identity,
    verify_isotypic_membership,
    verify_mantel_flag_sos,
    verify_section5,
)


class TestIdentity:
    @pytest.mark.parametrize("n", [4, 5])
    def test_unit_partition_mod_ideal(self, n, triangle_free_hosts3):
        total = MPoly.zero(n)
        for h in triangle_free_hosts3:
            total = total + d_H(h, n)
        ok, witness = verify_identity(
            IdentityClaim(MPoly.constant(n, 1), total, n, K3, "mod-ideal")
        )
        assert ok and witness is None

    @pytest.mark.parametrize("n", [4, 5])
    def test_density_decomposition_mod_ideal(self, n, triangle_free_hosts3):
        d = edge_density_poly(n)
        rhs = d_H(triangle_free_hosts3[1], n) * Fraction(1, 3) + d_H(
            triangle_free_hosts3[2], n
        ) * Fraction(2, 3)
        ok, _ = verify_identity(IdentityClaim(d, rhs, n, K3, "mod-ideal"))
        assert ok
        ok2, _ = verify_identity(IdentityClaim(d, rhs, n, K3, "exact-coefficient"))
        assert not ok2  # holds only modulo the ideal

    def test_false_claim_returns_witness(self):
        n = 4
        lhs = MPoly.constant(n, 1)
        rhs = MPoly.constant(n, 1) + MPoly.variable(n, 1, 2)
        ok, witness = verify_identity(IdentityClaim(lhs, rhs, n, K3, "mod-ideal"))
        assert not ok and witness is not None
        # the witness is a genuine zero of the ideal where the sides differ
        assert (lhs - rhs).evaluate(witness.mask) != 0

    def test_coefficient_equality_implies_ideal_equality(self):
        rnd = random.Random(17)
        n = 4
        for _ in range(10):
            p = MPoly(
                n,
                {rnd.randrange(1 << num_pairs(n)): Fraction(rnd.randrange(-4, 5)) for _ in range(5)},
            )
            claim_exact = IdentityClaim(p, p, n, K3, "exact-coefficient")
            claim_ideal = IdentityClaim(p, p, n, K3, "mod-ideal")
            assert verify_identity(claim_exact)[0]
            assert verify_identity(claim_ideal)[0]

    def test_budget(self):
        n = 7
        claim = IdentityClaim(MPoly.zero(n), MPoly.zero(n), n, K3, "mod-ideal")
        with pytest.raises(BudgetError):
            verify_identity(claim)

    def test_threads_agree(self, triangle_free_hosts3):
        n = 4
        total = MPoly.zero(n)
        for h in triangle_free_hosts3:
            total = total + d_H(h, n)
        claim = IdentityClaim(MPoly.constant(n, 1), total, n, K3, "mod-ideal")
        assert verify_identity(claim, threads=1) == verify_identity(claim, threads=2)


class TestMantelSos:
    @pytest.mark.parametrize(
        "n,expected_err", [(4, Fraction(2, 9)), (5, Fraction(1, 6)), (6, Fraction(3, 25))]
    )
    def test_err_values(self, n, expected_err):
        report = verify_mantel_flag_sos(n)
        assert report["ok"]
        assert report["max_abs_err"] == expected_err
        assert report["err_constant"] == n * expected_err

    def test_n5_extremal_check(self):
        report = verify_mantel_flag_sos(5)
        assert report["max_density"] == Fraction(3, 5)
        assert report["bound_with_err"] >= Fraction(3, 5)

    def test_boundary_rejected(self):
        with pytest.raises(BudgetError):
            verify_mantel_flag_sos(3)

    def test_sos_poly_nonnegative_everywhere(self):
        p = mantel_sos_poly(4)
        assert all(p.evaluate(m) >= 0 for m in range(1 << num_pairs(4)))


class TestSection5:
    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_exact_identity(self, n):
        report = verify_section5(n)
        assert report["ok"]
        assert report["identity"] and report["det_qn_zero"]
        assert report["qn_rank"] == 1 and report["q_hook_psd"]
        assert report["paper_scale_factor"] == (n - 1) ** 2

    def test_budget(self):
        with pytest.raises(BudgetError):
            verify_section5(8)


class TestIsotypic:
    def test_flag_density_confined(self):
        f0, f1 = enumerate_flags(single_vertex_type(), 2, K3)
        p = d_theta_F(f1, Labeling(5, (2,)))
        assert verify_isotypic_membership(p, 1, 5, 1)

    def test_constant_in_trivial_only(self):
        assert verify_isotypic_membership(MPoly.constant(5, 1), 0, 5, 0)

    def test_negative_control(self):
        assert not verify_isotypic_membership(MPoly.variable(5, 1, 2), 0, 5, 1)


@pytest.fixture(scope="module")
def mantel_cert():
    return solve_and_certify(single_vertex_type(), 2, 3, K3)


class TestDensityBound:

    def test_mantel_chain(self, mantel_cert):
        instance, solution, certificate, report = mantel_cert
        assert certificate.bound == Fraction(1, 2)
        assert report["a_H"] == [Fraction(1, 2), Fraction(-1, 6), Fraction(-1, 6)]
        assert report["ok"]

    def test_zero_certificate(self, mantel_cert):
        instance = mantel_cert[0]
        zero = tuple(tuple(Fraction(0) for _ in range(2)) for _ in range(2))
        cert = Certificate("flag", {"Q": zero}, Fraction(2, 3), {})
        report = verify_density_bound(cert, instance, n=4)
        assert report["bound"] == Fraction(2, 3)

    def test_flipped_entry_rejected(self, mantel_cert):
        instance, _, certificate, _ = mantel_cert
        q = [list(row) for row in certificate.blocks["Q"]]
        q[0][1] = -q[0][1]
        q[1][0] = -q[1][0]
        bad = Certificate("flag", {"Q": tuple(tuple(r) for r in q)}, certificate.bound, {})
        with pytest.raises(VerificationError):
            verify_density_bound(bad, instance, n=4)

    def test_soundness_fuzz_100_mutations(self, mantel_cert):
        instance, _, certificate, _ = mantel_cert
        rng = random.Random(31337)
        delta = Fraction(1, 1000)
        for _ in range(100):
            q = [list(row) for row in certificate.blocks["Q"]]
            a, b = rng.randrange(2), rng.randrange(2)
            q[a][b] = q[a][b] + rng.choice([-delta, delta])
            mutated = Certificate(
                "flag", {"Q": tuple(tuple(r) for r in q)}, certificate.bound, {}
            )
            with pytest.raises(VerificationError):
                verify_density_bound(mutated, instance, n=4)

    def test_bound_mismatch_detected(self, mantel_cert):
        instance, _, certificate, _ = mantel_cert
        forged = Certificate("flag", certificate.blocks, Fraction(1, 3), {})
        with pytest.raises(VerificationError):
            verify_density_bound(forged, instance, n=4)

    def test_extremal_sharpness(self):
        # max density over the zero set is floor(n^2/4)/C(n,2), attained by a
        # complete bipartite graph
        for n in (4, 5, 6):
            best = Fraction(0)
            for mask in a_free_masks(n, K3):
                best = max(best, Fraction(bin(mask).count("1"), num_pairs(n)))
            assert best == Fraction((n * n) // 4, num_pairs(n))


class TestErrScaling:
    def test_scaled_err_bounded_across_n(self):
        consts = []
        for n in (4, 5, 6):
            report = verify_mantel_flag_sos(n)
            consts.append(report["err_constant"])
        cap = consts[0]
        assert all(c <= cap for c in consts)
        assert cap == Fraction(8, 9)
