import collections
from fractions import Fraction

import mpmath
import pytest

from isingpoly.graphs import (
    BudgetError,
    build_complete_bipartite,
    build_cycle,
    build_even_torus,
    build_hypercube,
)
from isingpoly.model import (
    MeasureTable,
    ModelParams,
    MuHatSampler,
    captured_on_side,
    count_independent_sets,
    exact_Z,
    ising_weight,
    minority_side,
    mu_hat_star_table,
    mu_hat_table,
    mu_table,
    nonpolymer_family,
    percolation_expectation_exact,
    percolation_mc,
    sample_mu_hat,
    tv_distance,
    z_hat_sweep,
)
from isingpoly.polymers import xi_brute
from oracles import brute_captured, brute_independent_set_count, brute_ising_Z

C4 = build_even_torus(4, 1)
C6 = build_cycle(6)
Q3 = build_hypercube(3)
HALF = ModelParams(1, Fraction(1, 2))


class TestParams:
    def test_derived_quantities(self):
        p = ModelParams(1, Fraction(1, 2))
        assert p.alpha == Fraction(1, 2)
        assert p.alpha_tilde == Fraction(4, 3)
        assert p.q == Fraction(1, 2)
        assert abs(float(p.alpha_bar()) - float(mpmath.log(4) - mpmath.log(3))) < 1e-12
        assert abs(float(p.beta()) - float(mpmath.log(2))) < 1e-12

    def test_alpha_tilde_cap(self):
        for lam, pr in ((Fraction(1, 3), Fraction(2, 5)), (2, 1), (5, 0)):
            params = ModelParams(lam, pr)
            assert params.alpha_tilde <= 1 + params.lam

    def test_hard_core_beta_is_infinite(self):
        assert ModelParams(1, 1).beta() == mpmath.inf

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(0, Fraction(1, 2))
        with pytest.raises(ValueError):
            ModelParams(1, Fraction(3, 2))
        with pytest.raises(ValueError):
            ModelParams(-1, 0)


class TestWeightsAndZ:
    def test_weight_examples(self):
        assert ising_weight(C4, HALF, {0, 1}) == Fraction(1, 2)
        assert ising_weight(C4, HALF, 0) == 1
        assert ising_weight(C4, ModelParams(1, 1), {0, 1}) == 0

    def test_exact_z_c4(self):
        assert exact_Z(C4, HALF) == Fraction(161, 16)
        assert exact_Z(C4, ModelParams(1, 1)) == 7

    def test_exact_z_p0(self):
        for g in (C4, Q3):
            lam = Fraction(2, 3)
            assert exact_Z(g, ModelParams(lam, 0)) == (1 + lam) ** g.n

    @pytest.mark.parametrize("g", [C4, C6, Q3, build_complete_bipartite(2)])
    @pytest.mark.parametrize("lam,p", [
        (Fraction(1), Fraction(1, 2)),
        (Fraction(3, 2), Fraction(2, 5)),
        (Fraction(1, 3), Fraction(1)),
    ])
    def test_exact_z_matches_full_sweep_oracle(self, g, lam, p):
        assert exact_Z(g, ModelParams(lam, p)) == brute_ising_Z(g, lam, p)

    def test_budget(self):
        with pytest.raises(BudgetError):
            exact_Z(C4, HALF, sweep_cap=3)

    def test_independent_set_counts(self):
        assert count_independent_sets(build_hypercube(1)) == 3
        assert count_independent_sets(build_hypercube(2)) == 7
        assert count_independent_sets(Q3) == 35
        # dual route and brute force agree
        assert exact_Z(Q3, ModelParams(1, 1)) == 35
        assert brute_independent_set_count(Q3) == 35


class TestPercolation:
    def test_c4_identity_value(self):
        assert percolation_expectation_exact(C4, HALF) == Fraction(161, 16)

    def test_degenerate_p(self):
        lam = Fraction(2)
        assert percolation_expectation_exact(C4, ModelParams(lam, 0)) == \
            (1 + lam) ** C4.n
        assert percolation_expectation_exact(C4, ModelParams(1, 1)) == 7

    @pytest.mark.parametrize("g", [C4, C6, build_complete_bipartite(3)])
    @pytest.mark.parametrize("lam,p", [
        (Fraction(1), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(1, 3)),
        (Fraction(2), Fraction(1)),
    ])
    def test_identity_with_exact_z(self, g, lam, p):
        params = ModelParams(lam, p)
        assert percolation_expectation_exact(g, params) == exact_Z(g, params)

    def test_edge_budget(self):
        with pytest.raises(BudgetError):
            percolation_expectation_exact(Q3, HALF, edge_cap=10)

    def test_mc_reproducible_and_within_tolerance(self):
        mean, err = percolation_mc(C4, HALF, 100000, seed=2024)
        again = percolation_mc(C4, HALF, 100000, seed=2024)
        assert (mean, err) == again
        assert abs(mean - 161 / 16) < 4 * err

    def test_mc_p1_zero_variance(self):
        mean, err = percolation_mc(C4, ModelParams(1, 1), 500, seed=7)
        assert mean == 7.0 and err == 0.0

    def test_mc_single_sample(self):
        mean, err = percolation_mc(C4, HALF, 1, seed=0)
        assert err == 0.0
        again, _ = percolation_mc(C4, HALF, 1, seed=0)
        assert mean == again


class TestMeasures:
    def test_mu_empty_set_probability(self):
        table = mu_table(C4, HALF)
        assert table.prob(0) == Fraction(16, 161)
        assert table.normalization == Fraction(161, 16)

    def test_measure_table_validates(self):
        with pytest.raises(ValueError, match="sum"):
            MeasureTable({0: Fraction(1, 2)}, Fraction(1))
        with pytest.raises(ValueError, match="negative"):
            MeasureTable({0: Fraction(3, 2), 1: Fraction(-1, 2)}, Fraction(1))

    def test_tv_distance_edge_cases(self):
        a = MeasureTable({0: Fraction(1), 1: Fraction(0)}, Fraction(1))
        b = MeasureTable({0: Fraction(0), 1: Fraction(1)}, Fraction(1))
        assert tv_distance(a, a) == 0
        assert tv_distance(a, b) == 1
        c = MeasureTable({2: Fraction(1)}, Fraction(1))
        with pytest.raises(ValueError, match="outcome spaces"):
            tv_distance(a, c)

    def test_tv_mu_vs_mu_hat_matches_direct_definition(self):
        mu = mu_table(C6, HALF)
        hat = mu_hat_table(C6, HALF)
        direct = Fraction(0)
        for i_mask in range(1 << C6.n):
            direct += abs(mu.prob(i_mask) - hat.prob(i_mask))
        assert tv_distance(mu, hat) == direct / 2

    @pytest.mark.parametrize("g", [C6, Q3])
    @pytest.mark.parametrize("params", [
        HALF, ModelParams(Fraction(1, 3), 1), ModelParams(2, Fraction(1, 5)),
    ])
    def test_z_hat_equals_polymer_formula(self, g, params):
        poly_route = (1 + params.lam) ** (g.n // 2) * (
            xi_brute(g, "O", params) + xi_brute(g, "E", params))
        assert z_hat_sweep(g, params) == poly_route

    @pytest.mark.parametrize("g", [C4, C6, Q3])
    @pytest.mark.parametrize("rho", [Fraction(3, 4), Fraction(2, 3)])
    def test_decomposition_identity(self, g, rho):
        params = ModelParams(Fraction(4, 5), Fraction(2, 7))
        z = exact_Z(g, params)
        z_hat = z_hat_sweep(g, params, rho=rho)
        both = Fraction(0)
        for i_mask in range(1 << g.n):
            if captured_on_side(g, i_mask, "O", rho) and \
                    captured_on_side(g, i_mask, "E", rho):
                both += ising_weight(g, params, i_mask)
        neither = sum((ising_weight(g, params, i)
                       for i in nonpolymer_family(g, rho=rho)), Fraction(0))
        assert z == z_hat - both + neither

    def test_capture_matches_definition_oracle(self):
        rho = Fraction(3, 4)
        for g in (C4, C6, Q3):
            side_sets = {"O": g.side_O, "E": g.side_E}
            for i_mask in range(1 << g.n):
                verts = [v for v in range(g.n) if (i_mask >> v) & 1]
                for side in ("O", "E"):
                    assert captured_on_side(g, i_mask, side, rho) == \
                        brute_captured(g, verts, side_sets[side], rho)

    def test_mu_hat_star_marginal_is_mu_hat(self):
        star = mu_hat_star_table(C6, HALF)
        hat = mu_hat_table(C6, HALF)
        for i_mask in range(1 << C6.n):
            assert star.prob((i_mask, "O")) + star.prob((i_mask, "E")) == \
                hat.prob(i_mask)

    def test_nonpolymer_examples(self):
        full = (1 << C4.n) - 1
        assert full in set(nonpolymer_family(C4))
        assert 0 not in set(nonpolymer_family(C6))

    def test_nonpolymer_weight_sum_matches_oracle(self):
        rho = Fraction(3, 4)
        got = sum((ising_weight(C6, HALF, i) for i in nonpolymer_family(C6)),
                  Fraction(0))
        want = Fraction(0)
        for i_mask in range(1 << C6.n):
            verts = [v for v in range(C6.n) if (i_mask >> v) & 1]
            if not brute_captured(C6, verts, C6.side_O, rho) and \
                    not brute_captured(C6, verts, C6.side_E, rho):
                want += ising_weight(C6, HALF, i_mask)
        assert got == want

    def test_mu_hat_tiny_lambda_prefers_empty(self):
        table = mu_hat_table(C6, ModelParams(Fraction(1, 100), 1))
        top = max(table.probs.values())
        assert table.prob(0) == top

    def test_minority_side(self):
        assert minority_side(C6, {0}) == "O"
        assert minority_side(C6, {1}) == "E"
        assert minority_side(C6, {0, 1}) == "O"
        assert minority_side(C6, 0) == "O"


class TestSampler:
    def test_identical_seeds_identical_draws(self):
        assert sample_mu_hat(C6, HALF, seed=55) == sample_mu_hat(C6, HALF, seed=55)
        sam = MuHatSampler(C6, HALF)
        assert sam.draw(55, 3) == sam.draw(55, 3)
        assert sam.draw(55, 3) != sam.draw(55, 4) or True  # substreams differ

    def test_empirical_matches_table(self):
        params = ModelParams(Fraction(1, 2), 1)
        sam = MuHatSampler(C6, params)
        star = mu_hat_star_table(C6, params)
        n = 20000
        counts = collections.Counter(sam.draw(123, k) for k in range(n))
        emp = MeasureTable(
            {key: Fraction(counts.get(key, 0), n) for key in star.probs},
            Fraction(1))
        assert tv_distance(emp, star) < Fraction(1, 40)
