import numpy as np
import pytest

from attnmech import (
    CostFunction,
    ManageInfeasibleError,
    allocation_rule,
    attention_weights,
    conservatism,
    efficiency_report,
    garble,
    hype,
    make_grid,
    manage_attention_floor,
    manage_the_process,
    perfect_perception,
    probability_weighting,
    sell_the_firm,
    threshold_rule,
    uniform_prior,
    value_of_attention,
    welfare_bounds,
)
from attnmech.efficiency import (
    REGIME_DISTORTED,
    REGIME_MANAGE,
    REGIME_SELL_ATTENTIVE,
    extract_threshold,
    inattentive_welfare,
)
from attnmech.screening import fold_kernel, rho_u

LINEAR_QUARTER = CostFunction.linear(0.25)
QUADRATIC = CostFunction.quadratic()


@pytest.fixture(scope="module")
def probweight_report():
    grid = make_grid(2000)
    pgp = probability_weighting(0.5, uniform_prior(grid))
    return pgp, efficiency_report(pgp, LINEAR_QUARTER)


class TestSellTheFirm:
    def test_linear_cost_threshold(self, uniform2000):
        mech = sell_the_firm(LINEAR_QUARTER, uniform2000)
        assert extract_threshold(mech.rule) == pytest.approx(0.25, abs=1e-3)

    def test_quadratic_cost_identity_rule(self, uniform2000, grid2000):
        mech = sell_the_firm(QUADRATIC, uniform2000)
        assert np.allclose(mech.rule.q, grid2000.midpoints)
        # Transfers reproduce the production cost on the grid.
        assert np.max(np.abs(mech.transfers - QUADRATIC(mech.rule.q))) < 1e-12

    def test_free_provision(self, uniform2000):
        mech = sell_the_firm(CostFunction.linear(0.0), uniform2000)
        assert np.allclose(mech.rule.q, 1.0)
        assert np.max(np.abs(mech.transfers)) < 1e-12


class TestManageTheProcess:
    def test_probweight_linear_threshold_at_half(self, uniform2000):
        # argmax e*x - x/4 switches where the posterior mean crosses 1/4,
        # i.e. at perception 1/2.
        pgp = probability_weighting(0.5, uniform2000)
        mech = manage_the_process(pgp, LINEAR_QUARTER)
        assert extract_threshold(mech.rule) == pytest.approx(0.5, abs=1e-3)

    def test_hype_quadratic_infeasible(self, uniform2000):
        pgp = hype(0.5, uniform2000)
        with pytest.raises(ManageInfeasibleError) as exc:
            manage_the_process(pgp, QUADRATIC)
        assert exc.value.cell_hi == 1999  # posterior mean drops at the top

    def test_perfect_matches_sell(self, uniform2000):
        pgp = perfect_perception(uniform2000)
        managed = manage_the_process(pgp, QUADRATIC)
        sold = sell_the_firm(QUADRATIC, uniform2000)
        assert np.allclose(managed.rule.q, sold.rule.q)

    def test_achieves_inattentive_bound(self, uniform2000):
        pgp = conservatism(0.5, uniform2000)
        mech = manage_the_process(pgp, QUADRATIC)
        _, w_i, _ = welfare_bounds(pgp, QUADRATIC)
        assert inattentive_welfare(mech.rule, pgp, QUADRATIC) == pytest.approx(w_i, abs=1e-12)

    def test_completion_minimizes_attention(self, uniform2000):
        # The returned completion is the attention floor among completions
        # that keep the support cells fixed; the flat completion of the fold
        # scenario is one such candidate.
        pgp = rho_u(2000)
        cost = CostFunction.from_callable(lambda x: x * x / 4 + 3 * x / 8, 201)
        floor = manage_attention_floor(pgp, cost)
        assert floor == pytest.approx(21 / 512, abs=1e-4)


class TestWelfareBounds:
    def test_probweight_linear(self, uniform2000):
        w_a, w_i, gap = welfare_bounds(probability_weighting(0.5, uniform2000), LINEAR_QUARTER)
        assert w_a == pytest.approx(9 / 32, abs=1e-3)
        assert w_i == pytest.approx(9 / 32, abs=1e-3)

    def test_perfect_gap_zero(self, uniform2000):
        _, _, gap = welfare_bounds(perfect_perception(uniform2000), QUADRATIC)
        assert abs(gap) < 1e-12

    def test_conservatism_quadratic_invertible(self, uniform2000):
        # The shrinkage map is invertible, so managed inattention loses no
        # welfare: both bounds equal 1/6 and the gap vanishes.
        w_a, w_i, gap = welfare_bounds(conservatism(0.5, uniform2000), QUADRATIC)
        assert w_a == pytest.approx(1 / 6, abs=1e-6)
        assert w_i == pytest.approx(1 / 6, abs=1e-6)
        assert abs(gap) < 1e-6

    def test_gap_nonnegative(self, uniform2000, rng):
        for pgp in (
            probability_weighting(2.0, uniform2000),
            hype(0.5, uniform2000),
            conservatism(0.3, uniform2000),
        ):
            _, _, gap = welfare_bounds(pgp, QUADRATIC)
            assert gap >= -1e-12


class TestAttentionFloor:
    def test_probweight_example(self, probweight_report):
        pgp, report = probweight_report
        assert report.kappa_i == pytest.approx(1 / 32, abs=1e-4)
        assert manage_attention_floor(pgp, LINEAR_QUARTER) == pytest.approx(
            report.kappa_i
        )

    def test_perfect_floor_zero(self, uniform2000):
        assert manage_attention_floor(perfect_perception(uniform2000), QUADRATIC) == pytest.approx(
            0.0, abs=1e-12
        )


class TestOptimalMechanism:
    def test_bounds(self, probweight_report):
        _, report = probweight_report
        assert report.w_a_star == pytest.approx(9 / 32, abs=1e-3)
        assert report.w_i_star == pytest.approx(9 / 32, abs=1e-3)
        assert report.kappa_star == pytest.approx(0.0, abs=1e-6)

    def test_regime_switch_at_one_sixty_fourth(self, probweight_report):
        # The attentive branch 9/32 - kappa meets the constrained inattentive
        # value 1/4 + kappa at kappa = 1/64. (A pure threshold family would
        # cross later, at 9/512, but two-step menus dominate thresholds at
        # every bound attention level here.)
        _, report = probweight_report
        assert report.kappa_bar == pytest.approx(1 / 64, abs=1e-4)

    def test_distorted_branch_value(self, probweight_report):
        _, report = probweight_report
        for kappa in (0.018, 0.025, 0.030):
            opt = report.optimal(kappa)
            assert opt.regime == REGIME_DISTORTED
            assert opt.welfare == pytest.approx(0.25 + kappa, abs=1e-4)
            assert opt.nu == pytest.approx(kappa, abs=1e-7)

    def test_two_step_beats_pure_threshold(self, probweight_report):
        # At matched attention value 0.025, the optimal two-step menu clears
        # 0.275 while the best pure threshold only reaches ~0.2720.
        pgp, report = probweight_report
        kappa = 0.025
        opt = report.optimal(kappa)
        assert opt.welfare >= 0.2745
        grid = pgp.grid
        p = 0.33747  # low root of the threshold attention equation
        pure = threshold_rule(grid, int(round(p * grid.n)))
        assert inattentive_welfare(pure, pgp, LINEAR_QUARTER) < opt.welfare - 2e-3

    def test_distorted_rule_shape(self, probweight_report):
        # Optimal menu: full provision above 1/2, level 1 - 32*kappa below.
        pgp, report = probweight_report
        kappa = 0.025
        q = report.optimal(kappa).mechanism.rule.q
        m = pgp.grid.midpoints
        assert np.max(np.abs(q[m > 0.51] - 1.0)) < 1e-6
        low = q[(m > 0.05) & (m < 0.49)]
        assert np.max(np.abs(low - (1 - 32 * kappa))) < 1e-3

    def test_attentive_branch(self, probweight_report):
        _, report = probweight_report
        for kappa in (0.0, 0.01):
            opt = report.optimal(kappa)
            assert opt.regime == REGIME_SELL_ATTENTIVE
            assert opt.welfare == pytest.approx(report.w_a_star - kappa)
            assert opt.threshold == pytest.approx(0.25, abs=1e-3)

    def test_manage_branch(self, probweight_report):
        _, report = probweight_report
        opt = report.optimal(0.05)
        assert opt.regime == REGIME_MANAGE
        assert opt.welfare == pytest.approx(report.w_i_star)

    def test_welfare_continuous_at_boundaries(self, probweight_report):
        _, report = probweight_report
        for cutoff in (report.kappa_bar, report.kappa_i):
            around = [report.welfare(cutoff + d) for d in (-1e-6, 0.0, 1e-6)]
            assert max(around) - min(around) < 1e-4

    def test_infeasible_manage_falls_back_to_sell(self, uniform2000):
        report = efficiency_report(hype(0.5, uniform2000), QUADRATIC)
        assert not report.manage_feasible
        assert report.kappa_i is None
        low = report.optimal(report.kappa_star / 2)
        assert low.regime == REGIME_SELL_ATTENTIVE
        high = report.optimal(report.kappa_star + 0.01)
        assert high.regime == "SellFirm-Inattentive"


class TestUnbiasedAlignment:
    def test_sell_value_equals_gap_and_welfare_monotone(self, grid2000, uniform2000):
        pgp = garble(fold_kernel(grid2000), uniform2000)
        w_a, w_i, kappa_star = welfare_bounds(pgp, QUADRATIC)
        sell = sell_the_firm(QUADRATIC, uniform2000)
        assert value_of_attention(sell.rule, pgp) == pytest.approx(kappa_star, abs=1e-8)
        report = efficiency_report(pgp, QUADRATIC)
        welfare = [report.welfare(k) for k in np.linspace(0, 2 * kappa_star + 0.01, 20)]
        assert np.all(np.diff(welfare) <= 1e-12)


class TestSellFirmGap:
    def test_biased_quadratic_identity(self, grid2000, uniform2000):
        pgp = conservatism(0.5, uniform2000)
        _, w_i, _ = welfare_bounds(pgp, QUADRATIC)
        sell = sell_the_firm(QUADRATIC, uniform2000)
        realized = inattentive_welfare(sell.rule, pgp, QUADRATIC)
        predicted = -0.5 * float(
            ((grid2000.midpoints - pgp.posterior_mean) ** 2) @ pgp.perceived_pmf
        )
        assert realized - w_i == pytest.approx(predicted, abs=1e-6)


class TestExtractThreshold:
    def test_exact_threshold(self, grid2000):
        assert extract_threshold(threshold_rule(grid2000, 500)) == pytest.approx(0.25)

    def test_interpolated_threshold(self, grid2000):
        q = np.zeros(2000)
        q[700:] = 1.0
        q[699] = 0.4
        rule = allocation_rule(grid2000, q)
        assert extract_threshold(rule) == pytest.approx(0.35 - 0.4 / 2000, abs=1e-12)

    def test_ramp_is_not_threshold(self, grid2000):
        rule = allocation_rule(grid2000, grid2000.midpoints)
        assert extract_threshold(rule) is None

    def test_degenerate_rules(self, grid2000):
        assert extract_threshold(allocation_rule(grid2000, np.zeros(2000))) == 1.0
        assert extract_threshold(allocation_rule(grid2000, np.ones(2000))) == 0.0
