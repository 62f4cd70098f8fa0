import numpy as np
import pytest

from attnmech import (
    CostFunction,
    InvalidDistributionError,
    InvalidGridError,
    InvalidPgpError,
    KernelError,
    MonotonicityError,
    allocation_rule,
    attentive_utility,
    builtin_pgp,
    conservatism,
    constant_rule,
    envelope_mechanism,
    fictitious_information,
    garble,
    hype,
    inattentive_utility,
    is_unbiased,
    make_grid,
    perfect_perception,
    point_prior,
    pool_kernel,
    prelec_weighting,
    probability_weighting,
    threshold_rule,
    type_dist,
    uniform_prior,
)
from attnmech.model import ic_slack, integrated_allocation


class TestGrid:
    def test_n4_layout(self):
        g = make_grid(4)
        assert np.allclose(g.boundaries, [0, 0.25, 0.5, 0.75, 1.0])
        assert np.allclose(g.midpoints, [0.125, 0.375, 0.625, 0.875])

    def test_n2_midpoints(self):
        g = make_grid(2)
        assert np.allclose(g.midpoints, [0.25, 0.75])

    def test_too_small_rejected(self):
        with pytest.raises(InvalidGridError):
            make_grid(1)

    def test_cell_of_boundary_goes_up(self):
        g = make_grid(4)
        assert g.cell_of(0.25) == 1
        assert g.cell_of(1.0) == 3
        assert g.cell_of(0.0) == 0


class TestTypeDist:
    def test_uniform(self):
        d = uniform_prior(make_grid(4))
        assert np.allclose(d.pmf, 0.25)
        assert d.cdf[2] == pytest.approx(0.5)

    def test_uniform_mean(self):
        d = uniform_prior(make_grid(1000))
        assert d.mean == pytest.approx(0.5, abs=1e-12)

    def test_point_prior(self):
        d = point_prior(make_grid(4), 0.6)
        assert d.pmf[2] == 1.0

    def test_bad_pmf(self):
        g = make_grid(4)
        with pytest.raises(InvalidDistributionError):
            type_dist(g, [0.5, 0.5, 0.5, 0.5])
        with pytest.raises(InvalidDistributionError):
            type_dist(g, [1.5, -0.5, 0, 0])


class TestBuiltinPgps:
    def test_perfect_is_identity(self, grid2000, uniform2000):
        pgp = perfect_perception(uniform2000)
        assert np.array_equal(pgp.kernel, np.eye(2000))
        assert np.array_equal(pgp.perceived_pmf, uniform2000.pmf)
        assert np.array_equal(pgp.posterior_mean, grid2000.midpoints)

    def test_conservatism_posterior_mean(self, grid2000, uniform2000):
        # Inverting pi = theta/2 + 1/4 gives theta = 2*pi - 1/2 on [1/4, 3/4].
        pgp = conservatism(0.5, uniform2000)
        m = grid2000.midpoints
        sup = pgp.support
        assert np.all(m[sup] >= 0.25 - 1e-9) and np.all(m[sup] <= 0.75 + 1e-9)
        assert np.max(np.abs(pgp.posterior_mean[sup] - (2 * m[sup] - 0.5))) < 1e-12

    def test_conservatism_rows_one_hot(self, uniform2000):
        # The map is grid-aligned for n % 4 == 0, so rows stay deterministic.
        pgp = conservatism(0.5, uniform2000)
        assert np.all(np.isin(np.round(pgp.kernel, 12), [0.0, 1.0]))
        assert np.allclose(pgp.kernel.max(axis=1), 1.0)

    def test_probweight_posterior_mean(self, grid2000, uniform2000):
        pgp = probability_weighting(0.5, uniform2000)
        m = grid2000.midpoints
        sup = pgp.support & (m >= 0.05)
        assert np.max(np.abs(pgp.posterior_mean[sup] - m[sup] ** 2)) < 5e-4

    def test_hype_top_posterior(self, uniform2000):
        pgp = hype(0.5, uniform2000)
        assert pgp.posterior_mean[-1] == pytest.approx(0.5, abs=1e-3)

    def test_hype_mixes_identity_and_top(self, uniform2000):
        pgp = hype(0.25, uniform2000)
        assert pgp.kernel[10, 10] == pytest.approx(0.75)
        assert pgp.kernel[10, -1] == pytest.approx(0.25)

    def test_fictitious(self, uniform2000):
        pgp = fictitious_information(uniform2000)
        assert np.allclose(pgp.perceived_pmf, 1 / 2000)
        assert np.allclose(pgp.posterior_mean, 0.5)

    def test_prelec_monotone_images(self, uniform2000):
        pgp = prelec_weighting(0.65, 1.0, uniform2000)
        sup = pgp.support
        assert np.all(np.diff(pgp.posterior_mean[sup]) > -1e-9)

    def test_param_validation(self, uniform2000):
        with pytest.raises(InvalidPgpError):
            probability_weighting(0.0, uniform2000)
        with pytest.raises(InvalidPgpError):
            conservatism(1.0, uniform2000)
        with pytest.raises(InvalidPgpError):
            hype(1.5, uniform2000)
        with pytest.raises(InvalidPgpError):
            prelec_weighting(-1.0, 1.0, uniform2000)

    def test_garble_rejects_nonstochastic(self):
        prior = uniform_prior(make_grid(4))
        with pytest.raises(KernelError):
            garble(np.full((4, 4), 0.3), prior)
        with pytest.raises(KernelError):
            garble(np.ones((3, 3)) / 3, prior)

    def test_builtin_dispatch(self, uniform2000):
        pgp = builtin_pgp("conservatism", {"alpha": 0.5}, uniform2000)
        assert not is_unbiased(pgp)
        with pytest.raises(InvalidPgpError):
            builtin_pgp("nope", {}, uniform2000)

    def test_iterated_expectations(self, uniform2000):
        builders = [
            perfect_perception(uniform2000),
            conservatism(0.5, uniform2000),
            probability_weighting(0.5, uniform2000),
            probability_weighting(2.0, uniform2000),
            hype(0.3, uniform2000),
            fictitious_information(uniform2000),
        ]
        for pgp in builders:
            lhs = float(pgp.perceived_pmf @ pgp.posterior_mean)
            assert lhs == pytest.approx(uniform2000.mean, abs=1e-10)


class TestIsUnbiased:
    def test_perfect(self, uniform2000):
        assert is_unbiased(perfect_perception(uniform2000))

    def test_conservatism_biased(self, uniform2000):
        assert not is_unbiased(conservatism(0.5, uniform2000))

    def test_pooling_garble_unbiased(self, grid2000, uniform2000):
        kernel = pool_kernel(grid2000, [5] * 400)
        assert is_unbiased(garble(kernel, uniform2000))

    def test_pool_kernel_validation(self, grid2000):
        with pytest.raises(KernelError):
            pool_kernel(grid2000, [4] * 500)  # even blocks
        with pytest.raises(KernelError):
            pool_kernel(grid2000, [5] * 10)  # wrong total

    def test_unbiased_mean_preserving_spread(self, grid2000, uniform2000):
        # Tail integrals of the perceived CDF dominate the prior's.
        kernel = pool_kernel(grid2000, [25] * 80)
        pgp = garble(kernel, uniform2000)
        width = grid2000.width
        tail_perc = np.cumsum((0.5 * (pgp.perceived_cdf[:-1] + pgp.perceived_cdf[1:]) * width)[::-1])[::-1]
        tail_true = np.cumsum((0.5 * (pgp.prior.cdf[:-1] + pgp.prior.cdf[1:]) * width)[::-1])[::-1]
        assert np.min(tail_perc - tail_true) >= -2 / grid2000.n


class TestMechanism:
    def test_constant_rule_zero_transfers(self, grid2000):
        mech = envelope_mechanism(constant_rule(grid2000, 0.4))
        assert np.max(np.abs(mech.transfers)) < 1e-15

    def test_threshold_transfer_is_cutoff(self, grid2000):
        mech = envelope_mechanism(threshold_rule(grid2000, 1000))
        above = grid2000.midpoints > 0.5
        assert np.max(np.abs(mech.transfers[above] - 0.5)) < 1e-12
        assert np.max(np.abs(mech.transfers[~above])) < 1e-15

    def test_identity_rule_transfers(self, grid2000):
        mech = envelope_mechanism(allocation_rule(grid2000, grid2000.midpoints))
        m = grid2000.midpoints
        assert np.max(np.abs(mech.transfers - m**2 / 2)) < 1e-6

    def test_monotonicity_enforced(self, grid2000):
        q = np.linspace(1, 0, 2000)
        with pytest.raises(MonotonicityError):
            allocation_rule(grid2000, q)
        with pytest.raises(MonotonicityError):
            allocation_rule(grid2000, np.full(2000, 1.5))

    def test_discrete_ic_holds(self, rng):
        grid = make_grid(300)
        for _ in range(20):
            rule = allocation_rule(grid, np.sort(rng.uniform(0, 1, 300)))
            mech = envelope_mechanism(rule, outside_utility=rng.normal())
            assert ic_slack(mech) <= 1e-12

    def test_envelope_round_trip_bitwise(self, grid2000, rng):
        rule = allocation_rule(grid2000, np.sort(rng.uniform(0, 1, 2000)))
        mech = envelope_mechanism(rule, outside_utility=0.123)
        again = envelope_mechanism(mech.rule, outside_utility=mech.outside_utility)
        assert np.array_equal(mech.transfers, again.transfers)

    def test_integrated_allocation_partial_cell(self):
        grid = make_grid(4)
        rule = constant_rule(grid, 1.0)
        assert np.allclose(integrated_allocation(rule), grid.midpoints)


class TestUtilities:
    def test_perfect_pgp_equal_utilities(self, grid2000, uniform2000, rng):
        pgp = perfect_perception(uniform2000)
        rule = allocation_rule(grid2000, np.sort(rng.uniform(0, 1, 2000)))
        mech = envelope_mechanism(rule)
        assert attentive_utility(mech, uniform2000) == pytest.approx(
            inattentive_utility(mech, pgp), abs=1e-12
        )

    def test_attentive_dominates_inattentive(self, rng):
        grid = make_grid(150)
        prior = uniform_prior(grid)
        for _ in range(25):
            kernel = rng.random((150, 150)) + 1e-9
            kernel /= kernel.sum(axis=1, keepdims=True)
            pgp = garble(kernel, prior)
            rule = allocation_rule(grid, np.sort(rng.uniform(0, 1, 150)))
            mech = envelope_mechanism(rule)
            assert attentive_utility(mech, prior) >= inattentive_utility(mech, pgp) - 1e-9


class TestCostFunction:
    def test_linear_argmax(self):
        cost = CostFunction.linear(0.25)
        assert np.array_equal(cost.argmax_allocation([0.1, 0.25, 0.3]), [0.0, 0.0, 1.0])

    def test_quadratic_argmax(self):
        cost = CostFunction.quadratic()
        assert np.allclose(cost.argmax_allocation([-0.2, 0.4, 1.3]), [0.0, 0.4, 1.0])

    def test_tabulated_matches_quadratic(self):
        tab = CostFunction.from_callable(lambda x: 0.5 * x * x, 201)
        v = np.linspace(0, 1, 17)
        assert np.max(np.abs(tab.argmax_allocation(v) - np.clip(v, 0, 1))) <= 1 / 200 + 1e-12

    def test_gain(self):
        cost = CostFunction.quadratic()
        assert cost.gain([0.5])[0] == pytest.approx(0.125)

    def test_tabulated_needs_knots(self):
        with pytest.raises(InvalidDistributionError):
            CostFunction.tabulated([1.0])
