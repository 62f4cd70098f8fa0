import numpy as np
import pytest

from attnmech import (
    GridMismatchError,
    allocation_rule,
    attention_maximizers,
    attention_weights,
    conservatism,
    constant_rule,
    garble,
    make_grid,
    perfect_perception,
    probability_weighting,
    threshold_rule,
    type_dist,
    uniform_prior,
    value_of_attention,
    value_of_attention_direct,
)


def random_pgp(rng, grid, prior=None):
    n = grid.n
    kernel = rng.random((n, n)) ** 2 + 1e-9
    kernel /= kernel.sum(axis=1, keepdims=True)
    if prior is None:
        pmf = rng.random(n) + 1e-3
        prior = type_dist(grid, pmf / pmf.sum())
    return garble(kernel, prior)


def random_rule(rng, grid):
    return allocation_rule(grid, np.sort(rng.uniform(0, 1, grid.n)))


class TestWeights:
    def test_weights_sum_to_zero(self, rng):
        grid = make_grid(80)
        for _ in range(10):
            w = attention_weights(random_pgp(rng, grid)).w
            assert abs(w.sum()) < 1e-12

    def test_conservatism_density(self, uniform2000, grid2000):
        # Piecewise-linear density -pi, 1/2-pi, 1-pi with kinks at 1/4, 3/4.
        w = attention_weights(conservatism(0.5, uniform2000)).w * grid2000.n
        m = grid2000.midpoints
        target = np.where(m < 0.25, -m, np.where(m < 0.75, 0.5 - m, 1 - m))
        assert np.max(np.abs(w - target)) < 1e-12

    def test_probweight_density(self, uniform2000, grid2000):
        w = attention_weights(probability_weighting(0.5, uniform2000)).w * grid2000.n
        m = grid2000.midpoints
        target = 3 * m**2 - 2 * m**3 - m
        assert np.max(np.abs(w - target)[m >= 0.05]) < 5e-4

    def test_perfect_weights_vanish(self, uniform2000):
        w = attention_weights(perfect_perception(uniform2000)).w
        assert np.max(np.abs(w)) < 1e-15


class TestValueOfAttention:
    def test_constant_rule_is_zero(self, rng):
        grid = make_grid(60)
        for _ in range(10):
            pgp = random_pgp(rng, grid)
            assert abs(value_of_attention(constant_rule(grid, rng.uniform(0, 1)), pgp)) < 1e-12

    def test_nonnegative_on_monotone_rules(self, rng):
        grid = make_grid(60)
        for _ in range(50):
            pgp = random_pgp(rng, grid)
            assert value_of_attention(random_rule(rng, grid), pgp) >= -1e-9

    def test_matches_direct_definition(self, rng):
        grid = make_grid(50)
        worst = 0.0
        for _ in range(300):
            pgp = random_pgp(rng, grid)
            rule = random_rule(rng, grid)
            worst = max(
                worst,
                abs(value_of_attention(rule, pgp) - value_of_attention_direct(rule, pgp)),
            )
        assert worst <= 1e-10

    def test_perfect_pgp_zero_for_any_rule(self, uniform2000, grid2000, rng):
        pgp = perfect_perception(uniform2000)
        assert value_of_attention(random_rule(rng, grid2000), pgp) == pytest.approx(0.0, abs=1e-12)

    def test_identity_rule_quadratic_form(self, uniform2000, grid2000):
        # For q(pi) = pi the value equals half the mean squared perception gap.
        pgp = probability_weighting(0.5, uniform2000)
        rule = allocation_rule(grid2000, grid2000.midpoints)
        m = grid2000.midpoints
        mu = pgp.joint_mass()
        direct = float(np.sum(mu * (m[:, None] - m[None, :]) ** 2 / 2))
        assert value_of_attention_direct(rule, pgp) == pytest.approx(direct, abs=1e-9)

    def test_grid_mismatch(self, uniform2000, rng):
        pgp = perfect_perception(uniform2000)
        small = make_grid(10)
        with pytest.raises(GridMismatchError):
            value_of_attention(constant_rule(small, 0.5), pgp)

    def test_binary_perception_bound(self, rng):
        # Kernel splitting all mass between the extreme cells values every
        # non-constant rule strictly.
        grid = make_grid(40)
        prior = uniform_prior(grid)
        kernel = np.zeros((40, 40))
        kernel[:, 0] = 0.5
        kernel[:, -1] = 0.5
        pgp = garble(kernel, prior)
        for _ in range(20):
            rule = random_rule(rng, grid)
            if np.ptp(rule.q) < 1e-6:
                continue
            assert value_of_attention(rule, pgp) > 0


class TestMaximizers:
    def test_conservatism_pools(self, uniform2000):
        report = attention_maximizers(conservatism(0.5, uniform2000))
        assert report.max_value == pytest.approx(1 / 32, abs=1e-6)
        assert report.always_zero == (0, 500)
        assert report.always_one == (1500, 2000)

    def test_probweight_unique_cutoff(self, uniform2000):
        report = attention_maximizers(probability_weighting(0.5, uniform2000))
        assert report.max_value == pytest.approx(1 / 32, abs=1e-4)
        assert abs(int(report.argmax_cutoffs[0]) - 1000) <= 1
        assert len(report.argmax_cutoffs) <= 3

    def test_perfect_everything_maximizes(self, uniform2000):
        report = attention_maximizers(perfect_perception(uniform2000))
        assert report.max_value == pytest.approx(0.0, abs=1e-12)
        assert report.always_zero == (0, 0)
        assert report.always_one == (2000, 2000)

    def test_threshold_values_match_rules(self, rng):
        grid = make_grid(40)
        pgp = random_pgp(rng, grid)
        report = attention_maximizers(pgp)
        for k in range(0, 41, 7):
            direct = value_of_attention(threshold_rule(grid, k), pgp)
            assert report.threshold_values[k] == pytest.approx(direct, abs=1e-14)

    def test_positive_value_exists_when_imperfect(self, uniform2000, rng):
        # Biased or information-losing processes admit a rule with positive value.
        grid = make_grid(50)
        for _ in range(20):
            pgp = random_pgp(rng, grid)
            assert attention_maximizers(pgp).max_value > 0

    def test_edge_cells_pool_when_imperfect(self, uniform2000):
        for pgp in (conservatism(0.5, uniform2000), probability_weighting(2.0, uniform2000)):
            report = attention_maximizers(pgp)
            assert report.always_zero[1] > 0  # cell 0 always excluded
            assert report.always_one[0] < 2000  # top cell always served

    def test_block_improvement(self, rng):
        # Zeroing the low pool and saturating the high pool weakly helps.
        grid = make_grid(60)
        for _ in range(30):
            pgp = random_pgp(rng, grid)
            report = attention_maximizers(pgp)
            rule = random_rule(rng, grid)
            base = value_of_attention(rule, pgp)
            q = rule.q.copy()
            q[: report.always_zero[1]] = 0.0
            assert value_of_attention(allocation_rule(grid, q), pgp) >= base - 1e-12
            q = rule.q.copy()
            q[report.always_one[0] :] = 1.0
            assert value_of_attention(allocation_rule(grid, q), pgp) >= base - 1e-12
