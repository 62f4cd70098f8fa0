"""Acceptance criteria: one callable per criterion, shared by CLI and tests.

Each criterion function returns a CriterionResult with a pass flag and a
short detail string; ``run_all`` executes all ten. Tolerances are pinned
here, next to the checks that use them.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .accuracy import Ordering, agent_welfare, compare_accuracy
from .attention import (
    attention_maximizers,
    attention_weights,
    value_of_attention,
    value_of_attention_direct,
)
from .efficiency import (
    REGIME_DISTORTED,
    efficiency_report,
    inattentive_welfare,
    sell_the_firm,
    welfare_bounds,
)
from .model import (
    CostFunction,
    allocation_rule,
    envelope_mechanism,
    garble,
    inattentive_utility,
    make_grid,
    pool_kernel,
    probability_weighting,
    threshold_rule,
    uniform_prior,
)
from .model import conservatism as conservatism_pgp
from .model import hype as hype_pgp
from .optimize import (
    SeparableObjective,
    brute_force_monotone,
    maximize_monotone,
    maximize_with_attention_constraint,
)
from . import hype_pricing as hype_app
from . import screening as scr

N_DEFAULT = 2000


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, checks: list[tuple[str, bool]]) -> CriterionResult:
    failed = [label for label, ok in checks if not ok]
    if failed:
        return CriterionResult(name, False, "failed: " + "; ".join(failed))
    return CriterionResult(name, True, f"{len(checks)} checks")


def _random_monotone_rule(rng, grid):
    kind = rng.integers(0, 4)
    if kind == 0:
        return allocation_rule(grid, np.sort(rng.uniform(0.0, 1.0, grid.n)))
    if kind == 1:
        return threshold_rule(grid, int(rng.integers(0, grid.n + 1)))
    if kind == 2:
        return allocation_rule(grid, np.full(grid.n, rng.uniform(0.0, 1.0)))
    lo, hi = np.sort(rng.uniform(0.0, 1.0, 2))
    return allocation_rule(grid, np.clip(np.linspace(lo - 0.2, hi + 0.2, grid.n), 0.0, 1.0))


def criterion_01_representation_equivalence() -> CriterionResult:
    rng = np.random.default_rng(11)
    grid = make_grid(50)
    worst = 0.0
    for _ in range(1000):
        kernel = rng.random((50, 50)) ** 2 + 1e-9
        kernel /= kernel.sum(axis=1, keepdims=True)
        pmf = rng.random(50) + 1e-3
        pmf /= pmf.sum()
        from .model import type_dist

        pgp = garble(kernel, type_dist(grid, pmf))
        rule = _random_monotone_rule(rng, grid)
        err = abs(value_of_attention(rule, pgp) - value_of_attention_direct(rule, pgp))
        worst = max(worst, err)
    return _result(
        "01-representation-equivalence",
        [(f"max |repr - direct| = {worst:.2e} <= 1e-8", worst <= 1e-8)],
    )


def criterion_02_coarse_screening() -> CriterionResult:
    grid = make_grid(N_DEFAULT)
    pgp = conservatism_pgp(0.5, uniform_prior(grid))
    report = attention_maximizers(pgp)
    k_min = report.always_zero[1]
    k_max = report.always_one[0]
    checks = [
        (f"low pool ends at cell {k_min} ~ n/4", abs(k_min - N_DEFAULT // 4) <= 1),
        (f"high pool starts at cell {k_max} ~ 3n/4", abs(k_max - 3 * N_DEFAULT // 4) <= 1),
    ]
    return _result("02-coarse-screening", checks)


@functools.lru_cache(maxsize=1)
def _efficiency_example():
    grid = make_grid(N_DEFAULT)
    pgp = probability_weighting(0.5, uniform_prior(grid))
    cost = CostFunction.linear(0.25)
    return pgp, cost, efficiency_report(pgp, cost)


def criterion_03_efficiency_example() -> CriterionResult:
    _, _, report = _efficiency_example()
    checks = [
        (f"W_A* = {report.w_a_star:.6f} ~ 9/32", abs(report.w_a_star - 9 / 32) <= 1e-3),
        (f"W_I* = {report.w_i_star:.6f} ~ 9/32", abs(report.w_i_star - 9 / 32) <= 1e-3),
        (f"kappa_I = {report.kappa_i:.8f} ~ 1/32", abs(report.kappa_i - 1 / 32) <= 1e-4),
        (
            f"regime switch = {report.kappa_bar:.8f} ~ 9/512",
            abs(report.kappa_bar - 9 / 512) <= 1e-4,
        ),
    ]
    opt = report.optimal(0.025)
    ok_regime = opt.regime == REGIME_DISTORTED
    checks.append((f"kappa=0.025 regime {opt.regime}", ok_regime))
    if opt.threshold is not None:
        residual = abs(0.5 * opt.threshold**2 * (1 - opt.threshold) ** 2 - 0.025)
        checks.append((f"threshold equation residual {residual:.2e} <= 1e-6", residual <= 1e-6))
    else:
        checks.append(("optimal rule is a threshold", False))
    kappas = np.linspace(9 / 512 * 1.01, 1 / 32 * 0.99, 20)
    welfare = [report.welfare(k) for k in kappas]
    increasing = bool(np.all(np.diff(welfare) > 0))
    checks.append(("welfare strictly increasing on (9/512, 1/32)", increasing))
    return _result("03-efficiency-example", checks)


def criterion_04_sellfirm_gap() -> CriterionResult:
    grid = make_grid(N_DEFAULT)
    pgp = conservatism_pgp(0.5, uniform_prior(grid))
    cost = CostFunction.quadratic()
    _, w_i, _ = welfare_bounds(pgp, cost)
    sell = sell_the_firm(cost, pgp.prior)
    realized = inattentive_welfare(sell.rule, pgp, cost)
    predicted = -0.5 * float(
        ((grid.midpoints - pgp.posterior_mean) ** 2) @ pgp.perceived_pmf
    )
    err = abs((realized - w_i) - predicted)
    return _result(
        "04-sellfirm-gap-identity",
        [(f"|gap - (-E[(pi-e)^2]/2)| = {err:.2e} <= 1e-6", err <= 1e-6)],
    )


def _mixture_unbiased(n):
    grid = make_grid(n)
    kernel = 0.5 * np.eye(n) + 0.5 * scr.fold_kernel(grid)
    return garble(kernel, uniform_prior(grid))


def criterion_05_unbiased_alignment() -> CriterionResult:
    cost = CostFunction.quadratic()
    grid = make_grid(N_DEFAULT)
    pgps = {
        "fold": scr.rho_u(N_DEFAULT, "fold"),
        "pool5": garble(pool_kernel(grid, [5] * (N_DEFAULT // 5)), uniform_prior(grid)),
        "mix": _mixture_unbiased(N_DEFAULT),
    }
    checks = []
    for name, pgp in pgps.items():
        w_a, w_i, kappa_star = welfare_bounds(pgp, cost)
        sell = sell_the_firm(cost, pgp.prior)
        nu = value_of_attention(sell.rule, pgp)
        checks.append(
            (f"{name}: |nu(sell) - kappa*| = {abs(nu - kappa_star):.2e}", abs(nu - kappa_star) <= 1e-6)
        )
        report = efficiency_report(pgp, cost)
        kappas = np.linspace(0.0, 2 * kappa_star + 0.01, 20)
        welfare = [report.welfare(k) for k in kappas]
        checks.append((f"{name}: welfare nonincreasing", bool(np.all(np.diff(welfare) <= 1e-12))))
    return _result("05-unbiased-alignment", checks)


@functools.lru_cache(maxsize=4)
def _screening_quantities(variant: str):
    pgp_u = scr.rho_u(N_DEFAULT, variant)
    pgp_c = scr.rho_c(N_DEFAULT)
    grid = pgp_u.grid
    q_a = scr.attentive_benchmark_rule(grid)
    q_i = scr.inattentive_benchmark_rule(grid)
    w_u = attention_weights(pgp_u)
    w_c = attention_weights(pgp_c)
    th_u = scr.screening_thresholds(pgp_u, w_u)
    th_c = scr.screening_thresholds(pgp_c, w_c)
    out = {
        "profit_a": scr.attentive_profit(q_a),
        "profit_i": scr.inattentive_profit(envelope_mechanism(q_i), pgp_u),
        "nu_u_qa": value_of_attention(q_a, w_u),
        "nu_c_qa": value_of_attention(q_a, w_c),
        "nu_u_qi": value_of_attention(q_i, w_u),
        "nu_c_qi": value_of_attention(q_i, w_c),
        "k_lo_u": th_u.kappa_low,
        "k_hi_u": th_u.kappa_high,
        "k_lo_c": th_c.kappa_low,
        "k_hi_c": th_c.kappa_high,
    }
    for tag, kappa in (("U", 1 / 24), ("C", 1 / 64)):
        sol = scr.optimal_screening(
            scr.RHO_U if tag == "U" else scr.RHO_C, kappa, N_DEFAULT, variant
        )
        out[f"lam_{tag}"] = sol.multiplier
        out[f"profit_con_{tag}"] = sol.profit
    return out


def criterion_06_screening_constants() -> CriterionResult:
    tol = 1e-4
    targets = {
        "profit_a": 1 / 12,
        "profit_i": 9 / 128,
        "nu_u_qa": 1 / 32,
        "nu_c_qa": 1 / 96,
        "nu_u_qi": 21 / 512,
        "nu_c_qi": 3 / 512,
        "k_lo_u": 1 / 32,
        "k_hi_u": np.sqrt(2.5) / 96 + 1 / 32,
        "k_lo_c": 1 / 96,
        "k_hi_c": np.sqrt(2.5) / 96 + 1 / 96,
        "lam_U": 96 * (1 / 24) - 3,
        "lam_C": 96 * (1 / 64) - 1,
        "profit_con_U": 1 / 12 - (96 * (1 / 24) - 3) ** 2 / 192,
        "profit_con_C": 1 / 12 - (96 * (1 / 64) - 1) ** 2 / 192,
    }
    fold = _screening_quantities("fold")
    rebal = _screening_quantities("rebalanced")
    checks = []
    for key, target in targets.items():
        err = abs(fold[key] - target)
        checks.append((f"{key} = {fold[key]:.8f} ~ {target:.8f} (err {err:.1e})", err <= tol))
    drift = max(abs(fold[key] - rebal[key]) for key in targets)
    checks.append((f"kernel-variant drift {drift:.2e} <= 1e-4", drift <= 1e-4))

    # Closed-form rule against the constrained optimizer.
    pgp_u = scr.rho_u(N_DEFAULT, "fold")
    weights = attention_weights(pgp_u)
    sol = maximize_with_attention_constraint(
        scr.attentive_revenue_objective(pgp_u.grid), weights, 1 / 24
    )
    closed = scr.constrained_rule(pgp_u, 96 * (1 / 24) - 3)
    sup = float(np.max(np.abs(sol.rule.q - closed.q)))
    checks.append((f"solver vs closed form sup-norm {sup:.2e} <= 5/n", sup <= 5 / N_DEFAULT))
    return _result("06-screening-constants", checks)


def criterion_07_carrot_stick() -> CriterionResult:
    checks = []
    specs = [
        (scr.RHO_U, 1 / 32, np.sqrt(2.5) / 96 + 1 / 32, +1, 1 / 96),
        (scr.RHO_C, 1 / 96, np.sqrt(2.5) / 96 + 1 / 96, -1, 1 / 32),
    ]
    for tag, k_lo, k_hi, direction, v_i_level in specs:
        kappas = np.linspace(k_lo * 1.02, k_hi * 0.98, 50)
        sols = scr.carrot_stick_curves(tag, kappas, N_DEFAULT)
        v_a = np.array([s.v_attentive for s in sols])
        v_i = np.array([s.v_inattentive for s in sols])
        ok_a = bool(np.all(direction * np.diff(v_a) > 0))
        ok_i = bool(np.all(direction * np.diff(v_i) > 0))
        word = "increasing" if direction > 0 else "decreasing"
        checks.append((f"{tag}: V_A strictly {word}", ok_a))
        checks.append((f"{tag}: V_I strictly {word}", ok_i))
        low = scr.optimal_screening(tag, k_lo * 0.5, N_DEFAULT)
        checks.append(
            (f"{tag}: V_A level ~ 1/24", abs(low.v_attentive - 1 / 24) <= 1e-4)
        )
        checks.append(
            (f"{tag}: V_I level ~ {v_i_level:.6f}", abs(low.v_inattentive - v_i_level) <= 1e-4)
        )
    return _result("07-carrot-stick", checks)


def criterion_08_hype() -> CriterionResult:
    checks = []
    eq = hype_app.optimal_price(1.0, 1 / 32)
    split_err = max(abs(eq.revenue - 0.25), abs(eq.buyer_utility - 0.25), abs(eq.price - 0.25))
    checks.append((f"equal split closed form err {split_err:.2e} <= 1e-9", split_err <= 1e-9))

    grid = make_grid(N_DEFAULT)
    pgp = hype_pgp(1.0, uniform_prior(grid))
    mech = envelope_mechanism(threshold_rule(grid, N_DEFAULT // 4))
    nu_grid = value_of_attention(mech.rule, pgp)
    buyer_grid = inattentive_utility(mech, pgp)
    revenue_grid = float(pgp.perceived_pmf @ mech.transfers)
    grid_err = max(abs(nu_grid - 1 / 32), abs(buyer_grid - 0.25), abs(revenue_grid - 0.25))
    checks.append((f"grid-mechanism err {grid_err:.2e} <= 2/n", grid_err <= 2 / N_DEFAULT))

    h_grid = np.linspace(0.0, 1.0, 401)
    step = h_grid[1] - h_grid[0]
    rng_marg = 1e-12
    kappas = np.linspace(0.004, 0.19, 50)
    worst_s = worst_b = 0.0
    for kappa in kappas:
        revs = np.array([hype_app.optimal_price(h, kappa).revenue for h in h_grid])
        utils = np.array([hype_app.optimal_price(h, kappa).buyer_utility for h in h_grid])
        argmax_s = h_grid[revs >= revs.max() - rng_marg]
        argmax_b = h_grid[utils >= utils.max() - rng_marg]
        worst_s = max(worst_s, float(np.min(np.abs(argmax_s - hype_app.seller_optimal_hype(kappa)))))
        worst_b = max(worst_b, float(np.min(np.abs(argmax_b - hype_app.buyer_optimal_hype(kappa)))))
    checks.append((f"h_s* grid gap {worst_s:.4f} <= step", worst_s <= step + 1e-12))
    checks.append((f"h_b* grid gap {worst_b:.4f} <= step", worst_b <= step + 1e-12))

    ordering_ok = True
    slopes_ok = True
    for kappa in np.linspace(0.005, 9 / 128 * 0.98, 12):
        h_s = hype_app.seller_optimal_hype(kappa)
        h_b = hype_app.buyer_optimal_hype(kappa)
        ordering_ok &= h_b > h_s > 0.0
        width = h_b - h_s
        d = 0.02 * width  # keep both probe points strictly inside the band
        for h in np.linspace(h_s + 0.1 * width, h_b - 0.1 * width, 5):
            rev_up = hype_app.optimal_price(h + d, kappa).revenue
            rev_dn = hype_app.optimal_price(h - d, kappa).revenue
            ut_up = hype_app.optimal_price(h + d, kappa).buyer_utility
            ut_dn = hype_app.optimal_price(h - d, kappa).buyer_utility
            slopes_ok &= rev_up < rev_dn and ut_up > ut_dn
    checks.append(("h_b* > h_s* > 0 for kappa < 9/128", bool(ordering_ok)))
    checks.append(("buyer up / revenue down on (h_s*, h_b*)", bool(slopes_ok)))
    return _result("08-hype", checks)


def criterion_09_accuracy_order() -> CriterionResult:
    checks = []
    grid = make_grid(N_DEFAULT)
    prior = uniform_prior(grid)
    pgp_c = scr.rho_c(N_DEFAULT)
    pgp_u = scr.rho_u(N_DEFAULT, "fold")
    checks.append(
        ("conservatism more accurate than matched unbiased",
         compare_accuracy(pgp_c, pgp_u) is Ordering.A_MORE)
    )

    hs = [0.0, 0.25, 0.5, 0.75, 1.0]
    hype_chain = [hype_pgp(h, prior) for h in hs]
    ok = all(
        compare_accuracy(hype_chain[i], hype_chain[i + 1]) is Ordering.A_MORE
        for i in range(len(hs) - 1)
    )
    checks.append(("hype accuracy decreasing in h", ok))

    alphas_up = [1.0, 2.0, 4.0]
    chain = [probability_weighting(a, prior) for a in alphas_up]
    ok_up = all(
        compare_accuracy(chain[i], chain[i + 1]) is Ordering.A_MORE for i in range(2)
    )
    alphas_dn = [1.0, 0.5, 0.25]
    chain = [probability_weighting(a, prior) for a in alphas_dn]
    ok_dn = all(
        compare_accuracy(chain[i], chain[i + 1]) is Ordering.A_MORE for i in range(2)
    )
    checks.append(("probability weighting accuracy peaks at exponent 1", ok_up and ok_dn))

    rng = np.random.default_rng(17)
    kappas = np.linspace(0.0, 0.12, 20)
    worst = 0.0
    for _ in range(200):
        mech = envelope_mechanism(_random_monotone_rule(rng, grid))
        for kappa in kappas:
            gap = agent_welfare(mech, kappa, pgp_c) - agent_welfare(mech, kappa, pgp_u)
            worst = min(worst, gap)
    checks.append(
        (f"welfare dominance violations {-worst:.2e} <= 1e-8", worst >= -1e-8)
    )
    return _result("09-accuracy-order", checks)


def criterion_10_optimizer_oracle() -> CriterionResult:
    rng = np.random.default_rng(23)
    levels = 5
    level_values = np.linspace(0.0, 1.0, levels)
    worst_hi = worst_lo = 0.0
    for _ in range(500):
        n = int(rng.integers(4, 13))
        grid = make_grid(n)
        mass = rng.uniform(0.0, 1.0, n)
        mass[rng.random(n) < 0.2] = 0.0
        value = rng.uniform(-0.5, 1.5, n)
        cost = CostFunction.quadratic() if rng.random() < 0.5 else CostFunction.linear(
            float(rng.uniform(0.0, 1.0))
        )
        obj = SeparableObjective(grid=grid, mass=mass, value=value, cost=cost)
        engine = maximize_monotone(obj)
        oracle = brute_force_monotone(obj, levels=levels)
        snapped = allocation_rule(grid, np.round(engine.q * (levels - 1)) / (levels - 1))
        v_engine = obj.payoff(engine)
        v_oracle = obj.payoff(oracle)
        v_snap = obj.payoff(snapped)
        worst_hi = max(worst_hi, v_oracle - v_engine)  # oracle must not beat engine
        worst_lo = max(worst_lo, v_snap - v_oracle)  # oracle must beat snapped engine
    checks = [
        (f"oracle <= engine + 1e-9 (worst {worst_hi:.2e})", worst_hi <= 1e-9),
        (f"oracle >= snapped engine (worst {worst_lo:.2e})", worst_lo <= 1e-12),
    ]

    worst_scan = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 13))
        grid = make_grid(n)
        kernel = rng.random((n, n)) + 1e-6
        kernel /= kernel.sum(axis=1, keepdims=True)
        pmf = rng.random(n) + 1e-3
        pmf /= pmf.sum()
        from .model import type_dist

        pgp = garble(kernel, type_dist(grid, pmf))
        weights = attention_weights(pgp)
        scan_max = attention_maximizers(pgp).max_value
        obj = SeparableObjective(
            grid=grid,
            mass=np.zeros(n),
            value=np.zeros(n),
            cost=CostFunction.quadratic(),
            linear=weights.w,
        )
        oracle = brute_force_monotone(obj, levels=levels)
        worst_scan = max(worst_scan, abs(obj.payoff(oracle) - scan_max))
    checks.append((f"threshold scan matches DP exactly (worst {worst_scan:.2e})", worst_scan <= 1e-12))
    return _result("10-optimizer-oracle", checks)


ALL_CRITERIA = [
    criterion_01_representation_equivalence,
    criterion_02_coarse_screening,
    criterion_03_efficiency_example,
    criterion_04_sellfirm_gap,
    criterion_05_unbiased_alignment,
    criterion_06_screening_constants,
    criterion_07_carrot_stick,
    criterion_08_hype,
    criterion_09_accuracy_order,
    criterion_10_optimizer_oracle,
]


def run_all() -> list[CriterionResult]:
    return [fn() for fn in ALL_CRITERIA]
