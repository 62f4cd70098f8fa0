"""Posted-price monopoly where hype may inflate the buyer's perception.

A buyer with a uniform valuation succumbs to hype with probability ``h``
when inattentive (perceiving the maximal value, hence always buying) and
otherwise perceives correctly. The attention value of price ``p`` is
``h * p**2 / 2``, so prices and hype are complements for attention
incentives: the seller may shade the price below the exogenous optimum to
keep the buyer inattentive. All pricing formulas are closed-form; the one
root-find is the cost level below which the seller gives up on inattention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

BUYER_ATTENTIVE = "Attentive"
BUYER_INATTENTIVE = "Inattentive"

ATTENTIVE_PRICE = 0.5
ATTENTIVE_REVENUE = 0.25
ATTENTIVE_GROSS_UTILITY = 0.125

#: Above this cost the buyer prefers no hype at all.
BUYER_HYPE_CUTOFF = 9.0 / 128.0


def _check_inputs(h: float, kappa: float) -> None:
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"hype degree must be in [0, 1], got {h}")
    if kappa < 0.0:
        raise ValueError(f"cognitive cost must be >= 0, got {kappa}")


def inattentive_price(h: float) -> float:
    """Revenue-maximizing price against an exogenously inattentive buyer."""
    return min(1.0, 0.5 / (1.0 - h)) if h < 1.0 else 1.0


def attention_value_of_price(p: float, h: float) -> float:
    """Value of attention created by a posted price."""
    return 0.5 * h * p * p


def kappa_high(h: float) -> float:
    """Cost above which the exogenous inattentive price keeps the buyer
    inattentive anyway."""
    p = inattentive_price(h)
    return attention_value_of_price(p, h)


def _inattention_margin(kappa: float, h: float) -> float:
    # Revenue of the inattention-inducing price minus the attentive 1/4.
    p = np.sqrt(2.0 * kappa / h)
    return (1.0 - (1.0 - h) * p) * p - 0.25


def kappa_low(h: float) -> float:
    """Cost below which the seller prefers the attentive price of 1/2.

    Root of the revenue margin, which increases in the cost level; at h = 0
    inattention is free and the threshold collapses to zero.
    """
    if h <= 0.0:
        return 0.0
    hi = kappa_high(h)
    if _inattention_margin(hi, h) <= 0.0:
        return hi
    return float(brentq(lambda k: _inattention_margin(k, h), 0.0, hi, xtol=1e-14))


def _revenue(p: float, h: float) -> float:
    return (1.0 - (1.0 - h) * p) * p


def _buyer_gross(p: float, h: float) -> float:
    # E[theta - p | buy] under the hype trade pattern.
    return 0.5 - p + 0.5 * (1.0 - h) * p * p


@dataclass(frozen=True)
class HypeEquilibrium:
    """Price and payoffs at hype level ``h`` and cognitive cost ``kappa``.

    ``buyer_utility`` is gross of the cognitive cost when inattentive and
    net of it when attentive, matching the agent-welfare convention.
    """

    h: float
    kappa: float
    price: float
    buyer_state: str
    revenue: float
    buyer_utility: float


def optimal_price(h: float, kappa: float) -> HypeEquilibrium:
    """Seller-optimal posted price with an endogenous cognitive state."""
    _check_inputs(h, kappa)
    if h == 0.0:
        # Degenerate hype: inattention is free and behavior matches attention.
        return HypeEquilibrium(
            h=0.0,
            kappa=kappa,
            price=ATTENTIVE_PRICE,
            buyer_state=BUYER_INATTENTIVE,
            revenue=ATTENTIVE_REVENUE,
            buyer_utility=ATTENTIVE_GROSS_UTILITY,
        )
    k_hi = kappa_high(h)
    if kappa > k_hi:
        p = inattentive_price(h)
        return HypeEquilibrium(
            h=h,
            kappa=kappa,
            price=p,
            buyer_state=BUYER_INATTENTIVE,
            revenue=_revenue(p, h),
            buyer_utility=_buyer_gross(p, h),
        )
    k_lo = kappa_low(h)
    if kappa >= k_lo:
        # Shade the price to hold the attention value exactly at kappa.
        p = float(np.sqrt(2.0 * kappa / h))
        return HypeEquilibrium(
            h=h,
            kappa=kappa,
            price=p,
            buyer_state=BUYER_INATTENTIVE,
            revenue=_revenue(p, h),
            buyer_utility=_buyer_gross(p, h),
        )
    return HypeEquilibrium(
        h=h,
        kappa=kappa,
        price=ATTENTIVE_PRICE,
        buyer_state=BUYER_ATTENTIVE,
        revenue=ATTENTIVE_REVENUE,
        buyer_utility=ATTENTIVE_GROSS_UTILITY - kappa,
    )


def seller_optimal_hype(kappa: float) -> float:
    """Hype level maximizing revenue: 8*kappa capped at 1."""
    if kappa < 0:
        raise ValueError(f"cognitive cost must be >= 0, got {kappa}")
    return min(1.0, 8.0 * kappa)


def buyer_optimal_hype(kappa: float) -> float:
    """Hype level maximizing buyer utility.

    Above 9/128 hype only feeds rent extraction and the buyer wants none.
    Below it the buyer rides the inattention-inducing price as far down as
    the seller will go: to full hype for intermediate costs, else to the
    hype level whose seller participation threshold equals ``kappa``.
    """
    if kappa < 0:
        raise ValueError(f"cognitive cost must be >= 0, got {kappa}")
    if kappa >= BUYER_HYPE_CUTOFF:
        return 0.0
    if kappa > 1.0 / 32.0:
        return 1.0
    return float(16.0 * kappa / (np.sqrt(2.0) - 4.0 * np.sqrt(kappa)) ** 2)


@dataclass(frozen=True)
class OptimalHypeRow:
    kappa: float
    h_seller: float
    h_buyer: float
    h_buyer_tie: float | None  # second optimum at the knife-edge cost


def optimal_hype(kappas) -> list[OptimalHypeRow]:
    """Seller- and buyer-optimal hype along a cost grid.

    At exactly 9/128 the buyer is indifferent between no hype and full
    hype; both optima are reported.
    """
    rows = []
    for kappa in kappas:
        kappa = float(kappa)
        tie = 1.0 if abs(kappa - BUYER_HYPE_CUTOFF) <= 1e-12 else None
        rows.append(
            OptimalHypeRow(
                kappa=kappa,
                h_seller=seller_optimal_hype(kappa),
                h_buyer=buyer_optimal_hype(kappa),
                h_buyer_tie=tie,
            )
        )
    return rows


@dataclass(frozen=True)
class HypeRegionPoint:
    h: float
    kappa: float
    kappa_low: float
    kappa_high: float
    regime: str
    revenue: float
    buyer_utility: float
    revenue_slope_sign: int
    buyer_slope_sign: int


def _slope_sign(f, h: float, step: float = 1e-4, tol: float = 1e-11) -> int:
    lo = max(0.0, h - step)
    hi = min(1.0, h + step)
    d = f(hi) - f(lo)
    if d > tol:
        return 1
    if d < -tol:
        return -1
    return 0


def region_map(h_values, kappa_values) -> list[HypeRegionPoint]:
    """Regime classification and finite-difference payoff slopes in hype."""
    points = []
    for kappa in kappa_values:
        kappa = float(kappa)
        for h in h_values:
            h = float(h)
            eq = optimal_price(h, kappa)
            if eq.buyer_state == BUYER_ATTENTIVE:
                regime = "attentive"
            elif h > 0.0 and kappa <= kappa_high(h):
                regime = "inattentive-constrained"
            else:
                regime = "inattentive-unconstrained"
            points.append(
                HypeRegionPoint(
                    h=h,
                    kappa=kappa,
                    kappa_low=kappa_low(h),
                    kappa_high=kappa_high(h),
                    regime=regime,
                    revenue=eq.revenue,
                    buyer_utility=eq.buyer_utility,
                    revenue_slope_sign=_slope_sign(
                        lambda x: optimal_price(x, kappa).revenue, h
                    ),
                    buyer_slope_sign=_slope_sign(
                        lambda x: optimal_price(x, kappa).buyer_utility, h
                    ),
                )
            )
    return points
