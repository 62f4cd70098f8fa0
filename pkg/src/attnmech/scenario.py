"""Scenario files: JSON specifications of grid, prior, process, cost, rule.

Schema (all keys except the ones a subcommand needs are optional):

    {
      "grid_n": 2000,
      "prior":  {"kind": "uniform"},
      "pgp":    {"kind": "conservatism", "params": {"alpha": 0.5}},
      "pgp_b":  {...},                      # second process, accuracy runs
      "cost":   {"kind": "linear", "params": {"c": 0.25}},
      "rule":   {"kind": "threshold", "params": {"at": 0.5}},
      "kappa":  [0.01, 0.02]
    }

Prior kinds: uniform | point {at} | pmf {values}.
Pgp kinds: perfect | probweight {alpha} | prelec {alpha, beta} |
  conservatism {alpha} | hype {h} | fictitious | garble {matrix} |
  pool {blocks} | rho_U {variant?} | rho_C.
Cost kinds: linear {c} | quadratic | tabulated {values}.
Rule kinds: constant {level} | threshold {at} | affine {slope, intercept} |
  values {q}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import screening
from .errors import AttnMechError, ScenarioError
from .model import (
    AllocationRule,
    CostFunction,
    Grid,
    Pgp,
    TypeDist,
    allocation_rule,
    builtin_pgp,
    constant_rule,
    make_grid,
    point_prior,
    threshold_rule,
    type_dist,
    uniform_prior,
)

DEFAULT_GRID_N = 2000


@dataclass(frozen=True)
class Scenario:
    grid_n: int
    prior: dict
    pgp: dict | None
    pgp_b: dict | None
    cost: dict | None
    rule: dict | None
    kappas: list[float] | None


def _spec_section(raw: dict, key: str) -> dict | None:
    spec = raw.get(key)
    if spec is None:
        return None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError(f"section {key!r} must be an object with a 'kind'")
    return spec


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path!r}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario root must be a JSON object")
    grid_n = raw.get("grid_n", DEFAULT_GRID_N)
    if not isinstance(grid_n, int) or grid_n < 2:
        raise ScenarioError(f"grid_n must be an integer >= 2, got {grid_n!r}")
    kappas = raw.get("kappa")
    if kappas is not None:
        if not isinstance(kappas, list) or not all(
            isinstance(k, (int, float)) for k in kappas
        ):
            raise ScenarioError("kappa must be a list of numbers")
        kappas = [float(k) for k in kappas]
    return Scenario(
        grid_n=grid_n,
        prior=_spec_section(raw, "prior") or {"kind": "uniform"},
        pgp=_spec_section(raw, "pgp"),
        pgp_b=_spec_section(raw, "pgp_b"),
        cost=_spec_section(raw, "cost"),
        rule=_spec_section(raw, "rule"),
        kappas=kappas,
    )


def _params(spec: dict) -> dict:
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError(f"params of {spec.get('kind')!r} must be an object")
    return params


def build_prior(grid: Grid, spec: dict) -> TypeDist:
    kind = spec["kind"]
    params = _params(spec)
    try:
        if kind == "uniform":
            return uniform_prior(grid)
        if kind == "point":
            return point_prior(grid, float(params["at"]))
        if kind == "pmf":
            return type_dist(grid, np.asarray(params["values"], dtype=float))
    except (KeyError, TypeError, ValueError, AttnMechError) as exc:
        raise ScenarioError(f"invalid prior {kind!r}: {exc}") from exc
    raise ScenarioError(f"unknown prior kind {kind!r}")


def build_pgp(grid: Grid, spec: dict, prior: TypeDist) -> Pgp:
    kind = spec["kind"]
    params = _params(spec)
    try:
        if kind == "rho_U":
            return screening.rho_u(grid.n, params.get("variant", "fold"))
        if kind == "rho_C":
            return screening.rho_c(grid.n)
        return builtin_pgp(kind, params, prior)
    except (KeyError, TypeError, ValueError, AttnMechError) as exc:
        raise ScenarioError(f"invalid pgp {kind!r}: {exc}") from exc


def build_cost(spec: dict) -> CostFunction:
    kind = spec["kind"]
    params = _params(spec)
    try:
        if kind == "linear":
            return CostFunction.linear(float(params["c"]))
        if kind == "quadratic":
            return CostFunction.quadratic()
        if kind == "tabulated":
            return CostFunction.tabulated(np.asarray(params["values"], dtype=float))
    except (KeyError, TypeError, ValueError, AttnMechError) as exc:
        raise ScenarioError(f"invalid cost {kind!r}: {exc}") from exc
    raise ScenarioError(f"unknown cost kind {kind!r}")


def build_rule(grid: Grid, spec: dict) -> AllocationRule:
    kind = spec["kind"]
    params = _params(spec)
    try:
        if kind == "constant":
            return constant_rule(grid, float(params["level"]))
        if kind == "threshold":
            at = float(params["at"])
            if not 0.0 <= at <= 1.0:
                raise ScenarioError(f"threshold location {at} outside [0, 1]")
            return threshold_rule(grid, int(round(at * grid.n)))
        if kind == "affine":
            q = params.get("slope", 1.0) * grid.midpoints + params.get("intercept", 0.0)
            return allocation_rule(grid, np.clip(q, 0.0, 1.0))
        if kind == "values":
            return allocation_rule(grid, np.asarray(params["q"], dtype=float))
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError, AttnMechError) as exc:
        raise ScenarioError(f"invalid rule {kind!r}: {exc}") from exc
    raise ScenarioError(f"unknown rule kind {kind!r}")


def scenario_grid(sc: Scenario, override_n: int | None = None) -> Grid:
    return make_grid(override_n if override_n is not None else sc.grid_n)
