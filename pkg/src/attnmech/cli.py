"""Command-line interface.

Subcommands: voa, maximize-attention, accuracy, efficiency, screening,
hype, verify. Data files are CSV with a header row, '.' decimals, and 12
significant digits; run metadata goes to a JSON sidecar so the data files
are byte-identical across runs with the same inputs.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import hype_pricing as hype_app
from . import screening as screening_app
from .accuracy import accuracy_curve, compare_accuracy
from .attention import attention_maximizers, attention_weights, value_of_attention
from .efficiency import efficiency_report
from .errors import (
    AttnMechError,
    InfeasibleConstraintError,
    ManageInfeasibleError,
    ScenarioError,
)
from .scenario import (
    Scenario,
    build_cost,
    build_pgp,
    build_prior,
    build_rule,
    load_scenario,
    scenario_grid,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3


def _fmt(x) -> str:
    if isinstance(x, float) and not np.isfinite(x):
        return "nan"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_meta(path: Path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_kappas(args, sc: Scenario | None) -> list[float]:
    if args.kappa:
        return [float(tok) for tok in args.kappa.split(",") if tok]
    if sc is not None and sc.kappas:
        return sc.kappas
    raise ScenarioError("no kappa values given (use --kappa or the scenario file)")


def _require_scenario(args) -> Scenario:
    if not args.scenario:
        raise ScenarioError("this subcommand needs --scenario")
    return load_scenario(args.scenario)


def _cmd_voa(args) -> int:
    sc = _require_scenario(args)
    grid = scenario_grid(sc, args.grid_n)
    prior = build_prior(grid, sc.prior)
    if sc.pgp is None or sc.rule is None:
        raise ScenarioError("voa needs 'pgp' and 'rule' sections")
    pgp = build_pgp(grid, sc.pgp, prior)
    rule = build_rule(grid, sc.rule)
    print(_fmt(value_of_attention(rule, pgp)))
    return EXIT_OK


def _cmd_maximize_attention(args) -> int:
    sc = _require_scenario(args)
    grid = scenario_grid(sc, args.grid_n)
    prior = build_prior(grid, sc.prior)
    if sc.pgp is None:
        raise ScenarioError("maximize-attention needs a 'pgp' section")
    pgp = build_pgp(grid, sc.pgp, prior)
    report = attention_maximizers(pgp)
    out = Path(args.out)
    boundaries = grid.boundaries
    _write_csv(
        out / "attention_thresholds.csv",
        ["cutoff", "threshold_value"],
        zip(boundaries, report.threshold_values),
    )
    _write_meta(out / "attention_thresholds.meta.json", {"grid_n": grid.n})
    lo0, lo1 = report.always_zero
    hi0, hi1 = report.always_one
    print(f"max_value {_fmt(report.max_value)}")
    print(f"always_zero cells [{lo0}, {lo1})  ({_fmt(boundaries[lo0])} to {_fmt(boundaries[lo1])})")
    print(f"always_one cells [{hi0}, {hi1})  ({_fmt(boundaries[hi0])} to {_fmt(boundaries[hi1])})")
    return EXIT_OK


def _cmd_accuracy(args) -> int:
    sc = _require_scenario(args)
    grid = scenario_grid(sc, args.grid_n)
    prior = build_prior(grid, sc.prior)
    if sc.pgp is None or sc.pgp_b is None:
        raise ScenarioError("accuracy needs 'pgp' and 'pgp_b' sections")
    a = build_pgp(grid, sc.pgp, prior)
    b = build_pgp(grid, sc.pgp_b, prior)
    verdict = compare_accuracy(a, b)
    out = Path(args.out)
    _write_csv(
        out / "accuracy_curves.csv",
        ["x", "S_a", "S_b"],
        zip(grid.boundaries, accuracy_curve(a).values, accuracy_curve(b).values),
    )
    _write_meta(out / "accuracy_curves.meta.json", {"grid_n": grid.n})
    print(verdict.value)
    return EXIT_OK


def _cmd_efficiency(args) -> int:
    sc = _require_scenario(args)
    grid = scenario_grid(sc, args.grid_n)
    prior = build_prior(grid, sc.prior)
    if sc.pgp is None or sc.cost is None:
        raise ScenarioError("efficiency needs 'pgp' and 'cost' sections")
    pgp = build_pgp(grid, sc.pgp, prior)
    cost = build_cost(sc.cost)
    kappas = _parse_kappas(args, sc)
    report = efficiency_report(pgp, cost)
    rows = []
    for kappa in kappas:
        opt = report.optimal(kappa)
        rows.append(
            (
                kappa,
                opt.regime,
                opt.welfare,
                opt.nu,
                opt.threshold if opt.threshold is not None else float("nan"),
                report.attentive_net(kappa),
                report.inattentive_best(kappa),
            )
        )
    out = Path(args.out)
    _write_csv(
        out / "efficiency.csv",
        [
            "kappa",
            "regime",
            "welfare",
            "nu",
            "threshold_if_any",
            "welfare_attentive_net",
            "welfare_inattentive",
        ],
        rows,
    )
    _write_meta(
        out / "efficiency.meta.json",
        {
            "grid_n": grid.n,
            "w_a_star": report.w_a_star,
            "w_i_star": report.w_i_star,
            "kappa_star": report.kappa_star,
            "kappa_i": report.kappa_i,
            "kappa_bar": report.kappa_bar,
        },
    )
    print(
        f"W_A* {_fmt(report.w_a_star)}  W_I* {_fmt(report.w_i_star)}  "
        f"kappa_star {_fmt(report.kappa_star)}  kappa_I "
        f"{_fmt(report.kappa_i) if report.kappa_i is not None else 'infeasible'}"
    )
    return EXIT_OK


def _cmd_screening(args) -> int:
    tag = args.pgp or "rho_U"
    if tag not in (screening_app.RHO_U, screening_app.RHO_C):
        raise ScenarioError(f"screening pgp tag must be rho_U or rho_C, got {tag!r}")
    kappas = _parse_kappas(args, None)
    n = args.grid_n or screening_app.DEFAULT_N
    rows = []
    out = Path(args.out)
    for kappa in kappas:
        sol = screening_app.optimal_screening(tag, kappa, n=n)
        rows.append(
            (
                kappa,
                sol.regime,
                sol.multiplier if sol.multiplier is not None else float("nan"),
                sol.profit,
                sol.v_attentive,
                sol.v_inattentive,
            )
        )
        if args.dump_rules:
            _write_csv(
                out / f"screening_rule_{tag}_{_fmt(kappa)}.csv",
                ["pi", "q"],
                zip(sol.rule.grid.midpoints, sol.rule.q),
            )
    _write_csv(
        out / "screening.csv",
        ["kappa", "regime", "lambda", "profit", "V_A", "V_I"],
        rows,
    )
    _write_meta(out / "screening.meta.json", {"grid_n": n, "pgp": tag})
    for row in rows:
        print(f"kappa {_fmt(row[0])}: {row[1]}")
    return EXIT_OK


def _cmd_hype(args) -> int:
    h_values = np.linspace(0.0, 1.0, args.h_steps)
    kappas = (
        [float(tok) for tok in args.kappa.split(",") if tok]
        if args.kappa
        else list(np.linspace(0.0, 0.2, 21))
    )
    out = Path(args.out)
    points = hype_app.region_map(h_values, kappas)
    _write_csv(
        out / "hype_region.csv",
        [
            "h",
            "kappa",
            "kappa_low",
            "kappa_high",
            "regime",
            "revenue",
            "buyer_utility",
            "revenue_dh_sign",
            "buyer_dh_sign",
        ],
        (
            (
                p.h,
                p.kappa,
                p.kappa_low,
                p.kappa_high,
                p.regime,
                p.revenue,
                p.buyer_utility,
                p.revenue_slope_sign,
                p.buyer_slope_sign,
            )
            for p in points
        ),
    )
    table = hype_app.optimal_hype(kappas)
    _write_csv(
        out / "hype_optimal.csv",
        ["kappa", "h_seller", "h_buyer", "h_buyer_tie"],
        (
            (
                r.kappa,
                r.h_seller,
                r.h_buyer,
                r.h_buyer_tie if r.h_buyer_tie is not None else float("nan"),
            )
            for r in table
        ),
    )
    _write_meta(out / "hype_region.meta.json", {"h_steps": args.h_steps})
    print(f"wrote {len(points)} region points and {len(table)} optimal-hype rows")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all()
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} acceptance criteria passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnmech",
        description="Attention incentives in screening mechanisms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="path to a scenario JSON file")
        p.add_argument("--grid-n", type=int, default=None, help="grid size override")
        p.add_argument("--out", default=".", help="output directory for CSV files")
        p.add_argument("--kappa", default=None, help="comma-separated cognitive costs")
        p.add_argument("--pgp", default=None, help="pgp tag (screening: rho_U | rho_C)")

    for name, fn in [
        ("voa", _cmd_voa),
        ("maximize-attention", _cmd_maximize_attention),
        ("accuracy", _cmd_accuracy),
        ("efficiency", _cmd_efficiency),
        ("screening", _cmd_screening),
        ("hype", _cmd_hype),
        ("verify", _cmd_verify),
    ]:
        p = sub.add_parser(name)
        common(p)
        if name == "screening":
            p.add_argument("--dump-rules", action="store_true")
        if name == "hype":
            p.add_argument("--h-steps", type=int, default=21)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (InfeasibleConstraintError, ManageInfeasibleError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except AttnMechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
