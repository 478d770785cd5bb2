"""Command-line driver for the evaluation pipeline.

Subcommands cover fitting (``fit``), algorithm and instance metrics
(``metrics``), strength and weakness mapping (``strengths``), model-fit
diagnostics (``goodness``), density surfaces (``heatmap``) and the
cross-validated portfolio comparison (``compare``). Every run writes data
files plus a manifest of content hashes into the output directory; outputs
are deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import crm, goodness, metrics, portfolio, svg, trait_analysis
from .errors import AirtError
from .ingest import (
    PerformanceMatrix,
    TransformConfig,
    load_csv,
    load_scenario,
    transform_performance,
)

DEFAULT_EPSILONS = (0.0, 0.01, 0.05)


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        if value != value:  # NaN
            return ""
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def _eps_tag(eps: float) -> str:
    return f"{eps:g}"


class OutputWriter:
    """Writes artifacts into one directory and records their hashes."""

    def __init__(self, directory: Path):
        self.directory = directory
        directory.mkdir(parents=True, exist_ok=True)
        self.artifacts: dict[str, str] = {}

    def write_text(self, name: str, text: str):
        path = self.directory / name
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.artifacts[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name: str, obj):
        self.write_text(name, _json_text(obj))

    def write_csv(self, name: str, header, rows):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        self.write_text(name, buffer.getvalue())

    def finish(self):
        manifest = {"artifacts": dict(sorted(self.artifacts.items()))}
        path = self.directory / "manifest.json"
        path.write_text(_json_text(manifest), encoding="utf-8")


def _add_input_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="scenario directory or CSV file")
    parser.add_argument(
        "--kind", choices=("scenario", "csv"), default=None,
        help="input layout; default guesses from the path",
    )
    parser.add_argument(
        "--maximize", action="store_true",
        help="CSV input holds an increasing measure (accuracy-like)",
    )
    parser.add_argument(
        "--transform", choices=("auto",) + tuple(sorted(("identity", "reciprocal",
                                                         "negate_minmax"))),
        default="auto", help="unit-scale mapping; default picks by direction",
    )
    parser.add_argument("--clip-epsilon", type=float, default=0.01)
    parser.add_argument("--prior-mu", type=float, default=0.0)
    parser.add_argument("--prior-sigma", type=float, default=1.0)
    parser.add_argument("--max-cycles", type=int, default=200)
    parser.add_argument("--tolerance", type=float, default=1e-4)
    parser.add_argument(
        "--output", "-o", default=None,
        help="output directory (default $AIRT_OUTPUT_DIR or ./airt_output)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airt",
        description="Evaluate an algorithm portfolio from a performance matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the difficulty model")
    _add_input_flags(p_fit)

    p_metrics = sub.add_parser("metrics", help="algorithm metrics and difficulty")
    _add_input_flags(p_metrics)

    p_str = sub.add_parser("strengths", help="strength and weakness regions")
    _add_input_flags(p_str)
    p_str.add_argument("--epsilon", type=float, nargs="+",
                       default=list(DEFAULT_EPSILONS))
    p_str.add_argument("--grid-size", type=int, default=101)

    p_good = sub.add_parser("goodness", help="model-fit diagnostics")
    _add_input_flags(p_good)

    p_heat = sub.add_parser("heatmap", help="density surface for one algorithm")
    _add_input_flags(p_heat)
    p_heat.add_argument("--algorithm", required=True)
    p_heat.add_argument("--grid-size", type=int, default=61)

    p_cmp = sub.add_parser("compare", help="cross-validated portfolio comparison")
    _add_input_flags(p_cmp)
    p_cmp.add_argument("--epsilon", type=float, default=0.0)
    p_cmp.add_argument("--folds", type=int, default=10)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--grid-size", type=int, default=101)
    return parser


def _output_dir(args) -> Path:
    if args.output:
        return Path(args.output)
    return Path(os.environ.get("AIRT_OUTPUT_DIR", "airt_output"))


def _load_matrix(args) -> PerformanceMatrix:
    path = Path(args.input)
    kind = args.kind or ("scenario" if path.is_dir() else "csv")
    if kind == "scenario":
        return load_scenario(path)
    return load_csv(path, maximize=args.maximize)


def _transform_config(args, m: PerformanceMatrix) -> TransformConfig | None:
    if args.transform == "auto":
        if args.clip_epsilon == 0.01:
            return None
        kind = "identity" if m.descriptor.maximize else "negate_minmax"
        return TransformConfig(kind=kind, clip_epsilon=args.clip_epsilon)
    return TransformConfig(kind=args.transform, clip_epsilon=args.clip_epsilon)


def _fit_from_args(args, m: PerformanceMatrix):
    responses = transform_performance(m, _transform_config(args, m))
    prior = crm.PriorConfig(mu=args.prior_mu, sigma=args.prior_sigma)
    cfg = crm.FitConfig(max_cycles=args.max_cycles, loglik_tolerance=args.tolerance)
    model = crm.fit(responses, prior=prior, cfg=cfg)
    return responses, model


def _cmd_fit(args) -> int:
    m = _load_matrix(args)
    _, model = _fit_from_args(args, m)
    out = OutputWriter(_output_dir(args))
    out.write_text("model.json", model.to_json() + "\n")
    out.write_csv(
        "loglik_trace.csv", ("cycle", "loglik"),
        [(i + 1, ll) for i, ll in enumerate(model.loglik_trace)],
    )
    out.finish()
    return 0


def _cmd_metrics(args) -> int:
    m = _load_matrix(args)
    _, model = _fit_from_args(args, m)
    table = metrics.algorithm_metrics(model.params)
    delta = metrics.dataset_difficulty(model.theta, m.descriptor.instance_ids)
    out = OutputWriter(_output_dir(args))
    rows = table.rows()
    out.write_csv(
        "metrics.csv",
        ("algorithm", "consistency", "anomalous", "difficulty_limit", "warnings"),
        [(r["algorithm"], r["consistency"], r["anomalous"],
          r["difficulty_limit"], r["warnings"]) for r in rows],
    )
    out.write_json("metrics.json", {"algorithms": rows,
                                    "fit_warnings": list(model.warnings)})
    out.write_csv(
        "dataset_difficulty.csv", ("instance", "difficulty"),
        list(zip(delta.instance_ids, delta.delta)),
    )
    out.finish()
    return 0


def _cmd_strengths(args) -> int:
    m = _load_matrix(args)
    responses, model = _fit_from_args(args, m)
    delta = metrics.dataset_difficulty(model.theta, m.descriptor.instance_ids)
    curves = trait_analysis.fit_curves(
        delta, responses.x, m.descriptor.algorithm_names, grid_size=args.grid_size
    )
    limits = metrics.algorithm_metrics(model.params).difficulty_limit
    out = OutputWriter(_output_dir(args))
    out.write_csv(
        "trait_curves.csv",
        ("difficulty",) + tuple(curves.algorithm_names),
        [(g,) + tuple(curves.curves[:, i]) for i, g in enumerate(curves.grid)],
    )
    out.write_text("trait_curves.svg", svg.render_trait_curves(curves) + "\n")
    lto_rows = []
    for eps in args.epsilon:
        report = trait_analysis.strengths_weaknesses(curves, eps, limits)
        ranking = trait_analysis.airt_portfolio(report)
        tag = _eps_tag(eps)
        doc = {
            "epsilon": eps,
            "portfolio": ranking,
            "algorithms": {
                name: {
                    "strengths": [list(iv) for iv in report.strengths[j]],
                    "weaknesses": [list(iv) for iv in report.weaknesses[j]],
                    "lto": float(report.lto[j]),
                }
                for j, name in enumerate(report.algorithm_names)
            },
        }
        out.write_json(f"strengths_eps{tag}.json", doc)
        out.write_text(f"strengths_eps{tag}.svg",
                       svg.render_strength_bars(report) + "\n")
        out.write_csv(
            f"membership_eps{tag}.csv",
            ("difficulty",) + tuple(
                f"{name}:{which}" for name in report.algorithm_names
                for which in ("strong", "weak")
            ),
            [
                (g,) + tuple(
                    int(mask[j][i])
                    for j in range(len(report.algorithm_names))
                    for mask in (report.strong_mask, report.weak_mask)
                )
                for i, g in enumerate(curves.grid)
            ],
        )
        for j, name in enumerate(report.algorithm_names):
            lto_rows.append((name, eps, report.lto[j]))
    out.write_csv("lto.csv", ("algorithm", "epsilon", "lto"), lto_rows)
    out.finish()
    return 0


def _cmd_goodness(args) -> int:
    m = _load_matrix(args)
    responses, model = _fit_from_args(args, m)
    report = goodness.goodness_report(responses.x, model)
    res = goodness.residuals(responses.x, model)
    x_hat = goodness.predicted_matrix(model)
    out = OutputWriter(_output_dir(args))
    rows = report.rows()
    out.write_csv(
        "goodness.csv",
        ("algorithm", "mse", "aucdf", "auaec", "aupec", "auaec_aupec_gap",
         "warnings"),
        [(r["algorithm"], r["mse"], r["aucdf"], r["auaec"], r["aupec"],
          r["auaec_aupec_gap"], r["warnings"]) for r in rows],
    )
    out.write_json("goodness.json", {"algorithms": rows})
    curve_rows = []
    cdf_rows = []
    for j, name in enumerate(report.names):
        if not model.params.fitted[j]:
            continue
        actual = goodness.effectiveness(responses.x[:, j], "actual")
        predicted = goodness.effectiveness(x_hat[:, j], "predicted")
        for curve in (actual, predicted):
            for level, frac in curve.points:
                curve_rows.append((name, curve.kind, level, frac))
        rho = np.sort(res.rho[:, j])
        for i, value in enumerate(rho, start=1):
            cdf_rows.append((name, value, i / rho.size))
    out.write_csv("effectiveness_curves.csv",
                  ("algorithm", "kind", "tolerance", "fraction"), curve_rows)
    out.write_csv("residual_cdf.csv", ("algorithm", "rho", "cdf"), cdf_rows)
    out.write_csv(
        "effectiveness_scatter.csv", ("algorithm", "auaec", "aupec"),
        [(r["algorithm"], r["auaec"], r["aupec"]) for r in rows],
    )
    out.finish()
    return 0


def _cmd_heatmap(args) -> int:
    m = _load_matrix(args)
    responses, model = _fit_from_args(args, m)
    names = model.params.names
    if args.algorithm not in names:
        raise KeyError(f"algorithm {args.algorithm!r} not in the portfolio")
    j = names.index(args.algorithm)
    if not model.params.fitted[j]:
        raise AirtError(f"algorithm {args.algorithm!r} was excluded as degenerate")
    item = model.params.item(j)
    z_lo, z_hi = float(responses.z.min()), float(responses.z.max())
    th = model.theta
    t_lo, t_hi = float(th.min()), float(th.max())
    z_grid = np.linspace(z_lo, z_hi, args.grid_size)
    t_grid = np.linspace(t_lo, t_hi, args.grid_size)
    surface = crm.heatmap_grid(item, z_grid, t_grid)
    out = OutputWriter(_output_dir(args))
    tag = _safe_name(args.algorithm)
    out.write_csv(
        f"heatmap_{tag}.csv",
        ("z",) + tuple(repr(float(t)) for t in t_grid),
        [(z_grid[a],) + tuple(surface[a]) for a in range(z_grid.size)],
    )
    out.write_text(
        f"heatmap_{tag}.svg",
        svg.render_heatmap(surface, z_grid, t_grid, title=args.algorithm) + "\n",
    )
    out.finish()
    return 0


def _cmd_compare(args) -> int:
    m = _load_matrix(args)
    comparison = portfolio.cv_compare(
        m,
        epsilon=args.epsilon,
        folds=args.folds,
        seed=args.seed,
        transform=_transform_config(args, m),
        prior=crm.PriorConfig(mu=args.prior_mu, sigma=args.prior_sigma),
        fit_cfg=crm.FitConfig(max_cycles=args.max_cycles,
                              loglik_tolerance=args.tolerance),
        grid_size=args.grid_size,
    )
    out = OutputWriter(_output_dir(args))
    rows = comparison.rows()
    out.write_csv(
        "comparison.csv",
        ("method", "n", "mean_gap", "stderr", "folds_realized"),
        [(r["method"], r["n"], r["mean_gap"], r["stderr"], r["folds_realized"])
         for r in rows],
    )
    doc = {
        "epsilon": comparison.epsilon,
        "folds": comparison.folds,
        "seed": comparison.seed,
        "results": rows,
        "fold_details": [
            {
                "fold": fr.fold,
                "test_instances": list(fr.test_instances),
                "size_limit": fr.size_limit,
                "rankings": {k: list(v) for k, v in fr.rankings.items()},
            }
            for fr in comparison.fold_results
        ],
    }
    out.write_json("comparison.json", doc)
    plot_rows = []
    for n in comparison.sizes:
        row = [n]
        for method in comparison.methods:
            key = (method, n)
            row.append(comparison.mean_gap.get(key))
            err = comparison.stderr.get(key)
            row.append(None if err is None or err != err else err)
        plot_rows.append(tuple(row))
    out.write_csv(
        "gap_vs_n.csv",
        ("n",) + tuple(
            f"{m_}_{col}" for m_ in comparison.methods for col in ("mean", "stderr")
        ),
        plot_rows,
    )
    out.finish()
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "metrics": _cmd_metrics,
    "strengths": _cmd_strengths,
    "goodness": _cmd_goodness,
    "heatmap": _cmd_heatmap,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (AirtError, KeyError, OSError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        sys.stderr.write(_json_text({
            "error": {"type": type(exc).__name__, "message": str(message)},
        }))
        return 1


if __name__ == "__main__":
    sys.exit(main())
