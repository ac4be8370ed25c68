"""Command line interface.

Subcommands: ``simulate``, ``estimate``, ``theory``, ``mc``, ``analyze``.
Exit codes: 0 success, 2 validation error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    DegenerateError,
    IndexPair,
    RawSample,
    StdNormal,
    Uniform01,
    UnitFrechet,
    ValidationError,
    margin_from_dict,
    pit_transform,
    rank_transform,
)
from .estimate import (
    eps_pair_estimate,
    eps_scaled_estimate,
    l_pair_estimate,
    lambda_estimate,
)
from .models import GaussianModel, LogisticModel, M4Model, MinFactorModel, model_from_dict
from .pipeline import (
    GroupConfig,
    analyze,
    default_group_config,
    format_analysis_table,
    load_prices,
    merge_prices,
    monthly_block_maxima,
    neg_log_returns,
)
from .simulate import Seed, sample
from .validate import config_from_dict, mc_normality

DEFAULT_GRID = (0.1, 0.5, 1.0, 2.0, 8.0)


def _load_model(text: str):
    """Model spec from inline JSON or a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        spec = json.loads(text)
    else:
        with open(text, encoding="utf-8") as fh:
            spec = json.load(fh)
    return model_from_dict(spec)


def _parse_cols(text: str) -> tuple:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValidationError(f"bad column list {text!r}; expected e.g. '1,2'") from None


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    model = _load_model(args.model)
    seed = Seed(args.seed, args.stream)
    sim = sample(model, args.size, seed)
    out = Path(args.out)
    d = sim.raw.d
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(d)])
        for row in sim.raw.data:
            writer.writerow([f"{v:.17g}" for v in row])
    meta = {
        "model": sim.model.to_dict(),
        "n": sim.raw.n,
        "seed": seed.to_dict(),
        "margins": [m.to_dict() for m in sim.margins],
    }
    meta_path = out.with_suffix(".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} and {meta_path}")
    return 0


def _read_sample_csv(path) -> tuple:
    """(names, RawSample) from a headered numeric CSV."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            names = tuple(h.strip() for h in next(reader))
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ValidationError(f"{path}: line {lineno}: non-numeric cell") from None
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return names, RawSample(np.asarray(rows))


def _build_pseudo(raw: RawSample, margins_kind: str, meta_path):
    if margins_kind == "ranks":
        return rank_transform(raw)
    if margins_kind == "meta":
        if meta_path is None:
            raise ValidationError("--margins meta requires --meta <json path>")
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
        margins = tuple(margin_from_dict(m) for m in meta["margins"])
        return pit_transform(raw, margins)
    family = {"frechet": UnitFrechet, "uniform": Uniform01, "normal": StdNormal}[margins_kind]
    return pit_transform(raw, (family(),) * raw.d)


def _cmd_estimate(args) -> int:
    _, raw = _read_sample_csv(args.input)
    pseudo = _build_pseudo(raw, args.margins, args.meta)
    pair = IndexPair(_parse_cols(args.i1), _parse_cols(args.i2), pseudo.d)
    level = args.level
    records = [
        ("eps_i1_scaled", eps_scaled_estimate(pseudo, pair.i1, args.x, level)),
        ("eps_i2_scaled", eps_scaled_estimate(pseudo, pair.i2, args.y, level)),
        ("l_pair", l_pair_estimate(pseudo, pair, args.x, args.y, level)),
        ("lambda_u", lambda_estimate(pseudo, pair, args.x, args.y, level)),
        ("eps_pair", eps_pair_estimate(pseudo, pair, level)),
    ]
    if args.out == "json":
        payload = [{"estimator": name, **est.to_dict()} for name, est in records]
        print(json.dumps(payload, indent=2))
    else:
        print("estimator\tvalue\tstd_error\tci_low\tci_high\tn\tprovenance")
        for name, est in records:
            se = "" if est.std_error is None else f"{est.std_error:.9f}"
            lo = "" if est.ci_low is None else f"{est.ci_low:.9f}"
            hi = "" if est.ci_high is None else f"{est.ci_high:.9f}"
            print(f"{name}\t{est.value:.9f}\t{se}\t{lo}\t{hi}\t{est.n}\t{est.provenance.value}")
    return 0


def _cmd_theory(args) -> int:
    model = _load_model(args.model)
    d = model.d
    pair = IndexPair(_parse_cols(args.i1), _parse_cols(args.i2), d)
    grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
    lines = []
    if isinstance(model, (LogisticModel, M4Model)):
        fn = model.functionals(pair)
        lines.append(f"eps_i1\t{fn.eps_i1:.9f}")
        lines.append(f"eps_i2\t{fn.eps_i2:.9f}")
        lines.append(f"eps_union\t{fn.eps_union:.9f}")
        lines.append(f"eps_pair\t{fn.eps_pair:.9f}")
        lines.append("x\ty\tl_pair\tlambda_u")
        for x in grid:
            for y in grid:
                lines.append(f"{x:g}\t{y:g}\t{fn.l_pair(x, y):.9f}\t{fn.lambda_u(x, y):.9f}")
    elif isinstance(model, GaussianModel):
        lines.append(f"eta\t{model.eta(pair):.9f}")
        lines.append(f"eps_pair\t{model.eps_pair(pair):.9f}")
    elif isinstance(model, MinFactorModel):
        eta, c = model.eta_and_c(pair)
        lines.append(f"eta\t{eta:.9f}")
        lines.append("x\ty\tc")
        for x in grid:
            for y in grid:
                lines.append(f"{x:g}\t{y:g}\t{c(x, y):.9f}")
    else:
        raise ValidationError(f"no theory output for model {model!r}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_mc(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = config_from_dict(json.load(fh))
    report = mc_normality(cfg, workers=args.threads)
    out = Path(args.out)
    out.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    from .figures import render_mc_figure

    fig_path = render_mc_figure(report, cfg.n, out.with_suffix(".png"))
    print(f"wrote {out} and {fig_path}")
    if report.passed is False:
        print("normality gates FAILED", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    series_list = [load_prices(p) for p in args.input]
    series, dropped = merge_prices(series_list)
    if dropped:
        print(f"inner join on dates dropped {dropped} rows", file=sys.stderr)
    returns = neg_log_returns(series)
    maxima = monthly_block_maxima(returns)
    config = GroupConfig.from_file(args.groups) if args.groups else default_group_config()
    results = analyze(maxima, config, args.level)
    table = format_analysis_table(results)
    if args.out is None:
        sys.stdout.write(table)
    else:
        out = Path(args.out)
        out.write_text(table, encoding="utf-8")
        written = [out]
        if not args.no_figures:
            from .figures import render_analysis_figures

            written += render_analysis_figures(maxima, results, out)
        print("wrote " + ", ".join(str(p) for p in written))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grouptail",
        description="Tail dependence between groups of components: "
                    "simulation, estimation, and block-maxima analysis.",
    )
    parser.add_argument("--seed", type=int, default=0, help="RNG seed value")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for Monte Carlo replications")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a sample and write CSV + metadata")
    p.add_argument("--model", required=True,
                   help="model spec: inline JSON or a JSON file path")
    p.add_argument("-n", "--size", type=int, required=True, help="number of draws")
    p.add_argument("--stream", type=int, default=0, help="RNG stream index")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="group tail dependence estimates from a CSV")
    p.add_argument("--input", required=True, help="sample CSV with a header row")
    p.add_argument("--margins", required=True,
                   choices=["ranks", "frechet", "uniform", "normal", "meta"],
                   help="margin handling for the pseudo-observations")
    p.add_argument("--meta", help="metadata JSON (for --margins meta)")
    p.add_argument("--i1", required=True, help="first group, 1-based columns e.g. '1,2'")
    p.add_argument("--i2", required=True, help="second group")
    p.add_argument("--x", type=float, default=1.0, help="scale for the first group")
    p.add_argument("--y", type=float, default=1.0, help="scale for the second group")
    p.add_argument("--level", type=float, default=0.95, help="confidence level")
    p.add_argument("--out", choices=["json", "tsv"], default="json",
                   help="output format (stdout)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("theory", help="exact functionals for a model and pair")
    p.add_argument("--model", required=True, help="model spec JSON or path")
    p.add_argument("--i1", required=True)
    p.add_argument("--i2", required=True)
    p.add_argument("--grid", default=",".join(str(g) for g in DEFAULT_GRID),
                   help="comma list of grid values used for both x and y")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("mc", help="Monte Carlo normality report")
    p.add_argument("--config", required=True, help="experiment config JSON path")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("analyze", help="block-maxima group dependence table")
    p.add_argument("--input", required=True, nargs="+",
                   help="price CSV path(s); several files are inner-joined on dates")
    p.add_argument("--groups", help="group config JSON (default: packaged market groups)")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out", help="table path; figures are rendered alongside")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
