"""Command-line experiment runner.

Subcommands: simulate, density, varcheck, census, lemmas, verify, figures.
All delimited output is UTF-8 CSV with a header row and LF line endings;
verification reports are JSON. Exit codes: 0 success, 1 verification
failure, 2 usage or configuration error. The output directory can be
overridden with the MPSIM_OUTPUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import combinatorics
from .experiments import (
    PRESET_NAMES,
    VERIFY_SUITES,
    ConfigError,
    ExperimentConfig,
    comparison_from_dict,
    preset_config,
    run_density,
    run_simulate,
    verify_census,
    verify_lemmas,
)
from .mplaw import MpLaw, SpectralMixture


def _out_dir(cli_value: str | None) -> Path:
    env = os.environ.get("MPSIM_OUTPUT_DIR")
    return Path(cli_value or env or ".")


def _parse_mixture(text: str) -> SpectralMixture:
    atoms = []
    for part in text.split(","):
        t, w = part.split(":")
        atoms.append((float(t), float(w)))
    return SpectralMixture(tuple(atoms))


def _simulate_config(args) -> ExperimentConfig:
    scale = Fraction(1) if args.full_scale else Fraction(args.scale)
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    elif args.preset:
        raw = preset_config(args.preset, scale=scale, law=args.law)
    else:
        raise ConfigError("provide --config or --preset")
    # flags override file/preset values
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.bins is not None:
        raw["histogram_bins"] = args.bins
    return ExperimentConfig(
        model=raw["model"],
        comparison=raw["comparison"],
        seed=int(raw.get("seed", 0)),
        histogram_bins=int(raw.get("histogram_bins", 100)),
        output_dir=str(_out_dir(args.out)),
        scale_factor=scale,
    )


def cmd_simulate(args) -> int:
    config = _simulate_config(args)
    result = run_simulate(config)
    print(f"p={result.config['p']} m={result.config['m']} seed={result.config['seed']}")
    print(f"ks_distance={result.ks:.6f} wall_time={result.wall_time:.2f}s")
    print(f"wrote {result.eigenvalues_file}, {result.histogram_file}, "
          f"{result.theory_file}, {result.result_file}")
    return 0


def cmd_density(args) -> int:
    if args.mixture:
        comparison = (args.lam, _parse_mixture(args.mixture))
    else:
        comparison = MpLaw(lam=args.lam, sigma2=args.sigma2)
    if isinstance(comparison, MpLaw):
        lo = args.grid_min if args.grid_min is not None else max(comparison.lower_edge, 1e-9)
        hi = args.grid_max if args.grid_max is not None else comparison.upper_edge
    else:
        lam, H = comparison
        locs = [t for t, _ in H.atoms]
        lo = args.grid_min if args.grid_min is not None else max(
            min(t * (1 - math.sqrt(lam)) ** 2 for t in locs), 1e-9)
        hi = args.grid_max if args.grid_max is not None else max(
            t * (1 + math.sqrt(lam)) ** 2 for t in locs)
    grid = np.linspace(lo, hi, args.points)
    out = _out_dir(None) / args.out if args.out else _out_dir(None) / "density.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    run_density(comparison, grid, out, eta=args.eta)
    print(f"wrote {out}")
    return 0


def _emit_report(report: dict, out: str | None) -> int:
    text = json.dumps(report, indent=2)
    if out:
        path = _out_dir(None) / out
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {path}")
    else:
        print(text)
    for c in report.get("checks", report.get("cells", [])):
        name = c.get("name", f"w={c.get('w')} v={c.get('v')} r={c.get('r')}")
        status = "PASS" if c.get("passed", c.get("match")) else "FAIL"
        print(f"{status} {name}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_varcheck(args) -> int:
    from .experiments import verify_varbounds

    report = verify_varbounds(
        preset=args.preset, samples=args.samples, seed=args.seed,
        n_matrices=args.matrices, p_override=args.p,
    )
    return _emit_report(report, args.out)


def cmd_census(args) -> int:
    census = combinatorics.meta_index_census(args.n, args.d)
    rows = census.rows()
    lines = ["w,v,r,enumerated,formula,match"]
    for r in rows:
        lines.append(
            f"{r['w']},{r['v']},{r['r']},{r['enumerated']},{r['formula']},{str(r['match']).lower()}"
        )
    out = _out_dir(None) / (args.out or f"census_n{args.n}_d{args.d}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"wrote {out}")
    return 0 if all(r["match"] for r in rows) else 1


def cmd_lemmas(args) -> int:
    report = verify_lemmas(max_n=args.max_n)
    return _emit_report(report, args.out)


def cmd_verify(args) -> int:
    suite = VERIFY_SUITES[args.suite]
    kwargs = {}
    if args.suite == "census":
        kwargs = {"n": args.n, "d": args.d}
    elif args.suite == "varbounds":
        kwargs = {"samples": args.samples, "seed": args.seed}
    elif args.suite == "yaskov":
        kwargs = {"samples": args.samples, "seed": args.seed}
    elif args.suite == "isotropy":
        kwargs = {"seed": args.seed}
    report = suite(**kwargs)
    return _emit_report(report, args.out)


FIGURE_KEYS = {"1a": "figure1a", "1b": "figure1b", "1c": "figure1c",
               "1d": "figure1d", "2": "figure2", "3": "figure3"}


def cmd_figures(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    preset = FIGURE_KEYS[args.figure]
    scale = Fraction(1) if args.full_scale else Fraction(args.scale)
    raw = preset_config(preset, scale=scale, law=args.law)
    out = _out_dir(args.out) / preset
    config = ExperimentConfig(
        model=raw["model"],
        comparison=raw["comparison"],
        seed=args.seed,
        output_dir=str(out),
        scale_factor=scale,
    )
    result = run_simulate(config)

    comparison = comparison_from_dict(config.comparison)
    hist = np.loadtxt(result.histogram_file, delimiter=",", skiprows=1)
    theory = np.loadtxt(result.theory_file, delimiter=",", skiprows=1)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    widths = hist[:, 1] - hist[:, 0]
    ax.bar(hist[:, 0], hist[:, 2], width=widths, align="edge",
           color="steelblue", alpha=0.7, label="empirical spectral density")
    ax.plot(theory[:, 0], theory[:, 1], "r-", lw=1.5, label="limit density")
    if isinstance(comparison, MpLaw):
        title = (f"p={result.config['p']}, m={result.config['m']}, "
                 f"KS={result.ks:.4f}")
    else:
        title = f"p={result.config['p']}, m={result.config['m']}"
    ax.set_title(f"{preset}: {title}")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    png = out / f"{preset}.png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    print(f"wrote {png} alongside the CSV outputs in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpsim",
        description="Spectrum simulation and verification for structured random matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="single-realization spectrum experiment")
    sim.add_argument("--config", help="JSON config file")
    sim.add_argument("--preset", choices=PRESET_NAMES, help="figure preset")
    sim.add_argument("--scale", default="1/4", help="desk-scale shrink factor (fraction)")
    sim.add_argument("--full-scale", action="store_true", help="use the full-size geometry")
    sim.add_argument("--law", default="rademacher", help="entry law for tensor presets")
    sim.add_argument("--seed", type=int, default=None, help="master seed (echoed in the result)")
    sim.add_argument("--bins", type=int, default=None, help="histogram bin count")
    sim.add_argument("--out", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    den = sub.add_parser("density", help="emit a limit-density curve as CSV")
    den.add_argument("--lam", type=float, required=True, help="aspect ratio")
    den.add_argument("--sigma2", type=float, default=1.0)
    den.add_argument("--mixture", help="anisotropic H as 't:w,t:w,...'")
    den.add_argument("--grid-min", type=float, default=None)
    den.add_argument("--grid-max", type=float, default=None)
    den.add_argument("--points", type=int, default=1000)
    den.add_argument("--eta", type=float, default=1e-6)
    den.add_argument("--out", help="output CSV path")
    den.set_defaults(func=cmd_density)

    var = sub.add_parser("varcheck", help="Monte-Carlo variance vs the block bound")
    var.add_argument("--preset", default="figure1a", choices=PRESET_NAMES)
    var.add_argument("--samples", type=int, default=10_000)
    var.add_argument("--seed", type=int, default=0)
    var.add_argument("--matrices", type=int, default=5)
    var.add_argument("--p", type=int, default=200, help="shrink the preset to ~p rows")
    var.add_argument("--out", help="JSON report path")
    var.set_defaults(func=cmd_varcheck)

    cen = sub.add_parser("census", help="meta-index census vs the product formulas")
    cen.add_argument("--n", type=int, default=6)
    cen.add_argument("--d", type=int, default=2)
    cen.add_argument("--out", help="output CSV path")
    cen.set_defaults(func=cmd_census)

    lem = sub.add_parser("lemmas", help="exact binomial lemma checks")
    lem.add_argument("--max-n", type=int, default=40)
    lem.add_argument("--out", help="JSON report path")
    lem.set_defaults(func=cmd_lemmas)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(VERIFY_SUITES))
    ver.add_argument("--n", type=int, default=6)
    ver.add_argument("--d", type=int, default=2)
    ver.add_argument("--samples", type=int, default=10_000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", help="JSON report path")
    ver.set_defaults(func=cmd_verify)

    fig = sub.add_parser("figures", help="render a figure preset (CSV + PNG)")
    fig.add_argument("figure", choices=sorted(FIGURE_KEYS))
    fig.add_argument("--scale", default="1/4", help="desk-scale shrink factor (fraction)")
    fig.add_argument("--full-scale", action="store_true")
    fig.add_argument("--law", default="rademacher", help="entry law for tensor figures")
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--out", help="output directory")
    fig.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
