"""Experiment configs, figure presets, and the simulate/density/verify
runners behind the CLI. Simulations follow the single-realization protocol:
one seeded matrix, one eigendecomposition, no averaging.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import combinatorics
from .concentration import (
    bound_block,
    decomposition_check,
    var_quadform_mc,
    yaskov_counterexample,
)
from .linalg import eigvalsh, sample_covariance, spectral_norm
from .models import (
    BasisVector,
    BlockIndependent,
    EntryLaw,
    GaussianHermite,
    Iid,
    IidBlock,
    SeedSpec,
    Tensor,
    XorTriple,
    build_matrix,
    empirical_covariance_of_column,
)
from .mplaw import MpLaw, SpectralMixture, density_from_stieltjes, ks_distance, mp_density


class ConfigError(ValueError):
    """Malformed experiment configuration."""


_LAWS = {law.value: law for law in EntryLaw}


def _entry_law(name: str) -> EntryLaw:
    try:
        return _LAWS[name]
    except KeyError:
        raise ConfigError(f"unknown entry law {name!r}; expected one of {sorted(_LAWS)}")


def model_from_dict(spec: dict):
    """Build a MatrixModel from its JSON-compatible description."""
    try:
        kind = spec["kind"]
        m = int(spec["m"])
        if kind == "iid":
            return Iid(p=int(spec["p"]), law=_entry_law(spec.get("law", "std_normal")), m=m)
        if kind == "tensor":
            return Tensor(
                n=int(spec["n"]),
                d=int(spec["d"]),
                law=_entry_law(spec.get("law", "rademacher")),
                m=m,
            )
        if kind == "block":
            blocks = []
            for b in spec["blocks"]:
                count = int(b.get("count", 1))
                bk = b["kind"]
                if bk == "gaussian_hermite":
                    blk = GaussianHermite()
                elif bk == "xor_triple":
                    blk = XorTriple()
                elif bk == "basis_vector":
                    blk = BasisVector(size=int(b["size"]))
                elif bk == "iid_block":
                    blk = IidBlock(size=int(b["size"]), law=_entry_law(b.get("law", "std_normal")))
                else:
                    raise ConfigError(f"unknown block kind {bk!r}")
                blocks.extend([blk] * count)
            return BlockIndependent(blocks=tuple(blocks), m=m)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad model spec: {exc}") from exc
    raise ConfigError(f"unknown model kind {spec.get('kind')!r}")


def model_to_dict(model) -> dict:
    if isinstance(model, Iid):
        return {"kind": "iid", "p": model.p, "law": model.law.value, "m": model.m}
    if isinstance(model, Tensor):
        return {
            "kind": "tensor", "n": model.n, "d": model.d,
            "law": model.law.value, "m": model.m,
        }
    groups: list[dict] = []
    for b in model.blocks:
        if isinstance(b, GaussianHermite):
            entry = {"kind": "gaussian_hermite"}
        elif isinstance(b, XorTriple):
            entry = {"kind": "xor_triple"}
        elif isinstance(b, BasisVector):
            entry = {"kind": "basis_vector", "size": b.size}
        else:
            entry = {"kind": "iid_block", "size": b.size, "law": b.law.value}
        if groups and {k: v for k, v in groups[-1].items() if k != "count"} == entry:
            groups[-1]["count"] += 1
        else:
            groups.append({**entry, "count": 1})
    return {"kind": "block", "blocks": groups, "m": model.m}


def comparison_from_dict(spec: dict):
    """Either an MpLaw or a (lambda, SpectralMixture) pair for the anisotropic law."""
    if "mixture" in spec:
        H = SpectralMixture(tuple((t, w) for t, w in spec["mixture"]))
        return float(spec["lambda"]), H
    return MpLaw(lam=float(spec["lambda"]), sigma2=float(spec.get("sigma2", 1.0)))


@dataclass(frozen=True)
class ExperimentConfig:
    model: dict
    comparison: dict
    seed: int = 0
    histogram_bins: int = 100
    output_dir: str = "."
    scale_factor: Fraction = Fraction(1)

    def __post_init__(self):
        if not 0 < self.scale_factor <= 1:
            raise ConfigError("scale_factor must lie in (0, 1]")
        object.__setattr__(self, "scale_factor", Fraction(self.scale_factor))


@dataclass
class ExperimentResult:
    eigenvalues_file: Path
    histogram_file: Path
    theory_file: Path
    result_file: Path
    eigenvalues: np.ndarray
    ks: float
    wall_time: float
    config: dict


# ---------------------------------------------------------------------------
# Figure presets (full-scale geometry; scale_factor shrinks toward desk scale)


def _scaled(value: int, scale: Fraction) -> int:
    return max(1, int(value * scale))


def preset_config(name: str, scale: Fraction = Fraction(1, 4), law: str = "rademacher") -> dict:
    """Model + comparison dicts for the named figure preset.

    scale shrinks the full-scale geometry: block counts and column counts
    for the block figures, the base dimension n for the tensor figures.
    """
    scale = Fraction(scale)
    if not 0 < scale <= 1:
        raise ConfigError("scale_factor must lie in (0, 1]")
    if name == "figure1a":
        nb = _scaled(2000, scale)
        return {
            "model": {
                "kind": "block",
                "blocks": [{"kind": "gaussian_hermite", "count": nb}],
                "m": 8 * nb,
            },
            "comparison": {"lambda": 0.25, "sigma2": 1.0},
        }
    if name == "figure1b":
        nb = _scaled(600, scale)
        return {
            "model": {
                "kind": "block",
                "blocks": [{"kind": "xor_triple", "count": nb}],
                "m": 21 * nb,
            },
            "comparison": {"lambda": 1.0 / 7.0, "sigma2": 0.25},
        }
    if name == "figure1c":
        d = _scaled(700, scale)
        return {
            "model": {
                "kind": "block",
                "blocks": [{"kind": "basis_vector", "size": d, "count": 10}],
                "m": 30 * d,
            },
            "comparison": {"lambda": 1.0 / 3.0, "sigma2": 1.0},
        }
    if name == "figure1d":
        nb = _scaled(80, scale)
        return {
            "model": {
                "kind": "block",
                "blocks": [{"kind": "basis_vector", "size": 80, "count": nb}],
                "m": 160 * nb,
            },
            "comparison": {"lambda": 0.5, "sigma2": 1.0},
        }
    if name == "figure2":
        n = 145 if scale == 1 else 60
        p = math.comb(n, 2)
        return {
            "model": {"kind": "tensor", "n": n, "d": 2, "law": law, "m": 2 * p},
            "comparison": {"lambda": 0.5, "sigma2": 1.0},
        }
    if name == "figure3":
        n = 45 if scale == 1 else 24
        p = math.comb(n, 3)
        return {
            "model": {"kind": "tensor", "n": n, "d": 3, "law": law, "m": 2 * p},
            "comparison": {"lambda": 0.5, "sigma2": 1.0},
        }
    if name == "figure4":
        # Full-scale only (p = 161700); exposed as a config, never run in tests.
        p = math.comb(100, 3)
        return {
            "model": {
                "kind": "tensor", "n": 100, "d": 3,
                "law": "uniform_sqrt3", "m": max(1, p // 7),
            },
            "comparison": {"lambda": 7.0, "sigma2": 1.0},
        }
    raise ConfigError(f"unknown preset {name!r}")


PRESET_NAMES = (
    "figure1a", "figure1b", "figure1c", "figure1d", "figure2", "figure3", "figure4",
)


# ---------------------------------------------------------------------------
# Runners


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def theory_curve(comparison, grid: np.ndarray, eta: float = 1e-6) -> np.ndarray:
    if isinstance(comparison, MpLaw):
        return np.asarray(mp_density(grid, comparison))
    lam, H = comparison
    return np.asarray(density_from_stieltjes(grid, lam, H, eta=eta))


def run_simulate(config: ExperimentConfig) -> ExperimentResult:
    """Single-realization experiment: build X, form W, diagonalize, compare."""
    t0 = time.perf_counter()
    model = model_from_dict(config.model)
    comparison = comparison_from_dict(config.comparison)
    seeds = SeedSpec(config.seed)
    X = build_matrix(model, seeds)
    W = sample_covariance(X)
    eigs = eigvalsh(W)

    if isinstance(comparison, MpLaw):
        ks = ks_distance(eigs, comparison)
        lo, hi = comparison.lower_edge, comparison.upper_edge
    else:
        lam, H = comparison
        locs = [t for t, _ in H.atoms]
        lo = min(t * (1 - math.sqrt(lam)) ** 2 for t in locs)
        hi = max(t * (1 + math.sqrt(lam)) ** 2 for t in locs)
        ks = float("nan")  # KS is defined against an MpLaw CDF only

    counts, edges = np.histogram(eigs, bins=config.histogram_bins)
    widths = np.diff(edges)
    density = counts / (eigs.size * widths)

    grid_lo = min(lo, float(eigs.min()))
    grid_hi = max(hi, float(eigs.max()))
    pad = 0.05 * (grid_hi - grid_lo)
    grid = np.linspace(max(grid_lo - pad, 1e-9), grid_hi + pad, 1000)
    curve = theory_curve(comparison, grid)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    eig_file = out / "eigenvalues.csv"
    hist_file = out / "histogram.csv"
    theory_file = out / "theory.csv"
    result_file = out / "result.json"

    _write_csv(eig_file, ["eigenvalue"], [(float(v),) for v in eigs])
    _write_csv(
        hist_file,
        ["bin_left", "bin_right", "density"],
        [(float(a), float(b), float(c)) for a, b, c in zip(edges[:-1], edges[1:], density)],
    )
    _write_csv(theory_file, ["x", "density"], [(float(a), float(b)) for a, b in zip(grid, curve)])

    wall = time.perf_counter() - t0
    echo = {
        "model": model_to_dict(model),
        "comparison": config.comparison,
        "seed": config.seed,
        "histogram_bins": config.histogram_bins,
        "scale_factor": str(config.scale_factor),
        "p": model.p,
        "m": model.m,
    }
    result_file.write_text(
        json.dumps(
            {"ks_distance": ks, "wall_time_s": wall, "config": echo},
            indent=2, allow_nan=True,
        )
        + "\n",
        encoding="utf-8",
    )
    return ExperimentResult(
        eigenvalues_file=eig_file,
        histogram_file=hist_file,
        theory_file=theory_file,
        result_file=result_file,
        eigenvalues=eigs,
        ks=ks,
        wall_time=wall,
        config=echo,
    )


def run_density(comparison, grid: np.ndarray, out_path: Path, eta: float = 1e-6) -> Path:
    curve = theory_curve(comparison, grid, eta=eta)
    _write_csv(out_path, ["x", "density"], [(float(a), float(b)) for a, b in zip(grid, curve)])
    return out_path


# ---------------------------------------------------------------------------
# Verification suites


def _check(name: str, passed: bool, **details) -> dict:
    return {"name": name, "passed": bool(passed), **details}


def verify_lemmas(max_n: int = 40, max_shift: int = 5, max_k: int = 4) -> dict:
    """Exhaustive small-grid run of every exact lemma checker."""
    checks = []
    ok = all(
        combinatorics.check_lemma_bounds(n, d)
        for n in range(1, max_n + 1)
        for d in range(1, n + 1)
    )
    checks.append(_check("binomial_bound_chain", ok, grid=f"n<={max_n}"))
    ok = all(
        combinatorics.check_log_concavity(a, b, c)
        for a in range(1, max_n + 1)
        for b in range(0, a + 1)
        for c in range(0, a + 1)
    )
    checks.append(_check("log_concavity", ok, grid=f"a<={max_n}"))
    ok = all(
        combinatorics.check_decay(m, t, s)
        for m in range(1, max_n + 1)
        for t in range(1, m + 1)
        for s in range(1, t + 1)
    )
    checks.append(_check("decay", ok, grid=f"m<={max_n}"))
    ok = all(
        combinatorics.check_stability(m, p, t)
        for m in range(1, max_n + 1)
        for p in range(1, max_shift + 1)
        for t in range(1, m + 1)
    )
    checks.append(_check("stability", ok, grid=f"m<={max_n}, p<={max_shift}"))
    ok = all(
        combinatorics.check_diag_sum(n, d, K)
        for n in range(4, max_n + 1)
        for d in range(1, n // 4 + 1)
        for K in range(1, max_k + 1)
    )
    checks.append(_check("diag_sum", ok, grid=f"n<={max_n}, d<=n/4, K<={max_k}"))
    return {"suite": "lemmas", "passed": all(c["passed"] for c in checks), "checks": checks}


def verify_census(n: int = 6, d: int = 2) -> dict:
    census = combinatorics.meta_index_census(n, d)
    rows = census.rows()
    return {
        "suite": "census",
        "passed": all(r["match"] for r in rows),
        "n": n,
        "d": d,
        "cells": rows,
    }


def verify_varbounds(preset: str = "figure1a", samples: int = 10_000, seed: int = 0,
                     n_matrices: int = 5, p_override: int | None = None) -> dict:
    """MC variance vs the block-model bound on seeded random symmetric A."""
    cfg = preset_config(preset)
    model = model_from_dict(cfg["model"])
    if not isinstance(model, BlockIndependent):
        raise ConfigError("varbounds suite needs a block-independent preset")
    if p_override is not None:
        base = model.blocks[0]
        count = max(1, p_override // base.size)
        model = BlockIndependent(blocks=(base,) * count, m=model.m)
    p = model.p
    K = 3.0  # std normal entries dominate the fourth moments in these presets
    checks = []
    rng = np.random.default_rng(seed)
    for idx in range(n_matrices):
        B = rng.standard_normal((p, p))
        A = (B + B.T) / 2.0
        A /= spectral_norm(A)
        report = var_quadform_mc(model, A, samples, SeedSpec(seed + 1000 + idx))
        bound = bound_block(1.0, K, model.block_sizes)
        checks.append(
            _check(
                f"A_{idx}",
                report.mc_variance - 4 * report.mc_stderr <= bound,
                mc_variance=report.mc_variance,
                mc_stderr=report.mc_stderr,
                bound=bound,
            )
        )
    return {
        "suite": "varbounds",
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def verify_yaskov(n_blocks: int = 2, samples: int = 10_000, seed: int = 0) -> dict:
    blocks = (GaussianHermite(),) * n_blocks
    stat, zero_fraction = yaskov_counterexample(blocks, samples, SeedSpec(seed))
    expected = 2.0**-n_blocks
    sigma = math.sqrt(expected * (1 - expected) / samples)
    passed = abs(zero_fraction - expected) <= 3 * sigma
    return {
        "suite": "yaskov",
        "passed": passed,
        "checks": [
            _check(
                "zero_fraction",
                passed,
                zero_fraction=zero_fraction,
                expected=expected,
                band=3 * sigma,
                u_mean=stat.mean,
                u_variance=stat.variance,
            )
        ],
    }


def verify_isotropy(trials: int = 100_000, seed: int = 0) -> dict:
    """Entrywise check that E x x^T equals the model's covariance."""
    cases = [
        ("gaussian_hermite", BlockIndependent((GaussianHermite(),) * 3, m=1), 1.0, 3.0),
        ("xor_triple", BlockIndependent((XorTriple(),) * 2, m=1), 0.25, 1.0 / 16.0),
        ("tensor_5_2", Tensor(5, 2, EntryLaw.RADEMACHER, m=1), 1.0, 1.0),
    ]
    checks = []
    for name, model, diag, K in cases:
        cov = empirical_covariance_of_column(model, trials, SeedSpec(seed))
        tol = 4 * math.sqrt(max(K, 1.0) / trials) + 4 / math.sqrt(trials)
        target = np.eye(model.p) * diag
        err = float(np.abs(cov - target).max())
        checks.append(_check(name, err <= tol, max_error=err, tolerance=tol))
    return {
        "suite": "isotropy",
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def verify_decomposition(samples: int = 10_000, seed: int = 0, pairs: int = 3) -> dict:
    checks = []
    rng = np.random.default_rng(seed)
    for idx in range(pairs):
        model = BlockIndependent((GaussianHermite(),) * 20, m=1)
        B = rng.standard_normal((model.p, model.p))
        A = (B + B.T) / 2.0
        rep = decomposition_check(model, A, samples, SeedSpec(seed + idx))
        gap = abs(rep["var_total"] - rep["var_diag"] - rep["var_off"])
        checks.append(
            _check(f"pair_{idx}", gap <= 5 * rep["combined_stderr"], gap=gap, **rep)
        )
    return {
        "suite": "decomposition",
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


VERIFY_SUITES = {
    "lemmas": verify_lemmas,
    "census": verify_census,
    "varbounds": verify_varbounds,
    "yaskov": verify_yaskov,
    "isotropy": verify_isotropy,
}
