"""Monte-Carlo variance of quadratic forms x^T A x, closed-form variance
bounds for the block-independent and tensor models, the diagonal/off-diagonal
decomposition identity, and the norm statistic U_p = |x|^2 / p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .models import BlockIndependent, MatrixModel, SeedSpec, sample_block


@dataclass(frozen=True)
class QuadFormReport:
    """Variance estimate of x^T A x with its standard error and the bound."""

    mc_variance: float
    mc_stderr: float
    samples: int
    theoretical_bound: float | None
    bound_kind: str

    def to_dict(self) -> dict:
        return {
            "mc_variance": self.mc_variance,
            "mc_stderr": self.mc_stderr,
            "samples": self.samples,
            "theoretical_bound": self.theoretical_bound,
            "bound_kind": self.bound_kind,
        }


@dataclass(frozen=True)
class NormStatistic:
    """Samples of U_p = |x|^2 / p with their mean and variance."""

    values: NDArray
    mean: float
    variance: float

    @classmethod
    def from_values(cls, values: NDArray) -> "NormStatistic":
        v = np.asarray(values, dtype=np.float64)
        return cls(values=v, mean=float(v.mean()), variance=float(v.var(ddof=1)))


def _variance_with_stderr(q: NDArray) -> tuple[float, float]:
    """Unbiased sample variance and its standard error via the standard
    fourth-central-moment formula Var(s^2) ~ (mu4 - sigma^4) / n."""
    n = q.size
    var = float(q.var(ddof=1))
    centered = q - q.mean()
    mu4 = float((centered**4).mean())
    se2 = max(mu4 - var * var, 0.0) / n
    return var, math.sqrt(se2)


def _draw_columns(model: MatrixModel, samples: int, seeds: SeedSpec) -> NDArray:
    cols = np.empty((model.p, samples))
    for k in range(samples):
        cols[:, k] = model.sample_column(seeds.stream(k))
    return cols


def var_quadform_mc(
    model: MatrixModel, A: NDArray, samples: int, seeds: SeedSpec
) -> QuadFormReport:
    """Monte-Carlo estimate of Var(x^T A x) over independent column draws."""
    A = np.asarray(A, dtype=np.float64)
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if A.shape != (model.p, model.p):
        raise ValueError(f"A has shape {A.shape}, expected ({model.p}, {model.p})")
    X = _draw_columns(model, samples, seeds)
    q = np.einsum("ij,ij->j", X, A @ X)
    var, se = _variance_with_stderr(q)
    return QuadFormReport(
        mc_variance=var,
        mc_stderr=se,
        samples=samples,
        theoretical_bound=None,
        bound_kind="TrivialFourthMoment",
    )


def bound_block(spectral_norm_A: float, K: float, block_sizes) -> float:
    """Variance bound |A|^2 (K sum d_k^2 + 2 sum d_k) for block columns."""
    sizes = list(block_sizes)
    if K < 1 or any(d < 1 for d in sizes):
        raise ValueError("need K >= 1 and block sizes >= 1")
    p = sum(sizes)
    return spectral_norm_A**2 * (K * sum(d * d for d in sizes) + 2 * p)


def bound_tensor(
    spectral_norm_A: float,
    K: float,
    n: int,
    d: int,
    C: float = 1.0,
    c: float = 0.5,
) -> float | None:
    """Variance bound C |A|^2 p^2 (K^(1/2) d / n^(1/3))^(3/2) for tensor
    columns, valid only while K^(1/2) d / n^(1/3) < c; returns None
    (inapplicable) otherwise. The absolute constants C and c are caller
    choices, not pinned values.
    """
    if C <= 0:
        raise ValueError("need C > 0")
    ratio = math.sqrt(K) * d / n ** (1.0 / 3.0)
    if ratio >= c:
        return None
    p = math.comb(n, d)
    return C * spectral_norm_A**2 * p * p * ratio**1.5


def block_diagonal_part(A: NDArray, block_sizes) -> NDArray:
    """Zero out every entry of A outside the diagonal blocks of the partition."""
    A = np.asarray(A, dtype=np.float64)
    p = sum(block_sizes)
    if A.shape != (p, p):
        raise ValueError(f"A has shape {A.shape} but partition sums to {p}")
    D = np.zeros_like(A)
    start = 0
    for d in block_sizes:
        D[start : start + d, start : start + d] = A[
            start : start + d, start : start + d
        ]
        start += d
    return D


def decomposition_check(
    model: BlockIndependent, A: NDArray, samples: int, seeds: SeedSpec
) -> dict:
    """Estimate Var(x^T D x), Var(x^T (A-D) x) and Var(x^T A x) on common
    draws, where D keeps only the diagonal blocks of A under the model's
    partition. The covariance of the two pieces vanishes exactly, so the
    total must equal the sum within Monte-Carlo error.
    """
    A = np.asarray(A, dtype=np.float64)
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("A must be symmetric")
    D = block_diagonal_part(A, model.block_sizes)
    X = _draw_columns(model, samples, seeds)
    qd = np.einsum("ij,ij->j", X, D @ X)
    qo = np.einsum("ij,ij->j", X, (A - D) @ X)
    var_d, se_d = _variance_with_stderr(qd)
    var_off, se_off = _variance_with_stderr(qo)
    var_total, se_total = _variance_with_stderr(qd + qo)
    return {
        "var_diag": var_d,
        "var_off": var_off,
        "var_total": var_total,
        "stderr_diag": se_d,
        "stderr_off": se_off,
        "stderr_total": se_total,
        "combined_stderr": math.sqrt(se_d**2 + se_off**2 + se_total**2),
        "samples": samples,
    }


def norm_statistic(model: MatrixModel, samples: int, seeds: SeedSpec) -> NormStatistic:
    """Distribution of U_p = |x|^2 / p over independent column draws."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    p = model.p
    vals = np.empty(samples)
    for k in range(samples):
        x = model.sample_column(seeds.stream(k))
        vals[k] = float(x @ x) / p
    return NormStatistic.from_values(vals)


def yaskov_counterexample(
    base_blocks, samples: int, seeds: SeedSpec
) -> tuple[NormStatistic, float]:
    """Sample the zero-inflated block model: each block of the base column is
    replaced by zeros independently with probability 1/2 and the result is
    scaled by sqrt(2). Returns the U_p statistic and the empirical fraction
    of exactly-zero vectors (expected 2^-n_blocks).
    """
    blocks = tuple(base_blocks)
    if not blocks:
        raise ValueError("need at least one block")
    p = sum(b.size for b in blocks)
    vals = np.empty(samples)
    zeros = 0
    root2 = math.sqrt(2.0)
    for k in range(samples):
        rng = seeds.stream(k)
        parts = []
        for b in blocks:
            blk = sample_block(b, rng)
            keep = rng.integers(0, 2)
            parts.append(blk * root2 if keep else np.zeros(b.size))
        x = np.concatenate(parts)
        if not x.any():
            zeros += 1
        vals[k] = float(x @ x) / p
    return NormStatistic.from_values(vals), zeros / samples
