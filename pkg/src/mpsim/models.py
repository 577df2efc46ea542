"""Seeded samplers for the column distributions: i.i.d. entries,
block-independent columns, and vectorized symmetric random tensors.

Reproducibility: every column k of a matrix is generated from its own
counter-based Philox stream keyed by (master_seed, k), so the output is
bit-identical regardless of generation order or parallelism.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

SQRT3 = math.sqrt(3.0)

DEFAULT_ENTRY_CAP = 200_000_000


class MemoryCapError(RuntimeError):
    """Requested matrix exceeds the configured entry budget."""


class EntryLaw(enum.Enum):
    """Mean-zero unit-variance scalar entry laws."""

    RADEMACHER = "rademacher"
    UNIFORM_SQRT3 = "uniform_sqrt3"
    STD_NORMAL = "std_normal"

    @property
    def fourth_moment(self) -> float:
        return {
            EntryLaw.RADEMACHER: 1.0,
            EntryLaw.UNIFORM_SQRT3: 9.0 / 5.0,
            EntryLaw.STD_NORMAL: 3.0,
        }[self]

    def sample(self, rng: np.random.Generator, size) -> NDArray:
        if self is EntryLaw.RADEMACHER:
            return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
        if self is EntryLaw.UNIFORM_SQRT3:
            return rng.uniform(-SQRT3, SQRT3, size=size)
        return rng.standard_normal(size=size)


# ---------------------------------------------------------------------------
# Block kinds


def hermite_pair(z: float) -> tuple[float, float]:
    """Map a standard normal draw z to the pair (z, (z^2 - 1)/sqrt(2))."""
    return z, (z * z - 1.0) / math.sqrt(2.0)


def xor_third(b1: float, b2: float) -> float:
    """Third XOR-block entry: +1/2 when b1, b2 have opposite signs, else -1/2."""
    return 0.5 if (b1 > 0) != (b2 > 0) else -0.5


@dataclass(frozen=True)
class GaussianHermite:
    """Block (z, (z^2-1)/sqrt(2)) with z standard normal; isotropic, size 2."""

    size: int = 2

    def sample_many(self, rng: np.random.Generator, count: int) -> NDArray:
        z = rng.standard_normal(count)
        return np.column_stack([z, (z * z - 1.0) / math.sqrt(2.0)])


@dataclass(frozen=True)
class XorTriple:
    """Block (b1, b2, b3) with b1, b2 uniform on {-1/2, +1/2} and b3 their
    shifted XOR; within-block covariance is I/4."""

    size: int = 3

    def sample_many(self, rng: np.random.Generator, count: int) -> NDArray:
        b = rng.integers(0, 2, size=(count, 2)).astype(np.float64) - 0.5
        b3 = np.where(np.sign(b[:, 0]) != np.sign(b[:, 1]), 0.5, -0.5)
        return np.column_stack([b, b3])


@dataclass(frozen=True)
class BasisVector:
    """Block +-sqrt(d) e_i with i uniform in [d]; isotropic, fourth moment d."""

    size: int

    def sample_many(self, rng: np.random.Generator, count: int) -> NDArray:
        d = self.size
        idx = rng.integers(0, d, size=count)
        signs = rng.integers(0, 2, size=count).astype(np.float64) * 2.0 - 1.0
        out = np.zeros((count, d))
        out[np.arange(count), idx] = signs * math.sqrt(d)
        return out


@dataclass(frozen=True)
class IidBlock:
    """Block of independent draws from an entry law."""

    size: int
    law: EntryLaw = EntryLaw.STD_NORMAL

    def sample_many(self, rng: np.random.Generator, count: int) -> NDArray:
        return self.law.sample(rng, (count, self.size))


BlockKind = GaussianHermite | XorTriple | BasisVector | IidBlock


def sample_block(kind, rng: np.random.Generator) -> NDArray:
    """Draw one block from the given kind using the stream rng."""
    return kind.sample_many(rng, 1)[0]


# ---------------------------------------------------------------------------
# Matrix models


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a (seed, index) -> independent stream derivation."""

    master_seed: int = 0

    def stream(self, index: int) -> np.random.Generator:
        key = np.array(
            [self.master_seed & 0xFFFFFFFFFFFFFFFF, index & 0xFFFFFFFFFFFFFFFF],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Iid:
    """Columns with p i.i.d. entries from one law."""

    p: int
    law: EntryLaw = EntryLaw.STD_NORMAL
    m: int = 1

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise ValueError("need p >= 1 and m >= 1")

    def sample_column(self, rng: np.random.Generator) -> NDArray:
        return self.law.sample(rng, self.p)

    def sample_columns(self, rng: np.random.Generator, count: int) -> NDArray:
        return self.law.sample(rng, (self.p, count))


@dataclass(frozen=True)
class BlockIndependent:
    """Columns concatenated from independent blocks."""

    blocks: tuple
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks or self.m < 1:
            raise ValueError("need at least one block and m >= 1")

    @property
    def p(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    def sample_column(self, rng: np.random.Generator) -> NDArray:
        # Runs of identical kinds are drawn in one vectorized call; the
        # draw order is fixed by the block order, so this stays deterministic.
        parts = []
        i = 0
        n = len(self.blocks)
        while i < n:
            j = i
            while j < n and self.blocks[j] == self.blocks[i]:
                j += 1
            parts.append(self.blocks[i].sample_many(rng, j - i).ravel())
            i = j
        return np.concatenate(parts)

    def sample_columns(self, rng: np.random.Generator, count: int) -> NDArray:
        # Batched variant for Monte-Carlo statistics: one stream drives many
        # columns. Runs of identical kinds are drawn in a single call.
        parts = []
        i = 0
        n = len(self.blocks)
        while i < n:
            j = i
            while j < n and self.blocks[j] == self.blocks[i]:
                j += 1
            g = j - i
            blk = self.blocks[i].sample_many(rng, count * g)
            parts.append(blk.reshape(count, g * self.blocks[i].size).T)
            i = j
        return np.vstack(parts)


@dataclass(frozen=True)
class Tensor:
    """Columns are vectorized symmetric d-tensors of an i.i.d. vector in R^n."""

    n: int
    d: int
    law: EntryLaw = EntryLaw.RADEMACHER
    m: int = 1

    def __post_init__(self):
        if not (1 <= self.d <= self.n):
            raise ValueError("need 1 <= d <= n")
        if self.m < 1:
            raise ValueError("need m >= 1")

    @property
    def p(self) -> int:
        return math.comb(self.n, self.d)

    def sample_column(self, rng: np.random.Generator) -> NDArray:
        x = self.law.sample(rng, self.n)
        return x[colex_subsets(self.n, self.d)].prod(axis=1)

    def sample_columns(self, rng: np.random.Generator, count: int) -> NDArray:
        x = self.law.sample(rng, (count, self.n))
        return x[:, colex_subsets(self.n, self.d)].prod(axis=2).T


MatrixModel = Iid | BlockIndependent | Tensor

_SUBSET_CACHE: dict[tuple[int, int], NDArray] = {}


def colex_subsets(n: int, d: int) -> NDArray:
    """Index array of all d-subsets of range(n) in colexicographic order."""
    key = (n, d)
    cached = _SUBSET_CACHE.get(key)
    if cached is None:
        subs = sorted(combinations(range(n), d), key=lambda c: tuple(reversed(c)))
        cached = np.array(subs, dtype=np.intp).reshape(len(subs), d)
        if len(_SUBSET_CACHE) > 8:
            _SUBSET_CACHE.clear()
        _SUBSET_CACHE[key] = cached
    return cached


def tensor_column(
    n: int, d: int, law: EntryLaw, rng: np.random.Generator
) -> NDArray:
    """One vectorized symmetric tensor column, subsets in colex order."""
    return Tensor(n, d, law).sample_column(rng)


def build_matrix(
    model: MatrixModel,
    seeds: SeedSpec,
    *,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> NDArray:
    """Sample the p-by-m data matrix; column k comes from substream k."""
    p, m = model.p, model.m
    if p * m > entry_cap:
        raise MemoryCapError(
            f"matrix of {p}x{m} = {p * m} entries exceeds the cap of {entry_cap}"
        )
    X = np.empty((p, m))
    for k in range(m):
        X[:, k] = model.sample_column(seeds.stream(k))
    return X


def empirical_covariance_of_column(
    model: MatrixModel, trials: int, seeds: SeedSpec
) -> NDArray:
    """(1/trials) sum of x x^T over sampled columns; isotropy check helper."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    p = model.p
    acc = np.zeros((p, p))
    # Batched draws: batch b comes from substream b, so the estimate is
    # still fully determined by the SeedSpec.
    batch = max(1, min(trials, 1_000_000 // max(p, 1)))
    done = 0
    b = 0
    while done < trials:
        g = min(batch, trials - done)
        cols = model.sample_columns(seeds.stream(b), g)
        acc += cols @ cols.T
        done += g
        b += 1
    return acc / trials
