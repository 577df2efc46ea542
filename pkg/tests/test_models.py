import math

import numpy as np
import pytest

from mpsim.models import (
    BasisVector,
    BlockIndependent,
    EntryLaw,
    GaussianHermite,
    Iid,
    IidBlock,
    MemoryCapError,
    SeedSpec,
    Tensor,
    XorTriple,
    build_matrix,
    colex_subsets,
    empirical_covariance_of_column,
    hermite_pair,
    sample_block,
    tensor_column,
    xor_third,
)


class TestEntryLaw:
    def test_fourth_moments(self):
        assert EntryLaw.RADEMACHER.fourth_moment == 1.0
        assert EntryLaw.UNIFORM_SQRT3.fourth_moment == pytest.approx(9 / 5)
        assert EntryLaw.STD_NORMAL.fourth_moment == 3.0

    @pytest.mark.parametrize("law", list(EntryLaw))
    def test_mean_zero_unit_variance(self, law):
        rng = SeedSpec(0).stream(0)
        x = law.sample(rng, 100_000)
        assert abs(x.mean()) < 4 / math.sqrt(100_000) * 1.1
        assert x.var() == pytest.approx(1.0, abs=0.05)


class TestBlocks:
    def test_xor_truth_table(self):
        assert xor_third(0.5, -0.5) == 0.5
        assert xor_third(-0.5, 0.5) == 0.5
        assert xor_third(0.5, 0.5) == -0.5
        assert xor_third(-0.5, -0.5) == -0.5

    def test_hermite_pair_at_one(self):
        assert hermite_pair(1.0) == (1.0, 0.0)

    def test_xor_identity_on_samples(self):
        blk = XorTriple()
        rng = SeedSpec(1).stream(0)
        draws = blk.sample_many(rng, 1000)
        # third = -2 * first * second holds exactly on every sample
        assert np.array_equal(draws[:, 2], -2.0 * draws[:, 0] * draws[:, 1])
        assert set(np.unique(draws)) == {-0.5, 0.5}

    def test_basis_vector_structure(self):
        blk = BasisVector(4)
        rng = SeedSpec(2).stream(0)
        draws = blk.sample_many(rng, 500)
        nonzero = draws != 0
        assert np.all(nonzero.sum(axis=1) == 1)
        assert np.all(np.abs(draws[nonzero]) == 2.0)

    def test_gaussian_hermite_functional_relation(self):
        rng = SeedSpec(3).stream(0)
        draws = GaussianHermite().sample_many(rng, 200)
        z = draws[:, 0]
        assert np.allclose(draws[:, 1], (z * z - 1) / math.sqrt(2))

    def test_sample_block_shape(self):
        rng = SeedSpec(4).stream(0)
        assert sample_block(IidBlock(5, EntryLaw.RADEMACHER), rng).shape == (5,)


class TestTensorColumn:
    def test_products_in_colex_order(self):
        subs = colex_subsets(3, 2)
        x = np.array([1.0, 2.0, 3.0])
        prods = x[subs].prod(axis=1)
        assert list(prods) == [2.0, 3.0, 6.0]

    def test_colex_order_n4(self):
        subs = [tuple(r) for r in colex_subsets(4, 2)]
        assert subs == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]

    def test_d_equals_one(self):
        rng = SeedSpec(5).stream(0)
        col = tensor_column(4, 1, EntryLaw.STD_NORMAL, rng)
        assert col.shape == (4,)

    def test_d_equals_n(self):
        rng = SeedSpec(5).stream(1)
        col = tensor_column(5, 5, EntryLaw.RADEMACHER, rng)
        assert col.shape == (1,)
        assert col[0] in (-1.0, 1.0)

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            Tensor(3, 4, EntryLaw.RADEMACHER)


class TestBuildMatrix:
    def test_iid_rademacher_entries(self):
        X = build_matrix(Iid(2, EntryLaw.RADEMACHER, m=3), SeedSpec(0))
        assert X.shape == (2, 3)
        assert set(np.unique(X)) <= {-1.0, 1.0}

    def test_block_geometry(self):
        model = BlockIndependent((GaussianHermite(),) * 50, m=160)
        assert model.p == 100
        X = build_matrix(model, SeedSpec(0))
        assert X.shape == (100, 160)

    def test_tensor_geometry(self):
        model = Tensor(10, 3, EntryLaw.RADEMACHER, m=7)
        assert model.p == 120
        assert build_matrix(model, SeedSpec(0)).shape == (120, 7)

    def test_determinism_bit_identical(self):
        model = BlockIndependent(
            (GaussianHermite(), XorTriple(), BasisVector(4), IidBlock(3)), m=20
        )
        X1 = build_matrix(model, SeedSpec(99))
        X2 = build_matrix(model, SeedSpec(99))
        assert np.array_equal(X1, X2)

    def test_different_seeds_differ(self):
        model = Iid(10, EntryLaw.STD_NORMAL, m=10)
        assert not np.array_equal(
            build_matrix(model, SeedSpec(0)), build_matrix(model, SeedSpec(1))
        )

    def test_columns_independent_of_generation_order(self):
        # each column depends only on its own substream
        model = Iid(5, EntryLaw.STD_NORMAL, m=4)
        X = build_matrix(model, SeedSpec(11))
        col2 = model.sample_column(SeedSpec(11).stream(2))
        assert np.array_equal(X[:, 2], col2)

    def test_memory_cap(self):
        with pytest.raises(MemoryCapError):
            build_matrix(Iid(10_000, m=10_000), SeedSpec(0), entry_cap=10**6)


class TestStatisticalInvariants:
    def test_mean_zero_all_block_kinds(self):
        model = BlockIndependent(
            (GaussianHermite(), XorTriple(), BasisVector(6), IidBlock(4)), m=1
        )
        cols = model.sample_columns(SeedSpec(21).stream(0), 100_000)
        means = cols.mean(axis=1)
        # entries have variance <= 6 here (basis vector blocks)
        assert np.abs(means).max() < 4 * math.sqrt(6) / math.sqrt(100_000)

    def test_cross_block_independence(self):
        model = BlockIndependent((GaussianHermite(),) * 2, m=1)
        cov = empirical_covariance_of_column(model, 400_000, SeedSpec(13))
        off = cov[:2, 2:]
        assert np.abs(off).max() < 0.02

    def test_gaussian_hermite_isotropy(self):
        model = BlockIndependent((GaussianHermite(),), m=1)
        cov = empirical_covariance_of_column(model, 1_000_000, SeedSpec(17))
        assert np.abs(cov - np.eye(2)).max() < 0.01

    def test_xor_covariance_quarter_identity(self):
        model = BlockIndependent((XorTriple(),), m=1)
        cov = empirical_covariance_of_column(model, 400_000, SeedSpec(19))
        assert np.abs(cov - 0.25 * np.eye(3)).max() < 0.01

    def test_tensor_isotropy(self):
        model = Tensor(5, 2, EntryLaw.RADEMACHER, m=1)
        cov = empirical_covariance_of_column(model, 300_000, SeedSpec(23))
        assert np.abs(cov - np.eye(10)).max() < 4 * math.sqrt(1.0 / 300_000) + 0.005

    def test_tensor_unit_entry_variance(self):
        model = Tensor(6, 3, EntryLaw.UNIFORM_SQRT3, m=1)
        cols = model.sample_columns(SeedSpec(29).stream(0), 200_000)
        assert np.abs(cols.var(axis=1) - 1.0).max() < 0.05
