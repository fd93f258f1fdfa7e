import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from metablox import (
    PermutationEnsemble,
    Variant,
    bestest_pvalue,
    permute_labels,
    randomized_dl_distribution,
    relabel_partition,
    sigma_rand,
)
from metablox.significance import ensemble_to_csv

from conftest import graph_from, labels


def make_ensemble(dls, alpha=0.01, variant=Variant.DC, seed=0):
    dls = np.asarray(dls, dtype=float)
    return PermutationEnsemble(variant=variant, n_permutations=dls.size,
                               dls=dls, alpha=alpha, seed=seed)


class TestPermuteLabels:
    def test_category_counts_conserved(self):
        rng = np.random.default_rng(0)
        p = relabel_partition([0, 0, 1, 2, 2, 2, 1])
        for _ in range(50):
            q = permute_labels(p, rng)
            assert Counter(q.labels.tolist()) == Counter(p.labels.tolist())

    def test_single_category_is_identity(self):
        rng = np.random.default_rng(1)
        p = relabel_partition(["x"] * 5)
        q = permute_labels(p, rng)
        assert np.array_equal(q.labels, p.labels)

    def test_uniform_over_arrangements(self):
        rng = np.random.default_rng(2)
        p = relabel_partition([0, 0, 1])
        counts = Counter()
        draws = 100_000
        for _ in range(draws):
            counts[tuple(permute_labels(p, rng).labels.tolist())] += 1
        assert set(counts) == {(0, 0, 1), (0, 1, 0), (1, 0, 0)}
        chi2, p_value = stats.chisquare(list(counts.values()))
        assert p_value > 0.001


class TestRandomizedDistribution:
    def test_deterministic_given_seed(self, two_triangles):
        meta = relabel_partition([0, 0, 1, 1, 0, 1])
        a = randomized_dl_distribution(two_triangles, meta, Variant.DC,
                                       n_permutations=120, seed=7)
        b = randomized_dl_distribution(two_triangles, meta, Variant.DC,
                                       n_permutations=120, seed=7)
        assert np.array_equal(a.dls, b.dls)
        c = randomized_dl_distribution(two_triangles, meta, Variant.DC,
                                       n_permutations=120, seed=8)
        assert not np.array_equal(a.dls, c.dls)

    def test_single_block_metadata_constant(self, two_triangles):
        meta = relabel_partition([0] * 6)
        ens = randomized_dl_distribution(two_triangles, meta, Variant.NDC,
                                         n_permutations=100, seed=0)
        assert np.unique(ens.dls).size == 1

    def test_all_finite(self, two_triangles):
        meta = relabel_partition([0, 1, 0, 1, 0, 1])
        ens = randomized_dl_distribution(two_triangles, meta, Variant.PP_UNIFORM,
                                         n_permutations=150, seed=3)
        assert np.all(np.isfinite(ens.dls))
        assert ens.dls.shape == (150,)

    def test_length_mismatch_rejected(self, two_triangles):
        with pytest.raises(ValueError):
            randomized_dl_distribution(two_triangles, relabel_partition([0, 1]),
                                       Variant.DC, n_permutations=100)


class TestSigmaRand:
    def test_order_statistic_alpha_001(self):
        ens = make_ensemble(np.arange(1, 501), alpha=0.01)
        assert sigma_rand(ens) == 5.0

    def test_order_statistic_alpha_005(self):
        ens = make_ensemble(np.arange(1, 501), alpha=0.05)
        assert sigma_rand(ens) == 25.0

    def test_all_identical(self):
        ens = make_ensemble(np.full(200, 3.25), alpha=0.01)
        assert sigma_rand(ens) == 3.25

    def test_unsorted_input(self):
        rng = np.random.default_rng(0)
        vals = rng.permutation(np.arange(1, 501)).astype(float)
        assert sigma_rand(make_ensemble(vals, alpha=0.01)) == 5.0

    def test_too_few_permutations_rejected(self):
        with pytest.raises(ValueError, match="increase the number of permutations"):
            make_ensemble(np.arange(1, 51), alpha=0.01)

    def test_nondecreasing_in_alpha(self):
        # larger significance level -> higher order statistic
        vals = np.sort(np.random.default_rng(5).normal(size=500))
        prev = -math.inf
        for alpha in (0.002, 0.01, 0.02, 0.05, 0.2):
            cur = sigma_rand(make_ensemble(vals, alpha=alpha))
            assert cur >= prev
            prev = cur


class TestBestestPvalue:
    def test_floor_at_one_over_np(self):
        ens = make_ensemble(np.arange(1, 501), alpha=0.01)
        assert bestest_pvalue(0.5, ens) == pytest.approx(1 / 500)

    def test_above_everything(self):
        ens = make_ensemble(np.arange(1, 501), alpha=0.01)
        assert bestest_pvalue(1e9, ens) == 1.0

    def test_median_position(self):
        ens = make_ensemble(np.arange(1, 501), alpha=0.01)
        assert bestest_pvalue(250.0, ens) == pytest.approx(0.5)

    def test_ties_count_against_metadata(self):
        ens = make_ensemble(np.full(100, 2.0), alpha=0.05)
        assert bestest_pvalue(2.0, ens) == 1.0

    def test_nonfinite_rejected(self):
        ens = make_ensemble(np.arange(1, 201), alpha=0.01)
        with pytest.raises(ValueError):
            bestest_pvalue(math.nan, ens)


class TestEnsembleCsv:
    def test_roundtrip(self):
        ens = make_ensemble(np.array([1.5, 2.25, 0.125] + [3.0] * 97), alpha=0.05)
        text = ensemble_to_csv(ens)
        lines = text.strip().splitlines()
        assert lines[0] == "dl_nats"
        assert [float(x) for x in lines[1:4]] == [1.5, 2.25, 0.125]
