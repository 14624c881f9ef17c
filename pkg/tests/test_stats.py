import numpy as np
import pytest

from apsel.dataset import DiscretizedDataset, FingerprintDataset, discretize
from apsel.stats import (
    chi_square,
    contingency_table,
    cramers_v,
    importance_vector,
    pearson,
    redundancy_matrix,
)
from helpers import naive_chi_square, naive_cramers_v, naive_pearson


class TestContingencyTable:
    def test_perfect_association_layout(self):
        table = contingency_table([0, 0, 1, 1], ["A", "A", "B", "B"])
        assert np.array_equal(table, [[2, 0], [0, 2]])

    def test_independence_layout(self):
        table = contingency_table([0, 1, 0, 1], ["A", "A", "B", "B"])
        assert np.array_equal(table, [[1, 1], [1, 1]])

    def test_direct_count_oracle(self):
        bins = [0, 0, 0, 1, 0, 1, 1, 1]
        floors = ["A", "A", "A", "A", "B", "B", "B", "B"]
        table = contingency_table(bins, floors)
        assert np.array_equal(table, [[3, 1], [1, 3]])
        assert table.sum() == len(bins)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            contingency_table([0, 1], ["A"])


class TestChiSquare:
    def test_diagonal_table(self):
        assert chi_square([[2, 0], [0, 2]]) == pytest.approx(4.0)

    def test_uniform_table(self):
        assert chi_square([[1, 1], [1, 1]]) == 0.0

    def test_mixed_table(self):
        assert chi_square([[3, 1], [1, 3]]) == pytest.approx(2.0)

    def test_zero_marginal_rows_ignored(self):
        with_empty = chi_square([[2, 0], [0, 0], [0, 2]])
        assert with_empty == pytest.approx(4.0)

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            chi_square([[0, 0], [0, 0]])


class TestCramersV:
    def test_hand_cases(self):
        assert cramers_v([[2, 0], [0, 2]], 4) == pytest.approx(1.0)
        assert cramers_v([[1, 1], [1, 1]], 4) == 0.0
        assert cramers_v([[3, 1], [1, 3]], 8) == pytest.approx(0.5)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        table = rng.integers(0, 9, size=(5, 3))
        table[0, 0] += 1  # ensure nonzero
        base = cramers_v(table)
        for _ in range(10):
            shuffled = table[rng.permutation(5)][:, rng.permutation(3)]
            assert cramers_v(shuffled) == pytest.approx(base, abs=1e-12)

    def test_degenerate_single_row(self):
        assert cramers_v([[3, 4]], 7) == 0.0

    def test_effective_vs_nominal_dims(self):
        table = [[2, 0], [0, 0], [0, 2]]  # middle bin empty
        assert cramers_v(table, 4, effective_dims=True) == pytest.approx(1.0)
        # nominal uses min(3-1, 2-1) = 1 here as well; widen the gap instead
        wide = [[4, 0, 0], [0, 4, 0], [0, 0, 0]]
        eff = cramers_v(wide, 8, effective_dims=True)
        nom = cramers_v(wide, 8, effective_dims=False)
        assert eff == pytest.approx(1.0)
        assert nom < eff

    def test_matches_naive_on_random_tables(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            shape = (int(rng.integers(2, 7)), int(rng.integers(2, 6)))
            table = rng.integers(0, 12, size=shape)
            if table.sum() == 0:
                table[0, 0] = 1
            ours = cramers_v(table)
            theirs = naive_cramers_v(table.tolist())
            assert ours == pytest.approx(theirs, abs=1e-10)


class TestImportance:
    def test_perfect_predictor(self):
        bins = np.array([[0], [1], [0], [1]], dtype=np.int16)
        dd = DiscretizedDataset(bins=bins, b=2, floors=np.array(["A", "B", "A", "B"]), ap_ids=("W1",))
        assert importance_vector(dd)[0] == pytest.approx(1.0)

    def test_all_sentinel_column_scores_zero(self, small_dataset):
        importance = importance_vector(discretize(small_dataset, b=10))
        assert importance[2] == 0.0

    def test_informative_columns_rank_first(self):
        rng = np.random.default_rng(11)
        m = 800
        floor = rng.integers(0, 4, size=m)
        informative = np.stack(
            [-90.0 + 20.0 * floor + rng.normal(0, 1.5, m) for _ in range(5)], axis=1
        )
        noise = rng.uniform(-104, 0, size=(m, 15))
        rss = np.clip(np.column_stack([informative, noise]), -104, 0)
        d = FingerprintDataset(
            rss=rss, floors=floor.astype(str), ap_ids=tuple(f"W{i}" for i in range(20))
        )
        importance = importance_vector(discretize(d, 10))
        assert set(np.argsort(importance)[-5:]) == {0, 1, 2, 3, 4}

    def test_within_unit_interval(self, synthetic_default):
        importance = importance_vector(discretize(synthetic_default, 10))
        assert (importance >= 0).all() and (importance <= 1).all()


class TestPearson:
    def test_exact_linear(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_exact_anticorrelation(self):
        assert pearson([1, 2, 3], [6, 4, 2]) == pytest.approx(-1.0)

    def test_hand_value(self):
        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)

    def test_zero_variance(self):
        assert pearson([5, 5, 5], [1, 2, 3]) == 0.0

    def test_length_errors(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson([1], [2])

    def test_affine_invariance(self):
        rng = np.random.default_rng(2)
        u = rng.normal(size=30)
        v = rng.normal(size=30)
        base = pearson(u, v)
        assert pearson(3.0 * u + 7.0, v) == pytest.approx(base, abs=1e-12)
        assert pearson(-2.0 * u + 1.0, v) == pytest.approx(-base, abs=1e-12)

    def test_matches_naive_on_random_vectors(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            size = int(rng.integers(2, 40))
            u = rng.normal(size=size)
            v = rng.normal(size=size)
            assert pearson(u, v) == pytest.approx(naive_pearson(u, v), abs=1e-10)


class TestChiSquareOracle:
    def test_matches_naive_on_random_tables(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            shape = (int(rng.integers(2, 8)), int(rng.integers(2, 6)))
            table = rng.integers(0, 15, size=shape)
            if table.sum() == 0:
                table[0, 0] = 2
            assert chi_square(table) == pytest.approx(
                naive_chi_square(table.tolist()), abs=1e-10
            )


class TestRedundancyMatrix:
    def test_affine_copy_is_fully_redundant(self, small_dataset):
        r = redundancy_matrix(small_dataset)
        assert r[0, 1] == pytest.approx(1.0, abs=1e-9)

    def test_independent_columns_near_zero(self):
        rng = np.random.default_rng(13)
        d = FingerprintDataset(
            rss=rng.uniform(-104, 0, size=(10000, 4)),
            floors=rng.choice(["a", "b"], size=10000),
            ap_ids=tuple(f"W{i}" for i in range(4)),
        )
        r = redundancy_matrix(d)
        off = r[~np.eye(4, dtype=bool)]
        assert (off < 0.05).all()

    def test_exactly_symmetric_zero_diagonal(self, synthetic_default):
        r = redundancy_matrix(synthetic_default)
        assert np.array_equal(r, r.T)
        assert (np.diagonal(r) == 0).all()
        assert (r >= 0).all() and (r <= 1).all()

    def test_constant_column_uncorrelated(self, small_dataset):
        r = redundancy_matrix(small_dataset)
        assert (r[2] == 0).all()

    def test_sentinel_substitution_applied(self):
        # detection pattern tracks the floor; raw sentinel=100 would flip the sign
        rss = np.array(
            [[-30.0, -30.0], [100.0, -90.0], [-35.0, -32.0], [100.0, -88.0]]
        )
        d = FingerprintDataset(rss=rss, floors=["a", "b", "a", "b"], ap_ids=("W1", "W2"))
        r = redundancy_matrix(d)
        filled = d.filled_rss()
        assert filled[1, 0] == -105.0
        expected = abs(naive_pearson(filled[:, 0], filled[:, 1]))
        assert r[0, 1] == pytest.approx(expected, abs=1e-12)

    def test_matches_naive_pairwise(self, small_dataset):
        r = redundancy_matrix(small_dataset)
        filled = small_dataset.filled_rss()
        for i in range(4):
            for j in range(4):
                expected = 0.0 if i == j else abs(naive_pearson(filled[:, i], filled[:, j]))
                assert r[i, j] == pytest.approx(expected, abs=1e-10)
