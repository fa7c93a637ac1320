import numpy as np
import pytest

from conftest import random_tree
from depdist.arrangement import (
    ArrangementBudgetError,
    _all_positions,
    _minla_best_first,
    _minla_subsets_dp,
    brute_force_min_arrangement,
)
from depdist.optimality import (
    average_omega,
    expected_random,
    min_arrangement,
    omega,
    sum_distances,
)
from depdist.treebank import DepTree

FIGURE_TREE = DepTree((2, 0, 2, 5, 2, 8, 8, 5))


def chain(n):
    return DepTree((0,) + tuple(range(1, n)))


def star(n):
    return DepTree((0,) + (1,) * (n - 1))


def permutation_average(tree):
    """Oracle: mean total distance over every ordering of the sentence."""
    pos = _all_positions(tree.n).astype(np.int32)
    total = np.zeros(len(pos), dtype=np.int64)
    for u, v in tree.edges():
        total += np.abs(pos[:, u] - pos[:, v])
    return total.mean()


class TestSumDistances:
    def test_eight_word_sentence(self):
        assert sum_distances(FIGURE_TREE) == 12

    def test_chain(self):
        assert sum_distances(chain(3)) == 2

    def test_center_headed(self):
        assert sum_distances(DepTree((2, 0, 2))) == 2

    def test_single_word(self):
        assert sum_distances(DepTree((0,))) == 0


class TestExpectedRandom:
    def test_three_words_vs_enumeration(self):
        tree = DepTree((2, 0, 2))
        assert expected_random(tree) == pytest.approx(8 / 3)
        assert expected_random(tree) == pytest.approx(
            permutation_average(tree))

    def test_two_words(self):
        assert expected_random(DepTree((2, 0))) == 1.0

    def test_chain_of_seven(self):
        tree = chain(7)
        assert expected_random(tree) == pytest.approx(16.0)
        assert expected_random(tree) == pytest.approx(
            permutation_average(tree), abs=1e-12)

    def test_any_shape_matches_permutation_average(self):
        rng = np.random.default_rng(1)
        for n in range(2, 8):
            for _ in range(5):
                tree = random_tree(n, rng)
                assert expected_random(tree) == pytest.approx(
                    permutation_average(tree), abs=1e-12)

    def test_single_word_undefined(self):
        assert expected_random(DepTree((0,))) is None


class TestMinArrangement:
    def test_small_star(self):
        assert min_arrangement(star(3)) == 2
        assert min_arrangement(star(4)) == 4

    def test_chain_any_length(self):
        for n in (2, 5, 13, 24, 40):
            assert min_arrangement(chain(n)) == n - 1

    def test_star_split_formula(self):
        # Leaves split around the hub: ranks 1..ceil and 1..floor per side.
        for n in (5, 8, 11, 14):
            leaves = n - 1
            left = leaves // 2
            right = leaves - left
            expected = (left * (left + 1) + right * (right + 1)) // 2
            assert min_arrangement(star(n)) == expected

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for n in range(2, 10):
            for _ in range(30):
                tree = random_tree(n, rng)
                assert min_arrangement(tree) == brute_force_min_arrangement(
                    tree.edges(), tree.n)

    def test_search_matches_subsets_dp(self):
        rng = np.random.default_rng(3)
        for n in (14, 15, 16):
            for _ in range(8):
                tree = random_tree(n, rng)
                assert _minla_best_first(tree.edges(), n, 10**7) \
                    == _minla_subsets_dp(tree.edges(), n)

    def test_budget_error_and_fallback(self):
        rng = np.random.default_rng(4)
        tree = random_tree(16, rng)
        with pytest.raises(ArrangementBudgetError):
            _minla_best_first(tree.edges(), tree.n, node_budget=1)
        # The public entry point falls back to the exhaustive DP.
        assert min_arrangement(tree, node_budget=1) \
            == _minla_subsets_dp(tree.edges(), tree.n)

    def test_budget_error_beyond_fallback(self):
        tree = random_tree(30, np.random.default_rng(5))
        with pytest.raises(ArrangementBudgetError):
            min_arrangement(tree, node_budget=1)

    def test_never_above_observed(self):
        rng = np.random.default_rng(6)
        for _ in range(60):
            tree = random_tree(int(rng.integers(2, 14)), rng)
            assert min_arrangement(tree) <= sum_distances(tree)


class TestOmega:
    def test_fully_minimized_three_words(self):
        result = omega(DepTree((2, 0, 2)))  # distances {1, 1}
        assert result.omega == 1.0
        assert result.distance_sum == 2
        assert result.minimum == 2

    def test_anti_minimized_three_words(self):
        result = omega(DepTree((0, 3, 1)))  # distances {1, 2}: d(1,3)=2
        assert result.distance_sum == 3
        assert result.omega == -0.5  # exact: (8/3 - 3) / (8/3 - 2)

    def test_two_words_undefined(self):
        result = omega(DepTree((2, 0)))
        assert result.omega is None
        assert result.random_baseline == result.minimum == 1

    def test_single_word_undefined(self):
        result = omega(DepTree((0,)))
        assert result.omega is None

    def test_at_most_one(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            tree = random_tree(int(rng.integers(3, 12)), rng)
            assert omega(tree).omega <= 1.0

    def test_reversal_invariance(self):
        # Mirroring the sentence preserves every distance, hence the score.
        rng = np.random.default_rng(8)
        for _ in range(40):
            tree = random_tree(int(rng.integers(3, 11)), rng)
            n = tree.n
            mirrored = DepTree(tuple(
                0 if tree.heads[n - 1 - i] == 0
                else n + 1 - tree.heads[n - 1 - i]
                for i in range(n)
            ))
            assert omega(mirrored).omega == omega(tree).omega


class TestAverageOmega:
    def test_single_sentence_group(self):
        tree = DepTree((2, 0, 2))
        stats = average_omega([tree])
        assert stats[3].mean_omega == 1.0
        assert stats[3].count == 1
        assert stats[3].skipped == 0

    def test_mean_of_two(self):
        trees = [DepTree((2, 0, 2)), DepTree((0, 3, 1))]  # scores 1, -0.5
        stats = average_omega(trees)
        assert stats[3].mean_omega == pytest.approx(0.25)

    def test_chains_are_fully_optimized(self):
        trees = [chain(n) for n in (3, 4, 5, 6)] * 2
        stats = average_omega(trees)
        for n in (3, 4, 5, 6):
            assert stats[n].mean_omega == 1.0
            assert stats[n].count == 2

    def test_undefined_scores_skipped_not_zero(self):
        trees = [DepTree((2, 0)), DepTree((2, 0)), DepTree((2, 0, 2))]
        stats = average_omega(trees)
        assert stats[2].mean_omega is None
        assert stats[2].skipped == 2
        assert stats[3].mean_omega == 1.0

    def test_budget_exhaustion_counts_as_unsolved(self, monkeypatch):
        import depdist.optimality as optimality

        def explode(edges, n, **kwargs):
            raise ArrangementBudgetError("stub")

        monkeypatch.setattr(optimality, "min_arrangement_cost", explode)
        trees = [DepTree((2, 0, 2)), DepTree((0, 1, 2))]
        stats = average_omega(trees)
        assert stats[3].unsolved == 2
        assert stats[3].count == 0
        assert stats[3].mean_omega is None


class TestStructuredShapes:
    def test_spider_trees_search_equals_dp(self):
        # Crossing optima appear on stars with subdivided legs; both exact
        # solvers must agree there.
        for legs, length in ((5, 3), (4, 4), (6, 3), (3, 5)):
            heads = [0]
            for _ in range(legs):
                attach = 1  # leg root hangs off the hub (token 1)
                for _ in range(length):
                    heads.append(attach)
                    attach = len(heads)
            tree = DepTree(tuple(heads))
            assert _minla_best_first(tree.edges(), tree.n, 10**7) \
                == _minla_subsets_dp(tree.edges(), tree.n)

    def test_double_star_search_equals_dp(self):
        for left, right in ((8, 8), (10, 6), (5, 11)):
            heads = [0] + [1] * left + [1] + [2 + left] * right
            tree = DepTree(tuple(heads))
            assert tree.n == left + right + 2
            assert _minla_best_first(tree.edges(), tree.n, 10**7) \
                == _minla_subsets_dp(tree.edges(), tree.n)
