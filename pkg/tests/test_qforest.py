import numpy as np
import pytest

from qrough.qforest import (
    Forest,
    ForestConfig,
    Leaf,
    Node,
    best_split,
    build_tree,
    fit_forest,
    forest_from_dict,
    forest_to_dict,
    load_forest,
    predict_forest,
    predict_tree,
    save_forest,
)

from oracles import brute_force_best_split

FOUR_ROWS = (np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([0.0, 0.0, 10.0, 10.0]))


class TestBestSplit:
    def test_hand_worked_example(self):
        # parent variance 25, both children pure -> decrease 25 at x = 2.5
        split = best_split(*FOUR_ROWS)
        assert split.feature == 0
        assert split.threshold == 2.5
        assert split.decrease == 25.0

    def test_constant_targets_give_none(self):
        X = np.array([[1.0], [2.0], [3.0]])
        assert best_split(X, np.array([4.0, 4.0, 4.0])) is None

    def test_tie_prefers_lower_feature_index(self):
        # identical columns: identical best decreases, feature 0 must win
        X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]])
        split = best_split(X, FOUR_ROWS[1])
        assert split.feature == 0

    def test_min_leaf_restricts_candidates(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 5.0, 5.0, 5.0])
        unrestricted = best_split(X, y, min_leaf=1)
        assert unrestricted.threshold == 1.5
        restricted = best_split(X, y, min_leaf=2)
        assert restricted.threshold == 2.5

    def test_too_few_rows_for_min_leaf(self):
        X = np.array([[1.0], [2.0], [3.0]])
        assert best_split(X, np.array([0.0, 1.0, 2.0]), min_leaf=2) is None

    def test_matches_brute_force_on_random_data(self, rng):
        for trial in range(150):
            n_rows = int(rng.integers(2, 9))
            n_features = int(rng.integers(1, 4))
            if trial % 2:
                X = rng.integers(0, 4, size=(n_rows, n_features)).astype(float)
                y = rng.integers(0, 5, size=n_rows).astype(float)
            else:
                X = rng.uniform(0, 1, size=(n_rows, n_features))
                y = rng.uniform(0, 10, size=n_rows)
            min_leaf = int(rng.integers(1, 3))
            ours = best_split(X, y, min_leaf)
            oracle = brute_force_best_split(X, y, min_leaf)
            if oracle is None:
                assert ours is None
            else:
                assert ours is not None
                assert (ours.feature, ours.threshold) == (oracle[0], oracle[1])
                assert ours.decrease == pytest.approx(oracle[2], abs=1e-12)


class TestBuildTree:
    def test_hand_worked_tree(self):
        tree = build_tree(*FOUR_ROWS, ForestConfig(max_depth=3, min_leaf=1))
        assert isinstance(tree, Node)
        assert tree.threshold == 2.5
        assert tree.left == Leaf(prediction=0.0, count=2)
        assert tree.right == Leaf(prediction=10.0, count=2)

    def test_max_depth_zero_is_global_mean_leaf(self):
        tree = build_tree(*FOUR_ROWS, ForestConfig(max_depth=0))
        assert tree == Leaf(prediction=5.0, count=4)

    def test_duplicate_features_mixed_targets(self):
        X = np.ones((4, 2))
        y = np.array([1.0, 2.0, 3.0, 6.0])
        tree = build_tree(X, y, ForestConfig(max_depth=5, min_leaf=1))
        assert tree == Leaf(prediction=3.0, count=4)

    def test_empty_rows_rejected(self):
        with pytest.raises(ValueError):
            build_tree(np.empty((0, 2)), np.empty(0), ForestConfig())

    def test_routing_reaches_exactly_one_leaf(self, rng):
        X = rng.uniform(0, 1, size=(20, 3))
        y = rng.uniform(0, 10, size=20)
        tree = build_tree(X, y, ForestConfig(max_depth=6, min_leaf=1))

        def leaf_counts(node):
            if isinstance(node, Leaf):
                return node.count
            return leaf_counts(node.left) + leaf_counts(node.right)

        assert leaf_counts(tree) == 20


class TestForest:
    def test_single_tree_no_bootstrap_is_passthrough(self, rng):
        X = rng.uniform(0, 1, size=(10, 2))
        y = rng.uniform(0, 10, size=10)
        config = ForestConfig(num_trees=1, bootstrap=False, min_leaf=1, max_depth=4)
        forest = fit_forest(X, y, config)
        tree = build_tree(X, y, config)
        for row in X:
            assert predict_forest(forest, row) == predict_tree(tree, row)

    def test_constant_targets_predict_constant(self, rng):
        X = rng.uniform(0, 1, size=(12, 3))
        y = np.full(12, 7.25)
        forest = fit_forest(X, y, ForestConfig(num_trees=5))
        assert np.all(forest.predict(X) == 7.25)

    def test_prediction_is_mean_of_trees(self):
        forest = Forest(
            trees=(Leaf(6.0, 1), Leaf(8.0, 1), Leaf(10.0, 1)),
            config=ForestConfig(num_trees=3),
        )
        assert predict_forest(forest, np.array([0.0])) == 8.0

    def test_zero_training_mse_with_distinct_rows(self, rng):
        for _ in range(10):
            n = int(rng.integers(3, 9))
            X = rng.uniform(0, 1, size=(n, 2))  # distinct with probability 1
            y = rng.uniform(0, 10, size=n)
            config = ForestConfig(num_trees=1, max_depth=32, min_leaf=1, bootstrap=False)
            forest = fit_forest(X, y, config)
            assert np.max(np.abs(forest.predict(X) - y)) < 1e-12

    def test_predictions_bounded_by_trees_and_targets(self, rng):
        X = rng.uniform(0, 1, size=(25, 3))
        y = rng.uniform(5, 11, size=25)
        forest = fit_forest(X, y, ForestConfig(num_trees=10))
        for row in rng.uniform(-1, 2, size=(30, 3)):
            per_tree = [predict_tree(t, row) for t in forest.trees]
            combined = predict_forest(forest, row)
            assert min(per_tree) - 1e-12 <= combined <= max(per_tree) + 1e-12
            assert y.min() - 1e-12 <= combined <= y.max() + 1e-12

    def test_deterministic_given_config(self, rng):
        X = rng.uniform(0, 1, size=(15, 2))
        y = rng.uniform(0, 10, size=15)
        config = ForestConfig(num_trees=7, seed=99)
        assert fit_forest(X, y, config) == fit_forest(X, y, config)

    def test_row_order_irrelevant_without_bootstrap(self, rng):
        X = rng.uniform(0, 1, size=(12, 2))
        y = rng.uniform(0, 10, size=12)
        config = ForestConfig(num_trees=1, bootstrap=False, max_depth=5, min_leaf=1)
        perm = rng.permutation(12)
        assert fit_forest(X, y, config) == fit_forest(X[perm], y[perm], config)

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValueError):
            fit_forest(np.empty((0, 2)), np.empty(0), ForestConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ForestConfig(num_trees=0)
        with pytest.raises(ValueError):
            ForestConfig(min_leaf=0)


class TestSerialization:
    def test_round_trip_preserves_predictions(self, rng, tmp_path):
        X = rng.uniform(0, 1, size=(20, 3))
        y = rng.uniform(5, 11, size=20)
        forest = fit_forest(X, y, ForestConfig(num_trees=4))
        path = tmp_path / "forest.json"
        save_forest(forest, path)
        loaded = load_forest(path)
        assert loaded == forest
        assert np.array_equal(loaded.predict(X), forest.predict(X))

    def test_dict_round_trip(self, rng):
        X = rng.uniform(0, 1, size=(8, 2))
        y = rng.uniform(0, 10, size=8)
        forest = fit_forest(X, y, ForestConfig(num_trees=2, bootstrap=False))
        assert forest_from_dict(forest_to_dict(forest)) == forest
