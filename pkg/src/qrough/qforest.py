"""Quantum-inspired forest regressor.

An ensemble of variance-reduction decision trees. Each node's split search
enumerates every (feature, midpoint-threshold) candidate exhaustively (the
classical computation behind the "evaluate all split points at once" framing)
and keeps the split with the largest weighted impurity decrease. Leaves
predict the mean target of their rows; the forest averages its trees.

Impurity is the population variance of the node targets. Candidate splits
are scored in exact rational arithmetic: mathematically equal reductions
must compare as equal (ties go to the lower feature index, then the lower
threshold), and float rounding would otherwise rank them by accident of
summation order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import fsum
from typing import NamedTuple, Optional, Union

import numpy as np


@dataclass(frozen=True)
class ForestConfig:
    num_trees: int = 25
    max_depth: int = 4
    min_leaf: int = 2
    bootstrap: bool = True
    seed: int = 42

    def __post_init__(self):
        if self.num_trees < 1:
            raise ValueError("num_trees must be >= 1")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


class Split(NamedTuple):
    feature: int
    threshold: float
    decrease: float


@dataclass(frozen=True)
class Leaf:
    prediction: float
    count: int


@dataclass(frozen=True)
class Node:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Node]


def _mean(values) -> float:
    return fsum(float(v) for v in values) / len(values)


def best_split(features: np.ndarray, targets: np.ndarray, min_leaf: int = 1) -> Optional[Split]:
    """Best variance-reducing split of a node, or None if no valid one exists.

    Candidates are the midpoints between consecutive distinct values of each
    feature; a candidate is valid when both children hold >= min_leaf rows
    and the weighted impurity decrease is strictly positive. Scoring uses
    exact arithmetic on the sum-of-squared-errors identity
    n * decrease = SSE(parent) - SSE(left) - SSE(right).
    """
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n = len(targets)
    if n < 2 * min_leaf:
        return None

    y = [Fraction(float(t)) for t in targets]
    y_squared = [v * v for v in y]
    total = sum(y)
    total_squared = sum(y_squared)
    sse_parent = total_squared - total * total / n
    if sse_parent == 0:
        return None

    best: tuple[Fraction, int, float] | None = None
    for f in range(features.shape[1]):
        order = np.argsort(features[:, f], kind="stable")
        column = features[order, f]
        left_sum = Fraction(0)
        left_squared = Fraction(0)
        for i in range(n - 1):
            left_sum += y[order[i]]
            left_squared += y_squared[order[i]]
            if column[i + 1] == column[i]:
                continue
            threshold = float((column[i] + column[i + 1]) / 2.0)
            if not column[i] < threshold:  # no float strictly between the two values
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            right_sum = total - left_sum
            sse_children = (
                left_squared - left_sum * left_sum / n_left
                + (total_squared - left_squared) - right_sum * right_sum / n_right
            )
            decrease = (sse_parent - sse_children) / n
            if decrease <= 0:
                continue
            if best is None or decrease > best[0]:
                best = (decrease, f, threshold)
    if best is None:
        return None
    return Split(best[1], best[2], float(best[0]))


def build_tree(features: np.ndarray, targets: np.ndarray, config: ForestConfig, depth: int = 0) -> TreeNode:
    """Recursively grow a tree; rows with feature < threshold go left."""
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if len(targets) == 0:
        raise ValueError("cannot build a tree from zero rows")

    split = None
    if depth < config.max_depth and len(targets) >= 2 * config.min_leaf:
        split = best_split(features, targets, config.min_leaf)
    if split is None:
        return Leaf(prediction=_mean(targets), count=len(targets))

    left = features[:, split.feature] < split.threshold
    return Node(
        feature=split.feature,
        threshold=split.threshold,
        left=build_tree(features[left], targets[left], config, depth + 1),
        right=build_tree(features[~left], targets[~left], config, depth + 1),
    )


def predict_tree(node: TreeNode, row: np.ndarray) -> float:
    while isinstance(node, Node):
        node = node.left if row[node.feature] < node.threshold else node.right
    return node.prediction


@dataclass(frozen=True)
class Forest:
    trees: tuple[TreeNode, ...]
    config: ForestConfig

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=float))
        return np.array([predict_forest(self, row) for row in features])


def fit_forest(features: np.ndarray, targets: np.ndarray, config: ForestConfig) -> Forest:
    """Train the ensemble; per-tree randomness derives from (seed, tree index)."""
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if len(targets) == 0:
        raise ValueError("cannot fit a forest on an empty training set")

    n = len(targets)
    trees = []
    for i in range(config.num_trees):
        if config.bootstrap:
            rng = np.random.default_rng((config.seed, i))
            idx = rng.integers(0, n, size=n)
            trees.append(build_tree(features[idx], targets[idx], config))
        else:
            trees.append(build_tree(features, targets, config))
    return Forest(trees=tuple(trees), config=config)


def predict_forest(forest: Forest, row: np.ndarray) -> float:
    """Arithmetic mean of the per-tree predictions for one feature row."""
    row = np.asarray(row, dtype=float)
    return _mean([predict_tree(tree, row) for tree in forest.trees])


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"prediction": node.prediction, "count": node.count}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if "prediction" in d:
        return Leaf(prediction=d["prediction"], count=d["count"])
    return Node(
        feature=d["feature"],
        threshold=d["threshold"],
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
    )


def forest_to_dict(forest: Forest) -> dict:
    return {
        "config": {
            "num_trees": forest.config.num_trees,
            "max_depth": forest.config.max_depth,
            "min_leaf": forest.config.min_leaf,
            "bootstrap": forest.config.bootstrap,
            "seed": forest.config.seed,
        },
        "trees": [_node_to_dict(t) for t in forest.trees],
    }


def forest_from_dict(d: dict) -> Forest:
    return Forest(
        trees=tuple(_node_from_dict(t) for t in d["trees"]),
        config=ForestConfig(**d["config"]),
    )


def save_forest(forest: Forest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(forest_to_dict(forest), fh, indent=2)


def load_forest(path) -> Forest:
    with open(path, encoding="utf-8") as fh:
        return forest_from_dict(json.load(fh))
