"""Gain-ratio decision tree (C4.5 style) for scoring imputed datasets.

Induction picks, among candidate splits whose information gain is at least
the mean gain of the positive-gain candidates, the one with the highest gain
ratio. Numeric attributes are split at midpoints between consecutive distinct
values. Pruning replaces a subtree by a leaf whenever the leaf's pessimistic
error estimate (upper binomial confidence limit at level ``cf``) does not
exceed the summed estimate of the subtree's leaves.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

from scipy.stats import beta

from .dataset import Dataset

EPS = 1e-12


@dataclass
class Leaf:
    label: str
    support: int
    counts: dict


@dataclass
class NominalSplit:
    attribute: int
    children: dict
    default: "Node"
    counts: dict


@dataclass
class NumericSplit:
    attribute: int
    threshold: float
    left: "Node"
    right: "Node"
    counts: dict


Node = Union[Leaf, NominalSplit, NumericSplit]


@dataclass(frozen=True)
class SplitCandidate:
    attribute: int
    threshold: float | None
    info_gain: float
    split_info: float
    gain_ratio: float


def entropy(counts: Sequence[float]) -> float:
    total = sum(counts)
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def _candidate(attribute, threshold, parent_h, n, partitions) -> SplitCandidate:
    """``partitions`` is a list of class-count lists, one per branch."""
    sizes = [sum(p) for p in partitions]
    cond = sum(s / n * entropy(p) for s, p in zip(sizes, partitions) if s)
    gain = parent_h - cond
    si = entropy(sizes)
    return SplitCandidate(attribute, threshold, gain, si, gain / si if si > 0 else 0.0)


def nominal_candidate(values, labels, classes, attribute, levels, min_leaf) -> SplitCandidate | None:
    n = len(labels)
    by_level = {lv: Counter() for lv in levels}
    for v, c in zip(values, labels):
        by_level[v][c] += 1
    parts = [[by_level[lv][c] for c in classes] for lv in levels if by_level[lv]]
    if sum(1 for p in parts if sum(p) >= min_leaf) < 2:
        return None
    parent = [labels.count(c) for c in classes]
    return _candidate(attribute, None, entropy(parent), n, parts)


def numeric_candidate(values, labels, classes, attribute, min_leaf) -> SplitCandidate | None:
    """Best midpoint threshold by information gain (ties to the lowest)."""
    n = len(labels)
    order = sorted(range(n), key=lambda i: values[i])
    parent = Counter(labels)
    parent_h = entropy([parent[c] for c in classes])
    left = Counter()
    best = None
    for pos in range(n - 1):
        i = order[pos]
        left[labels[i]] += 1
        v, nxt = values[i], values[order[pos + 1]]
        if v == nxt:
            continue
        n_left = pos + 1
        if n_left < min_leaf or n - n_left < min_leaf:
            continue
        lp = [left[c] for c in classes]
        rp = [parent[c] - left[c] for c in classes]
        cand = _candidate(attribute, (v + nxt) / 2.0, parent_h, n, [lp, rp])
        if best is None or cand.info_gain > best.info_gain + EPS:
            best = cand
    return best


def choose_split(candidates: Sequence[SplitCandidate]) -> SplitCandidate | None:
    """Mean-gain gate, then maximal gain ratio (first candidate wins ties).

    If no candidate has positive gain, the first zero-gain candidate is
    returned so that impure nodes can still be separated.
    """
    if not candidates:
        return None
    positive = [c for c in candidates if c.info_gain > EPS]
    if not positive:
        return candidates[0]
    mean_gain = sum(c.info_gain for c in positive) / len(positive)
    best = None
    for c in positive:
        if c.info_gain + EPS < mean_gain:
            continue
        if best is None or c.gain_ratio > best.gain_ratio + EPS:
            best = c
    return best


def _majority(counts: Counter, classes: Sequence[str]) -> str:
    return max(classes, key=lambda c: (counts.get(c, 0), -classes.index(c)))


def _grow(rows, labels, ds, classes, used, min_leaf) -> Node:
    counts = Counter(labels)
    label = _majority(counts, classes)
    n = len(labels)
    if len(counts) <= 1 or n < 2 * min_leaf:
        return Leaf(label, n, dict(counts))
    cands = []
    for j in ds.input_indices:
        attr = ds.attributes[j]
        vals = [r[j] for r in rows]
        if attr.is_nominal:
            if j in used:
                continue
            c = nominal_candidate(vals, labels, classes, j, attr.levels, min_leaf)
        else:
            c = numeric_candidate([float(v) for v in vals], labels, classes, j, min_leaf)
        if c is not None:
            cands.append(c)
    best = choose_split(cands)
    if best is None:
        return Leaf(label, n, dict(counts))
    j = best.attribute
    if best.threshold is None:
        attr = ds.attributes[j]
        children = {}
        for lv in attr.levels:
            idx = [i for i, r in enumerate(rows) if r[j] == lv]
            if idx:
                children[lv] = _grow([rows[i] for i in idx], [labels[i] for i in idx],
                                     ds, classes, used | {j}, min_leaf)
            else:
                children[lv] = Leaf(label, 0, {})
        default = max(children.values(), key=_support)
        return NominalSplit(j, children, default, dict(counts))
    li = [i for i, r in enumerate(rows) if float(r[j]) <= best.threshold]
    ri = [i for i, r in enumerate(rows) if float(r[j]) > best.threshold]
    left = _grow([rows[i] for i in li], [labels[i] for i in li], ds, classes, used, min_leaf)
    right = _grow([rows[i] for i in ri], [labels[i] for i in ri], ds, classes, used, min_leaf)
    return NumericSplit(j, best.threshold, left, right, dict(counts))


def _support(node: Node) -> int:
    return sum(node.counts.values())


def leaf_error_estimate(n: int, errors: int, cf: float) -> float:
    """Pessimistic error count: ``n`` times the upper ``cf`` confidence limit
    of the binomial error rate given ``errors`` observed errors."""
    if n == 0:
        return 0.0
    if errors >= n:
        return float(n)
    return n * float(beta.ppf(1.0 - cf, errors + 1, n - errors))


def children_of(node: Node) -> list[Node]:
    if isinstance(node, NominalSplit):
        return list(node.children.values())
    if isinstance(node, NumericSplit):
        return [node.left, node.right]
    return []


def pessimistic_errors(node: Node, cf: float) -> float:
    if isinstance(node, Leaf):
        n = node.support
        return leaf_error_estimate(n, n - node.counts.get(node.label, 0), cf)
    return sum(pessimistic_errors(c, cf) for c in children_of(node))


def prune(node: Node, cf: float, classes: Sequence[str]) -> Node:
    if isinstance(node, Leaf):
        return node
    if isinstance(node, NominalSplit):
        node = NominalSplit(node.attribute,
                            {lv: prune(c, cf, classes) for lv, c in node.children.items()},
                            None, node.counts)
        node.default = max(node.children.values(), key=_support)
    else:
        node = NumericSplit(node.attribute, node.threshold, prune(node.left, cf, classes),
                            prune(node.right, cf, classes), node.counts)
    n = _support(node)
    label = _majority(Counter(node.counts), classes)
    as_leaf = leaf_error_estimate(n, n - node.counts.get(label, 0), cf)
    if as_leaf <= pessimistic_errors(node, cf) + EPS:
        return Leaf(label, n, dict(node.counts))
    return node


def build_tree(train: Dataset, min_leaf: int = 2, cf: float = 0.25, pruned: bool = True) -> Node:
    if train.n_records == 0:
        raise ValueError("cannot build a tree from an empty training set")
    if not train.is_complete():
        raise ValueError("training data must be complete")
    classes = list(train.class_attribute.levels)
    rows = list(train.records)
    tree = _grow(rows, train.labels, train, classes, frozenset(), max(1, min_leaf))
    return prune(tree, cf, classes) if pruned else tree


def classify(tree: Node, record: Sequence) -> str:
    node = tree
    while not isinstance(node, Leaf):
        v = record[node.attribute]
        if isinstance(node, NominalSplit):
            node = node.children.get(v, node.default)
        elif v is None:
            node = max((node.left, node.right), key=_support)
        else:
            node = node.left if float(v) <= node.threshold else node.right
    return node.label


def accuracy(tree: Node, test: Dataset) -> float:
    """Percentage of test records classified correctly."""
    if test.n_records == 0:
        raise ValueError("empty test set")
    correct = sum(1 for r in test.records if classify(tree, r) == r[-1])
    return 100.0 * correct / test.n_records


def depth(node: Node) -> int:
    kids = children_of(node)
    return 0 if not kids else 1 + max(depth(c) for c in kids)


def leaves(node: Node) -> list[Leaf]:
    if isinstance(node, Leaf):
        return [node]
    return [lf for c in children_of(node) for lf in leaves(c)]
