"""Query-time learners: local smoothing, k-nearest, decision tree, naive Bayes.

These learners answer at a single query point.  Their hypotheses are
constants anchored at the query, the baseline case is the hypothetical
case the hypothesis generates there (or, for naive Bayes, one per
feature), and the counterparts are observed cases selected around the
query: by distance, by tree subdomain, or by shared feature value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .core import (
    Aggregation,
    Case,
    CounterpartSet,
    EmptyLeaf,
    EmptyNeighborhood,
    FamilySpec,
    FeatureVector,
    Hypothesis,
    IncompatibleFamily,
    InconsistencyReport,
    InvalidParameter,
    KExceedsSampleSize,
    Learner,
    NonDisjointValueSets,
    PointwiseHypothesis,
    ProblemStatement,
    Provenance,
    ReportEntry,
    SchemaMismatch,
    TrainingSet,
    YKind,
    describe_hypothesis,
    register_family,
    require_labels,
)

METRICS = ("euclidean", "manhattan")


def distance(x1: FeatureVector, x2: FeatureVector, metric: str = "euclidean") -> float:
    """Distance between two number-valued feature vectors.

    Ordinal positions take part through their rank integers; nominal
    positions have no distance and are rejected.
    """
    if x1.n != x2.n:
        raise SchemaMismatch(f"vectors of dimension {x1.n} and {x2.n}")
    if metric not in METRICS:
        raise InvalidParameter(f"metric must be one of {METRICS}, got {metric!r}")
    total = 0.0
    for pos, (a, b) in enumerate(zip(x1.values, x2.values)):
        if isinstance(a, str) or isinstance(b, str):
            raise SchemaMismatch(f"feature {pos + 1} is nominal; it has no distance")
        d = a - b
        total += d * d if metric == "euclidean" else abs(d)
    return math.sqrt(total) if metric == "euclidean" else total


# ---------------------------------------------------------------------------
# Neighborhoods


@dataclass(frozen=True)
class KNearest:
    """Take the k closest cases; distance ties at the cut are all kept."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise InvalidParameter(f"k must be a positive integer, got {self.k!r}")


@dataclass(frozen=True)
class FixedRadius:
    """Take every case within the radius (inclusive)."""

    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise InvalidParameter(f"radius must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class NeighborhoodSpec:
    mode: Union[KNearest, FixedRadius]
    metric: str = "euclidean"

    def __post_init__(self) -> None:
        if not isinstance(self.mode, (KNearest, FixedRadius)):
            raise InvalidParameter("mode must be KNearest or FixedRadius")
        if self.metric not in METRICS:
            raise InvalidParameter(f"metric must be one of {METRICS}, got {self.metric!r}")


def smoothing_counterparts(
    x0: FeatureVector, training: TrainingSet, spec: NeighborhoodSpec
) -> CounterpartSet:
    """Observed cases around the query, per the neighborhood rule.

    K-nearest keeps training order among the selected cases and extends
    past k when further cases tie the k-th distance exactly, so the
    selection never depends on how equal distances happen to sort.
    """
    dists = [distance(case.x, x0, spec.metric) for case in training.cases]
    if isinstance(spec.mode, KNearest):
        k = spec.mode.k
        if k > training.m:
            raise KExceedsSampleSize(f"k={k} but only {training.m} cases")
        order = sorted(range(training.m), key=lambda i: (dists[i], i))
        cutoff = dists[order[k - 1]]
        chosen = sorted(i for i in range(training.m) if dists[i] <= cutoff)
    else:
        chosen = [i for i in range(training.m) if dists[i] <= spec.mode.radius]
        if not chosen:
            raise EmptyNeighborhood(
                f"no case within radius {spec.mode.radius} of {x0.values!r}"
            )
    members = tuple(training.cases[i] for i in chosen)
    return CounterpartSet(members, Provenance.FROM_TRAINING)


def smoothing_case_inconsistency(h_value: float, counterparts: CounterpartSet) -> float:
    """Absolute gap between the answer and the neighborhood's mean feedback."""
    if len(counterparts) == 0:
        raise EmptyNeighborhood("inconsistency against an empty neighborhood")
    mean = _mean(counterparts.feedbacks)
    return abs(h_value - mean)


def _mean(values: Sequence[float]) -> float:
    total = 0.0
    for v in values:
        total += v
    return total / len(values)


def smoothing_fit(
    x0: FeatureVector, training: TrainingSet, spec: NeighborhoodSpec
) -> PointwiseHypothesis:
    """The inconsistency-minimal constant at the query: the neighborhood mean."""
    counterparts = smoothing_counterparts(x0, training, spec)
    return PointwiseHypothesis(x0, _mean(counterparts.feedbacks))


def _pointwise_report(
    h: PointwiseHypothesis, counterparts: CounterpartSet
) -> InconsistencyReport:
    mu = smoothing_case_inconsistency(h.value, counterparts)
    entry = ReportEntry(Case(h.x0, h.value), mu, len(counterparts))
    return InconsistencyReport.build([entry], Aggregation.SUM, describe_hypothesis(h))


# ---------------------------------------------------------------------------
# k-nearest classification


def knn_predict(
    x0: FeatureVector, training: TrainingSet, k: int, metric: str = "euclidean"
) -> tuple[int, InconsistencyReport]:
    """Binary answer at the query, as an argmin over the two constants.

    The candidate answering 0 is tried first, so an exact tie (neighbor
    labels averaging one half) resolves to 0.
    """
    require_labels(training, YKind.BINARY01)
    spec = NeighborhoodSpec(KNearest(k), metric)
    counterparts = smoothing_counterparts(x0, training, spec)
    best: tuple[int, InconsistencyReport] | None = None
    for label in (0, 1):
        rep = _pointwise_report(PointwiseHypothesis(x0, label), counterparts)
        if best is None or rep.total < best[1].total:
            best = (label, rep)
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Decision trees over ordinal features


@dataclass(frozen=True)
class TreeConfig:
    """Stopping controls for tree construction."""

    max_depth: int = 8
    min_leaf_size: int = 1
    purity_threshold: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.max_depth, int) or self.max_depth < 1:
            raise InvalidParameter(f"max_depth must be >= 1, got {self.max_depth!r}")
        if not isinstance(self.min_leaf_size, int) or self.min_leaf_size < 1:
            raise InvalidParameter(
                f"min_leaf_size must be >= 1, got {self.min_leaf_size!r}"
            )
        if not 0.0 <= self.purity_threshold <= 0.5:
            raise InvalidParameter(
                f"purity_threshold must lie in [0, 0.5], got {self.purity_threshold!r}"
            )


@dataclass(frozen=True)
class TreeLeaf:
    """One subdomain of the partition, holding its training case indices."""

    leaf_id: int
    case_indices: tuple[int, ...]


@dataclass(frozen=True)
class TreeNode:
    """Binary split: cases with ``x[feature] <= threshold`` go left."""

    feature: int
    threshold: int
    left: "TreeNode | TreeLeaf"
    right: "TreeNode | TreeLeaf"


@dataclass(frozen=True)
class TreePartition:
    """An immutable partition of the ordinal feature space into leaves."""

    root: Union[TreeNode, TreeLeaf]
    n_features: int

    def route(self, x: FeatureVector) -> TreeLeaf:
        if x.n != self.n_features:
            raise SchemaMismatch(f"tree splits {self.n_features} features, vector has {x.n}")
        node = self.root
        while isinstance(node, TreeNode):
            node = node.left if x.values[node.feature] <= node.threshold else node.right
        return node

    def leaves(self) -> tuple[TreeLeaf, ...]:
        found: list[TreeLeaf] = []
        stack: list[Union[TreeNode, TreeLeaf]] = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, TreeLeaf):
                found.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return tuple(sorted(found, key=lambda leaf: leaf.leaf_id))


def _impurity(labels: Sequence[float]) -> float:
    p = _mean(labels)
    return p * (1.0 - p)


def _minority_fraction(labels: Sequence[float]) -> float:
    p = _mean(labels)
    return min(p, 1.0 - p)


def _best_split(
    training: TrainingSet, indices: Sequence[int]
) -> tuple[int, int, float] | None:
    """Split with maximal size-weighted impurity decrease, or None.

    Ties break toward the lowest feature index, then the lowest
    threshold, so construction is deterministic.  Splits that fail to
    strictly decrease impurity are not offered.
    """
    labels = [training.cases[i].y for i in indices]
    parent = _impurity(labels)
    size = len(indices)
    best: tuple[int, int, float] | None = None
    for feature in range(training.n):
        values = sorted({training.cases[i].x.values[feature] for i in indices})
        for threshold in values[:-1]:
            left = [training.cases[i].y for i in indices
                    if training.cases[i].x.values[feature] <= threshold]
            right = [training.cases[i].y for i in indices
                     if training.cases[i].x.values[feature] > threshold]
            decrease = parent - (
                len(left) / size * _impurity(left)
                + len(right) / size * _impurity(right)
            )
            if decrease > 0.0 and (best is None or decrease > best[2]):
                best = (feature, threshold, decrease)
    return best


def dtree_build(training: TrainingSet, cfg: TreeConfig = TreeConfig()) -> TreePartition:
    """Grow a binary partition of the ordinal feature space.

    A node becomes a leaf when it reaches ``max_depth``, holds fewer
    than ``2 * min_leaf_size`` cases, is pure enough (minority fraction
    at or below ``purity_threshold``), or admits no impurity-decreasing
    split.
    """
    for idx, case in enumerate(training.cases):
        for pos, v in enumerate(case.x.values):
            if not isinstance(v, int) or isinstance(v, bool):
                raise SchemaMismatch(
                    f"case {idx + 1}, feature {pos + 1}: tree features must be ordinal ranks"
                )
    require_labels(training, YKind.BINARY01)

    counter = {"next_id": 0}

    def grow(indices: list[int], depth: int) -> Union[TreeNode, TreeLeaf]:
        if not indices:
            raise EmptyLeaf("a leaf with zero cases")
        labels = [training.cases[i].y for i in indices]
        stop = (
            depth >= cfg.max_depth
            or len(indices) < 2 * cfg.min_leaf_size
            or _minority_fraction(labels) <= cfg.purity_threshold
        )
        split = None if stop else _best_split(training, indices)
        if stop or split is None:
            leaf = TreeLeaf(counter["next_id"], tuple(indices))
            counter["next_id"] += 1
            return leaf
        feature, threshold, _ = split
        left = [i for i in indices if training.cases[i].x.values[feature] <= threshold]
        right = [i for i in indices if training.cases[i].x.values[feature] > threshold]
        return TreeNode(feature, threshold, grow(left, depth + 1), grow(right, depth + 1))

    return TreePartition(grow(list(range(training.m)), 0), training.n)


def dtree_counterparts(
    x0: FeatureVector, partition: TreePartition, training: TrainingSet
) -> CounterpartSet:
    """Observed cases sharing the query's subdomain."""
    leaf = partition.route(x0)
    if not leaf.case_indices:
        raise EmptyLeaf(f"leaf {leaf.leaf_id} holds no cases")
    members = tuple(training.cases[i] for i in leaf.case_indices)
    return CounterpartSet(members, Provenance.FROM_TRAINING)


def dtree_predict(
    x0: FeatureVector, partition: TreePartition, training: TrainingSet
) -> tuple[int, InconsistencyReport]:
    """Binary answer at the query from its subdomain's cases; ties give 0."""
    require_labels(training, YKind.BINARY01)
    counterparts = dtree_counterparts(x0, partition, training)
    best: tuple[int, InconsistencyReport] | None = None
    for label in (0, 1):
        rep = _pointwise_report(PointwiseHypothesis(x0, label), counterparts)
        if best is None or rep.total < best[1].total:
            best = (label, rep)
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Naive Bayes over nominal features


@dataclass(frozen=True)
class TransformedProblem:
    """A nominal problem recast as single-feature cases.

    Each n-feature case splits into n one-feature cases; the pool keeps
    duplicates, so it is deliberately not a :class:`TrainingSet`.
    """

    pooled_values: frozenset[str]
    x0_parts: tuple[FeatureVector, ...]
    cases: tuple[Case, ...]


def nb_transform(x0: FeatureVector, training: TrainingSet) -> TransformedProblem:
    """Split every case (and the query) into per-feature single-value cases.

    Requires the observed value sets of distinct feature positions to be
    disjoint: after pooling, a value must still name its position.
    """
    n = training.n
    if x0.n != n:
        raise SchemaMismatch(f"query has {x0.n} features, training has {n}")
    observed: list[set[str]] = [set() for _ in range(n)]
    for case in list(training.cases) + [Case(x0, 0.0)]:
        for pos, v in enumerate(case.x.values):
            if not isinstance(v, str):
                raise SchemaMismatch(f"feature {pos + 1} must be nominal, got {v!r}")
            observed[pos].add(v)
    for i in range(n):
        for j in range(i + 1, n):
            shared = observed[i] & observed[j]
            if shared:
                raise NonDisjointValueSets(
                    f"features {i + 1} and {j + 1} share value(s) {sorted(shared)!r}"
                )
    pooled = frozenset().union(*observed)
    parts = tuple(FeatureVector((v,)) for v in x0.values)
    flat = tuple(
        Case(FeatureVector((v,)), case.y)
        for case in training.cases
        for v in case.x.values
    )
    return TransformedProblem(pooled, parts, flat)


def nb_case_inconsistency(alpha: Case, pool: Sequence[Case]) -> float:
    """Fraction of same-valued pooled cases whose label disagrees.

    A value never seen in the pool scores one half: maximal uncertainty
    rather than false confidence either way.
    """
    matches = [beta for beta in pool if beta.x == alpha.x]
    if not matches:
        return 0.5
    disagree = sum(1 for beta in matches if beta.y != alpha.y)
    return disagree / len(matches)


def nb_predict(
    x0: FeatureVector, training: TrainingSet
) -> tuple[int, InconsistencyReport]:
    """Binary answer whose per-feature disagreement product is smallest.

    One baseline case per feature, scored against pooled same-valued
    cases; the n scores multiply.  Ties resolve to 0.
    """
    require_labels(training, YKind.BINARY01)
    transformed = nb_transform(x0, training)
    best: tuple[int, InconsistencyReport] | None = None
    for label in (0, 1):
        entries = []
        for part in transformed.x0_parts:
            alpha = Case(part, label)
            mu = nb_case_inconsistency(alpha, transformed.cases)
            count = sum(1 for beta in transformed.cases if beta.x == part)
            entries.append(ReportEntry(alpha, mu, count))
        rep = InconsistencyReport.build(
            entries,
            Aggregation.PRODUCT,
            describe_hypothesis(PointwiseHypothesis(x0, label)),
        )
        if best is None or rep.total < best[1].total:
            best = (label, rep)
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Learner contract adapters


def _query_point(problem: ProblemStatement) -> FeatureVector:
    x0 = problem.v.get("x0")
    if not isinstance(x0, FeatureVector):
        raise InvalidParameter("problem statement carries no query point x0")
    return x0


def _neighborhood_spec(problem: ProblemStatement) -> NeighborhoodSpec:
    metric = str(problem.v.get("metric", "euclidean"))
    if "k" in problem.v:
        return NeighborhoodSpec(KNearest(problem.v["k"]), metric)
    return NeighborhoodSpec(FixedRadius(problem.v["radius"]), metric)


class SmoothingLearner(Learner):
    """Local mean smoothing: a continuous family of constants at the query."""

    family = "smoothing"
    baseline_provenance = Provenance.FROM_HYPOTHESIS
    counterpart_provenance = Provenance.FROM_TRAINING

    def report(self, h, problem, training):
        if not isinstance(h, PointwiseHypothesis):
            raise IncompatibleFamily(
                f"expected a pointwise hypothesis, got {describe_hypothesis(h)}"
            )
        counterparts = smoothing_counterparts(h.x0, training, _neighborhood_spec(problem))
        return _pointwise_report(h, counterparts)

    def solve(self, problem, training):
        x0 = _query_point(problem)
        h = smoothing_fit(x0, training, _neighborhood_spec(problem))
        return h, self.report(h, problem, training)


class KnnLearner(Learner):
    """k-nearest classification as an argmin over two constants."""

    family = "knn"
    baseline_provenance = Provenance.FROM_HYPOTHESIS
    counterpart_provenance = Provenance.FROM_TRAINING

    def candidates(self, problem, training):
        x0 = _query_point(problem)
        return (PointwiseHypothesis(x0, 0), PointwiseHypothesis(x0, 1))

    def report(self, h, problem, training):
        require_labels(training, YKind.BINARY01)
        counterparts = smoothing_counterparts(h.x0, training, _neighborhood_spec(problem))
        return _pointwise_report(h, counterparts)


class DtreeLearner(Learner):
    """Decision-tree classification; counterparts come from the query's leaf."""

    family = "dtree"
    baseline_provenance = Provenance.FROM_HYPOTHESIS
    counterpart_provenance = Provenance.FROM_TRAINING

    def candidates(self, problem, training):
        x0 = _query_point(problem)
        return (PointwiseHypothesis(x0, 0), PointwiseHypothesis(x0, 1))

    def _config(self, problem: ProblemStatement) -> TreeConfig:
        return TreeConfig(
            max_depth=problem.v.get("max_depth", 8),
            min_leaf_size=problem.v.get("min_leaf_size", 1),
            purity_threshold=problem.v.get("purity_threshold", 0.0),
        )

    def report(self, h, problem, training):
        require_labels(training, YKind.BINARY01)
        partition = dtree_build(training, self._config(problem))
        counterparts = dtree_counterparts(h.x0, partition, training)
        return _pointwise_report(h, counterparts)


class NbLearner(Learner):
    """Naive Bayes with per-feature baseline cases and a product total."""

    family = "nb"
    baseline_provenance = Provenance.FROM_HYPOTHESIS
    counterpart_provenance = Provenance.FROM_TRAINING

    def candidates(self, problem, training):
        x0 = _query_point(problem)
        return (PointwiseHypothesis(x0, 0), PointwiseHypothesis(x0, 1))

    def report(self, h, problem, training):
        require_labels(training, YKind.BINARY01)
        transformed = nb_transform(h.x0, training)
        entries = []
        for part in transformed.x0_parts:
            alpha = Case(part, h.value)
            mu = nb_case_inconsistency(alpha, transformed.cases)
            count = sum(1 for beta in transformed.cases if beta.x == part)
            entries.append(ReportEntry(alpha, mu, count))
        return InconsistencyReport.build(
            entries, Aggregation.PRODUCT, describe_hypothesis(h)
        )


# ---------------------------------------------------------------------------
# Family registration


def _check_metric(v) -> None:
    metric = v.get("metric", "euclidean")
    if metric not in METRICS:
        raise InvalidParameter(f"metric must be one of {METRICS}, got {metric!r}")


def _check_smoothing(v) -> None:
    has_k = "k" in v
    has_radius = "radius" in v
    if has_k == has_radius:
        raise InvalidParameter("smoothing takes exactly one of k or radius")
    if has_k:
        KNearest(v["k"])
    else:
        FixedRadius(v["radius"])
    _check_metric(v)


def _check_knn(v) -> None:
    KNearest(v["k"])
    _check_metric(v)


def _check_dtree(v) -> None:
    TreeConfig(
        max_depth=v.get("max_depth", 8),
        min_leaf_size=v.get("min_leaf_size", 1),
        purity_threshold=v.get("purity_threshold", 0.0),
    )


register_family(FamilySpec(
    name="smoothing",
    required=frozenset({"x0"}),
    optional=frozenset({"k", "radius", "metric"}),
    y_kinds=frozenset({YKind.REAL, YKind.BINARY01, YKind.PM1}),
    check=_check_smoothing,
))
register_family(FamilySpec(
    name="knn",
    required=frozenset({"x0", "k"}),
    optional=frozenset({"metric"}),
    y_kinds=frozenset({YKind.BINARY01}),
    check=_check_knn,
))
register_family(FamilySpec(
    name="dtree",
    required=frozenset({"x0"}),
    optional=frozenset({"max_depth", "min_leaf_size", "purity_threshold"}),
    y_kinds=frozenset({YKind.BINARY01}),
    check=_check_dtree,
))
register_family(FamilySpec(
    name="nb",
    required=frozenset({"x0"}),
    optional=frozenset(),
    y_kinds=frozenset({YKind.BINARY01}),
    check=lambda v: None,
))
