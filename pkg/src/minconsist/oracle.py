"""Brute-force references, instance generators, and verification drivers.

Everything here exists to check the learners from the outside: the
reference answers are computed by deliberately plain code that never
calls the implementation it validates, and the drivers sweep seeded
random instances so a failure always comes with the seed that
reproduces it.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    BoxTooLarge,
    Case,
    ExhaustedRetries,
    FeatureVector,
    InvalidParameter,
    LinearHypothesis,
    TrainingSet,
)
from .linear import (
    SlackVector,
    SvmParams,
    svm_slack,
    svm_objectives_agree,
    svm_slack_is_feasible,
    svm_slack_is_minimal,
)

GRID_POINT_LIMIT = 10_000_000


# ---------------------------------------------------------------------------
# Brute-force references


def brute_knn_majority(
    x0: FeatureVector, training: TrainingSet, k: int, metric: str = "euclidean"
) -> int:
    """Majority vote over the k nearest cases, ties at the cut included.

    Implemented with its own distance code and plain counting; 0 wins a
    split vote.
    """
    if k < 1:
        raise InvalidParameter(f"k must be positive, got {k!r}")
    if k > training.m:
        raise InvalidParameter(f"k={k} but only {training.m} cases")
    dists = []
    for case in training.cases:
        if metric == "euclidean":
            d = math.sqrt(sum((a - b) ** 2 for a, b in zip(case.x.values, x0.values)))
        elif metric == "manhattan":
            d = sum(abs(a - b) for a, b in zip(case.x.values, x0.values))
        else:
            raise InvalidParameter(f"unknown metric {metric!r}")
        dists.append(d)
    cutoff = sorted(dists)[k - 1]
    votes = Counter(
        case.y for case, d in zip(training.cases, dists) if d <= cutoff
    )
    return 1 if votes.get(1, 0) > votes.get(0, 0) else 0


def brute_nb_total(x0: FeatureVector, training: TrainingSet, label: int) -> float:
    """Product of per-feature disagreement fractions, straight off the raw cases."""
    total = 1.0
    for pos in range(x0.n):
        value = x0.values[pos]
        matches = [case for case in training.cases if case.x.values[pos] == value]
        if not matches:
            mu = 0.5
        else:
            mu = sum(1 for case in matches if case.y != label) / len(matches)
        total *= mu
    return total


def grid_search_linear(
    objective: Callable[[LinearHypothesis], float],
    bounds: Sequence[tuple[float, float]],
    step: float,
) -> tuple[LinearHypothesis, float]:
    """Exhaustive lattice scan over (b..., a); first minimizer wins.

    The scan order is lexicographic over the axes, so equal minima
    resolve deterministically.  Boxes beyond ``GRID_POINT_LIMIT``
    lattice points are refused.
    """
    if not step > 0:
        raise InvalidParameter(f"step must be positive, got {step!r}")
    if len(bounds) < 1:
        raise InvalidParameter("bounds must cover at least the intercept axis")
    axes = [_axis(lo, hi, step) for lo, hi in bounds]
    points = 1
    for axis in axes:
        points *= len(axis)
    if points > GRID_POINT_LIMIT:
        raise BoxTooLarge(f"{points} lattice points exceed {GRID_POINT_LIMIT}")
    best: tuple[LinearHypothesis, float] | None = None
    for combo in itertools.product(*axes):
        h = LinearHypothesis(tuple(combo[:-1]), combo[-1])
        value = objective(h)
        if best is None or value < best[1]:
            best = (h, value)
    assert best is not None
    return best


def _axis(lo: float, hi: float, step: float) -> list[float]:
    if hi < lo:
        raise InvalidParameter(f"bound ({lo}, {hi}) is empty")
    out = []
    i = 0
    while True:
        v = lo + i * step
        if v > hi + 1e-12:
            break
        out.append(v)
        i += 1
    return out


def svm_objective_grids(
    training: TrainingSet,
    params: SvmParams,
    box: float = 3.0,
    step: float = 0.05,
) -> tuple[tuple[int, ...], np.ndarray, np.ndarray]:
    """Both margin-objective routes evaluated over a full lattice.

    Returns the lattice shape plus two flat value arrays in lexicographic
    scan order: one accumulating ``|y f(x) - 1|`` outside each case's
    half-space, one accumulating the closed-form slack.  Vectorized so
    wide scans stay affordable.
    """
    n = training.n
    axis = np.round(np.arange(-box, box + step / 2, step), 12)
    grids = np.meshgrid(*([axis] * (n + 1)), indexing="ij")
    shape = grids[0].shape
    via_distance = np.zeros(shape)
    via_slack = np.zeros(shape)
    for case in training.cases:
        fx = grids[n].copy()
        for j in range(n):
            fx += grids[j] * case.x.values[j]
        margin = case.y * fx
        inside = margin >= 1.0
        via_distance += np.where(inside, 0.0, np.abs(margin - 1.0))
        via_slack += np.where(inside, 0.0, 1.0 - margin)
    reg = params.w * sum(grids[j] ** 2 for j in range(n)) if n else 0.0
    via_distance = reg + via_distance / training.m
    via_slack = reg + via_slack / training.m
    return shape, via_distance.ravel(), via_slack.ravel()


def lattice_hypothesis(
    flat_index: int, shape: tuple[int, ...], box: float = 3.0, step: float = 0.05
) -> LinearHypothesis:
    """The lattice point behind a flat scan index."""
    coords = np.unravel_index(flat_index, shape)
    values = [-box + int(c) * step for c in coords]
    return LinearHypothesis(tuple(values[:-1]), values[-1])


def random_feasible_slack(
    f: LinearHypothesis, training: TrainingSet, seed: int, noise: float = 1.0
) -> SlackVector:
    """The determined slack plus seeded non-negative noise; zero noise returns it unchanged."""
    if noise < 0:
        raise InvalidParameter(f"noise must be >= 0, got {noise!r}")
    rng = np.random.default_rng(seed)
    base = svm_slack(f, training)
    bumps = rng.uniform(0.0, 1.0, size=training.m) * noise
    return SlackVector(tuple(z + float(u) for z, u in zip(base, bumps)))


# ---------------------------------------------------------------------------
# Seeded instance generation


@dataclass(frozen=True)
class RandomInstance:
    """Recipe for one reproducible random dataset.

    Kept deliberately small: dimension at most 3, sample size at most
    20, which is plenty to exercise every code path while keeping
    thousand-instance sweeps fast.
    """

    seed: int
    n: int = 1
    m: int = 8
    feature_kind: str = "numeric"
    label_scheme: str = "pm1"
    levels: int = 5
    queries: int = 5

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 3:
            raise InvalidParameter(f"n must lie in 1..3, got {self.n!r}")
        if not 1 <= self.m <= 20:
            raise InvalidParameter(f"m must lie in 1..20, got {self.m!r}")
        if self.feature_kind not in ("numeric", "ordinal", "nominal"):
            raise InvalidParameter(f"unknown feature kind {self.feature_kind!r}")
        if self.label_scheme not in ("binary01", "pm1", "real"):
            raise InvalidParameter(f"unknown label scheme {self.label_scheme!r}")
        if self.levels < 2:
            raise InvalidParameter(f"levels must be >= 2, got {self.levels!r}")
        if self.queries < 0:
            raise InvalidParameter(f"queries must be >= 0, got {self.queries!r}")


_MAX_DRAWS_PER_CASE = 200


def generate_instance(
    spec: RandomInstance,
) -> tuple[TrainingSet, tuple[FeatureVector, ...]]:
    """Draw a training set honoring feature-vector distinctness, plus queries.

    Colliding draws are resampled; when the value universe cannot host
    ``m`` distinct vectors the attempt budget runs out and
    :class:`ExhaustedRetries` is raised rather than looping forever.
    """
    rng = np.random.default_rng(spec.seed)
    seen: set[tuple, ...] = set()
    cases = []
    budget = _MAX_DRAWS_PER_CASE * spec.m
    while len(cases) < spec.m:
        if budget <= 0:
            raise ExhaustedRetries(
                f"could not draw {spec.m} distinct vectors (seed {spec.seed})"
            )
        budget -= 1
        x = _draw_vector(rng, spec)
        if x.values in seen:
            continue
        seen.add(x.values)
        cases.append(Case(x, _draw_label(rng, spec)))
    queries = tuple(_draw_vector(rng, spec) for _ in range(spec.queries))
    return TrainingSet(tuple(cases)), queries


def _draw_vector(rng: np.random.Generator, spec: RandomInstance) -> FeatureVector:
    if spec.feature_kind == "numeric":
        values = tuple(float(v) for v in rng.uniform(-2.0, 2.0, size=spec.n))
    elif spec.feature_kind == "ordinal":
        values = tuple(int(v) for v in rng.integers(0, spec.levels, size=spec.n))
    else:
        values = tuple(
            f"{chr(ord('a') + int(v))}{pos}"
            for pos, v in enumerate(rng.integers(0, spec.levels, size=spec.n))
        )
    return FeatureVector(values)


def _draw_label(rng: np.random.Generator, spec: RandomInstance) -> float:
    if spec.label_scheme == "binary01":
        return int(rng.integers(0, 2))
    if spec.label_scheme == "pm1":
        return int(rng.choice((-1, 1)))
    return float(rng.uniform(-2.0, 2.0))


@dataclass(frozen=True)
class SyntheticDependence:
    """A feedback rule for regression-style instances.

    ``base`` is "linear" (feedback = coefficients . x + intercept) or
    "step" (feedback jumps at the first coefficient).  Noise is uniform
    in ``[-noise, noise]``; an ``outlier_fraction`` of cases additionally
    jump by five units away from the base value.
    """

    base: str = "linear"
    coefficients: tuple[float, ...] = (1.0,)
    intercept: float = 0.0
    noise: float = 0.0
    outlier_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.base not in ("linear", "step"):
            raise InvalidParameter(f"unknown base {self.base!r}")
        if not self.noise >= 0:
            raise InvalidParameter(f"noise must be >= 0, got {self.noise!r}")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise InvalidParameter(
                f"outlier_fraction must lie in [0, 1), got {self.outlier_fraction!r}"
            )

    def feedback(self, seed: int, points: Sequence[FeatureVector]) -> tuple[float, ...]:
        rng = np.random.default_rng(seed)
        out = []
        for x in points:
            if self.base == "linear":
                y = self.intercept
                for c, v in zip(self.coefficients, x.values):
                    y += c * v
            else:
                y = self.intercept + (1.0 if x.values[0] > self.coefficients[0] else 0.0)
            if self.noise:
                y += float(rng.uniform(-self.noise, self.noise))
            if self.outlier_fraction and rng.uniform() < self.outlier_fraction:
                y += 5.0 * (1.0 if rng.uniform() < 0.5 else -1.0)
            out.append(y)
        return tuple(out)


def random_linear_instance(
    seed: int, n_max: int = 3, m_max: int = 20
) -> tuple[LinearHypothesis, TrainingSet]:
    """A random affine hypothesis with a matching -1/+1 training set."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    spec = RandomInstance(seed=seed + 1, n=n, m=m, feature_kind="numeric",
                          label_scheme="pm1", queries=0)
    training, _ = generate_instance(spec)
    b = tuple(float(v) for v in rng.uniform(-2.0, 2.0, size=n))
    a = float(rng.uniform(-2.0, 2.0))
    return LinearHypothesis(b, a), training


# ---------------------------------------------------------------------------
# Verification drivers


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one randomized check."""

    name: str
    trials: int
    ok: bool
    first_failure_seed: int | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" (seed {self.first_failure_seed})" if not self.ok else ""
        note = f" {self.detail}" if self.detail else ""
        return f"{status} {self.name}: {self.trials} trials{extra}{note}"


@dataclass(frozen=True)
class CheckBudget:
    """Trial counts for the randomized checks, kept in one place."""

    slack_feasibility: int = 1000
    slack_minimality: int = 1000
    objective_identity: int = 1000
    argmin_instances: int = 8

    @classmethod
    def scaled(cls, trials: int) -> "CheckBudget":
        if trials < 1:
            raise InvalidParameter(f"trials must be >= 1, got {trials!r}")
        return cls(
            slack_feasibility=trials,
            slack_minimality=trials,
            objective_identity=trials,
            argmin_instances=max(1, min(trials, 8)),
        )


def verify_slack_feasibility(trials: int = 1000, seed: int = 0) -> CheckResult:
    """Determined slacks are feasible on every random instance."""
    for t in range(trials):
        f, training = random_linear_instance(seed + t)
        if not svm_slack_is_feasible(f, training):
            return CheckResult("slack-feasibility", trials, False, seed + t)
    return CheckResult("slack-feasibility", trials, True)


def verify_slack_minimality(trials: int = 1000, seed: int = 0) -> CheckResult:
    """No random feasible slack undercuts the determined one."""
    for t in range(trials):
        f, training = random_linear_instance(seed + t)
        zeta = random_feasible_slack(f, training, seed=seed + t)
        if not svm_slack_is_minimal(f, training, zeta):
            return CheckResult("slack-minimality", trials, False, seed + t)
    return CheckResult("slack-minimality", trials, True)


def verify_objective_identity(trials: int = 1000, seed: int = 0) -> CheckResult:
    """Both objective forms agree exactly at the determined slacks."""
    for t in range(trials):
        f, training = random_linear_instance(seed + t)
        rng = np.random.default_rng(seed + t)
        params = SvmParams(float(rng.uniform(0.01, 1.0)))
        if not svm_objectives_agree(f, training, params):
            return CheckResult("objective-identity", trials, False, seed + t)
    return CheckResult("objective-identity", trials, True)


def verify_argmin_agreement(
    instances: int = 8,
    seed: int = 0,
    box: float = 3.0,
    step: float = 0.05,
    n_max: int = 1,
) -> CheckResult:
    """Both objective routes pick the same lattice minimizer on tiny instances."""
    for t in range(instances):
        rng = np.random.default_rng(seed + t)
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(2, 7))
        spec = RandomInstance(seed=seed + t + 1, n=n, m=m, feature_kind="numeric",
                              label_scheme="pm1", queries=0)
        training, _ = generate_instance(spec)
        params = SvmParams(float(rng.uniform(0.01, 1.0)))
        _, via_distance, via_slack = svm_objective_grids(training, params, box, step)
        same_values = bool(np.array_equal(via_distance, via_slack))
        same_argmin = int(np.argmin(via_distance)) == int(np.argmin(via_slack))
        if not (same_values and same_argmin):
            return CheckResult("grid-argmin-agreement", instances, False, seed + t)
    return CheckResult("grid-argmin-agreement", instances, True)


def run_all_checks(budget: CheckBudget = CheckBudget(), seed: int = 0) -> list[CheckResult]:
    """The four equivalence checks behind the command-line verify step."""
    return [
        verify_slack_feasibility(budget.slack_feasibility, seed),
        verify_slack_minimality(budget.slack_minimality, seed),
        verify_objective_identity(budget.objective_identity, seed),
        verify_argmin_agreement(budget.argmin_instances, seed),
    ]
