"""Command-line surface: train, predict, audit, verify.

Standard output carries only data (parameter echoes, predictions, the
audit report, check lines); diagnostics go to standard error.  Exit
codes: 0 on success, 1 on data or solver errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core import (
    FeatureVector,
    LinearHypothesis,
    MinconsistError,
    PointwiseHypothesis,
    ProblemStatement,
    TrainingDataMismatch,
    TrainingSet,
    YKind,
    family_spec,
    select_hypothesis,
)
from .dataio import (
    Dataset,
    Model,
    load_dataset,
    load_dataset_for_model,
    load_model,
    load_queries,
    save_model,
)
from .linear import ErmLearner, SvmLearner, SvrLearner
from .oracle import CheckBudget, run_all_checks
from .pointwise import (
    FixedRadius,
    KNearest,
    NeighborhoodSpec,
    TreeConfig,
    TreePartition,
    dtree_build,
    dtree_predict,
    knn_predict,
    nb_predict,
    smoothing_case_inconsistency,
    smoothing_counterparts,
    smoothing_fit,
)

POINTWISE_FAMILIES = ("smoothing", "knn", "dtree", "nb")
LINEAR_LEARNERS = {"svm": SvmLearner(), "svr": SvrLearner(), "erm": ErmLearner()}

# Which option goes with which learner, for usage-level validation.
_FAMILY_OPTIONS = {
    "smoothing": {"k", "radius", "metric"},
    "knn": {"k", "metric"},
    "dtree": {"max_depth", "min_leaf", "purity"},
    "nb": set(),
    "svm": {"w"},
    "svr": {"epsilon", "lam"},
    "erm": set(),
}
_FAMILY_REQUIRED = {
    "knn": {"k"},
    "svm": {"w"},
    "svr": {"epsilon", "lam"},
}
_FLAG_NAMES = {
    "k": "--k",
    "radius": "--radius",
    "metric": "--metric",
    "max_depth": "--max-depth",
    "min_leaf": "--min-leaf",
    "purity": "--purity",
    "w": "--w",
    "epsilon": "--epsilon",
    "lam": "--lambda",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minconsist",
        description="Learners as inconsistency minimizers: train, predict, audit, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit a learner and write a model file")
    train.add_argument(
        "--learner",
        required=True,
        choices=("smoothing", "knn", "dtree", "nb", "svm", "svr", "erm"),
    )
    train.add_argument("--data", required=True, help="training dataset (CSV with header)")
    train.add_argument("--target", help="feedback column name (default: last column)")
    train.add_argument("--schema", help="sidecar schema file (JSON)")
    train.add_argument("--out", required=True, help="model file to write")
    train.add_argument("--k", type=int, help="neighborhood size (smoothing, knn)")
    train.add_argument("--radius", type=float, help="neighborhood radius (smoothing)")
    train.add_argument("--metric", choices=("euclidean", "manhattan"))
    train.add_argument("--w", type=float, help="weight-norm coefficient (svm)")
    train.add_argument("--epsilon", type=float, help="tube half-width (svr)")
    train.add_argument("--lambda", dest="lam", type=float, help="regularization (svr)")
    train.add_argument("--max-depth", type=int, help="tree depth limit (dtree)")
    train.add_argument("--min-leaf", type=int, help="minimum leaf size (dtree)")
    train.add_argument("--purity", type=float, help="purity stopping threshold (dtree)")

    predict = sub.add_parser("predict", help="answer query rows with a saved model")
    predict.add_argument("--model", required=True)
    predict.add_argument("--queries", required=True, help="feature-only CSV with header")
    predict.add_argument(
        "--data", help="training dataset; required for query-time learners"
    )

    audit = sub.add_parser("audit", help="per-case inconsistency report for a dataset")
    audit.add_argument("--model", required=True)
    audit.add_argument("--data", required=True)

    verify = sub.add_parser("verify", help="run the randomized equivalence checks")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--trials", type=int, help="trial count per check")

    return parser


def _check_train_usage(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if args.k is not None and args.k < 1:
        parser.error("--k must be >= 1")
    if args.radius is not None and args.radius <= 0:
        parser.error("--radius must be > 0")
    if args.w is not None and args.w <= 0:
        parser.error("--w must be > 0")
    if args.epsilon is not None and args.epsilon < 0:
        parser.error("--epsilon must be >= 0")
    if args.lam is not None and args.lam < 0:
        parser.error("--lambda must be >= 0")
    if args.max_depth is not None and args.max_depth < 1:
        parser.error("--max-depth must be >= 1")
    if args.min_leaf is not None and args.min_leaf < 1:
        parser.error("--min-leaf must be >= 1")
    if args.purity is not None and not 0.0 <= args.purity <= 0.5:
        parser.error("--purity must lie in [0, 0.5]")

    family = args.learner
    allowed = _FAMILY_OPTIONS[family]
    given = {
        name for name in _FLAG_NAMES if getattr(args, name) is not None
    }
    stray = given - allowed
    if stray:
        flags = ", ".join(sorted(_FLAG_NAMES[name] for name in stray))
        parser.error(f"{flags} not applicable to learner {family!r}")
    missing = _FAMILY_REQUIRED.get(family, set()) - given
    if missing:
        flags = ", ".join(sorted(_FLAG_NAMES[name] for name in missing))
        parser.error(f"learner {family!r} requires {flags}")
    if family == "smoothing" and len(given & {"k", "radius"}) != 1:
        parser.error("smoothing requires exactly one of --k or --radius")


def _family_params(args: argparse.Namespace) -> dict:
    """The parameter vector saved with the model, defaults made explicit."""
    family = args.learner
    if family == "smoothing":
        params: dict = {}
        if args.k is not None:
            params["k"] = args.k
        else:
            params["radius"] = args.radius
        params["metric"] = args.metric or "euclidean"
        return params
    if family == "knn":
        return {"k": args.k, "metric": args.metric or "euclidean"}
    if family == "dtree":
        cfg = TreeConfig(
            max_depth=args.max_depth if args.max_depth is not None else 8,
            min_leaf_size=args.min_leaf if args.min_leaf is not None else 1,
            purity_threshold=args.purity if args.purity is not None else 0.0,
        )
        return {
            "max_depth": cfg.max_depth,
            "min_leaf_size": cfg.min_leaf_size,
            "purity_threshold": cfg.purity_threshold,
        }
    if family == "svm":
        return {"w": args.w}
    if family == "svr":
        return {"epsilon": args.epsilon, "lambda": args.lam}
    return {}


def _infer_y_kind(training: TrainingSet, family: str) -> YKind:
    """The most specific feedback domain the data fits and the family takes.

    Labels are never re-encoded: a 0/1 dataset handed to a learner that
    needs -1/+1 labels is a data error, not a conversion.
    """
    values = set(training.feedbacks)
    candidates = []
    if values <= {0, 1}:
        candidates.append(YKind.BINARY01)
    if values <= {-1, 1}:
        candidates.append(YKind.PM1)
    candidates.append(YKind.REAL)
    allowed = family_spec(family).y_kinds
    for kind in candidates:
        if kind in allowed:
            return kind
    raise TrainingDataMismatch(
        f"{family} needs {'/'.join(sorted(k.value for k in allowed))} feedback; "
        f"observed values {sorted(values)}"
    )


def _neighborhood_from_params(params: dict) -> NeighborhoodSpec:
    metric = params.get("metric", "euclidean")
    if "k" in params:
        return NeighborhoodSpec(KNearest(params["k"]), metric)
    return NeighborhoodSpec(FixedRadius(params["radius"]), metric)


def _pointwise_eval(
    family: str,
    params: dict,
    tree: TreePartition | None,
    training: TrainingSet,
    x0: FeatureVector,
) -> tuple[float, float, int]:
    """(prediction, query inconsistency, counterpart count) at one query."""
    if family == "smoothing":
        spec = _neighborhood_from_params(params)
        counterparts = smoothing_counterparts(x0, training, spec)
        h = smoothing_fit(x0, training, spec)
        mu = smoothing_case_inconsistency(h.value, counterparts)
        return h.value, mu, len(counterparts.members)
    if family == "knn":
        label, report = knn_predict(
            x0, training, params["k"], params.get("metric", "euclidean")
        )
        return label, report.total, report.entries[0].counterpart_count
    if family == "dtree":
        assert tree is not None
        label, report = dtree_predict(x0, tree, training)
        return label, report.total, report.entries[0].counterpart_count
    label, report = nb_predict(x0, training)
    count = sum(entry.counterpart_count for entry in report.entries)
    return label, report.total, count


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _fmt_prediction(v: float) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def _echo_params(family: str, params: dict, dataset: Dataset, total: float, out: str) -> None:
    print(f"family={family}")
    for key in sorted(params):
        value = params[key]
        print(f"{key}={_fmt_float(value) if isinstance(value, float) else value}")
    print(f"m={dataset.training.m}")
    print(f"n={dataset.training.n}")
    print(f"total_inconsistency={_fmt_float(total)}")
    print(f"model={out}")


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data, target=args.target, schema_path=args.schema)
    family = args.learner
    params = _family_params(args)
    y_kind = _infer_y_kind(dataset.training, family)

    if family in POINTWISE_FAMILIES:
        tree = None
        if family == "dtree":
            tree = dtree_build(dataset.training, TreeConfig(**params))
        total = 0.0
        for case in dataset.training.cases:
            # Constructing the statement validates params against the family.
            ProblemStatement(dataset.schema, y_kind, family, {**params, "x0": case.x})
            _, mu, _ = _pointwise_eval(family, params, tree, dataset.training, case.x)
            total += mu
        model = Model(
            family=family,
            params=params,
            feature_names=dataset.feature_names,
            schema=dataset.schema,
            target_name=dataset.target_name,
            y_kind=y_kind,
            tree=tree,
            training_hash=dataset.content_hash,
            total_inconsistency=total,
        )
    else:
        problem = ProblemStatement(dataset.schema, y_kind, family, params)
        hypothesis, report = select_hypothesis(
            LINEAR_LEARNERS[family], problem, dataset.training
        )
        total = report.total
        model = Model(
            family=family,
            params=params,
            feature_names=dataset.feature_names,
            schema=dataset.schema,
            target_name=dataset.target_name,
            y_kind=y_kind,
            hypothesis=hypothesis,
            total_inconsistency=total,
        )

    save_model(model, args.out)
    _echo_params(family, params, dataset, total, args.out)
    return 0


def _require_matching_data(model: Model, path: str) -> Dataset:
    dataset = load_dataset_for_model(path, model)
    if model.training_hash is not None and dataset.content_hash != model.training_hash:
        raise TrainingDataMismatch(
            f"{path} does not match the data this model was trained on"
        )
    return dataset


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    queries = load_queries(args.queries, model.feature_names, model.schema)

    if model.family in POINTWISE_FAMILIES:
        if args.data is None:
            raise TrainingDataMismatch(
                f"{model.family} answers queries from its training data; pass --data"
            )
        dataset = _require_matching_data(model, args.data)
        for x0 in queries:
            value, _, _ = _pointwise_eval(
                model.family, model.params, model.tree, dataset.training, x0
            )
            print(_fmt_prediction(value))
        return 0

    f = model.hypothesis
    if not isinstance(f, LinearHypothesis):
        raise TrainingDataMismatch(f"model for {model.family!r} carries no hypothesis")
    for x0 in queries:
        print(_fmt_prediction(f(x0)))
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = _require_matching_data(model, args.data)
    training = dataset.training

    if model.family in POINTWISE_FAMILIES:
        rows = []
        total = 0.0
        for idx, case in enumerate(training.cases, start=1):
            _, mu, count = _pointwise_eval(
                model.family, model.params, model.tree, training, case.x
            )
            total += mu
            rows.append(
                {
                    "case": idx,
                    "x": list(case.x.values),
                    "y": case.y,
                    "mu": mu,
                    "counterparts": count,
                }
            )
        doc = {
            "family": model.family,
            "aggregation": "sum-over-queries",
            "regularizer": 0.0,
            "total_inconsistency": total,
            "rows": _sorted_rows(rows),
        }
    else:
        f = model.hypothesis
        if not isinstance(f, LinearHypothesis):
            raise TrainingDataMismatch(
                f"model for {model.family!r} carries no hypothesis"
            )
        problem = ProblemStatement(model.schema, model.y_kind, model.family, model.params)
        report = LINEAR_LEARNERS[model.family].report(f, problem, training)
        rows = [
            {
                "case": idx,
                "x": list(entry.case.x.values),
                "y": entry.case.y,
                "mu": entry.mu,
                "counterparts": entry.counterpart_count,
            }
            for idx, entry in enumerate(report.entries, start=1)
        ]
        doc = {
            "family": model.family,
            "aggregation": report.aggregation.value,
            "regularizer": report.regularizer,
            "total_inconsistency": report.total,
            "rows": _sorted_rows(rows),
        }

    print(json.dumps(doc, indent=2))
    return 0


def _sorted_rows(rows: list[dict]) -> list[dict]:
    """Largest inconsistencies first, so candidate outliers lead the report."""
    return sorted(rows, key=lambda row: (-row["mu"], row["case"]))


def cmd_verify(args: argparse.Namespace) -> int:
    budget = CheckBudget() if args.trials is None else CheckBudget.scaled(args.trials)
    results = run_all_checks(budget, seed=args.seed)
    for result in results:
        print(result.line())
    return 0 if all(result.ok for result in results) else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            _check_train_usage(args, parser)
            return cmd_train(args)
        if args.command == "predict":
            return cmd_predict(args)
        if args.command == "audit":
            return cmd_audit(args)
        if args.trials is not None and args.trials < 1:
            parser.error("--trials must be >= 1")
        return cmd_verify(args)
    except SystemExit as exc:  # argparse usage errors and --help
        code = exc.code
        return code if isinstance(code, int) else 2
    except MinconsistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
