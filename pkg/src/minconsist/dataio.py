"""Dataset files, sidecar schemas, and versioned model files.

Datasets are delimited text with a header row.  Column kinds come from
an optional JSON sidecar (numeric needs no declaration; ordinal columns
must declare their ordered level list; nominal columns may declare
their symbol set).  Models are JSON documents with an explicit format
version; floats survive the round trip bit for bit because they are
written in shortest round-trip form.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .core import (
    Case,
    ColumnKind,
    DuplicateFeatureVector,
    EmptySet,
    FeatureSchema,
    FeatureVector,
    Hypothesis,
    LinearHypothesis,
    ModelFormatError,
    NominalKind,
    NumericKind,
    OrdinalKind,
    ParseError,
    PointwiseHypothesis,
    SchemaMismatch,
    TrainingSet,
    UnknownColumnKind,
    YKind,
)
from .pointwise import TreeLeaf, TreeNode, TreePartition

MODEL_FORMAT = "minconsist-model"
MODEL_VERSION = 1

POINTWISE_FAMILIES = ("smoothing", "knn", "dtree", "nb")


@dataclass(frozen=True)
class Dataset:
    """A parsed dataset: cases plus the column story behind them."""

    training: TrainingSet
    schema: FeatureSchema
    feature_names: tuple[str, ...]
    target_name: str

    @property
    def content_hash(self) -> str:
        return dataset_content_hash(self)


def dataset_content_hash(dataset: Dataset) -> str:
    """Hash of the parsed content, independent of file formatting."""
    payload = {
        "features": list(dataset.feature_names),
        "target": dataset.target_name,
        "rows": [
            [list(map(_json_scalar, case.x.values)), _json_scalar(case.y)]
            for case in dataset.training.cases
        ],
    }
    blob = json.dumps(payload, separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _json_scalar(v):
    return repr(v) if isinstance(v, float) else v


# ---------------------------------------------------------------------------
# Sidecar schemas


def load_sidecar_schema(path: str | Path) -> tuple[dict[str, ColumnKind], str | None]:
    """Column kinds by name, plus the declared target column if any."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"sidecar schema is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("columns"), dict):
        raise ParseError("sidecar schema needs a 'columns' object")
    kinds: dict[str, ColumnKind] = {}
    for name, entry in doc["columns"].items():
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ParseError(f"column {name!r} needs a 'kind'")
        kinds[name] = _column_kind_from_json(entry, name)
    target = doc.get("target")
    if target is not None and not isinstance(target, str):
        raise ParseError("'target' must be a column name")
    return kinds, target


def _column_kind_from_json(entry: Mapping, name: str) -> ColumnKind:
    kind = entry["kind"]
    if kind == "numeric":
        return NumericKind()
    if kind == "ordinal":
        levels = entry.get("levels")
        if not isinstance(levels, list) or not levels:
            raise ParseError(f"ordinal column {name!r} needs a non-empty 'levels' list")
        return OrdinalKind(tuple(str(v) for v in levels))
    if kind == "nominal":
        symbols = entry.get("symbols")
        if symbols is None:
            return NominalKind(frozenset({"?"}))  # placeholder; replaced after inference
        if not isinstance(symbols, list) or not symbols:
            raise ParseError(f"nominal column {name!r} needs a non-empty 'symbols' list")
        return NominalKind(frozenset(str(v) for v in symbols))
    raise UnknownColumnKind(f"column {name!r} declares unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Dataset loading


def load_dataset(
    path: str | Path,
    target: str | None = None,
    schema_path: str | Path | None = None,
) -> Dataset:
    """Parse a delimited dataset with a header row.

    The feedback column is ``target``, the sidecar's target, or the last
    column.  Undeclared columns are numeric when every value parses as a
    number and nominal otherwise.  Parse problems name their row and
    column; duplicate feature vectors name both offending rows.
    """
    declared: dict[str, ColumnKind] = {}
    sidecar_target: str | None = None
    if schema_path is not None:
        declared, sidecar_target = load_sidecar_schema(schema_path)

    header, rows = _read_delimited(path)
    target_name = target or sidecar_target or header[-1]
    if target_name not in header:
        raise ParseError(f"target column {target_name!r} not in header {header}")
    target_idx = header.index(target_name)
    feature_names = tuple(name for i, name in enumerate(header) if i != target_idx)
    if not feature_names:
        raise ParseError("dataset needs at least one feature column")
    unknown = set(declared) - set(header)
    if unknown:
        raise ParseError(f"sidecar declares column(s) not in header: {sorted(unknown)}")

    kinds: list[ColumnKind | None] = []
    for name in feature_names:
        kinds.append(declared.get(name))
    # Infer undeclared kinds: numeric when every token parses as a number.
    feature_cols = [i for i in range(len(header)) if i != target_idx]
    for pos, name in enumerate(feature_names):
        if kinds[pos] is None:
            col_tokens = [row[feature_cols[pos]] for row in rows]
            kinds[pos] = _infer_kind(col_tokens)
        elif isinstance(kinds[pos], NominalKind) and kinds[pos].symbols == frozenset({"?"}):
            observed = {row[feature_cols[pos]] for row in rows}
            kinds[pos] = NominalKind(frozenset(observed))

    cases = []
    row_by_vector: dict[tuple, int] = {}
    for r, row in enumerate(rows):
        line_no = r + 2  # header is line 1
        values = []
        for pos, name in enumerate(feature_names):
            token = row[feature_cols[pos]]
            values.append(_parse_value(token, kinds[pos], line_no, name))
        try:
            y = float(rows[r][target_idx])
        except ValueError:
            raise ParseError(
                f"feedback {rows[r][target_idx]!r} is not a number",
                row=line_no,
                column=target_name,
            ) from None
        if y == int(y):
            y = int(y)
        vec = tuple(values)
        if vec in row_by_vector:
            raise DuplicateFeatureVector(
                f"rows {row_by_vector[vec]} and {line_no} share feature vector {vec!r}"
            )
        row_by_vector[vec] = line_no
        cases.append(Case(FeatureVector(vec), y))

    schema = FeatureSchema(tuple(kinds))
    training = TrainingSet(tuple(cases))
    for case in training.cases:
        schema.validate_vector(case.x)
    return Dataset(training, schema, feature_names, target_name)


def _read_delimited(path: str | Path) -> tuple[list[str], list[list[str]]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    table = [row for row in reader if row]
    if not table:
        raise EmptySet(f"{path} is empty")
    header = [name.strip() for name in table[0]]
    if len(set(header)) != len(header):
        raise ParseError("header column names must be distinct", row=1)
    rows = []
    for r, row in enumerate(table[1:]):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} cells, found {len(row)}", row=r + 2
            )
        rows.append([cell.strip() for cell in row])
    if not rows:
        raise EmptySet(f"{path} has a header but no data rows")
    return header, rows


def _infer_kind(tokens: list[str]) -> ColumnKind:
    for token in tokens:
        try:
            float(token)
        except ValueError:
            return NominalKind(frozenset(tokens))
    return NumericKind()


def _parse_value(token: str, kind: ColumnKind, line_no: int, column: str):
    if isinstance(kind, NumericKind):
        try:
            value = float(token)
        except ValueError:
            raise ParseError(
                f"value {token!r} is not numeric", row=line_no, column=column
            ) from None
        return int(value) if value == int(value) else value
    if isinstance(kind, OrdinalKind):
        if token not in kind.levels:
            raise ParseError(
                f"value {token!r} not among ordinal levels {list(kind.levels)}",
                row=line_no,
                column=column,
            )
        return kind.levels.index(token)
    if token not in kind.symbols:
        raise ParseError(
            f"value {token!r} not among declared symbols", row=line_no, column=column
        )
    return token


def load_dataset_for_model(path: str | Path, model: "Model") -> Dataset:
    """Parse a dataset using a trained model's column story.

    The header must contain exactly the model's feature columns plus its
    target column, in any order; cells are parsed under the model's
    declared kinds rather than re-inferred, so ordinal levels keep the
    ranks they had at training time.
    """
    header, rows = _read_delimited(path)
    expected = set(model.feature_names) | {model.target_name}
    if set(header) != expected:
        raise SchemaMismatch(
            f"columns {header} do not match model columns "
            f"{list(model.feature_names)} + target {model.target_name!r}"
        )
    position = {name: header.index(name) for name in header}
    kind_of = dict(zip(model.feature_names, model.schema.columns))
    cases = []
    row_by_vector: dict[tuple, int] = {}
    for r, row in enumerate(rows):
        line_no = r + 2
        values = tuple(
            _parse_value(row[position[name]], kind_of[name], line_no, name)
            for name in model.feature_names
        )
        token = row[position[model.target_name]]
        try:
            y = float(token)
        except ValueError:
            raise ParseError(
                f"feedback {token!r} is not a number",
                row=line_no,
                column=model.target_name,
            ) from None
        if y == int(y):
            y = int(y)
        if values in row_by_vector:
            raise DuplicateFeatureVector(
                f"rows {row_by_vector[values]} and {line_no} share feature vector {values!r}"
            )
        row_by_vector[values] = line_no
        cases.append(Case(FeatureVector(values), y))
    training = TrainingSet(tuple(cases))
    for case in training.cases:
        model.schema.validate_vector(case.x)
    return Dataset(training, model.schema, model.feature_names, model.target_name)


def load_queries(
    path: str | Path, feature_names: tuple[str, ...], schema: FeatureSchema
) -> tuple[FeatureVector, ...]:
    """Feature-only rows whose header must match the model's columns."""
    header, rows = _read_delimited(path)
    if tuple(header) != tuple(feature_names):
        raise SchemaMismatch(
            f"query columns {header} do not match model columns {list(feature_names)}"
        )
    out = []
    for r, row in enumerate(rows):
        values = tuple(
            _parse_value(token, kind, r + 2, name)
            for token, kind, name in zip(row, schema.columns, feature_names)
        )
        vec = FeatureVector(values)
        schema.validate_vector(vec)
        out.append(vec)
    return tuple(out)


# ---------------------------------------------------------------------------
# Model files


@dataclass(frozen=True)
class Model:
    """Everything a trained model remembers."""

    family: str
    params: dict
    feature_names: tuple[str, ...]
    schema: FeatureSchema
    target_name: str
    y_kind: YKind
    hypothesis: Hypothesis | None = None
    tree: TreePartition | None = None
    training_hash: str | None = None
    total_inconsistency: float | None = None


def save_model(model: Model, path: str | Path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "family": model.family,
        "params": model.params,
        "feature_names": list(model.feature_names),
        "schema": [_column_kind_to_json(kind) for kind in model.schema.columns],
        "target": model.target_name,
        "y_kind": model.y_kind.value,
        "hypothesis": _hypothesis_to_json(model.hypothesis),
        "tree": _tree_to_json(model.tree.root) if model.tree is not None else None,
        "training_hash": model.training_hash,
        "total_inconsistency": model.total_inconsistency,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> Model:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path} is not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc.get('version')!r}; this build reads {MODEL_VERSION}"
        )
    schema = FeatureSchema(tuple(_column_kind_from_model(e) for e in doc["schema"]))
    tree_doc = doc.get("tree")
    tree = (
        TreePartition(_tree_from_json(tree_doc), schema.n)
        if tree_doc is not None
        else None
    )
    return Model(
        family=doc["family"],
        params=dict(doc["params"]),
        feature_names=tuple(doc["feature_names"]),
        schema=schema,
        target_name=doc["target"],
        y_kind=YKind(doc["y_kind"]),
        hypothesis=_hypothesis_from_json(doc.get("hypothesis"), schema),
        tree=tree,
        training_hash=doc.get("training_hash"),
        total_inconsistency=doc.get("total_inconsistency"),
    )


def _column_kind_to_json(kind: ColumnKind) -> dict:
    if isinstance(kind, NumericKind):
        return {"kind": "numeric"}
    if isinstance(kind, OrdinalKind):
        return {"kind": "ordinal", "levels": list(kind.levels)}
    return {"kind": "nominal", "symbols": sorted(kind.symbols)}


def _column_kind_from_model(entry: dict) -> ColumnKind:
    kind = entry.get("kind")
    if kind == "numeric":
        return NumericKind()
    if kind == "ordinal":
        return OrdinalKind(tuple(entry["levels"]))
    if kind == "nominal":
        return NominalKind(frozenset(entry["symbols"]))
    raise ModelFormatError(f"model schema declares unknown kind {kind!r}")


def _hypothesis_to_json(h: Hypothesis | None) -> dict | None:
    if h is None:
        return None
    if isinstance(h, LinearHypothesis):
        return {"kind": "linear", "b": list(h.b), "a": h.a}
    return {"kind": "pointwise", "x0": list(h.x0.values), "value": h.value}


def _hypothesis_from_json(doc: dict | None, schema: FeatureSchema) -> Hypothesis | None:
    if doc is None:
        return None
    if doc.get("kind") == "linear":
        return LinearHypothesis(tuple(doc["b"]), doc["a"])
    if doc.get("kind") == "pointwise":
        return PointwiseHypothesis(FeatureVector(tuple(doc["x0"])), doc["value"])
    raise ModelFormatError(f"unknown hypothesis kind {doc.get('kind')!r}")


def _tree_to_json(node: TreeNode | TreeLeaf) -> dict:
    if isinstance(node, TreeLeaf):
        return {"leaf": node.leaf_id, "cases": list(node.case_indices)}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _tree_to_json(node.left),
        "right": _tree_to_json(node.right),
    }


def _tree_from_json(doc: dict) -> TreeNode | TreeLeaf:
    if "leaf" in doc:
        return TreeLeaf(doc["leaf"], tuple(doc["cases"]))
    return TreeNode(
        doc["feature"],
        doc["threshold"],
        _tree_from_json(doc["left"]),
        _tree_from_json(doc["right"]),
    )
