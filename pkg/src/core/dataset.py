"""Tabular ingestion and discretization.

Raw CSV columns are sniffed into numeric, boolean or text kinds, then encoded
as ordinal codes: numeric columns by empirical quantile binning, text columns
by first appearance, booleans as false/true. Missing feature cells get an
extra state appended after the regular ones.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split

from src.exceptions import DataValidationError, SchemaMismatchError
from src.models import Variable, canonical_hash

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
BOOLEAN = "boolean"
TEXT = "text"

_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


@dataclass
class RawTable:
    """Untyped CSV content with sniffed column kinds"""
    frame: pd.DataFrame
    kinds: Dict[str, str]
    labels: List[str] = field(default_factory=list)

    @property
    def column_names(self) -> List[str]:
        return list(self.frame.columns)

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def drop(self, columns: Iterable[str]) -> "RawTable":
        columns = [c for c in columns]
        unknown = [c for c in columns if c not in self.frame.columns]
        if unknown:
            raise DataValidationError(f"unknown column(s): {', '.join(unknown)}")
        keep = [c for c in self.column_names if c not in columns]
        return RawTable(
            frame=self.frame[keep],
            kinds={c: self.kinds[c] for c in keep},
            labels=[c for c in self.labels if c in keep],
        )

    def take(self, rows: Sequence[int]) -> "RawTable":
        return RawTable(frame=self.frame.iloc[list(rows)].reset_index(drop=True), kinds=dict(self.kinds),
                        labels=list(self.labels))


def _sniff(cells: pd.Series, boolean: bool) -> str:
    present = cells[cells != ""]
    if present.empty:
        return TEXT
    lowered = present.str.strip().str.lower()
    if boolean and lowered.isin(_TRUE | _FALSE).all():
        return BOOLEAN
    if pd.to_numeric(present, errors="coerce").notna().all():
        return NUMERIC
    return TEXT


def load_csv(path: Union[str, Path], label_names: Sequence[str],
             boolean_columns: Sequence[str] = ()) -> RawTable:
    """
    Reads an RFC-4180 CSV file with a header row.

    Args:
        path: CSV file location.
        label_names: Columns to tag as labels; rows with a missing label are rejected.
        boolean_columns: Columns allowed to be read as booleans.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise DataValidationError(f"empty file: {path}")
    except pd.errors.ParserError as e:
        raise DataValidationError(f"ragged rows in {path}: {e}")
    except OSError as e:
        raise DataValidationError(f"cannot read {path}: {e}")

    if frame.columns.duplicated().any():
        raise DataValidationError(f"duplicate column names in {path}")
    # keep_default_na=False leaves NaN only where a row was too short
    if frame.isna().any().any():
        raise DataValidationError(f"ragged rows in {path}")
    if len(frame) == 0:
        raise DataValidationError(f"empty file: {path}")

    unknown = [name for name in label_names if name not in frame.columns]
    if unknown:
        raise DataValidationError(f"unknown label name: {', '.join(unknown)}")

    for name in label_names:
        missing = frame[name] == ""
        if missing.any():
            logger.warning(f"Rejecting {int(missing.sum())} rows with missing label '{name}'")
            frame = frame[~missing]
    frame = frame.reset_index(drop=True)
    if len(frame) == 0:
        raise DataValidationError(f"empty file: every row of {path} misses a label")

    kinds = {name: _sniff(frame[name], name in boolean_columns) for name in frame.columns}
    return RawTable(frame=frame, kinds=kinds, labels=list(label_names))


def quantile_edges(values: np.ndarray, n_bins: int) -> List[float]:
    """
    Right-closed cut points at the i/n_bins empirical quantiles (linear interpolation),
    with tied or empty bins merged away. A column with two or more distinct values
    always keeps a cut below its maximum, so skewed 0/1 columns stay binary.
    """
    raw = np.unique(np.quantile(values, np.arange(1, n_bins) / n_bins))
    edges: List[float] = []
    lower = -np.inf
    top = values.max()
    for edge in raw:
        if edge >= top:
            break
        if np.any((values > lower) & (values <= edge)):
            edges.append(float(edge))
            lower = edge
    if not edges:
        below = values[values < top]
        if below.size:
            edges.append(float(below.max()))
    return edges


def _encode_numeric(cells: pd.Series, edges: List[float], missing_code: Optional[int]) -> np.ndarray:
    present = cells != ""
    codes = np.empty(len(cells), dtype=np.int64)
    values = pd.to_numeric(cells[present], errors="coerce").to_numpy(dtype=float)
    if np.isnan(values).any():
        raise SchemaMismatchError(f"non-numeric value in numeric column '{cells.name}'")
    codes[present.to_numpy()] = np.searchsorted(np.asarray(edges, dtype=float), values, side="left")
    if missing_code is not None:
        codes[~present.to_numpy()] = missing_code
    elif not present.all():
        raise SchemaMismatchError(f"missing cell in column '{cells.name}' which had none when learned")
    return codes


def _encode_states(cells: pd.Series, states: List[str], missing_code: Optional[int]) -> np.ndarray:
    index = {state: i for i, state in enumerate(states)}
    if missing_code is not None:
        index[""] = missing_code
    codes = cells.map(index)
    if codes.isna().any():
        unseen = sorted(set(cells[codes.isna()]))
        raise SchemaMismatchError(f"unknown state(s) {unseen[:5]} in column '{cells.name}'")
    return codes.to_numpy(dtype=np.int64)


def _normalize_boolean(cells: pd.Series) -> pd.Series:
    lowered = cells.str.strip().str.lower()
    return lowered.map(lambda v: "true" if v in _TRUE else ("false" if v in _FALSE else v))


class Dataset:
    """Read-only column-oriented table of discretized variables"""

    def __init__(self, variables: Sequence[Variable], data: np.ndarray):
        data = np.asarray(data, dtype=np.int64)
        if data.ndim != 2 or data.shape[1] != len(variables):
            raise DataValidationError("data must be a rows x variables matrix")
        if data.shape[0] < 1:
            raise DataValidationError("a dataset needs at least one row")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DataValidationError("variable names must be unique")
        for j, var in enumerate(variables):
            column = data[:, j]
            if column.min() < 0 or column.max() >= var.cardinality:
                raise DataValidationError(f"codes of '{var.name}' outside [0, {var.cardinality})")
        self.variables: List[Variable] = list(variables)
        self.data = np.ascontiguousarray(data)
        self.data.flags.writeable = False
        self.cardinalities = np.array([v.cardinality for v in variables], dtype=np.int64)
        self.cardinalities.flags.writeable = False
        self._index = {name: j for j, name in enumerate(names)}

    @classmethod
    def from_codes(cls, columns: Dict[str, Sequence[int]], labels: Sequence[str] = (),
                   cardinalities: Optional[Dict[str, int]] = None) -> "Dataset":
        """Builds a dataset straight from ordinal codes; cardinality defaults to max code + 1."""
        cardinalities = cardinalities or {}
        names = list(columns)
        data = np.column_stack([np.asarray(columns[n], dtype=np.int64) for n in names])
        variables = [
            Variable(
                name=n,
                cardinality=int(cardinalities.get(n, int(data[:, j].max()) + 1)),
                kind="label" if n in labels else "feature",
            )
            for j, n in enumerate(names)
        ]
        return cls(variables, data)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def label_ids(self) -> List[int]:
        return [j for j, v in enumerate(self.variables) if v.kind == "label"]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DataValidationError(f"unknown variable '{name}'")

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def cardinality(self, j: int) -> int:
        return int(self.cardinalities[j])

    def schema(self) -> List[Dict]:
        return [v.model_dump(mode="json") for v in self.variables]

    def schema_hash(self) -> str:
        return canonical_hash(self.schema())

    def to_json(self) -> str:
        return json.dumps({
            "variables": self.schema(),
            "data": self.data.T.tolist(),
            "n_rows": self.n_rows,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        payload = json.loads(text)
        variables = [Variable(**v) for v in payload["variables"]]
        data = np.asarray(payload["data"], dtype=np.int64).T.reshape(payload["n_rows"], len(variables))
        return cls(variables, data)


def discretize(table: RawTable, n_bins: int) -> Dataset:
    """
    Encodes every column of a RawTable into ordinal codes.

    Args:
        table: Sniffed raw table.
        n_bins: Requested number of quantile bins for numeric columns (may collapse).
    """
    if n_bins < 2:
        raise DataValidationError("n_bins must be at least 2")

    variables: List[Variable] = []
    columns: List[np.ndarray] = []
    for name in table.column_names:
        cells = table.frame[name]
        kind = table.kinds[name]
        role = "label" if name in table.labels else "feature"
        has_missing = bool((cells == "").any())

        if kind == NUMERIC:
            present = cells[cells != ""]
            values = pd.to_numeric(present).to_numpy(dtype=float)
            edges = quantile_edges(values, n_bins)
            if len(edges) < n_bins - 1:
                logger.debug(f"Column '{name}': {n_bins} bins collapsed to {len(edges) + 1}")
            missing_code = len(edges) + 1 if has_missing else None
            var = Variable(name=name, cardinality=len(edges) + 1 + int(has_missing), kind=role,
                           bin_edges=edges, missing=has_missing)
            codes = _encode_numeric(cells, edges, missing_code)
        else:
            if kind == BOOLEAN:
                cells = _normalize_boolean(cells)
                states = ["false", "true"]
            else:
                states = list(dict.fromkeys(cells[cells != ""]))
            missing_code = len(states) if has_missing else None
            var = Variable(name=name, cardinality=max(len(states) + int(has_missing), 1), kind=role,
                           states=states, missing=has_missing)
            codes = _encode_states(cells, states, missing_code) if len(cells) else np.zeros(0, np.int64)

        variables.append(var)
        columns.append(codes)

    logger.info(f"Discretized {len(variables)} columns over {table.n_rows} rows")
    return Dataset(variables, np.column_stack(columns))


def apply_schema(table: RawTable, variables: Sequence[Variable]) -> Dataset:
    """
    Encodes a raw table with a previously learned schema, reusing its bin edges and states.

    Raises:
        SchemaMismatchError: when a column is missing or a value cannot be encoded.
    """
    missing = [v.name for v in variables if v.name not in table.frame.columns]
    if missing:
        raise SchemaMismatchError(f"column(s) absent from data: {', '.join(missing)}")

    columns = []
    for var in variables:
        cells = table.frame[var.name]
        missing_code = var.cardinality - 1 if var.missing else None
        if var.bin_edges is not None:
            columns.append(_encode_numeric(cells, var.bin_edges, missing_code))
        else:
            if var.states == ["false", "true"]:
                cells = _normalize_boolean(cells)
            columns.append(_encode_states(cells, var.states or [], missing_code))
    return Dataset(variables, np.column_stack(columns))


def stratified_split(table: RawTable, label: str, test_fraction: float = 0.2,
                     seed: int = 0) -> Tuple[RawTable, RawTable]:
    """Train/test partition preserving the class proportions of `label`"""
    if label not in table.frame.columns:
        raise DataValidationError(f"unknown label name: {label}")
    rows = np.arange(table.n_rows)
    classes = table.frame[label]
    if table.kinds.get(label) == BOOLEAN:
        classes = _normalize_boolean(classes)
    try:
        train_rows, test_rows = train_test_split(
            rows, test_size=test_fraction, random_state=seed, stratify=classes.to_numpy()
        )
    except ValueError as e:
        raise DataValidationError(f"cannot stratify on '{label}': {e}")
    return table.take(np.sort(train_rows)), table.take(np.sort(test_rows))


def write_csv(table: RawTable, path: Union[str, Path]):
    table.frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
