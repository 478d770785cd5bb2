"""Loading and normalising algorithm-performance data.

Two loaders are provided: ``load_scenario`` reads an ASlib-style scenario
directory (a ``description.txt`` plus an ``algorithm_runs.arff`` table) and
``load_csv`` reads a plain instances-by-algorithms table. Both produce a
:class:`PerformanceMatrix` in original measurement units. From there,
``transform_performance`` maps the matrix to a higher-is-better scale on the
open unit interval and attaches the logit-transformed response matrix used by
model fitting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from ._arff import load_arff
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DegenerateScaleError,
    LoadError,
    ParseError,
    TransformError,
)

TRANSFORM_KINDS = ("identity", "reciprocal", "negate_minmax")


@dataclass(frozen=True)
class ScenarioDescriptor:
    """Names and objective direction for one performance scenario."""

    name: str
    measurement: str
    maximize: bool
    algorithm_names: tuple[str, ...]
    instance_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.algorithm_names or not self.instance_ids:
            raise ConfigurationError("descriptor needs algorithms and instances")
        if len(set(self.algorithm_names)) != len(self.algorithm_names):
            raise ConfigurationError("duplicate algorithm names")
        if len(set(self.instance_ids)) != len(self.instance_ids):
            raise ConfigurationError("duplicate instance ids")


@dataclass(frozen=True)
class PerformanceMatrix:
    """N instances by n algorithms of raw performance values."""

    values: np.ndarray
    descriptor: ScenarioDescriptor
    imputed: tuple[tuple[str, str], ...] = ()  # (instance, algorithm) pairs filled in

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ConfigurationError("performance values must be a 2-d matrix")
        if values.shape != (len(self.descriptor.instance_ids),
                            len(self.descriptor.algorithm_names)):
            raise ConfigurationError("matrix shape disagrees with descriptor")
        if values.shape[0] < 2 or values.shape[1] < 2:
            raise ConfigurationError(
                "need at least 2 instances and 2 algorithms for an IRT fit"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("performance matrix contains non-finite cells")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.values.shape[1]

    def select_instances(self, index) -> "PerformanceMatrix":
        """Row subset, preserving order of ``index``."""
        ids = tuple(self.descriptor.instance_ids[i] for i in index)
        return PerformanceMatrix(
            values=self.values[np.asarray(index, dtype=int)],
            descriptor=replace(self.descriptor, instance_ids=ids),
            imputed=tuple(p for p in self.imputed if p[0] in set(ids)),
        )


@dataclass(frozen=True)
class TransformConfig:
    """How raw values are mapped onto the higher-is-better unit scale.

    ``kind`` is one of ``identity`` (scores already increasing, for example
    accuracy), ``reciprocal`` (strictly positive runtimes) or
    ``negate_minmax`` (negate then min-max rescale, for runtimes or penalised
    runtimes). ``clip_epsilon`` keeps values away from 0 and 1 where the
    logit is undefined. ``k`` is the score-range upper bound after rescaling
    and stays fixed at 1.
    """

    kind: str = "identity"
    clip_epsilon: float = 0.01
    k: float = 1.0

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ConfigurationError(f"unknown transform kind {self.kind!r}")
        if not 0.0 < self.clip_epsilon < 0.5:
            raise ConfigurationError("clip_epsilon must lie in (0, 0.5)")
        if self.k != 1.0:
            raise ConfigurationError("k is fixed to 1 after rescaling")


@dataclass(frozen=True)
class TransformedResponses:
    """Unit-scale performance ``x`` and its logit ``z``.

    ``scale`` records the divisor or span used to reach the unit scale so
    original units can be recovered for display.
    """

    x: np.ndarray
    z: np.ndarray
    transform: TransformConfig
    algorithm_names: tuple[str, ...] = ()
    instance_ids: tuple[str, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        for name in ("x", "z"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_instances(self) -> int:
        return self.x.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.x.shape[1]


def _worst_observed(row: np.ndarray, maximize: bool) -> float:
    observed = row[np.isfinite(row)]
    if observed.size == 0:
        return math.nan
    return float(observed.min() if maximize else observed.max())


def _impute_matrix(values, instance_ids, algorithm_names, maximize, missing):
    """Fill NaN cells with the worst observed value of the same instance.

    Instances with no observed value at all are dropped. ``missing="drop"``
    drops every instance that has at least one unobserved cell instead of
    filling it.
    """
    keep_rows = []
    imputed = []
    for i, iid in enumerate(instance_ids):
        row = values[i]
        mask = ~np.isfinite(row)
        if mask.all():
            continue
        if mask.any():
            if missing == "drop":
                continue
            fill = _worst_observed(row, maximize)
            for j in np.nonzero(mask)[0]:
                imputed.append((iid, algorithm_names[j]))
            row = np.where(mask, fill, row)
        keep_rows.append((iid, row))
    if not keep_rows:
        raise ConsistencyError("no instance has any observed performance value")
    ids = tuple(iid for iid, _ in keep_rows)
    matrix = np.vstack([row for _, row in keep_rows])
    return matrix, ids, tuple(imputed)


def _read_description(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"cannot read description file {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a key-value document")
    return doc


def _first(value):
    if isinstance(value, (list, tuple)):
        return value[0] if value else None
    return value


def load_scenario(path, missing: str = "impute") -> PerformanceMatrix:
    """Load an ASlib-style scenario directory.

    The directory must contain a description file (``description.txt``)
    naming the performance measure and objective direction, and an
    ``algorithm_runs.arff`` table with one row per (instance, repetition,
    algorithm) run. Repeated runs are averaged; runs whose ``runstatus`` is
    not ``ok`` count as unobserved and are filled with the worst value seen
    on the same instance (or the instance is dropped with
    ``missing="drop"``).
    """
    if missing not in ("impute", "drop"):
        raise ConfigurationError("missing must be 'impute' or 'drop'")
    root = Path(path)
    desc_path = root / "description.txt"
    runs_path = root / "algorithm_runs.arff"
    if not desc_path.exists():
        raise LoadError(f"missing description file: {desc_path}")
    if not runs_path.exists():
        raise LoadError(f"missing algorithm runs file: {runs_path}")

    desc = _read_description(desc_path)
    measure = _first(desc.get("performance_measures")) or "performance"
    maximize = bool(_first(desc.get("maximize")) or False)
    name = str(desc.get("scenario_id") or root.name)

    table = load_arff(runs_path)
    try:
        col_inst = table.column("instance_id")
        col_algo = table.column("algorithm")
    except KeyError as exc:
        raise ConsistencyError(f"{runs_path}: missing column {exc.args[0]!r}") from exc
    try:
        col_perf = table.column(measure)
    except KeyError:
        raise ConsistencyError(
            f"{runs_path}: no column for performance measure {measure!r}"
        ) from None
    try:
        col_status = table.column("runstatus")
    except KeyError:
        col_status = None

    declared = desc.get("metainfo_algorithms")
    declared_names = set(declared.keys()) if isinstance(declared, dict) else None

    instance_ids: list[str] = []
    algorithm_names: list[str] = []
    seen_inst: dict[str, int] = {}
    seen_algo: dict[str, int] = {}
    runs: dict[tuple[int, int], list[float]] = {}
    observed_any: dict[tuple[int, int], bool] = {}

    for row in table.rows:
        iid, algo = row[col_inst], row[col_algo]
        if iid is None or algo is None:
            continue
        iid, algo = str(iid), str(algo)
        if declared_names is not None and algo not in declared_names:
            raise ConsistencyError(
                f"algorithm {algo!r} appears in runs but not in the description"
            )
        if iid not in seen_inst:
            seen_inst[iid] = len(instance_ids)
            instance_ids.append(iid)
        if algo not in seen_algo:
            seen_algo[algo] = len(algorithm_names)
            algorithm_names.append(algo)
        key = (seen_inst[iid], seen_algo[algo])
        observed_any.setdefault(key, False)
        perf = row[col_perf]
        ok = col_status is None or (row[col_status] or "").lower() == "ok"
        if perf is not None and ok:
            runs.setdefault(key, []).append(float(perf))
            observed_any[key] = True

    if not instance_ids or not algorithm_names:
        raise ConsistencyError(f"{runs_path}: no usable run rows")

    values = np.full((len(instance_ids), len(algorithm_names)), np.nan)
    for (i, j), perfs in runs.items():
        values[i, j] = float(np.mean(perfs))

    values, instance_ids, imputed = _impute_matrix(
        values, tuple(instance_ids), tuple(algorithm_names), maximize, missing
    )
    descriptor = ScenarioDescriptor(
        name=name,
        measurement=str(measure),
        maximize=maximize,
        algorithm_names=tuple(algorithm_names),
        instance_ids=instance_ids,
    )
    return PerformanceMatrix(values=values, descriptor=descriptor, imputed=imputed)


def load_csv(path, maximize: bool, missing: str = "error") -> PerformanceMatrix:
    """Load a performance table from CSV.

    Expects a header row of algorithm names with the first column holding
    instance ids. Empty cells raise a parse error unless
    ``missing="impute"``.
    """
    if missing not in ("error", "impute", "drop"):
        raise ConfigurationError("missing must be 'error', 'impute' or 'drop'")
    path = Path(path)
    if not path.exists():
        raise LoadError(f"missing CSV file: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        algorithm_names = tuple(name.strip() for name in header[1:])
        if not algorithm_names:
            raise ParseError(f"{path}: header has no algorithm columns")
        instance_ids: list[str] = []
        rows: list[list[float]] = []
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(algorithm_names) + 1:
                raise ParseError(
                    f"{path}: ragged row with {len(row)} fields", row=rownum
                )
            instance_ids.append(row[0].strip())
            parsed = []
            for colnum, cell in enumerate(row[1:], start=2):
                cell = cell.strip()
                if cell == "":
                    if missing == "error":
                        raise ParseError(
                            f"{path}: empty cell", row=rownum, column=colnum
                        )
                    parsed.append(math.nan)
                    continue
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: non-numeric cell {cell!r}",
                        row=rownum,
                        column=colnum,
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=float)
    values, instance_ids, imputed = _impute_matrix(
        values, tuple(instance_ids), algorithm_names, maximize,
        "drop" if missing == "drop" else "impute",
    )
    descriptor = ScenarioDescriptor(
        name=path.stem,
        measurement="value",
        maximize=maximize,
        algorithm_names=algorithm_names,
        instance_ids=instance_ids,
    )
    return PerformanceMatrix(values=values, descriptor=descriptor, imputed=imputed)


def default_transform(m: PerformanceMatrix) -> TransformConfig:
    """Identity for increasing measures, negate-and-rescale otherwise."""
    return TransformConfig(kind="identity" if m.descriptor.maximize else "negate_minmax")


def transform_performance(
    m: PerformanceMatrix, cfg: TransformConfig | None = None
) -> TransformedResponses:
    """Map raw performance onto (0, 1) so that larger is always better.

    The result is clipped to ``[clip_epsilon, 1 - clip_epsilon]`` and paired
    with its logit ``z = ln(x / (1 - x))``.
    """
    if cfg is None:
        cfg = default_transform(m)
    y = m.values
    maximize = m.descriptor.maximize

    if cfg.kind == "identity":
        if not maximize:
            raise TransformError("identity transform needs an increasing measure")
        if np.any(y < 0):
            raise TransformError("identity transform needs non-negative scores")
        top = float(y.max())
        scale = top if top > 1.0 else 1.0
        x = y / scale
    elif cfg.kind == "reciprocal":
        if maximize:
            raise TransformError("reciprocal transform is for decreasing measures")
        if np.any(y <= 0):
            raise TransformError("reciprocal needs strictly positive values")
        r = 1.0 / y
        scale = float(r.max())
        x = r / scale
    else:  # negate_minmax
        if maximize:
            raise TransformError("negate_minmax is for decreasing measures")
        u = -y
        span = float(u.max() - u.min())
        if span == 0.0:
            raise DegenerateScaleError(
                "all performance values are identical; no scale can be set"
            )
        scale = span
        x = (u - u.min()) / span

    eps = cfg.clip_epsilon
    x = np.clip(x, eps, 1.0 - eps)
    z = np.log(x / (1.0 - x))
    return TransformedResponses(
        x=x,
        z=z,
        transform=cfg,
        algorithm_names=m.descriptor.algorithm_names,
        instance_ids=m.descriptor.instance_ids,
        scale=scale,
    )


def inverse_logit(z):
    """Numerically safe logistic, the inverse of the logit link."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)
