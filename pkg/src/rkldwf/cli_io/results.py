"""CSV and JSON result files."""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from ..metrics.evaluation import (
    AGGREGATE_COLUMNS,
    CURVE_COLUMNS,
    TRIAL_COLUMNS,
    AggregateRow,
    CurveRow,
    TrialRecord,
)
from ..solver.runner import TraceRecord

TRACE_COLUMNS = ["iter", "loss", "rel_err", "kept_count", "step"]

PathLike = Union[str, Path]


def _write_csv(path: PathLike, columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row[k] is None else row[k] for k in columns})


def write_trials_csv(path: PathLike, records: Sequence[TrialRecord]) -> None:
    _write_csv(path, TRIAL_COLUMNS, [r.to_row() for r in records])


def write_aggregates_csv(path: PathLike, rows: Sequence[AggregateRow]) -> None:
    _write_csv(path, AGGREGATE_COLUMNS, [r.to_row() for r in rows])


def write_curves_csv(path: PathLike, rows: Sequence[CurveRow]) -> None:
    _write_csv(path, CURVE_COLUMNS, [r.to_row() for r in rows])


def write_trace_csv(path: PathLike, trace: Sequence[TraceRecord]) -> None:
    _write_csv(path, TRACE_COLUMNS, [r.to_dict() for r in trace])


def read_trials_csv(path: PathLike) -> List[TrialRecord]:
    """Parse a trial CSV back into records (fields outside the CSV take their defaults)."""
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            records.append(TrialRecord(
                seed=int(row["seed"]),
                sweep_var=row["sweep_var"],
                sweep_value=float(row["sweep_value"]),
                algorithm=row["algorithm"],
                trial=int(row["trial"]),
                dist=float(row["dist"]),
                rel_err=float(row["rel_err"]),
                iterations=int(row["iters"]),
                success=row["success"] == "1",
                acc=float(row["acc"]),
                wall_ms=float(row["wall_ms"]),
            ))
    return records


def write_json(path: PathLike, data: Dict[str, Any]) -> None:
    """Pretty-printed, key-sorted JSON with a trailing newline."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True, default=str)
        handle.write("\n")


def sibling_path(path: PathLike, suffix: str) -> Path:
    """results/table.csv + '_aggregates.csv' -> results/table_aggregates.csv"""
    path = Path(path)
    return path.with_name(path.stem + suffix)
