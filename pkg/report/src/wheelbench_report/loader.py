"""Load wheelbench result files (schema v1) into a tidy run table.

The loader is deliberately independent of the wheelbench package: it
consumes only the published JSON schema, so it can post-process results
produced anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence, Union

import pandas as pd

SUPPORTED_SCHEMA = 1

METRIC_COLUMNS = [
    "found",
    "collision_free",
    "exact",
    "length",
    "mean_curvature",
    "max_curvature",
    "cusps",
    "mean_clearance",
    "state_checks",
]


class SchemaError(ValueError):
    """Result document does not match the supported schema."""


@dataclass
class LoadedResults:
    """Raw documents plus a tidy table: one row per run, one column per
    metric; smoothed metrics (when present) override the planner's own."""

    documents: List[dict]
    table: pd.DataFrame

    @property
    def runs(self) -> List[dict]:
        return [run for doc in self.documents for run in doc["runs"]]


def _validate(doc: dict) -> None:
    version = doc.get("schema_version")
    if version != SUPPORTED_SCHEMA:
        raise SchemaError(
            f"unsupported schema_version {version!r} (supported: {SUPPORTED_SCHEMA})"
        )
    if "runs" not in doc or "config" not in doc:
        raise SchemaError("result document must contain 'config' and 'runs'")


def _tidy_rows(doc: dict) -> List[dict]:
    time_limit = doc.get("config", {}).get("time_limit")
    rows = []
    for run in doc["runs"]:
        metrics = run.get("metrics") or {}
        smoothed = run.get("metrics_smoothed")
        effective = smoothed if smoothed is not None else metrics
        row = {
            "scenario": run["scenario"],
            "planner": run["planner"],
            "steer": run["steer"],
            "smoother": run.get("smoother"),
            "seed": run["seed"],
            "status": run["status"],
            "time_limit": time_limit,
            "time_to_first": run.get("time_to_first"),
            "solution_history": run.get("solution_history", []),
        }
        for key in METRIC_COLUMNS:
            row[key] = effective.get(key)
        rows.append(row)
    return rows


def load_results(paths: Union[str, Sequence[str]]) -> LoadedResults:
    """Load one or more result files; runs from every file share one table.

    Multiple files typically hold the same experiment at different time
    limits; the per-file limit lands in the time_limit column.
    """
    if isinstance(paths, (str, bytes)):
        paths = [paths]
    documents = []
    rows: List[dict] = []
    for path in paths:
        with open(path) as fh:
            doc = json.load(fh)
        _validate(doc)
        documents.append(doc)
        rows.extend(_tidy_rows(doc))
    table = pd.DataFrame(rows)
    return LoadedResults(documents=documents, table=table)
