"""Summary tables in the mean +- std style, one row per planner group.

Aggregates are recomputed from the raw runs with the same formulas the
benchmark runner uses (sample standard deviation, zero for single runs),
so table numbers match `wheelbench aggregate` output to printed precision.
"""

from __future__ import annotations

import math
from typing import List, Optional, Tuple

from .loader import LoadedResults


def _mean_std(values) -> Optional[Tuple[float, float]]:
    vals = [v for v in values if v is not None and not (isinstance(v, float) and math.isnan(v))]
    if not vals:
        return None
    mean = sum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


def _fmt(stat: Optional[Tuple[float, float]]) -> str:
    if stat is None:
        return "N / A"
    return f"{stat[0]:.2f} ± {stat[1]:.2f}"


def summarize(results: LoadedResults) -> List[dict]:
    """Group by (steer, planner, smoother) and aggregate the metrics."""
    groups = {}
    for run in results.runs:
        key = (run["steer"], run["planner"], run.get("smoother"))
        groups.setdefault(key, []).append(run)

    rows = []
    for (steer, planner, smoother), runs in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or "")
    ):
        effective = [
            run["metrics_smoothed"] if run.get("metrics_smoothed") is not None else run["metrics"]
            for run in runs
        ]
        found = [m for m in effective if m.get("found")]
        valid_exact = sum(
            1 for m in effective if m.get("found") and m.get("collision_free") and m.get("exact")
        )
        rows.append(
            {
                "steer": steer,
                "planner": planner,
                "smoother": smoother,
                "runs": len(runs),
                "found": len(found),
                "valid_exact": valid_exact,
                "time": _mean_std([run.get("time_to_first") for run in runs]),
                "length": _mean_std([m.get("length") for m in found]),
                "max_curvature": _mean_std([m.get("max_curvature") for m in found]),
                "mean_curvature": _mean_std([m.get("mean_curvature") for m in found]),
                "mean_clearance": _mean_std([m.get("mean_clearance") for m in found]),
                "cusps": sum(m.get("cusps") or 0 for m in found) if found else None,
            }
        )
    return rows


_HEADERS = [
    "Planner",
    "Steer",
    "Smoother",
    "Solutions",
    "Time [s]",
    "Path Length",
    "Curvature",
    "Clearance",
    "Cusps",
]


def _cells(row: dict) -> List[str]:
    solutions = f"{row['valid_exact']} / {row['found']}" if row["found"] else "0"
    cusps = "N / A" if row["cusps"] is None else str(row["cusps"])
    return [
        row["planner"],
        row["steer"],
        row["smoother"] or "-",
        solutions,
        _fmt(row["time"]),
        _fmt(row["length"]),
        _fmt(row["max_curvature"]),
        _fmt(row["mean_clearance"]),
        cusps,
    ]


def to_markdown(rows: List[dict]) -> str:
    lines = ["| " + " | ".join(_HEADERS) + " |", "|" + "---|" * len(_HEADERS)]
    for row in rows:
        lines.append("| " + " | ".join(_cells(row)) + " |")
    return "\n".join(lines) + "\n"


def to_csv(rows: List[dict]) -> str:
    header = ",".join(h.lower().replace(" [s]", "").replace(" ", "_") for h in _HEADERS)
    lines = [header]
    for row in rows:
        lines.append(",".join(f'"{c}"' if "," in c else c for c in _cells(row)))
    return "\n".join(lines) + "\n"


def to_latex(rows: List[dict]) -> str:
    lines = [
        "\\begin{tabular}{l" + "c" * (len(_HEADERS) - 1) + "}",
        " & ".join(_HEADERS) + " \\\\",
        "\\hline",
    ]
    for row in rows:
        cells = [c.replace("±", "$\\pm$") for c in _cells(row)]
        lines.append(" & ".join(cells) + " \\\\")
    lines.append("\\end{tabular}")
    return "\n".join(lines) + "\n"


FORMATS = {"md": to_markdown, "csv": to_csv, "latex": to_latex}


def emit_table(results: LoadedResults, fmt: str, out_path: str) -> str:
    if not results.runs:
        raise ValueError("cannot tabulate an empty result set")
    try:
        render = FORMATS[fmt]
    except KeyError:
        raise ValueError(f"unknown table format {fmt!r}; known: {sorted(FORMATS)}") from None
    text = render(summarize(results))
    with open(out_path, "w") as fh:
        fh.write(text)
    return text
