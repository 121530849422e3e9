"""Deterministic CSV/JSON report writers.

CSV reports carry ``# key=value`` comment lines (version, full run
configuration, diagnostics, verdict) followed by the header
``label,count,proportion,stderr`` and one row per label.  JSON reports are
an object with ``config``, ``results`` (array of label/count/proportion/
stderr records), ``diagnostics`` and an optional ``verdict``.  All numbers
are rounded to 12 significant digits and printed in shortest round-trip
form, so a rerun with the same configuration writes byte-identical files.
"""

from __future__ import annotations

import json

from .stats import ComparisonVerdict, EstimateTable

CSV_HEADER = "label,count,proportion,stderr"


def fmt_num(x) -> str:
    """12 significant digits; integers stay integers; None becomes empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return repr(round12(x))


def round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def _jsonable(x):
    if isinstance(x, float):
        return round12(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def table_rows(table: EstimateTable) -> list[dict]:
    return [
        {"label": lab, "count": c, "proportion": p, "stderr": se}
        for lab, c, p, se in zip(table.labels, table.counts, table.proportions, table.stderrs)
    ]


def formula_rows(values: dict, stderr: dict | None = None) -> list[dict]:
    """Rows for closed-form tables; counts are empty, values sit in proportion."""
    return [
        {
            "label": lab,
            "count": None,
            "proportion": val,
            "stderr": None if stderr is None else stderr.get(lab),
        }
        for lab, val in values.items()
    ]


def verdict_dict(v: ComparisonVerdict) -> dict:
    return {
        "passed": v.passed,
        "k": v.k,
        "worst_label": v.worst_label,
        "worst_z": v.worst_z,
        "z_scores": {str(lab): z for lab, z in zip(v.labels, v.z_scores)},
    }


def render_csv(version, config_items, rows, diagnostics=None, verdict=None) -> str:
    lines = [f"# version={version}"]
    for key, val in config_items:
        lines.append(f"# {key}={fmt_num(val) if not isinstance(val, str) else val}")
    for key in sorted(diagnostics or {}):
        lines.append(f"# diagnostics.{key}={fmt_num(diagnostics[key])}")
    if verdict is not None:
        flat = verdict if isinstance(verdict, dict) else verdict_dict(verdict)
        for key in ("passed", "k", "worst_label", "worst_z"):
            if key in flat:
                lines.append(f"# verdict.{key}={fmt_num(flat[key])}")
    lines.append(CSV_HEADER)
    for row in rows:
        lines.append(
            f"{row['label']},{fmt_num(row['count'])},"
            f"{fmt_num(row['proportion'])},{fmt_num(row['stderr'])}"
        )
    return "\n".join(lines) + "\n"


def render_json(version, config_items, rows, diagnostics=None, verdict=None) -> str:
    doc = {
        "version": version,
        "config": {k: v for k, v in config_items},
        "results": rows,
        "diagnostics": diagnostics or {},
    }
    if verdict is not None:
        doc["verdict"] = verdict if isinstance(verdict, dict) else verdict_dict(verdict)
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def write_report(path, fmt, version, config_items, rows, diagnostics=None, verdict=None):
    if fmt == "csv":
        text = render_csv(version, config_items, rows, diagnostics, verdict)
    elif fmt == "json":
        text = render_json(version, config_items, rows, diagnostics, verdict)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
