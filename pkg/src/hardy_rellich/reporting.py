"""CSV/JSON serialization of identity reports and ratio traces.

CSV columns are fixed::

    name, alpha, beta, fn_label, lhs, rhs, abs_residual, rel_residual, pass, extra

Floats are written with 17 significant digits so they re-parse exactly.
``extra`` is a compact JSON object holding any parameters other than alpha and
beta (e.g. ``a``, ``t``, ``n``); it is empty when there are none.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

from .identities import IdentityReport

CSV_COLUMNS = ["name", "alpha", "beta", "fn_label", "lhs", "rhs", "abs_residual", "rel_residual", "pass", "extra"]
TRACE_COLUMNS = ["m_or_iter", "ratio", "target", "gap"]
SCHEMA_VERSION = 1


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def sort_reports(reports: Iterable[IdentityReport]) -> list[IdentityReport]:
    return sorted(reports, key=lambda rep: rep.sort_key())


def reports_to_csv(reports: Iterable[IdentityReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        extra = {k: v for k, v in sorted(rep.params.items()) if k not in ("alpha", "beta")}
        w.writerow([
            rep.name,
            fmt(rep.params.get("alpha")),
            fmt(rep.params.get("beta")),
            rep.fn_label,
            fmt(rep.lhs),
            fmt(rep.rhs),
            fmt(rep.abs_residual),
            fmt(rep.rel_residual),
            "true" if rep.passed else "false",
            json.dumps(extra, sort_keys=True, separators=(",", ":")) if extra else "",
        ])
    return buf.getvalue()


def reports_to_json(reports: Iterable[IdentityReport], summary: dict | None = None) -> str:
    grouped: dict[str, list] = {}
    for rep in reports:
        grouped.setdefault(rep.name, []).append(rep.to_json())
    doc = {
        "schema_version": SCHEMA_VERSION,
        "summary": summary or {},
        "reports": dict(sorted(grouped.items())),
    }
    return json.dumps(_clean(doc), indent=1, sort_keys=False) + "\n"


def write_reports(out_dir: Path, reports: list[IdentityReport], summary: dict | None = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = sort_reports(reports)
    (out_dir / "reports.csv").write_text(reports_to_csv(reports))
    (out_dir / "reports.json").write_text(reports_to_json(reports, summary))


def trace_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for p in points:
        w.writerow([fmt(p.param), fmt(p.ratio), fmt(p.target), fmt(p.gap)])
    return buf.getvalue()


def read_reports_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
