"""Check records, verification reports, and their serializations."""

from __future__ import annotations

import csv
import io
import json
import platform
from dataclasses import asdict, dataclass, field
from typing import List, Optional

__all__ = ["CheckRecord", "VerificationReport", "emit_report",
           "report_from_json", "environment_fingerprint",
           "CSV_COLUMNS", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1


def environment_fingerprint() -> dict:
    """Build identifiers that pin a report to its numeric environment."""
    import numpy
    import scipy
    import sympy
    from . import __version__
    return {
        "fuzzylab": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
    }

#: column order of the CSV emitter (documented in the CLI help)
CSV_COLUMNS = ["check_id", "suite", "kind", "statement", "params",
               "residual", "threshold", "passed", "wall_time_ms", "detail"]


@dataclass
class CheckRecord:
    """One executed check.

    ``kind`` is "identity" for residual-below-threshold checks and
    "diagnostic" for expected-nonzero observations (those never fail a run).
    ``statement`` quotes the relation being verified.
    """

    check_id: str
    suite: str
    statement: str
    params: dict
    residual: float
    threshold: float
    passed: bool
    kind: str = "identity"
    wall_time_ms: float = 0.0
    detail: str = ""


@dataclass
class VerificationReport:
    config: dict
    records: List[CheckRecord] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        """True iff every non-diagnostic check passed."""
        return all(r.passed for r in self.records if r.kind != "diagnostic")

    def summary(self) -> dict:
        checks = [r for r in self.records if r.kind != "diagnostic"]
        diags = [r for r in self.records if r.kind == "diagnostic"]
        return {
            "checks": len(checks),
            "passed": sum(r.passed for r in checks),
            "failed": sum(not r.passed for r in checks),
            "diagnostics": len(diags),
            "diagnostics_observed": sum(r.passed for r in diags),
            "environment": environment_fingerprint(),
        }

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "config": self.config,
            "summary": self.summary(),
            "records": [asdict(r) for r in self.records],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.records:
            row = asdict(r)
            row["params"] = json.dumps(row["params"], sort_keys=True)
            writer.writerow({k: row[k] for k in CSV_COLUMNS})
        return buf.getvalue()

    def to_text(self) -> str:
        lines = ["verification report"]
        for r in self.records:
            mark = "pass" if r.passed else ("seen" if r.kind == "diagnostic"
                                            else "FAIL")
            if r.kind == "diagnostic" and not r.passed:
                mark = "quiet"
            params = " ".join(f"{k}={v}" for k, v in sorted(r.params.items()))
            lines.append(f"[{mark}] {r.check_id}  ({params})")
            lines.append(f"       {r.statement}")
            lines.append(f"       residual {r.residual:.3e}  threshold "
                         f"{r.threshold:.3e}  [{r.wall_time_ms:.1f} ms]")
            if r.detail:
                lines.append(f"       {r.detail}")
        s = self.summary()
        lines.append(f"summary: {s['passed']}/{s['checks']} checks passed, "
                     f"{s['diagnostics_observed']}/{s['diagnostics']} "
                     "diagnostics observed")
        return "\n".join(lines) + "\n"


def report_from_json(text: str) -> VerificationReport:
    payload = json.loads(text)
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unknown report schema version")
    records = [CheckRecord(**r) for r in payload["records"]]
    return VerificationReport(config=payload["config"], records=records)


def emit_report(report: VerificationReport, fmt: str,
                path: Optional[str] = None) -> str:
    """Render the report as json/csv/text; write to ``path`` if given."""
    if fmt == "json":
        out = report.to_json()
    elif fmt == "csv":
        out = report.to_csv()
    elif fmt == "text":
        out = report.to_text()
    else:
        raise ValueError(f"unknown format {fmt!r} (want json, csv or text)")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(out)
    return out
