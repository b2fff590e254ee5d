"""Suite statistics, json/txt/html reports and cross-compiler comparison."""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from accvv import LANGUAGES
from accvv.runner import RECORD_STATUSES, RunRecord

SCHEMA_VERSION = 1
HTML_PAYLOAD_ID = "accvv-results"
ABSENT = "absent"
MATRIX_STATUSES = RECORD_STATUSES + (ABSENT,)


class ReportError(Exception):
    pass


class DuplicateColumn(ReportError):
    pass


def percent(numerator: int, denominator: int) -> Optional[float]:
    """Percentage rounded half-up to 0.1; ``None`` for an empty denominator."""
    if denominator <= 0:
        return None
    value = Decimal(numerator) * 100 / Decimal(denominator)
    return float(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def format_rate(rate: Optional[float]) -> str:
    return "n/a" if rate is None else f"{rate:.1f}%"


@dataclass
class Totals:
    total: int = 0
    passed: int = 0
    failed: int = 0
    compile_error: int = 0
    timeout: int = 0
    skipped: int = 0

    _FIELDS = {"pass": "passed", "fail": "failed", "compile_error": "compile_error",
               "timeout": "timeout", "skipped": "skipped"}

    def add(self, status: str) -> None:
        attr = self._FIELDS[status]
        setattr(self, attr, getattr(self, attr) + 1)
        self.total += 1

    def count(self, status: str) -> int:
        return getattr(self, self._FIELDS[status])

    @property
    def pass_rate(self) -> Optional[float]:
        # skipped tests (e.g. excluded languages) are not part of the denominator
        return percent(self.passed, self.total - self.skipped)

    def to_dict(self) -> dict:
        data = {"total": self.total}
        data.update((status, self.count(status)) for status in RECORD_STATUSES)
        data["pass_rate"] = self.pass_rate
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Totals":
        t = cls(total=data["total"])
        for status in RECORD_STATUSES:
            setattr(t, cls._FIELDS[status], data.get(status, 0))
        return t


@dataclass
class SuiteReport:
    system_label: str
    compiler_id: str
    timestamp: str
    totals: Totals = field(default_factory=Totals)
    per_language: Dict[str, Totals] = field(default_factory=dict)
    per_tag: Dict[str, Totals] = field(default_factory=dict)
    records: List[RunRecord] = field(default_factory=list)

    @property
    def pass_rate(self) -> Optional[float]:
        return self.totals.pass_rate

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "suite_report",
            "system_label": self.system_label,
            "compiler_id": self.compiler_id,
            "timestamp": self.timestamp,
            "totals": self.totals.to_dict(),
            "per_language": {k: v.to_dict() for k, v in self.per_language.items()},
            "per_tag": {k: v.to_dict() for k, v in self.per_tag.items()},
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteReport":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ReportError(f"unsupported report schema_version {version!r}")
        return cls(
            system_label=data["system_label"],
            compiler_id=data["compiler_id"],
            timestamp=data["timestamp"],
            totals=Totals.from_dict(data["totals"]),
            per_language={k: Totals.from_dict(v) for k, v in data["per_language"].items()},
            per_tag={k: Totals.from_dict(v) for k, v in data["per_tag"].items()},
            records=[RunRecord.from_dict(r) for r in data["records"]],
        )


def aggregate(records: Iterable[RunRecord], system_label: str = "", compiler_id: str = "",
              timestamp: Optional[str] = None) -> SuiteReport:
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    records = sorted(records, key=lambda r: r.case.path)
    report = SuiteReport(system_label, compiler_id, timestamp, records=records)
    for record in records:
        status = record.status
        report.totals.add(status)
        report.per_language.setdefault(record.case.language, Totals()).add(status)
        for tag in record.case.tags:
            report.per_tag.setdefault(tag, Totals()).add(status)
    report.per_language = {lang: report.per_language[lang]
                           for lang in LANGUAGES if lang in report.per_language}
    report.per_tag = dict(sorted(report.per_tag.items()))
    return report


def load_report(path) -> SuiteReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ReportError(f"cannot read report {path}: {exc}") from exc
    return SuiteReport.from_dict(data)


# -- renderers ---------------------------------------------------------------

def render_json(report: SuiteReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def _first_line(text: str) -> str:
    for line in text.splitlines():
        if line.strip():
            return line.strip()
    return ""


def _totals_lines(groups: Dict[str, Totals]) -> List[str]:
    width = max(16, *(len(name) + 1 for name in groups))
    lines = []
    for name, t in groups.items():
        counts = "  ".join(f"{s} {t.count(s)}" for s in RECORD_STATUSES)
        lines.append(f"  {name:<{width}} total {t.total}  {counts}  rate {format_rate(t.pass_rate)}")
    return lines


def render_txt(report: SuiteReport) -> str:
    out = [
        "Conformance report",
        f"system:    {report.system_label}",
        f"compiler:  {report.compiler_id}",
        f"timestamp: {report.timestamp}",
        "",
    ]
    for r in report.records:
        out.append(f"{r.status.upper():<14}{r.case.path}")
        if r.compile is None:
            out.append(f"    reason:  {r.skip_reason or 'not run'}")
            continue
        c = r.compile
        out.append(f"    compile: {c.command}  [{c.status}, exit {c.exit_code}, {c.duration_ms} ms]")
        if c.status != "ok" and _first_line(c.stderr):
            out.append(f"    stderr:  {_first_line(c.stderr)}")
        if r.execute is not None:
            e = r.execute
            out.append(f"    run:     {e.command}  [{e.status}, exit {e.exit_code}, {e.duration_ms} ms]")
    t = report.totals
    out += ["", "Summary", f"  total          {t.total}"]
    out += [f"  {s:<14} {t.count(s)}" for s in RECORD_STATUSES]
    out.append(f"  pass rate      {format_rate(t.pass_rate)}")
    if report.per_language:
        out += ["", "By language"]
        out += _totals_lines(report.per_language)
    if report.per_tag:
        out += ["", "By tag"]
        out += _totals_lines(report.per_tag)
    return "\n".join(out) + "\n"


def html_payload(report: SuiteReport) -> dict:
    """The flattened json embedded in the html page."""
    return {
        "schema_version": SCHEMA_VERSION,
        "system_label": report.system_label,
        "compiler_id": report.compiler_id,
        "timestamp": report.timestamp,
        "summary": report.totals.to_dict(),
        "results": [
            {
                "path": r.case.path,
                "language": r.case.language,
                "tags": list(r.case.tags),
                "status": r.status,
                "compile_command": r.compile.command if r.compile else None,
                "exit_code": (r.execute or r.compile).exit_code if r.compile else None,
            }
            for r in report.records
        ],
    }


_HTML_STYLE = """\
body { font-family: sans-serif; margin: 2em; }
table { border-collapse: collapse; margin-bottom: 1.5em; }
th, td { border: 1px solid #ccc; padding: 0.25em 0.6em; text-align: left; }
td.pass { background: #d7f5d7; }
td.fail, td.compile_error, td.timeout { background: #f8d7d7; }
td.skipped { background: #eee; }
code { font-size: 0.85em; }"""


def render_html(report: SuiteReport) -> str:
    esc = html.escape
    t = report.totals
    summary_rows = "".join(
        f"<tr><th>{esc(s)}</th><td>{t.count(s)}</td></tr>\n" for s in RECORD_STATUSES)
    result_rows = []
    for r in report.records:
        command = r.compile.command if r.compile else (r.skip_reason or "")
        result_rows.append(
            f"<tr><td>{esc(r.case.path)}</td><td>{esc(r.case.language)}</td>"
            f"<td>{esc(', '.join(r.case.tags))}</td>"
            f'<td class="{r.status}">{r.status}</td>'
            f"<td><code>{esc(command)}</code></td></tr>\n")
    payload = json.dumps(html_payload(report), indent=1, sort_keys=True)
    payload = payload.replace("<", "\\u003c").replace(">", "\\u003e").replace("&", "\\u0026")
    title = esc(f"Conformance report: {report.system_label} / {report.compiler_id}")
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{title}</title>\n<style>\n{_HTML_STYLE}\n</style>\n</head>\n<body>\n"
        f"<h1>{title}</h1>\n"
        f"<p>Generated {esc(report.timestamp)}. Pass rate: "
        f"<strong>{format_rate(t.pass_rate)}</strong> of {t.total - t.skipped} tests run "
        f"({t.skipped} skipped).</p>\n"
        f'<table class="summary">\n<tr><th>total</th><td>{t.total}</td></tr>\n{summary_rows}</table>\n'
        '<table class="results">\n<thead><tr><th>Test</th><th>Language</th><th>Tags</th>'
        "<th>Status</th><th>Compile command</th></tr></thead>\n<tbody>\n"
        f"{''.join(result_rows)}</tbody>\n</table>\n"
        f'<script type="application/json" id="{HTML_PAYLOAD_ID}">\n{payload}\n</script>\n'
        "</body>\n</html>\n"
    )


RENDERERS = {"json": render_json, "txt": render_txt, "html": render_html}


def emit(report: SuiteReport, fmt: str, out) -> Path:
    """Write ``report`` as ``fmt``; the extension is appended when missing."""
    if fmt not in RENDERERS:
        raise ReportError(f"unknown output format {fmt!r}")
    path = Path(out)
    if path.suffix != f".{fmt}":
        path = path.with_name(path.name + f".{fmt}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(RENDERERS[fmt](report), encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


# -- comparison ----------------------------------------------------------------

@dataclass(frozen=True)
class Column:
    system_label: str
    compiler_id: str
    timestamp: str

    @property
    def label(self) -> str:
        return f"{self.system_label}/{self.compiler_id}"


@dataclass
class ComparisonMatrix:
    columns: List[Column]
    rows: List[str]
    cells: Dict[str, List[str]]
    rates: List[Optional[float]]
    disagreements: List[str]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "comparison",
            "columns": [vars(c) | {"pass_rate": rate} for c, rate in zip(self.columns, self.rates)],
            "rows": [{"path": p, "statuses": self.cells[p]} for p in self.rows],
            "disagreements": self.disagreements,
        }

    def render_txt(self) -> str:
        width = max([len(p) for p in self.rows] + [4])
        colw = [max(len(c.label), len(ABSENT), 13) for c in self.columns]
        head = "test".ljust(width) + "  " + "  ".join(c.label.ljust(w) for c, w in zip(self.columns, colw))
        lines = [head.rstrip()]
        for path in self.rows:
            marker = " *" if path in self.disagreements else ""
            cells = "  ".join(s.ljust(w) for s, w in zip(self.cells[path], colw))
            lines.append((path.ljust(width) + "  " + cells).rstrip() + marker)
        rates = "  ".join(format_rate(r).ljust(w) for r, w in zip(self.rates, colw))
        lines.append(("pass rate".ljust(width) + "  " + rates).rstrip())
        if self.disagreements:
            lines.append(f"{len(self.disagreements)} test(s) with diverging results (*)")
        return "\n".join(lines) + "\n"


def compare(reports: Sequence[SuiteReport]) -> ComparisonMatrix:
    if not reports:
        raise ReportError("compare needs at least one report")
    keyed: Dict[Column, SuiteReport] = {}
    for report in reports:
        col = Column(report.system_label, report.compiler_id, report.timestamp)
        if col in keyed:
            raise DuplicateColumn(f"two reports for {col.label} at {col.timestamp}")
        keyed[col] = report
    columns = sorted(keyed, key=lambda c: (c.system_label, c.compiler_id, c.timestamp))
    statuses = [{r.case.path: r.status for r in keyed[c].records} for c in columns]
    rows = sorted(set().union(*statuses))
    cells = {p: [s.get(p, ABSENT) for s in statuses] for p in rows}

    rates = []
    for s in statuses:
        counted = [v for v in s.values() if v != "skipped"]
        rates.append(percent(sum(v == "pass" for v in counted), len(counted)))

    disagreements = []
    for p in rows:
        seen = {v for v in cells[p] if v not in (ABSENT, "skipped")}
        if len(seen) > 1:
            disagreements.append(p)
    return ComparisonMatrix(columns, rows, cells, rates, disagreements)
