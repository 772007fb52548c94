"""Per-host records, corpus statistics, and text emitters.

Shares are percentages rounded half-up to one decimal. Per-extension shares
use the number of Joomla hosts carrying at least one catalog extension as
the denominator.

JSON-lines schemas (keys in this order):

- site record: host, base_path, core_detected, extensions, error, evidence
- summary: row, hosts_total, hosts_reachable, joomla_total,
  joomla_with_any_extension, core_share_of_reachable,
  extension_share_of_joomla
- extension row: row, extension, path, count, share_percent
- finding: file, line, column, kind, symbol, excerpt
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .static_scan import ScanFinding

ONE_DECIMAL = Decimal("0.1")


class OutputFormat(str, enum.Enum):
    JSONL = "jsonl"
    CSV = "csv"
    PRETTY = "pretty"


def share(count: int, total: int) -> Decimal:
    """count/total as a percentage, rounded half-up to one decimal (0 if total is 0)."""
    if not total:
        return Decimal("0.0")
    return (Decimal(count) * 100 / Decimal(total)).quantize(ONE_DECIMAL, rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class SiteRecord:
    host: str
    core_detected: bool = False
    extensions: frozenset[str] = frozenset()
    error: str | None = None
    base_path: str = ""
    evidence: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.error is not None and (self.core_detected or self.extensions):
            raise ValueError("a failed host cannot carry detections")

    @classmethod
    def from_detection(cls, detection) -> "SiteRecord":
        return cls(detection.host, detection.core_detected, frozenset(detection.extensions), None,
                   detection.base_path, tuple(detection.evidence))

    @classmethod
    def from_error(cls, host: str, exc: BaseException) -> "SiteRecord":
        return cls(host, error="%s: %s" % (type(exc).__name__, exc))

    def to_json(self) -> str:
        return json.dumps(
            {
                "host": self.host,
                "base_path": self.base_path,
                "core_detected": self.core_detected,
                "extensions": sorted(self.extensions),
                "error": self.error,
                "evidence": [list(e) for e in self.evidence],
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "SiteRecord":
        obj = json.loads(line)
        return cls(
            obj["host"],
            bool(obj.get("core_detected", False)),
            frozenset(obj.get("extensions", ())),
            obj.get("error"),
            obj.get("base_path", ""),
            tuple(tuple(e) for e in obj.get("evidence", ())),
        )


def load_site_records(text: str) -> list[SiteRecord]:
    return [SiteRecord.from_json(line) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class ExtensionShare:
    name: str
    count: int
    share_percent: Decimal
    path: str = ""


@dataclass(frozen=True)
class AggregateReport:
    hosts_total: int = 0
    hosts_reachable: int = 0
    joomla_total: int = 0
    joomla_with_any_extension: int = 0
    per_extension: tuple[ExtensionShare, ...] = ()
    core_share_of_reachable: Decimal = Decimal("0.0")
    extension_share_of_joomla: Decimal = Decimal("0.0")


def aggregate(records, hosts_total: int | None = None, catalog=None) -> AggregateReport:
    """Count detections; `catalog` (extension entries) only supplies the Path column."""
    records = list(records)
    hosts_total = len(records) if hosts_total is None else hosts_total
    if hosts_total < len(records):
        raise ValueError("hosts_total is smaller than the number of records")
    reachable = joomla = with_ext = 0
    counts: dict[str, int] = {}
    for rec in records:
        if rec.error is not None:
            continue
        reachable += 1
        if not rec.core_detected:
            continue
        joomla += 1
        if rec.extensions:
            with_ext += 1
            for name in rec.extensions:
                counts[name] = counts.get(name, 0) + 1
    paths = {e.name: e.identifier_path for e in catalog or ()}
    rows = [ExtensionShare(n, c, share(c, with_ext), paths.get(n, "")) for n, c in counts.items()]
    rows.sort(key=lambda r: (-r.share_percent, r.name))
    return AggregateReport(
        hosts_total, reachable, joomla, with_ext, tuple(rows), share(joomla, reachable), share(with_ext, joomla)
    )


def _pct(d: Decimal) -> str:
    return "%s%%" % d


def _summary_dict(rep: AggregateReport) -> dict:
    return {
        "row": "summary",
        "hosts_total": rep.hosts_total,
        "hosts_reachable": rep.hosts_reachable,
        "joomla_total": rep.joomla_total,
        "joomla_with_any_extension": rep.joomla_with_any_extension,
        "core_share_of_reachable": float(rep.core_share_of_reachable),
        "extension_share_of_joomla": float(rep.extension_share_of_joomla),
    }


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _table(header, rows, right=()) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = []
    for row in [header, None, *rows]:
        if row is None:
            lines.append("  ".join("-" * w for w in widths))
            continue
        cells = [str(x).rjust(w) if i in right else str(x).ljust(w) for i, (x, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def emit_report(rep: AggregateReport, fmt: OutputFormat | str) -> str:
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.JSONL:
        lines = [json.dumps(_summary_dict(rep))]
        for r in rep.per_extension:
            row = {"row": "extension", "extension": r.name, "path": r.path, "count": r.count,
                   "share_percent": float(r.share_percent)}
            lines.append(json.dumps(row, ensure_ascii=False))
        return "\n".join(lines) + "\n"
    if fmt is OutputFormat.CSV:
        return _csv(["extension", "path", "count", "share_percent"],
                    [[r.name, r.path, r.count, str(r.share_percent)] for r in rep.per_extension])
    table = _table(["Extension", "Path", "Installations %"],
                   [[r.name, r.path, _pct(r.share_percent)] for r in rep.per_extension], right=(2,))
    footer = (
        "\nhosts: %d total, %d reachable; Joomla: %d (%s of reachable), %d with extensions (%s)\n"
        % (rep.hosts_total, rep.hosts_reachable, rep.joomla_total, _pct(rep.core_share_of_reachable),
           rep.joomla_with_any_extension, _pct(rep.extension_share_of_joomla))
    )
    return table + footer


FINDING_KEYS = ("file", "line", "column", "kind", "symbol", "excerpt")


def _finding_row(f: ScanFinding) -> list:
    return [f.file, f.line, f.column, f.kind.value, f.pattern_or_symbol, f.excerpt]


def emit_findings(findings, fmt: OutputFormat | str) -> str:
    fmt = OutputFormat(fmt)
    rows = [_finding_row(f) for f in sorted(findings, key=ScanFinding.sort_key)]
    if fmt is OutputFormat.JSONL:
        return "".join(json.dumps(dict(zip(FINDING_KEYS, r)), ensure_ascii=False) + "\n" for r in rows)
    if fmt is OutputFormat.CSV:
        return _csv(list(FINDING_KEYS), rows)
    if not rows:
        return "no findings\n"
    return _table(["Location", "Kind", "Symbol", "Excerpt"],
                  [["%s:%d:%d" % (r[0], r[1], r[2]), r[3], r[4], r[5]] for r in rows])


def emit(obj, fmt: OutputFormat | str) -> str:
    """Emit an AggregateReport or a list of ScanFindings."""
    if isinstance(obj, AggregateReport):
        return emit_report(obj, fmt)
    return emit_findings(obj, fmt)
