"""Lexical marking of DOM-XSS sources/sinks and unescaped PHP output or SQL.

Every finding is a candidate for manual review, not a confirmed
vulnerability. Statements are examined one line at a time, so a statement
split across lines (heredocs, long concatenations) can be missed.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

logger = logging.getLogger(__name__)

VARIABLE_RE = re.compile(r"\$[A-Za-z_]\w*(?:->[A-Za-z_]\w*)*")
SQL_START_RE = re.compile(r"\s*\(?\s*(?:SELECT|INSERT|UPDATE|DELETE|UNION)\b", re.I)
OUTPUT_RE = re.compile(r"<\?=|(?<![\w$>:])(?:echo|print)\b", re.I)
DQ_STRING_RE = re.compile(r'"((?:[^"\\]|\\.)*)"', re.S)


class Kind(str, enum.Enum):
    DOM_SOURCE = "DomSource"
    DOM_SINK = "DomSink"
    UNESCAPED_OUTPUT = "UnescapedOutput"
    UNESCAPED_SQL = "UnescapedSql"


@dataclass(frozen=True)
class ScanFinding:
    file: str
    line: int
    column: int
    kind: Kind
    pattern_or_symbol: str
    excerpt: str

    def sort_key(self):
        return (self.file, self.line, self.column, self.kind.value, self.pattern_or_symbol)


@dataclass(frozen=True)
class ScanRuleSet:
    source_patterns: tuple[tuple[str, re.Pattern], ...]
    sink_patterns: tuple[tuple[str, re.Pattern], ...]
    escape_wrappers: frozenset[str] = frozenset()
    sql_quote_wrappers: frozenset[str] = frozenset()

    @classmethod
    def from_dict(cls, obj: dict) -> "ScanRuleSet":
        def compile_all(items, what):
            out = []
            names = set()
            for item in items:
                name, pattern = item["name"], item["pattern"]
                if name in names:
                    raise ValueError("duplicate %s pattern name %r" % (what, name))
                names.add(name)
                out.append((name, re.compile(pattern)))
            return tuple(out)

        sources = compile_all(obj.get("sources", []), "source")
        sinks = compile_all(obj.get("sinks", []), "sink")
        return cls(
            sources,
            sinks,
            frozenset(obj.get("escape_wrappers", [])),
            frozenset(obj.get("sql_quote_wrappers", [])),
        )

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ScanRuleSet":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def default(cls) -> "ScanRuleSet":
        text = resources.files("joomaudit").joinpath("data", "scan_rules.json").read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))


def _is_comment(line: str) -> bool:
    s = line.lstrip()
    return s.startswith(("//", "#", "/*", "*"))


def scan_js(text: str, rules: ScanRuleSet | None = None, file: str = "") -> list[ScanFinding]:
    rules = rules or ScanRuleSet.default()
    seen = set()
    out = []
    groups = ((Kind.DOM_SOURCE, rules.source_patterns), (Kind.DOM_SINK, rules.sink_patterns))
    for lineno, line in enumerate(text.splitlines(), 1):
        for kind, patterns in groups:
            for name, rx in patterns:
                if (kind, name) in seen:
                    continue
                m = rx.search(line)
                if m:
                    seen.add((kind, name))
                    out.append(ScanFinding(file, lineno, m.start() + 1, kind, name, line.strip()))
    return out


def _mask_comments(line: str) -> str:
    """Blank out // and # comments, which run to the end of line or to ``?>``."""
    out = list(line)
    i = 0
    while i < len(line):
        c = line[i]
        if c in "\"'":
            i = _scan_string_end(line, i)
            continue
        starts = line.startswith("//", i) or c == "#"
        if starts and (i == 0 or line[i - 1] in " \t;{}"):
            end = line.find("?>", i)
            end = len(line) if end < 0 else end
            out[i:end] = " " * (end - i)
            i = end
            continue
        i += 1
    return "".join(out)


def _scan_string_end(text: str, i: int) -> int:
    """Index just past the quoted string starting at text[i]."""
    quote = text[i]
    i += 1
    while i < len(text):
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        i += 1
    return len(text)


def _statement_end(line: str, start: int) -> int:
    i = start
    while i < len(line):
        c = line[i]
        if c in "\"'":
            i = _scan_string_end(line, i)
            continue
        if c == ";" or line.startswith("?>", i):
            return i
        i += 1
    return len(line)


def _mask_single_quoted(segment: str) -> str:
    out = []
    i = 0
    while i < len(segment):
        c = segment[i]
        if c == "'":
            end = _scan_string_end(segment, i)
            out.append("'" + " " * max(0, end - i - 2) + ("'" if end - i >= 2 else ""))
            i = end
            continue
        if c == '"':
            end = _scan_string_end(segment, i)
            # an escaped dollar is a literal character, not interpolation
            out.append(segment[i:end].replace("\\$", "  "))
            i = end
            continue
        out.append(c)
        i += 1
    return "".join(out)[: len(segment)]


def _wrapper_regex(name: str) -> re.Pattern:
    lead = "" if name.startswith("$") else r"(?<![\w$>:])"
    return re.compile(lead + re.escape(name) + r"\s*\(")


def _wrapped_spans(segment: str, wrappers) -> list[tuple[int, int]]:
    spans = []
    for name in wrappers:
        for m in _wrapper_regex(name).finditer(segment):
            depth = 0
            i = m.end() - 1
            end = len(segment)
            while i < len(segment):
                c = segment[i]
                if c in "\"'":
                    i = _scan_string_end(segment, i)
                    continue
                if c == "(":
                    depth += 1
                elif c == ")":
                    depth -= 1
                    if depth == 0:
                        end = i + 1
                        break
                i += 1
            spans.append((m.start(), end))
    return spans


def _inside(pos: int, spans) -> bool:
    return any(a <= pos < b for a, b in spans)


def scan_php_output(text: str, rules: ScanRuleSet | None = None, file: str = "") -> list[ScanFinding]:
    rules = rules or ScanRuleSet.default()
    seen = set()
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if _is_comment(line):
            continue
        line = _mask_comments(line)
        for m in OUTPUT_RE.finditer(line):
            end = _statement_end(line, m.end())
            segment = _mask_single_quoted(line[m.end() : end])
            spans = _wrapped_spans(segment, rules.escape_wrappers)
            for v in VARIABLE_RE.finditer(segment):
                symbol = v.group(0)
                if _inside(v.start(), spans) or symbol in seen:
                    continue
                seen.add(symbol)
                col = m.end() + v.start() + 1
                out.append(ScanFinding(file, lineno, col, Kind.UNESCAPED_OUTPUT, symbol, line.strip()))
    return out


def _quoted_by_assignment(line: str, wrappers) -> set[str]:
    quoted = set()
    for name in wrappers:
        rx = re.compile(r"(\$[A-Za-z_]\w*(?:->[A-Za-z_]\w*)*)\s*=\s*" + _wrapper_regex(name).pattern)
        quoted.update(m.group(1) for m in rx.finditer(line))
    return quoted


def scan_php_sql(text: str, rules: ScanRuleSet | None = None, file: str = "") -> list[ScanFinding]:
    rules = rules or ScanRuleSet.default()
    seen = set()
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if _is_comment(line) or '"' not in line:
            continue
        quoted = None
        for lit in DQ_STRING_RE.finditer(line):
            body = lit.group(1)
            if not SQL_START_RE.match(body):
                continue
            masked = body.replace("\\$", "  ")
            spans = _wrapped_spans(masked, rules.sql_quote_wrappers)
            for v in VARIABLE_RE.finditer(masked):
                symbol = v.group(0)
                if symbol in rules.sql_quote_wrappers or _inside(v.start(), spans):
                    continue
                if quoted is None:
                    quoted = _quoted_by_assignment(line, rules.sql_quote_wrappers)
                if symbol in quoted or symbol in seen:
                    continue
                seen.add(symbol)
                col = lit.start(1) + v.start() + 1
                out.append(ScanFinding(file, lineno, col, Kind.UNESCAPED_SQL, symbol, line.strip()))
    return out


def scan_tree(root: str | os.PathLike, rules: ScanRuleSet | None = None) -> list[ScanFinding]:
    """Scan *.js and *.php files below `root`; paths in findings are root-relative."""
    rules = rules or ScanRuleSet.default()
    root = Path(root)
    if not root.is_dir():
        raise OSError("cannot read source root %s" % root)
    findings = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            ext = os.path.splitext(name)[1].lower()
            if ext not in (".js", ".php"):
                continue
            path = Path(dirpath) / name
            rel = path.relative_to(root).as_posix()
            try:
                raw = path.read_bytes()
            except OSError as exc:
                logger.warning("skipping unreadable %s: %s", rel, exc)
                continue
            if b"\x00" in raw:
                logger.warning("skipping binary file %s", rel)
                continue
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                logger.warning("skipping %s: not valid UTF-8", rel)
                continue
            if ext == ".js":
                findings.extend(scan_js(text, rules, rel))
            else:
                findings.extend(scan_php_output(text, rules, rel))
                findings.extend(scan_php_sql(text, rules, rel))
    return sorted(findings, key=ScanFinding.sort_key)
