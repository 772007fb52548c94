"""Command-line entry point: ``joomaudit <subcommand> ...``.

Exit codes: 0 clean, 2 findings (scan-src) or a raw reflection
(reflect-check), 1 operational error, 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__, crawler, fingerprint, payloads, report
from .media import MediaError, MediaFormat
from .static_scan import ScanRuleSet, scan_tree

DATA_DIR_ENV = "JOOMAUDIT_DATA_DIR"
EXIT_OK, EXIT_ERROR, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2, 64

logger = logging.getLogger("joomaudit")


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _formatter(prog):
    # fixed width keeps help output identical across terminals
    return argparse.ArgumentDefaultsHelpFormatter(prog, width=100)


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = Parser(prog="joomaudit", description="Security-audit toolkit for Joomla extensions.",
                    formatter_class=_formatter)
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("--data-dir", default=os.environ.get(DATA_DIR_ENV),
                        help="directory overriding the bundled catalogs (env %s)" % DATA_DIR_ENV)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=help_text, formatter_class=_formatter)

    p = add("inject", "write XSS vectors into media metadata fields")
    p.add_argument("--in", dest="input", metavar="FILE", required=True, help="clean media file")
    p.add_argument("--format", required=True, choices=[f.value for f in MediaFormat], help="media format")
    p.add_argument("--fields", default="all", help="'all' or comma-separated field keys")
    p.add_argument("--mode", default=payloads.Mode.SAME.value, choices=[m.value for m in payloads.Mode],
                   help="vector assignment mode")
    p.add_argument("--vectors", default=None, help="vector catalog (JSON lines); bundled when omitted")
    p.add_argument("--out-dir", default=".", help="directory for injected files and the records file")
    p.add_argument("--plan-id", default="p1", help="plan id embedded in markers")

    p = add("fields", "list the injectable fields of a format")
    p.add_argument("--format", required=True, choices=[f.value for f in MediaFormat], help="media format")

    p = add("vectors", "list a vector catalog")
    p.add_argument("--catalog", default=None, help="vector catalog (JSON lines); bundled when omitted")

    p = add("fingerprint", "detect Joomla and top extensions on target hosts")
    p.add_argument("--targets", required=True, help="file with one host or origin per line")
    p.add_argument("--out", default="-", help="JSON-lines output file ('-' for stdout)")
    p.add_argument("--catalog", default=None, help="extension catalog (JSON lines); bundled when omitted")
    p.add_argument("--concurrency", type=_positive_int, default=8, help="hosts probed in parallel")
    defaults = crawler.FetchPolicy()
    p.add_argument("--user-agent", default=defaults.user_agent, help="User-Agent header")
    p.add_argument("--connect-timeout", type=_positive_float, default=defaults.connect_timeout,
                   help="connect timeout, seconds")
    p.add_argument("--read-timeout", type=_positive_float, default=defaults.read_timeout,
                   help="read timeout, seconds")
    p.add_argument("--max-retries", type=_positive_int, default=defaults.max_retries,
                   help="retries after the first attempt")
    p.add_argument("--max-redirects", type=_positive_int, default=defaults.max_redirects,
                   help="redirects followed per request")
    p.add_argument("--per-host-delay", type=_positive_float, default=defaults.per_host_delay,
                   help="minimum gap between requests to one host, ms")
    p.add_argument("--max-body", type=_positive_int, default=defaults.max_body, help="body bytes kept")
    p.add_argument("--respect-robots", action="store_true", help="skip probes disallowed by robots.txt")

    p = add("scan-src", "flag DOM-XSS patterns and unescaped PHP output/SQL")
    p.add_argument("--root", required=True, help="source tree to scan")
    p.add_argument("--rules", default=None, help="rule set (JSON); bundled when omitted")
    p.add_argument("--format", default="jsonl", choices=[f.value for f in report.OutputFormat],
                   help="output format")

    p = add("reflect-check", "classify how injected payloads appear in a response body")
    p.add_argument("--records", required=True, help="records file written by inject")
    p.add_argument("--response", required=True, help="saved response body")

    p = add("aggregate", "summarize fingerprint results")
    p.add_argument("--in", dest="input", metavar="FILE", required=True, help="JSON-lines file written by fingerprint")
    p.add_argument("--format", default="pretty", choices=[f.value for f in report.OutputFormat],
                   help="output format")
    p.add_argument("--hosts-total", type=int, default=None,
                   help="hosts attempted; the record count when omitted")
    p.add_argument("--catalog", default=None, help="extension catalog for the Path column")
    return parser


def _data_dir(args):
    return Path(args.data_dir) if args.data_dir else None


def _catalog(args):
    if args.catalog:
        return fingerprint.load_catalog(Path(args.catalog).read_text(encoding="utf-8"))
    return fingerprint.default_catalog(_data_dir(args))


def _vectors(path, args):
    if path:
        return payloads.load_vectors(Path(path).read_text(encoding="utf-8"))
    return payloads.default_vectors(_data_dir(args))


def cmd_inject(args, out):
    fmt = MediaFormat.parse(args.format)
    src = Path(args.input)
    data = src.read_bytes()
    fields = payloads.ALL if args.fields == "all" else [k.strip() for k in args.fields.split(",") if k.strip()]
    catalog = payloads.default_fields(fmt, _data_dir(args))
    plans = payloads.build_plan(fmt, fields, _vectors(args.vectors, args), args.mode, args.plan_id, catalog)
    plans = plans if isinstance(plans, list) else [plans]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for plan in plans:
        for s in plan.skipped:
            logger.debug("plan %s: %s skipped for %s (%s)", plan.plan_id, s.vector_id, s.field, s.reason)
        filled = {e.field for e in plan.entries}
        for key in dict.fromkeys(s.field for s in plan.skipped if s.field not in filled):
            logger.warning("plan %s: no vector fits %s; field left untouched", plan.plan_id, key)
        target = out_dir / ("%s.%s%s" % (src.stem, plan.plan_id, src.suffix or "." + fmt.value))
        injected, recs = payloads.apply_plan(data, plan, str(target))
        target.write_bytes(injected)
        records.extend(recs)
        print(target, file=out)
    rec_path = out_dir / ("%s.records.jsonl" % src.stem)
    rec_path.write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")
    print(rec_path, file=out)
    return EXIT_OK


def cmd_fields(args, out):
    for f in payloads.default_fields(args.format, _data_dir(args)):
        limit = "-" if f.max_length is None else str(f.max_length)
        print("%s\t%s\t%s" % (f.key, limit, f.display_name), file=out)
    return EXIT_OK


def cmd_vectors(args, out):
    for v in _vectors(args.catalog, args):
        print("%s\t%s" % (v.id, v.body.replace("\n", "\\n")), file=out)
    return EXIT_OK


def cmd_fingerprint(args, out):
    policy = crawler.FetchPolicy(
        user_agent=args.user_agent,
        connect_timeout=args.connect_timeout,
        read_timeout=args.read_timeout,
        max_retries=args.max_retries,
        max_redirects=args.max_redirects,
        per_host_delay=args.per_host_delay,
        max_body=args.max_body,
        respect_robots=args.respect_robots,
    )
    targets = crawler.parse_targets(Path(args.targets).read_text(encoding="utf-8"))
    results = crawler.run_scan(targets, policy, args.concurrency, _catalog(args))
    lines = []
    for host, outcome in results:
        if isinstance(outcome, BaseException):
            lines.append(report.SiteRecord.from_error(host, outcome).to_json())
        else:
            lines.append(report.SiteRecord.from_detection(outcome).to_json())
    text = "".join(line + "\n" for line in lines)
    if args.out == "-":
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_scan_src(args, out):
    rules = ScanRuleSet.load(args.rules) if args.rules else None
    if rules is None and args.data_dir and (Path(args.data_dir) / "scan_rules.json").is_file():
        rules = ScanRuleSet.load(Path(args.data_dir) / "scan_rules.json")
    findings = scan_tree(args.root, rules)
    out.write(report.emit(findings, args.format))
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_reflect_check(args, out):
    text = Path(args.records).read_text(encoding="utf-8")
    records = [payloads.InjectionRecord.from_json(line) for line in text.splitlines() if line.strip()]
    body = Path(args.response).read_bytes().decode("utf-8", "replace")
    raw = False
    for rec, status in payloads.reflect_check(body, records):
        raw = raw or status is payloads.Reflection.RAW
        print("%s\t%s\t%s\t%s" % (rec.field, rec.vector_id, rec.marker, status.value), file=out)
    return EXIT_FINDINGS if raw else EXIT_OK


def cmd_aggregate(args, out):
    records = report.load_site_records(Path(args.input).read_text(encoding="utf-8"))
    rep = report.aggregate(records, args.hosts_total, _catalog(args))
    out.write(report.emit(rep, args.format))
    return EXIT_OK


COMMANDS = {
    "inject": cmd_inject,
    "fields": cmd_fields,
    "vectors": cmd_vectors,
    "fingerprint": cmd_fingerprint,
    "scan-src": cmd_scan_src,
    "reflect-check": cmd_reflect_check,
    "aggregate": cmd_aggregate,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (MediaError, payloads.PayloadError, fingerprint.FingerprintError, crawler.FetchError,
            OSError, ValueError) as exc:
        print("joomaudit %s: %s" % (args.command, exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
