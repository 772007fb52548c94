"""HTTP fetching with bounded retries and redirects, plus a polite scheduler.

Requests to one host are spaced at least ``per_host_delay`` apart (retries
and redirect hops included); different hosts run in parallel up to the
concurrency limit.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from urllib import robotparser
from urllib.parse import urljoin, urlsplit

import requests

from . import fingerprint
from .fingerprint import ProbeResult

logger = logging.getLogger(__name__)

CHROME_74_UA = (
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 "
    "(KHTML, like Gecko) Chrome/74.0.3729.169 Safari/537.36"
)
RETRY_STATUSES = frozenset({502, 503, 504})
REDIRECT_STATUSES = frozenset({301, 302, 303, 307, 308})
DEFAULT_MAX_RETRIES = 10


class FetchError(Exception):
    pass


class InvalidUrl(FetchError):
    pass


class TooManyRedirects(FetchError):
    def __init__(self, chain):
        super().__init__("more than %d redirects starting at %s" % (len(chain) - 2, chain[0]))
        self.chain = list(chain)


class ExhaustedRetries(FetchError):
    def __init__(self, url, kind, attempts):
        super().__init__("%s: %s after %d attempts" % (url, kind, attempts))
        self.url = url
        self.kind = kind
        self.attempts = attempts


class HostUnreachable(FetchError):
    pass


@dataclass(frozen=True)
class FetchPolicy:
    user_agent: str = CHROME_74_UA
    connect_timeout: float = 10.0
    read_timeout: float = 20.0
    max_retries: int = DEFAULT_MAX_RETRIES
    max_redirects: int = 10
    per_host_delay: float = 500.0  # milliseconds
    max_body: int = 65536
    respect_robots: bool = False

    def __post_init__(self):
        for name in ("connect_timeout", "read_timeout", "max_retries", "max_redirects", "per_host_delay", "max_body"):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be positive" % name)
        if self.max_retries > DEFAULT_MAX_RETRIES:
            logger.warning("max_retries=%d exceeds the usual ceiling of %d", self.max_retries, DEFAULT_MAX_RETRIES)


@dataclass(frozen=True)
class FetchOutcome:
    status: int
    redirect_chain: tuple[str, ...]
    body_excerpt: bytes
    attempts: int
    elapsed: float

    @property
    def final_url(self) -> str:
        return self.redirect_chain[-1]


class HostPacer:
    """Keeps requests to one host at least `delay` seconds apart.

    `wait` reserves the next slot; `done` pushes the following slot to
    `delay` after the request actually finished, so a request that went
    out late cannot crowd the next one.
    """

    def __init__(self, delay: float):
        self.delay = delay
        self._next: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, host: str) -> None:
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next.get(host, now))
            self._next[host] = slot + self.delay
        if slot > now:
            time.sleep(slot - now)

    def done(self, host: str) -> None:
        with self._lock:
            self._next[host] = max(self._next.get(host, 0.0), time.monotonic() + self.delay)


def _host_key(url: str) -> str:
    return urlsplit(url).netloc.lower()


def _check_url(url: str) -> None:
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.hostname:
        raise InvalidUrl("not an absolute http(s) URL: %r" % (url,))


def _failure_kind(exc: requests.RequestException) -> str:
    if isinstance(exc, requests.ConnectTimeout):
        return "ConnectTimeout"
    if isinstance(exc, requests.ReadTimeout):
        return "ReadTimeout"
    if isinstance(exc, requests.exceptions.SSLError):
        return "TlsError"
    if isinstance(exc, requests.ConnectionError):
        return "ConnectionFailed"
    return type(exc).__name__


def _read_capped(resp: requests.Response, limit: int) -> bytes:
    buf = bytearray()
    for chunk in resp.iter_content(8192):
        buf += chunk
        if len(buf) >= limit:
            break
    return bytes(buf[:limit])


def fetch(url: str, policy: FetchPolicy | None = None, session: requests.Session | None = None,
          pacer: HostPacer | None = None) -> FetchOutcome:
    """GET `url`, following redirects by hand and retrying transient failures.

    The retry budget is shared across the whole redirect chain. When 502/503/504
    persist past the budget the last such response is returned; only transport
    failures raise ExhaustedRetries.
    """
    policy = policy or FetchPolicy()
    _check_url(url)
    session = session or requests.Session()
    pacer = pacer or HostPacer(policy.per_host_delay / 1000)
    headers = {"User-Agent": policy.user_agent}
    timeout = (policy.connect_timeout, policy.read_timeout)
    chain = [url]
    attempts = 0
    started = time.monotonic()
    current = url
    while True:
        host = _host_key(current)
        pacer.wait(host)
        attempts += 1
        try:
            resp = session.get(current, headers=headers, timeout=timeout, allow_redirects=False, stream=True)
        except requests.RequestException as exc:
            pacer.done(host)
            kind = _failure_kind(exc)
            logger.debug("attempt %d on %s failed: %s", attempts, current, kind)
            if attempts > policy.max_retries:
                raise ExhaustedRetries(current, kind, attempts) from None
            continue
        pacer.done(host)
        with resp:
            status = resp.status_code
            if status in RETRY_STATUSES and attempts <= policy.max_retries:
                continue
            location = resp.headers.get("Location")
            if status in REDIRECT_STATUSES and location:
                nxt = urljoin(current, location)
                chain.append(nxt)
                if len(chain) > 1 + policy.max_redirects:
                    raise TooManyRedirects(chain)
                _check_url(nxt)
                current = nxt
                continue
            body = _read_capped(resp, policy.max_body)
        return FetchOutcome(status, tuple(chain), body, attempts, time.monotonic() - started)


def origin_of(target: str) -> str:
    """Normalize a host name or URL to 'scheme://netloc/'."""
    target = target.strip()
    if "://" not in target:
        target = "http://" + target
    parts = urlsplit(target)
    if parts.scheme not in ("http", "https") or not parts.hostname:
        raise InvalidUrl("not a host or origin: %r" % (target,))
    return "%s://%s/" % (parts.scheme, parts.netloc)


def _robots(origin: str, policy, session, pacer):
    parser = robotparser.RobotFileParser()
    try:
        out = fetch(urljoin(origin, "/robots.txt"), policy, session, pacer)
    except FetchError:
        parser.parse([])
        return parser
    lines = out.body_excerpt.decode("utf-8", "replace").splitlines() if out.status == 200 else []
    parser.parse(lines)
    return parser


def probe_host(host: str, policy: FetchPolicy | None = None, catalog=None, core_probes=fingerprint.CORE_PROBES,
               session: requests.Session | None = None, pacer: HostPacer | None = None):
    """Fingerprint one host; returns (Detection, list of ProbeResult)."""
    policy = policy or FetchPolicy()
    catalog = fingerprint.default_catalog() if catalog is None else catalog
    session = session or requests.Session()
    pacer = pacer or HostPacer(policy.per_host_delay / 1000)
    origin = origin_of(host)
    try:
        baseline = fetch(origin, policy, session, pacer)
    except ExhaustedRetries as exc:
        raise HostUnreachable("%s: %s" % (host, exc)) from None
    base = fingerprint.discover_base_path(baseline.redirect_chain)
    final_origin = origin_of(baseline.final_url)
    notes = []
    if _host_key(final_origin) != _host_key(origin):
        notes.append(("baseline", "redirected to %s; probing that host" % final_origin))

    probes = fingerprint.core_probe_set(base, core_probes) + fingerprint.extension_probe_set(catalog, base)
    robots = _robots(final_origin, policy, session, pacer) if policy.respect_robots else None
    results = []
    for spec in probes:
        url = urljoin(final_origin, spec.path)
        if robots is not None and not robots.can_fetch(policy.user_agent, url):
            results.append(ProbeResult(spec.probe_id, None, b"", url, "RobotsDisallowed"))
            continue
        try:
            out = fetch(url, policy, session, pacer)
        except ExhaustedRetries as exc:
            results.append(ProbeResult(spec.probe_id, None, b"", url, exc.kind))
            continue
        except FetchError as exc:
            results.append(ProbeResult(spec.probe_id, None, b"", url, type(exc).__name__))
            continue
        body = out.body_excerpt if out.status == 200 else b""
        results.append(ProbeResult(spec.probe_id, out.status, body, out.final_url))
    detection = fingerprint.evaluate(host, base, results, probes)
    if notes:
        detection = replace(detection, evidence=tuple(notes) + detection.evidence)
    return detection, results


def run_scan(targets, policy: FetchPolicy | None = None, concurrency_limit: int = 8, catalog=None):
    """Probe every target; returns [(target, Detection or exception)] in input order."""
    if concurrency_limit < 1:
        raise ValueError("concurrency_limit must be at least 1")
    policy = policy or FetchPolicy()
    catalog = fingerprint.default_catalog() if catalog is None else catalog
    pacer = HostPacer(policy.per_host_delay / 1000)

    def one(target):
        try:
            with requests.Session() as session:
                return probe_host(target, policy, catalog, session=session, pacer=pacer)[0]
        except (FetchError, ValueError) as exc:
            logger.info("%s: %s", target, exc)
            return exc

    targets = list(targets)
    if not targets:
        return []
    with ThreadPoolExecutor(max_workers=concurrency_limit) as pool:
        return list(zip(targets, pool.map(one, targets)))


def parse_targets(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out
