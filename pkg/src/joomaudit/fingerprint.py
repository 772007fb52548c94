"""Turn HTTP probe outcomes into Joomla core and extension detections.

Everything here is pure: the crawler fetches, this module decides. A probe
hits only on a 200 whose body contains one of its markers, so catch-all
pages that answer 200 for every path do not count.
"""

from __future__ import annotations

import json
import posixpath
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit

CORE = None  # ProbeSpec.extension value for core probes

# (probe_id, path below the base, markers)
CORE_PROBES = (
    ("core:robots", "robots.txt", ("Joomla!",)),
    ("core:webconfig", "web.config.txt", ("joomla",)),
    ("core:files_joomla", "administrator/manifests/files/joomla.xml", ("<name>files_joomla</name>",)),
    ("core:language", "language/en-GB/en-GB.xml", ("Joomla",)),
)


class FingerprintError(ValueError):
    pass


class BadBasePath(FingerprintError):
    pass


class UnknownProbeId(FingerprintError):
    pass


@dataclass(frozen=True)
class ProbeSpec:
    probe_id: str
    path: str
    expect_markers: tuple[str, ...]
    extension: str | None = CORE

    def __post_init__(self):
        if not self.path.startswith("/"):
            raise ValueError("probe path must begin with '/': %r" % self.path)
        if not self.expect_markers:
            raise ValueError("probe %s has no markers" % self.probe_id)

    @property
    def is_core(self) -> bool:
        return self.extension is CORE

    def to_dict(self) -> dict:
        return {
            "probe_id": self.probe_id,
            "path": self.path,
            "expect_markers": list(self.expect_markers),
            "target": "core" if self.is_core else self.extension,
        }


@dataclass(frozen=True)
class ProbeResult:
    probe_id: str
    status: int | None  # None when the request failed at the transport level
    body_excerpt: bytes = b""
    final_url: str = ""
    failure: str | None = None


@dataclass(frozen=True)
class ExtensionCatalogEntry:
    name: str
    identifier_path: str
    marker: str
    files: tuple[str, ...] = ()

    @property
    def directory(self) -> str:
        """Directory below the base path that holds the identifying files."""
        if self.identifier_path.startswith("/"):
            return self.identifier_path.strip("/") + "/"
        return "administrator/components/%s/" % self.identifier_path

    @property
    def probe_files(self) -> tuple[str, ...]:
        if self.files:
            return self.files
        stem = self.identifier_path
        if stem.startswith("com_"):
            stem = stem[4:]
        return (stem + ".xml", "manifest.xml")


@dataclass(frozen=True)
class Detection:
    host: str
    base_path: str
    core_detected: bool = False
    extensions: frozenset[str] = frozenset()
    evidence: tuple[tuple[str, str], ...] = ()


def load_catalog(text: str) -> list[ExtensionCatalogEntry]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            obj = json.loads(line)
            entry = ExtensionCatalogEntry(
                str(obj["name"]), str(obj["identifier"]), str(obj["marker"]), tuple(obj.get("files", ()))
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FingerprintError("extension catalog line %d: %s" % (lineno, exc)) from None
        if not entry.name or not entry.marker:
            raise FingerprintError("extension catalog line %d: empty name or marker" % lineno)
        out.append(entry)
    return out


def default_catalog(data_dir: Path | None = None) -> list[ExtensionCatalogEntry]:
    if data_dir is not None and (Path(data_dir) / "extensions.jsonl").is_file():
        return load_catalog((Path(data_dir) / "extensions.jsonl").read_text(encoding="utf-8"))
    return load_catalog(resources.files("joomaudit").joinpath("data", "extensions.jsonl").read_text(encoding="utf-8"))


def _check_base(base_path: str) -> None:
    if not isinstance(base_path, str) or not base_path.startswith("/") or not base_path.endswith("/"):
        raise BadBasePath("base path must begin and end with '/', got %r" % (base_path,))


def core_probe_set(base_path: str, probes=CORE_PROBES) -> list[ProbeSpec]:
    _check_base(base_path)
    return [ProbeSpec(pid, base_path + rel, tuple(markers)) for pid, rel, markers in probes]


def extension_probe_set(catalog, base_path: str) -> list[ProbeSpec]:
    _check_base(base_path)
    out = []
    for entry in catalog:
        for i, name in enumerate(entry.probe_files):
            pid = "ext:%s:%d" % (entry.identifier_path.strip("/"), i)
            out.append(ProbeSpec(pid, base_path + entry.directory + name, (entry.marker,), entry.name))
    return out


def discover_base_path(redirect_chain) -> str:
    """Directory of the last URL in the chain, as '/…/'."""
    path = urlsplit(redirect_chain[-1]).path or "/"
    if not path.endswith("/"):
        head, last = posixpath.split(path)
        path = head if "." in last else path
    path = "/" + path.strip("/") + "/"
    return "/" if path == "//" else path


def _matched_marker(spec: ProbeSpec, result: ProbeResult) -> str | None:
    if result.status != 200:
        return None
    for marker in spec.expect_markers:
        if marker.encode("utf-8") in result.body_excerpt:
            return marker
    return None


def evaluate(host: str, base_path: str, results, probes) -> Detection:
    by_id = {p.probe_id: p for p in probes}
    core = False
    extensions = set()
    evidence = []
    for result in results:
        spec = by_id.get(result.probe_id)
        if spec is None:
            raise UnknownProbeId(result.probe_id)
        marker = _matched_marker(spec, result)
        if marker is None:
            continue
        evidence.append((spec.probe_id, "marker %r at %s" % (marker, spec.path)))
        core = True  # a component path is Joomla-specific, so it implies core too
        if not spec.is_core:
            extensions.add(spec.extension)
    return Detection(host, base_path, core, frozenset(extensions), tuple(evidence))
