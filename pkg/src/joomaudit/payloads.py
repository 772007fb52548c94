"""XSS vector and field catalogs, injection plans, and reflection checks."""

from __future__ import annotations

import enum
import html
import json
import re
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .media import MediaFormat, inject_fields
from .media.document import check_field_key, format_of_key

MARKER_PLACEHOLDER = "{{M}}"
BREAKOUT_CHARS = frozenset("<>\"'")
ALL = "all"

_PLAN_ID_RE = re.compile(r"[A-Za-z0-9]{1,8}\Z")


class PayloadError(ValueError):
    pass


class DuplicateId(PayloadError):
    pass


class MalformedRecord(PayloadError):
    def __init__(self, line: int, reason: str):
        super().__init__("line %d: %s" % (line, reason))
        self.line = line


class BadPlanId(PayloadError):
    pass


class UnknownField(PayloadError):
    pass


class EmptyVectorSet(PayloadError):
    pass


class Mode(str, enum.Enum):
    SAME = "same"
    ATTRIBUTED = "attributed"
    SWEEP = "sweep"


class Reflection(str, enum.Enum):
    ABSENT = "absent"
    ENCODED = "encoded"
    RAW = "raw"


@dataclass(frozen=True)
class PayloadVector:
    id: str
    body: str
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class FieldDescriptor:
    key: str
    display_name: str
    max_length: int | None = None  # None: unlimited

    @property
    def format(self) -> MediaFormat:
        return format_of_key(self.key)

    def fits(self, value: str) -> bool:
        # IPTC ceilings are octet counts, so measure encoded size everywhere
        return self.max_length is None or len(value.encode("utf-8")) <= self.max_length


@dataclass(frozen=True)
class PlanEntry:
    field: str
    vector_id: str
    rendered_payload: str
    marker: str


@dataclass(frozen=True)
class SkippedEntry:
    field: str
    vector_id: str
    reason: str


@dataclass(frozen=True)
class InjectionPlan:
    plan_id: str
    format: MediaFormat
    entries: tuple[PlanEntry, ...] = ()
    skipped: tuple[SkippedEntry, ...] = ()

    def payload_map(self) -> dict[str, str]:
        return {e.field: e.rendered_payload for e in self.entries}


@dataclass(frozen=True)
class InjectionRecord:
    plan_id: str
    field: str
    vector_id: str
    rendered_payload: str
    marker: str
    output: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "InjectionRecord":
        return cls(**json.loads(line))


def _iter_records(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, exc.msg) from None
        if not isinstance(obj, dict):
            raise MalformedRecord(lineno, "record is not an object")
        yield lineno, obj


def load_vectors(catalog_text: str) -> list[PayloadVector]:
    vectors = []
    seen = set()
    for lineno, obj in _iter_records(catalog_text):
        vid, body, tags = obj.get("id"), obj.get("body"), obj.get("tags", [])
        if not isinstance(vid, str) or not vid:
            raise MalformedRecord(lineno, "missing or empty id")
        if not isinstance(body, str) or not body:
            raise MalformedRecord(lineno, "missing or empty body")
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise MalformedRecord(lineno, "tags must be a list of strings")
        if vid in seen:
            raise DuplicateId("vector id %r repeated on line %d" % (vid, lineno))
        seen.add(vid)
        vectors.append(PayloadVector(vid, body, frozenset(tags)))
    return vectors


def load_fields(catalog_text: str) -> list[FieldDescriptor]:
    out = []
    seen = set()
    for lineno, obj in _iter_records(catalog_text):
        key, name, limit = obj.get("key"), obj.get("display_name", ""), obj.get("max_length")
        if not isinstance(key, str):
            raise MalformedRecord(lineno, "missing key")
        try:
            check_field_key(key, format_of_key(key))
        except ValueError as exc:
            raise MalformedRecord(lineno, str(exc)) from None
        if limit is not None and (not isinstance(limit, int) or isinstance(limit, bool) or limit <= 0):
            raise MalformedRecord(lineno, "max_length must be a positive integer or null")
        if key in seen:
            raise DuplicateId("field %r repeated on line %d" % (key, lineno))
        seen.add(key)
        out.append(FieldDescriptor(key, str(name), limit))
    return out


def _data_text(name: str, data_dir: Path | None) -> str:
    if data_dir is not None and (Path(data_dir) / name).is_file():
        return (Path(data_dir) / name).read_text(encoding="utf-8")
    return resources.files("joomaudit").joinpath("data", name).read_text(encoding="utf-8")


def default_vectors(data_dir: Path | None = None) -> list[PayloadVector]:
    return load_vectors(_data_text("vectors.jsonl", data_dir))


def default_fields(fmt: MediaFormat | str | None = None, data_dir: Path | None = None) -> list[FieldDescriptor]:
    fields = load_fields(_data_text("fields.jsonl", data_dir))
    if fmt is None:
        return fields
    fmt = MediaFormat.parse(fmt)
    return [f for f in fields if f.format is fmt]


def make_marker(plan_id: str, field_key: str) -> str:
    if not isinstance(plan_id, str) or not _PLAN_ID_RE.match(plan_id):
        raise BadPlanId("plan id must be 1-8 ASCII letters or digits, got %r" % (plan_id,))
    canonical = field_key.replace(":", ".")
    # non-ASCII item codes (the MP4 copyright sign) become their code point
    canonical = "".join(c if c.isascii() and (c.isalnum() or c in ".-") else "x%02x" % ord(c) for c in canonical)
    return "MA%s-%s" % (plan_id, canonical)


def render(vector: PayloadVector, marker: str) -> str:
    return vector.body.replace(MARKER_PLACEHOLDER, marker)


def _sweep_id(plan_id: str, index: int) -> str:
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    suffix = ""
    while True:
        index, rem = divmod(index, 36)
        suffix = digits[rem] + suffix
        if not index:
            break
    return plan_id + suffix


def build_plan(
    fmt: MediaFormat | str,
    selected_fields,
    vectors: list[PayloadVector],
    mode: Mode | str,
    plan_id: str,
    catalog: list[FieldDescriptor] | None = None,
):
    """Assign vectors to fields.

    Returns one InjectionPlan, or a list of plans (one per vector) for
    ``Mode.SWEEP``. Sweep plans get ids of the form ``plan_id`` followed by
    the vector index in base 36, so `plan_id` must leave room for the suffix.
    """
    fmt = MediaFormat.parse(fmt)
    mode = Mode(mode)
    if not vectors:
        raise EmptyVectorSet("at least one vector is required")
    catalog = default_fields(fmt) if catalog is None else [f for f in catalog if f.format is fmt]
    by_key = {f.key: f for f in catalog}
    if selected_fields == ALL or selected_fields is None:
        fields = list(catalog)
    else:
        fields = []
        for key in dict.fromkeys(selected_fields):
            if key not in by_key:
                raise UnknownField("%r is not in the %s field catalog" % (key, fmt.value))
            fields.append(by_key[key])

    if mode is Mode.SWEEP:
        return [_plan(_sweep_id(plan_id, i), fmt, fields, [v], first_fit=False) for i, v in enumerate(vectors)]
    if mode is Mode.SAME:
        return _plan(plan_id, fmt, fields, vectors[:1], first_fit=False)
    return _plan(plan_id, fmt, fields, vectors, first_fit=True)


def _plan(plan_id, fmt, fields, vectors, first_fit):
    make_marker(plan_id, "x")
    entries = []
    skipped = []
    for desc in fields:
        marker = make_marker(plan_id, desc.key)
        for vec in vectors:
            payload = render(vec, marker)
            if desc.fits(payload):
                entries.append(PlanEntry(desc.key, vec.id, payload, marker))
                break
            skipped.append(SkippedEntry(desc.key, vec.id, "FieldTooLong"))
            if not first_fit:
                break
    return InjectionPlan(plan_id, fmt, tuple(entries), tuple(skipped))


def apply_plan(media_bytes: bytes, plan: InjectionPlan, output: str = "") -> tuple[bytes, list[InjectionRecord]]:
    if not plan.entries:
        return media_bytes, []
    injected = inject_fields(media_bytes, plan.format, plan.payload_map())
    records = [
        InjectionRecord(plan.plan_id, e.field, e.vector_id, e.rendered_payload, e.marker, output)
        for e in plan.entries
    ]
    return injected, records


_ESCAPE_RE = re.compile(
    r"&#[xX]([0-9a-fA-F]{1,6});?|&#([0-9]{1,7});?|&[A-Za-z][A-Za-z0-9]{1,31};"
    r"|\\u([0-9a-fA-F]{4})|\\x([0-9a-fA-F]{2})"
)


def _decode_with_flags(body: str) -> tuple[str, list[bool]]:
    """Decode HTML entities and JS escapes, flagging which chars were escaped."""
    chars: list[str] = []
    flags: list[bool] = []
    pos = 0
    for m in _ESCAPE_RE.finditer(body):
        lit = body[pos : m.start()]
        chars.append(lit)
        flags.extend([False] * len(lit))
        hexa, dec, uni, byte = m.group(1), m.group(2), m.group(3), m.group(4)
        code = None
        if hexa or uni or byte:
            code = int(hexa or uni or byte, 16)
        elif dec:
            code = int(dec)
        if code is not None:
            text = chr(code) if 0 < code <= 0x10FFFF else m.group(0)
        else:
            text = html.unescape(m.group(0))
        chars.append(text)
        flags.extend([text != m.group(0)] * len(text))
        pos = m.end()
    lit = body[pos:]
    chars.append(lit)
    flags.extend([False] * len(lit))
    return "".join(chars), flags


def classify_reflection(body: str, payload: str) -> Reflection:
    if payload and payload in body:
        return Reflection.RAW
    if not payload:
        return Reflection.ABSENT
    decoded, flags = _decode_with_flags(body)
    sensitive = [i for i, c in enumerate(payload) if c in BREAKOUT_CHARS]
    start = decoded.find(payload)
    while start >= 0:
        if all(flags[start + i] for i in sensitive):
            return Reflection.ENCODED
        start = decoded.find(payload, start + 1)
    return Reflection.ABSENT


def reflect_check(response_body: str, records: list[InjectionRecord]) -> list[tuple[InjectionRecord, Reflection]]:
    """Classify how each injected payload comes back in a response body.

    RAW means the payload is present verbatim. ENCODED means it is present
    once entities and ``\\uXXXX``/``\\xXX`` escapes are decoded, with every
    breakout character (``< > " '``) escaped. Anything else is ABSENT.
    """
    return [(rec, classify_reflection(response_body, rec.rendered_payload)) for rec in records]
