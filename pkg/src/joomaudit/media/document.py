"""Format-agnostic view over the text metadata of JPEG, MP3 and MP4 files."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from . import id3, jpeg, mp4
from .errors import UnknownFieldKey


class MediaFormat(str, enum.Enum):
    JPEG = "jpg"
    MP3 = "mp3"
    MP4 = "mp4"

    @classmethod
    def parse(cls, value: "str | MediaFormat") -> "MediaFormat":
        if isinstance(value, MediaFormat):
            return value
        v = value.lower()
        aliases = {"jpeg": "jpg", "m4a": "mp4", "m4v": "mp4"}
        return cls(aliases.get(v, v))


_KEY_PATTERNS = {
    MediaFormat.JPEG: re.compile(r"iptc:(\d{1,3}):(\d{1,3})\Z"),
    MediaFormat.MP3: re.compile(r"id3:([A-Z0-9]{4})\Z"),
    MediaFormat.MP4: re.compile(r"mp4:(.{4})\Z", re.S),
}


def check_field_key(key: str, fmt: MediaFormat) -> re.Match:
    """Validate `key` for `fmt`; returns the match carrying its components."""
    m = _KEY_PATTERNS[fmt].match(key)
    if m is None:
        raise UnknownFieldKey("%r is not a valid %s field key" % (key, fmt.value))
    if fmt is MediaFormat.JPEG and not all(int(g) <= 255 for g in m.groups()):
        raise UnknownFieldKey("%r is out of range" % key)
    if fmt is MediaFormat.MP4:
        try:
            m.group(1).encode("latin-1")
        except UnicodeEncodeError:
            raise UnknownFieldKey("%r item code is not a fourcc" % key) from None
    if fmt is MediaFormat.MP3 and not id3.is_text_frame(m.group(1)):
        raise UnknownFieldKey("%r is not a text frame" % key)
    return m


def format_of_key(key: str) -> MediaFormat:
    prefix = key.split(":", 1)[0]
    try:
        return {"iptc": MediaFormat.JPEG, "id3": MediaFormat.MP3, "mp4": MediaFormat.MP4}[prefix]
    except KeyError:
        raise UnknownFieldKey("unknown field key prefix in %r" % key) from None


@dataclass(frozen=True)
class MetadataDocument:
    format: MediaFormat
    fields: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.fields:
            check_field_key(key, self.format)


def _decode_iptc(payload: bytes) -> str:
    try:
        return payload.decode("utf-8")
    except UnicodeDecodeError:
        return payload.decode("latin-1")


def extract_metadata(data: bytes, fmt: "MediaFormat | str") -> MetadataDocument:
    fmt = MediaFormat.parse(fmt)
    fields: dict[str, str] = {}
    if fmt is MediaFormat.JPEG:
        for ds in jpeg.get_iptc(jpeg.parse_jpeg(data)):
            # record 2 dataset 0 is the binary record version
            if ds.record != 2 or ds.dataset == 0:
                continue
            fields.setdefault("iptc:%d:%d" % (ds.record, ds.dataset), _decode_iptc(ds.payload))
    elif fmt is MediaFormat.MP3:
        tag, _audio = id3.parse_id3(data)
        for frame in tag.frames if tag else ():
            if frame.is_text:
                fields.setdefault("id3:" + frame.frame_id, frame.text)
    else:
        for code, value in mp4.get_mp4_metadata(mp4.parse_mp4(data)).items():
            fields["mp4:" + code] = value
    return MetadataDocument(fmt, fields)


def inject_fields(data: bytes, fmt: "MediaFormat | str", values: dict[str, str]) -> bytes:
    """Write text `values` (keyed by field key) into the media bytes."""
    fmt = MediaFormat.parse(fmt)
    if not values:
        return data
    parts = {key: check_field_key(key, fmt) for key in values}
    if fmt is MediaFormat.JPEG:
        image = jpeg.parse_jpeg(data)
        planned = {(int(m.group(1)), int(m.group(2))): values[k] for k, m in parts.items()}
        kept = [ds for ds in jpeg.get_iptc(image) if (ds.record, ds.dataset) not in planned]
        new = [jpeg.IptcDataSet(r, d, v.encode("utf-8")) for (r, d), v in planned.items()]
        return jpeg.serialize_jpeg(jpeg.set_iptc(image, _with_record_version(kept + new)))
    if fmt is MediaFormat.MP3:
        tag, audio = id3.parse_id3(data)
        frames = {m.group(1): values[k] for k, m in parts.items()}
        return id3.serialize_id3(id3.set_text_frames(tag, frames), audio)
    boxes = mp4.parse_mp4(data)
    items = {m.group(1): values[k] for k, m in parts.items()}
    return mp4.serialize_mp4(mp4.set_mp4_metadata(boxes, items))


def _with_record_version(datasets: list[jpeg.IptcDataSet]) -> list[jpeg.IptcDataSet]:
    # readers such as Photoshop expect 2:00 ahead of other application datasets
    if any(ds.record == 2 and ds.dataset == 0 for ds in datasets):
        return datasets
    return [jpeg.IptcDataSet(2, 0, b"\x00\x04")] + datasets
