"""JPEG marker segments and the APP13/8BIM/IPTC-IIM carrier.

Only the container is handled: segments up to the first SOS are kept as
(marker, payload) pairs, everything from the end of the SOS header to the
EOI marker is kept as an opaque byte string.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .errors import BadLength, BadMarker, FieldTooLong, MalformedIptc, NotJpeg, Truncated

SOI = 0xD8
EOI = 0xD9
SOS = 0xDA
APP0 = 0xE0
APP13 = 0xED
APP15 = 0xEF

# Markers that stand alone, without a length field.
STANDALONE = frozenset([0x01, *range(0xD0, 0xD8)])

MAX_SEGMENT_PAYLOAD = 0xFFFF - 2
MAX_DATASET_PAYLOAD = 0x7FFF

PHOTOSHOP_ID = b"Photoshop 3.0\x00"
IPTC_RESOURCE_ID = 0x0404


@dataclass(frozen=True)
class Segment:
    marker: int
    payload: bytes = b""

    @property
    def has_length(self) -> bool:
        return self.marker not in STANDALONE

    def to_bytes(self) -> bytes:
        if not self.has_length:
            return bytes((0xFF, self.marker))
        if len(self.payload) > MAX_SEGMENT_PAYLOAD:
            raise BadLength(
                "segment 0x%02X payload of %d bytes exceeds %d"
                % (self.marker, len(self.payload), MAX_SEGMENT_PAYLOAD)
            )
        return struct.pack(">BBH", 0xFF, self.marker, len(self.payload) + 2) + self.payload


@dataclass(frozen=True)
class JpegImage:
    segments: tuple[Segment, ...] = ()
    entropy_data: bytes = b""
    trailing: bytes = b""

    @property
    def has_scan(self) -> bool:
        return bool(self.segments) and self.segments[-1].marker == SOS


@dataclass(frozen=True)
class PhotoshopResourceBlock:
    resource_id: int
    data: bytes
    name: bytes = b""

    def to_bytes(self) -> bytes:
        name = bytes((len(self.name),)) + self.name
        if len(name) % 2:
            name += b"\x00"
        out = b"8BIM" + struct.pack(">H", self.resource_id) + name
        out += struct.pack(">I", len(self.data)) + self.data
        if len(self.data) % 2:
            out += b"\x00"
        return out


@dataclass(frozen=True)
class IptcDataSet:
    record: int
    dataset: int
    payload: bytes = field(default=b"")

    def to_bytes(self) -> bytes:
        return encode_iptc_dataset(self.record, self.dataset, self.payload)


def parse_jpeg(data: bytes) -> JpegImage:
    if not data:
        raise NotJpeg("empty input")
    if data[:2] != b"\xff\xd8":
        raise NotJpeg("missing SOI marker")
    pos = 2
    size = len(data)
    segments: list[Segment] = []
    while True:
        if pos + 2 > size:
            raise Truncated("input ends before EOI at offset %d" % pos)
        if data[pos] != 0xFF:
            raise BadMarker("expected marker at offset %d, got 0x%02X" % (pos, data[pos]))
        marker = data[pos + 1]
        if marker == EOI:
            return JpegImage(tuple(segments), b"", data[pos + 2 :])
        if marker in (0xFF, 0x00, SOI):
            raise BadMarker("invalid marker 0xFF%02X at offset %d" % (marker, pos))
        pos += 2
        if marker in STANDALONE:
            segments.append(Segment(marker))
            continue
        if pos + 2 > size:
            raise Truncated("segment 0x%02X length cut off" % marker)
        (length,) = struct.unpack_from(">H", data, pos)
        if length < 2:
            raise BadLength("segment 0x%02X declares length %d" % (marker, length))
        end = pos + length
        if end > size:
            raise Truncated("segment 0x%02X runs past end of input" % marker)
        segments.append(Segment(marker, data[pos + 2 : end]))
        pos = end
        if marker == SOS:
            break

    scan_start = pos
    eoi = _find_eoi(data, pos)
    return JpegImage(tuple(segments), data[scan_start:eoi], data[eoi + 2 :])


def _find_eoi(data: bytes, pos: int) -> int:
    """Offset of the EOI marker closing the scan data starting at `pos`.

    Marker segments between progressive scans are stepped over by their
    declared length so that their payload bytes are never mistaken for EOI.
    """
    size = len(data)
    while True:
        pos = data.find(b"\xff", pos)
        if pos < 0 or pos + 1 >= size:
            raise Truncated("scan data ends without EOI")
        nxt = data[pos + 1]
        if nxt == EOI:
            return pos
        if nxt == 0x00 or nxt == 0xFF or nxt in STANDALONE:
            pos += 1 if nxt == 0xFF else 2
            continue
        if pos + 4 > size:
            raise Truncated("segment header inside scan data cut off")
        (length,) = struct.unpack_from(">H", data, pos + 2)
        if length < 2:
            raise BadLength("segment 0x%02X inside scan data declares length %d" % (nxt, length))
        pos += 2 + length


def serialize_jpeg(image: JpegImage) -> bytes:
    parts = [b"\xff\xd8"]
    parts.extend(seg.to_bytes() for seg in image.segments)
    parts.append(image.entropy_data)
    parts.append(b"\xff\xd9")
    parts.append(image.trailing)
    return b"".join(parts)


def encode_iptc_dataset(record: int, dataset: int, payload: bytes) -> bytes:
    if not (0 <= record <= 255 and 0 <= dataset <= 255):
        raise ValueError("record and dataset must fit in one byte")
    if len(payload) > MAX_DATASET_PAYLOAD:
        raise FieldTooLong(
            "dataset %d:%d payload of %d bytes exceeds %d"
            % (record, dataset, len(payload), MAX_DATASET_PAYLOAD)
        )
    return struct.pack(">BBBH", 0x1C, record, dataset, len(payload)) + bytes(payload)


def decode_iptc_datasets(data: bytes) -> list[IptcDataSet]:
    out = []
    pos = 0
    size = len(data)
    while pos < size:
        if data[pos] != 0x1C:
            # writers commonly zero-pad the resource
            if not data[pos:].strip(b"\x00"):
                break
            raise MalformedIptc("expected tag marker 0x1C at offset %d" % pos)
        if pos + 5 > size:
            raise MalformedIptc("dataset header truncated at offset %d" % pos)
        record, dataset, length = struct.unpack_from(">BBH", data, pos + 1)
        if length & 0x8000:
            raise MalformedIptc("extended dataset %d:%d is not supported" % (record, dataset))
        start = pos + 5
        if start + length > size:
            raise MalformedIptc("dataset %d:%d payload truncated" % (record, dataset))
        out.append(IptcDataSet(record, dataset, data[start : start + length]))
        pos = start + length
    return out


def parse_photoshop_blocks(payload: bytes) -> list[PhotoshopResourceBlock]:
    """Parse the 8BIM resource blocks of an APP13 payload."""
    if not payload.startswith(PHOTOSHOP_ID):
        raise MalformedIptc("APP13 segment lacks the Photoshop 3.0 signature")
    data = payload[len(PHOTOSHOP_ID) :]
    pos = 0
    size = len(data)
    blocks = []
    while pos < size:
        if data[pos:].strip(b"\x00") == b"":
            break
        if data[pos : pos + 4] != b"8BIM":
            raise MalformedIptc("resource block at offset %d lacks 8BIM signature" % pos)
        if pos + 7 > size:
            raise MalformedIptc("resource block header truncated")
        (resource_id,) = struct.unpack_from(">H", data, pos + 4)
        name_len = data[pos + 6]
        name_end = pos + 7 + name_len
        name = data[pos + 7 : name_end]
        if (1 + name_len) % 2:
            name_end += 1
        if name_end + 4 > size:
            raise MalformedIptc("resource block header truncated")
        (length,) = struct.unpack_from(">I", data, name_end)
        start = name_end + 4
        if start + length > size:
            raise MalformedIptc("resource 0x%04X data truncated" % resource_id)
        blocks.append(PhotoshopResourceBlock(resource_id, data[start : start + length], name))
        pos = start + length + (length % 2)
    return blocks


def _is_bare_iptc(payload: bytes) -> bool:
    return payload[:1] == b"\x1c"


def get_iptc(image: JpegImage) -> list[IptcDataSet]:
    raw = b""
    for seg in image.segments:
        if seg.marker != APP13:
            continue
        if _is_bare_iptc(seg.payload):
            raise MalformedIptc("bare IPTC in APP13 without Photoshop 8BIM wrapper")
        if not seg.payload.startswith(PHOTOSHOP_ID):
            continue
        for block in parse_photoshop_blocks(seg.payload):
            if block.resource_id == IPTC_RESOURCE_ID:
                raw += block.data
    return decode_iptc_datasets(raw)


def set_iptc(image: JpegImage, datasets: list[IptcDataSet]) -> JpegImage:
    """Return a copy of `image` whose only APP13 segment carries `datasets`.

    Non-IPTC resource blocks found in existing Photoshop APP13 segments are
    carried over into the new segment.
    """
    iptc = b"".join(ds.to_bytes() for ds in datasets)
    kept: list[PhotoshopResourceBlock] = []
    others: list[Segment] = []
    for seg in image.segments:
        if seg.marker == APP13:
            if seg.payload.startswith(PHOTOSHOP_ID):
                kept.extend(
                    b for b in parse_photoshop_blocks(seg.payload) if b.resource_id != IPTC_RESOURCE_ID
                )
            continue
        others.append(seg)

    blocks = [PhotoshopResourceBlock(IPTC_RESOURCE_ID, iptc)] + kept
    payload = PHOTOSHOP_ID + b"".join(b.to_bytes() for b in blocks)
    if len(payload) > MAX_SEGMENT_PAYLOAD:
        raise BadLength("assembled APP13 payload of %d bytes exceeds segment capacity" % len(payload))
    app13 = Segment(APP13, payload)

    idx = next(
        (i for i, s in enumerate(others) if not (APP0 <= s.marker <= APP15)),
        len(others),
    )
    segments = others[:idx] + [app13] + others[idx:]
    return JpegImage(tuple(segments), image.entropy_data, image.trailing)
