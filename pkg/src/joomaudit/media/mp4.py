"""ISO base media (MP4) boxes and the iTunes-style ilst metadata list."""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from typing import Union

from .errors import BadSize, NoMoov, Truncated

CONTAINERS = frozenset(["moov", "udta", "meta", "ilst"])
# boxes walked only when chunk offsets have to be shifted
_TRACK_PATH = ("trak", "mdia", "minf", "stbl")

UTF8_TYPE = 1
MAX_DEPTH = 32


@dataclass(frozen=True)
class Mp4Box:
    box_type: str
    payload: Union[bytes, tuple["Mp4Box", ...]] = b""
    # version/flags of full-box containers (meta)
    prefix: bytes = b""

    @property
    def is_container(self) -> bool:
        return not isinstance(self.payload, (bytes, bytearray))

    @property
    def children(self) -> tuple["Mp4Box", ...]:
        return self.payload if self.is_container else ()

    def find(self, box_type: str) -> "Mp4Box | None":
        return next((c for c in self.children if c.box_type == box_type), None)


def _fourcc(raw: bytes) -> str:
    return raw.decode("latin-1")


def _read_boxes(
    data: bytes, start: int, end: int, parent: str | None, depth: int = 0
) -> tuple[Mp4Box, ...]:
    if depth > MAX_DEPTH:
        raise BadSize("boxes nested deeper than %d levels" % MAX_DEPTH)
    boxes = []
    pos = start
    while pos < end:
        if pos + 8 > end:
            raise Truncated("box header cut off at offset %d" % pos)
        size, raw_type = struct.unpack_from(">I4s", data, pos)
        header = 8
        if size == 1:
            if pos + 16 > end:
                raise Truncated("largesize box header cut off at offset %d" % pos)
            (size,) = struct.unpack_from(">Q", data, pos + 8)
            header = 16
        elif size == 0:
            size = end - pos
        if size < header:
            raise BadSize("box %r declares size %d" % (raw_type, size))
        box_end = pos + size
        if box_end > end:
            raise Truncated("box %r declares %d bytes, %d remain" % (raw_type, size, end - pos))
        boxes.append(_make_box(_fourcc(raw_type), data, pos + header, box_end, parent, depth))
        pos = box_end
    return tuple(boxes)


def _make_box(
    box_type: str, data: bytes, start: int, end: int, parent: str | None, depth: int
) -> Mp4Box:
    if parent == "ilst" or box_type in CONTAINERS:
        prefix = b""
        if box_type == "meta" and _is_full_meta(data, start, end):
            prefix = data[start : start + 4]
            start += 4
        return Mp4Box(box_type, _read_boxes(data, start, end, box_type, depth + 1), prefix)
    return Mp4Box(box_type, data[start:end])


def _is_full_meta(data: bytes, start: int, end: int) -> bool:
    # QuickTime writes meta without version/flags; its first child follows directly
    if end - start >= 8 and data[start + 4 : start + 8] == b"hdlr":
        return False
    return end - start >= 4


def parse_mp4(data: bytes) -> list[Mp4Box]:
    return list(_read_boxes(data, 0, len(data), None))


def _box_bytes(box: Mp4Box) -> bytes:
    if box.is_container:
        body = box.prefix + b"".join(_box_bytes(c) for c in box.children)
    else:
        body = bytes(box.payload)
    fourcc = box.box_type.encode("latin-1")
    if len(body) + 8 <= 0xFFFFFFFF:
        return struct.pack(">I4s", len(body) + 8, fourcc) + body
    return struct.pack(">I4sQ", 1, fourcc, len(body) + 16) + body


def serialize_mp4(boxes: list[Mp4Box]) -> bytes:
    return b"".join(_box_bytes(b) for b in boxes)


def data_atom(value: str) -> Mp4Box:
    return Mp4Box("data", struct.pack(">II", UTF8_TYPE, 0) + value.encode("utf-8"))


def _mdir_handler() -> Mp4Box:
    return Mp4Box("hdlr", bytes(8) + b"mdirappl" + bytes(9))


def set_mp4_metadata(boxes: list[Mp4Box], fields: dict[str, str]) -> list[Mp4Box]:
    """Create or replace ilst items under moov/udta/meta.

    When moov precedes mdat, chunk offsets in stco/co64 are shifted by the
    change in moov size so media data stays addressable.
    """
    idx = next((i for i, b in enumerate(boxes) if b.box_type == "moov"), None)
    if idx is None:
        raise NoMoov("no moov box in input")
    moov = boxes[idx]
    udta = moov.find("udta") or Mp4Box("udta", ())
    meta = udta.find("meta") or Mp4Box("meta", (_mdir_handler(),), bytes(4))
    if meta.find("hdlr") is None:
        meta = replace(meta, payload=(_mdir_handler(),) + meta.children)
    ilst = meta.find("ilst") or Mp4Box("ilst", ())

    items = list(ilst.children)
    for code, value in fields.items():
        item = Mp4Box(code, (data_atom(value),))
        pos = next((i for i, b in enumerate(items) if b.box_type == code), None)
        if pos is None:
            items.append(item)
        else:
            items[pos] = item
            items[pos + 1 :] = [b for b in items[pos + 1 :] if b.box_type != code]

    meta = _put_child(meta, replace(ilst, payload=tuple(items)))
    udta = _put_child(udta, meta)
    new_moov = _put_child(moov, udta)

    delta = len(_box_bytes(new_moov)) - len(_box_bytes(moov))
    if delta and any(b.box_type == "mdat" for b in boxes[idx + 1 :]):
        new_moov = _shift_chunk_offsets(new_moov, delta)
    return boxes[:idx] + [new_moov] + boxes[idx + 1 :]


def _put_child(parent: Mp4Box, child: Mp4Box) -> Mp4Box:
    kids = list(parent.children)
    pos = next((i for i, b in enumerate(kids) if b.box_type == child.box_type), None)
    if pos is None:
        kids.append(child)
    else:
        kids[pos] = child
    return replace(parent, payload=tuple(kids))


def _shift_chunk_offsets(moov: Mp4Box, delta: int) -> Mp4Box:
    kids = []
    for box in moov.children:
        if box.box_type == "trak" and not box.is_container:
            box = Mp4Box("trak", _shift_in_leaf(bytes(box.payload), 0, delta))
        kids.append(box)
    return replace(moov, payload=tuple(kids))


def _iter_raw(payload: bytes):
    pos = 0
    while pos + 8 <= len(payload):
        size, raw_type = struct.unpack_from(">I4s", payload, pos)
        if size < 8 or pos + size > len(payload):
            return
        yield _fourcc(raw_type), payload[pos + 8 : pos + size]
        pos += size


def _shift_in_leaf(payload: bytes, depth: int, delta: int) -> bytes:
    """Rewrite stco/co64 tables found under trak/mdia/minf/stbl."""
    out = []
    consumed = 0
    for box_type, body in _iter_raw(payload):
        consumed += 8 + len(body)
        if depth + 1 < len(_TRACK_PATH) and box_type == _TRACK_PATH[depth + 1]:
            body = _shift_in_leaf(body, depth + 1, delta)
        elif depth == len(_TRACK_PATH) - 1 and box_type in ("stco", "co64"):
            body = _shift_table(body, box_type == "co64", delta)
        out.append(_box_bytes(Mp4Box(box_type, body)))
    return b"".join(out) + payload[consumed:]


def _shift_table(body: bytes, wide: bool, delta: int) -> bytes:
    if len(body) < 8:
        return body
    (count,) = struct.unpack_from(">I", body, 4)
    fmt = ">%d%s" % (count, "Q" if wide else "I")
    if 8 + struct.calcsize(fmt) > len(body):
        return body
    offsets = [o + delta for o in struct.unpack_from(fmt, body, 8)]
    return body[:8] + struct.pack(fmt, *offsets) + body[8 + struct.calcsize(fmt) :]


def get_mp4_metadata(boxes: list[Mp4Box]) -> dict[str, str]:
    """Text items of moov/udta/meta/ilst keyed by item code."""
    moov = next((b for b in boxes if b.box_type == "moov"), None)
    if moov is None:
        return {}
    ilst = None
    udta = moov.find("udta")
    meta = udta.find("meta") if udta else None
    if meta is not None:
        ilst = meta.find("ilst")
    if ilst is None:
        return {}
    out = {}
    for item in ilst.children:
        if item.box_type == "----" or item.box_type in out:
            continue
        data = item.find("data")
        if data is None or data.is_container or len(data.payload) < 8:
            continue
        (type_ind,) = struct.unpack_from(">I", data.payload, 0)
        if type_ind & 0xFFFFFF != UTF8_TYPE:
            continue
        try:
            out[item.box_type] = bytes(data.payload[8:]).decode("utf-8")
        except UnicodeDecodeError:
            continue
    return out
