"""ID3v2 tags: v2.3 and v2.4 reader, v2.3 writer.

Text frames (T***, TXXX, COMM, USLT) are decoded. Every other frame is kept
as an opaque body. Frames parsed from a v2.3 tag keep their original body in
``raw`` so that an unmodified tag re-serializes byte for byte.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass

from .errors import BadFrame, BadFrameId, NotSyncsafe, OutOfRange, Truncated, UnsupportedVersion

HEADER_SIZE = 10
FRAME_ID_RE = re.compile(rb"[A-Z0-9]{4}\Z")

LATIN1 = 0
UTF16 = 1
UTF16BE = 2
UTF8 = 3

_CODECS = {LATIN1: "latin-1", UTF16: "utf-16", UTF16BE: "utf-16-be", UTF8: "utf-8"}
_DESCRIBED = frozenset(["COMM", "USLT"])

# v2.3 frame format flags: compression, encryption
_V3_OPAQUE_FLAGS = 0x00C0
# v2.4 frame format flags: compression, encryption, unsynchronisation, data length
_V4_UNSUPPORTED_FLAGS = 0x000E


def syncsafe_encode(n: int) -> bytes:
    if not 0 <= n < 1 << 28:
        raise OutOfRange("%d does not fit in a 28-bit syncsafe integer" % n)
    return bytes(((n >> 21) & 0x7F, (n >> 14) & 0x7F, (n >> 7) & 0x7F, n & 0x7F))


def syncsafe_decode(b: bytes) -> int:
    if len(b) != 4:
        raise ValueError("syncsafe integers are 4 bytes")
    n = 0
    for byte in b:
        if byte & 0x80:
            raise NotSyncsafe("byte 0x%02X has its high bit set" % byte)
        n = (n << 7) | byte
    return n


@dataclass(frozen=True)
class Id3Frame:
    frame_id: str
    encoding: int = LATIN1
    text: str = ""
    description: str = ""
    lang: str = "eng"
    flags: int = 0
    raw: bytes | None = None
    decoded: bool = True

    @property
    def is_text(self) -> bool:
        """True when `text` reflects the frame content."""
        return self.decoded and is_text_frame(self.frame_id)


@dataclass(frozen=True)
class Id3Tag:
    major_version: int = 3
    frames: tuple[Id3Frame, ...] = ()
    padding: int = 0


def is_text_frame(frame_id: str) -> bool:
    return frame_id.startswith("T") or frame_id in _DESCRIBED


def text_frame(frame_id: str, text: str, description: str = "") -> Id3Frame:
    """Build a fresh text frame, choosing Latin-1 when the text allows it."""
    try:
        text.encode("latin-1")
        description.encode("latin-1")
        enc = LATIN1
    except UnicodeEncodeError:
        enc = UTF8
    return Id3Frame(frame_id, enc, text, description)


def _terminator(enc: int) -> bytes:
    return b"\x00\x00" if enc in (UTF16, UTF16BE) else b"\x00"


def _split_terminated(data: bytes, enc: int) -> tuple[bytes, bytes]:
    term = _terminator(enc)
    if len(term) == 1:
        idx = data.find(term)
    else:
        idx = 0
        while True:
            idx = data.find(term, idx)
            if idx < 0 or idx % 2 == 0:
                break
            idx += 1
    if idx < 0:
        return data, b""
    return data[:idx], data[idx + len(term) :]


def _decode(data: bytes, enc: int) -> str:
    try:
        text = data.decode(_CODECS[enc])
    except UnicodeDecodeError as exc:
        raise BadFrame(str(exc)) from None
    return text.rstrip("\x00")


def _decode_body(frame_id: str, body: bytes) -> tuple[int, str, str, str]:
    if not body:
        return LATIN1, "", "", "eng"
    enc = body[0]
    if enc not in _CODECS:
        raise BadFrame("%s frame uses unknown text encoding %d" % (frame_id, enc))
    rest = body[1:]
    if frame_id in _DESCRIBED:
        if len(rest) < 3:
            raise BadFrame("%s frame too short for language code" % frame_id)
        lang = rest[:3].decode("latin-1")
        desc, text = _split_terminated(rest[3:], enc)
        return enc, _decode(text, enc), _decode(desc, enc), lang
    if frame_id == "TXXX":
        desc, text = _split_terminated(rest, enc)
        return enc, _decode(text, enc), _decode(desc, enc), "eng"
    return enc, _decode(rest, enc), "", "eng"


def _encode_body(frame: Id3Frame) -> bytes:
    enc = frame.encoding
    codec = _CODECS.get(enc)
    if codec is None:
        raise BadFrame("unknown text encoding %d" % enc)
    try:
        text = frame.text.encode(codec)
        desc = frame.description.encode(codec)
    except UnicodeEncodeError:
        enc, codec = UTF8, "utf-8"
        text = frame.text.encode(codec)
        desc = frame.description.encode(codec)
    head = bytes((enc,))
    if frame.frame_id in _DESCRIBED:
        lang = frame.lang.encode("latin-1", "replace")[:3].ljust(3, b" ")
        return head + lang + desc + _terminator(enc) + text
    if frame.frame_id == "TXXX":
        return head + desc + _terminator(enc) + text
    return head + text


def parse_id3(data: bytes) -> tuple[Id3Tag | None, bytes]:
    if data[:3] != b"ID3":
        return None, data
    if len(data) < HEADER_SIZE:
        raise Truncated("ID3 header cut off")
    major, _revision, flags = data[3], data[4], data[5]
    if major not in (3, 4):
        raise UnsupportedVersion("ID3v2.%d is not supported" % major)
    if flags & 0x80:
        raise UnsupportedVersion("unsynchronised ID3 tags are not supported")
    size = syncsafe_decode(data[6:10])
    end = HEADER_SIZE + size
    if end > len(data):
        raise Truncated("ID3 tag declares %d bytes, only %d present" % (size, len(data) - HEADER_SIZE))
    pos = HEADER_SIZE
    if flags & 0x40:
        pos = _skip_extended_header(data, pos, major, end)
    frames = []
    while pos + HEADER_SIZE <= end:
        fid_raw = data[pos : pos + 4]
        if fid_raw[0] == 0:
            break
        if not FRAME_ID_RE.match(fid_raw):
            raise BadFrameId("invalid frame id %r at offset %d" % (fid_raw, pos))
        if major == 4:
            fsize = syncsafe_decode(data[pos + 4 : pos + 8])
        else:
            (fsize,) = struct.unpack_from(">I", data, pos + 4)
        (fflags,) = struct.unpack_from(">H", data, pos + 8)
        body_start = pos + HEADER_SIZE
        body_end = body_start + fsize
        if body_end > end:
            raise Truncated("frame %s runs past end of tag" % fid_raw.decode("ascii"))
        frames.append(_make_frame(fid_raw.decode("ascii"), fflags, data[body_start:body_end], major))
        pos = body_end
    padding = end - pos
    if pos < end and data[pos:end].strip(b"\x00"):
        raise BadFrameId("garbage after frames at offset %d" % pos)
    audio_start = end + (HEADER_SIZE if major == 4 and flags & 0x10 else 0)
    if audio_start > len(data):
        raise Truncated("ID3v2.4 footer cut off")
    return Id3Tag(major, tuple(frames), padding), data[audio_start:]


def _skip_extended_header(data: bytes, pos: int, major: int, end: int) -> int:
    if pos + 4 > end:
        raise Truncated("extended header cut off")
    if major == 4:
        new = pos + syncsafe_decode(data[pos : pos + 4])
    else:
        (ext,) = struct.unpack_from(">I", data, pos)
        new = pos + 4 + ext
    if new > end or new < pos + 4:
        raise Truncated("extended header size out of bounds")
    return new


def _make_frame(frame_id: str, flags: int, body: bytes, major: int) -> Id3Frame:
    try:
        return _decode_frame(frame_id, flags, body, major)
    except BadFrame:
        # undecodable text is carried through untouched
        return Id3Frame(frame_id, flags=flags if major == 3 else 0, raw=body, decoded=False)


def _decode_frame(frame_id: str, flags: int, body: bytes, major: int) -> Id3Frame:
    if major == 4:
        if flags & _V4_UNSUPPORTED_FLAGS:
            raise UnsupportedVersion("frame %s uses unsupported v2.4 format flags" % frame_id)
        if not is_text_frame(frame_id):
            return Id3Frame(frame_id, raw=body, decoded=False)
        enc, text, desc, lang = _decode_body(frame_id, body)
        return Id3Frame(frame_id, enc, text, desc, lang)
    if not is_text_frame(frame_id) or flags & _V3_OPAQUE_FLAGS:
        return Id3Frame(frame_id, flags=flags, raw=body, decoded=False)
    enc, text, desc, lang = _decode_body(frame_id, body)
    return Id3Frame(frame_id, enc, text, desc, lang, flags, body)


def serialize_id3(tag: Id3Tag, audio: bytes) -> bytes:
    out = []
    for frame in tag.frames:
        if not FRAME_ID_RE.match(frame.frame_id.encode("ascii", "replace")):
            raise BadFrameId("invalid frame id %r" % frame.frame_id)
        body = frame.raw if frame.raw is not None else _encode_body(frame)
        out.append(frame.frame_id.encode("ascii") + struct.pack(">IH", len(body), frame.flags) + body)
    frames = b"".join(out) + b"\x00" * tag.padding
    return b"ID3\x03\x00\x00" + syncsafe_encode(len(frames)) + frames + audio


def set_text_frames(tag: Id3Tag | None, values: dict[str, str]) -> Id3Tag:
    """Replace or append text frames, one per frame id in `values`."""
    frames = list(tag.frames) if tag else []
    for frame_id, text in values.items():
        new = text_frame(frame_id, text)
        idx = next((i for i, f in enumerate(frames) if f.frame_id == frame_id), None)
        if idx is None:
            frames.append(new)
        else:
            frames[idx] = new
            frames[idx + 1 :] = [f for f in frames[idx + 1 :] if f.frame_id != frame_id]
    return Id3Tag(3, tuple(frames), tag.padding if tag else 0)
