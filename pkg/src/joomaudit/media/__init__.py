"""Byte-level parsers and writers for JPEG/IPTC, MP3/ID3v2 and MP4 metadata."""

from .document import MediaFormat, MetadataDocument, extract_metadata, inject_fields
from .errors import MediaError

__all__ = ["MediaError", "MediaFormat", "MetadataDocument", "extract_metadata", "inject_fields"]
