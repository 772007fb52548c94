"""Security-audit toolkit for Joomla installations and metadata-rendering apps.

Forges JPEG/MP3/MP4 files carrying XSS vectors in metadata fields,
fingerprints Joomla and its top-rated extensions over HTTP, flags
source/sink and unescaped output patterns in source trees, and aggregates
detections into installation statistics.
"""

__version__ = "0.1.0"
