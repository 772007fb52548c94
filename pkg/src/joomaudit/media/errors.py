class MediaError(ValueError):
    """Base class for every structured parse/serialize failure."""


class Truncated(MediaError):
    pass


class NotJpeg(MediaError):
    pass


class BadMarker(MediaError):
    """A byte other than 0xFF where a JPEG marker was expected."""


class BadLength(MediaError):
    pass


class FieldTooLong(MediaError):
    pass


class MalformedIptc(MediaError):
    pass


class OutOfRange(MediaError):
    pass


class NotSyncsafe(MediaError):
    pass


class UnsupportedVersion(MediaError):
    pass


class BadFrameId(MediaError):
    pass


class BadFrame(MediaError):
    """Frame body that cannot be decoded under its declared encoding."""


class BadSize(MediaError):
    pass


class NoMoov(MediaError):
    pass


class UnknownFieldKey(MediaError):
    pass
