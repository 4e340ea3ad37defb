"""
Error hierarchy for the wavelet app.

Every error raised by the library derives from WaveletError and from the
builtin exception a caller would expect, so `except IndexError` keeps
working for range problems.
"""


class WaveletError(Exception):
    """Base class for all library errors."""


class OutOfRangeError(WaveletError, IndexError):
    """A position or index is outside the valid bounds."""


class NotFoundError(WaveletError, LookupError):
    """The requested occurrence or string does not exist."""


class DecodeError(WaveletError, ValueError):
    """A bit stream or blob could not be decoded."""


class CorruptIndexError(DecodeError):
    """An index file or serialized structure is malformed."""


class DuplicateStringError(WaveletError, ValueError):
    """The string is already stored in the trie."""


class PrefixFreeError(WaveletError, ValueError):
    """Inserting the string would break prefix-freeness of the set."""


class VariantError(WaveletError, TypeError):
    """The operation is not supported by this variant."""


class CapacityError(WaveletError, OverflowError):
    """A bounded structure is full."""


class BuildStateError(WaveletError, RuntimeError):
    """The structure has in-flight builders and cannot be serialized."""


def check_range(value, upper, what='position', inclusive=False):
    """Raise OutOfRangeError unless 0 <= value < upper (<= if inclusive)."""
    limit_ok = value <= upper if inclusive else value < upper
    if value < 0 or not limit_ok:
        bound = f"[0, {upper}]" if inclusive else f"[0, {upper})"
        raise OutOfRangeError(f"{what} {value} outside {bound}")
