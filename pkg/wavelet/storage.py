"""
Index files on disk and the line framing of input logs.
"""

import logging
import os
import re
import struct
import tempfile
from pathlib import Path

from . import layout
from .exceptions import CorruptIndexError, DecodeError
from .wtrie import WaveletTrie

logger = logging.getLogger(__name__)

_LENGTH = struct.Struct('<I')
_ESCAPE = re.compile(rb'\\(x[0-9a-fA-F]{2}|\\)|\\')


class IndexFile:
    """A Wavelet Trie index at `path`; writes replace the file atomically."""

    def __init__(self, path):
        self.path = Path(path)

    def __repr__(self):
        return f"IndexFile('{self.path}')"

    def read_header(self):
        with self.path.open('rb') as fh:
            return layout.read_header(fh.read(layout.HEADER_SIZE))

    def load(self):
        data = self.path.read_bytes()
        try:
            wt = WaveletTrie.from_bytes(data)
        except CorruptIndexError:
            raise
        except (ValueError, LookupError, OverflowError, struct.error) as exc:
            raise CorruptIndexError(f"{self.path}: {exc}") from exc
        logger.info("loaded index %s (%d bytes, %s, n=%d)", self.path, len(data), wt.variant.value, len(wt))
        return wt

    def save(self, wt):
        data = wt.to_bytes()
        directory = self.path.parent
        directory.mkdir(parents=True, exist_ok=True)
        fd, temp = tempfile.mkstemp(prefix=f'.{self.path.name}.', suffix='.tmp', dir=directory)
        try:
            with os.fdopen(fd, 'wb') as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(temp, self.path)
        except BaseException:
            Path(temp).unlink(missing_ok=True)
            raise
        logger.info("saved index %s (%d bytes, %s, n=%d)", self.path, len(data), wt.variant.value, len(wt))
        return len(data)


def escape_bytes(value):
    """Printable ASCII stays as is, backslash doubles, any other byte becomes \\xHH."""
    out = []
    for c in value:
        if c == 0x5C:
            out.append('\\\\')
        elif 0x20 <= c < 0x7F:
            out.append(chr(c))
        else:
            out.append(f'\\x{c:02x}')
    return ''.join(out)


def unescape_bytes(text):
    """Inverse of escape_bytes; accepts str (UTF-8 encoded first) or bytes."""
    data = text.encode('utf-8') if isinstance(text, str) else bytes(text)

    def replace(match):
        token = match.group(1)
        if token is None:
            raise DecodeError(f"dangling backslash in {text!r}")
        if token == b'\\':
            return b'\\'
        return bytes([int(token[1:], 16)])

    return _ESCAPE.sub(replace, data)


def split_lines(data):
    """LF-framed records; a trailing LF is optional and an empty input has no records."""
    if not data:
        return []
    lines = data.split(b'\n')
    if lines[-1] == b'':
        lines.pop()
    return lines


def split_length_prefixed(data):
    """Records framed as u32 little-endian length followed by the bytes."""
    records = []
    pos = 0
    while pos < len(data):
        if pos + _LENGTH.size > len(data):
            raise CorruptIndexError(f"truncated length prefix at byte {pos}")
        (size,) = _LENGTH.unpack_from(data, pos)
        pos += _LENGTH.size
        if pos + size > len(data):
            raise CorruptIndexError(f"record at byte {pos} runs past the end of the input")
        records.append(data[pos:pos + size])
        pos += size
    return records


def read_lines(path, length_prefixed=False):
    data = Path(path).read_bytes()
    return split_length_prefixed(data) if length_prefixed else split_lines(data)


def write_length_prefixed(records):
    return b''.join(_LENGTH.pack(len(r)) + r for r in records)
