"""
Bit-level foundations: raw bit strings, broadword rank/select, Elias
gamma/delta codes, prefix-free binarization of byte strings and the
entropy/binomial helpers used by space reports.

Bit i of a BitString is bit (i mod 64) of word i // 64, least
significant bit first, so a whole BitString is just a Python int read
from the low end.
"""

import logging
import math
import struct
from collections.abc import Mapping
from typing import Iterable

import numpy as np

from .exceptions import CorruptIndexError, DecodeError, OutOfRangeError, check_range

logger = logging.getLogger(__name__)

WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1

# Exact binomials are cheap up to here; beyond it B(m, n) uses log-gamma.
EXACT_BINOMIAL_LIMIT = 4096

_U64 = struct.Struct('<Q')
_U32 = struct.Struct('<I')


def reverse_bits(value, width):
    """Reverse the low `width` bits of value."""
    if width == 0:
        return 0
    return int(format(value, f'0{width}b')[::-1], 2)


_REVERSED_BYTE = tuple(reverse_bits(c, 8) for c in range(256))
# 9-bit symbol code of each byte: a 1-bit then the byte MSB first.
_SYMBOL_CODE = tuple(1 | (_REVERSED_BYTE[c] << 1) for c in range(256))


class BitString:
    """
    Immutable finite bit sequence with an explicit length.

    Houses binarized strings, trie labels and codec payloads.
    """

    __slots__ = ('_value', '_length', '_words')

    def __init__(self, value=0, length=0):
        if length < 0:
            raise ValueError("length must be non-negative")
        if value < 0 or value >> length:
            raise ValueError("value has bits beyond the declared length")
        self._value = value
        self._length = length
        self._words = None

    @classmethod
    def from_str(cls, text):
        """Build from a '0'/'1' string written in index order."""
        if text.strip('01'):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text[::-1], 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits):
        writer = BitWriter()
        for b in bits:
            writer.append(b)
        return writer.build()

    @classmethod
    def constant(cls, b, n):
        return cls((1 << n) - 1 if b else 0, n)

    @classmethod
    def from_bool_array(cls, array):
        """Pack a numpy boolean (or 0/1) array into a BitString."""
        array = np.asarray(array, dtype=np.uint8)
        packed = np.packbits(array, bitorder='little').tobytes()
        return cls(int.from_bytes(packed, 'little'), int(array.size))

    @classmethod
    def from_bytes(cls, data):
        bits, end = cls.from_buffer(data, 0)
        if end != len(data):
            raise CorruptIndexError("trailing bytes after bit string")
        return bits

    @classmethod
    def from_buffer(cls, data, offset=0):
        """Decode the serialized form at `offset`; return (BitString, end)."""
        if offset + 8 > len(data):
            raise CorruptIndexError("truncated bit string header")
        (length,) = _U64.unpack_from(data, offset)
        nbytes = 8 * ((length + WORD_BITS - 1) // WORD_BITS)
        start = offset + 8
        if start + nbytes > len(data):
            raise CorruptIndexError("truncated bit string payload")
        value = int.from_bytes(data[start:start + nbytes], 'little')
        if value >> length:
            raise CorruptIndexError("bit string has bits beyond its length")
        return cls(value, length), start + nbytes

    @property
    def value(self):
        return self._value

    def __len__(self):
        return self._length

    def __getitem__(self, key):
        if isinstance(key, slice):
            start, stop, step = key.indices(self._length)
            if step != 1:
                raise ValueError("BitString slices must be contiguous")
            width = max(0, stop - start)
            return BitString((self._value >> start) & ((1 << width) - 1), width)
        if key < 0:
            key += self._length
        check_range(key, self._length)
        return (self._value >> key) & 1

    def __iter__(self):
        value = self._value
        for _ in range(self._length):
            yield value & 1
            value >>= 1

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return self._length == other._length and self._value == other._value

    def __hash__(self):
        return hash((self._value, self._length))

    def __lt__(self, other):
        # Lexicographic in index order; a proper prefix sorts first.
        common = self.common_prefix_length(other)
        if common == min(self._length, other._length):
            return self._length < other._length
        return self[common] < other[common]

    def __add__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(self._value | (other._value << self._length), self._length + other._length)

    def __str__(self):
        if not self._length:
            return ''
        return format(self._value, f'0{self._length}b')[::-1]

    def __repr__(self):
        return f"BitString('{self}')"

    def count(self, b=1):
        ones = self._value.bit_count()
        return ones if b else self._length - ones

    def startswith(self, prefix):
        if len(prefix) > self._length:
            return False
        return (self._value & ((1 << len(prefix)) - 1)) == prefix._value

    def common_prefix_length(self, other, offset=0):
        """Length of the longest common prefix of self[offset:] and other."""
        limit = min(self._length - offset, other._length)
        if limit <= 0:
            return 0
        diff = ((self._value >> offset) ^ other._value) & ((1 << limit) - 1)
        if not diff:
            return limit
        return (diff & -diff).bit_length() - 1

    def words(self):
        """The 64-bit words of the packed payload (cached)."""
        if self._words is None:
            nwords = (self._length + WORD_BITS - 1) // WORD_BITS
            raw = self._value.to_bytes(8 * nwords, 'little')
            self._words = np.frombuffer(raw, dtype='<u8').tolist()
        return self._words

    def read(self, pos, width):
        """Return bits [pos, pos + width) as an int, bit pos lowest (width <= 64)."""
        if width == 0:
            return 0
        if pos < 0 or pos + width > self._length:
            raise OutOfRangeError(f"read [{pos}, {pos + width}) outside [0, {self._length})")
        return read_words(self.words(), pos, width)

    def to_bytes(self):
        nwords = (self._length + WORD_BITS - 1) // WORD_BITS
        return _U64.pack(self._length) + self._value.to_bytes(8 * nwords, 'little')


def read_words(words, pos, width):
    """Read `width` (<= 64) bits starting at bit `pos` of a word list."""
    index, shift = divmod(pos, WORD_BITS)
    value = words[index] >> shift
    if shift + width > WORD_BITS:
        value |= words[index + 1] << (WORD_BITS - shift)
    return value & ((1 << width) - 1)


class BitWriter:
    """Append-only builder producing a BitString."""

    _FLUSH_BITS = 4096

    __slots__ = ('_chunks', '_acc', '_acc_length', '_length')

    def __init__(self):
        self._chunks = []
        self._acc = 0
        self._acc_length = 0
        self._length = 0

    def __len__(self):
        return self._length

    def write(self, value, width):
        """Append the low `width` bits of value, lowest bit first."""
        self._acc |= value << self._acc_length
        self._acc_length += width
        self._length += width
        while self._acc_length >= self._FLUSH_BITS:
            self._chunks.append((self._acc & ((1 << self._FLUSH_BITS) - 1)).to_bytes(self._FLUSH_BITS // 8, 'little'))
            self._acc >>= self._FLUSH_BITS
            self._acc_length -= self._FLUSH_BITS

    def append(self, b):
        self.write(1 if b else 0, 1)

    def extend(self, bits):
        self.write(bits.value, len(bits))

    def build(self):
        tail_bytes = (self._acc_length + 7) // 8
        data = b''.join(self._chunks) + self._acc.to_bytes(tail_bytes, 'little')
        return BitString(int.from_bytes(data, 'little'), self._length)


class BlobReader:
    """Sequential reader over a serialized blob; short reads are corruption."""

    def __init__(self, data, offset=0):
        self._data = bytes(data)
        self.offset = offset

    def take(self, size):
        end = self.offset + size
        if size < 0 or end > len(self._data):
            raise CorruptIndexError(f"truncated blob: wanted {size} bytes at {self.offset}")
        chunk = self._data[self.offset:end]
        self.offset = end
        return chunk

    def magic(self, expected):
        found = self.take(len(expected))
        if found != expected:
            raise CorruptIndexError(f"bad magic {found!r}, expected {expected!r}")

    def u64(self):
        return _U64.unpack(self.take(8))[0]

    def u32(self):
        return _U32.unpack(self.take(4))[0]

    def u8(self):
        return self.take(1)[0]

    def bitstring(self):
        bits, self.offset = BitString.from_buffer(self._data, self.offset)
        return bits

    def blob(self):
        return self.take(self.u64())

    def at_end(self):
        return self.offset == len(self._data)

    def expect_end(self):
        if not self.at_end():
            raise CorruptIndexError(f"{len(self._data) - self.offset} trailing bytes")


def pack_u64(*values):
    return b''.join(_U64.pack(v) for v in values)


def pack_u32(value):
    return _U32.pack(value)


def pack_blob(data):
    return _U64.pack(len(data)) + data


def rank_word(word, pos, b):
    """Number of b-bits strictly before `pos` in a 64-bit word."""
    ones = (word & ((1 << pos) - 1)).bit_count()
    return ones if b else pos - ones


def select_word(word, idx, b, width=WORD_BITS):
    """Position of the (idx+1)-th b-bit among the low `width` bits."""
    if not b:
        word = ~word & ((1 << width) - 1)
    for _ in range(idx):
        word &= word - 1
    if not word:
        raise OutOfRangeError(f"word has fewer than {idx + 1} {b}-bits")
    return (word & -word).bit_length() - 1


def gamma_encode(n):
    """Elias gamma code of n >= 1: len-1 zeros, then n MSB first."""
    if n < 1:
        raise ValueError("gamma code is undefined for integers below 1")
    width = n.bit_length()
    return BitString(reverse_bits(n, width) << (width - 1), 2 * width - 1)


def gamma_decode(bits, offset=0):
    """Decode one gamma code at `offset`; return (value, bits consumed)."""
    value, end = gamma_decode_int(bits.value, len(bits), offset)
    return value, end - offset


def gamma_decode_int(stream, length, offset):
    """Decode a gamma code from a raw int stream; return (value, end offset)."""
    rest = stream >> offset
    if offset >= length or not rest:
        raise DecodeError(f"truncated gamma code at bit {offset}")
    zeros = (rest & -rest).bit_length() - 1
    end = offset + 2 * zeros + 1
    if end > length:
        raise DecodeError(f"truncated gamma code at bit {offset}")
    return reverse_bits((rest >> zeros) & ((1 << (zeros + 1)) - 1), zeros + 1), end


def delta_encode(n):
    """Elias delta code: gamma of the bit length, then the low bits MSB first."""
    if n < 1:
        raise ValueError("delta code is undefined for integers below 1")
    width = n.bit_length()
    head = gamma_encode(width)
    low = width - 1
    return head + BitString(reverse_bits(n & ((1 << low) - 1), low), low)


def delta_decode(bits, offset=0):
    width, used = gamma_decode(bits, offset)
    low = width - 1
    start = offset + used
    if start + low > len(bits):
        raise DecodeError(f"truncated delta code at bit {offset}")
    tail = reverse_bits(bits[start:start + low].value, low)
    return (1 << low) | tail, used + low


def binarize(s):
    """
    Prefix-free binary image of a byte string: each byte becomes a 1-bit
    followed by its 8 bits MSB first, and a single 0-bit terminates.
    """
    prefix = binarize_prefix(s)
    return BitString(prefix.value, len(prefix) + 1)


def binarize_prefix(s):
    """binarize(s) without the terminator; the image of a byte prefix."""
    value = 0
    for c in reversed(bytes(s)):
        value = (value << 9) | _SYMBOL_CODE[c]
    return BitString(value, 9 * len(s))


def debinarize(bits):
    """Inverse of binarize."""
    out, pos = _decode_symbols(bits)
    if pos >= len(bits):
        raise DecodeError("missing terminator")
    if pos != len(bits) - 1:
        raise DecodeError("bits after terminator")
    return out


def debinarize_prefix(bits):
    """Decode the complete symbols of a (possibly truncated) binarized string."""
    out, _ = _decode_symbols(bits, strict=False)
    return out


def _decode_symbols(bits, strict=True):
    value, length = bits.value, len(bits)
    out = bytearray()
    pos = 0
    while pos < length and (value >> pos) & 1:
        if pos + 9 > length:
            if strict:
                raise DecodeError(f"truncated symbol at bit {pos}")
            break
        out.append(_REVERSED_BYTE[(value >> (pos + 1)) & 0xFF])
        pos += 9
    return bytes(out), pos


def zero_order_entropy(counts, n=None):
    """H0 in bits per symbol of a histogram (mapping or iterable of counts)."""
    values = np.fromiter(counts.values() if isinstance(counts, Mapping) else counts, dtype=np.float64)
    total = float(values.sum()) if n is None else float(n)
    if total <= 0:
        raise ValueError("entropy of an empty sequence is undefined")
    if values.sum() != total:
        raise ValueError(f"counts sum to {values.sum():.0f}, expected {total:.0f}")
    p = values[values > 0] / total
    return max(0.0, float(-(p * np.log2(p)).sum()))


def binary_entropy(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def binomial_bits(m, n):
    """B(m, n) = ceil(log2 C(n, m))."""
    if not 0 <= m <= n:
        raise ValueError(f"invalid binomial C({n}, {m})")
    if n <= EXACT_BINOMIAL_LIMIT:
        return (math.comb(n, m) - 1).bit_length()
    log2 = (math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)) / math.log(2)
    return max(0, math.ceil(log2 - 1e-9))


def bits_of(values: Iterable[int]) -> BitString:
    """Shorthand used by tests and demos: BitString from 0/1 ints."""
    return BitString.from_bits(values)
