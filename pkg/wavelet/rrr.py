"""
Static compressed bitvector with class/offset block encoding.

Blocks of 63 bits are stored as a 6-bit class (popcount) and an offset,
the rank of the block among all blocks of that class in the
combinatorial number system. Superblocks of 32 blocks sample the
absolute rank and the position in the offset stream. The final block
may be shorter; its offset is ranked among blocks of its own length.
"""

import enum
import logging
import math

import numpy as np

from .bits import BitString, BitWriter, BlobReader, binomial_bits, pack_u64, read_words, select_word
from .exceptions import BuildStateError, CorruptIndexError, OutOfRangeError, check_range

logger = logging.getLogger(__name__)

BLOCK_BITS = 63
SUPERBLOCK_BLOCKS = 32
CLASS_BITS = 6
MAGIC = b'RRR1'

# Declared redundancy over B(m, n): ceil(c * n * loglog n / log n) + c0.
REDUNDANCY_FACTOR = 1
REDUNDANCY_CONSTANT = 64

_BINOMIAL = [[math.comb(n, k) for k in range(BLOCK_BITS + 1)] for n in range(BLOCK_BITS + 1)]
# _OFFSET_WIDTH[length][cls]: bits needed for the offset of a block.
_OFFSET_WIDTH = [
    [(_BINOMIAL[length][cls] - 1).bit_length() if cls <= length else 0 for cls in range(BLOCK_BITS + 1)]
    for length in range(BLOCK_BITS + 1)
]
_FULL_WIDTH = _OFFSET_WIDTH[BLOCK_BITS]
_FULL_WIDTH_ARRAY = np.array(_FULL_WIDTH, dtype=np.int64)
_CLASS_WEIGHTS = 1 << np.arange(CLASS_BITS, dtype=np.uint8)


def redundancy_bound(n):
    """Allowed payload bits beyond B(m, n) for an n-bit vector."""
    if n < 4:
        return REDUNDANCY_CONSTANT
    log_n = math.log2(n)
    return math.ceil(REDUNDANCY_FACTOR * n * math.log2(log_n) / log_n) + REDUNDANCY_CONSTANT


def encode_block(word):
    """Return (class, offset) of a block word."""
    cls = word.bit_count()
    offset = 0
    k = 0
    while word:
        low = word & -word
        k += 1
        offset += _BINOMIAL[low.bit_length() - 1][k]
        word ^= low
    return cls, offset


def decode_block(cls, offset, length):
    """Inverse of encode_block for a block of `length` bits."""
    word = 0
    p = length - 1
    for k in range(cls, 0, -1):
        while _BINOMIAL[p][k] > offset:
            p -= 1
        word |= 1 << p
        offset -= _BINOMIAL[p][k]
        p -= 1
    return word


class StaticFID:
    """
    Immutable compressed bitvector answering access, rank and select.

    access and rank are O(1) up to a scan of at most 31 class bytes;
    select binary-searches the superblock samples, O(log n).
    """

    def __init__(self, n, classes, offsets):
        self._n = n
        self._classes = bytes(classes)
        self._offsets = offsets
        self._offset_words = offsets.words()
        self._nblocks = len(self._classes)
        if self._nblocks != (n + BLOCK_BITS - 1) // BLOCK_BITS:
            raise CorruptIndexError(f"{self._nblocks} blocks cannot hold {n} bits")
        self._index()

    def _index(self):
        cls = np.frombuffer(self._classes, dtype=np.uint8)
        if cls.size and int(cls.max()) > BLOCK_BITS:
            raise CorruptIndexError("block class exceeds block length")
        widths = _FULL_WIDTH_ARRAY[cls]
        if cls.size:
            tail = self.block_length(self._nblocks - 1)
            if int(cls[-1]) > tail:
                raise CorruptIndexError("final block class exceeds its length")
            widths[-1] = _OFFSET_WIDTH[tail][int(cls[-1])]
        ones_before = np.concatenate(([0], np.cumsum(cls, dtype=np.int64)))
        offset_before = np.concatenate(([0], np.cumsum(widths, dtype=np.int64)))
        if int(offset_before[-1]) != len(self._offsets):
            raise CorruptIndexError("offset stream length disagrees with block classes")
        self._m = int(ones_before[-1])
        starts = np.arange(0, self._nblocks, SUPERBLOCK_BLOCKS)
        bit_starts = np.minimum(starts * BLOCK_BITS, self._n)
        self._sb_ones = ones_before[starts]
        self._sb_zeros = bit_starts - self._sb_ones
        self._sb_offset = offset_before[starts]

    @classmethod
    def build(cls, bits):
        return ResumableBuilder(bits).run()

    def __len__(self):
        return self._n

    def __eq__(self, other):
        if not isinstance(other, StaticFID):
            return NotImplemented
        return self._n == other._n and self._classes == other._classes and self._offsets == other._offsets

    __hash__ = None

    def __repr__(self):
        return f"StaticFID(n={self._n}, m={self._m})"

    @property
    def ones(self):
        return self._m

    def count(self, b=1):
        return self._m if b else self._n - self._m

    def block_length(self, block):
        return min(BLOCK_BITS, self._n - block * BLOCK_BITS)

    def _block_prefix(self, block):
        """(ones before block, offset stream position of block)."""
        sb = block // SUPERBLOCK_BLOCKS
        first = sb * SUPERBLOCK_BLOCKS
        ones = int(self._sb_ones[sb])
        pos = int(self._sb_offset[sb])
        for cls in self._classes[first:block]:
            ones += cls
            pos += _FULL_WIDTH[cls]
        return ones, pos

    def _decode(self, block, pos):
        cls = self._classes[block]
        length = self.block_length(block)
        width = _OFFSET_WIDTH[length][cls]
        offset = read_words(self._offset_words, pos, width) if width else 0
        return decode_block(cls, offset, length), width

    def _block_word(self, block):
        _, pos = self._block_prefix(block)
        return self._decode(block, pos)[0]

    def access(self, pos):
        check_range(pos, self._n)
        block, shift = divmod(pos, BLOCK_BITS)
        return (self._block_word(block) >> shift) & 1

    def rank(self, b, pos):
        check_range(pos, self._n, inclusive=True)
        if pos == self._n:
            ones = self._m
        else:
            block, shift = divmod(pos, BLOCK_BITS)
            ones, offset_pos = self._block_prefix(block)
            if shift:
                word, _ = self._decode(block, offset_pos)
                ones += (word & ((1 << shift) - 1)).bit_count()
        return ones if b else pos - ones

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        samples = self._sb_ones if b else self._sb_zeros
        sb = int(np.searchsorted(samples, idx, side='right')) - 1
        seen = int(samples[sb])
        offset_pos = int(self._sb_offset[sb])
        block = sb * SUPERBLOCK_BLOCKS
        while True:
            cls = self._classes[block]
            length = self.block_length(block)
            here = cls if b else length - cls
            if seen + here > idx:
                word, _ = self._decode(block, offset_pos)
                return block * BLOCK_BITS + select_word(word, idx - seen, b, length)
            seen += here
            offset_pos += _FULL_WIDTH[cls]
            block += 1

    def read(self, pos, width):
        """Bits [pos, pos + width) as an int, lowest position first."""
        if pos < 0 or pos + width > self._n:
            raise OutOfRangeError(f"read [{pos}, {pos + width}) outside [0, {self._n})")
        value = 0
        got = 0
        while got < width:
            block, shift = divmod(pos + got, BLOCK_BITS)
            take = min(self.block_length(block) - shift, width - got)
            word = self._block_word(block)
            value |= ((word >> shift) & ((1 << take) - 1)) << got
            got += take
        return value

    def iter_bits(self, start=0, stop=None):
        stop = self._n if stop is None else stop
        check_range(start, self._n, inclusive=True)
        check_range(stop, self._n, inclusive=True)
        if start >= stop:
            return
        block, shift = divmod(start, BLOCK_BITS)
        _, offset_pos = self._block_prefix(block)
        pos = start
        while pos < stop:
            word, width = self._decode(block, offset_pos)
            offset_pos += width
            end = min(stop - block * BLOCK_BITS, self.block_length(block))
            word >>= shift
            for _ in range(shift, end):
                yield word & 1
                word >>= 1
            pos += end - shift
            block += 1
            shift = 0

    def to_bitstring(self):
        writer = BitWriter()
        offset_pos = 0
        for block in range(self._nblocks):
            word, width = self._decode(block, offset_pos)
            offset_pos += width
            writer.write(word, self.block_length(block))
        return writer.build()

    def payload_bits(self):
        """Class and offset streams: the part bounded by B(m, n) + redundancy."""
        return CLASS_BITS * self._nblocks + len(self._offsets)

    def directory_bits(self):
        return 3 * 64 * len(self._sb_ones)

    def size_in_bits(self):
        return self.payload_bits() + self.directory_bits() + 2 * 64

    def within_space_bound(self):
        return self.payload_bits() <= binomial_bits(self._m, self._n) + redundancy_bound(self._n)

    def to_bytes(self):
        packed = np.unpackbits(
            np.frombuffer(self._classes, dtype=np.uint8)[:, None], axis=1, bitorder='little',
        )[:, :CLASS_BITS]
        class_stream = BitString.from_bool_array(packed.ravel())
        return (
            MAGIC
            + pack_u64(self._n, self._m, self._nblocks, len(self._offsets))
            + class_stream.to_bytes()
            + self._offsets.to_bytes()
        )

    @classmethod
    def from_bytes(cls, data):
        reader = BlobReader(data)
        fid = cls.read_from(reader)
        reader.expect_end()
        return fid

    @classmethod
    def read_from(cls, reader):
        reader.magic(MAGIC)
        n, m, nblocks, offset_bits = (reader.u64() for _ in range(4))
        class_stream = reader.bitstring()
        offsets = reader.bitstring()
        if len(class_stream) != CLASS_BITS * nblocks or len(offsets) != offset_bits:
            raise CorruptIndexError("stream lengths disagree with header")
        raw = np.frombuffer(class_stream.value.to_bytes((len(class_stream) + 7) // 8, 'little'), dtype=np.uint8)
        unpacked = np.unpackbits(raw, bitorder='little')[:CLASS_BITS * nblocks].reshape(nblocks, CLASS_BITS)
        classes = (unpacked * _CLASS_WEIGHTS).sum(axis=1).astype(np.uint8).tobytes()
        fid = cls(n, classes, offsets)
        if fid.ones != m:
            raise CorruptIndexError(f"header claims {m} ones, blocks hold {fid.ones}")
        return fid


class BuildStatus(enum.Enum):
    IN_PROGRESS = 'in_progress'
    COMPLETE = 'complete'


class ResumableBuilder:
    """
    Builds a StaticFID block by block so the work can be spread over
    many calls. The source only needs __len__ and read(pos, width), so
    proxies over other bitvectors work as well as BitStrings.
    """

    def __init__(self, source):
        self._source = source
        self._n = len(source)
        self._nblocks = (self._n + BLOCK_BITS - 1) // BLOCK_BITS
        self._classes = bytearray()
        self._offsets = BitWriter()
        self._result = None
        self.cursor = 0
        self.steps = 0
        if not self._nblocks:
            self._finish()

    def __len__(self):
        return self._n

    @property
    def complete(self):
        return self._result is not None

    @property
    def remaining(self):
        return self._nblocks - self.cursor

    def step(self, budget=1):
        """Encode up to `budget` more blocks."""
        if self._result is not None:
            return BuildStatus.COMPLETE
        end = min(self._nblocks, self.cursor + max(1, budget))
        for block in range(self.cursor, end):
            start = block * BLOCK_BITS
            length = min(BLOCK_BITS, self._n - start)
            cls, offset = encode_block(self._source.read(start, length))
            self._classes.append(cls)
            self._offsets.write(offset, _OFFSET_WIDTH[length][cls])
        self.steps += end - self.cursor
        self.cursor = end
        if self.cursor == self._nblocks:
            self._finish()
            return BuildStatus.COMPLETE
        return BuildStatus.IN_PROGRESS

    def _finish(self):
        self._result = StaticFID(self._n, self._classes, self._offsets.build())
        self._source = None
        logger.debug("static bitvector built: n=%d m=%d payload=%d", self._n, self._result.ones, self._result.payload_bits())

    def run(self):
        while self._result is None:
            self.step(self._nblocks)
        return self._result

    def result(self):
        if self._result is None:
            raise BuildStateError(f"builder still has {self.remaining} blocks to encode")
        return self._result
