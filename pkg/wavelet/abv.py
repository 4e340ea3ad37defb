"""
Append-only bitvectors.

SmallBV is the bounded explicit tail. SegmentStack applies the
logarithmic method: a binary counter of static segments whose merges
are built incrementally behind proxies. AppendFID is the blocked
structure (sealed static blocks plus an explicit tail) used by the
append-only Wavelet Trie by default. OffsetFID adds the logical left
offset that lets a fresh node start as a constant run without storing it.
"""

import logging
import math
from bisect import bisect_right

from .bits import BitWriter, BlobReader, pack_u64, read_words, select_word
from .conf import resolve
from .exceptions import BuildStateError, CapacityError, CorruptIndexError, OutOfRangeError, check_range
from .rrr import ResumableBuilder, StaticFID

logger = logging.getLogger(__name__)

WORD = 64
MAX_SMALL_BITS = 1 << 16

ABV_MAGIC = b'ABV1'
SEGMENT_MAGIC = b'LSS1'
OFFSET_MAGIC = b'OFS1'


class SmallBV:
    """
    Explicit bounded bitvector. Rank answers are sampled every 64 bits
    and finished with a popcount; the positions of the last 0 and last 1
    are kept for O(1) select of the newest occurrence.
    """

    __slots__ = ('capacity', '_words', '_ones_before', '_zeros_before', '_n', '_m', 'last_one', 'last_zero')

    def __init__(self, capacity=MAX_SMALL_BITS):
        if not 0 < capacity <= MAX_SMALL_BITS:
            raise CapacityError(f"small bitvector capacity {capacity} outside (0, {MAX_SMALL_BITS}]")
        self.capacity = capacity
        self._words = []
        self._ones_before = []
        self._zeros_before = []
        self._n = 0
        self._m = 0
        self.last_one = -1
        self.last_zero = -1

    @classmethod
    def from_bitstring(cls, bits, capacity=MAX_SMALL_BITS):
        small = cls(capacity)
        if len(bits) > capacity:
            raise CapacityError(f"{len(bits)} bits exceed capacity {capacity}")
        for b in bits:
            small.append(b)
        return small

    def __len__(self):
        return self._n

    @property
    def full(self):
        return self._n == self.capacity

    def append(self, b):
        if self._n == self.capacity:
            raise CapacityError(f"small bitvector is full ({self.capacity} bits)")
        index, shift = divmod(self._n, WORD)
        if not shift:
            self._words.append(0)
            self._ones_before.append(self._m)
            self._zeros_before.append(self._n - self._m)
        if b:
            self._words[index] |= 1 << shift
            self._m += 1
            self.last_one = self._n
        else:
            self.last_zero = self._n
        self._n += 1

    def count(self, b=1):
        return self._m if b else self._n - self._m

    def access(self, pos):
        check_range(pos, self._n)
        return (self._words[pos // WORD] >> (pos % WORD)) & 1

    def rank(self, b, pos):
        check_range(pos, self._n, inclusive=True)
        if pos == self._n:
            ones = self._m
        else:
            index, shift = divmod(pos, WORD)
            ones = self._ones_before[index] + (self._words[index] & ((1 << shift) - 1)).bit_count()
        return ones if b else pos - ones

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        if idx == self.count(b) - 1:
            return self.last_one if b else self.last_zero
        samples = self._ones_before if b else self._zeros_before
        index = bisect_right(samples, idx) - 1
        width = min(WORD, self._n - index * WORD)
        return index * WORD + select_word(self._words[index], idx - samples[index], b, width)

    def read(self, pos, width):
        if width == 0:
            return 0
        if pos < 0 or pos + width > self._n:
            raise OutOfRangeError(f"read [{pos}, {pos + width}) outside [0, {self._n})")
        return read_words(self._words, pos, width)

    def iter_bits(self, start=0, stop=None):
        stop = self._n if stop is None else stop
        check_range(start, self._n, inclusive=True)
        check_range(stop, self._n, inclusive=True)
        for pos in range(start, stop):
            yield (self._words[pos // WORD] >> (pos % WORD)) & 1

    def to_bitstring(self):
        writer = BitWriter()
        for index, word in enumerate(self._words):
            writer.write(word, min(WORD, self._n - index * WORD))
        return writer.build()

    def size_in_bits(self):
        # words, two 32-bit samples per word, counters
        return len(self._words) * (WORD + 64) + 4 * WORD


class ConcatProxy:
    """
    Read-only view of the concatenation of frozen bitvectors. Answers
    queries while the static structure replacing it is being built.
    """

    def __init__(self, parts):
        self._parts = [part for part in parts if len(part)]
        self._starts = []
        self._ones = []
        self._zeros = []
        n = m = 0
        for part in self._parts:
            self._starts.append(n)
            self._ones.append(m)
            self._zeros.append(n - m)
            n += len(part)
            m += part.count(1)
        self._n = n
        self._m = m

    def __len__(self):
        return self._n

    def count(self, b=1):
        return self._m if b else self._n - self._m

    def _part_at(self, pos):
        index = bisect_right(self._starts, pos) - 1
        return index, self._parts[index]

    def access(self, pos):
        check_range(pos, self._n)
        index, part = self._part_at(pos)
        return part.access(pos - self._starts[index])

    def rank(self, b, pos):
        check_range(pos, self._n, inclusive=True)
        if pos == self._n:
            return self.count(b)
        index, part = self._part_at(pos)
        before = self._ones[index] if b else self._zeros[index]
        return before + part.rank(b, pos - self._starts[index])

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        sums = self._ones if b else self._zeros
        index = bisect_right(sums, idx) - 1
        return self._starts[index] + self._parts[index].select(b, idx - sums[index])

    def read(self, pos, width):
        if pos < 0 or pos + width > self._n:
            raise OutOfRangeError(f"read [{pos}, {pos + width}) outside [0, {self._n})")
        value = 0
        got = 0
        while got < width:
            index, part = self._part_at(pos + got)
            local = pos + got - self._starts[index]
            take = min(len(part) - local, width - got)
            value |= part.read(local, take) << got
            got += take
        return value

    def iter_bits(self, start=0, stop=None):
        stop = self._n if stop is None else stop
        check_range(start, self._n, inclusive=True)
        check_range(stop, self._n, inclusive=True)
        if start >= stop:
            return
        index, _ = self._part_at(start)
        while index < len(self._parts) and self._starts[index] < stop:
            base = self._starts[index]
            part = self._parts[index]
            yield from part.iter_bits(max(start - base, 0), min(stop - base, len(part)))
            index += 1

    def size_in_bits(self):
        return sum(part.size_in_bits() for part in self._parts) + 3 * WORD * len(self._parts)


class _Segment:
    __slots__ = ('level', 'fid', 'builder')

    def __init__(self, level, fid, builder):
        self.level = level
        self.fid = fid
        self.builder = builder

    @property
    def size(self):
        return len(self.fid)


class SegmentStack:
    """
    Logarithmic-method append-only FID.

    The bitvector is V_t ... V_2 V_1 where V_1 is a SmallBV of at most r
    bits and every other V_i is empty or holds exactly 2^(i-2) r bits.
    When V_1 fills, it and every occupied level below the first empty
    one are merged into that level, behind a proxy, with a builder that
    advances a few blocks per append. r tracks c*log2(n0), rounded down
    to a power of two, and changes only when the top segment is rebuilt.
    """

    def __init__(self, min_r=None, r_factor=None, budget=None):
        self.min_r = resolve(min_r, 'SEGMENT_MIN_R')
        self.r_factor = resolve(r_factor, 'SEGMENT_R_FACTOR')
        self.budget = resolve(budget, 'ABV_REBUILD_BUDGET')
        if self.min_r & (self.min_r - 1):
            raise ValueError(f"SEGMENT_MIN_R must be a power of two, got {self.min_r}")
        self.r = self.min_r
        self._segments = {}
        self._small = SmallBV(self.r)
        self._rr = 0
        self.max_steps_per_append = 0
        self._reindex()

    def _reindex(self):
        self._order = [self._segments[level] for level in sorted(self._segments, reverse=True)]
        self._starts = []
        self._ones = []
        self._zeros = []
        n = m = 0
        for segment in self._order:
            self._starts.append(n)
            self._ones.append(m)
            self._zeros.append(n - m)
            n += segment.size
            m += segment.fid.count(1)
        self._sealed_n = n
        self._sealed_m = m

    def __len__(self):
        return self._sealed_n + len(self._small)

    def count(self, b=1):
        ones = self._sealed_m + self._small.count(1)
        return ones if b else len(self) - ones

    def segment_sizes(self):
        """Non-empty segment sizes keyed by level; level 1 is the explicit tail."""
        sizes = {segment.level: segment.size for segment in self._order}
        if len(self._small):
            sizes[1] = len(self._small)
        return sizes

    def check_shape(self):
        assert len(self._small) < self.r, "tail reached r without a carry"
        for level, segment in self._segments.items():
            expected = (1 << (level - 2)) * self.r
            assert segment.size == expected, f"level {level} holds {segment.size} bits, expected {expected}"
        return True

    def _r_for(self, n0):
        if n0 < 2:
            return self.min_r
        target = int(self.r_factor * math.log2(n0))
        return max(self.min_r, 1 << (target.bit_length() - 1)) if target else self.min_r

    def append(self, b):
        self._small.append(b)
        if self._small.full:
            self._carry()
        steps = self.rebuild_step()
        self.max_steps_per_append = max(self.max_steps_per_append, steps)

    def _carry(self):
        absorbed = []
        level = 2
        while level in self._segments:
            absorbed.append(self._segments.pop(level))
            level += 1
        parts = [segment.fid for segment in reversed(absorbed)] + [self._small]
        source = parts[0] if len(parts) == 1 else ConcatProxy(parts)
        segment = _Segment(level, source, ResumableBuilder(source))
        if segment.builder.complete:
            segment.fid, segment.builder = segment.builder.result(), None
        if not self._segments or level > max(self._segments):
            # Top rebuilt: refresh r from the current length.
            new_r = min(max(self.r, self._r_for(segment.size)), segment.size)
            if new_r != self.r:
                logger.debug("segment stack r %d -> %d at n=%d", self.r, new_r, segment.size)
                self.r = new_r
            segment.level = (segment.size // self.r).bit_length() + 1
        self._segments[segment.level] = segment
        logger.debug("segment stack merged %d segments into level %d (%d bits)",
                     len(absorbed) + 1, segment.level, segment.size)
        self._small = SmallBV(self.r)
        self._reindex()

    def _pending(self):
        return [segment for segment in self._order if segment.builder is not None]

    @property
    def quiescent(self):
        return not self._pending()

    def rebuild_step(self, budget=None):
        """Advance pending segment builds round-robin, one block per unit of budget."""
        budget = self.budget if budget is None else budget
        spent = 0
        while spent < budget:
            pending = self._pending()
            if not pending:
                break
            segment = pending[self._rr % len(pending)]
            self._rr += 1
            segment.builder.step(1)
            spent += 1
            if segment.builder.complete:
                segment.fid, segment.builder = segment.builder.result(), None
        return spent

    def finish_pending(self):
        for segment in self._pending():
            segment.fid, segment.builder = segment.builder.run(), None

    def _locate(self, pos):
        index = bisect_right(self._starts, pos) - 1
        return index, self._order[index]

    def access(self, pos):
        check_range(pos, len(self))
        if pos >= self._sealed_n:
            return self._small.access(pos - self._sealed_n)
        index, segment = self._locate(pos)
        return segment.fid.access(pos - self._starts[index])

    def rank(self, b, pos):
        check_range(pos, len(self), inclusive=True)
        if pos >= self._sealed_n:
            sealed = self._sealed_m if b else self._sealed_n - self._sealed_m
            return sealed + self._small.rank(b, pos - self._sealed_n)
        index, segment = self._locate(pos)
        before = self._ones[index] if b else self._zeros[index]
        return before + segment.fid.rank(b, pos - self._starts[index])

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        sealed = self._sealed_m if b else self._sealed_n - self._sealed_m
        if idx >= sealed:
            return self._sealed_n + self._small.select(b, idx - sealed)
        sums = self._ones if b else self._zeros
        index = bisect_right(sums, idx) - 1
        return self._starts[index] + self._order[index].fid.select(b, idx - sums[index])

    def read(self, pos, width):
        return sum(bit << i for i, bit in enumerate(self.iter_bits(pos, pos + width)))

    def iter_bits(self, start=0, stop=None):
        n = len(self)
        stop = n if stop is None else stop
        check_range(start, n, inclusive=True)
        check_range(stop, n, inclusive=True)
        for index, segment in enumerate(self._order):
            base = self._starts[index]
            lo, hi = max(start - base, 0), min(stop - base, segment.size)
            if lo < hi:
                yield from segment.fid.iter_bits(lo, hi)
        lo, hi = max(start - self._sealed_n, 0), stop - self._sealed_n
        if lo < hi:
            yield from self._small.iter_bits(lo, hi)

    def size_in_bits(self):
        sealed = sum(segment.fid.size_in_bits() for segment in self._order)
        return sealed + self._small.size_in_bits() + 3 * WORD * len(self._order) + 4 * WORD

    def to_bytes(self):
        if not self.quiescent:
            raise BuildStateError("segment stack has pending builds; call finish_pending() first")
        out = [SEGMENT_MAGIC, pack_u64(self.r, len(self._order))]
        for segment in self._order:
            out.append(pack_u64(segment.level))
            out.append(segment.fid.to_bytes())
        out.append(self._small.to_bitstring().to_bytes())
        return b''.join(out)

    @classmethod
    def read_from(cls, reader):
        reader.magic(SEGMENT_MAGIC)
        stack = cls()
        stack.r = reader.u64()
        if stack.r == 0 or stack.r & (stack.r - 1) or stack.r > MAX_SMALL_BITS:
            raise CorruptIndexError(f"invalid segment parameter r={stack.r}")
        for _ in range(reader.u64()):
            level = reader.u64()
            fid = StaticFID.read_from(reader)
            if level < 2 or level in stack._segments:
                raise CorruptIndexError(f"invalid segment level {level}")
            stack._segments[level] = _Segment(level, fid, None)
        tail = reader.bitstring()
        if len(tail) >= stack.r:
            raise CorruptIndexError("segment tail longer than r")
        stack._small = SmallBV.from_bitstring(tail, stack.r)
        stack._reindex()
        try:
            stack.check_shape()
        except AssertionError as exc:
            raise CorruptIndexError(str(exc)) from exc
        return stack


class _Block:
    __slots__ = ('fid', 'builder', 'sealed_at')

    def __init__(self, fid, builder=None, sealed_at=0):
        self.fid = fid
        self.builder = builder
        self.sealed_at = sealed_at

    def __len__(self):
        return len(self.fid)


class AppendFID:
    """
    Blocked append-only FID: sealed blocks B_1 ... B_k as StaticFIDs and
    an explicit tail of fewer than L bits.

    A full tail is sealed at once; its StaticFID is built a few RRR
    blocks per append while the old tail keeps answering queries. Once
    n >= L^2 the block length doubles and adjacent pairs of old blocks
    are merged into double-length blocks in the background; an odd last
    block keeps its old length.
    """

    def __init__(self, block_length=None, max_block_length=None, budget=None):
        self.block_length = resolve(block_length, 'ABV_BLOCK_LENGTH')
        self.max_block_length = resolve(max_block_length, 'ABV_MAX_BLOCK_LENGTH')
        self.budget = resolve(budget, 'ABV_REBUILD_BUDGET')
        if self.block_length & (self.block_length - 1) or self.block_length > MAX_SMALL_BITS:
            raise ValueError(f"block length must be a power of two <= {MAX_SMALL_BITS}, got {self.block_length}")
        self._blocks = []
        self._starts = []
        self._ones = []
        self._zeros = []
        self._sealed_n = 0
        self._sealed_m = 0
        self._tail = SmallBV(self.block_length)
        self._sealing = None
        self._merging = None
        self._merge_length = None
        self._merge_cursor = 0
        self.appends = 0
        self.max_steps_per_append = 0
        self.max_appends_to_complete = 0

    def __len__(self):
        return self._sealed_n + len(self._tail)

    def count(self, b=1):
        ones = self._sealed_m + self._tail.count(1)
        return ones if b else len(self) - ones

    @property
    def block_count(self):
        return len(self._blocks)

    @property
    def tail_length(self):
        return len(self._tail)

    def block_lengths(self):
        return [len(block) for block in self._blocks]

    @property
    def quiescent(self):
        return self._sealing is None and self._merging is None and self._merge_length is None

    def append(self, b):
        self._tail.append(b)
        self.appends += 1
        if self._tail.full:
            self.seal_block()
        if len(self) >= self.block_length ** 2 and self.block_length < self.max_block_length:
            self.grow_block_length()
        steps = self.rebuild_step()
        self.max_steps_per_append = max(self.max_steps_per_append, steps)

    def extend(self, bits):
        for b in bits:
            self.append(b)

    def seal_block(self):
        """Turn the full tail into a sealed block and start building its StaticFID."""
        if not self._tail.full:
            raise BuildStateError(f"tail holds {len(self._tail)} of {self._tail.capacity} bits")
        if self._sealing is not None:
            logger.warning("sealing while the previous block is still building; finishing it eagerly")
            self._complete(self._sealing)
        tail = self._tail
        block = _Block(tail, ResumableBuilder(tail), self.appends)
        self._push_block(block)
        self._sealing = block
        self._tail = SmallBV(self.block_length)
        logger.debug("sealed block %d (%d bits)", len(self._blocks) - 1, len(tail))

    def _push_block(self, block):
        self._blocks.append(block)
        self._starts.append(self._sealed_n)
        self._ones.append(self._sealed_m)
        self._zeros.append(self._sealed_n - self._sealed_m)
        self._sealed_n += len(block)
        self._sealed_m += block.fid.count(1)

    def grow_block_length(self):
        """L := 2L for the tail and future blocks; pair up the old blocks."""
        old = self.block_length
        self.block_length = old * 2
        self._tail.capacity = self.block_length
        self._merge_length = old
        self._merge_cursor = 0
        logger.debug("block length %d -> %d at n=%d", old, self.block_length, len(self))

    def _complete(self, block):
        block.fid, block.builder = block.builder.run(), None
        if block is self._sealing:
            self.max_appends_to_complete = max(self.max_appends_to_complete, self.appends - block.sealed_at)
            self._sealing = None
        elif block is self._merging:
            self._merging = None

    def _start_merge(self):
        """Replace the next pair of old-length blocks with a proxy and a builder."""
        blocks = self._blocks
        length = self._merge_length
        i = self._merge_cursor
        while i + 1 < len(blocks) and not (len(blocks[i]) == length and len(blocks[i + 1]) == length):
            i += 1
        self._merge_cursor = i
        if i + 1 >= len(blocks):
            self._merge_length = None
            return None
        if blocks[i].builder is not None or blocks[i + 1].builder is not None:
            return None
        proxy = ConcatProxy([blocks[i].fid, blocks[i + 1].fid])
        merged = _Block(proxy, ResumableBuilder(proxy), self.appends)
        blocks[i:i + 2] = [merged]
        for sums in (self._starts, self._ones, self._zeros):
            del sums[i + 1]
        self._merge_cursor = i + 1
        self._merging = merged
        logger.debug("merging blocks %d and %d into %d bits", i, i + 1, len(merged))
        return merged

    def _next_pending(self):
        if self._sealing is not None:
            return self._sealing
        if self._merging is None and self._merge_length is not None:
            self._start_merge()
        return self._merging

    def rebuild_step(self, budget=None):
        """Spend up to `budget` RRR block encodings on pending builds."""
        budget = self.budget if budget is None else budget
        spent = 0
        while spent < budget:
            block = self._next_pending()
            if block is None:
                break
            block.builder.step(1)
            spent += 1
            if block.builder.complete:
                self._complete(block)
        return spent

    def finish_pending(self):
        """Run every pending build to completion, including the whole growth merge."""
        block = self._next_pending()
        while block is not None:
            self._complete(block)
            block = self._next_pending()

    def _locate(self, pos):
        index = bisect_right(self._starts, pos) - 1
        return index, self._blocks[index]

    def access(self, pos):
        check_range(pos, len(self))
        if pos >= self._sealed_n:
            return self._tail.access(pos - self._sealed_n)
        index, block = self._locate(pos)
        return block.fid.access(pos - self._starts[index])

    def rank(self, b, pos):
        check_range(pos, len(self), inclusive=True)
        if pos >= self._sealed_n:
            sealed = self._sealed_m if b else self._sealed_n - self._sealed_m
            return sealed + self._tail.rank(b, pos - self._sealed_n)
        index, block = self._locate(pos)
        before = self._ones[index] if b else self._zeros[index]
        return before + block.fid.rank(b, pos - self._starts[index])

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        sealed = self._sealed_m if b else self._sealed_n - self._sealed_m
        if idx >= sealed:
            return self._sealed_n + self._tail.select(b, idx - sealed)
        sums = self._ones if b else self._zeros
        index = bisect_right(sums, idx) - 1
        return self._starts[index] + self._blocks[index].fid.select(b, idx - sums[index])

    def read(self, pos, width):
        return sum(bit << i for i, bit in enumerate(self.iter_bits(pos, pos + width)))

    def iter_bits(self, start=0, stop=None):
        n = len(self)
        stop = n if stop is None else stop
        check_range(start, n, inclusive=True)
        check_range(stop, n, inclusive=True)
        if start >= stop:
            return
        if start < self._sealed_n:
            index, _ = self._locate(start)
            while index < len(self._blocks) and self._starts[index] < stop:
                base = self._starts[index]
                block = self._blocks[index]
                yield from block.fid.iter_bits(max(start - base, 0), min(stop - base, len(block)))
                index += 1
        lo, hi = max(start - self._sealed_n, 0), stop - self._sealed_n
        if lo < hi:
            yield from self._tail.iter_bits(lo, hi)

    def payload_bits(self):
        return sum(block.fid.payload_bits() for block in self._blocks if isinstance(block.fid, StaticFID))

    def size_in_bits(self):
        blocks = sum(block.fid.size_in_bits() for block in self._blocks)
        return blocks + self._tail.size_in_bits() + 3 * WORD * len(self._blocks) + 6 * WORD

    def to_bytes(self):
        if not self.quiescent:
            raise BuildStateError("append-only bitvector has pending builds; call finish_pending() first")
        out = [ABV_MAGIC, pack_u64(self.block_length, len(self._blocks))]
        out.extend(block.fid.to_bytes() for block in self._blocks)
        out.append(self._tail.to_bitstring().to_bytes())
        for sums in (self._starts, self._ones):
            out.append(pack_u64(*sums))
        return b''.join(out)

    @classmethod
    def read_from(cls, reader):
        reader.magic(ABV_MAGIC)
        block_length = reader.u64()
        if block_length == 0 or block_length & (block_length - 1) or block_length > MAX_SMALL_BITS:
            raise CorruptIndexError(f"invalid block length {block_length}")
        fid = cls(block_length=block_length)
        nblocks = reader.u64()
        for _ in range(nblocks):
            fid._push_block(_Block(StaticFID.read_from(reader)))
        tail = reader.bitstring()
        if len(tail) >= block_length:
            raise CorruptIndexError("tail is not shorter than the block length")
        fid._tail = SmallBV.from_bitstring(tail, block_length)
        starts = [reader.u64() for _ in range(nblocks)]
        ones = [reader.u64() for _ in range(nblocks)]
        if starts != fid._starts or ones != fid._ones:
            raise CorruptIndexError("stored partial sums disagree with the blocks")
        fid.appends = len(fid)
        return fid


class OffsetFID:
    """
    fill^offset followed by an append-only FID: a node created by a trie
    split starts as a constant run of `offset` bits that is never stored.
    """

    def __init__(self, inner, offset=0, fill=0):
        self.inner = inner
        self.offset = offset
        self.fill = fill

    def __len__(self):
        return self.offset + len(self.inner)

    def count(self, b=1):
        return self.inner.count(b) + (self.offset if b == self.fill else 0)

    def append(self, b):
        self.inner.append(b)

    @property
    def quiescent(self):
        return self.inner.quiescent

    def finish_pending(self):
        self.inner.finish_pending()

    def access(self, pos):
        check_range(pos, len(self))
        if pos < self.offset:
            return self.fill
        return self.inner.access(pos - self.offset)

    def rank(self, b, pos):
        check_range(pos, len(self), inclusive=True)
        if pos <= self.offset:
            return pos if b == self.fill else 0
        head = self.offset if b == self.fill else 0
        return head + self.inner.rank(b, pos - self.offset)

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        if b == self.fill:
            if idx < self.offset:
                return idx
            idx -= self.offset
        return self.offset + self.inner.select(b, idx)

    def iter_bits(self, start=0, stop=None):
        n = len(self)
        stop = n if stop is None else stop
        check_range(start, n, inclusive=True)
        check_range(stop, n, inclusive=True)
        for _ in range(start, min(stop, self.offset)):
            yield self.fill
        lo, hi = max(start - self.offset, 0), stop - self.offset
        if lo < hi:
            yield from self.inner.iter_bits(lo, hi)

    def size_in_bits(self):
        return self.inner.size_in_bits() + WORD + 1

    def to_bytes(self):
        return OFFSET_MAGIC + pack_u64(self.offset) + bytes([self.fill]) + self.inner.to_bytes()

    @classmethod
    def read_from(cls, reader):
        reader.magic(OFFSET_MAGIC)
        offset = reader.u64()
        fill = reader.u8()
        if fill > 1:
            raise CorruptIndexError(f"fill bit {fill} is not a bit")
        inner = read_append_fid(reader)
        return cls(inner, offset, fill)


APPEND_KINDS = {
    'blocked': AppendFID,
    'logarithmic': SegmentStack,
}


def new_append_fid(kind=None, **options):
    kind = resolve(kind, 'APPEND_BITVECTOR')
    if kind not in APPEND_KINDS:
        raise ValueError(f"unknown append bitvector kind {kind!r}")
    return APPEND_KINDS[kind](**options)


def read_append_fid(reader):
    """Decode an AppendFID or SegmentStack, dispatching on its magic."""
    start = reader.offset
    magic = reader.take(4)
    reader.offset = start
    if magic == ABV_MAGIC:
        return AppendFID.read_from(reader)
    if magic == SEGMENT_MAGIC:
        return SegmentStack.read_from(reader)
    raise CorruptIndexError(f"unknown append bitvector magic {magic!r}")


def append_fid_from_bytes(data):
    reader = BlobReader(data)
    fid = read_append_fid(reader)
    reader.expect_end()
    return fid


def from_bits(bits, kind=None, **options):
    """Build an append-only FID by appending every bit of a BitString."""
    fid = new_append_fid(kind, **options)
    for b in bits:
        fid.append(b)
    return fid
