"""
Fully dynamic bitvector: run-length encoding with Elias gamma codes,
cut into chunks held by an AVL tree keyed implicitly by position.

Every node keeps subtree totals (bits, ones, chunks, encoded bits) so
access, rank, select, insert and delete are O(log n) plus a decode of
one chunk.
"""

import logging
from itertools import groupby

from .bits import BitString, BitWriter, gamma_decode_int, gamma_encode
from .conf import resolve
from .exceptions import CorruptIndexError, check_range

logger = logging.getLogger(__name__)


class Chunk:
    """A maximal-run encoding of a stretch of bits, starting with `first`."""

    __slots__ = ('first', 'code', 'bits', 'ones', 'runs')

    def __init__(self, first, code, bits, ones, runs):
        self.first = first
        self.code = code
        self.bits = bits
        self.ones = ones
        self.runs = runs

    @classmethod
    def from_runs(cls, first, runs):
        writer = BitWriter()
        ones = 0
        for j, run in enumerate(runs):
            writer.extend(gamma_encode(run))
            if first ^ (j & 1):
                ones += run
        return cls(first, writer.build(), sum(runs), ones, len(runs))

    def decode(self):
        stream, length = self.code.value, len(self.code)
        runs = []
        pos = 0
        while pos < length:
            run, pos = gamma_decode_int(stream, length, pos)
            runs.append(run)
        return runs

    @property
    def encoded_bits(self):
        return len(self.code) + 1

    def count(self, b):
        return self.ones if b else self.bits - self.ones

    def access(self, pos):
        bit = self.first
        for run in self.decode():
            if pos < run:
                return bit
            pos -= run
            bit ^= 1
        raise AssertionError("position past the end of the chunk")

    def rank(self, b, pos):
        ones = 0
        bit = self.first
        remaining = pos
        for run in self.decode():
            if remaining <= run:
                if bit:
                    ones += remaining
                break
            if bit:
                ones += run
            remaining -= run
            bit ^= 1
        return ones if b else pos - ones

    def select(self, b, idx):
        start = 0
        bit = self.first
        for run in self.decode():
            if bit == b:
                if idx < run:
                    return start + idx
                idx -= run
            start += run
            bit ^= 1
        raise AssertionError("chunk has too few bits of the requested kind")

    def iter_bits(self, start, stop):
        bit = self.first
        pos = 0
        for run in self.decode():
            lo, hi = max(start, pos), min(stop, pos + run)
            for _ in range(lo, hi):
                yield bit
            pos += run
            if pos >= stop:
                return
            bit ^= 1


def _value(first, j):
    return first ^ (j & 1)


def _insert_run(first, runs, pos, b):
    """Insert bit b at pos in a run list; returns the new first bit."""
    if not runs:
        runs.append(1)
        return b
    start = 0
    for j, run in enumerate(runs):
        end = start + run
        if pos < end or (pos == end and _value(first, j) == b):
            break
        start = end
    else:
        # past the last run, whose value differs from b
        runs.append(1)
        return first
    if _value(first, j) == b:
        runs[j] += 1
    elif pos == start and j == 0:
        runs.insert(0, 1)
        return b
    else:
        head = pos - start
        runs[j:j + 1] = [head, 1, run - head]
    return first


def _delete_run(first, runs, pos):
    """Delete the bit at pos; returns (new first bit, deleted bit)."""
    start = 0
    for j, run in enumerate(runs):
        if pos < start + run:
            break
        start += run
    bit = _value(first, j)
    runs[j] -= 1
    if not runs[j]:
        del runs[j]
        if j == 0:
            first ^= 1
        elif j < len(runs):
            runs[j - 1] += runs.pop(j)
    return first, bit


def _concat_runs(first_a, runs_a, first_b, runs_b):
    if not runs_a:
        return first_b, list(runs_b)
    runs = list(runs_a)
    tail = list(runs_b)
    if tail and _value(first_a, len(runs) - 1) == first_b:
        runs[-1] += tail.pop(0)
    return first_a, runs + tail


def _balanced_cut(runs, floor):
    """
    The run index splitting `runs` most evenly by encoded size such that
    both sides, first-bit flag included, hold at least `floor` bits.
    None when no such cut exists.
    """
    sizes = [2 * run.bit_length() - 1 for run in runs]
    total = sum(sizes)
    best, best_gap = None, None
    acc = 0
    for cut in range(1, len(runs)):
        acc += sizes[cut - 1]
        left, right = acc + 1, total - acc + 1
        if left < floor or right < floor:
            continue
        gap = abs(left - right)
        if best_gap is None or gap < best_gap:
            best, best_gap = cut, gap
    return best


def _pieces(first, runs, target):
    """Chunks for a run list, cut while a chunk is oversized and a balanced cut exists."""
    chunk = Chunk.from_runs(first, runs)
    if chunk.encoded_bits <= 2 * target:
        return [chunk]
    cut = _balanced_cut(runs, target // 2)
    if cut is None:
        return [chunk]
    return _pieces(first, runs[:cut], target) + _pieces(_value(first, cut), runs[cut:], target)


class _Node:
    __slots__ = ('chunk', 'left', 'right', 'height', 'bits', 'ones', 'chunks', 'encoded')

    def __init__(self, chunk):
        self.chunk = chunk
        self.left = None
        self.right = None
        self.refresh()

    def refresh(self):
        left, right = self.left, self.right
        chunk = self.chunk
        self.height = 1 + max(left.height if left else 0, right.height if right else 0)
        self.bits = chunk.bits + (left.bits if left else 0) + (right.bits if right else 0)
        self.ones = chunk.ones + (left.ones if left else 0) + (right.ones if right else 0)
        self.chunks = 1 + (left.chunks if left else 0) + (right.chunks if right else 0)
        self.encoded = chunk.encoded_bits + (left.encoded if left else 0) + (right.encoded if right else 0)


def _height(node):
    return node.height if node else 0


def _size(node, attr):
    return getattr(node, attr) if node else 0


def _rotate_right(node):
    pivot = node.left
    node.left = pivot.right
    pivot.right = node
    node.refresh()
    pivot.refresh()
    return pivot


def _rotate_left(node):
    pivot = node.right
    node.right = pivot.left
    pivot.left = node
    node.refresh()
    pivot.refresh()
    return pivot


def _rebalance(node):
    node.refresh()
    balance = _height(node.left) - _height(node.right)
    if balance > 1:
        if _height(node.left.left) < _height(node.left.right):
            node.left = _rotate_left(node.left)
        return _rotate_right(node)
    if balance < -1:
        if _height(node.right.right) < _height(node.right.left):
            node.right = _rotate_right(node.right)
        return _rotate_left(node)
    return node


def _insert_at(node, index, chunk):
    if node is None:
        return _Node(chunk)
    left_chunks = _size(node.left, 'chunks')
    if index <= left_chunks:
        node.left = _insert_at(node.left, index, chunk)
    else:
        node.right = _insert_at(node.right, index - left_chunks - 1, chunk)
    return _rebalance(node)


def _delete_at(node, index):
    left_chunks = _size(node.left, 'chunks')
    if index < left_chunks:
        node.left = _delete_at(node.left, index)
    elif index > left_chunks:
        node.right = _delete_at(node.right, index - left_chunks - 1)
    else:
        if node.left is None:
            return node.right
        if node.right is None:
            return node.left
        successor = node.right
        while successor.left is not None:
            successor = successor.left
        node.chunk = successor.chunk
        node.right = _delete_at(node.right, 0)
    return _rebalance(node)


def _replace_at(node, index, chunk):
    left_chunks = _size(node.left, 'chunks')
    if index < left_chunks:
        _replace_at(node.left, index, chunk)
    elif index > left_chunks:
        _replace_at(node.right, index - left_chunks - 1, chunk)
    else:
        node.chunk = chunk
    node.refresh()


def _build_balanced(chunks, lo, hi):
    if lo >= hi:
        return None
    mid = (lo + hi) // 2
    node = _Node(chunks[mid])
    node.left = _build_balanced(chunks, lo, mid)
    node.right = _build_balanced(chunks, mid + 1, hi)
    node.refresh()
    return node


def _chunk_at_index(root, index):
    node = root
    while True:
        left_chunks = _size(node.left, 'chunks')
        if index < left_chunks:
            node = node.left
        elif index == left_chunks:
            return node.chunk
        else:
            index -= left_chunks + 1
            node = node.right


def _chunks_from(root, index):
    """In-order chunks starting at chunk `index`."""
    stack = []
    node = root
    while node is not None:
        left_chunks = _size(node.left, 'chunks')
        if index < left_chunks:
            stack.append(node)
            node = node.left
        elif index == left_chunks:
            stack.append(node)
            node = None
        else:
            index -= left_chunks + 1
            node = node.right
    while stack:
        node = stack.pop()
        yield node.chunk
        child = node.right
        while child is not None:
            stack.append(child)
            child = child.left


class DynamicFID:
    """
    Bitvector supporting access, rank, select, insert, delete and
    init(b, n) in O(log n). A chunk is split once its code exceeds twice
    the target size, at a run boundary leaving both sides at least half
    the target, and merged with a neighbour below half of it. A chunk
    with no such boundary, such as one long run beside a few short ones,
    stays whole.
    """

    def __init__(self, chunk_target=None):
        self.chunk_target = resolve(chunk_target, 'DBV_CHUNK_TARGET')
        self._root = None

    @classmethod
    def init(cls, b, n, chunk_target=None):
        fid = cls(chunk_target)
        if n:
            fid._root = _Node(Chunk.from_runs(b, [n]))
        return fid

    @classmethod
    def from_bitstring(cls, bits, chunk_target=None):
        fid = cls(chunk_target)
        chunks = []
        first, runs, size = None, [], 0
        for bit, group in groupby(bits):
            run = sum(1 for _ in group)
            if first is None:
                first = bit
            runs.append(run)
            size += 2 * run.bit_length() - 1
            if size >= fid.chunk_target:
                chunks.extend(_pieces(first, runs, fid.chunk_target))
                first, runs, size = None, [], 0
        if runs:
            chunks.append(Chunk.from_runs(first, runs))
        if len(chunks) > 1 and chunks[-1].encoded_bits < fid.chunk_target // 2:
            last = chunks.pop()
            prev = chunks.pop()
            first, runs = _concat_runs(prev.first, prev.decode(), last.first, last.decode())
            chunks.extend(_pieces(first, runs, fid.chunk_target))
        fid._root = _build_balanced(chunks, 0, len(chunks))
        return fid

    @classmethod
    def from_bytes(cls, data, chunk_target=None):
        return cls.from_bitstring(BitString.from_bytes(data), chunk_target)

    def __len__(self):
        return self._root.bits if self._root else 0

    def count(self, b=1):
        ones = self._root.ones if self._root else 0
        return ones if b else len(self) - ones

    @property
    def chunk_count(self):
        return self._root.chunks if self._root else 0

    def height(self):
        return _height(self._root)

    def encoded_bits(self):
        """Bits of gamma-coded runs plus one first-bit flag per chunk."""
        return self._root.encoded if self._root else 0

    def size_in_bits(self):
        # encoded runs plus four counters and two child links per node
        return self.encoded_bits() + self.chunk_count * 6 * 64

    def chunks(self):
        return list(_chunks_from(self._root, 0)) if self._root else []

    def _locate(self, pos, inserting=False):
        """(chunk index, offset in chunk, chunk, bits before it, ones before it)."""
        node = self._root
        index = bits = ones = 0
        while True:
            left_bits = _size(node.left, 'bits')
            chunk_bits = node.chunk.bits
            if pos < left_bits or (inserting and pos == left_bits and node.left is not None):
                node = node.left
                continue
            if pos < left_bits + chunk_bits or (inserting and pos == left_bits + chunk_bits):
                index += _size(node.left, 'chunks')
                bits += left_bits
                ones += _size(node.left, 'ones')
                return index, pos - left_bits, node.chunk, bits, ones
            index += _size(node.left, 'chunks') + 1
            bits += left_bits + chunk_bits
            ones += _size(node.left, 'ones') + node.chunk.ones
            pos -= left_bits + chunk_bits
            node = node.right

    def access(self, pos):
        check_range(pos, len(self))
        _, local, chunk, _, _ = self._locate(pos)
        return chunk.access(local)

    def rank(self, b, pos):
        check_range(pos, len(self), inclusive=True)
        if pos == len(self):
            return self.count(b)
        _, local, chunk, _, ones = self._locate(pos)
        ones += chunk.rank(1, local)
        return ones if b else pos - ones

    def select(self, b, idx):
        check_range(idx, self.count(b), what='index')
        node = self._root
        base = 0
        while True:
            left = node.left
            left_count = (left.ones if b else left.bits - left.ones) if left else 0
            here = node.chunk.count(b)
            if idx < left_count:
                node = left
            elif idx < left_count + here:
                return base + _size(left, 'bits') + node.chunk.select(b, idx - left_count)
            else:
                idx -= left_count + here
                base += _size(left, 'bits') + node.chunk.bits
                node = node.right

    def insert(self, pos, b):
        check_range(pos, len(self), inclusive=True)
        b = 1 if b else 0
        if self._root is None:
            self._root = _Node(Chunk.from_runs(b, [1]))
            return
        index, local, chunk, _, _ = self._locate(pos, inserting=True)
        runs = chunk.decode()
        first = _insert_run(chunk.first, runs, local, b)
        self._store(index, first, runs)

    def append(self, b):
        self.insert(len(self), b)

    def delete(self, pos):
        """Remove the bit at pos and return it."""
        check_range(pos, len(self))
        index, local, chunk, _, _ = self._locate(pos)
        runs = chunk.decode()
        first, bit = _delete_run(chunk.first, runs, local)
        if not runs:
            self._root = _delete_at(self._root, index)
            return bit
        self._store(index, first, runs)
        return bit

    def _store(self, index, first, runs):
        chunk = Chunk.from_runs(first, runs)
        if chunk.encoded_bits < self.chunk_target // 2 and self._root.chunks > 1:
            self._merge(index, chunk)
            return
        pieces = _pieces(first, runs, self.chunk_target) if chunk.encoded_bits > 2 * self.chunk_target else [chunk]
        self._place(index, 1, pieces)
        if len(pieces) > 1:
            logger.debug("split chunk %d (%d encoded bits) into %d", index, chunk.encoded_bits, len(pieces))

    def _merge(self, index, chunk):
        if index + 1 < self._root.chunks:
            left_index, left, right = index, chunk, _chunk_at_index(self._root, index + 1)
        else:
            left_index, left, right = index - 1, _chunk_at_index(self._root, index - 1), chunk
        first, runs = _concat_runs(left.first, left.decode(), right.first, right.decode())
        self._place(left_index, 2, _pieces(first, runs, self.chunk_target))
        logger.debug("merged chunks %d and %d", left_index, left_index + 1)

    def _place(self, index, count, pieces):
        """Replace `count` chunks starting at `index` with `pieces`."""
        shared = min(count, len(pieces))
        for offset in range(shared):
            _replace_at(self._root, index + offset, pieces[offset])
        for _ in range(count - shared):
            self._root = _delete_at(self._root, index + shared)
        for offset in range(shared, len(pieces)):
            self._root = _insert_at(self._root, index + offset, pieces[offset])

    def iter_bits(self, start=0, stop=None):
        n = len(self)
        stop = n if stop is None else stop
        check_range(start, n, inclusive=True)
        check_range(stop, n, inclusive=True)
        if start >= stop:
            return
        index, local, _, base, _ = self._locate(start)
        for chunk in _chunks_from(self._root, index):
            yield from chunk.iter_bits(start - base, min(stop - base, chunk.bits))
            base += chunk.bits
            if base >= stop:
                return

    def read(self, pos, width):
        return sum(bit << i for i, bit in enumerate(self.iter_bits(pos, pos + width)))

    def to_bitstring(self):
        writer = BitWriter()
        for chunk in self.chunks():
            bit = chunk.first
            for run in chunk.decode():
                writer.write((1 << run) - 1 if bit else 0, run)
                bit ^= 1
        return writer.build()

    def to_bytes(self):
        return self.to_bitstring().to_bytes()

    def check_invariants(self):
        """Debug walk: aggregates, AVL balance, run alternation and chunk sizes."""
        chunks = self.chunks()
        for chunk in chunks:
            runs = chunk.decode()
            if not runs or min(runs) < 1 or sum(runs) != chunk.bits or len(runs) != chunk.runs:
                raise CorruptIndexError("chunk runs disagree with chunk totals")
            oversized = chunk.encoded_bits > 2 * self.chunk_target
            if oversized and _balanced_cut(runs, self.chunk_target // 2) is not None:
                raise CorruptIndexError(f"chunk of {chunk.encoded_bits} bits exceeds the split threshold")
            if len(chunks) > 1 and chunk.encoded_bits < self.chunk_target // 2:
                raise CorruptIndexError(f"chunk of {chunk.encoded_bits} bits is below the merge threshold")

        def walk(node):
            if node is None:
                return 0, 0, 0
            lh, lbits, lones = walk(node.left)
            rh, rbits, rones = walk(node.right)
            if abs(lh - rh) > 1:
                raise CorruptIndexError("AVL balance violated")
            if node.bits != lbits + rbits + node.chunk.bits or node.ones != lones + rones + node.chunk.ones:
                raise CorruptIndexError("subtree aggregates out of date")
            return 1 + max(lh, rh), node.bits, node.ones

        walk(self._root)
        return True
