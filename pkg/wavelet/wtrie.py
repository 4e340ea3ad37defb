"""
The Wavelet Trie: a sequence of strings indexed by a Patricia trie of
its distinct strings whose internal nodes carry a bitvector beta saying,
for every element routed through the node, which child it continues to.

Three variants share the node structure and the query code:

    static   StaticFID betas, built in one pass over the sequence
    append   OffsetFID over an append-only FID; supports append
    dynamic  DynamicFID betas; supports insert, delete and append

Byte strings are binarized so any multiset is prefix-free; raw mode
takes BitStrings (or '0'/'1' text) exactly as given.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import layout
from .abv import OffsetFID, new_append_fid
from .bits import (
    BitString, BitWriter, binarize, binarize_prefix, debinarize, debinarize_prefix, zero_order_entropy,
)
from .conf import resolve
from .dbv import DynamicFID
from .exceptions import CorruptIndexError, NotFoundError, OutOfRangeError, VariantError, check_range
from .ptrie import Match, PatriciaTrie, lt_bound
from .rrr import StaticFID

logger = logging.getLogger(__name__)

SYMBOL_BITS = 9


class Variant(enum.Enum):
    STATIC = 'static'
    APPEND = 'append'
    DYNAMIC = 'dynamic'

    @property
    def tag(self):
        return self.value[0].upper().encode()

    @classmethod
    def from_tag(cls, tag):
        for variant in cls:
            if variant.tag == tag:
                return variant
        raise CorruptIndexError(f"unknown variant tag {tag!r}")


@dataclass(frozen=True)
class SpaceReport:
    """Measured sizes next to the information-theoretic floor LB = LT + nH0."""
    n: int
    distinct: int
    h0: float
    nh0_bits: float
    lt_bits: int
    lb_bits: int
    label_bits: int
    edges: int
    records_bits: int
    trie_bits: int
    # labels plus a fixed word overhead per node, as held by the updatable trie
    pointer_trie_bits: int
    bitvector_bits: int
    total_bits: int
    h_tilde: float
    mean_binarized_length: float
    height: int

    @property
    def meets_floor(self):
        return self.total_bits >= self.lb_bits

    @property
    def average_height_bounded(self):
        """H0(S) <= h~ <= mean binarized length, with float slack."""
        eps = 1e-9
        return self.h0 <= self.h_tilde + eps and self.h_tilde <= self.mean_binarized_length + eps


class WaveletTrie:

    def __init__(self, variant=Variant.DYNAMIC, raw=False, append_kind=None, chunk_target=None):
        self.variant = Variant(variant)
        self.raw = raw
        self.append_kind = resolve(append_kind, 'APPEND_BITVECTOR') if self.variant is Variant.APPEND else None
        self.chunk_target = chunk_target
        self.trie = PatriciaTrie()
        self.n = 0

    @classmethod
    def build_static(cls, strings, raw=False):
        """
        Build the static variant. Distinct keys are sorted, which is the
        trie's leaf order, so every subtree owns a contiguous id range and
        each beta is a vectorized comparison against the first id of the
        1-subtree.
        """
        wt = cls(Variant.STATIC, raw)
        keys = [wt.key(s) for s in strings]
        if not keys:
            return wt
        distinct = sorted(set(keys))
        wt.trie = PatriciaTrie.from_sorted(distinct)
        ids = {key: i for i, key in enumerate(distinct)}
        sequence = np.fromiter((ids[key] for key in keys), dtype=np.int64, count=len(keys))
        leaves = wt.trie.leaf_counts()
        stack = [(wt.trie.root, 0, sequence)]
        while stack:
            node, lo, ids_here = stack.pop()
            if node.is_leaf:
                continue
            mid = lo + leaves[node.children[0]]
            goes_right = ids_here >= mid
            node.beta = StaticFID.build(BitString.from_bool_array(goes_right))
            stack.append((node.children[1], mid, ids_here[goes_right]))
            stack.append((node.children[0], lo, ids_here[~goes_right]))
        wt.n = len(keys)
        logger.info("built static wavelet trie: n=%d distinct=%d", wt.n, len(distinct))
        return wt

    @classmethod
    def from_sequence(cls, strings, variant=Variant.STATIC, raw=False, **options):
        variant = Variant(variant)
        if variant is Variant.STATIC:
            return cls.build_static(strings, raw)
        wt = cls(variant, raw, **options)
        for s in strings:
            wt.append(s)
        return wt

    @classmethod
    def from_bytes(cls, data):
        header, trie = layout.load(data)
        wt = cls(Variant.from_tag(header.variant_tag), header.raw)
        wt.trie = trie
        wt.n = header.n
        if trie.root is None and wt.n:
            raise CorruptIndexError(f"empty trie cannot hold {wt.n} elements")
        wt.check_invariants()
        return wt

    def to_bytes(self):
        if self.variant is Variant.APPEND:
            self.quiesce()
        return layout.dump(self.trie, self.variant.tag, self.raw, self.n)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"WaveletTrie({self.variant.value}, n={self.n}, raw={self.raw})"

    # Key handling

    def key(self, s):
        if self.raw:
            return s if isinstance(s, BitString) else BitString.from_str(s)
        return binarize(s)

    def prefix_key(self, p):
        if self.raw:
            return p if isinstance(p, BitString) else BitString.from_str(p)
        return binarize_prefix(p)

    def decode(self, bits):
        return bits if self.raw else debinarize(bits)

    def _decode_prefix(self, bits):
        return bits if self.raw else debinarize_prefix(bits)

    # Queries

    def _count_below(self, path):
        if path:
            parent, bit = path[-1]
            return parent.beta.count(bit)
        return self.n

    def access(self, pos):
        check_range(pos, self.n)
        node = self.trie.root
        out = BitWriter()
        while not node.is_leaf:
            out.extend(node.label)
            bit = node.beta.access(pos)
            pos = node.beta.rank(bit, pos)
            out.write(bit, 1)
            node = node.children[bit]
        out.extend(node.label)
        return self.decode(out.build())

    def rank(self, s, pos):
        """Occurrences of s in S[0, pos); 0 for strings not in the set."""
        check_range(pos, self.n, inclusive=True)
        key = self.key(s)
        node = self.trie.root
        consumed = 0
        while node is not None:
            label = node.label
            if key.common_prefix_length(label, consumed) < len(label):
                return 0
            consumed += len(label)
            if node.is_leaf:
                return pos if consumed == len(key) else 0
            if consumed == len(key):
                return 0
            bit = key[consumed]
            consumed += 1
            pos = node.beta.rank(bit, pos)
            node = node.children[bit]
        return 0

    def rank_prefix(self, p, pos):
        """Elements of S[0, pos) that start with p."""
        check_range(pos, self.n, inclusive=True)
        key = self.prefix_key(p)
        node = self.trie.root
        consumed = 0
        while node is not None:
            label = node.label
            common = key.common_prefix_length(label, consumed)
            if consumed + common == len(key):
                return pos
            if common < len(label) or node.is_leaf:
                return 0
            consumed += len(label)
            bit = key[consumed]
            consumed += 1
            pos = node.beta.rank(bit, pos)
            node = node.children[bit]
        return 0

    def _select_from(self, path, idx, what):
        total = self._count_below(path)
        if not 0 <= idx < total:
            raise NotFoundError(f"{what} has {total} occurrences; index {idx} requested")
        for node, bit in reversed(path):
            idx = node.beta.select(bit, idx)
        return idx

    def select(self, s, idx):
        """Position of the (idx+1)-th occurrence of s."""
        key = self.key(s)
        if self.trie.root is None:
            raise NotFoundError("select on an empty sequence")
        found = self.trie.lookup(key)
        if found.kind is not Match.LEAF:
            raise NotFoundError(f"{s!r} does not occur in the sequence")
        return self._select_from(found.path, idx, repr(s))

    def select_prefix(self, p, idx):
        """Position of the (idx+1)-th element starting with p."""
        key = self.prefix_key(p)
        if self.trie.root is None:
            raise NotFoundError("select on an empty sequence")
        found = self.trie.lookup(key)
        if found.kind is Match.MISMATCH:
            raise NotFoundError(f"no element starts with {p!r}")
        return self._select_from(found.path, idx, f"prefix {p!r}")

    # Updates

    def _constant_beta(self, bit, m):
        if self.variant is Variant.DYNAMIC:
            return DynamicFID.init(bit, m, self.chunk_target)
        return OffsetFID(new_append_fid(self.append_kind), m, bit)

    def _put(self, beta, pos, bit):
        if self.variant is Variant.APPEND:
            beta.append(bit)
        else:
            beta.insert(pos, bit)

    def _cascade(self, path, pos):
        """Insert the routing bits of a new element along path; return its position below."""
        for node, bit in path:
            self._put(node.beta, pos, bit)
            if self.variant is not Variant.APPEND:
                pos = node.beta.rank(bit, pos)
        return pos

    def _insert_key(self, key, pos):
        if self.trie.root is None:
            self.trie.insert(key)
            self.n = 1
            return
        found = self.trie.lookup(key)
        if found.kind is Match.LEAF:
            self._cascade(found.path, pos)
        else:
            m = self._count_below(found.path)
            result = self.trie.insert(key)
            below = self._cascade(result.path, pos)
            beta = self._constant_beta(1 - result.bit, m)
            self._put(beta, below, result.bit)
            result.split.beta = beta
        self.n += 1

    def append(self, s):
        if self.variant is Variant.STATIC:
            raise VariantError("the static variant does not support append")
        self._insert_key(self.key(s), self.n)

    def extend(self, strings):
        for s in strings:
            self.append(s)

    def insert(self, s, pos):
        """Insert s before position pos."""
        if self.variant is not Variant.DYNAMIC:
            raise VariantError(f"the {self.variant.value} variant does not support insert")
        check_range(pos, self.n, inclusive=True)
        self._insert_key(self.key(s), pos)

    def delete(self, pos):
        """Remove S[pos]; the last occurrence of a string also leaves the trie."""
        if self.variant is not Variant.DYNAMIC:
            raise VariantError(f"the {self.variant.value} variant does not support delete")
        check_range(pos, self.n)
        node = self.trie.root
        path = []
        positions = []
        while not node.is_leaf:
            bit = node.beta.access(pos)
            path.append((node, bit))
            positions.append(pos)
            pos = node.beta.rank(bit, pos)
            node = node.children[bit]
        for (parent, bit), here in zip(path, positions):
            parent.beta.delete(here)
        if not path:
            if self.n == 1:
                self.trie.remove_leaf(path)
        else:
            parent, bit = path[-1]
            if parent.beta.count(bit) == 0:
                self.trie.remove_leaf(path)
        self.n -= 1

    def quiesce(self):
        """Finish every in-flight rebuild of the append-only bitvectors."""
        for node, _ in self.trie.walk():
            if isinstance(node.beta, OffsetFID):
                node.beta.finish_pending()

    # Range analytics

    def _check_interval(self, l, r):
        check_range(r, self.n, what='range end', inclusive=True)
        if not 0 <= l <= r:
            raise OutOfRangeError(f"range start {l} outside [0, {r}]")

    def _walk_range(self, l, r, threshold=1, limit=None):
        """
        Depth-first (0 first) over nodes whose part of [l, r) holds at
        least `threshold` elements; yields (path bits, count) at leaves or
        once the path reaches `limit` bits.
        """
        if self.trie.root is None or l >= r:
            return
        stack = [(self.trie.root, l, r, BitString())]
        while stack:
            node, lo, hi, prefix = stack.pop()
            if hi - lo < threshold:
                continue
            path = prefix + node.label
            if limit is not None and len(path) >= limit:
                yield path[:limit], hi - lo
                continue
            if node.is_leaf:
                yield path, hi - lo
                continue
            lo0 = node.beta.rank(0, lo)
            hi0 = node.beta.rank(0, hi)
            stack.append((node.children[1], lo - lo0, hi - hi0, path + BitString(1, 1)))
            stack.append((node.children[0], lo0, hi0, path + BitString(0, 1)))

    def _prefix_limit(self, depth):
        return None if depth is None else depth if self.raw else SYMBOL_BITS * depth

    def _decode_walked(self, bits, limit):
        return self.decode(bits) if limit is None else self._decode_prefix(bits)

    def range_distinct(self, l, r, depth=None):
        """
        Distinct values of S[l, r) with their counts, in sorted order.
        With `depth`, values are cut to their first `depth` symbols (bits
        in raw mode) and counted per distinct prefix.
        """
        self._check_interval(l, r)
        limit = self._prefix_limit(depth)
        return [(self._decode_walked(bits, limit), count) for bits, count in self._walk_range(l, r, limit=limit)]

    def range_majority(self, l, r, depth=None):
        """
        The value occurring more than (r - l) / 2 times in S[l, r), or None.
        With `depth`, the most common prefix of `depth` symbols instead.
        """
        self._check_interval(l, r)
        if l >= r:
            raise OutOfRangeError(f"majority needs a non-empty range, got [{l}, {r})")
        limit = self._prefix_limit(depth)
        total = r - l
        node = self.trie.root
        path = BitString()
        while True:
            path = path + node.label
            if limit is not None and len(path) >= limit:
                return self._decode_prefix(path[:limit])
            if node.is_leaf:
                return self._decode_walked(path, limit)
            lo0 = node.beta.rank(0, l)
            hi0 = node.beta.rank(0, r)
            zeros = hi0 - lo0
            # counts are compared against the whole query range, not the narrowed one
            if 2 * zeros > total:
                bit, l, r = 0, lo0, hi0
            elif 2 * (r - l - zeros) > total:
                bit, l, r = 1, l - lo0, r - hi0
            else:
                return None
            path = path + BitString(bit, 1)
            node = node.children[bit]

    def range_threshold(self, l, r, threshold, depth=None):
        """
        Values occurring at least `threshold` times in S[l, r), most
        frequent first. `depth` groups them by prefix as in range_distinct.
        """
        self._check_interval(l, r)
        if threshold < 1:
            raise OutOfRangeError(f"threshold must be at least 1, got {threshold}")
        limit = self._prefix_limit(depth)
        found = [(self._decode_walked(bits, limit), count) for bits, count in self._walk_range(l, r, threshold, limit)]
        return sorted(found, key=lambda item: (-item[1], item[0]))

    def range_iter(self, l=0, r=None):
        r = self.n if r is None else r
        self._check_interval(l, r)
        return RangeIterator(self, l, r)

    def __iter__(self):
        return self.range_iter()

    # Shape and space

    def height(self):
        return self.trie.height()

    def _leaf_statistics(self):
        """(multiplicity, binarized length) per leaf and the total beta length."""
        stats = []
        beta_bits = 0
        if self.trie.root is None:
            return stats, beta_bits
        stack = [(self.trie.root, self.n, 0)]
        while stack:
            node, count, depth = stack.pop()
            depth += len(node.label)
            if node.is_leaf:
                stats.append((count, depth))
                continue
            beta_bits += len(node.beta)
            stack.append((node.children[0], node.beta.count(0), depth + 1))
            stack.append((node.children[1], node.beta.count(1), depth + 1))
        return stats, beta_bits

    def space_report(self):
        stats, beta_bits = self._leaf_statistics()
        measure = self.trie.measure()
        sizes = layout.measure(self.trie)
        if self.n:
            h0 = zero_order_entropy([count for count, _ in stats], self.n)
            h_tilde = beta_bits / self.n
            mean_length = sum(count * length for count, length in stats) / self.n
        else:
            h0 = h_tilde = mean_length = 0.0
        nh0 = self.n * h0
        lt = lt_bound(measure.label_bits, measure.edges) if measure.nodes else 0
        return SpaceReport(
            n=self.n,
            distinct=measure.leaves,
            h0=h0,
            nh0_bits=nh0,
            lt_bits=lt,
            lb_bits=lt + math.ceil(nh0 - 1e-9),
            label_bits=measure.label_bits,
            edges=measure.edges,
            records_bits=sizes.records_bits,
            trie_bits=sizes.trie_bits,
            pointer_trie_bits=measure.label_bits + measure.overhead_bits,
            bitvector_bits=sizes.bitvector_bits,
            total_bits=sizes.total_bits,
            h_tilde=h_tilde,
            mean_binarized_length=mean_length,
            height=self.trie.height(),
        )

    def check_invariants(self):
        """
        Debug walk: every beta is as long as the number of elements routed
        through its node, splits them between both children, and no beta
        is constant.
        """
        if self.trie.root is None:
            if self.n:
                raise CorruptIndexError(f"empty trie but n={self.n}")
            return True
        stack = [(self.trie.root, self.n)]
        while stack:
            node, expected = stack.pop()
            if expected < 1:
                raise CorruptIndexError("a node is reached by no element")
            if node.is_leaf:
                continue
            if len(node.beta) != expected:
                raise CorruptIndexError(f"bitvector holds {len(node.beta)} bits, {expected} elements pass")
            zeros, ones = node.beta.count(0), node.beta.count(1)
            if not zeros or not ones:
                raise CorruptIndexError("constant bitvector at an internal node")
            stack.append((node.children[0], zeros))
            stack.append((node.children[1], ones))
        return True


class RangeIterator:
    """
    Streams S[l], ..., S[r-1]. Each node gets one bit cursor, opened with
    a single rank on its parent the first time an element reaches it.
    """

    def __init__(self, wt, l, r):
        self._wt = wt
        self._pos = l
        self._stop = r
        self._cursors = {}
        self._starts = {}
        self._decoded = {}
        self.rank_calls = 0
        if wt.trie.root is not None:
            self._starts[wt.trie.root] = l

    @property
    def nodes_touched(self):
        return len(self._starts)

    def __iter__(self):
        return self

    def _cursor(self, node):
        cursor = self._cursors.get(node)
        if cursor is None:
            cursor = node.beta.iter_bits(self._starts[node])
            self._cursors[node] = cursor
        return cursor

    def __next__(self):
        if self._pos >= self._stop:
            raise StopIteration
        node = self._wt.trie.root
        steps = []
        while not node.is_leaf:
            bit = next(self._cursor(node))
            child = node.children[bit]
            if child not in self._starts:
                self._starts[child] = node.beta.rank(bit, self._starts[node])
                self.rank_calls += 1
            steps.append((node, bit))
            node = child
        self._pos += 1
        value = self._decoded.get(node)
        if value is None:
            out = BitWriter()
            for inner, bit in steps:
                out.extend(inner.label)
                out.write(bit, 1)
            out.extend(node.label)
            value = self._wt.decode(out.build())
            self._decoded[node] = value
        return value
