"""
Binary Patricia trie over prefix-free BitStrings.

Each node owns its label slice. Internal nodes always have two
children; a node's label is the longest common prefix of the strings in
its subtree once the bits consumed above it are removed. The `beta`
slot is unused by the trie itself and holds the node bitvector when the
trie backs a Wavelet Trie.
"""

import enum
import logging
from bisect import bisect_left
from dataclasses import dataclass, field

from .bits import BitString, binomial_bits
from .exceptions import DuplicateStringError, NotFoundError, PrefixFreeError

logger = logging.getLogger(__name__)

# Two child links, a label reference and a label length per node.
NODE_OVERHEAD_BITS = 4 * 64

_BIT = (BitString(0, 1), BitString(1, 1))


class PatriciaNode:
    __slots__ = ('label', 'children', 'beta')

    def __init__(self, label, children=None):
        self.label = label
        self.children = children
        self.beta = None

    @property
    def is_leaf(self):
        return self.children is None

    def __repr__(self):
        kind = 'leaf' if self.is_leaf else 'internal'
        return f"PatriciaNode({kind}, label='{self.label}')"


class Match(enum.Enum):
    LEAF = 'leaf'
    PREFIX = 'prefix'
    MISMATCH = 'mismatch'


@dataclass
class LookupResult:
    """
    Outcome of a traversal. `path` lists the (internal node, branch bit)
    pairs above `node`; `depth` is the number of query bits consumed
    before node.label and `matched` how many label bits matched.
    """
    kind: Match
    node: PatriciaNode
    path: list = field(default_factory=list)
    depth: int = 0
    matched: int = 0


@dataclass
class InsertResult:
    leaf: PatriciaNode
    split: PatriciaNode = None
    sibling: PatriciaNode = None
    bit: int = None
    path: list = field(default_factory=list)


@dataclass
class Measure:
    label_bits: int
    edges: int
    nodes: int
    leaves: int

    @property
    def overhead_bits(self):
        return self.nodes * NODE_OVERHEAD_BITS


def lt_bound(label_bits, edges):
    """LT = |L| + e + B(e, |L| + e)."""
    return label_bits + edges + binomial_bits(edges, label_bits + edges)


class PatriciaTrie:

    def __init__(self, root=None):
        self.root = root

    @classmethod
    def from_strings(cls, strings):
        """Canonical trie of a set of BitStrings."""
        return cls.from_sorted(sorted(set(strings)))

    @classmethod
    def from_sorted(cls, keys):
        """Build from distinct BitStrings already in sorted order."""
        trie = cls()
        if not keys:
            return trie
        # (lo, hi, depth, parent, branch bit)
        stack = [(0, len(keys), 0, None, None)]
        while stack:
            lo, hi, depth, parent, bit = stack.pop()
            first, last = keys[lo], keys[hi - 1]
            if hi - lo == 1:
                node = PatriciaNode(first[depth:])
            else:
                lcp = first.common_prefix_length(last)
                if lcp == len(first):
                    raise PrefixFreeError(f"{first} is a prefix of {last}")
                node = PatriciaNode(first[depth:lcp], [None, None])
                mid = bisect_left(keys, 1, lo, hi, key=lambda k: k[lcp])
                stack.append((mid, hi, lcp + 1, node, 1))
                stack.append((lo, mid, lcp + 1, node, 0))
            if parent is None:
                trie.root = node
            else:
                parent.children[bit] = node
        return trie

    def __bool__(self):
        return self.root is not None

    def lookup(self, s):
        """
        Follow s from the root. LEAF when s is stored, PREFIX when s runs
        out inside or at the end of a node label (every string below that
        node starts with s), MISMATCH otherwise.
        """
        if self.root is None:
            raise NotFoundError("lookup in an empty trie")
        node = self.root
        pos = 0
        path = []
        while True:
            label = node.label
            common = s.common_prefix_length(label, pos)
            if pos + common == len(s):
                kind = Match.LEAF if node.is_leaf and common == len(label) else Match.PREFIX
                return LookupResult(kind, node, path, pos, common)
            if common < len(label) or node.is_leaf:
                return LookupResult(Match.MISMATCH, node, path, pos, common)
            pos += len(label)
            bit = s[pos]
            path.append((node, bit))
            pos += 1
            node = node.children[bit]

    def __contains__(self, s):
        return self.root is not None and self.lookup(s).kind is Match.LEAF

    def insert(self, s):
        """Add s, splitting the node where the traversal mismatches."""
        if self.root is None:
            self.root = PatriciaNode(s)
            return InsertResult(leaf=self.root)
        found = self.lookup(s)
        if found.kind is Match.LEAF:
            raise DuplicateStringError(f"{s} is already stored")
        if found.kind is Match.PREFIX or found.matched == len(found.node.label):
            raise PrefixFreeError(f"{s} breaks prefix-freeness of the stored set")
        node, k = found.node, found.matched
        pos = found.depth + k
        bit = s[pos]
        leaf = PatriciaNode(s[pos + 1:])
        split = PatriciaNode(node.label[:k], [None, None])
        split.children[bit] = leaf
        split.children[1 - bit] = node
        node.label = node.label[k + 1:]
        self._relink(found.path, split)
        logger.debug("split node at depth %d (label bit %d)", pos, k)
        return InsertResult(leaf=leaf, split=split, sibling=node, bit=bit, path=found.path)

    def delete(self, s):
        found = self.lookup(s)
        if found.kind is not Match.LEAF:
            raise NotFoundError(f"{s} is not stored")
        return self.remove_leaf(found.path)

    def remove_leaf(self, path):
        """
        Drop the leaf reached through `path` and merge its parent with the
        sibling, whose label becomes parent label + branch bit + own label.
        Returns the surviving sibling, or None if the trie became empty.
        """
        if not path:
            self.root = None
            return None
        parent, bit = path[-1]
        sibling = parent.children[1 - bit]
        sibling.label = parent.label + _BIT[1 - bit] + sibling.label
        self._relink(path[:-1], sibling)
        logger.debug("merged node into sibling (label now %d bits)", len(sibling.label))
        return sibling

    def _relink(self, path, node):
        if path:
            parent, bit = path[-1]
            parent.children[bit] = node
        else:
            self.root = node

    def walk(self):
        """Preorder (0-child first) iteration of (node, bits consumed above its label)."""
        if self.root is None:
            return
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            if not node.is_leaf:
                below = depth + len(node.label) + 1
                stack.append((node.children[1], below))
                stack.append((node.children[0], below))

    def nodes(self):
        return [node for node, _ in self.walk()]

    def leaves_with_strings(self):
        """(leaf, full string) pairs in sorted order."""
        if self.root is None:
            return
        stack = [(self.root, BitString())]
        while stack:
            node, prefix = stack.pop()
            full = prefix + node.label
            if node.is_leaf:
                yield node, full
            else:
                stack.append((node.children[1], full + _BIT[1]))
                stack.append((node.children[0], full + _BIT[0]))

    def strings(self):
        return [s for _, s in self.leaves_with_strings()]

    def structure(self):
        """Preorder signature of shape and labels; equal iff tries are identical."""
        return tuple(('leaf' if node.is_leaf else 'internal', str(node.label)) for node, _ in self.walk())

    def height(self):
        """Largest number of internal nodes on a root-to-leaf path."""
        best = 0
        if self.root is None:
            return 0
        stack = [(self.root, 0)]
        while stack:
            node, internal = stack.pop()
            if node.is_leaf:
                best = max(best, internal)
            else:
                stack.extend((child, internal + 1) for child in node.children)
        return best

    def leaf_counts(self):
        """Number of leaves under every node, keyed by node."""
        counts = {}
        for node in reversed(self.nodes()):
            counts[node] = 1 if node.is_leaf else counts[node.children[0]] + counts[node.children[1]]
        return counts

    def measure(self):
        label_bits = nodes = leaves = 0
        for node, _ in self.walk():
            nodes += 1
            label_bits += len(node.label)
            leaves += node.is_leaf
        return Measure(label_bits=label_bits, edges=max(0, 2 * (leaves - 1)), nodes=nodes, leaves=leaves)

    def lt_bits(self):
        measure = self.measure()
        return lt_bound(measure.label_bits, measure.edges)
