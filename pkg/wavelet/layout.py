"""
Depth-first static layout of a Wavelet Trie: the index file body and
the basis of space accounting.

    header    "WTRI", u32 version, variant tag, raw flag, u64 n
    records   u64 node count, then per node in preorder (0-child first)
              a kind byte and the u64 preorder index of its 1-child
    labels    label stream L (all node labels concatenated in preorder)
              and a delimiter StaticFID of |L| + k bits: each label as
              0s followed by a single 1
    betas     per internal node in preorder: kind tag and a sized blob
"""

import logging
import struct
from dataclasses import dataclass

from .abv import OffsetFID
from .bits import BitWriter, BlobReader, pack_blob, pack_u64
from .dbv import DynamicFID
from .exceptions import CorruptIndexError
from .ptrie import PatriciaNode, PatriciaTrie
from .rrr import StaticFID

logger = logging.getLogger(__name__)

MAGIC = b'WTRI'
VERSION = 1

_HEADER = struct.Struct('<4sIcBQ')
HEADER_SIZE = _HEADER.size

LEAF, INTERNAL = 0, 1
RECORD_BITS = 8 + 64

BETA_TAGS = {StaticFID: b'R', OffsetFID: b'O', DynamicFID: b'D'}
# Bitvector kind each variant stores at its internal nodes.
VARIANT_BETA = {b'S': b'R', b'A': b'O', b'D': b'D'}


@dataclass(frozen=True)
class Header:
    version: int
    variant_tag: bytes
    raw: bool
    n: int

    def pack(self):
        return _HEADER.pack(MAGIC, self.version, self.variant_tag, int(self.raw), self.n)


def read_header(data):
    """Validate and decode the fixed-size header at the start of `data`."""
    if len(data) < HEADER_SIZE:
        raise CorruptIndexError("index shorter than its header")
    magic, version, tag, raw, n = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptIndexError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise CorruptIndexError(f"unsupported index version {version}")
    if tag not in VARIANT_BETA:
        raise CorruptIndexError(f"unknown variant tag {tag!r}")
    if raw > 1:
        raise CorruptIndexError(f"raw flag {raw} is not a boolean")
    return Header(version, tag, bool(raw), n)


@dataclass(frozen=True)
class LayoutSizes:
    records_bits: int
    label_bits: int
    delimiter_bits: int
    bitvector_bits: int

    @property
    def trie_bits(self):
        return self.label_bits + self.delimiter_bits

    @property
    def total_bits(self):
        return self.records_bits + self.trie_bits + self.bitvector_bits


def _label_streams(nodes):
    labels = BitWriter()
    delimiters = BitWriter()
    for node in nodes:
        labels.extend(node.label)
        delimiters.write(0, len(node.label))
        delimiters.write(1, 1)
    return labels.build(), StaticFID.build(delimiters.build())


def measure(trie):
    nodes = trie.nodes()
    if not nodes:
        return LayoutSizes(0, 0, 0, 0)
    labels, delimiter = _label_streams(nodes)
    betas = sum(node.beta.size_in_bits() for node in nodes if not node.is_leaf)
    return LayoutSizes(
        records_bits=64 + RECORD_BITS * len(nodes),
        label_bits=len(labels),
        delimiter_bits=delimiter.size_in_bits(),
        bitvector_bits=betas,
    )


def dump(trie, variant_tag, raw, n):
    nodes = trie.nodes()
    index = {node: i for i, node in enumerate(nodes)}
    out = [Header(VERSION, variant_tag, raw, n).pack(), pack_u64(len(nodes))]
    for node in nodes:
        if node.is_leaf:
            out.append(bytes([LEAF]) + pack_u64(0))
        else:
            out.append(bytes([INTERNAL]) + pack_u64(index[node.children[1]]))
    labels, delimiter = _label_streams(nodes)
    out.append(labels.to_bytes())
    out.append(delimiter.to_bytes())
    for node in nodes:
        if not node.is_leaf:
            out.append(BETA_TAGS[type(node.beta)] + pack_blob(node.beta.to_bytes()))
    return b''.join(out)


def _decode_beta(tag, blob):
    reader = BlobReader(blob)
    if tag == b'R':
        beta = StaticFID.read_from(reader)
    elif tag == b'O':
        beta = OffsetFID.read_from(reader)
    elif tag == b'D':
        return DynamicFID.from_bytes(blob)
    else:
        raise CorruptIndexError(f"unknown bitvector tag {tag!r}")
    reader.expect_end()
    return beta


def load(data):
    """Decode an index image into (Header, PatriciaTrie with betas attached)."""
    header = read_header(data)
    reader = BlobReader(data, HEADER_SIZE)
    k = reader.u64()
    if k > len(data):
        raise CorruptIndexError(f"node count {k} exceeds the file size")
    records = []
    for i in range(k):
        kind = reader.u8()
        one_child = reader.u64()
        if kind == INTERNAL and not i + 1 < one_child < k:
            raise CorruptIndexError(f"node {i} points at invalid 1-child {one_child}")
        if kind not in (LEAF, INTERNAL):
            raise CorruptIndexError(f"node {i} has unknown kind {kind}")
        records.append((kind, one_child))
    labels = reader.bitstring()
    delimiter = StaticFID.read_from(reader)
    if len(delimiter) != len(labels) + k or delimiter.count(1) != k:
        raise CorruptIndexError("label delimiter disagrees with the label stream")

    nodes = []
    start = 0
    for i, (kind, _) in enumerate(records):
        end = delimiter.select(1, i)
        label = labels[start - i:end - i]
        nodes.append(PatriciaNode(label, [None, None] if kind == INTERNAL else None))
        start = end + 1

    expected = VARIANT_BETA[header.variant_tag]
    for i, (kind, one_child) in enumerate(records):
        if kind == LEAF:
            continue
        node = nodes[i]
        node.children[0] = nodes[i + 1]
        node.children[1] = nodes[one_child]
        tag = reader.take(1)
        if tag != expected:
            raise CorruptIndexError(f"bitvector tag {tag!r} does not belong to variant {header.variant_tag!r}")
        node.beta = _decode_beta(tag, reader.blob())
    reader.expect_end()

    trie = PatriciaTrie(nodes[0] if nodes else None)
    if sum(1 for _ in trie.walk()) != k:
        raise CorruptIndexError("node records do not form a single tree")
    logger.debug("decoded %d trie nodes, %d label bits", k, len(labels))
    return header, trie
