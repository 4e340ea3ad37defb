"""
Dynamic Wavelet Tree over integers in [0, u), balanced with high
probability by routing every value through the invertible hash
h(x) = a * x mod 2^k (a odd) before storing it in a dynamic raw-mode
Wavelet Trie. Values are kept as k-bit strings written LSB first, so
the trie branches on low-order bits of a * x.

Prefix queries are not offered: prefixes of hashed values carry no
meaning for the caller.
"""

import logging
import random

from .bits import BitString, BlobReader, pack_blob, pack_u64
from .conf import resolve
from .exceptions import CorruptIndexError, OutOfRangeError
from .wtrie import Variant, WaveletTrie

logger = logging.getLogger(__name__)

MAGIC = b'HWT1'
SEED_BITS = 63


def random_odd(bits, rng):
    x = rng.getrandbits(bits)
    while not x & 1:
        x = rng.getrandbits(bits)
    return x


def inverse_mod_power_of_two(a, k):
    """a^-1 mod 2^k by Newton iteration; every step doubles the correct low bits."""
    if not a & 1:
        raise ValueError(f"{a} has no inverse modulo 2^{k}")
    mask = (1 << k) - 1
    inverse = a  # correct modulo 8 for any odd a
    correct = 3
    while correct < k:
        inverse = (inverse * (2 - a * inverse)) & mask
        correct *= 2
    inverse &= mask
    assert (a * inverse) & mask == 1 & mask
    return inverse


class HashedWaveletTree:

    def __init__(self, universe, seed=None, multiplier=None):
        if universe < 1:
            raise ValueError("universe must hold at least one value")
        self.universe = universe
        self.k = max(1, (universe - 1).bit_length())
        self._mask = (1 << self.k) - 1
        if multiplier is None:
            seed = resolve(seed, 'HASHWT_SEED')
            if seed is None:
                seed = random.SystemRandom().getrandbits(SEED_BITS)
            multiplier = random_odd(self.k, random.Random(seed))
        elif not multiplier & 1 or not 0 < multiplier <= self._mask:
            raise ValueError(f"multiplier must be odd and in [1, 2^{self.k}), got {multiplier}")
        self.seed = seed
        self.a = multiplier
        self.a_inv = inverse_mod_power_of_two(multiplier, self.k)
        self.inner = WaveletTrie(Variant.DYNAMIC, raw=True)
        logger.debug("hashed wavelet tree: k=%d a=%d seed=%s", self.k, self.a, seed)

    def __len__(self):
        return len(self.inner)

    def __repr__(self):
        return f"HashedWaveletTree(universe={self.universe}, n={len(self)}, a={self.a})"

    def hash(self, x):
        if not 0 <= x <= self._mask:
            raise OutOfRangeError(f"value {x} outside [0, 2^{self.k})")
        return BitString((self.a * x) & self._mask, self.k)

    def unhash(self, bits):
        if len(bits) != self.k:
            raise ValueError(f"expected a {self.k}-bit string, got {len(bits)} bits")
        return (self.a_inv * bits.value) & self._mask

    def _key(self, x):
        if not 0 <= x < self.universe:
            raise OutOfRangeError(f"value {x} outside the universe [0, {self.universe})")
        return self.hash(x)

    def access(self, pos):
        return self.unhash(self.inner.access(pos))

    def rank(self, x, pos):
        return self.inner.rank(self._key(x), pos)

    def select(self, x, idx):
        return self.inner.select(self._key(x), idx)

    def insert(self, x, pos):
        self.inner.insert(self._key(x), pos)

    def append(self, x):
        self.inner.append(self._key(x))

    def delete(self, pos):
        self.inner.delete(pos)

    def __iter__(self):
        return (self.unhash(bits) for bits in self.inner)

    def measured_height(self):
        return self.inner.height()

    def to_bytes(self):
        seeded = self.seed is not None
        return b''.join([
            MAGIC,
            pack_u64(self.universe, self.k, self.a, self.seed if seeded else 0),
            bytes([seeded]),
            pack_blob(self.inner.to_bytes()),
        ])

    @classmethod
    def from_bytes(cls, data):
        reader = BlobReader(data)
        reader.magic(MAGIC)
        universe, k, a, seed = (reader.u64() for _ in range(4))
        seeded = reader.u8()
        if universe < 1 or k != max(1, (universe - 1).bit_length()):
            raise CorruptIndexError(f"bit width {k} does not match universe {universe}")
        if not a & 1 or a >> k:
            raise CorruptIndexError(f"invalid multiplier {a} for {k}-bit values")
        tree = cls(universe, multiplier=a)
        tree.seed = seed if seeded else None
        inner = WaveletTrie.from_bytes(reader.blob())
        reader.expect_end()
        if inner.variant is not Variant.DYNAMIC or not inner.raw:
            raise CorruptIndexError("hashed tree must wrap a dynamic raw-mode index")
        if any(len(s) != k for s in inner.trie.strings()):
            raise CorruptIndexError(f"stored keys are not {k} bits long")
        tree.inner = inner
        return tree
