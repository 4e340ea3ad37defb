import random

from django.test import SimpleTestCase, override_settings, tag

from wavelet.abv import (
    AppendFID, ConcatProxy, OffsetFID, SegmentStack, SmallBV, append_fid_from_bytes, from_bits, new_append_fid,
)
from wavelet.bits import BitString, BlobReader, bits_of
from wavelet.exceptions import BuildStateError, CapacityError, CorruptIndexError, OutOfRangeError
from wavelet.rrr import StaticFID


def assert_same_queries(test, fid, bits, samples=200, seed=0):
    rng = random.Random(seed)
    n = len(bits)
    test.assertEqual(len(fid), n)
    if not n:
        return
    prefix_ones = [0]
    for b in bits:
        prefix_ones.append(prefix_ones[-1] + b)
    ones = [i for i, b in enumerate(bits) if b]
    zeros = [i for i, b in enumerate(bits) if not b]
    for _ in range(samples):
        pos = rng.randrange(n)
        test.assertEqual(fid.access(pos), bits[pos])
        cut = rng.randint(0, n)
        test.assertEqual(fid.rank(1, cut), prefix_ones[cut])
        test.assertEqual(fid.rank(0, cut), cut - prefix_ones[cut])
        if ones:
            i = rng.randrange(len(ones))
            test.assertEqual(fid.select(1, i), ones[i])
        if zeros:
            i = rng.randrange(len(zeros))
            test.assertEqual(fid.select(0, i), zeros[i])
    if ones:
        test.assertEqual(fid.select(1, len(ones) - 1), ones[-1])
    if zeros:
        test.assertEqual(fid.select(0, len(zeros) - 1), zeros[-1])


class SmallBVTests(SimpleTestCase):

    def test_queries_and_capacity(self):
        bits = [1, 0, 0, 1, 1] * 30
        small = SmallBV.from_bitstring(bits_of(bits), capacity=150)
        assert_same_queries(self, small, bits)
        self.assertTrue(small.full)
        self.assertEqual(small.last_one, 149)
        self.assertEqual(small.last_zero, 147)
        with self.assertRaises(CapacityError):
            small.append(1)
        self.assertEqual(small.to_bitstring(), bits_of(bits))

    def test_capacity_is_bounded(self):
        with self.assertRaises(CapacityError):
            SmallBV(capacity=(1 << 16) + 1)


class ConcatProxyTests(SimpleTestCase):

    def test_answers_over_parts(self):
        rng = random.Random(4)
        a = [rng.getrandbits(1) for _ in range(130)]
        b = [rng.getrandbits(1) for _ in range(77)]
        proxy = ConcatProxy([StaticFID.build(bits_of(a)), SmallBV.from_bitstring(BitString()),
                             SmallBV.from_bitstring(bits_of(b))])
        assert_same_queries(self, proxy, a + b)
        self.assertEqual(proxy.read(120, 20), sum(bit << i for i, bit in enumerate((a + b)[120:140])))
        self.assertEqual(list(proxy.iter_bits(125, 140)), (a + b)[125:140])


class SegmentStackTests(SimpleTestCase):

    def make(self):
        return SegmentStack(min_r=64, r_factor=4, budget=2)

    def test_binary_counter_shape(self):
        stack = self.make()
        for i in range(320):
            stack.append(i % 3 == 0)
            stack.check_shape()
        self.assertEqual(stack.segment_sizes(), {4: 256, 2: 64})
        stack.append(1)
        self.assertEqual(stack.segment_sizes(), {4: 256, 2: 64, 1: 1})

    def test_queries_during_pending_rebuilds(self):
        rng = random.Random(8)
        stack = self.make()
        bits = []
        for step in range(3000):
            b = rng.getrandbits(1)
            stack.append(b)
            bits.append(b)
            if step % 500 == 499:
                assert_same_queries(self, stack, bits, samples=50, seed=step)
        self.assertLessEqual(stack.max_steps_per_append, 2)
        self.assertEqual(list(stack.iter_bits()), bits)

    def test_work_per_append_is_constant(self):
        stack = self.make()
        for i in range(20000):
            stack.append(i & 1)
        self.assertEqual(stack.max_steps_per_append, 2)

    @tag('acceptance')
    def test_million_appends(self):
        rng = random.Random(17)
        stack = self.make()
        bits = [1 if rng.random() < 0.2 else 0 for _ in range(1_000_000)]
        for b in bits:
            stack.append(b)
        stack.check_shape()
        self.assertEqual(stack.max_steps_per_append, 2)
        assert_same_queries(self, stack, bits, samples=300)

    def test_serialization_requires_quiescence(self):
        stack = self.make()
        for i in range(64 * 7):
            stack.append(i % 5 == 1)
        if not stack.quiescent:
            with self.assertRaises(BuildStateError):
                stack.to_bytes()
        stack.finish_pending()
        self.assertTrue(stack.quiescent)
        copy = append_fid_from_bytes(stack.to_bytes())
        self.assertIsInstance(copy, SegmentStack)
        self.assertEqual(list(copy.iter_bits()), list(stack.iter_bits()))
        self.assertEqual(copy.segment_sizes(), stack.segment_sizes())


class AppendFIDTests(SimpleTestCase):

    def make(self, **kwargs):
        options = {'block_length': 64, 'max_block_length': 256, 'budget': 2}
        options.update(kwargs)
        return AppendFID(**options)

    def test_queries_while_sealing_and_merging(self):
        rng = random.Random(21)
        fid = self.make()
        bits = []
        for step in range(10000):
            b = 1 if rng.random() < 0.3 else 0
            fid.append(b)
            bits.append(b)
            if step % 1000 == 999:
                assert_same_queries(self, fid, bits, samples=40, seed=step)
        self.assertEqual(fid.block_length, 128)
        self.assertLessEqual(fid.max_steps_per_append, 2)
        self.assertLessEqual(fid.max_appends_to_complete, 2)
        fid.finish_pending()
        self.assertTrue(fid.quiescent)
        self.assertEqual(set(fid.block_lengths()), {128})
        self.assertEqual(fid.tail_length, 10000 - 128 * fid.block_count)
        self.assertLess(fid.tail_length, 128)
        assert_same_queries(self, fid, bits, samples=100)

    @tag('acceptance')
    def test_million_appends(self):
        rng = random.Random(19)
        fid = self.make(block_length=64, max_block_length=1024)
        bits = [1 if rng.random() < 0.3 else 0 for _ in range(1_000_000)]
        with self.assertNoLogs('wavelet.abv', 'WARNING'):
            for b in bits:
                fid.append(b)
        # 64 -> 1024 once n passes 1024 ** 2 / 4
        self.assertEqual(fid.block_length, 1024)
        self.assertLessEqual(fid.max_steps_per_append, 2)
        self.assertLessEqual(fid.max_appends_to_complete, 1024 // 63 // 2 + 2)
        assert_same_queries(self, fid, bits, samples=300)
        fid.finish_pending()
        self.assertTrue(fid.quiescent)
        self.assertEqual(max(fid.block_lengths()), 1024)
        self.assertEqual(sum(fid.block_lengths()) + fid.tail_length, len(bits))

    def test_growth_merges_pairs_and_keeps_an_odd_block(self):
        fid = self.make(block_length=64, max_block_length=128)
        fid.extend([1, 0] * 32 * 3)
        fid.finish_pending()
        self.assertEqual(fid.block_lengths(), [64, 64, 64])
        fid.grow_block_length()
        fid.finish_pending()
        self.assertEqual(fid.block_lengths(), [128, 64])
        self.assertEqual(list(fid.iter_bits()), [1, 0] * 96)

    def test_seal_requires_a_full_tail(self):
        fid = self.make()
        fid.append(1)
        with self.assertRaises(BuildStateError):
            fid.seal_block()

    def test_serialization(self):
        rng = random.Random(3)
        bits = [rng.getrandbits(1) for _ in range(1000)]
        fid = from_bits(bits_of(bits), 'blocked', block_length=64)
        fid.finish_pending()
        copy = append_fid_from_bytes(fid.to_bytes())
        self.assertIsInstance(copy, AppendFID)
        assert_same_queries(self, copy, bits)
        copy.append(1)
        self.assertEqual(len(copy), 1001)

    def test_rejects_bad_block_length_on_load(self):
        fid = self.make()
        fid.extend([1] * 70)
        fid.finish_pending()
        data = bytearray(fid.to_bytes())
        data[4:12] = (48).to_bytes(8, 'little')
        with self.assertRaises(CorruptIndexError):
            append_fid_from_bytes(bytes(data))

    @override_settings(WAVELET_TRIE={'ABV_BLOCK_LENGTH': 128})
    def test_defaults_come_from_settings(self):
        self.assertEqual(AppendFID().block_length, 128)


class OffsetFIDTests(SimpleTestCase):

    def test_constant_head_is_virtual(self):
        fid = OffsetFID(AppendFID(block_length=64), offset=5, fill=1)
        fid.append(0)
        fid.append(1)
        bits = [1, 1, 1, 1, 1, 0, 1]
        assert_same_queries(self, fid, bits)
        self.assertEqual(fid.rank(1, 7), 6)
        self.assertEqual(fid.select(0, 0), 5)
        self.assertEqual(fid.count(0), 1)
        self.assertEqual(list(fid.iter_bits(3, 7)), [1, 1, 0, 1])
        with self.assertRaises(OutOfRangeError):
            fid.access(7)

    def test_round_trip_through_reader(self):
        fid = OffsetFID(new_append_fid('logarithmic', min_r=64), offset=300, fill=0)
        for i in range(200):
            fid.append(i % 4 == 0)
        fid.finish_pending()
        copy = OffsetFID.read_from(BlobReader(fid.to_bytes()))
        self.assertEqual((copy.offset, copy.fill), (300, 0))
        self.assertEqual(list(copy.iter_bits()), list(fid.iter_bits()))


class FactoryTests(SimpleTestCase):

    def test_kinds(self):
        self.assertIsInstance(new_append_fid('blocked', block_length=64), AppendFID)
        self.assertIsInstance(new_append_fid('logarithmic'), SegmentStack)
        with self.assertRaises(ValueError):
            new_append_fid('bogus')
