import math
import random
from collections import Counter

from django.test import SimpleTestCase

from wavelet.bits import (
    BitString, BitWriter, BlobReader, binarize, binarize_prefix, binary_entropy, binomial_bits, bits_of,
    debinarize, debinarize_prefix, delta_decode, delta_encode, gamma_decode, gamma_encode, rank_word,
    select_word, zero_order_entropy,
)
from wavelet.exceptions import CorruptIndexError, DecodeError, OutOfRangeError


class BitStringTests(SimpleTestCase):

    def test_text_form_is_index_order(self):
        bits = BitString.from_str('0110')
        self.assertEqual(str(bits), '0110')
        self.assertEqual(bits.value, 0b0110)
        self.assertEqual([bits[i] for i in range(4)], [0, 1, 1, 0])
        self.assertEqual(list(bits), [0, 1, 1, 0])

    def test_rejects_non_bits(self):
        with self.assertRaises(ValueError):
            BitString.from_str('012')
        with self.assertRaises(ValueError):
            BitString(4, 2)

    def test_slicing_and_concatenation(self):
        bits = BitString.from_str('1100101')
        self.assertEqual(str(bits[2:5]), '001')
        self.assertEqual(str(bits[:0]), '')
        self.assertEqual(str(bits[2:5] + bits[:2]), '00111')
        with self.assertRaises(OutOfRangeError):
            bits[7]

    def test_order_puts_proper_prefix_first(self):
        self.assertLess(BitString.from_str('01'), BitString.from_str('010'))
        self.assertLess(BitString.from_str('011'), BitString.from_str('1'))
        self.assertLess(BitString(), BitString.from_str('0'))
        self.assertFalse(BitString.from_str('10') < BitString.from_str('10'))

    def test_common_prefix_length(self):
        a = BitString.from_str('0101')
        self.assertEqual(a.common_prefix_length(BitString.from_str('0111')), 2)
        self.assertEqual(a.common_prefix_length(BitString.from_str('01')), 2)
        self.assertEqual(a.common_prefix_length(BitString.from_str('01'), offset=2), 2)
        self.assertEqual(a.common_prefix_length(BitString.from_str('1'), offset=4), 0)

    def test_startswith_and_count(self):
        bits = BitString.from_str('0011101')
        self.assertTrue(bits.startswith(BitString.from_str('001')))
        self.assertFalse(bits.startswith(BitString.from_str('01')))
        self.assertEqual(bits.count(1), 4)
        self.assertEqual(bits.count(0), 3)

    def test_read_across_words(self):
        rng = random.Random(3)
        value = rng.getrandbits(200)
        bits = BitString(value, 200)
        self.assertEqual(bits.read(60, 10), (value >> 60) & 0x3FF)
        self.assertEqual(bits.read(128, 64), (value >> 128) & ((1 << 64) - 1))
        with self.assertRaises(OutOfRangeError):
            bits.read(195, 10)

    def test_from_bool_array_matches_from_bits(self):
        pattern = [1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1]
        self.assertEqual(BitString.from_bool_array(pattern), bits_of(pattern))

    def test_serialized_form(self):
        bits = BitString(random.Random(5).getrandbits(130), 130)
        self.assertEqual(BitString.from_bytes(bits.to_bytes()), bits)
        with self.assertRaises(CorruptIndexError):
            BitString.from_bytes(bits.to_bytes()[:-1])


class BitWriterTests(SimpleTestCase):

    def test_long_streams_flush_correctly(self):
        writer = BitWriter()
        writer.write((1 << 5000) - 1, 5000)
        writer.append(0)
        writer.extend(BitString.from_str('101'))
        bits = writer.build()
        self.assertEqual(len(bits), 5004)
        self.assertEqual(bits.count(1), 5002)
        self.assertEqual(str(bits[4999:]), '10101')


class BlobReaderTests(SimpleTestCase):

    def test_short_read_is_corruption(self):
        reader = BlobReader(b'\x01\x02')
        with self.assertRaises(CorruptIndexError):
            reader.u64()

    def test_magic_mismatch(self):
        with self.assertRaises(CorruptIndexError):
            BlobReader(b'ABCD').magic(b'WTRI')


class BroadwordTests(SimpleTestCase):

    def test_rank_and_select_in_a_word(self):
        word = 0b1011
        self.assertEqual(rank_word(word, 3, 1), 2)
        self.assertEqual(rank_word(word, 3, 0), 1)
        self.assertEqual(select_word(word, 2, 1), 3)
        self.assertEqual(select_word(word, 0, 0, 4), 2)
        with self.assertRaises(OutOfRangeError):
            select_word(word, 3, 1)


class EliasCodeTests(SimpleTestCase):

    def test_gamma_codes(self):
        self.assertEqual(str(gamma_encode(1)), '1')
        self.assertEqual(str(gamma_encode(3)), '011')
        self.assertEqual(str(gamma_encode(5)), '00101')
        stream = BitString.from_str('0110101')
        self.assertEqual(gamma_decode(stream, 0), (3, 3))
        self.assertEqual(gamma_decode(stream, 3), (2, 3))

    def test_gamma_rejects_bad_input(self):
        with self.assertRaises(ValueError):
            gamma_encode(0)
        with self.assertRaises(DecodeError):
            gamma_decode(BitString.from_str('001'))

    def test_delta_codes(self):
        self.assertEqual(str(delta_encode(1)), '1')
        for n in (2, 17, 1000, 2 ** 40 + 3):
            code = delta_encode(n)
            self.assertEqual(delta_decode(code), (n, len(code)))
        self.assertLess(len(delta_encode(2 ** 40)), len(gamma_encode(2 ** 40)))


class BinarizationTests(SimpleTestCase):

    def test_layout_of_a_symbol(self):
        # 'a' = 0x61 = 01100001, MSB first after the continuation bit
        self.assertEqual(str(binarize(b'a')), '1011000010')
        self.assertEqual(str(binarize_prefix(b'a')), '101100001')
        self.assertEqual(str(binarize(b'')), '0')

    def test_inverse(self):
        for s in (b'', b'\x00', b'\n\xff', b'hello world'):
            self.assertEqual(debinarize(binarize(s)), s)

    def test_byte_order_is_preserved(self):
        words = [b'b', b'ab', b'a', b'', b'\x00', b'abc', b'\xff']
        self.assertEqual(sorted(words), sorted(words, key=binarize))

    def test_prefix_freeness(self):
        self.assertFalse(binarize(b'ab').startswith(binarize(b'a')))
        self.assertTrue(binarize(b'ab').startswith(binarize_prefix(b'a')))

    def test_malformed_images(self):
        with self.assertRaises(DecodeError):
            debinarize(BitString.from_str('1'))
        with self.assertRaises(DecodeError):
            debinarize(BitString.from_str('00'))
        with self.assertRaises(DecodeError):
            debinarize(binarize_prefix(b'x'))

    def test_prefix_decoding_drops_partial_symbols(self):
        image = binarize(b'abc')
        self.assertEqual(debinarize_prefix(image[:20]), b'ab')
        self.assertEqual(debinarize_prefix(image), b'abc')


class EntropyTests(SimpleTestCase):

    def test_zero_order_entropy(self):
        self.assertAlmostEqual(zero_order_entropy(Counter(b'abracadabra')), 2.0404, places=3)
        self.assertEqual(zero_order_entropy([5]), 0.0)
        with self.assertRaises(ValueError):
            zero_order_entropy([])

    def test_binary_entropy(self):
        self.assertEqual(binary_entropy(0.0), 0.0)
        self.assertAlmostEqual(binary_entropy(0.5), 1.0)
        with self.assertRaises(ValueError):
            binary_entropy(1.5)

    def test_binomial_bits(self):
        self.assertEqual(binomial_bits(2, 4), 3)
        self.assertEqual(binomial_bits(0, 10), 0)
        self.assertEqual(binomial_bits(6, 11), 9)
        exact = (math.comb(5000, 2500) - 1).bit_length()
        self.assertLessEqual(abs(binomial_bits(2500, 5000) - exact), 1)
        with self.assertRaises(ValueError):
            binomial_bits(5, 4)
