import random

from django.test import SimpleTestCase, override_settings, tag

from wavelet.exceptions import CorruptIndexError, NotFoundError, OutOfRangeError
from wavelet.hashwt import HashedWaveletTree, inverse_mod_power_of_two, random_odd
from wavelet.refkit import VectorOracle
from wavelet.wtrie import Variant, WaveletTrie


class HashTests(SimpleTestCase):

    def test_small_multiplier(self):
        tree = HashedWaveletTree(16, multiplier=5)
        self.assertEqual(tree.k, 4)
        self.assertEqual(str(tree.hash(3)), '1111')
        self.assertEqual(tree.a_inv, 13)
        self.assertEqual(tree.unhash(tree.hash(3)), 3)

    def test_identity_multiplier(self):
        tree = HashedWaveletTree(256, multiplier=1)
        self.assertEqual([tree.hash(x).value for x in range(256)], list(range(256)))

    def test_bijective_for_random_multipliers(self):
        rng = random.Random(8)
        k = 10
        for _ in range(8):
            tree = HashedWaveletTree(1 << k, multiplier=random_odd(k, rng))
            images = {tree.hash(x).value for x in range(1 << k)}
            self.assertEqual(len(images), 1 << k)
            self.assertTrue(all(tree.unhash(tree.hash(x)) == x for x in range(1 << k)))

    def test_inverse(self):
        self.assertEqual(inverse_mod_power_of_two(5, 4), 13)
        self.assertEqual(inverse_mod_power_of_two(1, 1), 1)
        a = (1 << 61) - 1
        self.assertEqual((a * inverse_mod_power_of_two(a, 64)) % (1 << 64), 1)
        with self.assertRaises(ValueError):
            inverse_mod_power_of_two(6, 8)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ValueError):
            HashedWaveletTree(0)
        with self.assertRaises(ValueError):
            HashedWaveletTree(16, multiplier=4)
        with self.assertRaises(ValueError):
            HashedWaveletTree(16, multiplier=17)
        tree = HashedWaveletTree(10, multiplier=3)
        with self.assertRaises(OutOfRangeError):
            tree.append(10)
        with self.assertRaises(OutOfRangeError):
            tree.hash(16)
        with self.assertRaises(ValueError):
            tree.unhash(tree.hash(1)[:2])

    @override_settings(WAVELET_TRIE={'HASHWT_SEED': 1234})
    def test_seed_from_settings_is_deterministic(self):
        self.assertEqual(HashedWaveletTree(1000).a, HashedWaveletTree(1000).a)
        self.assertEqual(HashedWaveletTree(1000).seed, 1234)
        self.assertEqual(HashedWaveletTree(1000, seed=99).a, HashedWaveletTree(1000, seed=99).a)


class SequenceTests(SimpleTestCase):

    def test_rank_and_select(self):
        tree = HashedWaveletTree(16, multiplier=5)
        for x in (7, 7, 7, 2):
            tree.append(x)
        self.assertEqual(tree.rank(7, 3), 3)
        self.assertEqual(tree.rank(2, 4), 1)
        self.assertEqual(tree.rank(9, 4), 0)
        self.assertEqual(tree.select(2, 0), 3)
        with self.assertRaises(NotFoundError):
            tree.select(9, 0)
        self.assertEqual(list(tree), [7, 7, 7, 2])

    def run_workload(self, seed, tree_seed):
        rng = random.Random(seed)
        tree = HashedWaveletTree(1000, seed=tree_seed)
        oracle = VectorOracle()
        answers = []
        for _ in range(1500):
            n = len(oracle)
            op = rng.random()
            if op < 0.4 or not n:
                x, pos = rng.randrange(60), rng.randint(0, n)
                tree.insert(x, pos)
                oracle.insert(x, pos)
            elif op < 0.55:
                pos = rng.randrange(n)
                tree.delete(pos)
                oracle.delete(pos)
            else:
                x = rng.choice(oracle.values)
                pos = rng.randint(0, n)
                idx = rng.randrange(oracle.rank(x, n))
                got = (tree.access(pos % n), tree.rank(x, pos), tree.select(x, idx))
                self.assertEqual(got, (oracle.access(pos % n), oracle.rank(x, pos), oracle.select(x, idx)))
                answers.append(got)
        self.assertEqual(list(tree), oracle.values)
        tree.inner.check_invariants()
        return answers

    def test_workload_matches_a_list(self):
        self.run_workload(seed=4, tree_seed=1)

    def test_answers_do_not_depend_on_the_multiplier(self):
        self.assertEqual(self.run_workload(seed=6, tree_seed=1), self.run_workload(seed=6, tree_seed=2))

    def test_height(self):
        tree = HashedWaveletTree(1 << 12, seed=3)
        tree.append(77)
        tree.append(77)
        self.assertEqual(tree.measured_height(), 0)
        for x in random.Random(5).sample(range(1 << 12), 300):
            tree.append(x)
        self.assertLessEqual(tree.measured_height(), tree.k)

    @tag('acceptance')
    def test_height_is_logarithmic_with_high_probability(self):
        rng = random.Random(2024)
        values = rng.sample(range(1 << 32), 256)
        within = 0
        for _ in range(100):
            tree = HashedWaveletTree(1 << 32, multiplier=random_odd(32, rng))
            for x in values:
                tree.append(x)
            height = tree.measured_height()
            self.assertLessEqual(height, tree.k)
            within += height <= 4 * 8
        self.assertGreaterEqual(within, 95)


class SerializationTests(SimpleTestCase):

    def make(self):
        tree = HashedWaveletTree(500, seed=11)
        for x in random.Random(1).choices(range(500), k=200):
            tree.append(x)
        return tree

    def test_round_trip(self):
        tree = self.make()
        copy = HashedWaveletTree.from_bytes(tree.to_bytes())
        self.assertEqual((copy.universe, copy.k, copy.a, copy.seed), (tree.universe, tree.k, tree.a, 11))
        self.assertEqual(list(copy), list(tree))
        copy.insert(499, 0)
        self.assertEqual(copy.access(0), 499)

    def test_rejects_mismatched_images(self):
        data = bytearray(self.make().to_bytes())
        with self.assertRaises(CorruptIndexError):
            HashedWaveletTree.from_bytes(b'XXXX' + bytes(data[4:]))
        bad_k = bytearray(data)
        bad_k[12:20] = (3).to_bytes(8, 'little')
        with self.assertRaises(CorruptIndexError):
            HashedWaveletTree.from_bytes(bytes(bad_k))
        even = bytearray(data)
        even[20:28] = (4).to_bytes(8, 'little')
        with self.assertRaises(CorruptIndexError):
            HashedWaveletTree.from_bytes(bytes(even))

    def test_rejects_a_static_inner_index(self):
        tree = HashedWaveletTree(16, multiplier=5)
        tree.inner = WaveletTrie.build_static([tree.hash(1), tree.hash(2)], raw=True)
        with self.assertRaises(CorruptIndexError):
            HashedWaveletTree.from_bytes(tree.to_bytes())
        self.assertIs(self.make().inner.variant, Variant.DYNAMIC)
