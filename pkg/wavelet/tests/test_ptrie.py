import random

from django.test import SimpleTestCase, tag

from wavelet.bits import BitString, binarize
from wavelet.exceptions import DuplicateStringError, NotFoundError, PrefixFreeError
from wavelet.ptrie import Match, PatriciaTrie, lt_bound

SAMPLE_SET = ['0001', '0011', '0100', '00100']


def bs(text):
    return BitString.from_str(text)


def random_word(rng, alphabet=b'abcd', longest=6):
    return bytes(rng.choice(alphabet) for _ in range(rng.randint(0, longest)))


class PatriciaTrieTests(SimpleTestCase):

    def setUp(self):
        self.trie = PatriciaTrie.from_strings(bs(s) for s in SAMPLE_SET)

    def test_canonical_shape(self):
        self.assertEqual(self.trie.structure(), (
            ('internal', '0'),
            ('internal', ''),
            ('leaf', '1'),
            ('internal', ''),
            ('leaf', '0'),
            ('leaf', ''),
            ('leaf', '00'),
        ))
        self.assertEqual([str(s) for s in self.trie.strings()], ['0001', '00100', '0011', '0100'])

    def test_lookup_kinds(self):
        self.assertIs(self.trie.lookup(bs('0011')).kind, Match.LEAF)
        prefix = self.trie.lookup(bs('00'))
        self.assertIs(prefix.kind, Match.PREFIX)
        self.assertEqual(len(prefix.path), 1)
        self.assertIs(self.trie.lookup(bs('1')).kind, Match.MISMATCH)
        self.assertIs(self.trie.lookup(bs('011')).kind, Match.MISMATCH)
        self.assertIn(bs('0100'), self.trie)
        self.assertNotIn(bs('010'), self.trie)

    def test_insert_splits_one_node(self):
        before = len(self.trie.nodes())
        result = self.trie.insert(bs('0101'))
        self.assertEqual(len(self.trie.nodes()), before + 2)
        self.assertEqual(str(result.split.label), '0')
        self.assertEqual(result.bit, 1)
        self.assertEqual(str(result.sibling.label), '')
        self.assertEqual(str(result.leaf.label), '')
        self.assertEqual(self.trie.structure(), PatriciaTrie.from_strings(
            bs(s) for s in SAMPLE_SET + ['0101']).structure())

    def test_insert_rejects_duplicates_and_prefixes(self):
        with self.assertRaises(DuplicateStringError):
            self.trie.insert(bs('0100'))
        with self.assertRaises(PrefixFreeError):
            self.trie.insert(bs('00'))
        with self.assertRaises(PrefixFreeError):
            self.trie.insert(bs('00011'))
        with self.assertRaises(PrefixFreeError):
            PatriciaTrie.from_strings([bs('01'), bs('011')])

    def test_delete_merges_with_sibling(self):
        self.trie.delete(bs('0011'))
        self.assertEqual(self.trie.structure(), PatriciaTrie.from_strings(
            bs(s) for s in ['0001', '0100', '00100']).structure())
        with self.assertRaises(NotFoundError):
            self.trie.delete(bs('0011'))

    def test_empty_and_single(self):
        trie = PatriciaTrie()
        self.assertFalse(trie)
        with self.assertRaises(NotFoundError):
            trie.lookup(bs('0'))
        trie.insert(bs('10'))
        self.assertEqual(trie.structure(), (('leaf', '10'),))
        self.assertEqual(trie.height(), 0)
        trie.delete(bs('10'))
        self.assertIsNone(trie.root)

    def test_measures(self):
        measure = self.trie.measure()
        self.assertEqual((measure.label_bits, measure.edges, measure.nodes, measure.leaves), (5, 6, 7, 4))
        self.assertEqual(self.trie.lt_bits(), 5 + 6 + 9)
        self.assertEqual(lt_bound(0, 0), 0)
        self.assertEqual(self.trie.height(), 3)
        self.assertEqual(self.trie.leaf_counts()[self.trie.root], 4)

    def test_walk_reports_depths(self):
        depths = [(str(node.label), depth) for node, depth in self.trie.walk()]
        self.assertEqual(depths[:3], [('0', 0), ('', 2), ('1', 3)])
        self.assertEqual(depths[-1], ('00', 2))


class PatriciaRoundTripTests(SimpleTestCase):

    @tag('acceptance')
    def test_insert_then_delete_restores_structure(self):
        rng = random.Random(17)
        words = {binarize(random_word(rng)) for _ in range(300)}
        trie = PatriciaTrie.from_strings(words)
        for step in range(1000):
            word = binarize(random_word(rng, longest=8))
            if word in words:
                continue
            before = trie.structure()
            trie.insert(word)
            trie.delete(word)
            self.assertEqual(trie.structure(), before)
            if step % 100 == 0:
                removed = rng.choice(sorted(words))
                trie.delete(removed)
                words.discard(removed)
                added = binarize(random_word(rng, longest=8))
                if added not in words:
                    trie.insert(added)
                    words.add(added)
                self.assertEqual(trie.structure(), PatriciaTrie.from_strings(words).structure())

    def test_sorted_construction_matches_incremental(self):
        rng = random.Random(23)
        words = sorted({binarize(random_word(rng)) for _ in range(120)})
        incremental = PatriciaTrie()
        for word in rng.sample(words, len(words)):
            incremental.insert(word)
        self.assertEqual(incremental.structure(), PatriciaTrie.from_sorted(words).structure())
        self.assertEqual(incremental.strings(), words)
