from django.test import SimpleTestCase

from wavelet.exceptions import NotFoundError, OutOfRangeError
from wavelet.refkit import VectorOracle, run_selfcheck, synthetic_urls
from wavelet.wtrie import Variant, WaveletTrie

LOG = [b'0001', b'0011', b'0100', b'00100', b'0100', b'00100', b'0100']


class VectorOracleTests(SimpleTestCase):

    def setUp(self):
        self.oracle = VectorOracle(LOG)

    def test_point_queries(self):
        self.assertEqual(self.oracle.access(2), b'0100')
        self.assertEqual(self.oracle.rank(b'0100', 7), 3)
        self.assertEqual(self.oracle.rank_prefix(b'00', 7), 4)
        self.assertEqual(self.oracle.select(b'00100', 1), 5)
        self.assertEqual(self.oracle.select_prefix(b'00', 2), 3)
        with self.assertRaises(NotFoundError):
            self.oracle.select(b'0100', 3)
        with self.assertRaises(OutOfRangeError):
            self.oracle.rank(b'0100', 8)

    def test_range_queries(self):
        self.assertEqual(self.oracle.distinct(2, 6), [(b'00100', 2), (b'0100', 2)])
        self.assertEqual(self.oracle.distinct(0, 7, depth=2), [(b'00', 4), (b'01', 3)])
        self.assertEqual(self.oracle.majority(2, 7), b'0100')
        self.assertIsNone(self.oracle.majority(0, 2))
        self.assertEqual(self.oracle.threshold(0, 7, 2), [(b'0100', 3), (b'00100', 2)])
        self.assertEqual(self.oracle.majority(0, 7, depth=2), b'00')
        self.assertIsNone(self.oracle.majority(1, 5, depth=2))
        self.assertEqual(self.oracle.threshold(0, 7, 4, depth=2), [(b'00', 4)])
        with self.assertRaises(OutOfRangeError):
            self.oracle.distinct(4, 3)

    def test_updates(self):
        self.oracle.insert(b'x', 0)
        self.oracle.delete(3)
        self.oracle.append(b'y')
        self.assertEqual(self.oracle.values, [b'x', b'0001', b'0011', b'00100', b'0100', b'00100', b'0100', b'y'])


class SelfCheckTests(SimpleTestCase):

    def test_index_agrees_with_its_source(self):
        values = synthetic_urls(600, seed=3, hosts=40)
        for variant in Variant:
            report = run_selfcheck(WaveletTrie.from_sequence(values, variant), VectorOracle(values), sample=160)
            self.assertTrue(report.passed, report.mismatches)
            self.assertEqual(report.checked, 160)

    def test_defaults_to_the_sequential_decode(self):
        wt = WaveletTrie.build_static(LOG)
        self.assertTrue(run_selfcheck(wt, sample=40).passed)

    def test_reports_a_different_source(self):
        wt = WaveletTrie.build_static(LOG)
        report = run_selfcheck(wt, VectorOracle(LOG[:-1] + [b'0011']), sample=80)
        self.assertFalse(report.passed)
        short = run_selfcheck(wt, VectorOracle(LOG[:3]), sample=10)
        self.assertEqual(short.mismatches, ['length: index 7, reference 3'])

    def test_empty_index(self):
        report = run_selfcheck(WaveletTrie.build_static([]), VectorOracle(), sample=10)
        self.assertTrue(report.passed)


class SyntheticUrlTests(SimpleTestCase):

    def test_deterministic_and_skewed(self):
        first = synthetic_urls(2000, seed=7)
        self.assertEqual(first, synthetic_urls(2000, seed=7))
        self.assertNotEqual(first, synthetic_urls(2000, seed=8))
        self.assertTrue(all(url.startswith(b'http://') and b'\n' not in url for url in first))
        hosts = [url.split(b'/')[2] for url in first]
        self.assertGreater(hosts.count(b'site0.com'), hosts.count(b'www.site100.com'))
