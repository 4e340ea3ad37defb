"""
Linear-scan reference implementations of every sequence query, the
self-check runner built on them, and a synthetic URL log generator.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field

from .conf import resolve
from .exceptions import NotFoundError, OutOfRangeError, check_range

logger = logging.getLogger(__name__)


class VectorOracle:
    """A plain list of strings answering the same queries as WaveletTrie."""

    def __init__(self, values=()):
        self.values = list(values)

    def __len__(self):
        return len(self.values)

    def _interval(self, l, r):
        check_range(r, len(self.values), what='range end', inclusive=True)
        if not 0 <= l <= r:
            raise OutOfRangeError(f"range start {l} outside [0, {r}]")
        return self.values[l:r]

    def access(self, pos):
        check_range(pos, len(self.values))
        return self.values[pos]

    def rank(self, s, pos):
        check_range(pos, len(self.values), inclusive=True)
        return sum(1 for v in self.values[:pos] if v == s)

    def rank_prefix(self, p, pos):
        check_range(pos, len(self.values), inclusive=True)
        return sum(1 for v in self.values[:pos] if v.startswith(p))

    def _select(self, match, idx, what):
        seen = 0
        for pos, v in enumerate(self.values):
            if match(v):
                if seen == idx:
                    return pos
                seen += 1
        raise NotFoundError(f"{what} has {seen} occurrences; index {idx} requested")

    def select(self, s, idx):
        return self._select(lambda v: v == s, idx, repr(s))

    def select_prefix(self, p, idx):
        return self._select(lambda v: v.startswith(p), idx, f"prefix {p!r}")

    def append(self, s):
        self.values.append(s)

    def insert(self, s, pos):
        check_range(pos, len(self.values), inclusive=True)
        self.values.insert(pos, s)

    def delete(self, pos):
        check_range(pos, len(self.values))
        del self.values[pos]

    def histogram(self, l, r, depth=None):
        values = self._interval(l, r)
        if depth is not None:
            values = [v[:depth] for v in values]
        return Counter(values)

    def distinct(self, l, r, depth=None):
        return sorted(self.histogram(l, r, depth).items())

    def majority(self, l, r, depth=None):
        if l >= r:
            raise OutOfRangeError(f"majority needs a non-empty range, got [{l}, {r})")
        value, count = self.histogram(l, r, depth).most_common(1)[0]
        return value if 2 * count > r - l else None

    def threshold(self, l, r, threshold, depth=None):
        if threshold < 1:
            raise OutOfRangeError(f"threshold must be at least 1, got {threshold}")
        found = [(v, c) for v, c in self.histogram(l, r, depth).items() if c >= threshold]
        return sorted(found, key=lambda item: (-item[1], item[0]))


@dataclass
class SelfCheckReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches


def _outcome(call):
    try:
        return call()
    except (OutOfRangeError, NotFoundError) as exc:
        return type(exc).__name__


def run_selfcheck(wt, oracle=None, sample=None, seed=0):
    """
    Compare `sample` randomly drawn queries of every kind between wt and
    oracle. Without an oracle the index's own sequential decode is used,
    which still exercises rank, select and the range algorithms.
    """
    sample = resolve(sample, 'SELFCHECK_SAMPLE')
    if oracle is None:
        oracle = VectorOracle(wt.range_iter())
    report = SelfCheckReport()
    n = len(oracle)
    if len(wt) != n:
        report.mismatches.append(f"length: index {len(wt)}, reference {n}")
        return report
    if n == 0:
        report.checked = 1
        if wt.range_distinct(0, 0):
            report.mismatches.append("empty index reports distinct values")
        return report

    rng = random.Random(seed)
    values = oracle.values
    symbols = sorted(set(values))

    def prefix_of(v):
        return v[:rng.randint(0, len(v))]

    def interval():
        l = rng.randint(0, n)
        return l, rng.randint(l, n)

    def nonempty():
        l = rng.randrange(n)
        return l, rng.randint(l + 1, n)

    checks = [
        ('access', lambda: (rng.randrange(n),), wt.access, oracle.access),
        ('rank', lambda: (rng.choice(symbols), rng.randint(0, n)), wt.rank, oracle.rank),
        ('select', lambda: (rng.choice(symbols), rng.randrange(n)), wt.select, oracle.select),
        ('rank_prefix', lambda: (prefix_of(rng.choice(values)), rng.randint(0, n)), wt.rank_prefix, oracle.rank_prefix),
        ('select_prefix', lambda: (prefix_of(rng.choice(values)), rng.randrange(n)), wt.select_prefix, oracle.select_prefix),
        ('distinct', interval, wt.range_distinct, oracle.distinct),
        ('majority', nonempty, wt.range_majority, oracle.majority),
        ('majority_prefix', lambda: (*nonempty(), rng.randint(1, 12)), wt.range_majority, oracle.majority),
        ('threshold', lambda: (*interval(), rng.choice((1, 2, 5))), wt.range_threshold, oracle.threshold),
    ]
    for i in range(sample):
        name, draw, got, expected = checks[i % len(checks)]
        args = draw()
        ours, theirs = _outcome(lambda: got(*args)), _outcome(lambda: expected(*args))
        report.checked += 1
        if ours != theirs:
            report.mismatches.append(f"{name}{args!r}: index {ours!r}, reference {theirs!r}")
    if list(wt.range_iter()) != values:
        report.mismatches.append("sequential decode differs from the reference")
    logger.info("self-check: %d queries, %d mismatches", report.checked, len(report.mismatches))
    return report


_TLDS = ('com', 'org', 'net', 'io', 'de')
_SECTIONS = ('', 'index.html', 'search', 'static/app.js', 'api/v1/items', 'login', 'img/logo.png')


def synthetic_urls(n, seed=0, hosts=200):
    """A URL log with heavy-tailed host popularity, as seen in web server logs."""
    rng = random.Random(seed)
    names = [f"{'www.' if i % 3 else ''}site{i}.{_TLDS[i % len(_TLDS)]}" for i in range(hosts)]
    weights = [1.0 / (rank + 1) for rank in range(hosts)]
    picks = rng.choices(names, weights=weights, k=n)
    out = []
    for host in picks:
        section = rng.choice(_SECTIONS)
        query = f"?id={rng.randrange(50)}" if section.startswith('api') else ''
        out.append(f"http://{host}/{section}{query}".encode())
    return out
