import random
import time

from django.core.management.base import BaseCommand, CommandError

from wavelet.refkit import synthetic_urls
from wavelet.wtrie import Variant, WaveletTrie


def _per_op(fn, calls):
    started = time.perf_counter()
    for args in calls:
        fn(*args)
    return (time.perf_counter() - started) / max(1, len(calls)) * 1e6


class Command(BaseCommand):
    help = 'Print per-operation latency while doubling n (for documenting scaling, not a test)'

    def add_arguments(self, parser):
        parser.add_argument('--variant', choices=[v.value for v in Variant], default=Variant.STATIC.value)
        parser.add_argument('--start', type=int, default=1000)
        parser.add_argument('--max', type=int, default=64000, dest='stop')
        parser.add_argument('--queries', type=int, default=500)
        parser.add_argument('--seed', type=int, default=0)

    def handle(self, *args, **options):
        if options['start'] < 1 or options['stop'] < options['start']:
            raise CommandError("need 1 <= --start <= --max", returncode=2)
        variant = Variant(options['variant'])
        rng = random.Random(options['seed'])
        self.stdout.write(f"{'n':>9} {'build/elt':>10} {'access':>9} {'rank':>9} {'select':>9} {'prefix':>9}  (microseconds)")
        n = options['start']
        while n <= options['stop']:
            log = synthetic_urls(n, seed=options['seed'])
            started = time.perf_counter()
            wt = WaveletTrie.from_sequence(log, variant)
            build = (time.perf_counter() - started) / n * 1e6
            picks = [log[rng.randrange(n)] for _ in range(options['queries'])]
            access = _per_op(wt.access, [(rng.randrange(n),) for _ in picks])
            rank = _per_op(wt.rank, [(s, rng.randint(0, n)) for s in picks])
            select = _per_op(wt.select, [(s, 0) for s in picks])
            prefix = _per_op(wt.rank_prefix, [(s[:12], n) for s in picks])
            self.stdout.write(f"{n:>9} {build:>10.1f} {access:>9.1f} {rank:>9.1f} {select:>9.1f} {prefix:>9.1f}")
            n *= 2
