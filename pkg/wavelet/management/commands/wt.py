import json
import logging
from contextlib import contextmanager

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from wavelet.exceptions import DecodeError, NotFoundError, OutOfRangeError, VariantError, WaveletError
from wavelet.refkit import VectorOracle, run_selfcheck
from wavelet.serializers import (
    QUERY_OPS,
    AppendArgumentsSerializer,
    BuildArgumentsSerializer,
    QueryArgumentsSerializer,
    SelfCheckArgumentsSerializer,
    SpaceReportSerializer,
    StatsArgumentsSerializer,
)
from wavelet.storage import IndexFile, escape_bytes, read_lines
from wavelet.wtrie import Variant, WaveletTrie

logger = logging.getLogger(__name__)

EXIT_OTHER = 1
EXIT_RANGE = 2
EXIT_CORRUPT = 3
EXIT_VARIANT = 4


def _flatten(detail):
    if isinstance(detail, dict):
        return '; '.join(f"{key}: {_flatten(value)}" if key != 'non_field_errors' else _flatten(value)
                         for key, value in detail.items())
    if isinstance(detail, list):
        return '; '.join(_flatten(item) for item in detail)
    return str(detail)


@contextmanager
def exit_codes():
    """Translate library and validation errors into CommandErrors carrying the documented exit code."""
    try:
        yield
    except serializers.ValidationError as exc:
        raise CommandError(_flatten(exc.detail), returncode=EXIT_RANGE)
    except (OutOfRangeError, NotFoundError) as exc:
        raise CommandError(str(exc), returncode=EXIT_RANGE)
    except VariantError as exc:
        raise CommandError(str(exc), returncode=EXIT_VARIANT)
    except DecodeError as exc:
        raise CommandError(f"corrupt input: {exc}", returncode=EXIT_CORRUPT)
    except (WaveletError, OSError) as exc:
        raise CommandError(str(exc), returncode=EXIT_OTHER)


class Command(BaseCommand):
    help = 'Build, update, query and inspect Wavelet Trie indexes over line-delimited string logs'

    def add_arguments(self, parser):
        commands = parser.add_subparsers(dest='command', required=True)

        build = commands.add_parser('build', help='Index a log file')
        build.add_argument('--input', required=True)
        build.add_argument('--index', required=True)
        build.add_argument('--variant', choices=[v.value for v in Variant], default=Variant.STATIC.value)
        build.add_argument('--append-kind', dest='append_kind')
        build.add_argument('--length-prefixed', action='store_true', dest='length_prefixed')

        append = commands.add_parser('append', help='Append the lines of a file to an index')
        append.add_argument('--index', required=True)
        append.add_argument('--input', required=True)
        append.add_argument('--length-prefixed', action='store_true', dest='length_prefixed')

        query = commands.add_parser('query', help='Answer one query')
        query.add_argument('op', choices=QUERY_OPS)
        query.add_argument('--index', required=True)
        query.add_argument('--string')
        query.add_argument('--prefix')
        query.add_argument('--pos', type=int)
        query.add_argument('--idx', type=int)
        query.add_argument('--from', type=int, dest='start')
        query.add_argument('--to', type=int, dest='stop')
        query.add_argument('--threshold', type=int)
        query.add_argument('--depth', type=int)

        stats = commands.add_parser('stats', help='Print space accounting')
        stats.add_argument('--index', required=True)
        stats.add_argument('--format', choices=('text', 'json'), default='text')

        selfcheck = commands.add_parser('selfcheck', help='Differential test against a brute-force reference')
        selfcheck.add_argument('--index', required=True)
        selfcheck.add_argument('--sample', type=int)
        selfcheck.add_argument('--seed', type=int, default=0)
        selfcheck.add_argument('--input')
        selfcheck.add_argument('--length-prefixed', action='store_true', dest='length_prefixed')

    def handle(self, *args, **options):
        command = options['command']
        logger.info("wt %s", command)
        with exit_codes():
            getattr(self, f"handle_{command}")(options)

    def _validated(self, serializer_class, options):
        serializer = serializer_class(data={k: v for k, v in options.items() if v is not None})
        serializer.is_valid(raise_exception=True)
        return serializer.validated_data

    def _summary(self, wt, size):
        report = wt.space_report()
        return (f"n={report.n} distinct={report.distinct} h~={report.h_tilde:.4f} "
                f"bytes={size} variant={wt.variant.value}")

    def handle_build(self, options):
        args = self._validated(BuildArgumentsSerializer, options)
        lines = read_lines(args['input'], args['length_prefixed'])
        variant = Variant(args['variant'])
        extra = {'append_kind': args['append_kind']} if args.get('append_kind') else {}
        wt = WaveletTrie.from_sequence(lines, variant, **extra)
        size = IndexFile(args['index']).save(wt)
        self.stdout.write(self.style.SUCCESS(f"Built {args['index']}: {self._summary(wt, size)}"))

    def handle_append(self, options):
        args = self._validated(AppendArgumentsSerializer, options)
        index = IndexFile(args['index'])
        wt = index.load()
        if wt.variant is Variant.STATIC:
            raise VariantError("the static variant does not support append; rebuild with --variant append or dynamic")
        lines = read_lines(args['input'], args['length_prefixed'])
        wt.extend(lines)
        size = index.save(wt)
        self.stdout.write(self.style.SUCCESS(f"Appended {len(lines)} lines: {self._summary(wt, size)}"))

    def handle_query(self, options):
        args = self._validated(QueryArgumentsSerializer, options)
        wt = IndexFile(args['index']).load()
        op = args['op']
        if op == 'access':
            self.stdout.write(escape_bytes(wt.access(args['pos'])))
        elif op == 'rank':
            self.stdout.write(str(wt.rank(args['string'], args['pos'])))
        elif op == 'select':
            self.stdout.write(str(wt.select(args['string'], args['idx'])))
        elif op == 'rank-prefix':
            self.stdout.write(str(wt.rank_prefix(args['prefix'], args['pos'])))
        elif op == 'select-prefix':
            self.stdout.write(str(wt.select_prefix(args['prefix'], args['idx'])))
        elif op == 'distinct':
            for value, count in wt.range_distinct(args['start'], args['stop'], args.get('depth')):
                self.stdout.write(f"{escape_bytes(value)}\t{count}")
        elif op == 'majority':
            value = wt.range_majority(args['start'], args['stop'], args.get('depth'))
            if value is None:
                self.stderr.write("no majority")
            else:
                self.stdout.write(escape_bytes(value))
        elif op == 'threshold':
            for value, count in wt.range_threshold(args['start'], args['stop'], args['threshold'], args.get('depth')):
                self.stdout.write(f"{escape_bytes(value)}\t{count}")

    def handle_stats(self, options):
        args = self._validated(StatsArgumentsSerializer, options)
        report = IndexFile(args['index']).load().space_report()
        data = SpaceReportSerializer(report).data
        if args['format'] == 'json':
            self.stdout.write(JSONRenderer().render(data).decode())
            return
        for key, value in data.items():
            shown = f"{value:.6f}" if isinstance(value, float) else json.dumps(value)
            self.stdout.write(f"{key}: {shown}")

    def handle_selfcheck(self, options):
        args = self._validated(SelfCheckArgumentsSerializer, options)
        wt = IndexFile(args['index']).load()
        oracle = None
        if args.get('input'):
            oracle = VectorOracle(read_lines(args['input'], args['length_prefixed']))
        report = run_selfcheck(wt, oracle, sample=args.get('sample'), seed=args['seed'])
        if not report.passed:
            for line in report.mismatches[:20]:
                self.stderr.write(line)
            raise CommandError(f"self-check failed: {len(report.mismatches)} of {report.checked} checks disagree",
                               returncode=EXIT_OTHER)
        self.stdout.write(self.style.SUCCESS(f"self-check passed: {report.checked} checks, n={len(wt)}"))
