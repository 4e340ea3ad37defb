from pathlib import Path

from rest_framework import serializers

from .conf import APPEND_BITVECTOR_KINDS
from .exceptions import DecodeError
from .storage import escape_bytes, unescape_bytes
from .wtrie import Variant

QUERY_OPS = ('access', 'rank', 'select', 'rank-prefix', 'select-prefix', 'distinct', 'majority', 'threshold')

# Arguments each query subcommand needs besides the index.
QUERY_REQUIREMENTS = {
    'access': ('pos',),
    'rank': ('string', 'pos'),
    'select': ('string', 'idx'),
    'rank-prefix': ('prefix', 'pos'),
    'select-prefix': ('prefix', 'idx'),
    'distinct': ('start', 'stop'),
    'majority': ('start', 'stop'),
    'threshold': ('start', 'stop', 'threshold'),
}

PREFIX_GROUPED_OPS = ('distinct', 'majority', 'threshold')


class EscapedBytesField(serializers.Field):
    """Command-line text with \\xHH escapes, validated into bytes."""

    def to_internal_value(self, data):
        if not isinstance(data, str):
            raise serializers.ValidationError("expected text")
        try:
            return unescape_bytes(data)
        except DecodeError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, value):
        return escape_bytes(value)


class ExistingFileField(serializers.CharField):

    def to_internal_value(self, data):
        path = Path(super().to_internal_value(data))
        if not path.is_file():
            raise serializers.ValidationError(f"{path} does not exist or is not a file")
        return path


class BuildArgumentsSerializer(serializers.Serializer):
    """
    Arguments of `wt build`.
    """
    input = ExistingFileField()
    index = serializers.CharField()
    variant = serializers.ChoiceField(choices=[v.value for v in Variant], default=Variant.STATIC.value)
    length_prefixed = serializers.BooleanField(default=False)
    append_kind = serializers.ChoiceField(choices=APPEND_BITVECTOR_KINDS, required=False, allow_null=True)

    def validate(self, data):
        if data.get('append_kind') and data['variant'] != Variant.APPEND.value:
            raise serializers.ValidationError("--append-kind only applies to the append variant")
        return data


class AppendArgumentsSerializer(serializers.Serializer):
    index = ExistingFileField()
    input = ExistingFileField()
    length_prefixed = serializers.BooleanField(default=False)


class QueryArgumentsSerializer(serializers.Serializer):
    """
    Arguments of `wt query`: which of them are required depends on the
    subcommand.
    """
    index = ExistingFileField()
    op = serializers.ChoiceField(choices=QUERY_OPS)
    string = EscapedBytesField(required=False, allow_null=True)
    prefix = EscapedBytesField(required=False, allow_null=True)
    pos = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    idx = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    start = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    stop = serializers.IntegerField(required=False, allow_null=True, min_value=0)
    threshold = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    depth = serializers.IntegerField(required=False, allow_null=True, min_value=0)

    def validate(self, data):
        missing = [name for name in QUERY_REQUIREMENTS[data['op']] if data.get(name) is None]
        if missing:
            flags = ', '.join('--' + {'start': 'from', 'stop': 'to'}.get(name, name) for name in missing)
            raise serializers.ValidationError(f"{data['op']} requires {flags}")
        if data.get('start') is not None and data.get('stop') is not None and data['start'] > data['stop']:
            raise serializers.ValidationError("--from must not exceed --to")
        if data.get('depth') is not None and data['op'] not in PREFIX_GROUPED_OPS:
            raise serializers.ValidationError("--depth only applies to distinct, majority and threshold")
        return data


class StatsArgumentsSerializer(serializers.Serializer):
    index = ExistingFileField()
    format = serializers.ChoiceField(choices=('text', 'json'), default='text')


class SelfCheckArgumentsSerializer(serializers.Serializer):
    index = ExistingFileField()
    sample = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    seed = serializers.IntegerField(default=0)
    input = ExistingFileField(required=False, allow_null=True)
    length_prefixed = serializers.BooleanField(default=False)


class SpaceReportSerializer(serializers.Serializer):
    """JSON view of a SpaceReport."""
    n = serializers.IntegerField()
    distinct = serializers.IntegerField()
    h0 = serializers.FloatField()
    nh0_bits = serializers.FloatField()
    lt_bits = serializers.IntegerField()
    lb_bits = serializers.IntegerField()
    label_bits = serializers.IntegerField()
    edges = serializers.IntegerField()
    records_bits = serializers.IntegerField()
    trie_bits = serializers.IntegerField()
    pointer_trie_bits = serializers.IntegerField()
    bitvector_bits = serializers.IntegerField()
    total_bits = serializers.IntegerField()
    h_tilde = serializers.FloatField()
    mean_binarized_length = serializers.FloatField()
    height = serializers.IntegerField()
    meets_floor = serializers.BooleanField(read_only=True)
    average_height_bounded = serializers.BooleanField(read_only=True)
