"""
System checks on the WAVELET_TRIE settings, run by `manage.py check` and
before every management command.
"""

from django.core import checks

from .abv import MAX_SMALL_BITS
from .conf import APPEND_BITVECTOR_KINDS, wavelet_setting


def _power_of_two(value):
    return isinstance(value, int) and value > 0 and not value & (value - 1)


@checks.register()
def check_wavelet_settings(app_configs=None, **kwargs):
    errors = []
    block = wavelet_setting('ABV_BLOCK_LENGTH')
    largest = wavelet_setting('ABV_MAX_BLOCK_LENGTH')
    for name, value in (('ABV_BLOCK_LENGTH', block), ('ABV_MAX_BLOCK_LENGTH', largest)):
        if not _power_of_two(value) or value > MAX_SMALL_BITS:
            errors.append(checks.Error(
                f"WAVELET_TRIE['{name}'] must be a power of two no larger than {MAX_SMALL_BITS}, got {value!r}.",
                id='wavelet.E001',
            ))
    if _power_of_two(block) and _power_of_two(largest) and block > largest:
        errors.append(checks.Error(
            f"ABV_BLOCK_LENGTH ({block}) exceeds ABV_MAX_BLOCK_LENGTH ({largest}).",
            id='wavelet.E002',
        ))
    for name in ('ABV_REBUILD_BUDGET', 'SEGMENT_MIN_R', 'SEGMENT_R_FACTOR', 'DBV_CHUNK_TARGET', 'SELFCHECK_SAMPLE'):
        value = wavelet_setting(name)
        if not isinstance(value, int) or value < 1:
            errors.append(checks.Error(
                f"WAVELET_TRIE['{name}'] must be a positive integer, got {value!r}.",
                id='wavelet.E003',
            ))
    kind = wavelet_setting('APPEND_BITVECTOR')
    if kind not in APPEND_BITVECTOR_KINDS:
        errors.append(checks.Error(
            f"WAVELET_TRIE['APPEND_BITVECTOR'] is {kind!r}.",
            hint=f"Use one of: {', '.join(APPEND_BITVECTOR_KINDS)}",
            id='wavelet.E004',
        ))
    return errors
