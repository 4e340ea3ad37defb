"""
Typed access to the WAVELET_TRIE settings dict.
"""

from django.conf import settings

DEFAULTS = {
    'ABV_BLOCK_LENGTH': 4096,
    'ABV_MAX_BLOCK_LENGTH': 65536,
    'ABV_REBUILD_BUDGET': 2,
    'SEGMENT_MIN_R': 64,
    'SEGMENT_R_FACTOR': 4,
    'APPEND_BITVECTOR': 'blocked',
    'DBV_CHUNK_TARGET': 256,
    'HASHWT_SEED': None,
    'SELFCHECK_SAMPLE': 1000,
}

APPEND_BITVECTOR_KINDS = ('blocked', 'logarithmic')


def wavelet_setting(name):
    """Return the configured value of `name`, falling back to DEFAULTS."""
    if name not in DEFAULTS:
        raise KeyError(f"unknown wavelet setting {name!r}")
    configured = getattr(settings, 'WAVELET_TRIE', None) or {}
    return configured.get(name, DEFAULTS[name])


def resolve(value, name):
    """Explicit keyword arguments win over settings."""
    return wavelet_setting(name) if value is None else value
