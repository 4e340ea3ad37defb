from django.apps import AppConfig


class WaveletConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'wavelet'
    verbose_name = 'Wavelet Trie index'

    def ready(self):
        from . import checks  # noqa: F401  registers the settings checks
