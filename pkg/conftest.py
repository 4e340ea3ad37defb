"""Configure Django for running the test suite under plain pytest."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'wavelet_index.settings')
django.setup()
