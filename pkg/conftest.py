"""
Pytest wiring: configure Django the same way `manage.py test` does.
"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'settings.test')
django.setup()
