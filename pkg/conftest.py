"""Wiring para o pytest: configura o Django como faz `manage.py test`."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'metaestavel.settings')
django.setup()
