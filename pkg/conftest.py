import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'marcha_bipede.settings')
django.setup()
