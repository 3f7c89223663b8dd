import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'transmonsim.settings')
django.setup()
